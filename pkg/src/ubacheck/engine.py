"""End-to-end computation of the probability that a chain's labels are accepted.

Pipeline: product -> prune -> SCC DAG -> (co-safety fast path | bottom-up
positivity preprocessing -> eigenvector values of positive bottom SCCs
normalised on a cut) -> absorbing linear system for the remaining nodes ->
weighted sum over the initial nodes.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .automata import restrict_scc, verify_unambiguous
from .cuts import Cut, CutError, cosafety_shortcut, generate_pure_cut, separated_shortcut
from .graph import REMOVED, preprocess_bsccs, prune_unreachable_and_dead, sccs
from .linalg import (
    EPS,
    MAX_ITER,
    RANK_TOL,
    LinalgError,
    SparseMatrix,
    null_vector,
    positivity_rank,
    power_iterate,
    refine_eigenvector,
    scc_matrix,
    solve_absorbing,
)
from .linalg import POSITIVE as POWER_POSITIVE
from .markov import uniform_chain
from .oracle import OracleError, powerset_absorption_oracle  # noqa: F401  (re-export)
from .product import build_product, symbol_indices

log = logging.getLogger("ubacheck")

ALMOST_ONE = 1e-9
CLAMP_SLACK = 1e-6


class AmbiguousAutomatonError(ValueError):
    def __init__(self, witness, nba=None):
        super().__init__("the automaton is ambiguous")
        self.witness = witness
        self.nba = nba


class NumericError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Options:
    method: str = "power"
    epsilon: float = EPS
    max_iter: int = MAX_ITER
    rank_tol: float = RANK_TOL
    trust_unambiguous: bool = False
    workers: int = 1
    cosafety: bool = True
    separated: bool = True
    refine: bool = True

    def __post_init__(self):
        if self.method not in ("power", "rank"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 < self.epsilon < 1e-2:
            raise ValueError("epsilon must lie in (0, 1e-2)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class SccReport:
    id: int
    size: int
    positive: bool
    cut_size: int = None
    iterations: int = 0
    method: str = ""
    cut: Cut = None
    residual: float = 0.0
    normalisation: float = 0.0

    def as_dict(self):
        return {
            "id": self.id,
            "size": self.size,
            "positive": self.positive,
            "cut_size": self.cut_size,
            "iterations": self.iterations,
        }


@dataclass
class MeasureResult:
    probability: float
    per_node: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    method: str = "power"
    sccs: list = field(default_factory=list)
    residual_max: float = 0.0
    outer_residual: float = 0.0
    wall_ms: float = 0.0
    product: object = None
    dag: object = None
    shortcut: str = None

    def to_json(self):
        return {
            "probability": self.probability,
            "method": self.method,
            "sccs": [r.as_dict() for r in self.sccs],
            "residual_max": self.residual_max,
            "wall_ms": self.wall_ms,
        }

    def cuts(self):
        return [r.cut for r in self.sccs if r.cut is not None]


def _uniform_cut(prod, component):
    """Cut from the transition-count criterion, lifted to one chain state."""
    nba = prod.nba
    qs = sorted({prod.nodes[v][1] for v in component})
    sub = restrict_scc(nba, qs, qs[0])
    if separated_shortcut(sub) is None:
        return None
    by_chain = {}
    for v in component:
        s, q = prod.nodes[v]
        by_chain.setdefault(s, set()).add(v)
    for s in sorted(by_chain):
        nodes = by_chain[s]
        if len(nodes) == len(qs):
            return Cut(min(nodes), (), frozenset(nodes), 0)
    return None


def _bscc_values(prod, component, options, power=None, uniform=False):
    """Values of a positive bottom SCC plus its report fields."""
    component = sorted(component)
    m = scc_matrix(prod, component)
    cut = None
    how = options.method
    if uniform and options.separated:
        cut = _uniform_cut(prod, component)
        if cut is not None:
            how += "+separated"
    if cut is None:
        cut = generate_pure_cut(prod, component)
    local = {v: i for i, v in enumerate(component)}
    idx = [local[v] for v in cut.members]
    iterations = 0
    if options.method == "rank":
        norm = np.zeros(m.n)
        norm[idx] = 1.0
        vals = null_vector(m, norm)
    else:
        if power is None or power.vector is None:
            power = power_iterate(m, options.epsilon, options.max_iter, options.rank_tol)
        if power.verdict != POWER_POSITIVE:
            raise NumericError("value computation requested for a zero component")
        iterations = power.iterations
        v = power.vector
        if power.fallback:
            how += "+rank-fallback"
        if options.refine:
            v, _ = refine_eigenvector(m, v, max_iter=options.max_iter)
        total = v[idx].sum()
        if not total > 0:
            raise NumericError("eigenvector vanishes on the cut")
        vals = v / total
    residual = float(np.max(np.abs(m @ vals - vals)))
    norm_err = abs(float(vals[idx].sum()) - 1.0)
    return dict(zip(component, vals.tolist())), cut, iterations, how, residual, norm_err


def bscc_state_values(prod, component, options=None, uniform=False):
    """Map node -> acceptance probability for a positive bottom SCC."""
    options = options or Options()
    return _bscc_values(prod, component, options, uniform=uniform)[0]


def _zero_result(t0, options, prod=None, dag=None):
    return MeasureResult(
        probability=0.0,
        method=options.method,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        product=prod,
        dag=dag,
    )


def _outer_system(prod, dag, fixed):
    """Unknowns in successor-first order, their matrix and beta vector."""
    unknowns = []
    for c, comp in enumerate(dag.components):
        if dag.status[c] == REMOVED:
            continue
        unknowns.extend(v for v in comp if dag.alive[v] and v not in fixed)
    local = {v: i for i, v in enumerate(unknowns)}
    rows = []
    beta = np.zeros(len(unknowns))
    for i, v in enumerate(unknowns):
        acc = {}
        for w, p in zip(prod.succ[v], prod.weights[v]):
            j = local.get(w)
            if j is not None:
                acc[j] = acc.get(j, 0.0) + p
            elif w in fixed:
                beta[i] += p * fixed[w]
        rows.append(tuple(sorted(acc.items())))
    return unknowns, SparseMatrix(len(unknowns), tuple(rows)), beta


def measure(dtmc, nba, options=None, uniform=False):
    """Probability that the label sequence of ``dtmc`` is accepted by ``nba``.

    ``uniform`` marks the uniform-chain path, which enables the
    transition-count cut shortcut.
    """
    options = options or Options()
    t0 = time.perf_counter()
    if not options.trust_unambiguous:
        report = verify_unambiguous(nba)
        if not report.unambiguous:
            raise AmbiguousAutomatonError(report.witness, nba)
    if nba.final == 0 or nba.initial == 0:
        return _zero_result(t0, options)
    prod = build_product(dtmc, nba)
    log.info("product: %d nodes", len(prod.nodes))
    if not prod.initial:
        return _zero_result(t0, options, prod)
    dag = sccs(prod)
    prod, dag = prune_unreachable_and_dead(prod, dag)
    if not dag.components:
        return _zero_result(t0, options, prod, dag)

    fixed = {}
    reports = []
    shortcut = None
    residual_max = 0.0
    try:
        if options.cosafety and cosafety_shortcut(nba):
            shortcut = "cosafety"
            fixed = {v: 1.0 for v in range(len(prod.nodes)) if dag.alive[v] and prod.final[v]}
        else:
            dag, reports, fixed, residual_max = _bottom_up(prod, dag, options, uniform)
        unknowns, a, beta = _outer_system(prod, dag, fixed)
        x, outer_res, sweeps = solve_absorbing(a, beta)
    except (LinalgError, CutError) as e:
        raise NumericError(str(e)) from e
    log.info("outer system: %d unknowns, %d sweeps, residual %.3e", len(unknowns), sweeps, outer_res)

    raw = dict(fixed)
    raw.update(zip(unknowns, x.tolist()))
    per_node = {}
    for v, val in raw.items():
        if not -CLAMP_SLACK <= val <= 1 + CLAMP_SLACK:
            raise NumericError(f"value {val!r} of node {prod.label(v)} is not a probability")
        per_node[prod.nodes[v]] = min(1.0, max(0.0, val))
    prob = 0.0
    for v, w in zip(prod.initial, prod.init_weight):
        prob += w * per_node.get(prod.nodes[v], 0.0)
    prob = min(1.0, max(0.0, prob))
    return MeasureResult(
        probability=prob,
        per_node=per_node,
        raw={prod.nodes[v]: val for v, val in raw.items()},
        method=options.method,
        sccs=reports,
        residual_max=max(residual_max, outer_res),
        outer_residual=outer_res,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        product=prod,
        dag=dag,
        shortcut=shortcut,
    )


def _bottom_up(prod, dag, options, uniform):
    verdicts = {}

    def positivity(comp):
        m = scc_matrix(prod, comp)
        if options.method == "rank":
            ok = positivity_rank(m, options.rank_tol)
            verdicts[comp[0]] = (ok, None)
        else:
            res = power_iterate(m, options.epsilon, options.max_iter, options.rank_tol)
            ok = res.verdict == POWER_POSITIVE
            verdicts[comp[0]] = (ok, res)
        return ok

    dag = preprocess_bsccs(prod, dag, positivity, options.workers)
    marked = dag.marked()

    def values(c):
        comp = dag.components[c]
        power = verdicts.get(comp[0], (None, None))[1]
        return _bscc_values(prod, comp, options, power, uniform)

    if options.workers > 1 and len(marked) > 1:
        with ThreadPoolExecutor(options.workers) as pool:
            computed = list(pool.map(values, marked))
    else:
        computed = [values(c) for c in marked]

    fixed = {}
    reports = []
    residual_max = 0.0
    done = dict(zip(marked, computed))
    for c, comp in enumerate(dag.components):
        if comp[0] not in verdicts:
            continue
        ok, res = verdicts[comp[0]]
        iters = res.iterations if res is not None else 0
        if c in done:
            vals, cut, iters_v, how, resid, norm_err = done[c]
            fixed.update(vals)
            residual_max = max(residual_max, resid, norm_err)
            reports.append(
                SccReport(c, len(comp), True, len(cut), iters_v, how, cut, resid, norm_err)
            )
        else:
            reports.append(SccReport(c, len(comp), False, None, iters, options.method))
    return dag, reports, fixed, residual_max


def measure_uniform(nba, options=None):
    """Probability of ``L(nba)`` under the uniform measure on infinite words."""
    return measure(uniform_chain(nba.alphabet), nba, options, uniform=True)


def almost_universal(nba, options=None):
    return measure_uniform(nba, options).probability >= 1.0 - ALMOST_ONE


@dataclass(frozen=True)
class SampleResult:
    """Finite-horizon bounds from simulated chain paths.

    ``blocked`` paths are certainly rejected; ``accepted`` paths reached a
    final state that loops to itself on every symbol and are certainly
    accepted. The true probability lies between ``lower`` and ``upper`` up to
    sampling error.
    """

    samples: int
    horizon: int
    blocked: int
    accepted: int

    @property
    def lower(self):
        return self.accepted / self.samples

    @property
    def upper(self):
        return 1.0 - self.blocked / self.samples


def sample(dtmc, nba, samples=10_000, horizon=200, seed=0):
    sym = symbol_indices(dtmc, nba)
    rng = np.random.default_rng(seed)
    sure = 0
    for q in range(nba.n_states):
        if nba.final >> q & 1 and all(m == 1 << q for m in nba.delta[q]):
            sure |= 1 << q
    init_states = np.array([s for s, _ in dtmc.initial])
    init_p = np.array([float(p) for _, p in dtmc.initial])
    rows = [
        (np.array([t for t, _ in r]), np.cumsum([float(p) for _, p in r])) for r in dtmc.trans
    ]
    step_cache = {}
    blocked = accepted = 0
    starts = rng.choice(init_states, size=samples, p=init_p / init_p.sum())
    for s in starts:
        s = int(s)
        mask = nba.post(nba.initial, sym[s])
        draws = rng.random(horizon)
        for u in draws:
            if not mask or mask & sure:
                break
            targets, cum = rows[s]
            t = int(targets[min(np.searchsorted(cum, u * cum[-1], side="right"), len(targets) - 1)])
            key = (mask, t)
            nxt = step_cache.get(key)
            if nxt is None:
                nxt = step_cache[key] = nba.post(mask, sym[t])
            s, mask = t, nxt
        if not mask:
            blocked += 1
        elif mask & sure:
            accepted += 1
    return SampleResult(samples, horizon, blocked, accepted)
