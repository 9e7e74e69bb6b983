"""Ground truth for strongly connected inputs via the powerset chain.

For a strongly connected product that contains a final node, almost every
chain path is either accepted or eventually blocked (no run survives). The
acceptance probability is therefore one minus the probability that the
subset construction, driven by the chain, reaches the empty set.
"""

from collections import deque
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .digraph import reverse, reachable, tarjan
from .product import build_product, symbol_indices

POWERSET_CAP = 1 << 16


class OracleError(ValueError):
    pass


def check_oracle_precondition(dtmc, nba):
    """Raise OracleError unless the reachable product is one SCC with a final node."""
    prod = build_product(dtmc, nba)
    if not prod.nodes:
        return prod
    comps = tarjan(len(prod.nodes), prod.succ)
    if len(comps) != 1:
        raise OracleError(
            f"product is not strongly connected ({len(comps)} components); "
            "the absorption argument needs a single SCC"
        )
    if not any(prod.final):
        raise OracleError("product has no final node")
    return prod


def powerset_chain(dtmc, nba, cap=POWERSET_CAP):
    """Reachable part of the chain over ``(chain state, subset)``.

    Returns ``(states, rows, init)`` with ``rows[i]`` a list of ``(j, p)``
    and ``init`` a list of ``(i, p)``; subsets are bitmasks.
    """
    sym = symbol_indices(dtmc, nba)
    index = {}
    states = []
    queue = deque()

    def visit(key):
        i = index.get(key)
        if i is None:
            if len(states) >= cap:
                raise OracleError(f"powerset chain exceeds {cap} states")
            i = index[key] = len(states)
            states.append(key)
            queue.append(i)
        return i

    init = {}
    for s, p in dtmc.initial:
        i = visit((s, nba.post(nba.initial, sym[s])))
        init[i] = init.get(i, 0) + p
    rows = []
    while queue:
        i = queue.popleft()
        s, mask = states[i]
        row = {}
        if mask:
            for t, p in dtmc.trans[s]:
                j = visit((t, nba.post(mask, sym[t])))
                row[j] = row.get(j, 0) + p
        rows.append(sorted(row.items()))
    return states, rows, sorted(init.items())


def _solve_exact(unknowns, coeffs, rhs):
    """Solve ``x = A x + b`` over Fractions by sparse elimination.

    ``coeffs[i]`` maps unknown -> coefficient; unknowns are eliminated in the
    given order and recovered by back substitution.
    """
    rows = {i: dict(coeffs[i]) for i in unknowns}
    const = {i: rhs[i] for i in unknowns}
    users = {i: set() for i in unknowns}
    for i, row in rows.items():
        for j in row:
            users[j].add(i)
    for k in unknowns:
        row = rows[k]
        self_c = row.pop(k, 0)
        users[k].discard(k)
        denom = 1 - self_c
        if denom == 0:
            raise OracleError("singular absorption system")
        for j in row:
            row[j] /= denom
        const[k] /= denom
        for r in list(users[k]):
            rr = rows[r]
            c = rr.pop(k)
            for j, a in row.items():
                if j not in rr:
                    users[j].add(r)
                rr[j] = rr.get(j, 0) + c * a
            const[r] += c * const[k]
        users[k].clear()
        for j in row:
            users[j].discard(k)
    x = {}
    for k in reversed(unknowns):
        x[k] = const[k] + sum((a * x[j] for j, a in rows[k].items()), Fraction(0))
    return x


def absorption_probability(states, rows, init, exact):
    """Probability of reaching a state whose subset is empty."""
    n = len(states)
    succ = [[j for j, _ in r] for r in rows]
    empty = [i for i, (_, m) in enumerate(states) if m == 0]
    if not empty:
        return Fraction(0) if exact else 0.0
    can = reachable(reverse(n, succ), empty)
    unknowns = [i for i in range(n) if i in can and states[i][1] != 0]
    # successors first keeps the elimination fill small
    order = {v: k for k, comp in enumerate(tarjan(n, succ)) for v in comp}
    unknowns.sort(key=lambda i: (order[i], i))
    zero = Fraction(0) if exact else 0.0
    value = {i: (1 if exact else 1.0) for i in empty}
    rhs = {}
    coeffs = {}
    pos = set(unknowns)
    for i in unknowns:
        b = zero
        row = {}
        for j, p in rows[i]:
            p = Fraction(p) if exact else float(p)
            if j in value:
                b += p * value[j]
            elif j in pos:
                row[j] = p
        coeffs[i] = row
        rhs[i] = b
    if exact:
        x = _solve_exact(unknowns, coeffs, rhs)
    else:
        local = {v: k for k, v in enumerate(unknowns)}
        m = len(unknowns)
        r_, c_, d_ = [], [], []
        for i in unknowns:
            for j, p in coeffs[i].items():
                r_.append(local[i])
                c_.append(local[j])
                d_.append(p)
        a = sp.csr_matrix((d_, (r_, c_)), shape=(m, m))
        sol = spsolve((sp.eye(m) - a).tocsc(), np.array([rhs[i] for i in unknowns]))
        x = dict(zip(unknowns, np.atleast_1d(sol)))
    x.update(value)
    total = zero
    for i, p in init:
        total += (Fraction(p) if exact else float(p)) * x.get(i, zero)
    return total


def powerset_absorption_oracle(nba, dtmc, cap=POWERSET_CAP, check=True):
    """``1 - Pr(blocked)`` for a strongly connected product.

    Exact (a Fraction) when every chain probability is rational, a float
    otherwise.
    """
    if check:
        check_oracle_precondition(dtmc, nba)
    states, rows, init = powerset_chain(dtmc, nba, cap)
    exact = dtmc.exact
    blocked = absorption_probability(states, rows, init, exact)
    return (1 - blocked) if exact else 1.0 - float(blocked)
