"""Reachable synchronous product of a labelled Markov chain and an NBA.

Node ``<s,q>`` means: the chain is in ``s`` and the automaton, having read
the label of ``s``, is in ``q``. An edge ``<s,q> -> <t,p>`` exists iff
``P(s,t) > 0`` and ``p`` is in ``delta(q, L(t))``; it carries weight
``P(s,t)``.
"""

from collections import deque
from dataclasses import dataclass

from .automata import Alphabet, AutomatonError, Nba
from .digraph import bits, mask_of


class ProductError(ValueError):
    pass


@dataclass(frozen=True)
class ProductAutomaton:
    nodes: tuple
    succ: tuple
    weights: tuple
    initial: tuple
    init_weight: tuple
    final: tuple
    dtmc: object
    nba: object

    def __len__(self):
        return len(self.nodes)

    def index_of(self, node):
        if isinstance(node, int):
            if not 0 <= node < len(self.nodes):
                raise ProductError(f"unknown product node {node}")
            return node
        try:
            return self._index[tuple(node)]
        except KeyError:
            raise ProductError(f"unknown product node {node!r}") from None

    @property
    def _index(self):
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {n: i for i, n in enumerate(self.nodes)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def chain_state(self, i):
        return self.nodes[i][0]

    def label(self, i):
        s, q = self.nodes[i]
        return f"{self.dtmc.state_name(s)},{self.nba.state_name(q)}"


def symbol_indices(dtmc, nba):
    """Alphabet index of each chain state's label, checking compatibility."""
    alphabet = nba.alphabet
    keep = None
    if alphabet.ap_names is not None:
        declared = set(dtmc.ap_names or ())
        missing = [ap for ap in alphabet.ap_names if ap not in declared]
        if missing:
            raise ProductError(f"chain does not declare propositions {missing}")
        keep = frozenset(alphabet.ap_names)
    out = []
    for s, lab in enumerate(dtmc.labels):
        if keep is not None and isinstance(lab, frozenset):
            lab = lab & keep
        try:
            out.append(alphabet.index(lab))
        except AutomatonError:
            raise ProductError(
                f"label {lab!r} of chain state {s} is not a symbol of the automaton alphabet"
            ) from None
    return out


def build_product(dtmc, nba):
    sym = symbol_indices(dtmc, nba)
    index = {}
    nodes = []
    queue = deque()

    def visit(node):
        i = index.get(node)
        if i is None:
            i = index[node] = len(nodes)
            nodes.append(node)
            queue.append(i)
        return i

    initial = []
    init_weight = []
    for s, w in sorted(dtmc.initial):
        if w <= 0:
            continue
        for q in bits(nba.post(nba.initial, sym[s])):
            initial.append(visit((s, q)))
            init_weight.append(float(w))

    succ = []
    weights = []
    while queue:
        i = queue.popleft()
        s, q = nodes[i]
        out, ws = [], []
        for t, p_st in dtmc.trans[s]:
            w = float(p_st)
            for p in bits(nba.delta[q][sym[t]]):
                out.append(visit((t, p)))
                ws.append(w)
        # queue order == index order, so rows are appended in index order
        succ.append(tuple(out))
        weights.append(tuple(ws))

    final = tuple(bool(nba.final >> q & 1) for _, q in nodes)
    return ProductAutomaton(
        nodes=tuple(nodes),
        succ=tuple(succ),
        weights=tuple(weights),
        initial=tuple(initial),
        init_weight=tuple(init_weight),
        final=final,
        dtmc=dtmc,
        nba=nba,
    )


def node_matrix_row(prod, node):
    """Outgoing ``(node, weight)`` pairs; nodes reported as ``(s, q)``."""
    i = prod.index_of(node)
    return [(prod.nodes[j], w) for j, w in zip(prod.succ[i], prod.weights[i])]


def as_nba(prod):
    """The product viewed as an automaton over chain states.

    A fresh initial state (the last index) reads the first chain state, so
    the automaton accepts exactly the chain paths ``s0 s1 ...`` whose labels
    the original automaton accepts.
    """
    n = len(prod.nodes)
    k = max(2, prod.dtmc.n_states)
    alphabet = Alphabet(tuple(range(k)))
    table = [[0] * k for _ in range(n + 1)]
    for i in range(n):
        for j in prod.succ[i]:
            table[i][prod.nodes[j][0]] |= 1 << j
    for i in prod.initial:
        table[n][prod.nodes[i][0]] |= 1 << i
    final = mask_of(i for i in range(n) if prod.final[i])
    return Nba(alphabet, tuple(tuple(r) for r in table), 1 << n, final)


def to_dot(prod, alive=None):
    lines = ["digraph product {", "  rankdir=LR;"]
    for i in range(len(prod.nodes)):
        if alive is not None and not alive[i]:
            continue
        shape = "box" if prod.final[i] else "ellipse"
        style = ", penwidth=2" if i in prod.initial else ""
        lines.append(f'  n{i} [label="{prod.label(i)}", shape={shape}{style}];')
    for i, (targets, ws) in enumerate(zip(prod.succ, prod.weights)):
        if alive is not None and not alive[i]:
            continue
        for j, w in zip(targets, ws):
            if alive is not None and not alive[j]:
                continue
            lines.append(f'  n{i} -> n{j} [label="{w:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
