"""Nondeterministic Büchi automata over explicit finite alphabets.

States are dense integers ``0..n-1`` and every state set is an ``int``
bitset. ``delta[q][a]`` is the successor bitset of state ``q`` under the
symbol with index ``a``.
"""

from collections import deque
from dataclasses import dataclass, field, replace

from .digraph import bits, mask_of, shortest_path, tarjan

MAX_APS = 16


class AutomatonError(ValueError):
    pass


class UnknownSymbolError(AutomatonError):
    pass


def _symbol_name(sym, ap_names):
    if ap_names is None:
        return str(sym)
    if not sym:
        return "-"
    return ",".join(ap for ap in ap_names if ap in sym)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of symbols.

    For alphabets of atomic-proposition valuations each symbol is the
    frozenset of propositions that hold, and ``ap_names`` fixes the
    proposition order. ``valuations`` may restrict the alphabet to a subset
    of the ``2**len(ap_names)`` valuations.
    """

    symbols: tuple
    ap_names: tuple = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _by_name: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise AutomatonError("an alphabet needs at least two symbols")
        index = {sym: i for i, sym in enumerate(self.symbols)}
        if len(index) != len(self.symbols):
            raise AutomatonError("alphabet symbols must be distinct")
        if self.ap_names is not None:
            if len(self.ap_names) > MAX_APS:
                raise AutomatonError(f"at most {MAX_APS} atomic propositions are supported")
            aps = set(self.ap_names)
            for sym in self.symbols:
                if not isinstance(sym, frozenset) or not sym <= aps:
                    raise AutomatonError(f"symbol {sym!r} is not a valuation of {self.ap_names}")
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_by_name", {_symbol_name(s, self.ap_names): s for s in self.symbols}
        )

    @classmethod
    def plain(cls, names):
        return cls(tuple(names))

    @classmethod
    def from_aps(cls, ap_names, valuations=None):
        """Valuation alphabet; ``valuations`` are bitmasks (bit i = AP i)."""
        ap_names = tuple(ap_names)
        if len(ap_names) > MAX_APS:
            raise AutomatonError(f"at most {MAX_APS} atomic propositions are supported")
        if valuations is None:
            valuations = range(1 << len(ap_names))
        symbols = tuple(
            frozenset(ap for i, ap in enumerate(ap_names) if v >> i & 1) for v in valuations
        )
        return cls(symbols, ap_names)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, sym):
        return sym in self._index

    def index(self, sym):
        """Index of a symbol, given either as the symbol itself or its name."""
        i = self._index.get(sym)
        if i is None and isinstance(sym, str):
            named = self._by_name.get(sym)
            if named is not None:
                i = self._index[named]
        if i is None:
            raise UnknownSymbolError(f"unknown symbol {sym!r}")
        return i

    def name(self, sym):
        return _symbol_name(sym, self.ap_names)

    def valuation(self, sym):
        """Bitmask of the valuation symbol ``sym``."""
        return sum(1 << i for i, ap in enumerate(self.ap_names) if ap in sym)


@dataclass(frozen=True)
class Nba:
    alphabet: Alphabet
    delta: tuple
    initial: int
    final: int
    names: tuple = None

    def __post_init__(self):
        n = len(self.delta)
        full = (1 << n) - 1
        for q, row in enumerate(self.delta):
            if len(row) != len(self.alphabet):
                raise AutomatonError(f"state {q}: expected {len(self.alphabet)} transition sets")
            for m in row:
                if m & ~full:
                    raise AutomatonError(f"state {q}: transition to an unknown state")
        if self.initial & ~full or self.final & ~full:
            raise AutomatonError("initial and final states must be states of the automaton")
        if self.names is not None and len(self.names) != n:
            raise AutomatonError("one name per state expected")

    @classmethod
    def build(cls, alphabet, n_states, transitions, initial, final, names=None):
        """Construct from ``(src, symbol, dst)`` triples and state iterables."""
        table = [[0] * len(alphabet) for _ in range(n_states)]
        for src, sym, dst in transitions:
            if not (0 <= src < n_states and 0 <= dst < n_states):
                raise AutomatonError(f"transition {src} -> {dst} mentions an unknown state")
            table[src][alphabet.index(sym)] |= 1 << dst
        return cls(
            alphabet,
            tuple(tuple(r) for r in table),
            mask_of(initial),
            mask_of(final),
            tuple(names) if names is not None else None,
        )

    @property
    def n_states(self):
        return len(self.delta)

    def state_name(self, q):
        return self.names[q] if self.names is not None else str(q)

    def post(self, mask, a):
        """Successor bitset of the state bitset ``mask`` under symbol index ``a``."""
        out = 0
        for q in bits(mask):
            out |= self.delta[q][a]
        return out

    def transitions(self):
        for q, row in enumerate(self.delta):
            for a, m in enumerate(row):
                for p in bits(m):
                    yield q, a, p

    def transition_count(self):
        return sum(m.bit_count() for row in self.delta for m in row)

    def graph(self):
        """Successor lists of the underlying graph (symbols forgotten)."""
        out = []
        for row in self.delta:
            m = 0
            for x in row:
                m |= x
            out.append(list(bits(m)))
        return out

    def dump(self):
        """One ``src symbol -> dst`` line per transition, plus init/final lines."""
        lines = [
            "init " + " ".join(self.state_name(q) for q in bits(self.initial)),
            "final " + " ".join(self.state_name(q) for q in bits(self.final)),
        ]
        for q, a, p in self.transitions():
            sym = self.alphabet.name(self.alphabet.symbols[a])
            lines.append(f"{self.state_name(q)} {sym} -> {self.state_name(p)}")
        return "\n".join(lines) + "\n"


def delta_word(nba, source, word):
    """The set of states reachable from ``source`` by reading ``word``."""
    mask = source if isinstance(source, int) else mask_of(source)
    for sym in word:
        mask = nba.post(mask, nba.alphabet.index(sym))
    return frozenset(bits(mask))


def with_initial(nba, states):
    mask = mask_of(states)
    if mask >> nba.n_states:
        raise AutomatonError("new initial states must be states of the automaton")
    return replace(nba, initial=mask)


def restrict_scc(nba, component, p):
    """Sub-automaton on ``component`` with initial state ``p``.

    Transitions leaving the component are dropped and the final states are
    intersected with it. States are renumbered in increasing order of their
    original index; names are carried over.
    """
    comp = sorted(set(component))
    if p not in comp:
        raise AutomatonError(f"state {p} is not in the component")
    if comp and (comp[0] < 0 or comp[-1] >= nba.n_states):
        raise AutomatonError("component mentions unknown states")
    local = {q: i for i, q in enumerate(comp)}
    cmask = mask_of(comp)
    delta = []
    for q in comp:
        row = []
        for m in nba.delta[q]:
            row.append(mask_of(local[r] for r in bits(m & cmask)))
        delta.append(tuple(row))
    final = mask_of(local[q] for q in bits(nba.final & cmask))
    names = tuple(nba.state_name(q) for q in comp)
    return Nba(nba.alphabet, tuple(delta), 1 << local[p], final, names)


@dataclass(frozen=True)
class Witness:
    """Lasso ``prefix · cycle^ω`` with two distinct accepting runs.

    Each run lists ``len(prefix) + len(cycle) + 1`` states; the state after
    the cycle equals the state after the prefix.
    """

    prefix: tuple
    cycle: tuple
    runs: tuple


@dataclass(frozen=True)
class UnambiguityReport:
    unambiguous: bool
    witness: Witness = None


def _pair_search(nba, starts):
    """Look for a lasso with two accepting runs in the self-product.

    Vertices are ``(p, q, diverged)``; ``starts`` lists the initial pairs.
    Returns a Witness, or None when no diverged vertex lies on a cycle that
    visits final states in both components.
    """
    k = len(nba.alphabet)
    final = nba.final
    index = {}
    verts = []
    succ = []
    labels = []
    queue = deque()

    def visit(v):
        i = index.get(v)
        if i is None:
            i = index[v] = len(verts)
            verts.append(v)
            succ.append([])
            labels.append([])
            queue.append(i)
        return i

    start_ids = [visit((p, q, p != q)) for p, q in starts]
    while queue:
        i = queue.popleft()
        p, q, d = verts[i]
        for a in range(k):
            mp = nba.delta[p][a]
            if not mp:
                continue
            mq = nba.delta[q][a]
            for p2 in bits(mp):
                for q2 in bits(mq):
                    j = visit((p2, q2, d or p2 != q2))
                    succ[i].append(j)
                    labels[i].append(a)

    for comp in tarjan(len(verts), succ):
        if not verts[comp[0]][2]:
            continue
        members = set(comp)
        if len(comp) == 1 and comp[0] not in succ[comp[0]]:
            continue
        left = [i for i in comp if final >> verts[i][0] & 1]
        right = [i for i in comp if final >> verts[i][1] & 1]
        if not left or not right:
            continue
        return _lasso(nba, verts, succ, labels, start_ids, members, left[0], right[0])
    return None


def _edge_path(succ, labels, source, targets, allowed=None):
    path = shortest_path(succ, source, targets, allowed)
    syms = []
    for u, v in zip(path, path[1:]):
        syms.append(labels[u][succ[u].index(v)])
    return path, syms


def _lasso(nba, verts, succ, labels, start_ids, members, x, y):
    path = None
    for s in start_ids:
        cand = [x] if s == x else shortest_path(succ, s, {x})
        if cand is not None and (path is None or len(cand) < len(path)):
            path = cand
    prefix = []
    for u, v in zip(path, path[1:]):
        prefix.append(labels[u][succ[u].index(v)])
    if x == y:
        cyc, cyc_syms = _edge_path(succ, labels, x, {x}, members)
    else:
        to_y, s1 = _edge_path(succ, labels, x, {y}, members)
        back, s2 = _edge_path(succ, labels, y, {x}, members)
        cyc = to_y + back[1:]
        cyc_syms = s1 + s2
    lasso = path + cyc[1:]
    syms = nba.alphabet.symbols
    return Witness(
        prefix=tuple(syms[a] for a in prefix),
        cycle=tuple(syms[a] for a in cyc_syms),
        runs=(tuple(verts[i][0] for i in lasso), tuple(verts[i][1] for i in lasso)),
    )


def verify_unambiguous(nba):
    """Check that every infinite word has at most one accepting run."""
    init = list(bits(nba.initial))
    witness = _pair_search(nba, [(p, q) for p in init for q in init])
    return UnambiguityReport(witness is None, witness)


def is_separated(nba):
    """True iff the languages of distinct states are pairwise disjoint."""
    n = nba.n_states
    starts = [(p, q) for p in range(n) for q in range(p + 1, n)]
    return _pair_search(nba, starts) is None
