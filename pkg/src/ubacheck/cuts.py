"""Pure cuts inside positive bottom SCCs of a product.

Words are sequences of chain states. Reading ``t`` from node ``<s,q>``
moves to every node ``<t,p>`` of the component that is a successor of
``<s,q>``; ``delta_c`` lifts this to node sets and words.
"""

from collections import deque
from dataclasses import dataclass

from .automata import is_separated


class CutError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cut:
    anchor: int
    word: tuple
    members: frozenset
    extensions: int = 0

    def __len__(self):
        return len(self.members)

    @property
    def rounds(self):
        """Extension searches run, counting the final unsuccessful one."""
        return self.extensions + 1


@dataclass(frozen=True)
class ExtensionWitness:
    word: tuple
    partner: int


def _chain_succ(prod, component):
    """``out[u][t]`` = successors of ``u`` inside the component at chain state ``t``."""
    members = set(component)
    out = {}
    for u in component:
        by_t = {}
        for w in prod.succ[u]:
            if w in members:
                by_t.setdefault(prod.nodes[w][0], []).append(w)
        out[u] = by_t
    return out


def delta_c(prod, component, sources, word, _succ=None):
    """Nodes of ``component`` reached from ``sources`` by reading ``word``."""
    succ = _succ if _succ is not None else _chain_succ(prod, component)
    cur = set(sources)
    for t in word:
        nxt = set()
        for u in cur:
            nxt.update(succ[u].get(t, ()))
        cur = nxt
        if not cur:
            break
    return frozenset(cur)


def find_extension(prod, component, anchor, frontier_sets, _succ=None):
    """Shortest word ``y`` taking the anchor to itself and to a live partner.

    Breadth-first search over pairs of component nodes that read the same
    chain states, starting from ``(anchor, anchor)``. A pair ``(anchor, v)``
    with ``v != anchor`` and a nonempty ``frontier_sets[v]`` ends the search.
    """
    succ = _succ if _succ is not None else _chain_succ(prod, component)
    start = (anchor, anchor)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        u, v = pair
        su, sv = succ[u], succ[v]
        for t in sorted(su):
            targets = sv.get(t)
            if not targets:
                continue
            for u2 in su[t]:
                for v2 in targets:
                    nxt = (u2, v2)
                    if nxt in parent:
                        continue
                    parent[nxt] = pair
                    if u2 == anchor and v2 != anchor and frontier_sets.get(v2):
                        word = []
                        x = nxt
                        while x != start:
                            word.append(prod.nodes[x[0]][0])
                            x = parent[x]
                        return ExtensionWitness(tuple(reversed(word)), v2)
                    queue.append(nxt)
    return None


def generate_pure_cut(prod, component, anchor=None):
    """Grow ``Delta_C(anchor, z)`` by extensions until none is left.

    ``frontier[v]`` holds ``Delta_C(v, z)`` for every component node ``v``
    at the anchor's chain state and is updated by union along each new
    extension. If no extension exists at all, ``z`` is the shortest cycle
    through the anchor.
    """
    component = sorted(component)
    if not component:
        raise CutError("empty component")
    if anchor is None:
        anchor = component[0]
    s = prod.nodes[anchor][0]
    succ = _chain_succ(prod, component)
    frontier = {v: frozenset([v]) for v in component if prod.nodes[v][0] == s}
    word = ()
    limit = prod.nba.n_states
    steps = 0
    while True:
        ext = find_extension(prod, component, anchor, frontier, succ)
        if ext is None:
            break
        steps += 1
        if steps > limit:
            raise CutError(f"more than {limit} cut extensions: component is not positive")
        before = len(frontier[anchor])
        new = {}
        for v in frontier:
            acc = set()
            for r in delta_c(prod, component, [v], ext.word, succ):
                acc |= frontier[r]
            new[v] = frozenset(acc)
        frontier = new
        word = ext.word + word
        if len(frontier[anchor]) <= before:
            raise CutError("cut did not grow: component is not positive or automaton is ambiguous")
    if not word:
        path = _shortest_cycle(prod, anchor, succ)
        if path is None:
            raise CutError("anchor lies on no cycle")
        word = path
    return Cut(anchor, word, frontier[anchor], steps)


def _shortest_cycle(prod, anchor, succ):
    parent = {}
    queue = deque([anchor])
    seen = set()
    while queue:
        u = queue.popleft()
        for t in sorted(succ[u]):
            for w in succ[u][t]:
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = u
                if w == anchor:
                    word = []
                    x = w
                    while True:
                        word.append(prod.nodes[x][0])
                        x = parent[x]
                        if x == anchor:
                            return tuple(reversed(word))
                queue.append(w)
    return None


def separated_shortcut(nba_scc, check_separated=True):
    """All states form a cut when ``|delta| = |Sigma| * |Q|``.

    The counting criterion presumes a separated automaton, so by default
    separation is verified first. Returns the state set or None.
    """
    n = nba_scc.n_states
    if nba_scc.transition_count() != len(nba_scc.alphabet) * n:
        return None
    if check_separated and not is_separated(nba_scc):
        return None
    return frozenset(range(n))


def cosafety_shortcut(nba):
    """True iff every final state loops to itself, and only to itself, on every symbol."""
    for q in range(nba.n_states):
        if nba.final >> q & 1 and any(m != 1 << q for m in nba.delta[q]):
            return False
    return True
