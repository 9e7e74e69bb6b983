"""SCC decomposition of a product and the bottom-up zero-state removal."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .digraph import reachable, reverse, tarjan

UNMARKED = "unmarked"
POSITIVE = "positive"
REMOVED = "removed"


@dataclass(frozen=True)
class SccDag:
    """Condensation of the live part of a product.

    ``components`` is in reverse topological order (successors first).
    ``alive`` tombstones nodes; node indices of the product never change.
    """

    components: tuple
    comp_of: tuple
    dag_edges: tuple
    trivial: tuple
    has_final: tuple
    status: tuple
    alive: tuple

    def __len__(self):
        return len(self.components)

    def is_bottom(self, c):
        return all(self.status[d] == REMOVED for d in self.dag_edges[c])

    def bottoms(self):
        return [c for c in range(len(self.components)) if self.status[c] != REMOVED and self.is_bottom(c)]

    def marked(self):
        return [c for c in range(len(self.components)) if self.status[c] == POSITIVE]


def sccs(prod, alive=None):
    n = len(prod.nodes)
    if alive is None:
        alive = (True,) * n
    alive = tuple(alive)
    comps = tarjan(n, prod.succ, alive)
    comp_of = [-1] * n
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c
    edges = []
    trivial = []
    has_final = []
    for c, comp in enumerate(comps):
        out = set()
        internal = False
        for v in comp:
            for w in prod.succ[v]:
                d = comp_of[w]
                if d == -1:
                    continue
                if d == c:
                    internal = True
                else:
                    out.add(d)
        edges.append(frozenset(out))
        trivial.append(not internal)
        has_final.append(any(prod.final[v] for v in comp))
    return SccDag(
        components=tuple(tuple(c) for c in comps),
        comp_of=tuple(comp_of),
        dag_edges=tuple(edges),
        trivial=tuple(trivial),
        has_final=tuple(has_final),
        status=(UNMARKED,) * len(comps),
        alive=alive,
    )


def prune_unreachable_and_dead(prod, dag):
    """Drop nodes unreachable from the initial nodes or unable to reach F.

    Returns ``(prod, dag)``: the product object is unchanged (nodes are only
    tombstoned) and the DAG is recomputed over the surviving nodes.
    """
    alive = dag.alive
    fwd = reachable(prod.succ, prod.initial, alive)
    pred = reverse(len(prod.nodes), prod.succ)
    finals = [v for v in fwd if prod.final[v]]
    bwd = reachable(pred, finals, [v in fwd for v in range(len(prod.nodes))])
    keep = tuple(alive[v] and v in fwd and v in bwd for v in range(len(prod.nodes)))
    return prod, sccs(prod, keep)


def preprocess_bsccs(prod, dag, positivity, workers=1):
    """Remove zero components bottom-up until every bottom SCC is marked.

    A bottom component that is trivial or has no final node is removed; any
    other bottom component is handed to ``positivity`` (called with the
    component's node list) and marked on True, removed on False. Removing a
    component deletes the edges into it, which may turn its predecessors into
    bottom components; those are processed in the next round. Components of
    one round are independent, so with ``workers > 1`` their positivity
    checks run on a thread pool.
    """
    k = len(dag.components)
    status = list(dag.status)
    remaining = [sum(1 for d in dag.dag_edges[c] if status[d] != REMOVED) for c in range(k)]
    preds = [[] for _ in range(k)]
    for c in range(k):
        for d in dag.dag_edges[c]:
            preds[d].append(c)
    ready = [c for c in range(k) if status[c] == UNMARKED and remaining[c] == 0]
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while ready:
            query = [c for c in ready if not dag.trivial[c] and dag.has_final[c]]
            comps = [list(dag.components[c]) for c in query]
            verdicts = list(pool.map(positivity, comps)) if pool else [positivity(x) for x in comps]
            verdict = dict(zip(query, verdicts))
            nxt = []
            for c in ready:
                if verdict.get(c, False):
                    status[c] = POSITIVE
                    continue
                status[c] = REMOVED
                for p in preds[c]:
                    remaining[p] -= 1
                    if remaining[p] == 0 and status[p] == UNMARKED:
                        nxt.append(p)
            ready = nxt
    finally:
        if pool:
            pool.shutdown()
    alive = list(dag.alive)
    for c in range(k):
        if status[c] == REMOVED:
            for v in dag.components[c]:
                alive[v] = False
    return replace(dag, status=tuple(status), alive=tuple(alive))
