"""Plain directed-graph helpers over dense integer vertices.

Graphs are given as successor lists ``succ[v] -> iterable of int``. Nothing
here knows about automata or Markov chains; the automaton and product
modules build their graphs and hand them over.
"""

from collections import deque


def bits(mask):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def tarjan(n, succ, alive=None):
    """Strongly connected components, iteratively.

    Components come out in reverse topological order: every component is
    emitted after all components reachable from it. ``alive`` (optional
    sequence of bools) hides tombstoned vertices and the edges into them.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0

    for root in range(n):
        if index[root] != -1 or (alive is not None and not alive[root]):
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if alive is not None and not alive[w]:
                    continue
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    pushed = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                comps.append(comp)
    return comps


def reachable(succ, sources, alive=None):
    """Set of vertices reachable from ``sources`` (sources included)."""
    seen = set()
    queue = deque()
    for s in sources:
        if (alive is None or alive[s]) and s not in seen:
            seen.add(s)
            queue.append(s)
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w not in seen and (alive is None or alive[w]):
                seen.add(w)
                queue.append(w)
    return seen


def reverse(n, succ):
    pred = [[] for _ in range(n)]
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)
    return pred


def shortest_path(succ, source, targets, allowed=None):
    """Vertex path from ``source`` to the nearest vertex in ``targets``.

    The path has at least one edge even when ``source`` is a target, so this
    also finds shortest cycles. Returns None if no target is reachable.
    """
    parent = {}
    seen = set()
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w in seen or (allowed is not None and w not in allowed):
                continue
            seen.add(w)
            parent[w] = v
            if w in targets:
                path = [w]
                x = v
                while x != source:
                    path.append(x)
                    x = parent[x]
                path.append(source)
                path.reverse()
                return path
            queue.append(w)
    return None
