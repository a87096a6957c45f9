"""Small graph helpers: Tarjan SCCs and cycle periods on dense index graphs."""

from math import gcd


def strongly_connected_components(n, successors):
    """Strongly connected components of a graph on nodes 0..n-1.

    successors(u) yields the out-neighbors of u.  Iterative Tarjan; returns a
    list of components (each a sorted list of nodes) in reverse topological
    order of the condensation.
    """
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack = []
    components = []
    counter = 1

    for root in range(n):
        if visited[root]:
            continue
        work = [(root, iter(successors(root)))]
        visited[root] = True
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if not visited[v]:
                    visited[v] = True
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, iter(successors(v))))
                    advanced = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    v = stack.pop()
                    on_stack[v] = False
                    comp.append(v)
                    if v == u:
                        break
                comp.sort()
                components.append(comp)
    return components


def is_strongly_connected(n, successors):
    if n <= 1:
        return True
    return len(strongly_connected_components(n, successors)) == 1


def component_period(nodes, successors):
    """Period (gcd of cycle lengths) of a strongly connected node set.

    Edges leaving the set are ignored.  A single node without a self-loop has
    no cycle; 1 is returned as a harmless default.
    """
    members = set(nodes)
    start = nodes[0]
    level = {start: 0}
    order = [start]
    g = 0
    for u in order:
        for v in successors(u):
            if v not in members:
                continue
            if v in level:
                g = gcd(g, level[u] + 1 - level[v])
            else:
                level[v] = level[u] + 1
                order.append(v)
    return abs(g) if g else 1
