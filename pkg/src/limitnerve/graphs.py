"""Small directed-graph helpers: cycle detection and reachability."""

from __future__ import annotations


def nodes_on_cycles(nodes, successors) -> set:
    """Nodes lying on a directed cycle (self-loops count as cycles).

    Tarjan SCC, iterative: a node is on a cycle iff its strongly connected
    component is nontrivial or it has a self-loop.
    """
    index: dict = {}
    lowlink: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = [0]
    result: set = set()

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = lowlink[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    result.update(component)
                else:
                    only = component[0]
                    if only in set(successors(only)):
                        result.add(only)
    return result


def reachable_from(seeds, successors) -> set:
    """All nodes reachable from the seed set (paths of length >= 0)."""
    seen = set(seeds)
    queue = list(seeds)
    while queue:
        node = queue.pop()
        for succ in successors(node):
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return seen


def eventual_range(nodes, successors) -> set:
    """Nodes on a directed cycle or reachable from one."""
    return reachable_from(nodes_on_cycles(nodes, successors), successors)
