"""Trading graphs, cycle and self-loop witnesses, pareto / global optimality.

An assignment is pareto optimal in a layer exactly when it is legal there
and its trading graph has no directed cycle; it is globally optimal when
that holds in at least ``alpha`` layers.  All operations here are pure
over immutable inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .model import NO_ITEM, is_legal_in_layer

SELF_LOOP = "selfloop"
TRADING_CYCLE = "cycle"


@dataclass(frozen=True)
class TradingGraph:
    """Directed graph over agents (vertices 0..n-1) and items (n..n+m-1)
    for one layer and one assignment.

    Edges: every allocated item points to its owner; every agent points to
    the items it strictly prefers to its allocation (its whole list when it
    holds nothing); every unallocated item points to the agents accepting
    it.  Adjacency lists are sorted ascending.
    """

    n: int
    m: int
    edges: tuple[tuple[int, ...], ...]
    layer: int
    alloc: tuple[int, ...]


@dataclass(frozen=True)
class CycleWitness:
    """Violation of pareto optimality.

    ``kind == "cycle"``: ``agents[r]`` holds ``items[r]`` and strictly
    prefers ``items[(r+1) % k]``, so the group gains by trading along the
    cycle.  ``kind == "selfloop"``: the single agent prefers the single,
    unallocated, item to its own allocation.
    """

    kind: str
    agents: tuple[int, ...]
    items: tuple[int, ...]

    def render(self, inst):
        names = []
        for a, b in zip(self.agents, self.items):
            names.append(inst.agents[a])
            names.append(inst.items[b])
        return f"{self.kind}: " + " ".join(names)


def build_trading_graph(inst, layer, p):
    if not is_legal_in_layer(inst, layer, p):
        raise ValueError(f"assignment is not legal in layer {layer}")
    n, m = inst.n, inst.m
    profile = inst.layers[layer]
    owner = p.owner_map(m)
    edges = [[] for _ in range(n + m)]
    for a in range(n):
        lst = profile[a]
        held = p.alloc[a]
        cut = len(lst) if held == NO_ITEM else lst.index(held)
        for b in lst[:cut]:
            edges[a].append(n + b)
    for b in range(m):
        if owner[b] != NO_ITEM:
            edges[n + b].append(owner[b])
        else:
            for a in range(n):
                if b in profile[a]:
                    edges[n + b].append(a)
    return TradingGraph(n, m, tuple(tuple(sorted(e)) for e in edges),
                        layer, p.alloc)


def find_violation(g):
    """First cycle of the trading graph as a witness, or None if acyclic.

    Deterministic: depth-first search from the lowest-indexed vertex with
    neighbors in ascending order; the first closed cycle found is reported.
    A cycle passing through an unallocated item is normalized to the self
    loop formed by the first agent-to-unallocated-item edge along it.
    """
    n = g.n
    total = n + g.m
    owner = [NO_ITEM] * g.m
    for a, v in enumerate(g.alloc):
        if v != NO_ITEM:
            owner[v] = a
    color = [0] * total
    for root in range(total):
        if color[root]:
            continue
        stack = [root]
        iters = [iter(g.edges[root])]
        color[root] = 1
        while stack:
            try:
                nxt = next(iters[-1])
            except StopIteration:
                color[stack.pop()] = 2
                iters.pop()
                continue
            if color[nxt] == 1:
                cycle = stack[stack.index(nxt):]
                return _witness_from_cycle(cycle, n, g.alloc, owner)
            if color[nxt] == 0:
                color[nxt] = 1
                stack.append(nxt)
                iters.append(iter(g.edges[nxt]))
    return None


def _witness_from_cycle(cycle, n, alloc, owner):
    # rotate so the cycle starts at an agent vertex
    if cycle[0] >= n:
        cycle = cycle[1:] + cycle[:1]
    k = len(cycle) // 2
    for r in range(k):
        a, b = cycle[2 * r], cycle[2 * r + 1] - n
        if owner[b] == NO_ITEM:
            return CycleWitness(SELF_LOOP, (a,), (b,))
    agents = tuple(cycle[2 * r] for r in range(k))
    items = tuple(alloc[a] for a in agents)
    return CycleWitness(TRADING_CYCLE, agents, items)


def find_layer_violation(inst, layer, p):
    return find_violation(build_trading_graph(inst, layer, p))


def witness_is_valid(inst, layer, p, w):
    """Re-check a witness directly against the definitions by list lookups."""
    profile = inst.layers[layer]

    def prefers(a, b_new, b_old):
        lst = profile[a]
        if b_new not in lst:
            return False
        if b_old == NO_ITEM:
            return True
        if b_old not in lst:
            return False
        return lst.index(b_new) < lst.index(b_old)

    if w.kind == SELF_LOOP:
        a, b = w.agents[0], w.items[0]
        return b not in p.alloc and prefers(a, b, p.alloc[a])
    if w.kind == TRADING_CYCLE:
        k = len(w.agents)
        if k < 2 or len(w.items) != k:
            return False
        for r in range(k):
            a, b = w.agents[r], w.items[r]
            if p.alloc[a] != b:
                return False
            if not prefers(a, w.items[(r + 1) % k], b):
                return False
        return True
    return False


def is_pareto_optimal_in_layer(inst, layer, p):
    """Legal in the layer and trading graph acyclic; an illegal assignment
    is not pareto optimal there."""
    if not 0 <= layer < inst.ell:
        raise IndexError(f"layer {layer} out of range [0, {inst.ell})")
    if not is_legal_in_layer(inst, layer, p):
        return False
    # cheap scan for self loops before the graph walk
    if _has_self_loop(inst, layer, p):
        return False
    pk = engine.pack(inst)
    alloc = engine.as_alloc_array(p)
    return bool(engine.acyclic_kernel(pk.pos[layer], pk.pref[layer],
                                      pk.plen[layer], pk.acc[layer],
                                      pk.alen[layer], alloc))


def _has_self_loop(inst, layer, p):
    profile = inst.layers[layer]
    allocated = set(v for v in p.alloc if v != NO_ITEM)
    for a in range(inst.n):
        lst = profile[a]
        held = p.alloc[a]
        cut = len(lst) if held == NO_ITEM else lst.index(held)
        for b in lst[:cut]:
            if b not in allocated:
                return True
    return False


def optimal_layers(inst, p):
    """Set of 0-based layer indices where p is pareto optimal."""
    pk = engine.pack(inst)
    alloc = engine.as_alloc_array(p)
    out = np.empty(inst.ell, dtype=np.uint8)
    engine.po_layer_mask(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, alloc, out)
    return frozenset(int(l) for l in np.nonzero(out)[0])


def is_globally_optimal(inst, p):
    return len(optimal_layers(inst, p)) >= inst.alpha


def pareto_dominates(inst, layer, q, p):
    """True iff q is at least as good as p for every agent under the layer's
    preferences and strictly better for at least one.  A q allocating an
    item its holder does not accept in the layer never dominates."""
    profile = inst.layers[layer]
    strict = False
    for a in range(inst.n):
        qa, pa = q.alloc[a], p.alloc[a]
        lst = profile[a]
        if qa != NO_ITEM and qa not in lst:
            return False
        qpos = len(lst) if qa == NO_ITEM else lst.index(qa)
        if pa == NO_ITEM:
            ppos = len(lst)
        elif pa in lst:
            ppos = lst.index(pa)
        else:
            ppos = len(lst) + 1  # an unacceptable holding ranks below nothing
        if qpos > ppos:
            return False
        if qpos < ppos:
            strict = True
    return strict


def is_dominated(inst, layer, p):
    """Brute-force scan over every assignment for a dominator of p."""
    pk = engine.pack(inst)
    rows = engine.assignment_rows(inst.n, inst.m)
    return bool(engine.exists_dominator(pk.pos[layer], pk.plen[layer], rows,
                                        engine.as_alloc_array(p)))


def agents_respect(inst, layer, a, b):
    """True iff one linear order over a subset of items contains both
    agents' layer lists, i.e. the union of the two orders is acyclic."""
    adj = {}
    for lst in (inst.layers[layer][a], inst.layers[layer][b]):
        for u, v in zip(lst, lst[1:]):
            adj.setdefault(u, set()).add(v)
    color = {}

    def dfs(u):
        color[u] = 1
        for v in adj.get(u, ()):
            c = color.get(v, 0)
            if c == 1 or (c == 0 and dfs(v)):
                return True
        color[u] = 2
        return False

    return not any(dfs(u) for u in list(adj) if color.get(u, 0) == 0)
