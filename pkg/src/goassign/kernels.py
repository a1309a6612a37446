"""Answer-preserving instance shrinkers.

``kernel_truncate_lists`` keeps only each agent's n most preferred items
per layer (a pareto-optimal assignment can never reach deeper than that)
and drops items no longer mentioned anywhere, giving an instance of size
O(ell * n^2).  ``kernel_agent_classes`` caps every group of agents with
identical preference tuples at m + 1 members.  Both preserve the yes/no
answer and are idempotent.
"""

from __future__ import annotations

from .model import Instance


def kernel_truncate_lists(inst):
    n = inst.n
    layers = tuple(tuple(lst[:n] for lst in profile) for profile in inst.layers)
    mentioned = sorted({b for profile in layers for lst in profile for b in lst})
    remap = {old: new for new, old in enumerate(mentioned)}
    items = tuple(inst.items[old] for old in mentioned)
    layers = tuple(tuple(tuple(remap[b] for b in lst) for lst in profile)
                   for profile in layers)
    return Instance(inst.agents, items, layers, inst.alpha)


def compute_agent_class(inst, a):
    """The tuple of the agent's preference lists, one per layer; two agents
    are interchangeable exactly when these tuples are equal."""
    return tuple(profile[a] for profile in inst.layers)


def agent_class_partition(inst):
    """Agent indices grouped by class, in order of first appearance."""
    groups = {}
    for a in range(inst.n):
        groups.setdefault(compute_agent_class(inst, a), []).append(a)
    return groups


def kernel_agent_classes(inst):
    """Remove all but the first m + 1 members of every agent class (m agents
    of a class can hold items and one more can witness a self loop; the
    rest never matter)."""
    cap = inst.m + 1
    keep = []
    for members in agent_class_partition(inst).values():
        keep.extend(members[:cap])
    keep.sort()
    agents = tuple(inst.agents[a] for a in keep)
    layers = tuple(tuple(profile[a] for a in keep) for profile in inst.layers)
    return Instance(agents, inst.items, layers, inst.alpha)
