"""Serial dictatorship and pareto-optimal-assignment enumeration."""

from __future__ import annotations

import itertools

import numpy as np

from . import engine
from .model import Assignment

# a permutation is a tuple of all agent indices, each exactly once
Permutation = tuple


class BudgetError(RuntimeError):
    """A search space exceeded its configured size cap."""


def check_permutation(inst, pi):
    if sorted(pi) != list(range(inst.n)):
        raise ValueError(f"not a permutation of the {inst.n} agents: {pi!r}")


def serial_dictatorship(inst, layer, pi):
    """Agents pick, in pi order, their most preferred still-free acceptable
    item (or nothing).  The outcome is legal and pareto optimal in the
    layer."""
    check_permutation(inst, pi)
    pk = engine.pack(inst)
    perm = np.asarray(pi, dtype=np.int32)
    owner = np.empty(max(inst.m, 1), dtype=np.int32)
    alloc = np.empty(inst.n, dtype=np.int32)
    engine.serial_dictatorship_kernel(pk.pref[layer], pk.plen[layer], perm,
                                      owner, alloc)
    return Assignment(tuple(int(v) for v in alloc))


def iter_pareto_optimal(inst, layer, max_agents=8):
    """Yield each pareto-optimal assignment of the layer exactly once, by
    running serial dictatorship over all permutations in lexicographic
    order and deduplicating."""
    if inst.n > max_agents:
        raise BudgetError(
            f"n={inst.n} exceeds the enumeration cap {max_agents}; "
            "raise max_agents to force it")
    seen = set()
    for pi in itertools.permutations(range(inst.n)):
        p = serial_dictatorship(inst, layer, pi)
        if p.alloc not in seen:
            seen.add(p.alloc)
            yield p


def enumerate_pareto_optimal(inst, layer, max_agents=8):
    """The set of pareto-optimal assignments of one layer (at most n! of
    them, exactly n! when all agents share one complete list)."""
    return set(iter_pareto_optimal(inst, layer, max_agents=max_agents))
