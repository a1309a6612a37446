"""Decision procedures: does an assignment exist that is pareto optimal in
at least alpha layers?

Three complete strategies plus a dispatcher:

* ``solve_permutation_sweep`` - serial dictatorship over every (layer,
  permutation) pair; complete because the outcomes of serial dictatorship
  in a layer are exactly its pareto-optimal assignments.
* ``solve_item_subsets`` - searches every injective partial allocation
  (equivalently: every item subset, agent subset of equal size, and
  bijection between them) with sound pruning; suited to few items.
* ``solve_exhaustive`` - materializes the whole assignment space and
  checks each row; the dumb ground truth for the other two.

Every yes answer carries a certificate that is re-verified through the
optimality module before being returned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import engine, optimality
from .mechanisms import BudgetError, serial_dictatorship
from .model import Assignment

SWEEP_MAX_AGENTS = 10
SUBSETS_MAX_ITEMS = 7
EXHAUSTIVE_MAX = 7


@dataclass(frozen=True)
class SolveResult:
    answer: bool
    assignment: Assignment | None
    layers: frozenset | None
    examined: int
    elapsed: float
    strategy: str

    def __post_init__(self):
        if self.answer:
            assert self.assignment is not None and self.layers is not None
        else:
            assert self.assignment is None and self.layers is None


def _certified_yes(inst, p, examined, t0, strategy):
    layers = optimality.optimal_layers(inst, p)
    if len(layers) < inst.alpha:
        raise AssertionError(
            f"{strategy} produced a certificate with only {len(layers)} "
            f"optimal layers for alpha={inst.alpha}")
    return SolveResult(True, p, layers, examined, time.perf_counter() - t0,
                       strategy)


def _no(examined, t0, strategy):
    return SolveResult(False, None, None, examined, time.perf_counter() - t0,
                       strategy)


def solve_permutation_sweep(inst, max_agents=SWEEP_MAX_AGENTS, jobs=1):
    """For each layer and each permutation, apply serial dictatorship and
    count the layers whose trading graph is acyclic; yes on the first
    assignment reaching alpha, no after all ell * n! candidates."""
    t0 = time.perf_counter()
    if inst.n > max_agents:
        raise BudgetError(
            f"n={inst.n} exceeds the sweep cap {max_agents} "
            "(factorial search; raise the budget to force it)")
    if jobs > 1:
        return _sweep_parallel(inst, jobs, t0)
    pk = engine.pack(inst)
    perm0 = np.arange(inst.n, dtype=np.int32)
    out_perm = np.empty(inst.n, dtype=np.int32)
    out_alloc = np.empty(inst.n, dtype=np.int32)
    found, layer, examined = engine.sweep_kernel(
        pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, inst.alpha, 0, perm0, -1,
        out_perm, out_alloc)
    if not found:
        return _no(int(examined), t0, "sweep")
    p = serial_dictatorship(inst, int(layer), tuple(int(x) for x in out_perm))
    return _certified_yes(inst, p, int(examined), t0, "sweep")


def _sweep_chunks(inst, jobs):
    total = math.factorial(inst.n)
    per = max(1, total // (jobs * 4))
    for layer in range(inst.ell):
        lo = 0
        while lo < total:
            yield layer, lo, min(per, total - lo)
            lo += per


def _sweep_chunk_worker(args):
    inst, layer, rank, steps = args
    pk = engine.pack(inst)
    perm0 = engine.perm_unrank(rank, inst.n)
    out_perm = np.empty(inst.n, dtype=np.int32)
    out_alloc = np.empty(inst.n, dtype=np.int32)
    found, fl, examined = engine.sweep_kernel(
        pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, inst.alpha, layer, perm0,
        steps, out_perm, out_alloc)
    # a chunk covers a single layer's permutation range only
    if found and fl == layer:
        return layer, rank, int(examined), tuple(int(x) for x in out_perm)
    return None, None, int(examined), None


def _sweep_parallel(inst, jobs, t0):
    import multiprocessing

    chunks = [(inst, layer, lo, steps)
              for layer, lo, steps in _sweep_chunks(inst, jobs)]
    with multiprocessing.Pool(jobs) as pool:
        results = pool.map(_sweep_chunk_worker, chunks)
    examined = sum(r[2] for r in results)
    hits = [(layer, rank, perm) for layer, rank, _, perm in results
            if layer is not None]
    if not hits:
        return _no(examined, t0, "sweep")
    # deterministic: minimal (layer, permutation rank) among chunk-local hits
    layer, _, perm = min(hits, key=lambda h: (h[0], h[1]))
    p = serial_dictatorship(inst, layer, perm)
    return _certified_yes(inst, p, examined, t0, "sweep")


def solve_item_subsets(inst, max_items=SUBSETS_MAX_ITEMS):
    """Search all injective partial allocations in lexicographic order of
    the allocation vector (no item first, then items ascending), pruning
    branches that are already illegal, trading-cycle bound, or self-loop
    bound in more than ell - alpha layers."""
    t0 = time.perf_counter()
    if inst.m > max_items:
        raise BudgetError(
            f"m={inst.m} exceeds the item-subset cap {max_items} "
            "(raise the budget to force it)")
    pk = engine.pack(inst)
    out_alloc = np.empty(inst.n, dtype=np.int32)
    out_live = np.empty(inst.ell, dtype=np.uint8)
    found, nodes = engine.subset_search_kernel(
        pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, pk.uni, pk.ulen, pk.evt,
        pk.evt_len, pk.last_taker, inst.alpha, out_alloc, out_live)
    if not found:
        return _no(int(nodes), t0, "subsets")
    p = Assignment(tuple(int(v) for v in out_alloc))
    return _certified_yes(inst, p, int(nodes), t0, "subsets")


def solve_exhaustive(inst, max_size=EXHAUSTIVE_MAX):
    """Enumerate every assignment and test it; exact but tiny-scale only."""
    t0 = time.perf_counter()
    if inst.n > max_size or inst.m > max_size:
        raise BudgetError(
            f"n={inst.n}, m={inst.m} exceed the exhaustive cap {max_size}")
    pk = engine.pack(inst)
    rows = engine.assignment_rows(inst.n, inst.m)
    idx, examined = engine.first_global_row(pk.pos, pk.pref, pk.plen, pk.acc,
                                            pk.alen, rows, inst.alpha)
    if idx < 0:
        return _no(int(examined), t0, "exhaustive")
    p = Assignment(tuple(int(v) for v in rows[idx]))
    return _certified_yes(inst, p, int(examined), t0, "exhaustive")


def _solve_alpha_one(inst, t0):
    # a pareto-optimal assignment for the first layer always exists: take
    # the serial dictatorship outcome for the identity permutation
    p = serial_dictatorship(inst, 0, tuple(range(inst.n)))
    return _certified_yes(inst, p, 1, t0, "alpha1")


def solve(inst, strategy="auto", budget=None, jobs=1):
    """Dispatch: alpha=1 needs no search; otherwise prefer the item-subset
    search when the item count is small (m within the subset cap and not
    above n), else the permutation sweep."""
    t0 = time.perf_counter()
    if strategy not in ("auto", "sweep", "subsets", "exhaustive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "auto":
        if inst.alpha == 1:
            return _solve_alpha_one(inst, t0)
        threshold = budget if budget is not None else SUBSETS_MAX_ITEMS
        if inst.m <= threshold <= inst.n:
            strategy = "subsets"
        else:
            strategy = "sweep"
    if strategy == "sweep":
        return solve_permutation_sweep(
            inst, max_agents=budget if budget is not None else SWEEP_MAX_AGENTS,
            jobs=jobs)
    if strategy == "subsets":
        return solve_item_subsets(
            inst, max_items=budget if budget is not None else SUBSETS_MAX_ITEMS)
    return solve_exhaustive(
        inst, max_size=budget if budget is not None else EXHAUSTIVE_MAX)
