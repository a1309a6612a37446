"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Kernels are compiled
once by the session fixture before any timing starts.
"""

import dataclasses
import itertools
import random
import time

import numpy as np
import pytest

from goassign import (Assignment, NO_ITEM, enumerate_pareto_optimal,
                      is_legal_in_layer, optimal_layers, solve,
                      solve_exhaustive, solve_item_subsets,
                      solve_permutation_sweep)
from goassign import engine
from goassign.cli import main
from goassign.gadgets import (colored_graph, grid_graph, mis_oracle,
                              permutation_clique_oracle, random_formula,
                              random_instance, reduce_3sat, reduce_mis_alpha,
                              reduce_mis_ell_alpha,
                              reduce_permutation_clique_alpha,
                              reduce_permutation_clique_ell_alpha, sat_oracle)
from goassign.model import Instance

from conftest import EXAMPLE4_TEXT

ASSIGN4_TEXT = "a1 b1\na2 b2\na3 b3\na4 -\n"


def report(criterion, detail, elapsed):
    print(f"CRITERION {criterion}: PASS ({detail}, {elapsed:.1f}s)")


def test_criterion_1_worked_example(tmp_path, capsys):
    inst_file = tmp_path / "example4.goa"
    inst_file.write_text(EXAMPLE4_TEXT)
    assign_file = tmp_path / "p.assign"
    assign_file.write_text(ASSIGN4_TEXT)

    t0 = time.perf_counter()
    code = main(["solve", str(inst_file)])
    solve_out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert solve_out[0] == "yes"
    assert "layers: 1 2" in solve_out

    code = main(["verify", str(inst_file), str(assign_file)])
    verify_out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert verify_out == ["layers: 1 2", "2-globally-optimal: yes"]

    code = main(["explain", str(inst_file), str(assign_file)])
    explain_out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert explain_out[2] == "layer 3: selfloop: a2 b4"
    assert explain_out[3] == "layer 4: cycle: a1 b1 a3 b3 a2 b2"
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    with capsys.disabled():
        report(1, "solve/verify/explain reproduce the worked example", elapsed)


def _corpus_c2(count=1000):
    for seed in range(count):
        rng = random.Random(seed)
        yield seed, random_instance(seed, rng.randint(1, 5), rng.randint(1, 5),
                                    rng.randint(1, 3), 1)


def test_criterion_2_characterization_equivalence(capsys):
    t0 = time.perf_counter()
    instances = 0
    checked = 0
    for seed, inst in _corpus_c2():
        instances += 1
        pk = engine.pack(inst)
        rows = engine.assignment_rows(inst.n, inst.m)
        if inst.n <= 4 and inst.m <= 4:
            sample = range(rows.shape[0])
        else:
            rng = random.Random(seed)
            sample = [rng.randrange(rows.shape[0]) for _ in range(60)]
        for layer in range(inst.ell):
            po = np.empty(rows.shape[0], dtype=np.uint8)
            engine.po_rows(pk.pos[layer], pk.pref[layer], pk.plen[layer],
                           pk.acc[layer], pk.alen[layer], rows, po)
            for r in sample:
                dominated = engine.exists_dominator(
                    pk.pos[layer], pk.plen[layer], rows, rows[r])
                assert bool(po[r]) == (not dominated), (seed, layer, r)
                checked += 1
    elapsed = time.perf_counter() - t0
    assert instances >= 1000
    assert elapsed < 60.0
    with capsys.disabled():
        report(2, f"{checked} assignment-layer pairs on {instances} instances,"
                  " zero discrepancies", elapsed)


def test_criterion_3_serial_dictatorship_characterization(capsys):
    t0 = time.perf_counter()
    instances = 0
    for seed, inst in _corpus_c2():
        instances += 1
        pk = engine.pack(inst)
        rows = engine.assignment_rows(inst.n, inst.m)
        for layer in range(inst.ell):
            enumerated = {p.alloc for p in enumerate_pareto_optimal(inst, layer)}
            po = np.empty(rows.shape[0], dtype=np.uint8)
            engine.po_rows(pk.pos[layer], pk.pref[layer], pk.plen[layer],
                           pk.acc[layer], pk.alen[layer], rows, po)
            exhaustive = {tuple(int(v) for v in rows[r])
                          for r in np.nonzero(po)[0]}
            assert enumerated == exhaustive, (seed, layer)
    # tightness: equal agents and items sharing one complete list
    lst = (0, 1, 2, 3)
    tight = Instance(("a1", "a2", "a3", "a4"), ("b1", "b2", "b3", "b4"),
                     ((lst, lst, lst, lst),), 1)
    assert len(enumerate_pareto_optimal(tight, 0)) == 24
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        report(3, f"PO sets match on {instances} instances; "
                  "4-agent family yields exactly 24", elapsed)


def test_criterion_4_solver_cross_equivalence(capsys):
    t0 = time.perf_counter()
    instances = 0
    runs = 0
    for seed in range(500):
        rng = random.Random(10_000 + seed)
        inst = random_instance(10_000 + seed, rng.randint(1, 6),
                               rng.randint(1, 4), rng.randint(1, 4), 1)
        instances += 1
        for alpha in range(1, inst.ell + 1):
            trial = dataclasses.replace(inst, alpha=alpha)
            results = [solve_permutation_sweep(trial),
                       solve_item_subsets(trial),
                       solve_exhaustive(trial)]
            assert len({r.answer for r in results}) == 1, (seed, alpha)
            for r in results:
                if r.answer:
                    assert len(optimal_layers(trial, r.assignment)) >= alpha
            runs += 1
    elapsed = time.perf_counter() - t0
    assert instances >= 500
    assert elapsed < 300.0
    with capsys.disabled():
        report(4, f"{runs} solver triples agree, certificates re-verified",
               elapsed)


def test_criterion_5_kernel_answer_preservation(capsys):
    t0 = time.perf_counter()
    from goassign.kernels import (agent_class_partition, kernel_agent_classes,
                                  kernel_truncate_lists)
    from test_kernels import duplicate_heavy_instance

    for seed in range(500):
        rng = random.Random(20_000 + seed)
        inst = random_instance(20_000 + seed, rng.randint(1, 4),
                               rng.randint(1, 8), rng.randint(1, 3),
                               rng.randint(1, 1))
        alpha = rng.randint(1, inst.ell)
        trial = dataclasses.replace(inst, alpha=alpha)
        out = kernel_truncate_lists(trial)
        n, ell = out.n, out.ell
        assert sum(len(l) for prof in out.layers for l in prof) <= ell * n * n
        assert out.m <= ell * n * n
        assert solve_exhaustive(out, max_size=8).answer == \
            solve_exhaustive(trial, max_size=8).answer, seed

    for seed in range(500):
        rng = random.Random(30_000 + seed)
        inst = duplicate_heavy_instance(30_000 + seed, rng.randint(4, 8),
                                        rng.randint(1, 3), rng.randint(1, 3))
        alpha = rng.randint(1, inst.ell)
        trial = dataclasses.replace(inst, alpha=alpha)
        out = kernel_agent_classes(trial)
        assert all(len(g) <= out.m + 1
                   for g in agent_class_partition(out).values())
        assert solve_exhaustive(out, max_size=9).answer == \
            solve_exhaustive(trial, max_size=9).answer, seed
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        report(5, "500 + 500 instances preserved, size bounds hold", elapsed)


def test_criterion_6_reduction_correctness_3sat(capsys):
    t0 = time.perf_counter()
    agree = 0
    for seed in range(200):
        f = random_formula(seed, n_vars=3, max_clauses=3)
        expected = sat_oracle(f)
        for variant in ("three-layer", "four-layer"):
            inst = reduce_3sat(f, variant=variant)
            assert inst.n <= 18
            got = solve(inst, strategy="subsets", budget=inst.m)
            assert got.answer == expected, (seed, variant)
            agree += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    with capsys.disabled():
        report(6, f"{agree} reduced instances match the SAT oracle", elapsed)


def test_criterion_7_reduction_correctness_graphs(capsys):
    t0 = time.perf_counter()
    checks = 0
    # every grid graph on the 2x2 cells
    cells = [(i, j) for i in (1, 2) for j in (1, 2)]
    pairs = list(itertools.combinations(cells, 2))
    for bits in range(64):
        g = grid_graph(2, [e for k, e in enumerate(pairs) if bits >> k & 1])
        expected = permutation_clique_oracle(g)
        assert solve(reduce_permutation_clique_alpha(g),
                     strategy="subsets").answer == expected, bits
        assert solve(reduce_permutation_clique_ell_alpha(g),
                     strategy="subsets").answer == expected, bits
        checks += 2
    # every colored graph on <= 4 vertices with <= 3 colors (k <= n)
    for nv in range(1, 5):
        vpairs = list(itertools.combinations(range(1, nv + 1), 2))
        for k in range(1, min(3, nv) + 1):
            for coloring in itertools.product(range(1, k + 1), repeat=nv):
                for bits in range(1 << len(vpairs)):
                    g = colored_graph(coloring,
                                      [e for t, e in enumerate(vpairs)
                                       if bits >> t & 1])
                    expected = mis_oracle(g, k)
                    assert solve(reduce_mis_alpha(g, k),
                                 strategy="subsets").answer == expected
                    assert solve(reduce_mis_ell_alpha(g, k),
                                 strategy="subsets").answer == expected
                    checks += 2
    # figure reproduction: triangle permutation clique
    tri = grid_graph(3, [((1, 1), (2, 3)), ((1, 1), (3, 2)),
                         ((2, 3), (3, 2))])
    inst = reduce_permutation_clique_alpha(tri)
    p = Assignment((0, 2, 1))
    assert optimal_layers(inst, p) == frozenset({0, 5, 7})
    assert len(optimal_layers(inst, p)) >= inst.alpha
    # figure reproduction: five-color graph with independent set {1,3,4,5,6}
    g5 = colored_graph([1, 1, 2, 3, 4, 5, 2, 3],
                       [(2, 7), (2, 8), (7, 8), (1, 7), (4, 2)])
    inst5 = reduce_mis_alpha(g5, 5)
    assert (inst5.n, inst5.ell, inst5.alpha) == (8, 8, 5)
    p5 = Assignment((0, NO_ITEM, 1, 2, 3, 4, NO_ITEM, NO_ITEM))
    assert optimal_layers(inst5, p5) == frozenset({0, 2, 3, 4, 5})
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        report(7, f"{checks} reduced instances match their oracles; "
                  "figure instances reproduced", elapsed)


def test_criterion_8_alpha_one_fast_path(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        rng = random.Random(40_000 + seed)
        inst = random_instance(40_000 + seed, rng.randint(1, 20),
                               rng.randint(0, 20), rng.randint(1, 4), 1)
        t1 = time.perf_counter()
        res = solve(inst)
        dt = time.perf_counter() - t1
        worst = max(worst, dt)
        assert res.answer
        assert res.strategy == "alpha1"
        assert res.examined == 1  # no search performed
        assert dt < 0.010, (seed, dt)
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        report(8, f"100 instances solved without search, worst "
                  f"{worst * 1000:.2f}ms", elapsed)


def _master_order_profile(rng, n, m):
    master = list(range(m))
    rng.shuffle(master)
    profile = []
    for _ in range(n):
        keep = sorted(rng.sample(range(m), rng.randint(0, m)))
        profile.append(tuple(master[i] for i in keep))
    return tuple(profile)


def test_criterion_9_respect_lemma(capsys):
    t0 = time.perf_counter()
    witnesses = 0
    assignments = 0
    for seed in range(200):
        rng = random.Random(50_000 + seed)
        n = rng.randint(2, 6)
        m = rng.randint(n, 7)
        inst = Instance(tuple(f"a{i}" for i in range(n)),
                        tuple(f"b{j}" for j in range(m)),
                        (_master_order_profile(rng, n, m),), 1)
        for _ in range(40):
            alloc = rng.sample(range(m), n)  # fully allocating
            p = Assignment(tuple(alloc))
            assignments += 1
            if trading_cycle_exists(inst, 0, p):
                witnesses += 1
    elapsed = time.perf_counter() - t0
    assert witnesses == 0
    with capsys.disabled():
        report(9, f"{assignments} fully-allocating assignments, "
                  "zero trading-cycle witnesses", elapsed)


def trading_cycle_exists(inst, layer, p):
    """Definitional trading-cycle search: agents holding acceptable items,
    edge to the owner of any strictly preferred item."""
    profile = inst.layers[layer]
    owner = p.owner_map(inst.m)
    adj = {}
    for a in range(inst.n):
        held = p.alloc[a]
        lst = profile[a]
        if held == NO_ITEM or held not in lst:
            continue
        for b in lst[:lst.index(held)]:
            if owner[b] != NO_ITEM:
                adj.setdefault(a, []).append(owner[b])
    color = {}

    def dfs(u):
        color[u] = 1
        for v in adj.get(u, ()):
            c = color.get(v, 0)
            if c == 1 or (c == 0 and dfs(v)):
                return True
        color[u] = 2
        return False

    return any(dfs(u) for u in list(adj) if color.get(u, 0) == 0)
