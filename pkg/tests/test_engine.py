import itertools
import math
import random
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from goassign import Assignment, NO_ITEM, find_layer_violation, parse_instance
from goassign import engine
from goassign.gadgets import random_instance

from test_optimality import all_assignments_py, dominated_py, random_legal_assignment


def test_packing_matches_lists():
    for seed in range(30):
        inst = random_instance(seed, 1 + seed % 5, 1 + seed % 6, 1 + seed % 3, 1)
        pk = engine.pack(inst)
        for l, profile in enumerate(inst.layers):
            for a, lst in enumerate(profile):
                assert pk.plen[l, a] == len(lst)
                assert tuple(pk.pref[l, a, :len(lst)]) == lst
                for b in range(inst.m):
                    if b in lst:
                        assert pk.pos[l, a, b] == lst.index(b)
                        assert a in pk.acc[l, b, :pk.alen[l, b]]
                    else:
                        assert pk.pos[l, a, b] >= engine.BIG


def test_pack_is_cached():
    inst = random_instance(1, 3, 3, 2, 1)
    assert engine.pack(inst) is engine.pack(inst)


def test_acyclic_kernel_matches_witness_search():
    rng = random.Random(3)
    for seed in range(60):
        inst = random_instance(seed, 1 + seed % 5, 1 + seed % 5, 1 + seed % 3, 1)
        pk = engine.pack(inst)
        for layer in range(inst.ell):
            p = random_legal_assignment(rng, inst, layer)
            got = engine.acyclic_kernel(pk.pos[layer], pk.pref[layer],
                                        pk.plen[layer], pk.acc[layer],
                                        pk.alen[layer],
                                        engine.as_alloc_array(p))
            assert bool(got) == (find_layer_violation(inst, layer, p) is None)


def test_exists_dominator_matches_python_scan():
    for seed in range(25):
        inst = random_instance(seed, 1 + seed % 4, 1 + seed % 4, 1, 1)
        pk = engine.pack(inst)
        rows = engine.assignment_rows(inst.n, inst.m)
        for p in all_assignments_py(inst.n, inst.m):
            got = engine.exists_dominator(pk.pos[0], pk.plen[0], rows,
                                          engine.as_alloc_array(p))
            assert bool(got) == dominated_py(inst, 0, p)


def test_assignment_rows_shape_and_order():
    for n, m in ((1, 1), (2, 3), (3, 2), (4, 4)):
        rows = engine.assignment_rows(n, m)
        assert rows.shape == (engine.count_assignments(n, m), n)
        as_tuples = [tuple(r) for r in rows.tolist()]
        assert as_tuples[0] == (NO_ITEM,) * n
        assert as_tuples == sorted(as_tuples)  # allocation-lex, no item first
        assert len(set(as_tuples)) == len(as_tuples)
        for r in as_tuples:
            held = [v for v in r if v != NO_ITEM]
            assert len(set(held)) == len(held)


def test_assignment_rows_cap():
    with pytest.raises(ValueError):
        engine.assignment_rows(30, 30)


def test_next_permutation_walks_lex_order():
    perm = np.arange(4, dtype=np.int32)
    seen = [tuple(perm)]
    while engine.next_permutation(perm):
        seen.append(tuple(int(v) for v in perm))
    assert seen == sorted(itertools.permutations(range(4)))


@pytest.mark.parametrize("n", [1, 3, 5])
def test_perm_unrank(n):
    perms = list(itertools.permutations(range(n)))
    for rank in range(math.factorial(n)):
        assert tuple(engine.perm_unrank(rank, n)) == perms[rank]


def test_sweep_kernel_range_split(example4):
    # scanning [0, n!) in two chunks finds the same first hit as one pass
    pk = engine.pack(example4)
    out_perm = np.empty(4, dtype=np.int32)
    out_alloc = np.empty(4, dtype=np.int32)
    full = engine.sweep_kernel(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen,
                               example4.alpha, 0, engine.perm_unrank(0, 4),
                               -1, out_perm, out_alloc)
    assert full[0] == 1
    hit_perm = tuple(int(v) for v in out_perm)
    found_at = None
    for lo, steps in ((0, 12), (12, 12)):
        got = engine.sweep_kernel(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen,
                                  example4.alpha, 0, engine.perm_unrank(lo, 4),
                                  steps, out_perm, out_alloc)
        if got[0] and got[1] == 0 and found_at is None:
            found_at = tuple(int(v) for v in out_perm)
    assert found_at == hit_perm


FALLBACK_SCRIPT = textwrap.dedent("""\
    import dataclasses, json, sys
    from goassign import engine, solve
    from goassign.gadgets import random_instance
    assert engine.USING_NUMBA == (sys.argv[1] == "numba"), engine.USING_NUMBA
    out = []
    for seed in range(25):
        inst = random_instance(seed, 1 + seed % 5, 1 + seed % 4,
                               1 + seed % 3, 1)
        for alpha in range(1, inst.ell + 1):
            trial = dataclasses.replace(inst, alpha=alpha)
            for strategy in ("sweep", "subsets", "exhaustive"):
                res = solve(trial, strategy=strategy)
                cert = None if res.assignment is None else res.assignment.alloc
                out.append((seed, alpha, strategy, res.answer, cert,
                            sorted(res.layers) if res.layers else None))
    print(json.dumps(out))
""")


def test_pure_python_fallback_matches_numba(tmp_path):
    script = tmp_path / "probe.py"
    script.write_text(FALLBACK_SCRIPT)
    results = {}
    for mode, env_val in (("numba", ""), ("python", "1")):
        import os
        env = dict(os.environ, GOASSIGN_NO_NUMBA=env_val)
        proc = subprocess.run([sys.executable, str(script), mode],
                              capture_output=True, text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        results[mode] = proc.stdout
    assert results["numba"] == results["python"]
