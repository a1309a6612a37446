"""Timing comparison of the hot kernels with and without numba.

Run ``python benchmarks/bench_engine.py``: it re-executes itself twice in
subprocesses, once normally and once with GOASSIGN_NO_NUMBA=1, and prints
a side-by-side table.  Compilation happens during warmup and is not
measured.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    import itertools

    import numpy as np

    import goassign
    from goassign import engine
    from goassign.gadgets import CnfFormula, random_instance, reduce_3sat

    engine.warmup()

    def sweep():
        inst = random_instance(7, 7, 7, 3, 3, list_len=(0, 5))
        pk = engine.pack(inst)
        out_perm = np.empty(inst.n, dtype=np.int32)
        out_alloc = np.empty(inst.n, dtype=np.int32)
        perm0 = np.arange(inst.n, dtype=np.int32)
        return engine.sweep_kernel(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen,
                                   inst.alpha, 0, perm0, -1, out_perm,
                                   out_alloc)[2]

    def subsets():
        clauses = tuple(tuple(v if s else -v for v, s in zip((1, 2, 3), bits))
                        for bits in itertools.product((False, True), repeat=3))
        inst = reduce_3sat(CnfFormula(3, clauses))  # unsatisfiable, 128 agents
        res = goassign.solve_item_subsets(inst, max_items=inst.m)
        return res.examined

    def domination():
        inst = random_instance(11, 5, 5, 1, 1)
        pk = engine.pack(inst)
        rows = engine.assignment_rows(5, 5)
        hits = 0
        for r in range(rows.shape[0]):
            if engine.exists_dominator(pk.pos[0], pk.plen[0], rows, rows[r]):
                hits += 1
        return hits

    def po_scan():
        inst = random_instance(13, 6, 6, 3, 1, list_len=(0, 6))
        pk = engine.pack(inst)
        rows = engine.assignment_rows(6, 6)
        out = np.empty(rows.shape[0], dtype=np.uint8)
        total = 0
        for l in range(inst.ell):
            engine.po_rows(pk.pos[l], pk.pref[l], pk.plen[l], pk.acc[l],
                           pk.alen[l], rows, out)
            total += int(out.sum())
        return total

    return [("permutation sweep (n=7, 3 layers)", sweep),
            ("subset search (unsat 3-SAT, 128 agents)", subsets),
            ("domination scan (all pairs, n=m=5)", domination),
            ("acyclicity scan (13327 rows, 3 layers)", po_scan)]


def run_inner():
    from goassign import engine

    results = {}
    for name, fn in workloads():
        fn()  # warm path-specific caches
        t0 = time.perf_counter()
        value = fn()
        results[name] = (time.perf_counter() - t0, value)
    print(json.dumps({"numba": engine.USING_NUMBA, "results": results}))


def run_comparison():
    rows = {}
    for label, env_val in (("numba", ""), ("python", "1")):
        env = dict(os.environ, GOASSIGN_NO_NUMBA=env_val)
        proc = subprocess.run([sys.executable, __file__, "--inner"],
                              capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            raise SystemExit(1)
        payload = json.loads(proc.stdout.splitlines()[-1])
        assert payload["numba"] == (label == "numba")
        rows[label] = payload["results"]
    width = max(len(name) for name in rows["numba"])
    print(f"{'workload':<{width}}  {'numba':>10}  {'python':>10}  speedup")
    for name in rows["numba"]:
        tn, vn = rows["numba"][name]
        tp, vp = rows["python"][name]
        assert vn == vp, f"paths disagree on {name}: {vn} vs {vp}"
        print(f"{name:<{width}}  {tn:>9.3f}s  {tp:>9.3f}s  {tp / tn:>6.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--inner", action="store_true")
    args = parser.parse_args()
    if args.inner:
        run_inner()
    else:
        run_comparison()
