"""Hot numeric kernels over packed layer arrays.

Every instance is packed once into dense integer arrays (positions,
preference lists, per-item acceptor lists) and the inner loops of the
solvers, the acyclicity test, and the brute-force domination scan run as
numba ``@njit`` kernels.  Setting the environment variable
``GOASSIGN_NO_NUMBA=1`` (or running without numba installed) selects a
pure-Python fallback: the same functions, uncompiled.  See
``benchmarks/bench_engine.py`` for a comparison of the two paths.

Conventions used throughout:

* ``pos[l, a, b]`` is the 0-based position of item ``b`` in agent ``a``'s
  layer-``l`` list (0 = most preferred), ``BIG`` if unacceptable.
* the "no item" sentinel compares at position ``plen[l, a]`` (one past the
  end of the list), so smaller position always means strictly preferred.
* ``alloc`` is an int32 vector, item index per agent, -1 for no item.
"""

from __future__ import annotations

import os
import weakref

import numpy as np

_flag = os.environ.get("GOASSIGN_NO_NUMBA", "").strip().lower()
USING_NUMBA = _flag not in ("1", "true", "yes")
if USING_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - mirror environments without numba
        USING_NUMBA = False

if not USING_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco

BIG = 1 << 20


class Packed:
    """Dense per-layer arrays for one instance."""

    __slots__ = ("n", "m", "ell", "alpha", "pos", "pref", "plen", "acc",
                 "alen", "uni", "ulen", "last_taker", "evt", "evt_len",
                 "__weakref__")

    def __init__(self, inst):
        n, m, ell = inst.n, inst.m, inst.ell
        self.n, self.m, self.ell, self.alpha = n, m, ell, inst.alpha
        self.pos = np.full((ell, n, m), BIG, dtype=np.int32)
        self.pref = np.full((ell, n, max(m, 1)), -1, dtype=np.int32)
        self.plen = np.zeros((ell, n), dtype=np.int32)
        self.acc = np.full((ell, max(m, 1), n), -1, dtype=np.int32)
        self.alen = np.zeros((ell, max(m, 1)), dtype=np.int32)
        for l, profile in enumerate(inst.layers):
            for a, lst in enumerate(profile):
                self.plen[l, a] = len(lst)
                for r, b in enumerate(lst):
                    self.pos[l, a, b] = r
                    self.pref[l, a, r] = b
                    self.acc[l, b, self.alen[l, b]] = a
                    self.alen[l, b] += 1
        # per agent: the items it could hold in an assignment that is still
        # legal in at least alpha layers (unacceptable in at most ell - alpha
        # of them), ascending; any other holding can never reach alpha
        budget = ell - inst.alpha
        self.uni = np.full((n, max(m, 1)), -1, dtype=np.int32)
        self.ulen = np.zeros(n, dtype=np.int32)
        for a in range(n):
            viable = [b for b in range(m)
                      if sum(1 for l in range(ell)
                             if self.pos[l, a, b] >= BIG) <= budget]
            self.ulen[a] = len(viable)
            for r, b in enumerate(viable):
                self.uni[a, r] = b
        # last agent index (in table order) that can viably take each item;
        # -1 when nobody can
        self.last_taker = np.full(max(m, 1), -1, dtype=np.int32)
        for a in range(n):
            for r in range(self.ulen[a]):
                b = self.uni[a, r]
                if a > self.last_taker[b]:
                    self.last_taker[b] = a
        # items whose last viable taker is agent a, grouped by a
        self.evt = np.full((n, max(m, 1)), -1, dtype=np.int32)
        self.evt_len = np.zeros(n, dtype=np.int32)
        for b in range(m):
            a = self.last_taker[b]
            if a >= 0:
                self.evt[a, self.evt_len[a]] = b
                self.evt_len[a] += 1


_pack_cache = weakref.WeakKeyDictionary()


def pack(inst):
    packed = _pack_cache.get(inst)
    if packed is None:
        packed = Packed(inst)
        _pack_cache[inst] = packed
    return packed


def as_alloc_array(p):
    return np.asarray(p.alloc, dtype=np.int32)


@njit(cache=True)
def legal_kernel(pos_l, alloc):
    for a in range(alloc.shape[0]):
        v = alloc[a]
        if v >= 0 and pos_l[a, v] >= BIG:
            return False
    return True


@njit(cache=True)
def acyclic_kernel(pos_l, pref_l, plen_l, acc_l, alen_l, alloc):
    """True iff the trading graph of one layer has no directed cycle.

    Vertices 0..n-1 are agents, n..n+m-1 items.  Successors are computed on
    the fly from the packed arrays; iterative DFS with a white/grey/black
    coloring.  The assignment must be legal in the layer.
    """
    n = alloc.shape[0]
    m = pos_l.shape[1]
    owner = np.full(m, -1, dtype=np.int32)
    for a in range(n):
        if alloc[a] >= 0:
            owner[alloc[a]] = a
    total = n + m
    color = np.zeros(total, dtype=np.uint8)
    stack = np.empty(total + 1, dtype=np.int32)
    nbr = np.empty(total + 1, dtype=np.int32)

    for root in range(total):
        if color[root] != 0:
            continue
        top = 0
        stack[0] = root
        nbr[0] = 0
        color[root] = 1
        while top >= 0:
            v = stack[top]
            i = nbr[top]
            # number of successors of v and the i-th successor
            nxt = -2  # -2: exhausted
            if v < n:
                h = alloc[v]
                hp = plen_l[v] if h < 0 else pos_l[v, h]
                if i < hp and i < plen_l[v]:
                    nxt = n + pref_l[v, i]
            else:
                b = v - n
                if owner[b] >= 0:
                    if i == 0:
                        nxt = owner[b]
                else:
                    if i < alen_l[b]:
                        nxt = acc_l[b, i]
            if nxt == -2:
                color[v] = 2
                top -= 1
                continue
            nbr[top] = i + 1
            if color[nxt] == 1:
                return False
            if color[nxt] == 0:
                color[nxt] = 1
                top += 1
                stack[top] = nxt
                nbr[top] = 0
    return True


@njit(cache=True)
def po_layer_mask(pos, pref, plen, acc, alen, alloc, out):
    """Per-layer pareto-optimality bits (legal and acyclic) for one assignment."""
    for l in range(pos.shape[0]):
        if legal_kernel(pos[l], alloc) and acyclic_kernel(
                pos[l], pref[l], plen[l], acc[l], alen[l], alloc):
            out[l] = 1
        else:
            out[l] = 0


@njit(cache=True)
def po_rows(pos_l, pref_l, plen_l, acc_l, alen_l, rows, out):
    """Pareto-optimality of many assignments (rows) in one layer."""
    for r in range(rows.shape[0]):
        alloc = rows[r]
        ok = legal_kernel(pos_l, alloc) and acyclic_kernel(
            pos_l, pref_l, plen_l, acc_l, alen_l, alloc)
        out[r] = 1 if ok else 0


@njit(cache=True)
def serial_dictatorship_kernel(pref_l, plen_l, perm, owner, alloc):
    m = owner.shape[0]
    for b in range(m):
        owner[b] = -1
    for r in range(perm.shape[0]):
        a = perm[r]
        alloc[a] = -1
        for i in range(plen_l[a]):
            b = pref_l[a, i]
            if owner[b] < 0:
                owner[b] = a
                alloc[a] = b
                break


@njit(cache=True)
def next_permutation(perm):
    """Advance to the next lexicographic permutation; False after the last."""
    n = perm.shape[0]
    k = n - 2
    while k >= 0 and perm[k] >= perm[k + 1]:
        k -= 1
    if k < 0:
        return False
    l = n - 1
    while perm[l] <= perm[k]:
        l -= 1
    perm[k], perm[l] = perm[l], perm[k]
    lo, hi = k + 1, n - 1
    while lo < hi:
        perm[lo], perm[hi] = perm[hi], perm[lo]
        lo += 1
        hi -= 1
    return True


@njit(cache=True)
def sweep_kernel(pos, pref, plen, acc, alen, alpha, layer0, perm0, max_steps,
                 out_perm, out_alloc):
    """Serial-dictatorship sweep: for each layer, for each permutation, count
    layers whose trading graph is acyclic; stop at the first assignment
    reaching alpha.

    Starts at (layer0, perm0) and examines at most max_steps permutations
    (max_steps < 0 means no cap), which lets callers split the permutation
    space into contiguous ranges.  Returns (found, layer, examined).
    """
    ell, n, m = pos.shape[0], pos.shape[1], pos.shape[2]
    perm = perm0.copy()
    owner = np.empty(max(m, 1), dtype=np.int32)
    alloc = np.empty(n, dtype=np.int32)
    examined = 0
    for i in range(layer0, ell):
        if i > layer0:
            for r in range(n):
                perm[r] = r
        while True:
            if max_steps >= 0 and examined >= max_steps:
                return 0, -1, examined
            examined += 1
            serial_dictatorship_kernel(pref[i], plen[i], perm, owner, alloc)
            count = 1
            for j in range(ell):
                if j == i:
                    continue
                if count + (ell - j - (1 if i > j else 0)) < alpha:
                    break
                if legal_kernel(pos[j], alloc) and acyclic_kernel(
                        pos[j], pref[j], plen[j], acc[j], alen[j], alloc):
                    count += 1
            if count >= alpha:
                for r in range(n):
                    out_perm[r] = perm[r]
                    out_alloc[r] = alloc[r]
                return 1, i, examined
            if not next_permutation(perm):
                break
    return 0, -1, examined


@njit(cache=True)
def _closes_trading_cycle(pos_l, pref_l, plen_l, alloc, owner, start, target):
    """After tentatively giving item ``target`` to agent ``start``: is there a
    path start -> ... -> target over allocated items, i.e. a trading cycle?

    Only allocated items are followed, so the check is monotone: once a
    partial allocation closes a cycle in a layer, every extension keeps it.
    """
    n = alloc.shape[0]
    visited = np.zeros(n, dtype=np.uint8)
    stack = np.empty(n, dtype=np.int32)
    top = 0
    stack[0] = start
    visited[start] = 1
    while top >= 0:
        x = stack[top]
        top -= 1
        h = alloc[x]
        hp = plen_l[x] if h < 0 else pos_l[x, h]
        if hp > plen_l[x]:
            hp = plen_l[x]
        for i in range(hp):
            y = pref_l[x, i]
            if y == target:
                return True
            o = owner[y]
            if o >= 0 and visited[o] == 0:
                visited[o] = 1
                top += 1
                stack[top] = o
    return False


@njit(cache=True)
def subset_search_kernel(pos, pref, plen, acc, alen, uni, ulen, evt, evt_len,
                         last_taker, alpha, out_alloc, out_live):
    """Backtracking search over all injective partial allocations.

    Agents are decided in table order; per agent the candidates are "no
    item" first, then its viable items in ascending order (anything else
    is illegal in too many layers to ever reach alpha pareto-optimal
    layers).  A layer is marked dead for the whole subtree when the
    partial allocation is illegal in it, closes a trading cycle in it
    (monotone under extension), or dooms a self loop: an item past its
    last viable taker stays unallocated forever, so any decided agent
    preferring it to its lot kills the layer.  Branches with more than
    ell - alpha dead layers are cut.  Returns (found, nodes examined);
    on success out_alloc and out_live hold the first surviving leaf in
    allocation order and its live-layer bits.
    """
    ell, n, m = pos.shape[0], pos.shape[1], pos.shape[2]
    alloc = np.full(n, -1, dtype=np.int32)
    owner = np.full(max(m, 1), -1, dtype=np.int32)
    dead = np.zeros(ell, dtype=np.uint8)
    dead_cnt = 0
    trail = np.empty(ell * (n + 1), dtype=np.int32)
    trail_top = 0
    choice = np.full(n, -2, dtype=np.int32)  # -2 fresh, -1 no item, >=0 viable index
    frame_trail = np.zeros(n, dtype=np.int32)
    nodes = 0
    budget = ell - alpha

    d = 0
    while d >= 0:
        # undo the previous choice at this depth, if any
        if choice[d] > -2:
            if choice[d] >= 0:
                owner[uni[d, choice[d]]] = -1
            alloc[d] = -1
            while trail_top > frame_trail[d]:
                trail_top -= 1
                dead[trail[trail_top]] = 0
                dead_cnt -= 1
        # advance to the next candidate: -1 (no item), then viable items
        c = choice[d] + 1
        while c >= 0 and c < ulen[d] and owner[uni[d, c]] >= 0:
            c += 1
        if c >= 0 and c >= ulen[d]:
            choice[d] = -2
            d -= 1
            continue
        choice[d] = c
        frame_trail[d] = trail_top
        nodes += 1
        v = -1
        if c >= 0:
            v = uni[d, c]
            owner[v] = d
            alloc[d] = v
            for l in range(ell):
                if dead[l] == 1:
                    continue
                bad = pos[l, d, v] >= BIG or _closes_trading_cycle(
                    pos[l], pref[l], plen[l], alloc, owner, d, v)
                if bad:
                    dead[l] = 1
                    dead_cnt += 1
                    trail[trail_top] = l
                    trail_top += 1
        else:
            alloc[d] = -1
        # the decided agent must not prefer an already-doomed item (one past
        # its last viable taker and still unallocated) to its new lot
        for l in range(ell):
            if dead[l] == 1:
                continue
            hp = plen[l, d] if v < 0 else pos[l, d, v]
            for idx in range(hp):
                w = pref[l, d, idx]
                if owner[w] < 0 and last_taker[w] < d:
                    dead[l] = 1
                    dead_cnt += 1
                    trail[trail_top] = l
                    trail_top += 1
                    break
        # items whose last viable taker has now been decided: if left
        # unallocated, check for self loops against every decided agent
        if dead_cnt <= budget:
            for e in range(evt_len[d]):
                b = evt[d, e]
                if owner[b] >= 0:
                    continue
                for l in range(ell):
                    if dead[l] == 1:
                        continue
                    loop = False
                    for t in range(alen[l, b]):
                        x = acc[l, b, t]
                        if x > d:
                            break
                        h = alloc[x]
                        hp = plen[l, x] if h < 0 else pos[l, x, h]
                        if pos[l, x, b] < hp:
                            loop = True
                            break
                    if loop:
                        dead[l] = 1
                        dead_cnt += 1
                        trail[trail_top] = l
                        trail_top += 1
        if dead_cnt > budget:
            continue
        if d == n - 1:
            for a in range(n):
                out_alloc[a] = alloc[a]
            for l in range(ell):
                out_live[l] = 1 - dead[l]
            return 1, nodes
        d += 1
        choice[d] = -2
    return 0, nodes


@njit(cache=True)
def exists_dominator(pos_l, plen_l, rows, p):
    """Brute-force domination scan: is any row a legal assignment that every
    agent weakly prefers to p, strictly for at least one?"""
    n = p.shape[0]
    for r in range(rows.shape[0]):
        strict = False
        ok = True
        for a in range(n):
            qa = rows[r, a]
            qpos = plen_l[a] if qa < 0 else pos_l[a, qa]
            if qpos >= BIG:
                ok = False
                break
            pa = p[a]
            ppos = plen_l[a] if pa < 0 else pos_l[a, pa]
            if qpos > ppos:
                ok = False
                break
            if qpos < ppos:
                strict = True
        if ok and strict:
            return True
    return False


@njit(cache=True)
def first_global_row(pos, pref, plen, acc, alen, rows, alpha):
    """Index of the first row that is pareto optimal in at least alpha
    layers, or -1; second result is the number of rows examined."""
    ell = pos.shape[0]
    for r in range(rows.shape[0]):
        count = 0
        for l in range(ell):
            if count + (ell - l) < alpha:
                break
            if legal_kernel(pos[l], rows[r]) and acyclic_kernel(
                    pos[l], pref[l], plen[l], acc[l], alen[l], rows[r]):
                count += 1
        if count >= alpha:
            return r, r + 1
    return -1, rows.shape[0]


def count_assignments(n, m):
    total = 0
    f = 1
    for t in range(0, min(n, m) + 1):
        if t > 0:
            f *= t
        total += _comb(m, t) * _comb(n, t) * f
    return total


def _comb(n, k):
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def all_assignments(n, m):
    """Every injective partial allocation as an (N, n) int32 array, in
    lexicographic order of the allocation vector with "no item" first."""
    rows = []
    alloc = [-1] * n
    used = [False] * (m + 1)

    def rec(a):
        if a == n:
            rows.append(tuple(alloc))
            return
        rec(a + 1)
        for b in range(m):
            if not used[b]:
                used[b] = True
                alloc[a] = b
                rec(a + 1)
                alloc[a] = -1
                used[b] = False

    rec(0)
    return np.array(rows, dtype=np.int32).reshape(len(rows), n)


_assign_cache = {}


def assignment_rows(n, m, cap=2_000_000):
    """Cached all_assignments with a sanity cap on the row count."""
    key = (n, m)
    if key not in _assign_cache:
        if count_assignments(n, m) > cap:
            raise ValueError(f"assignment space for n={n}, m={m} exceeds cap {cap}")
        _assign_cache[key] = all_assignments(n, m)
    return _assign_cache[key]


def perm_unrank(rank, n):
    """Permutation of range(n) at the given lexicographic rank."""
    digits = []
    for radix in range(1, n + 1):
        digits.append(rank % radix)
        rank //= radix
    digits.reverse()
    pool = list(range(n))
    return np.array([pool.pop(d) for d in digits], dtype=np.int32)


def warmup():
    """Force-compile the kernels on a toy instance (no-op without numba)."""
    from . import model

    inst = model.parse_instance(
        "goa 1\nalpha 1\nagents a1 a2\nitems b1 b2\nlayer\na1: b1 > b2\na2: b1\n")
    pk = pack(inst)
    alloc = np.array([0, -1], dtype=np.int32)
    out = np.empty(pk.ell, dtype=np.uint8)
    po_layer_mask(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, alloc, out)
    rows = assignment_rows(2, 2)
    outr = np.empty(rows.shape[0], dtype=np.uint8)
    po_rows(pk.pos[0], pk.pref[0], pk.plen[0], pk.acc[0], pk.alen[0], rows, outr)
    exists_dominator(pk.pos[0], pk.plen[0], rows, alloc)
    first_global_row(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, rows, 1)
    perm = np.arange(2, dtype=np.int32)
    op = np.empty(2, dtype=np.int32)
    oa = np.empty(2, dtype=np.int32)
    sweep_kernel(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, 1, 0, perm, -1, op, oa)
    ol = np.empty(pk.ell, dtype=np.uint8)
    subset_search_kernel(pk.pos, pk.pref, pk.plen, pk.acc, pk.alen, pk.uni,
                         pk.ulen, pk.evt, pk.evt_len, pk.last_taker, 1, oa, ol)
