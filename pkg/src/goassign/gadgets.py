"""Hard-instance generators: reductions from 3-SAT, grid permutation
cliques, and multicolored independent sets, plus brute-force oracles on
the source problems and a seeded random-instance generator.

The 3-SAT machinery builds, for a formula with m clauses and n variables,
an agent/item universe with one plain and one complementary agent and item
per clause-variable pair, and three preference profiles over it:

* the pairing profile locks each agent pair to its item pair,
* the chain profile forces all clause rows of one variable to pick the
  same side (encoding a truth value),
* the clause profile admits a trading cycle exactly when a clause has no
  satisfied literal.

Complementary agents and items are spelled with a capital letter
(``a2_1`` and ``A2_1``, ``b2_1`` and ``B2_1``), index order is
``<clause>_<variable>``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .model import Instance, ParseError


@dataclass(frozen=True)
class CnfFormula:
    """3-CNF with DIMACS-style literals: clause = 3 nonzero ints, negative
    for negated variables."""

    n_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("formula needs at least one variable")
        for cl in self.clauses:
            if len(cl) != 3:
                raise ValueError(f"clause {cl!r} does not have exactly 3 literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range in {cl!r}")

    @property
    def n_clauses(self):
        return len(self.clauses)


def parse_cnf(text):
    n_vars = n_clauses = None
    nums = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[:2] != ["p", "cnf"]:
                raise ParseError(f"bad problem line {line!r}", no)
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        try:
            nums.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"expected integers, got {line!r}", no) from None
    if n_vars is None:
        raise ParseError("missing 'p cnf <vars> <clauses>' line")
    clauses = []
    cur = []
    for v in nums:
        if v == 0:
            if len(cur) != 3:
                raise ParseError(f"clause {cur!r} does not have 3 literals")
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(v)
    if cur:
        raise ParseError("last clause not terminated by 0")
    if n_clauses != len(clauses):
        raise ParseError(f"header promises {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def serialize_cnf(f):
    out = [f"p cnf {f.n_vars} {f.n_clauses}"]
    for cl in f.clauses:
        out.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(out) + "\n"


def normalize_3sat(f):
    """Equisatisfiable square formula: clause count and variable count both
    equal to max(n, m), padding the clause list with copies of the first
    clause and the variable range with fresh unused variables."""
    if not f.clauses:
        raise ValueError("cannot normalize an empty clause list")
    s = max(f.n_vars, f.n_clauses)
    clauses = f.clauses + (f.clauses[0],) * (s - f.n_clauses)
    return CnfFormula(s, clauses)


def _check_distinct_vars(f):
    for cl in f.clauses:
        if len({abs(l) for l in cl}) != 3:
            raise ValueError(
                f"clause {cl!r} repeats a variable; the clause profile "
                "assigns conflicting lists in that case")


def sat_agent_items(n_clauses, n_vars):
    """Agent and item name tables for the clause-variable universe: blocks
    grouped per variable, plain name then capitalized complement."""
    agents, items = [], []
    for j in range(1, n_vars + 1):
        for i in range(1, n_clauses + 1):
            agents += [f"a{i}_{j}", f"A{i}_{j}"]
            items += [f"b{i}_{j}", f"B{i}_{j}"]
    return tuple(agents), tuple(items)


def _sat_index(n_clauses, i, j, bar):
    return 2 * ((j - 1) * n_clauses + (i - 1)) + (1 if bar else 0)


def build_profile_p1(n_clauses, n_vars):
    """Pairing profile: both agents of every clause-variable block rank the
    block's plain item over its complement.  An assignment is pareto
    optimal here iff every block's two agents hold the block's two items."""
    n_agents = 2 * n_clauses * n_vars
    profile = [None] * n_agents
    for j in range(1, n_vars + 1):
        for i in range(1, n_clauses + 1):
            lst = (_sat_index(n_clauses, i, j, False),
                   _sat_index(n_clauses, i, j, True))
            profile[_sat_index(n_clauses, i, j, False)] = lst
            profile[_sat_index(n_clauses, i, j, True)] = lst
    return tuple(profile)


def build_profile_p2(n_clauses, n_vars):
    """Chain profile: the clause rows of each variable are linked so that,
    together with the pairing profile, all rows of a variable must take the
    same side (all plain or all complement).

    Plain agents interleave the previous row's items with their own
    (``b_{i-1} > b_i > B_{i-1} > B_i``), complementary agents the next
    row's (``b_{i+1} > b_i > B_{i+1} > B_i``); the first plain and last
    complementary agent keep bare pair lists.  Flipping one row of a
    uniform column then always hands two adjacent agents each other's
    preferred item, while uniform columns leave every want pointing at an
    agent that is already satisfied or further along the one-way chain.
    """
    if n_clauses < 2:
        raise ValueError("the chain profile needs at least 2 clause rows")
    m = n_clauses

    def it(i, j, bar=False):
        return _sat_index(m, i, j, bar)

    n_agents = 2 * m * n_vars
    profile = [None] * n_agents
    for j in range(1, n_vars + 1):
        for i in range(1, m + 1):
            if i == 1:
                plain = (it(1, j), it(1, j, True))
            else:
                plain = (it(i - 1, j), it(i, j), it(i - 1, j, True),
                         it(i, j, True))
            if i == m:
                comp = (it(m, j), it(m, j, True))
            else:
                comp = (it(i + 1, j), it(i, j), it(i + 1, j, True),
                        it(i, j, True))
            profile[it(i, j)] = plain
            profile[it(i, j, True)] = comp
    return tuple(profile)


def _clause_item(n_clauses, clause_idx, lit):
    """The item that, when held by the plain agent of its block, marks the
    literal as satisfied (the complement item for a negated literal)."""
    return _sat_index(n_clauses, clause_idx, abs(lit), lit < 0)


def _complement(idx):
    return idx ^ 1


def build_profile_p3(f):
    """Clause profile: the three plain agents of each clause form a
    potential trading cycle that materializes exactly when none of the
    clause's literals is satisfied.  Literals keep their stored order."""
    _check_distinct_vars(f)
    m, n = f.n_clauses, f.n_vars
    profile = list(build_profile_p1(m, n))
    for ci, cl in enumerate(f.clauses, start=1):
        sat_item = [None] + [_clause_item(m, ci, lit) for lit in cl]
        # plain agent of literal r: own satisfying item, then the complement
        # of the previous literal's, then its own complement
        prev = {3: 2, 2: 1, 1: 3}
        for r in (3, 2, 1):
            var = abs(cl[r - 1])
            a = _sat_index(m, ci, var, False)
            profile[a] = (sat_item[r], _complement(sat_item[prev[r]]),
                          _complement(sat_item[r]))
            abar = _sat_index(m, ci, var, True)
            profile[abar] = (sat_item[r], _complement(sat_item[r]))
    return tuple(profile)


def truth_fragments(n_clauses, j):
    """The two canonical allocation fragments of variable j as agent->item
    dicts: the "true" fragment pairs every plain agent with its plain item,
    the "false" fragment swaps the pairs.  Agent and item tables share the
    same block layout, so one index function serves both."""
    true_frag, false_frag = {}, {}
    for i in range(1, n_clauses + 1):
        plain = _sat_index(n_clauses, i, j, False)
        comp = _sat_index(n_clauses, i, j, True)
        true_frag[plain] = plain
        true_frag[comp] = comp
        false_frag[plain] = comp
        false_frag[comp] = plain
    return true_frag, false_frag


def decode_truth(p, n_clauses, n_vars):
    """Recover the boolean vector encoded by an assignment containing one
    fragment per variable, or None where it contains neither."""
    values = []
    for j in range(1, n_vars + 1):
        true_frag, false_frag = truth_fragments(n_clauses, j)
        if all(p.alloc[a] == b for a, b in true_frag.items()):
            values.append(True)
        elif all(p.alloc[a] == b for a, b in false_frag.items()):
            values.append(False)
        else:
            values.append(None)
    return values


def reduce_3sat(f, variant="three-layer"):
    """Instance that has an assignment pareto optimal in all layers iff the
    formula is satisfiable.  The three-layer variant uses the pairing,
    chain, and clause profiles with alpha = 3; the four-layer variant adds
    one layer where every agent has the same complete list and alpha = 4."""
    if variant not in ("three-layer", "four-layer"):
        raise ValueError(f"unknown variant {variant!r}")
    g = normalize_3sat(f)
    _check_distinct_vars(g)
    m = n = g.n_vars
    agents, items = sat_agent_items(m, n)
    layers = [build_profile_p1(m, n), build_profile_p2(m, n),
              build_profile_p3(g)]
    alpha = 3
    if variant == "four-layer":
        full = tuple(range(len(items)))
        layers.append(tuple(full for _ in agents))
        alpha = 4
    return Instance(agents, items, tuple(layers), alpha)


@dataclass(frozen=True)
class GridGraph:
    """Undirected graph over the k x k vertex grid; vertices are (row, col)
    pairs in [1, k]^2."""

    k: int
    edges: frozenset

    def __post_init__(self):
        for e in self.edges:
            u, v = tuple(e)
            if u == v:
                raise ValueError("self edge")
            for (r, c) in (u, v):
                if not (1 <= r <= self.k and 1 <= c <= self.k):
                    raise ValueError(f"vertex {(r, c)} outside the {self.k}x{self.k} grid")

    def adjacent(self, u, v):
        return frozenset((u, v)) in self.edges


def grid_graph(k, edge_pairs):
    return GridGraph(k, frozenset(frozenset(e) for e in edge_pairs))


def parse_grid_graph(text):
    k = None
    edges = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "k":
            k = int(parts[1])
        elif parts[0] == "e":
            if len(parts) != 5:
                raise ParseError("grid edge needs 4 coordinates", no)
            i1, j1, i2, j2 = (int(t) for t in parts[1:])
            edges.append(((i1, j1), (i2, j2)))
        else:
            raise ParseError(f"unknown line {line!r}", no)
    if k is None:
        raise ParseError("missing 'k <int>' line")
    return grid_graph(k, edges)


@dataclass(frozen=True)
class ColoredGraph:
    """Undirected vertex-colored graph; vertices 1..n, colors positive ints."""

    n_vertices: int
    edges: frozenset
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.n_vertices:
            raise ValueError("one color per vertex required")
        for e in self.edges:
            u, v = tuple(e)
            if u == v:
                raise ValueError("self edge")
            if not (1 <= u <= self.n_vertices and 1 <= v <= self.n_vertices):
                raise ValueError(f"edge {(u, v)} outside vertex range")

    def color(self, v):
        return self.colors[v - 1]

    def adjacent(self, u, v):
        return frozenset((u, v)) in self.edges


def colored_graph(colors, edge_pairs):
    return ColoredGraph(len(colors), frozenset(frozenset(e) for e in edge_pairs),
                        tuple(colors))


def parse_colored_graph(text):
    colors = {}
    edges = []
    k = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c "):
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 3:
            colors[int(parts[1])] = int(parts[2])
        elif parts[0] == "e" and len(parts) == 3:
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "k" and len(parts) == 2:
            k = int(parts[1])
        else:
            raise ParseError(f"unknown line {line!r}", no)
    if not colors:
        raise ParseError("no 'v <id> <color>' lines")
    n = max(colors)
    if sorted(colors) != list(range(1, n + 1)):
        raise ParseError("vertex ids must be dense 1..n")
    g = colored_graph([colors[v] for v in range(1, n + 1)], edges)
    return g, (k if k is not None else max(g.colors))


def reduce_permutation_clique_alpha(g):
    """k agents, k items, one layer per grid cell (row-major), alpha = k: a
    k-globally optimal assignment exists iff the grid has a clique picking
    one vertex per row and per column."""
    k = g.k
    agents = tuple(f"a{i}" for i in range(1, k + 1))
    items = tuple(f"b{j}" for j in range(1, k + 1))
    layers = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            profile = []
            for r in range(1, k + 1):
                if r == i:
                    profile.append((j - 1,))
                else:
                    profile.append(tuple(
                        q - 1 for q in range(1, k + 1)
                        if q != j and g.adjacent((i, j), (r, q))))
            layers.append(tuple(profile))
    return Instance(agents, items, tuple(layers), k)


def reduce_permutation_clique_ell_alpha(g):
    """2k agents, 2k items, alpha = ell: an opening layer forcing both
    families to absorb their item family, one agreement layer per cell
    (i, j) tying p(a_i) = b_j to p(c_i) = d_j, and one layer per
    non-adjacent cross pair of cells that trades between the two families
    exactly when both cells are selected.

    Each special layer demotes its marked item to the bottom of every list
    in that family and gives only the single involved agent the other
    family's items as a gate directly above its marked item, so the gate
    opens only while the agent holds the mark; everyone else stays inside
    one common order and can never close a cycle.
    """
    k = g.k
    agents = tuple(f"a{i}" for i in range(1, k + 1)) + tuple(
        f"c{i}" for i in range(1, k + 1))
    items = tuple(f"b{j}" for j in range(1, k + 1)) + tuple(
        f"d{j}" for j in range(1, k + 1))

    def b(j):
        return j - 1

    def d(j):
        return k + j - 1

    all_b = tuple(b(q) for q in range(1, k + 1))
    all_d = tuple(d(q) for q in range(1, k + 1))

    def trade_layer(i1, j1, i2, j2):
        # a cycle exists iff p(a_i1) = b_j1 and p(c_i2) = d_j2: both marks
        # sit at the bottom of their whole family's lists, and only the two
        # involved agents carry the other family's mark as a gate directly
        # above their own
        b_rest = tuple(b(q) for q in range(1, k + 1) if q != j1)
        d_rest = tuple(d(q) for q in range(1, k + 1) if q != j2)
        profile = []
        for i in range(1, k + 1):
            if i == i1:
                profile.append(b_rest + (d(j2), b(j1)))
            else:
                profile.append(b_rest + (b(j1),))
        for i in range(1, k + 1):
            if i == i2:
                profile.append(d_rest + (b(j1), d(j2)))
            else:
                profile.append(d_rest + (d(j2),))
        return tuple(profile)

    layers = [tuple([all_b] * k + [all_d] * k)]
    # agreement layers: p(a_i) = b_j forces p(c_i) = d_j (the reverse
    # mismatch trips the layer of the cell a_i actually selected)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            for w in range(1, k + 1):
                if w != j:
                    layers.append(trade_layer(i, j, i, w))
    # non-edge layers: under agreement, selecting both cells of a
    # non-adjacent cross pair closes the trade
    vertices = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)]
    for u, v in itertools.combinations(vertices, 2):
        (i1, j1), (i2, j2) = u, v
        if i1 != i2 and j1 != j2 and not g.adjacent(u, v):
            layers.append(trade_layer(i1, j1, i2, j2))
    return Instance(agents, items, tuple(layers), len(layers))


def reduce_mis_alpha(g, k):
    """n agents, k items, one layer per vertex, alpha = k: a k-globally
    optimal assignment exists iff the graph has an independent set with one
    vertex of every color.  Needs n >= k; with fewer vertices than colors
    the source instance is trivially a no."""
    if any(c > k for c in g.colors):
        raise ValueError("vertex color exceeds the color count")
    if g.n_vertices < k:
        raise ValueError(
            f"needs at least as many vertices as colors, got n={g.n_vertices} < k={k}")
    n = g.n_vertices
    agents = tuple(f"a{i}" for i in range(1, n + 1))
    items = tuple(f"b{c}" for c in range(1, k + 1))
    layers = []
    for i in range(1, n + 1):
        profile = []
        for j in range(1, n + 1):
            if j == i:
                profile.append((g.color(i) - 1,))
            elif g.color(j) == g.color(i) or g.adjacent(i, j):
                profile.append(())
            else:
                profile.append((g.color(j) - 1,))
        layers.append(tuple(profile))
    return Instance(agents, items, tuple(layers), k)


def reduce_mis_ell_alpha(g, k):
    """n agents, k items, n + 1 layers, alpha = ell; needs n >= k."""
    if any(c > k for c in g.colors):
        raise ValueError("vertex color exceeds the color count")
    n = g.n_vertices
    if n < k:
        raise ValueError(f"needs at least as many vertices as colors, got n={n} < k={k}")
    agents = tuple(f"a{i}" for i in range(1, n + 1))
    items = tuple(f"b{c}" for c in range(1, k + 1))
    layers = [tuple((g.color(i) - 1,) for i in range(1, n + 1))]
    for i in range(1, n + 1):
        ci = g.color(i)
        profile = []
        for j in range(1, n + 1):
            if j == i:
                profile.append(tuple(c - 1 for c in range(1, k + 1) if c != ci)
                               + (ci - 1,))
            elif g.adjacent(i, j) and g.color(j) != ci:
                profile.append((ci - 1, g.color(j) - 1))
            else:
                profile.append((g.color(j) - 1,))
        layers.append(tuple(profile))
    return Instance(agents, items, tuple(layers), n + 1)


def sat_oracle(f, max_vars=16):
    """Brute-force satisfiability of a 3-CNF."""
    if f.n_vars > max_vars:
        raise ValueError(f"too many variables for brute force: {f.n_vars}")
    for bits in itertools.product((False, True), repeat=f.n_vars):
        if all(any((lit > 0) == bits[abs(lit) - 1] for lit in cl)
               for cl in f.clauses):
            return True
    return False


def permutation_clique_oracle(g, max_k=8):
    """Brute-force check for a clique with one vertex per row and column."""
    if g.k > max_k:
        raise ValueError(f"grid too large for brute force: k={g.k}")
    for pi in itertools.permutations(range(1, g.k + 1)):
        verts = [(i, pi[i - 1]) for i in range(1, g.k + 1)]
        if all(g.adjacent(u, v) for u, v in itertools.combinations(verts, 2)):
            return True
    return False


def mis_oracle(g, k, max_vertices=12):
    """Brute-force check for an independent set with one vertex per color."""
    if g.n_vertices > max_vertices:
        raise ValueError(f"graph too large for brute force: n={g.n_vertices}")
    classes = [[v for v in range(1, g.n_vertices + 1) if g.color(v) == c]
               for c in range(1, k + 1)]
    if any(not cls for cls in classes):
        return False
    for pick in itertools.product(*classes):
        if all(not g.adjacent(u, v)
               for u, v in itertools.combinations(pick, 2)):
            return True
    return False


def random_instance(seed, n, m, ell, alpha, list_len=None):
    """Deterministic random instance: every list is a uniform random subset
    of the items in uniform random order, with its length drawn uniformly
    from the inclusive ``list_len`` range (default 0..m)."""
    if not 1 <= alpha <= ell:
        raise ValueError(f"alpha {alpha} out of range [1, {ell}]")
    lo, hi = list_len if list_len is not None else (0, m)
    lo, hi = max(0, lo), min(m, hi)
    rng = random.Random(seed)
    agents = tuple(f"a{i}" for i in range(1, n + 1))
    items = tuple(f"b{j}" for j in range(1, m + 1))
    layers = tuple(
        tuple(tuple(rng.sample(range(m), rng.randint(lo, hi)))
              for _ in range(n))
        for _ in range(ell))
    return Instance(agents, items, layers, alpha)


def random_formula(seed, n_vars=3, max_clauses=3):
    """Random 3-CNF with distinct variables inside every clause."""
    if n_vars < 3:
        raise ValueError("need at least 3 variables for distinct-variable clauses")
    rng = random.Random(seed)
    n_clauses = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n_vars, tuple(clauses))
