"""Independent reference implementations used by the test suite.

None of these import the code under test beyond plain data types; each
recomputes a quantity from a different construction.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache

import mpmath
import networkx as nx
import numpy as np
import scipy.linalg
import sympy
from sympy.physics import wigner as sw


def half(two_j: int) -> sympy.Rational:
    return sympy.Rational(two_j, 2)


# --------------------------------------------------------------- angular momentum


def spin_matrices(two_j: int):
    """(Jx, Jy, Jz) in the basis M = +J .. -J."""
    j = two_j / 2
    ms = np.array([j - i for i in range(two_j + 1)])
    jp = np.zeros((two_j + 1, two_j + 1))
    for i in range(1, two_j + 1):
        m = ms[i]
        jp[i - 1, i] = math.sqrt(j * (j + 1) - m * (m + 1))
    jm = jp.T
    return (jp + jm) / 2, (jp - jm) / 2j, np.diag(ms)


def expm_rotation(two_j: int, omega: float, axis) -> np.ndarray:
    """exp(-i omega n.J) by matrix exponential."""
    jx, jy, jz = spin_matrices(two_j)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    return scipy.linalg.expm(-1j * omega * (n[0] * jx + n[1] * jy + n[2] * jz))


def expm_euler(two_j: int, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)."""
    return (expm_rotation(two_j, alpha, (0, 0, 1)) @ expm_rotation(two_j, beta, (0, 1, 0))
            @ expm_rotation(two_j, gamma, (0, 0, 1)))


@lru_cache(maxsize=None)
def ladder_cg_table(two_j1: int, two_j2: int) -> dict:
    """Coupled states |J M> expanded in product states by lowering from stretched states.

    Returns {(two_J, two_M): {(two_m1, two_m2): amplitude}}. Each highest
    state |J J> is the unit vector in the M=J product subspace orthogonal to
    all higher-J states, with <j1 j1; j2 J-j1 | J J> > 0.
    """
    m1s = [two_j1 - 2 * i for i in range(two_j1 + 1)]
    m2s = [two_j2 - 2 * i for i in range(two_j2 + 1)]
    basis = [(a, b) for a in m1s for b in m2s]
    index = {s: i for i, s in enumerate(basis)}
    dim = len(basis)

    def lower(vec):
        out = np.zeros(dim)
        for (a, b), i in index.items():
            if not vec[i]:
                continue
            if a > -two_j1:
                c = math.sqrt((two_j1 + a) * (two_j1 - a + 2)) / 2
                out[index[(a - 2, b)]] += c * vec[i]
            if b > -two_j2:
                c = math.sqrt((two_j2 + b) * (two_j2 - b + 2)) / 2
                out[index[(a, b - 2)]] += c * vec[i]
        return out

    table = {}
    for two_J in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2):
        top = np.zeros(dim)
        sub = [index[s] for s in basis if s[0] + s[1] == two_J]
        if two_J == two_j1 + two_j2:
            top[index[(two_j1, two_j2)]] = 1.0
        else:
            # Gram-Schmidt inside the M = J subspace against the higher multiplets
            for i in sub:
                trial = np.zeros(dim)
                trial[i] = 1.0
                for (JJ, MM), v in table.items():
                    if MM == two_J:
                        vec = np.array([v.get(s, 0.0) for s in basis])
                        trial -= vec @ trial * vec
                if np.linalg.norm(trial) > 1e-9:
                    top = trial / np.linalg.norm(trial)
                    break
            lead = index[(two_j1, two_J - two_j1)]
            if top[lead] < 0:
                top = -top
        vec = top
        for two_M in range(two_J, -two_J - 1, -2):
            table[(two_J, two_M)] = {basis[i]: float(vec[i]) for i in range(dim) if abs(vec[i]) > 1e-15}
            if two_M > -two_J:
                vec = lower(vec)
                vec = vec / np.linalg.norm(vec)
    return table


def cg_ladder(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1 j2 m2 | J M> from the ladder-operator table (all arguments two_x)."""
    if m1 + m2 != M or not abs(j1 - j2) <= J <= j1 + j2 or (j1 + j2 + J) % 2:
        return 0.0
    return ladder_cg_table(j1, j2).get((J, M), {}).get((m1, m2), 0.0)


def _admissible(a, b, c):
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def sixj_sympy(*two_j) -> sympy.Expr:
    """{j1 j2 j3; j4 j5 j6}; zero when a triad fails (sympy raises instead)."""
    a, b, c, d, e, f = two_j
    if not all(_admissible(*t) for t in ((a, b, c), (a, e, f), (d, b, f), (d, e, c))):
        return sympy.Integer(0)
    return sw.wigner_6j(*[half(x) for x in two_j])


def ninej_sympy(*two_j) -> sympy.Expr:
    """9j with rows (j1 j2 j3), (j4 j5 j6), (j7 j8 j9); zero when a row or column triad fails."""
    m = [two_j[0:3], two_j[3:6], two_j[6:9]]
    triads = m + [tuple(row[i] for row in m) for i in range(3)]
    if not all(_admissible(*t) for t in triads):
        return sympy.Integer(0)
    return sw.wigner_9j(*[half(x) for x in two_j], prec=None)


def exact_pair(expr) -> tuple[int, sympy.Rational]:
    """(sign, square) of an exact sympy value of the form +-sqrt(rational)."""
    expr = sympy.nsimplify(expr)
    if expr == 0:
        return 0, sympy.Integer(0)
    sign = 1 if expr > 0 else -1
    return sign, sympy.Rational(sympy.simplify(expr**2))


def multiplicity_oracle(leaf_spins, two_J: int) -> int:
    """Copies of spin J in the tensor product, from M-state counting.

    The number of product states with total M = J minus the number with
    M = J + 1 is the multiplicity of J.
    """
    counts = Counter({0: 1})
    for j in leaf_spins:
        nxt = Counter()
        for M, c in counts.items():
            for m in range(-j, j + 1, 2):
                nxt[M + m] += c
        counts = nxt
    return counts[two_J] - counts[two_J + 2]


# ------------------------------------------------------------------ trees/graphs


def _splits(labels: tuple):
    """Unordered splits of a label tuple into two non-empty parts."""
    first, rest = labels[0], labels[1:]
    for r in range(len(rest)):
        for combo in itertools.combinations(rest, r):
            left = (first,) + combo
            right = tuple(x for x in rest if x not in combo)
            yield left, right


def nonplane_cluster_sets(labels: tuple) -> list[frozenset]:
    """Every non-plane labeled binary tree as its set of non-leaf clusters (root included)."""
    if len(labels) == 1:
        return [frozenset()]
    out = []
    for left, right in _splits(labels):
        for a in nonplane_cluster_sets(left):
            for b in nonplane_cluster_sets(right):
                out.append(a | b | {frozenset(labels)})
    return out


def _children(cluster, clusters):
    """Maximal proper sub-clusters or singletons of ``cluster``."""
    subs = [c for c in clusters if c < cluster]
    maximal = [c for c in subs if not any(c < d for d in subs)]
    covered = frozenset().union(*maximal) if maximal else frozenset()
    return maximal + [frozenset([x]) for x in cluster - covered]


def nni_neighbors(clusters: frozenset) -> list[frozenset]:
    """Nearest-neighbour interchanges: swap a cluster A|B under parent (A|B)|C for A|C or B|C."""
    root = max(clusters, key=len)
    out = []
    for x in clusters:
        if x == root:
            continue
        parent = min((c for c in clusters if x < c), key=len)
        a, b = _children(x, clusters)
        c = parent - x
        for keep in (a, b):
            out.append(clusters - {x} | {keep | c})
    return out


def rotation_graph_oracle(n: int) -> nx.Graph:
    """The rotation graph on n+1 leaves built from cluster sets and NNI."""
    g = nx.Graph()
    verts = nonplane_cluster_sets(tuple(range(1, n + 2)))
    g.add_nodes_from(verts)
    for v in verts:
        for u in nni_neighbors(v):
            g.add_edge(v, u)
    return g


def clusters_of(root) -> frozenset:
    """Non-leaf clusters of a nested-tuple tree."""
    out = set()

    def walk(node):
        if isinstance(node, int):
            return frozenset([node])
        s = walk(node[0]) | walk(node[1])
        out.add(s)
        return s

    walk(root)
    return frozenset(out)


def _plane_trees(labels: tuple):
    if len(labels) == 1:
        yield labels[0]
        return
    for r in range(1, len(labels)):
        for left_labels in itertools.combinations(labels, r):
            right_labels = tuple(x for x in labels if x not in left_labels)
            for a in _plane_trees(left_labels):
                for b in _plane_trees(right_labels):
                    yield (a, b)


def plane_local_neighbors(node):
    """Trees one child swap or one plane rotation away, as nested tuples."""
    if isinstance(node, int):
        return []
    a, b = node
    out = [(b, a)]
    if isinstance(a, tuple):
        out.append((a[0], (a[1], b)))
    if isinstance(b, tuple):
        out.append(((a, b[0]), b[1]))
    out += [(x, b) for x in plane_local_neighbors(a)]
    out += [(a, x) for x in plane_local_neighbors(b)]
    return out


def twist_rotation_graph_oracle(n: int) -> nx.Graph:
    g = nx.Graph()
    verts = list(_plane_trees(tuple(range(1, n + 2))))
    g.add_nodes_from(verts)
    for v in verts:
        for u in plane_local_neighbors(v):
            g.add_edge(v, u)
    return g


# --------------------------------------------------------------------- state sum


@lru_cache(maxsize=None)
def _sixj_mpf(key):
    return mpmath.mpf(sympy.N(sixj_sympy(*key), 40)) if sixj_sympy(*key) != 0 else mpmath.mpf(0)


_PAIRS = list(itertools.combinations(range(5), 2))
_TETS = list(itertools.combinations(range(5), 4))


def functional_4simplex(colors, two_L: int, C=1) -> mpmath.mpc:
    """State functional on the boundary of the 4-simplex for one coloring.

    Vertices 0..4, one edge per pair in lexicographic order, one tetrahedron
    per 4-subset; each tetrahedron (v0 v1 v2 v3) carries
    {j01 j12 j02; j23 j03 j13}. The weight is
    Lambda^-5 prod_edges (-1)^(2j)(2j+1) prod_tets i^(sum two_j) {6j}.
    """
    mpmath.mp.dps = 40
    j = dict(zip(_PAIRS, colors))
    term = mpmath.mpc(1)
    for v0, v1, v2, v3 in _TETS:
        key = (j[(v0, v1)], j[(v1, v2)], j[(v0, v2)], j[(v2, v3)], j[(v0, v3)], j[(v1, v3)])
        if not (_admissible(key[0], key[1], key[2]) and _admissible(key[0], key[4], key[5])
                and _admissible(key[3], key[1], key[5]) and _admissible(key[3], key[4], key[2])):
            return mpmath.mpc(0)
        term *= _sixj_mpf(key) * mpmath.mpc(0, 1) ** sum(key)
    for c in colors:
        term *= (-1) ** c * (c + 1)
    L = mpmath.mpf(two_L) / 2
    return term / (4 * L**3 / (3 * mpmath.mpf(C))) ** 5


def brute_force_boundary_4simplex(two_L: int, C=1) -> mpmath.mpc:
    """Partition sum on the boundary of the 4-simplex by plain enumeration of every coloring."""
    total = mpmath.mpc(0)
    for colors in itertools.product(range(two_L + 1), repeat=len(_PAIRS)):
        total += functional_4simplex(colors, two_L, C)
    return total
