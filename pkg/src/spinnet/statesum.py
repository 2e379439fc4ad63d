"""Finite-cutoff Ponzano-Regge state functional and partition sum.

A tetrahedron lists six edge ids in the 6j layout {e1 e2 e3; e4 e5 e6}: the
faces are (e1,e2,e3), (e1,e5,e6), (e4,e2,e6), (e4,e5,e3) and columns hold
opposite edges. For a tetrahedron on vertices (a, b, c, d) that is
e1=ab, e2=bc, e3=ac, e4=cd, e5=ad, e6=bd.

File format (UTF-8, line oriented, ``#`` starts a comment)::

    PR3 v1
    V <N0>
    E <id> [<u> <v>] [boundary]
    T <e1> <e2> <e3> <e4> <e5> <e6>

Edge endpoints are optional; when every edge has them, each tetrahedron is
also checked to span four vertices with faces closing into triangles.
Coloring files hold ``J <edge-id> <two_j>`` lines.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import InputError, ParseError, ResourceError, TruncationError
from .exact import SignedSqrtRational
from .wigner import triangle_ok, wigner_6j

__all__ = [
    "Triangulation3",
    "TET_FACES",
    "DEFAULT_BUDGET",
    "parse_triangulation",
    "format_triangulation",
    "parse_coloring",
    "tet_edges",
    "boundary_of_4_simplex",
    "single_tetrahedron",
    "state_functional",
    "partition_sum",
    "bistellar_23_check",
]

TET_FACES = ((0, 1, 2), (0, 4, 5), (3, 1, 5), (3, 4, 2))
# vertex pairs of e1..e6 for a tetrahedron on vertices (a, b, c, d)
_TET_VERTEX_PAIRS = ((0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3))
DEFAULT_BUDGET = 10**7


def _issues(n0, edges, tets, boundary) -> Iterator[tuple[str, tuple | None]]:
    """Yield (message, key) for each violated incidence invariant."""
    if n0 < 0:
        yield "vertex count must be non-negative", None
    for e, ends in edges.items():
        if ends is not None:
            u, v = ends
            if u == v or not (0 <= u < n0 and 0 <= v < n0):
                yield f"edge {e} has invalid endpoints {ends}", ("E", e)
    for b in boundary:
        if b not in edges:
            yield f"boundary mark on unknown edge {b}", None
    with_ends = bool(edges) and all(v is not None for v in edges.values())
    for i, tet in enumerate(tets):
        key = ("T", i)
        if len(tet) != 6:
            yield f"tetrahedron {i} names {len(tet)} edges, expected 6", key
            continue
        missing = [e for e in tet if e not in edges]
        if missing:
            yield f"tetrahedron {i} references unknown edge {missing[0]}", key
            continue
        if len(set(tet)) != 6:
            yield f"tetrahedron {i} repeats an edge", key
            continue
        if with_ends:
            verts = set()
            for face in TET_FACES:
                ends = [frozenset(edges[tet[k]]) for k in face]
                if len(set().union(*ends)) != 3 or len(set(ends)) != 3:
                    yield f"tetrahedron {i}: edges {[tet[k] for k in face]} do not close a triangle", key
                    break
                verts |= set().union(*ends)
            else:
                if len(verts) != 4:
                    yield f"tetrahedron {i} does not span four vertices", key


@dataclass(frozen=True)
class Triangulation3:
    """A labeled 3-dimensional simplicial complex.

    ``edges`` maps edge id to its endpoints (or None), ``tets`` lists six edge
    ids per tetrahedron and ``boundary`` holds the boundary-marked edge ids.
    """

    n0: int
    edges: Mapping[int, tuple | None]
    tets: tuple
    boundary: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", dict(self.edges))
        object.__setattr__(self, "tets", tuple(tuple(t) for t in self.tets))
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        for msg, _ in _issues(self.n0, self.edges, self.tets, self.boundary):
            raise InputError(msg)

    @property
    def n1(self) -> int:
        return len(self.edges)

    @property
    def n3(self) -> int:
        return len(self.tets)

    def interior(self) -> list[int]:
        return sorted(e for e in self.edges if e not in self.boundary)

    def relabel(self, mapping: Mapping[int, int]) -> "Triangulation3":
        """Rename edge ids through ``mapping``; ids not in it keep their name."""
        m = lambda e: mapping.get(e, e)
        return Triangulation3(self.n0, {m(e): v for e, v in self.edges.items()},
                              tuple(tuple(m(e) for e in t) for t in self.tets),
                              frozenset(m(e) for e in self.boundary))


def parse_triangulation(text: str, source: str | None = None) -> Triangulation3:
    """Parse the ``PR3 v1`` format.

    Raises
    ------
    ParseError
        With the 1-based line number for malformed lines, duplicate ids and
        dangling references.
    """
    header_seen = False
    n0 = None
    edges: dict = {}
    boundary = set()
    tets = []
    line_of: dict = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()

        def err(msg):
            return ParseError(msg, line=lineno, source=source)

        if not header_seen:
            if parts != ["PR3", "v1"]:
                raise err("expected header 'PR3 v1'")
            header_seen = True
            continue
        op, args = parts[0], parts[1:]
        flag = bool(args) and args[-1] == "boundary"
        fields = args[:-1] if flag else args
        if op != "E" and flag:
            raise err("'boundary' is only valid on E lines")
        try:
            nums = [int(a) for a in fields]
        except ValueError:
            raise err(f"malformed {op} line: {line!r}") from None
        if op == "V":
            if n0 is not None:
                raise err("duplicate V line")
            if len(nums) != 1 or nums[0] < 0:
                raise err("V takes one non-negative count")
            n0 = nums[0]
        elif op == "E":
            if len(nums) not in (1, 3):
                raise err("E takes an id, optional endpoints u v and an optional 'boundary'")
            e = nums[0]
            if e in edges:
                raise err(f"duplicate edge id {e}")
            edges[e] = tuple(nums[1:]) if len(nums) == 3 else None
            line_of[("E", e)] = lineno
            if flag:
                boundary.add(e)
        elif op == "T":
            if len(nums) != 6:
                raise err(f"tetrahedron names {len(nums)} edges, expected 6")
            line_of[("T", len(tets))] = lineno
            tets.append(tuple(nums))
        else:
            raise err(f"unknown record {op!r}")
    if not header_seen:
        raise ParseError("expected header 'PR3 v1'", line=max(last, 1), source=source)
    if n0 is None:
        raise ParseError("missing V line", line=last, source=source)
    if edges and len({v is None for v in edges.values()}) > 1:
        raise ParseError("give endpoints for all edges or for none", line=last, source=source)
    for msg, key in _issues(n0, edges, tets, boundary):
        raise ParseError(msg, line=line_of.get(key, last), source=source)
    return Triangulation3(n0, edges, tuple(tets), frozenset(boundary))


def format_triangulation(t: Triangulation3) -> str:
    lines = ["PR3 v1", f"V {t.n0}"]
    for e in sorted(t.edges):
        ends = t.edges[e]
        text = f"E {e}" + ("" if ends is None else f" {ends[0]} {ends[1]}")
        lines.append(text + (" boundary" if e in t.boundary else ""))
    lines += ["T " + " ".join(map(str, tet)) for tet in t.tets]
    return "\n".join(lines) + "\n"


def parse_coloring(text: str, source: str | None = None) -> dict[int, int]:
    """Parse ``J <edge-id> <two_j>`` lines into {edge id: two_j}."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] != "J" or len(parts) != 3:
                raise ValueError
            e, two_j = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"expected 'J <edge-id> <two_j>', got {line!r}",
                             line=lineno, source=source) from None
        if two_j < 0:
            raise ParseError("two_j must be non-negative", line=lineno, source=source)
        if e in out:
            raise ParseError(f"edge {e} colored twice", line=lineno, source=source)
        out[e] = two_j
    return out


def tet_edges(vertices, edge_id: Mapping[frozenset, int]) -> tuple[int, ...]:
    """Edge ids e1..e6 of the tetrahedron on four vertices (a, b, c, d)."""
    return tuple(edge_id[frozenset((vertices[i], vertices[j]))] for i, j in _TET_VERTEX_PAIRS)


def boundary_of_4_simplex() -> Triangulation3:
    """The 3-sphere as the boundary of the 4-simplex: 5 vertices, 10 edges, 5 tetrahedra.

    Edge ids 0..9 enumerate vertex pairs lexicographically.
    """
    pairs = list(itertools.combinations(range(5), 2))
    edge_id = {frozenset(p): i for i, p in enumerate(pairs)}
    tets = [tet_edges([v for v in range(5) if v != skip], edge_id) for skip in range(5)]
    return Triangulation3(5, dict(enumerate(pairs)), tuple(tets))


def single_tetrahedron(boundary: bool = True) -> Triangulation3:
    """One tetrahedron on vertices 0..3, edge ids 0..5 in 6j order."""
    edges = {i: p for i, p in enumerate(_TET_VERTEX_PAIRS)}
    return Triangulation3(4, edges, ((0, 1, 2, 3, 4, 5),),
                          frozenset(edges) if boundary else frozenset())


# ----------------------------------------------------------------- evaluation


def _lambda_inv_power(two_L: int, C, n0: int) -> Fraction | float:
    # Lambda(L)^(-N0) with Lambda = 4 L^3 / (3 C); exact when C is rational
    L = Fraction(two_L, 2)
    if isinstance(C, (int, Fraction)) or (isinstance(C, float) and math.isfinite(C)):
        return (3 * Fraction(C) / (4 * L**3)) ** n0
    raise InputError(f"C must be a finite real number, got {C!r}")


def _check_C(C):
    if not (isinstance(C, (int, float, Fraction)) and math.isfinite(C) and C > 0):
        raise InputError(f"C must be a positive real number, got {C!r}")


def _tet_value(tet, coloring) -> tuple[SignedSqrtRational, int]:
    spins = [coloring[e] for e in tet]
    return wigner_6j(*spins), sum(spins)


def _term(t: Triangulation3, coloring: Mapping[int, int], factor) -> complex | float:
    """Exact product of edge weights, phases and 6j symbols, times ``factor``."""
    weight = 1
    for e in t.edges:
        two_j = coloring[e]
        weight *= (-1) ** two_j * (two_j + 1)
    sixj = SignedSqrtRational.one()
    phase_halves = 0  # total phase exp(i pi sum j) = i^(sum two_j)
    for tet in t.tets:
        value, two_sum = _tet_value(tet, coloring)
        if value.is_zero():
            return 0.0
        sixj = sixj * value
        phase_halves += two_sum
    real = float(weight * factor) * float(sixj)
    phase = (1, 1j, -1, -1j)[phase_halves % 4]
    return real * phase


def _check_coloring(t: Triangulation3, coloring: Mapping[int, int], two_L: int | None):
    for e in t.edges:
        if e not in coloring:
            raise InputError(f"edge {e} is not colored")
        two_j = coloring[e]
        if not isinstance(two_j, int) or two_j < 0:
            raise InputError(f"edge {e}: two_j must be a non-negative integer, got {two_j!r}")
        if two_L is not None and e not in t.boundary and two_j > two_L:
            raise InputError(f"edge {e}: two_j={two_j} exceeds the cutoff two_L={two_L}")


def state_functional(t: Triangulation3, coloring: Mapping[int, int], two_L: int,
                     C=1, unnormalized: bool = False) -> float | complex:
    """Lambda(L)^(-N0) prod_A (-1)^(2j_A)(2j_A+1) prod_B phi_B {6j}_B.

    ``coloring`` maps every edge id to two_j; interior edges must satisfy
    two_j <= two_L. phi_B = exp(i pi sum_p j_p) is taken exactly, so the
    result is complex only when the total phase is imaginary. Any
    inadmissible triad makes the value exactly 0. ``unnormalized`` drops the
    Lambda factor (needed at L = 0 where Lambda vanishes).
    """
    _check_C(C)
    _check_coloring(t, coloring, two_L)
    factor = 1 if unnormalized else _normalization(two_L, C, t.n0)
    return _term(t, coloring, factor)


def _normalization(two_L, C, n0):
    if two_L <= 0:
        raise InputError("Lambda(0) = 0; use unnormalized=True at L = 0")
    return _lambda_inv_power(two_L, C, n0)


def partition_sum(t: Triangulation3, two_L: int, C=1, fixed_boundary: Mapping[int, int] | None = None,
                  budget: int = DEFAULT_BUDGET, unnormalized: bool = False) -> float | complex:
    """Sum of the state functional over colorings with two_j <= two_L.

    Edges in ``fixed_boundary`` keep their value; every boundary-marked edge
    must be fixed. The free edges are enumerated in increasing id order with
    values ascending (lexicographic), branches are cut as soon as a fully
    colored triad is inadmissible, and the terms are added with math.fsum,
    so the result does not depend on summation order.

    Raises
    ------
    ResourceError
        If (two_L + 1)^(free edges) exceeds ``budget``.
    """
    _check_C(C)
    if not isinstance(two_L, int) or two_L < 0:
        raise InputError(f"two_L must be a non-negative integer, got {two_L!r}")
    fixed = dict(fixed_boundary or {})
    for e in fixed:
        if e not in t.edges:
            raise InputError(f"fixed edge {e} is not in the triangulation")
    unfixed_boundary = sorted(t.boundary - set(fixed))
    if unfixed_boundary:
        raise InputError(f"boundary edges {unfixed_boundary} need fixed values")
    free = sorted(e for e in t.edges if e not in fixed)
    required = (two_L + 1) ** len(free)
    if required > budget:
        raise ResourceError(f"{required} colorings exceed the budget of {budget}",
                            required=required, allowed=budget)
    factor = 1 if unnormalized else _normalization(two_L, C, t.n0)
    partial = dict(fixed)
    _check_coloring(t, {**partial, **{e: 0 for e in free}}, two_L)

    # triads become checkable once their last free edge is assigned
    order = {e: i for i, e in enumerate(free)}
    triads = {tuple(sorted((tet[a], tet[b], tet[c]))) for tet in t.tets for a, b, c in TET_FACES}
    ready: list[list[tuple]] = [[] for _ in free]
    for tri in sorted(triads):
        pos = [order[e] for e in tri if e in order]
        if not pos:
            if not triangle_ok(*(partial[e] for e in tri)):
                return 0.0
            continue
        ready[max(pos)].append(tri)

    terms = []

    def assign(i):
        if i == len(free):
            terms.append(_term(t, partial, factor))
            return
        e = free[i]
        for two_j in range(two_L + 1):
            partial[e] = two_j
            if all(triangle_ok(*(partial[x] for x in tri)) for tri in ready[i]):
                assign(i + 1)
        del partial[e]

    assign(0)
    real = math.fsum(z.real for z in terms) if terms else 0.0
    imag = math.fsum(z.imag for z in terms if isinstance(z, complex))
    return complex(real, imag) if imag else real


def bistellar_23_check(spins: Mapping[str, int], two_L: int | None = None) -> float:
    """Relative residual of the 2-3 move dressed in state-functional weights.

    ``spins`` gives two_j for the nine boundary edges of five vertices 1..5:
    a=14, b=15, c=25, d=24, e=34, f=35, p=12, q=23, r=13. The 2-tetrahedron
    side is (1234)(1235); the 3-tetrahedron side is (1245)(2345)(1345)
    summed over the new edge x=45 with weight (-1)^(2x)(2x+1). Both sides
    carry their phases phi_B; the nine shared edge weights and Lambda factors
    are common to both sides (N0 = 5 on each) and cancel.

    Raises
    ------
    TruncationError
        If ``two_L`` is below the largest x allowed by the triangles.
    """
    names = "abcdefpqr"
    if set(spins) != set(names):
        raise InputError(f"need the nine boundary spins {list(names)}")
    s = {k: int(v) for k, v in spins.items()}
    a, b, c, d, e, f, p, q, r = (s[k] for k in names)
    for tri in ((p, q, r), (p, a, d), (e, q, d), (e, a, r), (p, b, c), (f, q, c), (f, b, r)):
        if not triangle_ok(*tri):
            raise InputError(f"boundary triad {tri} is not admissible")
    x_lo = max(abs(a - b), abs(c - d), abs(e - f))
    x_hi = min(a + b, c + d, e + f)
    if two_L is not None and x_hi > two_L:
        raise TruncationError(f"cutoff two_L={two_L} truncates the x range up to {x_hi}")

    def phi(*two_js):
        return (1, 1j, -1, -1j)[sum(two_js) % 4]

    two_side = (phi(p, q, r, e, a, d) * float(wigner_6j(p, q, r, e, a, d))
                * phi(p, q, r, f, b, c) * float(wigner_6j(p, q, r, f, b, c)))
    terms = []
    for x in range(x_lo, x_hi + 1, 2):
        value = (wigner_6j(p, d, a, x, b, c) * wigner_6j(q, e, d, x, c, f)
                 * wigner_6j(r, e, a, x, b, f))
        if value.is_zero():
            continue
        w = (-1) ** x * (x + 1) * phi(p, d, a, x, b, c) * phi(q, e, d, x, c, f) * phi(r, e, a, x, b, f)
        terms.append(w * float(value))
    three_side = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
    scale = max(abs(two_side), math.fsum(abs(z) for z in terms))
    diff = abs(three_side - two_side)
    return diff / scale if scale else diff
