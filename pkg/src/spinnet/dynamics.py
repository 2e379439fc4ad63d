"""Programs, transition amplitudes, virtual Hamiltonians and path sums.

A program is a sequence of gate descriptors:

* ``R <node>`` Racah transform at a node (direction from the node position),
* ``P <node>`` phase transform at a node,
* ``W <alpha> <beta> <gamma>`` Wigner rotation with Euler angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import GateError, InputError, MoveError, ParseError, ProgramError
from .graphs import Move, MoveGraph, bfs, diameter
from .rotations import RotationSpec, wigner_D
from .simulator import (
    SimState,
    apply_phase,
    apply_racah,
    apply_rotation,
    phase_gate,
    racah_gate,
)
from .trees import CouplingTree, k_assignments, tree_from, twist_move

__all__ = [
    "Step",
    "Program",
    "parse_program",
    "format_program",
    "run_program",
    "amplitude",
    "step_unitaries",
    "virtual_hamiltonian",
    "edge_matrix",
    "simple_paths",
    "path_sum",
    "altered_path_sum",
]


class Step(NamedTuple):
    """One gate: ``kind`` is "R", "P" or "W"; ``arg`` a node id or RotationSpec."""

    kind: str
    arg: object

    def __str__(self):
        if self.kind == "W":
            a, b, c = self.arg.to_euler().angles
            return f"W {a!r} {b!r} {c!r}"
        return f"{self.kind} {self.arg}"


@dataclass(frozen=True)
class Program:
    steps: tuple[Step, ...] = ()

    def __len__(self):
        return len(self.steps)

    @property
    def computing_class(self) -> str:
        """One of "empty", "M", "j", "altered", "alternating", "mixed".

        "altered" is one leading rotation followed by j-gates only;
        "alternating" strictly alternates rotations and j-gates with an even
        length. The checks run in this order, so a two-step program made of
        one rotation and then one j-gate is reported as "altered".
        """
        kinds = ["M" if s.kind == "W" else "j" for s in self.steps]
        if not kinds:
            return "empty"
        if set(kinds) == {"M"}:
            return "M"
        if set(kinds) == {"j"}:
            return "j"
        if kinds[0] == "M" and set(kinds[1:]) == {"j"}:
            return "altered"
        if len(kinds) % 2 == 0 and all(a != b for a, b in zip(kinds, kinds[1:])):
            return "alternating"
        return "mixed"


def parse_program(text: str, source: str | None = None) -> Program:
    """Parse the line-oriented program format; ``#`` starts a comment."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op, args = parts[0].upper(), parts[1:]
        try:
            if op in ("R", "P"):
                if len(args) != 1:
                    raise ValueError(f"{op} takes one node id")
                node = int(args[0])
                if node < 0:
                    raise ValueError("node ids are non-negative")
                steps.append(Step(op, node))
            elif op == "W":
                if len(args) != 3:
                    raise ValueError("W takes three Euler angles")
                steps.append(Step("W", RotationSpec.euler(*map(float, args))))
            else:
                raise ValueError(f"unknown gate {parts[0]!r}")
        except (ValueError, InputError) as exc:
            raise ParseError(str(exc), line=lineno, source=source) from None
    return Program(tuple(steps))


def format_program(p: Program) -> str:
    return "".join(f"{s}\n" for s in p.steps)


def _apply_step(s: SimState, step: Step) -> SimState:
    if step.kind == "R":
        return apply_racah(s, step.arg)
    if step.kind == "P":
        return apply_phase(s, step.arg)
    if step.kind == "W":
        return apply_rotation(s, step.arg)
    raise GateError(f"unknown gate kind {step.kind!r}")


def run_program(s_in: SimState, p: Program) -> SimState:
    """Apply the steps of ``p`` in order.

    Raises
    ------
    ProgramError
        Naming the 0-based index and descriptor of the first step that
        cannot be applied.
    """
    s = s_in
    for i, step in enumerate(p.steps):
        try:
            s = _apply_step(s, step)
        except (GateError, MoveError, InputError) as exc:
            raise ProgramError(f"step {i} ({step}) cannot be applied: {exc}",
                               step=i, descriptor=str(step)) from exc
    return s


def amplitude(s_in: SimState, p: Program, s_out: SimState) -> complex:
    """<s_out| U_p |s_in>."""
    final = run_program(s_in, p)
    if (final.tree, final.leaf_spins, final.J) != (s_out.tree, s_out.leaf_spins, s_out.J):
        raise InputError(f"output state is not in the final basis {final.tree} of the program")
    return complex(s_out.inner(final))


def step_unitaries(tree, leaf_spins, J: int, p: Program) -> list[np.ndarray]:
    """Full one-step unitaries on the (k, M) space, flattened k-major with M from +J down."""
    tree = tree_from(tree)
    dim_m = J + 1
    out = []
    for i, step in enumerate(p.steps):
        try:
            if step.kind == "R":
                tree, g = racah_gate(tree, leaf_spins, J, step.arg)
                out.append(np.kron(g, np.eye(dim_m)))
            elif step.kind == "P":
                tree, g = phase_gate(tree, leaf_spins, J, step.arg)
                out.append(np.kron(g, np.eye(dim_m)))
            else:
                dim_k = len(k_assignments(tree, leaf_spins, J))
                out.append(np.kron(np.eye(dim_k), wigner_D(J, step.arg)))
        except (GateError, MoveError) as exc:
            raise ProgramError(f"step {i} ({step}) cannot be applied: {exc}",
                               step=i, descriptor=str(step)) from exc
    return out


def virtual_hamiltonian(u: np.ndarray, tau: float = 1.0, tol: float = 1e-10) -> np.ndarray:
    """Hermitian H with exp(i H tau) = u, eigenphases in (-pi, pi].

    The complex Schur form of a unitary matrix is diagonal up to rounding and
    its Schur vectors stay orthonormal inside degenerate eigenvalue clusters.
    """
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    if u.shape[0] != u.shape[1]:
        raise InputError("step operator must be square")
    if not tau > 0:
        raise InputError("tau must be positive")
    deviation = float(np.linalg.norm(u.conj().T @ u - np.eye(len(u))))
    if deviation > tol:
        raise InputError(f"step operator is not unitary (deviation {deviation:.3e})")
    T, Z = scipy.linalg.schur(u, output="complex")
    theta = np.angle(np.diag(T))
    theta[theta <= -math.pi] = math.pi
    H = (Z * (theta / tau)) @ Z.conj().T
    return (H + H.conj().T) / 2


# ----------------------------------------------------------------- path sums


def _canonicalizing_twists(tree: CouplingTree) -> list[int]:
    """Twist node ids that bring a plane tree to its canonical non-plane form."""
    out = []
    while True:
        for i, x in enumerate(tree.nodes):
            left, right = (tree.clusters[c] if not isinstance(c, tuple) else {c[1]}
                           for c in tree.children(i))
            if min(right) < min(left):
                out.append(i)
                tree = twist_move(tree, i)
                break
        else:
            return out


def edge_matrix(g: MoveGraph, tree, move: Move, leaf_spins, J: int) -> tuple[CouplingTree, np.ndarray]:
    """Gate matrix carried by one graph edge.

    On the rotation graph an edge is realized on canonical plane
    representatives: an optional twist at the node (variant 1), the Racah
    transform, and the phase transforms that restore canonical form. Its
    matrix is therefore the exact recoupling matrix between the two
    canonical plane trees.
    """
    tree = tree_from(tree)
    if move.type == "twist":
        return phase_gate(tree, leaf_spins, J, move.node)
    if g.kind == "twist_rotation":
        return racah_gate(tree, leaf_spins, J, move.node, move.variant)
    total = np.eye(len(k_assignments(tree, leaf_spins, J)))
    if move.variant == 1:
        tree, m = phase_gate(tree, leaf_spins, J, move.node)
        total = m @ total
    tree, m = racah_gate(tree, leaf_spins, J, move.node)
    total = m @ total
    for node in _canonicalizing_twists(tree):
        tree, m = phase_gate(tree, leaf_spins, J, node)
        total = m @ total
    return tree, total


def simple_paths(g: MoveGraph, src: int, dst: int, l_max: int) -> Iterator[list[tuple[int, Move]]]:
    """All vertex-simple paths src -> dst with at most ``l_max`` edges, in DFS order.

    Each path is a list of (next_vertex, move) steps. Branches that cannot
    reach ``dst`` within the remaining budget are pruned with BFS distances.
    """
    to_dst = bfs(g, dst)
    visited = {src}
    path: list[tuple[int, Move]] = []

    def walk(v):
        if v == dst:
            yield list(path)
            return
        budget = l_max - len(path)
        for u, m in sorted(g.adjacency[v], key=lambda e: (e[1].sort_key(), e[0])):
            if u in visited or to_dst[u] < 0 or to_dst[u] > budget - 1:
                continue
            visited.add(u)
            path.append((u, m))
            yield from walk(u)
            path.pop()
            visited.discard(u)

    yield from walk(src)


def _weight_fn(weighting, custom):
    if weighting == "uniform":
        return lambda path: 1.0
    if weighting == "inverse_length":
        return lambda path: 1.0 / len(path) if path else 1.0
    if weighting == "custom":
        if custom is None:
            raise InputError("custom weighting needs a weight function")
        return custom
    raise InputError(f"unknown weighting {weighting!r}")


def path_sum(g: MoveGraph, b_in, b_out, leaf_spins: Sequence[int], J: int,
             weighting: str = "uniform", l_max: int | None = None,
             weight: Callable | None = None) -> np.ndarray:
    """Sum over simple paths b_in -> b_out of W_path * U_path.

    ``U_path`` is the product of edge matrices along the path, a matrix over
    k_assignments(b_out) x k_assignments(b_in) of the graph's vertex trees.
    ``weighting`` is "uniform" (W = 1), "inverse_length" (W = 1/L, 1 for the
    empty path) or "custom" (W = ``weight(path)`` with path a list of
    (vertex, move) steps). ``l_max`` defaults to the graph diameter.
    """
    src, dst = g.vertex(b_in), g.vertex(b_out)
    if l_max is None:
        l_max = diameter(g)
    d = bfs(g, src)[dst]
    if l_max < d:
        raise InputError(f"empty path sum: l_max={l_max} is below the distance {d}")
    w = _weight_fn(weighting, weight)
    start = g.vertices[src]
    k_in = k_assignments(start, leaf_spins, J)
    k_out = k_assignments(g.vertices[dst], leaf_spins, J)
    total = np.zeros((len(k_out), len(k_in)), dtype=complex)
    cache: dict = {}
    for path in simple_paths(g, src, dst, l_max):
        mat = np.eye(len(k_in))
        v = src
        for u, move in path:
            key = (v, move)
            if key not in cache:
                cache[key] = edge_matrix(g, g.vertices[v], move, leaf_spins, J)[1]
            mat = cache[key] @ mat
            v = u
        total += w(path) * mat
    return total


def altered_path_sum(g: MoveGraph, b_in, b_out, leaf_spins, J: int, rot: RotationSpec,
                     weighting: str = "uniform", l_max: int | None = None,
                     weight: Callable | None = None) -> np.ndarray:
    """Path sum with one Wigner rotation applied to the input first.

    The rotation acts on M only, so the functional factorizes into the
    j-class path sum times the rotation matrix element; the result is their
    Kronecker product over (k, M) indices, M from +J down.
    """
    z = path_sum(g, b_in, b_out, leaf_spins, J, weighting, l_max, weight)
    return np.kron(z, wigner_D(J, rot))
