"""Coupled-basis states and the unitary gates acting on them.

A :class:`SimState` lives in the coupled basis of one plane tree with fixed
leaf spins and total J. Amplitudes are keyed by ``(k, two_M)`` where ``k`` is
the tuple of intermediate two_k values in post-order.

j-gates change the tree:

* Racah transform at node x, where x and its parent form the pattern
  ((a b)_d c)_f. The overlap
  <(a (b c)_e)_f | ((a b)_d c)_f> = (-1)^(a+b+c+f) sqrt((2d+1)(2e+1)) {a b d; c f e}.
  The reverse pattern (a (b c)_e)_f uses the transpose.
* Phase transform at node x = (a b)_c: |(b a)_c> = (-1)^(a+b-c) |(a b)_c>.

M-gates mix M at fixed tree by a Wigner matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import GateError, InputError
from .exact import minus_one_pow
from .graphs import Move, build_graph, find_path
from .rotations import RotationSpec, m_values, wigner_D
from .trees import (
    CouplingTree,
    k_assignments,
    rotation_move,
    tree_from,
    twist_move,
)
from .wigner import clebsch_gordan, triangle_ok, wigner_6j

__all__ = [
    "SimState",
    "racah_gate",
    "phase_gate",
    "apply_racah",
    "apply_phase",
    "apply_rotation",
    "recoupling_matrix",
    "path_matrix",
    "product_states",
    "product_to_coupled",
    "compose_D_from_spins",
    "chain_tree",
]


def _node_spin_map(tree: CouplingTree, leaf_spins, J, k) -> dict[frozenset, int]:
    """Spin of every subtree, keyed by its leaf-label set."""
    spins = {frozenset([lab]): leaf_spins[lab - 1] for lab in tree.leaves}
    for cluster, value in zip(tree.clusters, tuple(k) + (J,)):
        spins[cluster] = value
    return spins


def _k_from_map(tree: CouplingTree, spins: Mapping[frozenset, int]) -> tuple[int, ...]:
    return tuple(spins[c] for c in tree.clusters[:-1])


def _local(tree, node, spins):
    """(left, right, own) spins at a node from a cluster map."""
    x = tree.nodes[node]
    left, right = x
    lc = frozenset([left]) if isinstance(left, int) else frozenset(_leaf_set(left))
    rc = frozenset([right]) if isinstance(right, int) else frozenset(_leaf_set(right))
    return spins[lc], spins[rc], spins[tree.clusters[node]]


def _leaf_set(node):
    if isinstance(node, int):
        return {node}
    return _leaf_set(node[0]) | _leaf_set(node[1])


def _index(keys):
    return {k: i for i, k in enumerate(keys)}


def racah_gate(tree, leaf_spins: Sequence[int], J: int, node: int,
               direction: str | None = None) -> tuple[CouplingTree, np.ndarray]:
    """Racah transform as a matrix over k_assignments(new) x k_assignments(old).

    ``node`` is the rotated node (see :func:`spinnet.trees.rotation_move`).
    """
    tree = tree_from(tree)
    try:
        new_tree = rotation_move(tree, node, direction)
    except Exception as exc:
        raise GateError(f"Racah transform not applicable at node {node}: {exc}") from exc
    old_keys = k_assignments(tree, leaf_spins, J)
    new_keys = k_assignments(new_tree, leaf_spins, J)
    new_index = _index(new_keys)
    forward = tree.path(node)[-1] == 0
    parent = tree.node_id(tree.path(node)[:-1])
    # the node that appears in the new tree
    new_node = new_tree.node_id(tree.path(node)[:-1] + ((1,) if forward else (0,)))
    new_cluster = new_tree.clusters[new_node]
    mat = np.zeros((len(new_keys), len(old_keys)))
    for col, k in enumerate(old_keys):
        spins = _node_spin_map(tree, leaf_spins, J, k)
        if forward:
            # ((a b)_d c)_f -> (a (b c)_e)_f
            (a, b, d), f = _local(tree, node, spins), spins[tree.clusters[parent]]
            c = _local(tree, parent, spins)[1]
        else:
            # (a (b c)_e)_f -> ((a b)_d c)_f
            (b, c, e), f = _local(tree, node, spins), spins[tree.clusters[parent]]
            a = _local(tree, parent, spins)[0]
        lo, hi = (abs(b - c), b + c) if forward else (abs(a - b), a + b)
        for x in range(lo, hi + 1, 2):
            spins[new_cluster] = x
            key = _k_from_map(new_tree, spins)
            row = new_index.get(key)
            if row is None:
                continue
            d, e = (d, x) if forward else (x, e)
            value = wigner_6j(a, b, d, c, f, e)
            if value.sign:
                phase = minus_one_pow((a + b + c + f) // 2)
                mat[row, col] = phase * np.sqrt((d + 1) * (e + 1)) * float(value)
    return new_tree, mat


def phase_gate(tree, leaf_spins: Sequence[int], J: int, node: int) -> tuple[CouplingTree, np.ndarray]:
    """Phase transform (child swap) as a signed permutation matrix."""
    tree = tree_from(tree)
    try:
        new_tree = twist_move(tree, node)
    except Exception as exc:
        raise GateError(f"phase transform not applicable at node {node}: {exc}") from exc
    old_keys = k_assignments(tree, leaf_spins, J)
    new_index = _index(k_assignments(new_tree, leaf_spins, J))
    mat = np.zeros((len(new_index), len(old_keys)))
    for col, k in enumerate(old_keys):
        spins = _node_spin_map(tree, leaf_spins, J, k)
        a, b, c = _local(tree, node, spins)
        mat[new_index[_k_from_map(new_tree, spins)], col] = minus_one_pow((a + b - c) // 2)
    return new_tree, mat


@dataclass(frozen=True)
class SimState:
    """Sparse amplitudes over (k, two_M) in the coupled basis of one plane tree."""

    tree: CouplingTree
    leaf_spins: tuple[int, ...]
    J: int
    amplitudes: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tree", tree_from(self.tree))
        object.__setattr__(self, "leaf_spins", tuple(self.leaf_spins))
        if len(self.leaf_spins) != self.tree.n + 1:
            raise InputError(f"tree has {self.tree.n + 1} leaves but {len(self.leaf_spins)} spins given")
        allowed = set(self.keys)
        amps = {}
        for (k, M), a in dict(self.amplitudes).items():
            k = tuple(k)
            if k not in allowed:
                raise InputError(f"k assignment {k} is not admissible for this basis")
            if abs(M) > self.J or (self.J - M) % 2:
                raise InputError(f"invalid two_M={M} for two_J={self.J}")
            if a != 0:
                amps[(k, M)] = complex(a)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def keys(self) -> list[tuple[int, ...]]:
        return k_assignments(self.tree, self.leaf_spins, self.J)

    @classmethod
    def basis(cls, tree, leaf_spins, J, k, M) -> "SimState":
        return cls(tree, leaf_spins, J, {(tuple(k), M): 1.0})

    @classmethod
    def from_array(cls, tree, leaf_spins, J, array) -> "SimState":
        """From a (len(keys), 2J+1) array with columns ordered M = +J .. -J."""
        tree = tree_from(tree)
        keys = k_assignments(tree, leaf_spins, J)
        array = np.asarray(array, dtype=complex)
        if array.shape != (len(keys), J + 1):
            raise InputError(f"expected shape {(len(keys), J + 1)}, got {array.shape}")
        amps = {(k, M): array[i, j] for i, k in enumerate(keys) for j, M in enumerate(m_values(J))}
        return cls(tree, leaf_spins, J, amps)

    def to_array(self) -> np.ndarray:
        keys = _index(self.keys)
        out = np.zeros((len(keys), self.J + 1), dtype=complex)
        for (k, M), a in self.amplitudes.items():
            out[keys[k], (self.J - M) // 2] = a
        return out

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    def inner(self, other: "SimState") -> complex:
        """<self|other>; both states must share tree, spins and J."""
        if (self.tree, self.leaf_spins, self.J) != (other.tree, other.leaf_spins, other.J):
            raise InputError("states live in different bases")
        return sum(np.conj(a) * other.amplitudes.get(key, 0) for key, a in self.amplitudes.items())

    def _with_matrix(self, new_tree, mat) -> "SimState":
        return SimState.from_array(new_tree, self.leaf_spins, self.J, mat @ self.to_array())


def apply_racah(s: SimState, node: int, direction: str | None = None) -> SimState:
    """Racah transform at ``node``; the basis tree is rotated there."""
    new_tree, mat = racah_gate(s.tree, s.leaf_spins, s.J, node, direction)
    return s._with_matrix(new_tree, mat)


def apply_phase(s: SimState, node: int) -> SimState:
    """Phase transform at ``node``; its children are swapped."""
    new_tree, mat = phase_gate(s.tree, s.leaf_spins, s.J, node)
    return s._with_matrix(new_tree, mat)


def apply_rotation(s: SimState, rot: RotationSpec, passive: bool = False) -> SimState:
    """Mix M components by D^J: a' = D a, or a' = D^dagger a when ``passive``."""
    D = wigner_D(s.J, rot)
    if passive:
        D = D.conj().T
    return SimState.from_array(s.tree, s.leaf_spins, s.J, s.to_array() @ D.T)


def path_matrix(tree, leaf_spins, J, moves: Sequence[Move]) -> tuple[CouplingTree, np.ndarray]:
    """Compose gate matrices along plane moves (twists and rotations)."""
    tree = tree_from(tree)
    total = np.eye(len(k_assignments(tree, leaf_spins, J)))
    for m in moves:
        if m.type == "twist":
            tree, g = phase_gate(tree, leaf_spins, J, m.node)
        elif m.type == "rotation":
            tree, g = racah_gate(tree, leaf_spins, J, m.node, m.variant)
        else:
            raise GateError(f"unknown move type {m.type!r}")
        total = g @ total
    return tree, total


@lru_cache(maxsize=8)
def _plane_graph(n: int):
    return build_graph(n, "twist_rotation")


def recoupling_matrix(b, b_prime, leaf_spins: Sequence[int], J: int,
                      moves: Sequence[Move] | None = None) -> np.ndarray:
    """Recoupling matrix <b'; k'| b; k> over k_assignments(b') x k_assignments(b).

    Computed as the ordered product of Racah and phase transforms along a
    shortest path in the twist-rotation graph, or along ``moves`` if given.
    """
    b, b_prime = tree_from(b), tree_from(b_prime)
    if sorted(b.leaves) != sorted(b_prime.leaves):
        raise InputError("trees have different leaf sets")
    if len(leaf_spins) != b.n + 1:
        raise InputError(f"expected {b.n + 1} leaf spins, got {len(leaf_spins)}")
    if moves is None:
        moves = [m for m, _ in find_path(_plane_graph(b.n), b, b_prime)]
    end, mat = path_matrix(b, leaf_spins, J, moves)
    if end != b_prime:
        raise InputError("move sequence does not end at the target tree")
    return mat


def product_states(leaf_spins: Sequence[int], M: int) -> list[tuple[int, ...]]:
    """Product states (two_m per leaf label) with total two_M, in descending order."""
    ranges = [m_values(j) for j in leaf_spins]
    return [ms for ms in itertools.product(*ranges) if sum(ms) == M]


def _coupled_vector(node, leaf_spins, spins):
    """Map from (leaf two_m in label order restricted to the subtree) to amplitude."""
    if isinstance(node, int):
        j = leaf_spins[node - 1]
        return {j_m: {((node, j_m),): 1.0} for j_m in m_values(j)}
    left = _coupled_vector(node[0], leaf_spins, spins)
    right = _coupled_vector(node[1], leaf_spins, spins)
    a = spins[frozenset(_leaf_set(node[0]))]
    b = spins[frozenset(_leaf_set(node[1]))]
    c = spins[frozenset(_leaf_set(node))]
    out = {}
    for M in m_values(c):
        vec = {}
        for ma, va in left.items():
            mb = M - ma
            if abs(mb) > b or mb not in right:
                continue
            cg = float(clebsch_gordan(a, ma, b, mb, c, M))
            if not cg:
                continue
            for ka, xa in va.items():
                for kb, xb in right[mb].items():
                    key = ka + kb
                    vec[key] = vec.get(key, 0.0) + cg * xa * xb
        out[M] = vec
    return out


def product_to_coupled(leaf_spins: Sequence[int], tree, J: int, M: int) -> np.ndarray:
    """Matrix from product-state amplitudes to coupled amplitudes at fixed (J, M).

    Rows follow k_assignments(tree), columns :func:`product_states`.
    Row k holds the coefficients <m_1 .. m_{n+1} | tree; k; J M>, real in the
    Condon-Shortley convention, so the rows are orthonormal.
    """
    tree = tree_from(tree)
    if abs(M) > J or (J - M) % 2:
        raise InputError(f"invalid two_M={M} for two_J={J}")
    cols = product_states(leaf_spins, M)
    col_index = _index(cols)
    keys = k_assignments(tree, leaf_spins, J)
    out = np.zeros((len(keys), len(cols)))
    for row, k in enumerate(keys):
        spins = _node_spin_map(tree, leaf_spins, J, k)
        vec = _coupled_vector(tree.root, leaf_spins, spins)[M]
        for key, value in vec.items():
            ms = tuple(m for _, m in sorted(key))
            out[row, col_index[ms]] = value
    return out


def chain_tree(n_leaves: int) -> CouplingTree:
    """Sequential coupling (((1, 2), 3), ...)."""
    root = 1
    for lab in range(2, n_leaves + 1):
        root = (root, lab)
    return CouplingTree(root)


def compose_D_from_spins(leaf_spins: Sequence[int], rot: RotationSpec,
                         kappas: Sequence[int] | None = None) -> np.ndarray:
    """D^{kappa_N} rebuilt from the product of the single-spin matrices.

    The chain kappa_1 = j_1, kappa_2, ..., kappa_N couples spins one at a time
    (default: stretched, kappa_i = j_1 + ... + j_i). The result is
    sum over all m, m' of prod_i C D^{j_i} C, i.e. P^T (D^{j_1} x ... x D^{j_N}) P
    with P the sequential Clebsch-Gordan map.
    """
    leaf_spins = list(leaf_spins)
    if kappas is None:
        kappas = list(itertools.accumulate(leaf_spins))
    kappas = list(kappas)
    if len(kappas) != len(leaf_spins) or kappas[0] != leaf_spins[0]:
        raise InputError("kappa chain must have one entry per spin and start at j_1")
    for i in range(1, len(kappas)):
        if not triangle_ok(kappas[i - 1], leaf_spins[i], kappas[i]):
            raise InputError(f"inadmissible chain step {kappas[i - 1]} x {leaf_spins[i]} -> {kappas[i]}")
    J = kappas[-1]
    if len(leaf_spins) == 1:
        return wigner_D(J, rot)
    tree = chain_tree(len(leaf_spins))
    k = tuple(kappas[1:-1])
    full = np.ones((1, 1), dtype=complex)
    for j in leaf_spins:
        full = np.kron(full, wigner_D(j, rot))
    all_states = list(itertools.product(*[m_values(j) for j in leaf_spins]))
    index = _index(all_states)
    P = np.zeros((len(all_states), J + 1))
    for col, M in enumerate(m_values(J)):
        keys = k_assignments(tree, leaf_spins, J)
        block = product_to_coupled(leaf_spins, tree, J, M)[keys.index(k)]
        for ms, v in zip(product_states(leaf_spins, M), block):
            P[index[ms], col] = v
    return P.T @ full @ P
