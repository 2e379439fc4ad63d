"""Binary coupling trees, their enumeration, local moves and bracket strings.

A tree is stored as nested 2-tuples whose leaves are positive integer labels,
e.g. ``((1, 2), 3)``. Non-leaf nodes are numbered in post-order, so the root
has id ``n - 1`` and the internal (non-root) nodes are ``0 .. n - 2``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .errors import InputError, MoveError, ParseError
from .wigner import triangle_ok

__all__ = [
    "CouplingTree",
    "CATEGORIES",
    "enumerate_trees",
    "count_trees",
    "count_by_shape",
    "rotation_move",
    "twist_move",
    "canonical_nonplane",
    "k_assignments",
    "parse_bracket",
    "format_bracket",
    "shape_of",
]

CATEGORIES = ("plane_unlabeled", "nonplane_unlabeled", "plane_labeled", "nonplane_labeled")


def _leaves(node) -> list[int]:
    if isinstance(node, int):
        return [node]
    return _leaves(node[0]) + _leaves(node[1])


def _internal_nodes(node) -> list:
    """Non-leaf subtrees in post-order."""
    if isinstance(node, int):
        return []
    return _internal_nodes(node[0]) + _internal_nodes(node[1]) + [node]


def _validate(node):
    if isinstance(node, bool):
        raise InputError("leaf labels must be positive integers")
    if isinstance(node, int):
        if node < 1:
            raise InputError(f"leaf labels must be positive integers, got {node}")
        return
    if not isinstance(node, tuple) or len(node) != 2:
        raise InputError(f"every non-leaf node needs exactly two children: {node!r}")
    _validate(node[0])
    _validate(node[1])


@dataclass(frozen=True)
class CouplingTree:
    """A rooted plane binary tree with distinctly labeled leaves.

    Parameters
    ----------
    root : nested tuple
        Leaves are ints; every other node is a pair ``(left, right)``.
    """

    root: object

    def __post_init__(self):
        _validate(self.root)
        if isinstance(self.root, int):
            raise InputError("a coupling tree needs at least two leaves")
        labels = _leaves(self.root)
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate leaf labels in {self.root!r}")

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        """Leaf labels from left to right."""
        return tuple(_leaves(self.root))

    @property
    def n(self) -> int:
        """Number of couplings, i.e. leaf count minus one."""
        return len(self.leaves) - 1

    @cached_property
    def nodes(self) -> tuple:
        """Non-leaf subtrees indexed by post-order node id."""
        return tuple(_internal_nodes(self.root))

    @cached_property
    def clusters(self) -> tuple[frozenset, ...]:
        """Leaf-label set below each node id."""
        return tuple(frozenset(_leaves(x)) for x in self.nodes)

    @property
    def root_id(self) -> int:
        return len(self.nodes) - 1

    @cached_property
    def _paths(self) -> tuple[tuple[int, ...], ...]:
        # child-index path from the root to each node id
        out = []

        def walk(node, path):
            if isinstance(node, int):
                return
            walk(node[0], path + (0,))
            walk(node[1], path + (1,))
            out.append(path)

        walk(self.root, ())
        return tuple(out)

    def path(self, node_id: int) -> tuple[int, ...]:
        self._check_node(node_id)
        return self._paths[node_id]

    def node_id(self, path: Sequence[int]) -> int:
        return self._paths.index(tuple(path))

    def parent(self, node_id: int) -> int | None:
        p = self.path(node_id)
        return None if not p else self.node_id(p[:-1])

    def children(self, node_id: int) -> tuple:
        """Child ids; a leaf child is reported as ``("leaf", label)``."""
        p = self.path(node_id)
        node = self.nodes[node_id]
        return tuple(
            ("leaf", node[i]) if isinstance(node[i], int) else self.node_id(p + (i,))
            for i in (0, 1)
        )

    def _check_node(self, node_id):
        if not isinstance(node_id, int) or not 0 <= node_id < len(self.nodes):
            raise MoveError(f"no non-leaf node with id {node_id!r} (tree has {len(self.nodes)})")

    def replace(self, node_id: int, subtree) -> "CouplingTree":
        return CouplingTree(_replace_at(self.root, self.path(node_id), subtree))

    def __str__(self) -> str:
        return format_bracket(self)


def _replace_at(node, path, subtree):
    if not path:
        return subtree
    i = path[0]
    new = _replace_at(node[i], path[1:], subtree)
    return (new, node[1]) if i == 0 else (node[0], new)


def _as_tree(t) -> CouplingTree:
    return t if isinstance(t, CouplingTree) else CouplingTree(t)


# ----------------------------------------------------------------- moves


def rotation_move(t, node: int, direction: str | None = None) -> CouplingTree:
    """Rotate at non-leaf node ``node`` against its parent.

    ``"right"``: node x = (A B) is the left child of p = (x C); p becomes (A (B C)).
    ``"left"``: node x = (B C) is the right child of p = (A x); p becomes ((A B) C).
    With ``direction=None`` the unique applicable direction is used.

    Examples
    --------
    >>> rotation_move(CouplingTree(((1, 2), 3)), 0).root
    (1, (2, 3))
    """
    t = _as_tree(t)
    path = t.path(node)
    if not path:
        raise MoveError("the root has no parent to rotate against")
    side = path[-1]
    inferred = "right" if side == 0 else "left"
    if direction is None:
        direction = inferred
    if direction not in ("left", "right"):
        raise MoveError(f"unknown rotation direction {direction!r}")
    if direction != inferred:
        raise MoveError(f"node {node} is a {'left' if side == 0 else 'right'} child; "
                        f"a {direction} rotation needs the other position")
    parent_path = path[:-1]
    p = t.nodes[t.node_id(parent_path)]
    if direction == "right":
        (a, b), c = p
        new = (a, (b, c))
    else:
        a, (b, c) = p
        new = ((a, b), c)
    return CouplingTree(_replace_at(t.root, parent_path, new))


def twist_move(t, node: int) -> CouplingTree:
    """Swap the two children of non-leaf node ``node``."""
    t = _as_tree(t)
    t._check_node(node)
    left, right = t.nodes[node]
    return t.replace(node, (right, left))


def _canon(node):
    if isinstance(node, int):
        return node, node
    (l, ml), (r, mr) = _canon(node[0]), _canon(node[1])
    if mr < ml:
        (l, ml), (r, mr) = (r, mr), (l, ml)
    return (l, r), ml


def canonical_nonplane(t) -> CouplingTree:
    """Twist-class representative: children ordered by minimum leaf label."""
    return CouplingTree(_canon(_as_tree(t).root)[0])


# ----------------------------------------------------------------- shapes and counts


def _shape(node):
    """Unlabeled plane shape: leaves replaced by None."""
    if isinstance(node, int):
        return None
    return (_shape(node[0]), _shape(node[1]))


def _shape_key(shape):
    # total order on unlabeled shapes: by size, then recursively
    if shape is None:
        return (1,)
    left, right = _shape_key(shape[0]), _shape_key(shape[1])
    return (left[0] + right[0], left, right)


def _canon_shape(shape):
    if shape is None:
        return None
    a, b = _canon_shape(shape[0]), _canon_shape(shape[1])
    if _shape_key(a) < _shape_key(b):
        a, b = b, a
    return (a, b)


def _label_shape(shape, start=1):
    if shape is None:
        return start, start + 1
    left, nxt = _label_shape(shape[0], start)
    right, nxt = _label_shape(shape[1], nxt)
    return (left, right), nxt


def shape_of(t, plane: bool = False) -> CouplingTree:
    """Unlabeled shape of ``t`` rendered with leaves 1..n+1 from left to right.

    With ``plane=False`` the shape is first brought to a twist-invariant form.
    """
    s = _shape(_as_tree(t).root)
    if not plane:
        s = _canon_shape(s)
    return CouplingTree(_label_shape(s)[0])


@lru_cache(maxsize=None)
def _plane_shapes(leaves: int) -> tuple:
    if leaves == 1:
        return (None,)
    out = []
    for k in range(1, leaves):
        for a in _plane_shapes(k):
            for b in _plane_shapes(leaves - k):
                out.append((a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def _nonplane_shapes(leaves: int) -> tuple:
    if leaves == 1:
        return (None,)
    out = []
    for k in range((leaves + 1) // 2, leaves):
        big, small = _nonplane_shapes(k), _nonplane_shapes(leaves - k)
        for i, a in enumerate(big):
            for j, b in enumerate(small):
                if k == leaves - k and j > i:
                    continue
                out.append((a, b))
    return tuple(out)


def _nonplane_labeled(labels: tuple) -> Iterator:
    """Twist-canonical labeled trees: the block with the smallest label goes left."""
    if len(labels) == 1:
        yield labels[0]
        return
    first, rest = labels[0], labels[1:]
    for r in range(0, len(rest)):
        for combo in itertools.combinations(rest, r):
            left = (first,) + combo
            right = tuple(x for x in rest if x not in combo)
            for a in _nonplane_labeled(left):
                for b in _nonplane_labeled(right):
                    yield (a, b)


def _relabel(shape, labels):
    it = iter(labels)

    def walk(s):
        if s is None:
            return next(it)
        return (walk(s[0]), walk(s[1]))

    return walk(shape)


def enumerate_trees(n: int, category: str) -> Iterator[CouplingTree]:
    """Lazily enumerate the trees with n+1 leaves in one of the four categories.

    Unlabeled shapes are rendered with leaves 1..n+1 from left to right;
    non-plane classes are yielded as their :func:`canonical_nonplane` form.
    """
    _check_n(n)
    if category == "plane_unlabeled":
        for s in _plane_shapes(n + 1):
            yield CouplingTree(_label_shape(s)[0])
    elif category == "nonplane_unlabeled":
        for s in _nonplane_shapes(n + 1):
            yield CouplingTree(_label_shape(s)[0])
    elif category == "plane_labeled":
        for s in _plane_shapes(n + 1):
            for perm in itertools.permutations(range(1, n + 2)):
                yield CouplingTree(_relabel(s, perm))
    elif category == "nonplane_labeled":
        for root in _nonplane_labeled(tuple(range(1, n + 2))):
            yield CouplingTree(root)
    else:
        raise InputError(f"unknown category {category!r}; expected one of {CATEGORIES}")


@lru_cache(maxsize=None)
def _wedderburn_etherington(m: int) -> int:
    # number of unlabeled non-plane binary trees with m leaves
    if m <= 1:
        return m
    total = 0
    for k in range(1, (m + 1) // 2):
        total += _wedderburn_etherington(k) * _wedderburn_etherington(m - k)
    if m % 2 == 0:
        w = _wedderburn_etherington(m // 2)
        total += w * (w + 1) // 2
    return total


def count_trees(n: int, category: str) -> int:
    """Closed-form counts: Catalan, Wedderburn-Etherington, double and quadruple factorial."""
    _check_n(n)
    if category == "plane_unlabeled":
        return math.comb(2 * n, n) // (n + 1)
    if category == "nonplane_unlabeled":
        return _wedderburn_etherington(n + 1)
    if category == "plane_labeled":
        return math.factorial(2 * n) // math.factorial(n)
    if category == "nonplane_labeled":
        return math.prod(range(1, 2 * n, 2))
    raise InputError(f"unknown category {category!r}; expected one of {CATEGORIES}")


def _automorphisms(shape) -> int:
    if shape is None:
        return 1
    a, b = shape
    sym = 2 if _canon_shape(a) == _canon_shape(b) else 1
    return sym * _automorphisms(a) * _automorphisms(b)


def count_by_shape(n: int) -> dict[str, int]:
    """Number of labeled non-plane decorations of each unlabeled non-plane shape.

    Keys are bracket strings of :func:`shape_of` representatives. A shape with
    automorphism group of order 2^s admits (n+1)!/2^s decorations.
    """
    _check_n(n)
    out = {}
    for s in _nonplane_shapes(n + 1):
        key = format_bracket(CouplingTree(_label_shape(s)[0]))
        out[key] = math.factorial(n + 1) // _automorphisms(s)
    return out


def _check_n(n):
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer (n=0 has no coupling), got {n!r}")


# ----------------------------------------------------------------- intermediate spins


def _spin_of(leaf_spins, label):
    try:
        return leaf_spins[label - 1]
    except IndexError:
        raise InputError(f"no spin given for leaf {label}") from None


def k_assignments(t, leaf_spins: Sequence[int], J: int) -> list[tuple[int, ...]]:
    """All admissible intermediate spins (two_k) for the internal nodes, in post-order.

    ``leaf_spins[i]`` is two_j of the leaf labeled ``i + 1``. The result is
    sorted lexicographically and is empty when J cannot be reached.

    Examples
    --------
    >>> k_assignments(CouplingTree(((1, 2), 3)), [1, 1, 1], 1)
    [(0,), (2,)]
    """
    t = _as_tree(t)
    if len(leaf_spins) != t.n + 1:
        raise InputError(f"expected {t.n + 1} leaf spins, got {len(leaf_spins)}")
    for s in leaf_spins:
        if not isinstance(s, int) or s < 0:
            raise InputError(f"leaf spins must be non-negative two_j ints, got {s!r}")

    def walk(node, is_root):
        # map: spin of this subtree -> list of assignment tuples for its internal nodes
        if isinstance(node, int):
            return {_spin_of(leaf_spins, node): [()]}
        left, right = walk(node[0], False), walk(node[1], False)
        out: dict[int, list] = {}
        for a, la in left.items():
            for b, lb in right.items():
                for k in range(abs(a - b), a + b + 1, 2):
                    if is_root and k != J:
                        continue
                    tail = () if is_root else (k,)
                    bucket = out.setdefault(k, [])
                    for x in la:
                        for y in lb:
                            bucket.append(x + y + tail)
        return out

    return sorted(walk(t.root, True).get(J, []))


def node_spins(t: CouplingTree, leaf_spins, J: int, k: Sequence[int]) -> tuple[int, ...]:
    """two_j of every non-leaf node (post-order), root included."""
    return tuple(k) + (J,)


def child_spins(t: CouplingTree, leaf_spins, J: int, k: Sequence[int], node_id: int):
    """(left, right, own) spins at a non-leaf node."""
    spins = node_spins(t, leaf_spins, J, k)
    out = []
    for c in t.children(node_id):
        out.append(_spin_of(leaf_spins, c[1]) if isinstance(c, tuple) else spins[c])
    return out[0], out[1], spins[node_id]


def is_admissible(t: CouplingTree, leaf_spins, J: int, k: Sequence[int]) -> bool:
    return len(k) == t.n - 1 and all(
        triangle_ok(*child_spins(t, leaf_spins, J, k, i)) for i in range(t.n)
    )


# ----------------------------------------------------------------- bracket strings


def format_bracket(t, spins: Sequence[int] | None = None) -> str:
    """Render as ``"((1,2),3)"``; with ``spins`` each leaf gets a ``=two_j`` suffix."""
    t = _as_tree(t)

    def walk(node):
        if isinstance(node, int):
            return f"{node}={_spin_of(spins, node)}" if spins is not None else str(node)
        return f"({walk(node[0])},{walk(node[1])})"

    return walk(t.root)


def parse_bracket(text: str) -> tuple[CouplingTree, list[int] | None]:
    """Parse a fully parenthesized binary bracket string.

    Returns the tree and, if every leaf carries a ``=two_j`` suffix, the
    spin list indexed by label (else ``None``). Whitespace is ignored.

    Raises
    ------
    ParseError
        With the 0-based offending position.
    """
    pos = 0
    spins: dict[int, int] = {}
    seen: set[int] = set()

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def expect(ch):
        nonlocal pos
        skip()
        if pos >= len(text) or text[pos] != ch:
            got = text[pos] if pos < len(text) else "end of input"
            raise ParseError(f"expected {ch!r}, got {got!r}", position=pos)
        pos += 1

    def number():
        nonlocal pos
        skip()
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            got = text[pos] if pos < len(text) else "end of input"
            raise ParseError(f"expected a leaf label or '(', got {got!r}", position=pos)
        return int(text[start:pos]), start

    def node():
        nonlocal pos
        skip()
        if pos < len(text) and text[pos] == "(":
            pos += 1
            left = node()
            expect(",")
            right = node()
            skip()
            if pos < len(text) and text[pos] == ",":
                raise ParseError("non-binary grouping: more than two children", position=pos)
            expect(")")
            return (left, right)
        label, start = number()
        if label < 1:
            raise ParseError("leaf labels must be positive", position=start)
        if label in seen:
            raise ParseError(f"duplicate leaf label {label}", position=start)
        seen.add(label)
        skip()
        if pos < len(text) and text[pos] == "=":
            pos += 1
            spins[label], _ = number()
        return label

    root = node()
    skip()
    if pos != len(text):
        raise ParseError(f"unexpected trailing input {text[pos]!r}", position=pos)
    if isinstance(root, int):
        raise ParseError("a tree needs at least one pair", position=0)
    labels = sorted(seen)
    if labels != list(range(1, len(labels) + 1)):
        raise ParseError(f"leaf labels must be 1..{len(labels)}, got {labels}", position=0)
    if spins and len(spins) != len(labels):
        raise ParseError("either every leaf or no leaf carries a spin", position=0)
    tree = CouplingTree(root)
    return tree, ([spins[i] for i in labels] if spins else None)


def tree_from(obj) -> CouplingTree:
    """Accept a CouplingTree, nested tuple or bracket string."""
    if isinstance(obj, CouplingTree):
        return obj
    if isinstance(obj, str):
        return parse_bracket(obj)[0]
    return CouplingTree(obj)


def tensor_multiplicity(leaf_spins: Sequence[int]) -> Counter:
    """Multiplicity of each total two_J in the tensor product of the given spins."""
    mult = Counter({leaf_spins[0]: 1})
    for s in leaf_spins[1:]:
        nxt = Counter()
        for j, m in mult.items():
            for k in range(abs(j - s), j + s + 1, 2):
                nxt[k] += m
        mult = nxt
    return mult
