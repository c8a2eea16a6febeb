"""Labeled loop-free graphs whose vertices sit on a p x q array.

Vertices are 1-based pairs ``(k, l)`` (row k, column l). The flat index is
row-major, ``(k - 1) * q + l``, so vertex ``(k, l)`` is the basis vector
``|u_k> (x) |w_l>`` of the p*q dimensional product space.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyEdgeSet, LoopEdge, NotABijection, OutOfBounds, ParseError
from .linalg import RationalSymmetricMatrix

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

ROW_LOCAL = "row-local"
COLUMN_LOCAL = "column-local"
CROSS = "cross"


def vertex_index(k: int, l: int, q: int, p: int | None = None) -> int:
    """1-based row-major index of vertex (k, l)."""
    if k < 1 or l < 1 or l > q or (p is not None and k > p):
        raise OutOfBounds(f"vertex ({k},{l}) outside the array")
    return (k - 1) * q + l


def vertex_at(index: int, q: int, p: int | None = None) -> Vertex:
    """Inverse of :func:`vertex_index`."""
    if index < 1 or (p is not None and index > p * q):
        raise OutOfBounds(f"index {index} outside the array")
    k, l = divmod(index - 1, q)
    return (k + 1, l + 1)


def _canonical_edge(a: Vertex, b: Vertex, q: int) -> Edge:
    return (a, b) if vertex_index(*a, q) < vertex_index(*b, q) else (b, a)


@dataclass(frozen=True)
class ArrayedGraph:
    """A graph on the p x q vertex array.

    ``edges`` is normalized to a frozenset of canonical pairs, each with the
    lower-indexed endpoint first. Isolated vertices are allowed; an empty
    edge set is not.
    """

    p: int
    q: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise OutOfBounds("array dimensions must be positive")
        canon = set()
        for edge in self.edges:
            a, b = (tuple(v) for v in edge)
            for k, l in (a, b):
                if not (1 <= k <= self.p and 1 <= l <= self.q):
                    raise OutOfBounds(f"vertex ({k},{l}) outside the {self.p}x{self.q} array")
            if a == b:
                raise LoopEdge(f"loop at vertex {a}")
            canon.add(_canonical_edge(a, b, self.q))
        if not canon:
            raise EmptyEdgeSet("a graph needs at least one edge")
        object.__setattr__(self, "edges", frozenset(canon))

    @property
    def n(self) -> int:
        return self.p * self.q

    def index(self, v: Vertex) -> int:
        return vertex_index(v[0], v[1], self.q, self.p)

    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=lambda e: (self.index(e[0]), self.index(e[1]))))

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for a, b in self.edges:
            deg[self.index(a) - 1] += 1
            deg[self.index(b) - 1] += 1
        return tuple(deg)

    @property
    def degree_sum(self) -> int:
        return 2 * len(self.edges)

    def __repr__(self) -> str:
        return f"ArrayedGraph({self.p}, {self.q}, {list(self.sorted_edges())})"


def build_graph(p: int, q: int, edges: Iterable[Sequence[Vertex]]) -> ArrayedGraph:
    return ArrayedGraph(p, q, frozenset(tuple(tuple(v) for v in e) for e in edges))


def adjacency_matrix(g: ArrayedGraph) -> RationalSymmetricMatrix:
    entries = {(g.index(a) - 1, g.index(b) - 1): 1 for a, b in g.edges}
    return RationalSymmetricMatrix.from_entries(g.n, entries)


def degree_matrix(g: ArrayedGraph) -> RationalSymmetricMatrix:
    return RationalSymmetricMatrix.from_entries(g.n, {(i, i): d for i, d in enumerate(g.degrees())})


def laplacian(g: ArrayedGraph) -> RationalSymmetricMatrix:
    entries = {(i, i): d for i, d in enumerate(g.degrees())}
    for a, b in g.edges:
        entries[g.index(a) - 1, g.index(b) - 1] = -1
    return RationalSymmetricMatrix.from_entries(g.n, entries)


def density_matrix(g: ArrayedGraph) -> RationalSymmetricMatrix:
    return laplacian(g).scale(Fraction(1, g.degree_sum))


def partner(edge: Edge, q: int) -> Edge:
    """Swap the column coordinates across ``edge``."""
    (i, j), (k, l) = edge
    return _canonical_edge((i, l), (k, j), q)


def partial_transpose_graph(g: ArrayedGraph) -> ArrayedGraph:
    return ArrayedGraph(g.p, g.q, frozenset(partner(e, g.q) for e in g.edges))


def locality(edge: Edge) -> str:
    (i, j), (k, l) = edge
    if i == k:
        return ROW_LOCAL
    if j == l:
        return COLUMN_LOCAL
    return CROSS


@dataclass(frozen=True)
class EdgeClass:
    locality: str
    matched: bool
    partner: Edge

    @property
    def separable(self) -> bool:
        return self.locality != CROSS


@dataclass(frozen=True)
class EdgeClassification:
    classes: dict
    n1: int
    n2: int

    def matched_edges(self) -> list[Edge]:
        return [e for e, c in self.classes.items() if c.matched]

    def unmatched_edges(self) -> list[Edge]:
        return [e for e, c in self.classes.items() if not c.matched]


def classify_edges(g: ArrayedGraph) -> EdgeClassification:
    classes = {}
    for e in g.sorted_edges():
        mate = partner(e, g.q)
        classes[e] = EdgeClass(locality(e), mate in g.edges, mate)
    n1 = sum(c.matched for c in classes.values())
    return EdgeClassification(classes, n1, len(classes) - n1)


def apply_vertex_permutation(g: ArrayedGraph, perm: Sequence[int]) -> ArrayedGraph:
    """Relabel vertex index i as ``perm[i - 1]`` (1-based images).

    With P[i, perm(i)] = 1, the adjacency matrices satisfy
    ``P^T M(g) P == M(result)``.
    """
    n = g.n
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise NotABijection(f"not a permutation of 1..{n}")
    relabel = {vertex_at(i, g.q): vertex_at(perm[i - 1], g.q) for i in range(1, n + 1)}
    return ArrayedGraph(g.p, g.q, frozenset((relabel[a], relabel[b]) for a, b in g.edges))


def swap_factors(g: ArrayedGraph) -> ArrayedGraph:
    """The same graph seen from the other factor: (k, l) on p x q becomes (l, k) on q x p."""
    return ArrayedGraph(g.q, g.p, frozenset(((a[1], a[0]), (b[1], b[0])) for a, b in g.edges))


# ------------------------------------------------------- bitmask encoding


@functools.lru_cache(maxsize=None)
def vertex_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """All pairs a < b of 1-based indices in lexicographic order; bit t is pair t."""
    return tuple((a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1))


@functools.lru_cache(maxsize=None)
def _pair_bit(n: int) -> dict:
    return {pair: t for t, pair in enumerate(vertex_pairs(n))}


def to_bitmask(g: ArrayedGraph) -> int:
    bits = _pair_bit(g.n)
    mask = 0
    for a, b in g.edges:
        mask |= 1 << bits[g.index(a), g.index(b)]
    return mask


def from_bitmask(p: int, q: int, mask: int) -> ArrayedGraph:
    pairs = vertex_pairs(p * q)
    if mask < 0 or mask >> len(pairs):
        raise OutOfBounds(f"bitmask {mask:x} has bits beyond the {len(pairs)} vertex pairs")
    edges = [
        (vertex_at(a, q), vertex_at(b, q)) for t, (a, b) in enumerate(pairs) if mask >> t & 1
    ]
    return build_graph(p, q, edges)


def graph_id(g: ArrayedGraph) -> str:
    return format(to_bitmask(g), "x")


# ------------------------------------------------------- edge-list text


def parse_edge_list(text: str) -> ArrayedGraph:
    """Parse ``"p q"`` followed by ``"k1 l1 k2 l2"`` lines; ``#`` starts a comment."""
    header = None
    edges: list[Edge] = []
    seen: set[frozenset] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"expected integers, got {line!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise ParseError("header must be 'p q'", lineno)
            header = nums
            continue
        if len(nums) != 4:
            raise ParseError("edge line must be 'k1 l1 k2 l2'", lineno)
        a, b = (nums[0], nums[1]), (nums[2], nums[3])
        p, q = header
        for k, l in (a, b):
            if not (1 <= k <= p and 1 <= l <= q):
                raise OutOfBounds(f"line {lineno}: vertex ({k},{l}) outside the {p}x{q} array")
        if a == b:
            raise LoopEdge(f"line {lineno}: loop at vertex {a}")
        key = frozenset((a, b))
        if key in seen:
            warnings.warn(f"line {lineno}: duplicate edge {a}-{b} ignored", stacklevel=2)
            continue
        seen.add(key)
        edges.append((a, b))
    if header is None:
        raise ParseError("missing 'p q' header")
    return build_graph(header[0], header[1], edges)


def format_edge_list(g: ArrayedGraph) -> str:
    lines = [f"{g.p} {g.q}"]
    lines += [f"{a[0]} {a[1]} {b[0]} {b[1]}" for a, b in g.sorted_edges()]
    return "\n".join(lines) + "\n"
