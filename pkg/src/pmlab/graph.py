"""Labeled simple graphs stored as adjacency bit rows, plus graph6 I/O."""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

from .config import DEFAULT_LIMITS
from .errors import CapExceeded, Graph6Error, OverlapError

Edge = tuple[int, int]

G6_HEADER = b">>graph6<<"


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Labeled simple graph on ``{0, ..., n-1}``.

    ``rows[u]`` is an integer bitmask; bit ``v`` is set iff ``uv`` is an edge.
    Two graphs are equal iff their row bitmasks agree, i.e. equality is on
    labeled graphs (no isomorphism reduction).
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("need exactly n adjacency rows")
        full = (1 << self.n) - 1
        for u, r in enumerate(self.rows):
            if r & ~full or (r >> u) & 1:
                raise ValueError(f"row {u} has bits outside the vertex set or a loop")
            # symmetry
            m = r
            while m:
                v = (m & -m).bit_length() - 1
                if not (self.rows[v] >> u) & 1:
                    raise ValueError(f"adjacency not symmetric at {u},{v}")
                m &= m - 1

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << u) for u in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, u: int) -> list[int]:
        return [v for v in range(self.n) if (self.rows[u] >> v) & 1]

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> Iterator[Edge]:
        for u, r in enumerate(self.rows):
            m = r >> (u + 1)
            v = u + 1
            while m:
                if m & 1:
                    yield (u, v)
                m >>= 1
                v += 1

    def issubgraph(self, other: Graph) -> bool:
        """True iff every edge of ``self`` is an edge of ``other``."""
        return self.n == other.n and all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges())})"


@dataclass(frozen=True)
class Matching:
    """A set of pairwise vertex-disjoint edges, stored as sorted pairs."""

    edges: frozenset[Edge]

    def __init__(self, edges: Iterable[Sequence[int]]):
        seen: set[int] = set()
        normed = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"matching edge ({u},{v}) is a loop")
            if u in seen or v in seen:
                raise ValueError("matching edges must be vertex-disjoint")
            seen.update((u, v))
            normed.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(normed))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    def vertices(self) -> set[int]:
        return {x for e in self.edges for x in e}

    def is_perfect(self, n: int) -> bool:
        return n % 2 == 0 and len(self.edges) * 2 == n and self.vertices() == set(range(n))

    def as_graph(self, n: int) -> Graph:
        return Graph.from_edges(n, self.edges)


def complement(G: Graph) -> Graph:
    full = (1 << G.n) - 1
    return Graph(G.n, tuple(full & ~r & ~(1 << u) for u, r in enumerate(G.rows)))


def union_with_matching(G: Graph, M: Matching) -> Graph:
    rows = list(G.rows)
    for u, v in M.edges:
        if (rows[u] >> v) & 1:
            raise OverlapError(f"edge ({u},{v}) already in graph")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(G.n, tuple(rows))


def is_regular(G: Graph, d: int) -> bool:
    return all(r.bit_count() == d for r in G.rows)


# -- graph6 -----------------------------------------------------------------


def _encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, ((n >> 12) & 63) + 63, ((n >> 6) & 63) + 63, (n & 63) + 63])
    raise CapExceeded("graph6 size field supports n <= 258047 here")


def encode_graph6(G: Graph, header: bool = False, limits=DEFAULT_LIMITS) -> bytes:
    """Encode ``G`` as a graph6 byte string (no trailing newline)."""
    if G.n > limits.max_vertices:
        raise CapExceeded(f"n={G.n} exceeds vertex cap {limits.max_vertices}")
    bits = []
    for j in range(1, G.n):
        rj = G.rows[j]
        for i in range(j):
            bits.append((rj >> i) & 1)
    bits.extend([0] * (-len(bits) % 6))
    body = bytes(
        63 + int("".join(map(str, bits[k:k + 6])), 2) for k in range(0, len(bits), 6)
    )
    return (G6_HEADER if header else b"") + _encode_n(G.n) + body


def decode_graph6(data: bytes | str, limits=DEFAULT_LIMITS) -> Graph:
    """Decode one graph6 string. Raises :class:`Graph6Error` when malformed."""
    if isinstance(data, str):
        try:
            data = data.encode("ascii")
        except UnicodeEncodeError as exc:
            raise Graph6Error("graph6 must be printable ASCII") from exc
    data = data.strip()
    if data.startswith(G6_HEADER):
        data = data[len(G6_HEADER):]
    if not data:
        raise Graph6Error("empty graph6 string")
    if any(c < 63 or c > 126 for c in data):
        raise Graph6Error("graph6 bytes must lie in 63..126")
    if data[0] == 126:
        if len(data) >= 2 and data[1] == 126:
            raise Graph6Error("8-byte size field not supported")
        if len(data) < 4:
            raise Graph6Error("truncated size field")
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        body = data[4:]
    else:
        n = data[0] - 63
        body = data[1:]
    if n > limits.max_vertices:
        raise CapExceeded(f"n={n} exceeds vertex cap {limits.max_vertices}")
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise Graph6Error(f"expected {(nbits + 5) // 6} data bytes for n={n}, got {len(body)}")
    bits = []
    for c in body:
        x = c - 63
        bits.extend((x >> s) & 1 for s in range(5, -1, -1))
    if any(bits[nbits:]):
        raise Graph6Error("nonzero padding bits")
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return Graph(n, tuple(rows))


def write_graph6_lines(graphs: Iterable[Graph], fh: IO[str]) -> None:
    for G in graphs:
        fh.write(encode_graph6(G).decode("ascii") + "\n")


def read_graph6_lines(fh: IO[str]) -> list[Graph]:
    return [decode_graph6(line) for line in fh if line.strip()]
