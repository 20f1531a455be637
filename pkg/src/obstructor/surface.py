"""Triangulated closed surfaces: parsing, validation and basic invariants."""

from __future__ import annotations

import hashlib
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from math import isqrt
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int]
Triangle = tuple[int, int, int]


class SurfaceError(ValueError):
    """Base class for invalid input triangulations."""


class ParseError(SurfaceError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateTriangle(SurfaceError):
    def __init__(self, triangle: Triangle):
        super().__init__(f"duplicate triangle {label(triangle)}")
        self.triangle = triangle


class EdgeNotInTwoTriangles(SurfaceError):
    def __init__(self, edge: Edge, count: int):
        super().__init__(f"edge {label(edge)} lies in {count} triangle(s), expected 2")
        self.edge = edge
        self.count = count


class LinkNotSingleCycle(SurfaceError):
    def __init__(self, vertex: int):
        super().__init__(f"link of vertex {vertex} is not a single cycle")
        self.vertex = vertex


class DisconnectedSurface(SurfaceError):
    def __init__(self, component: Sequence[Triangle]):
        super().__init__(
            f"triangles do not form a connected surface; "
            f"component of {label(component[0])} has {len(component)} triangle(s)"
        )
        self.component = tuple(component)


def label(simplex: Iterable[int]) -> str:
    """Compact vertex-string label, ``56`` or ``5-12`` once labels exceed 9."""
    vs = list(simplex)
    if all(0 <= v < 10 for v in vs):
        return "".join(str(v) for v in vs)
    return "-".join(str(v) for v in vs)


@dataclass(frozen=True)
class TriangleList:
    """Raw triangles in input order, validated for degeneracy and duplicates."""

    triangles: tuple[Triangle, ...]

    def __len__(self) -> int:
        return len(self.triangles)

    def __iter__(self):
        return iter(self.triangles)


def _validated(triples: list[tuple[Triangle, int, int]]) -> TriangleList:
    seen: dict[frozenset, Triangle] = {}
    for tri, line, col in triples:
        if any(v <= 0 for v in tri):
            raise ParseError(f"vertex labels must be positive, got {tri}", line, col)
        if len(set(tri)) != 3:
            raise ParseError(f"degenerate triangle {tri}", line, col)
        key = frozenset(tri)
        if key in seen:
            raise DuplicateTriangle(tuple(sorted(tri)))
        seen[key] = tri
    return TriangleList(tuple(t for t, _, _ in triples))


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


_LUTZ_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|([+-]?\d+)|(\S))")


def parse_lutz(text: str) -> TriangleList:
    """Parse the catalog face-list format ``[[1,2,3],[1,2,4],...]``.

    Leading ``name=`` text before the outer bracket and anything after the
    matching closing bracket are ignored.
    """
    start = text.find("[")
    if start < 0:
        raise ParseError("no '[' found", *_position(text, len(text)))
    pos = start
    depth = 0
    triples: list[tuple[Triangle, int, int]] = []
    current: list[int] = []
    current_at = start
    expect_value = False
    while True:
        m = _LUTZ_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected end of input", *_position(text, len(text)))
        at = m.start(m.lastindex)
        open_, close, comma, number, junk = m.groups()
        pos = m.end()
        if junk is not None:
            raise ParseError(f"unexpected character {junk!r}", *_position(text, at))
        if open_:
            depth += 1
            if depth > 2:
                raise ParseError("brackets nested too deeply", *_position(text, at))
            if depth == 2:
                current = []
                current_at = at
            expect_value = depth == 2
        elif close:
            if depth == 2:
                if len(current) != 3:
                    raise ParseError(
                        f"expected 3 vertices, got {len(current)}", *_position(text, current_at)
                    )
                triples.append((tuple(current), *_position(text, current_at)))
            depth -= 1
            if depth == 0:
                break
        elif comma:
            if depth == 2 and expect_value:
                raise ParseError("empty entry", *_position(text, at))
            expect_value = depth == 2
        else:
            if depth != 2:
                raise ParseError(f"integer {number} outside a triangle", *_position(text, at))
            current.append(int(number))
            expect_value = False
    if not triples:
        raise ParseError("no triangles", *_position(text, start))
    return _validated(triples)


def parse_plain(text: str) -> TriangleList:
    """Parse one ``i j k`` triangle per line; ``#`` starts a comment."""
    triples: list[tuple[Triangle, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]
        if not tokens:
            continue
        if len(tokens) != 3:
            raise ParseError(f"expected 3 vertices, got {len(tokens)}", lineno, tokens[0][1])
        values = []
        for tok, col in tokens:
            if not re.fullmatch(r"[+-]?\d+", tok):
                raise ParseError(f"non-integer token {tok!r}", lineno, col)
            values.append(int(tok))
        triples.append((tuple(values), lineno, tokens[0][1]))
    if not triples:
        raise ParseError("no triangles", 1, 1)
    return _validated(triples)


def parse_triangulation(text: str) -> TriangleList:
    """Dispatch on content: bracketed catalog format or plain lines."""
    if "[" in text:
        return parse_lutz(text)
    return parse_plain(text)


@dataclass(frozen=True, eq=False)
class SimplicialSurface:
    """A validated triangulation of a closed connected surface.

    All simplices are tuples of original vertex labels in ascending order.
    ``links[v]`` is the cyclic sequence of neighbours of ``v`` in fan order.
    """

    vertices: tuple[int, ...]
    triangles: tuple[Triangle, ...]
    edges: tuple[Edge, ...]
    edge_to_triangles: Mapping[Edge, tuple[Triangle, Triangle]] = field(repr=False)
    links: Mapping[int, tuple[int, ...]] = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def f_vector(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.triangles)

    @property
    def index(self) -> dict[int, int]:
        """Dense 0-based index of each vertex label."""
        return {v: i for i, v in enumerate(self.vertices)}

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edge_to_triangles

    def has_triangle(self, a: int, b: int, c: int) -> bool:
        return tuple(sorted((a, b, c))) in self._triangle_set

    @property
    def _triangle_set(self) -> frozenset:
        cached = self.__dict__.get("_tset")
        if cached is None:
            cached = frozenset(self.triangles)
            object.__setattr__(self, "_tset", cached)
        return cached

    def canonical_bytes(self) -> bytes:
        return "".join(f"{a} {b} {c}\n" for a, b, c in self.triangles).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()


def edge_of(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def triangle_edges(t: Triangle) -> tuple[Edge, Edge, Edge]:
    a, b, c = t
    return (a, b), (a, c), (b, c)


def build_surface(tris: TriangleList | Iterable[Sequence[int]]) -> SimplicialSurface:
    raw = [tuple(t) for t in tris]
    triangles = sorted({tuple(sorted(t)) for t in raw})
    if not triangles:
        raise SurfaceError("empty triangle list")
    if len(raw) != len(triangles):
        seen = set()
        for t in raw:
            key = tuple(sorted(t))
            if key in seen:
                raise DuplicateTriangle(key)
            seen.add(key)
    for t in triangles:
        if len(set(t)) != 3:
            raise SurfaceError(f"degenerate triangle {t}")

    incident: dict[Edge, list[Triangle]] = defaultdict(list)
    for t in triangles:
        for e in triangle_edges(t):
            incident[e].append(t)
    for e in sorted(incident):
        if len(incident[e]) != 2:
            raise EdgeNotInTwoTriangles(e, len(incident[e]))

    star: dict[int, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
    for a, b, c in triangles:
        for v, x, y in ((a, b, c), (b, a, c), (c, a, b)):
            star[v][x].append(y)
            star[v][y].append(x)
    links: dict[int, tuple[int, ...]] = {}
    for v in sorted(star):
        adj = star[v]
        first = min(adj)
        cycle = [first]
        prev, cur = None, first
        while True:
            nxt = [u for u in sorted(adj[cur]) if u != prev]
            step = nxt[0]
            if step == first:
                break
            if step in cycle:
                raise LinkNotSingleCycle(v)
            cycle.append(step)
            prev, cur = cur, step
        if len(cycle) != len(adj):
            raise LinkNotSingleCycle(v)
        links[v] = tuple(cycle)

    # dual-graph connectivity
    seen = {triangles[0]}
    queue = deque([triangles[0]])
    while queue:
        t = queue.popleft()
        for e in triangle_edges(t):
            for u in incident[e]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    if len(seen) != len(triangles):
        raise DisconnectedSurface(sorted(seen))

    edges = tuple(sorted(incident))
    return SimplicialSurface(
        vertices=tuple(sorted(links)),
        triangles=tuple(triangles),
        edges=edges,
        edge_to_triangles={e: tuple(incident[e]) for e in edges},
        links=links,
    )


def vertex_link(s: SimplicialSurface, v: int) -> tuple[int, ...]:
    try:
        return s.links[v]
    except KeyError:
        raise KeyError(f"unknown vertex {v}") from None


@dataclass(frozen=True)
class SurfaceInfo:
    euler_characteristic: int
    orientable: bool
    genus: int
    neighborly: bool
    f_vector: tuple[int, int, int]

    def summary(self) -> str:
        v, e, f = self.f_vector
        kind = "orientable g" if self.orientable else "non-orientable h"
        text = f"V={v} E={e} F={f} χ={self.euler_characteristic} {kind}={self.genus}"
        if self.neighborly:
            text += " neighborly"
        return text


def _edge_direction(t: Triangle, sign: int, e: Edge) -> int:
    """+1 if the oriented triangle traverses ``e`` as (low, high), else -1."""
    a, b, c = t
    cyc = (a, b, c) if sign > 0 else (a, c, b)
    for i in range(3):
        if (cyc[i], cyc[(i + 1) % 3]) == e:
            return 1
    return -1


def orient(s: SimplicialSurface) -> dict[Triangle, int] | None:
    """Consistent orientation signs by dual-graph traversal, or None."""
    signs = {s.triangles[0]: 1}
    queue = deque([s.triangles[0]])
    while queue:
        t = queue.popleft()
        for e in triangle_edges(t):
            t1, t2 = s.edge_to_triangles[e]
            u = t2 if t1 == t else t1
            want = -_edge_direction(t, signs[t], e)
            sign_u = 1 if _edge_direction(u, 1, e) == want else -1
            if u in signs:
                if signs[u] != sign_u:
                    return None
            else:
                signs[u] = sign_u
                queue.append(u)
    return signs


def surface_info(s: SimplicialSurface) -> SurfaceInfo:
    v, e, f = s.f_vector
    chi = v - e + f
    orientable = orient(s) is not None
    genus = (2 - chi) // 2 if orientable else 2 - chi
    return SurfaceInfo(
        euler_characteristic=chi,
        orientable=orientable,
        genus=genus,
        neighborly=e == v * (v - 1) // 2,
        f_vector=(v, e, f),
    )


def heawood_minimum(chi: int) -> int:
    """Least vertex count admitted by the Heawood bound for Euler characteristic ``chi``."""
    if chi > 2:
        raise ValueError("Euler characteristic of a closed surface is at most 2")
    disc = 49 - 24 * chi
    root = isqrt(disc)
    if root * root != disc:
        root += 1
    # smallest n with 2n - 7 >= ceil(sqrt(disc))
    return (8 + root) // 2


def load_surface(text: str) -> SimplicialSurface:
    return build_surface(parse_triangulation(text))
