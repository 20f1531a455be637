"""Orientation character of edge cycles and the GF(2) cycle space.

Two independent routes compute whether an edge cycle is orientation-reversing:

* :func:`is_orientation_reversing` walks along the cycle and carries a side
  marker from one vertex link to the next (band walk);
* :func:`lift_reverses` lifts the cycle to the orientation double cover and
  checks whether the lift closes up.

The engine relies on the band walk through :func:`fundamental_cycle_basis`;
tests and the certificate verifier use the double cover.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .surface import Edge, SimplicialSurface, Triangle, edge_of, triangle_edges


class CycleError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class EdgeCycle:
    """A simple closed edge path, stored as its canonical vertex sequence."""

    vertices: tuple[int, ...]

    @classmethod
    def of(cls, seq: Sequence[int]) -> "EdgeCycle":
        return cls(canonical_cycle(seq))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return cycle_edges(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.vertices) + ")"


def canonical_cycle(seq: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation or reflection of ``seq``."""
    seq = tuple(seq)
    k = len(seq)
    best = None
    for s in (seq, seq[::-1]):
        for i in range(k):
            cand = s[i:] + s[:i]
            if best is None or cand < best:
                best = cand
    return best


def cycle_edges(seq: Sequence[int]) -> tuple[Edge, ...]:
    k = len(seq)
    return tuple(edge_of(seq[i], seq[(i + 1) % k]) for i in range(k))


def _check_cycle(s: SimplicialSurface, seq: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(seq)
    if len(seq) < 3:
        raise CycleError(f"cycle {seq} has fewer than 3 vertices")
    if len(set(seq)) != len(seq):
        raise CycleError(f"cycle {seq} is not simple")
    for a, b in zip(seq, seq[1:] + seq[:1]):
        if not s.has_edge(a, b):
            raise CycleError(f"{a}{b} is not an edge of the surface")
    return seq


def _link_neighbours(link: tuple[int, ...], u: int) -> tuple[int, int]:
    i = link.index(u)
    return link[i - 1], link[(i + 1) % len(link)]


def _walk_arc(link: tuple[int, ...], start: int, toward: int, stop: int) -> int:
    """Walk the link from ``start`` via ``toward`` until ``stop``; return the vertex before ``stop``."""
    prev, cur = start, toward
    while cur != stop:
        a, b = _link_neighbours(link, cur)
        prev, cur = cur, (b if a == prev else a)
    return prev


def is_orientation_reversing(s: SimplicialSurface, cycle: EdgeCycle | Sequence[int]) -> int:
    """Band walk: 1 if a neighbourhood of the cycle is a Möbius band, else 0."""
    seq = _check_cycle(s, cycle.vertices if isinstance(cycle, EdgeCycle) else cycle)
    k = len(seq)
    v0, last = seq[0], seq[-1]
    toward0 = min(_link_neighbours(s.links[v0], last))
    toward = toward0
    for i in range(k):
        v, p, n = seq[i], seq[i - 1], seq[(i + 1) % k]
        a = _walk_arc(s.links[v], p, toward, n)
        # the marker sits in triangle (v, a, n); at n it lies on a's side of v
        toward = a
    # ``toward`` is now the side entered at v0 coming from the last vertex
    return int(toward != toward0)


@dataclass(frozen=True)
class DoubleCover:
    """Orientation double cover: sheet 0 carries each triangle's reference
    orientation (ascending vertex order), sheet 1 the opposite one."""

    flips: dict[Edge, int]
    adjacency: dict[tuple[Triangle, int], tuple[tuple[Triangle, int], ...]]
    n_components: int

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    @property
    def n_triangles(self) -> int:
        return len(self.adjacency)

    def euler_characteristic(self) -> int:
        n_tri = len(self.adjacency)
        n_edges = 3 * n_tri // 2
        # cover vertices over v = components of the lifted star of v
        n_vert = 0
        base_vertices = sorted({v for t, _ in self.adjacency for v in t})
        for v in base_vertices:
            nodes = [node for node in self.adjacency if v in node[0]]
            seen: set = set()
            for node in nodes:
                if node in seen:
                    continue
                n_vert += 1
                stack = [node]
                seen.add(node)
                while stack:
                    t, sheet = stack.pop()
                    for e in triangle_edges(t):
                        if v not in e:
                            continue
                        for u, sheet_u in self.adjacency[(t, sheet)]:
                            if e[0] in u and e[1] in u and (u, sheet_u) not in seen:
                                seen.add((u, sheet_u))
                                stack.append((u, sheet_u))
        return n_vert - n_edges + n_tri


def _reference_direction(t: Triangle, e: Edge) -> int:
    a, b, c = t
    for x, y in ((a, b), (b, c), (c, a)):
        if (x, y) == e:
            return 1
    return -1


def orientation_double_cover(s: SimplicialSurface) -> DoubleCover:
    flips: dict[Edge, int] = {}
    for e, (t, u) in s.edge_to_triangles.items():
        # reference orientations agree across e iff they traverse e oppositely
        flips[e] = int(_reference_direction(t, e) == _reference_direction(u, e))
    adjacency: dict[tuple[Triangle, int], tuple[tuple[Triangle, int], ...]] = {}
    for t in s.triangles:
        for sheet in (0, 1):
            nbrs = []
            for e in triangle_edges(t):
                t1, t2 = s.edge_to_triangles[e]
                u = t2 if t1 == t else t1
                nbrs.append((u, sheet ^ flips[e]))
            adjacency[(t, sheet)] = tuple(nbrs)
    seen: set = set()
    components = 0
    for node in adjacency:
        if node in seen:
            continue
        components += 1
        seen.add(node)
        queue = deque([node])
        while queue:
            cur = queue.popleft()
            for nxt in adjacency[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return DoubleCover(flips=flips, adjacency=adjacency, n_components=components)


def _star(s: SimplicialSurface, v: int) -> list[Triangle]:
    link = s.links[v]
    m = len(link)
    return [tuple(sorted((v, link[j], link[(j + 1) % m]))) for j in range(m)]


def lift_reverses(
    s: SimplicialSurface, cycle: EdgeCycle | Sequence[int], cover: DoubleCover | None = None
) -> int:
    """Double-cover route: 1 if the lift of the cycle does not close up."""
    seq = _check_cycle(s, cycle.vertices if isinstance(cycle, EdgeCycle) else cycle)
    cover = cover or orientation_double_cover(s)
    k = len(seq)
    carriers = [s.edge_to_triangles[edge_of(seq[i], seq[(i + 1) % k])][0] for i in range(k)]
    sheet = 0
    for i in range(k):
        v = seq[(i + 1) % k]
        star = _star(s, v)
        link = s.links[v]
        j = star.index(carriers[i])
        target = star.index(carriers[(i + 1) % k])
        while j != target:
            crossed = edge_of(v, link[(j + 1) % len(link)])
            sheet ^= cover.flips[crossed]
            j = (j + 1) % len(star)
    return sheet


@dataclass(frozen=True)
class CycleBasis:
    """Fundamental cycles of a BFS spanning tree with their w1 values."""

    tree_edges: frozenset
    non_tree_edges: tuple[Edge, ...]
    fundamental_cycles: tuple[EdgeCycle, ...]
    w1: tuple[int, ...]
    edge_set: frozenset

    def __len__(self) -> int:
        return len(self.fundamental_cycles)


def _bfs_tree(s: SimplicialSurface) -> dict[int, int | None]:
    neighbours: dict[int, list[int]] = {v: [] for v in s.vertices}
    for a, b in s.edges:
        neighbours[a].append(b)
        neighbours[b].append(a)
    root = s.vertices[0]
    parent: dict[int, int | None] = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in sorted(neighbours[v]):
            if u not in parent:
                parent[u] = v
                queue.append(u)
    return parent


def _tree_path(parent: dict[int, int | None], a: int, b: int) -> list[int]:
    """Vertices of the tree path from a to b."""
    up_a = [a]
    while parent[up_a[-1]] is not None:
        up_a.append(parent[up_a[-1]])
    depth = {v: i for i, v in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in depth:
        up_b.append(parent[up_b[-1]])
    meet = up_b[-1]
    return up_a[: depth[meet] + 1] + up_b[-2::-1]


def fundamental_cycle_basis(s: SimplicialSurface) -> CycleBasis:
    parent = _bfs_tree(s)
    tree = frozenset(edge_of(v, p) for v, p in parent.items() if p is not None)
    non_tree = tuple(e for e in s.edges if e not in tree)
    cycles = []
    w1 = []
    for a, b in non_tree:
        path = _tree_path(parent, a, b)
        cyc = EdgeCycle.of(path)
        cycles.append(cyc)
        w1.append(is_orientation_reversing(s, path))
    return CycleBasis(
        tree_edges=tree,
        non_tree_edges=non_tree,
        fundamental_cycles=tuple(cycles),
        w1=tuple(w1),
        edge_set=frozenset(s.edges),
    )


def is_cycle_space_element(edges: Iterable[Edge]) -> bool:
    degree: Counter = Counter()
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    return all(d % 2 == 0 for d in degree.values())


def w1_of(b: CycleBasis, edges: Iterable[Edge]) -> int:
    """Orientation character of a cycle-space element, extended linearly."""
    edges = {edge_of(*e) for e in edges}
    unknown = edges - b.edge_set
    if unknown:
        raise CycleError(f"not edges of the surface: {sorted(unknown)}")
    if not is_cycle_space_element(edges):
        raise CycleError("edge set is not in the cycle space (odd vertex degree)")
    value = 0
    for e, w in zip(b.non_tree_edges, b.w1):
        if e in edges:
            value ^= w
    return value


def symmetric_difference(*cycles: Iterable[Edge]) -> frozenset:
    acc: set = set()
    for c in cycles:
        acc ^= {edge_of(*e) for e in c}
    return frozenset(acc)


MAX_ENUMERATION_LENGTH = 6


def enumerate_simple_cycles(s: SimplicialSurface, max_len: int) -> list[tuple[EdgeCycle, int]]:
    """All simple edge cycles of length 3..max_len with their w1 values, sorted canonically."""
    if not 3 <= max_len <= MAX_ENUMERATION_LENGTH:
        raise CycleError(f"max_len must be between 3 and {MAX_ENUMERATION_LENGTH}")
    neighbours: dict[int, list[int]] = {v: [] for v in s.vertices}
    for a, b in s.edges:
        neighbours[a].append(b)
        neighbours[b].append(a)
    for v in neighbours:
        neighbours[v].sort()

    found: list[tuple[int, ...]] = []

    def extend(path: list[int], on_path: set[int]) -> None:
        start, cur = path[0], path[-1]
        for u in neighbours[cur]:
            if u == start and len(path) >= 3 and path[1] < path[-1]:
                found.append(tuple(path))
            elif u > start and u not in on_path and len(path) < max_len:
                path.append(u)
                on_path.add(u)
                extend(path, on_path)
                on_path.discard(u)
                path.pop()

    for v in s.vertices:
        extend([v], {v})
    found.sort(key=lambda c: (len(c), c))
    return [(EdgeCycle(c), is_orientation_reversing(s, c)) for c in found]
