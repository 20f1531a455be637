"""Automorphisms of a triangulation and orbit machinery for case reduction."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .cycles import canonical_cycle
from .surface import SimplicialSurface

MAX_VERTICES = 16


@dataclass(frozen=True, order=True)
class Automorphism:
    """A vertex permutation, stored as ``(vertex, image)`` pairs in vertex order."""

    pairs: tuple[tuple[int, int], ...]
    _map: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.pairs))

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> "Automorphism":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def from_cycles(cls, text: str, vertices: Iterable[int]) -> "Automorphism":
        """Parse cycle notation such as ``(1 8 4 2 9 3)(5 6 7)`` or ``(184293)(567)``."""
        mapping = {v: v for v in vertices}
        for body in re.findall(r"\(([^)]*)\)", text):
            tokens = body.replace(",", " ").split()
            if len(tokens) == 1 and len(tokens[0]) > 1:
                tokens = list(tokens[0])
            cyc = [int(t) for t in tokens]
            for i, v in enumerate(cyc):
                mapping[v] = cyc[(i + 1) % len(cyc)]
        return cls.from_mapping(mapping)

    def __call__(self, v: int) -> int:
        return self._map[v]

    def apply(self, simplex: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(self._map[v] for v in simplex))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self ∘ other``: apply ``other`` first."""
        return Automorphism.from_mapping({v: self._map[other(v)] for v, _ in self.pairs})

    def inverse(self) -> "Automorphism":
        return Automorphism.from_mapping({w: v for v, w in self.pairs})

    def is_identity(self) -> bool:
        return all(v == w for v, w in self.pairs)

    def as_list(self) -> list[int]:
        return [w for _, w in self.pairs]

    def cycle_notation(self) -> str:
        seen = set()
        parts = []
        for v, _ in self.pairs:
            if v in seen:
                continue
            cyc = [v]
            seen.add(v)
            w = self._map[v]
            while w != v:
                cyc.append(w)
                seen.add(w)
                w = self._map[w]
            if len(cyc) > 1:
                parts.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(parts) or "()"

    def __str__(self) -> str:
        return self.cycle_notation()


def is_automorphism(s: SimplicialSurface, g: Automorphism) -> bool:
    if sorted(v for v, _ in g.pairs) != list(s.vertices):
        return False
    if sorted(w for _, w in g.pairs) != list(s.vertices):
        return False
    return all(s.has_triangle(*g.apply(t)) for t in s.triangles)


def automorphism_group(s: SimplicialSurface) -> list[Automorphism]:
    """All face-preserving vertex permutations, by backtracking on vertex images."""
    n = s.n_vertices
    if n > MAX_VERTICES:
        raise ValueError(f"automorphism search limited to {MAX_VERTICES} vertices, got {n}")
    verts = list(s.vertices)
    degree = {v: len(s.links[v]) for v in verts}
    # assign vertices in BFS order so each new vertex touches assigned ones
    order = [verts[0]]
    for v in order:
        for u in sorted(s.links[v]):
            if u not in order:
                order.append(u)
    order += [v for v in verts if v not in order]
    by_vertex: dict[int, list[tuple[int, int, int]]] = {v: [] for v in verts}
    for t in s.triangles:
        by_vertex[max(t, key=order.index)].append(t)

    result: list[Automorphism] = []
    image: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> None:
        if k == n:
            result.append(Automorphism.from_mapping(image))
            return
        v = order[k]
        for w in verts:
            if w in used or degree[w] != degree[v]:
                continue
            if any(s.has_edge(image[u], w) != s.has_edge(u, v) for u in order[:k]):
                continue
            image[v] = w
            if all(s.has_triangle(*(image[x] for x in t)) for t in by_vertex[v]):
                used.add(w)
                extend(k + 1)
                used.discard(w)
            del image[v]

    extend(0)
    result.sort()
    return result


def brute_force_group(s: SimplicialSurface) -> list[Automorphism]:
    """Filter all n! permutations; test oracle for :func:`automorphism_group`."""
    n = s.n_vertices
    if n > 10:
        raise ValueError("brute-force filter is limited to 10 vertices")
    idx = s.index
    perms = np.array(list(permutations(range(n))), dtype=np.int8)
    faces = np.array([[idx[v] for v in t] for t in s.triangles], dtype=np.int64)
    mask = _kernels.face_filter(perms, faces, n)
    verts = s.vertices
    group = [
        Automorphism(tuple((verts[i], verts[int(p[i])]) for i in range(n))) for p in perms[mask]
    ]
    group.sort()
    return group


def generators(group: Sequence[Automorphism]) -> list[Automorphism]:
    """A small generating set, chosen greedily in sorted order."""
    gens: list[Automorphism] = []
    span: set[Automorphism] = set()
    for g in sorted(group):
        if g.is_identity() or g in span:
            continue
        gens.append(g)
        span = _closure(gens)
    return gens


def _closure(gens: Sequence[Automorphism]) -> set[Automorphism]:
    ident = Automorphism.from_mapping({v: v for v, _ in gens[0].pairs})
    seen = {ident}
    frontier = [ident]
    while frontier:
        g = frontier.pop()
        for h in gens:
            k = h.compose(g)
            if k not in seen:
                seen.add(k)
                frontier.append(k)
    return seen


def act(g: Automorphism, obj, kind: str):
    if kind == "vertex":
        return g(obj)
    if kind in ("edge", "triangle"):
        return g.apply(obj)
    if kind in ("cycle", "triangle-cycle"):
        return canonical_cycle([g(v) for v in obj])
    raise ValueError(f"unknown action kind {kind!r}")


@dataclass(frozen=True)
class OrbitPartition:
    classes: tuple[tuple, ...]

    @property
    def representatives(self) -> tuple:
        return tuple(c[0] for c in self.classes)

    def orbit_of(self, obj) -> tuple:
        for c in self.classes:
            if obj in c:
                return c
        raise KeyError(obj)

    def representative(self, obj):
        return self.orbit_of(obj)[0]


def orbits(group: Sequence[Automorphism], objects: Iterable[Hashable], kind: str) -> OrbitPartition:
    objects = sorted(set(objects))
    remaining = set(objects)
    classes = []
    for obj in objects:
        if obj not in remaining:
            continue
        orbit = {act(g, obj, kind) for g in group} | {obj}
        remaining -= orbit
        classes.append(tuple(sorted(orbit)))
    return OrbitPartition(tuple(classes))


def map_fact(g: Automorphism, fact: tuple) -> tuple:
    """Image of ``("parity", edge, value)`` or ``("pierce", edge, triangle, value)``."""
    if fact[0] == "parity":
        return ("parity", g.apply(fact[1]), fact[2])
    if fact[0] == "pierce":
        return ("pierce", g.apply(fact[1]), g.apply(fact[2]), fact[3])
    raise ValueError(f"unknown fact {fact!r}")


def stabilizer_filter(group: Sequence[Automorphism], facts: Iterable[tuple]) -> list[Automorphism]:
    """Elements of ``group`` mapping the fact set onto itself."""
    facts = frozenset(facts)
    return [g for g in group if frozenset(map_fact(g, f) for f in facts) == facts]
