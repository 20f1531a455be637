"""Intersection table: which edges may pierce which triangles.

An edge ``ab`` is a candidate for piercing a triangle ``def`` when the two
are vertex-disjoint and none of ``abd``, ``abe``, ``abf`` is a face
(edge-cut analysis). A *box* collects, for a pair of vertex-disjoint
triangles, the candidates among their six edges against the opposite
triangle. In a generic immersion exactly zero or two labels of every box
pierce.
"""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Mapping

from .surface import Edge, SimplicialSurface, Triangle, label, triangle_edges


@dataclass(frozen=True, order=True)
class CandidatePair:
    edge: Edge
    triangle: Triangle

    def __str__(self) -> str:
        return f"{label(self.edge)}|{label(self.triangle)}"


@dataclass(frozen=True)
class Box:
    t1: Triangle
    t2: Triangle
    labels: tuple[CandidatePair, ...]


@dataclass(frozen=True, order=True)
class CoupledPair:
    e1: Edge
    e2: Edge

    def __str__(self) -> str:
        return "{" + label(self.e1) + "," + label(self.e2) + "}"


def _is_candidate(s: SimplicialSurface, e: Edge, t: Triangle) -> bool:
    a, b = e
    if a in t or b in t:
        return False
    return not any(s.has_triangle(a, b, x) for x in t)


def candidate_pairs(s: SimplicialSurface) -> tuple[CandidatePair, ...]:
    return tuple(
        CandidatePair(e, t) for e in s.edges for t in s.triangles if _is_candidate(s, e, t)
    )


def _disjoint(t1: Triangle, t2: Triangle) -> bool:
    return not set(t1) & set(t2)


def boxes(s: SimplicialSurface) -> list[Box]:
    """One box per unordered vertex-disjoint triangle pair, lexicographic order."""
    out = []
    for t1, t2 in combinations(s.triangles, 2):
        if not _disjoint(t1, t2):
            continue
        labels = [CandidatePair(e, t2) for e in triangle_edges(t1) if _is_candidate(s, e, t2)]
        labels += [CandidatePair(e, t1) for e in triangle_edges(t2) if _is_candidate(s, e, t1)]
        out.append(Box(t1, t2, tuple(labels)))
    return out


def max_pierce_count(s: SimplicialSurface) -> dict[Edge, int]:
    counts = {e: 0 for e in s.edges}
    for c in candidate_pairs(s):
        counts[c.edge] += 1
    return counts


def _box_key(t1: Triangle, t2: Triangle) -> tuple[Triangle, Triangle]:
    return (t1, t2) if t1 < t2 else (t2, t1)


def coupled_pairs(s: SimplicialSurface) -> set[CoupledPair]:
    cands: dict[Edge, set[Triangle]] = defaultdict(set)
    for c in candidate_pairs(s):
        cands[c.edge].add(c.triangle)
    box_labels = {(b.t1, b.t2): set(b.labels) for b in boxes(s)}
    found = set()
    for e1, e2 in combinations(s.edges, 2):
        own1 = set(s.edge_to_triangles[e1])
        own2 = set(s.edge_to_triangles[e2])
        if cands[e1] != own2 or cands[e2] != own1:
            continue
        a, b = s.edge_to_triangles[e1]
        c, d = s.edge_to_triangles[e2]
        for m1, m2 in (((a, c), (b, d)), ((a, d), (b, c))):
            ok = True
            for x, y in (m1, m2):
                want = {CandidatePair(e1, y), CandidatePair(e2, x)}
                if box_labels.get(_box_key(x, y)) != want:
                    ok = False
                    break
            if ok:
                found.add(CoupledPair(e1, e2))
                break
    return found


class IntersectionModel:
    """Indexed view of candidates and boxes used by the engine."""

    def __init__(self, s: SimplicialSurface):
        self.surface = s
        self.candidates = candidate_pairs(s)
        self.index = {c: i for i, c in enumerate(self.candidates)}
        self.boxes = [b for b in boxes(s) if b.labels]
        self.box_members = [tuple(self.index[c] for c in b.labels) for b in self.boxes]
        self.edge_index = {e: i for i, e in enumerate(s.edges)}
        by_edge: dict[Edge, list[int]] = {e: [] for e in s.edges}
        for i, c in enumerate(self.candidates):
            by_edge[c.edge].append(i)
        self.edge_candidates = {e: tuple(v) for e, v in by_edge.items()}
        boxes_of: list[list[int]] = [[] for _ in self.candidates]
        for bi, members in enumerate(self.box_members):
            for i in members:
                boxes_of[i].append(bi)
        self.boxes_of = [tuple(v) for v in boxes_of]

    @cached_property
    def coupled(self) -> tuple[CoupledPair, ...]:
        return tuple(sorted(coupled_pairs(self.surface)))

    def __len__(self) -> int:
        return len(self.candidates)


_STATUS_TEXT = {None: "unknown", 1: "yes", 0: "no"}


def _status_of(st, c: CandidatePair) -> int | None:
    if st is None:
        return None
    if isinstance(st, Mapping):
        return st.get(c)
    return st.pierce_status(c)


def _cell(box: Box, st) -> str:
    parts = []
    for c in box.labels:
        v = _status_of(st, c)
        parts.append(label(c.edge) + ("" if v is None else f"({_STATUS_TEXT[v]})"))
    return " ".join(parts)


def render_table(s: SimplicialSurface, st=None, fmt: str = "text") -> str:
    """Render the intersection table as ``text``, ``csv`` or ``json``.

    ``st`` may be an engine state (anything with ``pierce_status``) or a
    mapping from :class:`CandidatePair` to 0/1.
    """
    filled = [b for b in boxes(s) if b.labels]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t1", "t2", "label", "status"])
        for b in filled:
            for c in b.labels:
                w.writerow([label(b.t1), label(b.t2), label(c.edge), _STATUS_TEXT[_status_of(st, c)]])
        return buf.getvalue()
    if fmt == "json":
        rows = [
            {
                "t1": list(b.t1),
                "t2": list(b.t2),
                "labels": [
                    {"edge": list(c.edge), "triangle": list(c.triangle), "status": _STATUS_TEXT[_status_of(st, c)]}
                    for c in b.labels
                ],
            }
            for b in filled
        ]
        return json.dumps({"boxes": rows}, indent=1) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    if not filled:
        return "intersection table\nno vertex-disjoint triangle pairs with candidate labels\n"

    rows = sorted({b.t1 for b in filled})
    cols = sorted({b.t2 for b in filled} | set(rows))
    cells = {(b.t1, b.t2): _cell(b, st) for b in filled}
    width = max(max(len(v) for v in cells.values()), max(len(label(t)) for t in cols) + 2)
    n_labels = sum(len(b.labels) for b in filled)
    lines = [f"intersection table: {len(filled)} boxes, {n_labels} labels"]
    lines.append(" ".join(label(t).center(width) for t in cols).rstrip())
    for r in rows:
        out = []
        for c in cols:
            if c == r:
                out.append(f"[{label(r)}]".center(width))
            elif c < r:
                out.append(" " * width)
            else:
                out.append(cells.get((r, c), "").ljust(width))
        lines.append(" ".join(out).rstrip())
    return "\n".join(lines) + "\n"
