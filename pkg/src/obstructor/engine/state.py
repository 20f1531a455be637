"""Constraint store over pierce variables and its propagation rules.

Variables: one pierce bit per candidate pair (edge ``e`` pierces triangle
``t``) and one parity bit per edge (number of pierced triangles mod 2).
Constraints, all holding in any generic immersion:

* box rule: in every box exactly zero or two labels pierce;
* parity definitions: ``y_e = sum of e's pierce bits``;
* cycle parities: over every fundamental cycle, ``sum of y_e = w1``
  (odd across orientation-reversing cycles, even otherwise);
* box parity: boxes selected by ``box_rows`` add an even-parity row, the
  linear shadow of the box rule, which lets elimination chain through boxes.

Propagation alternates per-box completion enumeration with GF(2)
elimination over the linear part until nothing new is forced.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import numpy as np

from .. import _kernels
from ..cycles import CycleBasis, EdgeCycle, enumerate_simple_cycles, fundamental_cycle_basis
from ..intersection import CandidatePair, IntersectionModel
from ..surface import Edge, SimplicialSurface, SurfaceInfo, label, surface_info

UNKNOWN = -1

# Which boxes contribute an even-parity row to the linear system. With at most
# three labels "zero or two pierce" is exactly "even", so "exact" adds no
# information beyond the box rule itself; "all" also adds the weaker parity
# shadow of larger boxes.
BOX_ROW_MODES = ("none", "coupled", "pairs", "exact", "all")

BOX_OVERFULL = "BoxOverfull"
BOX_UNDERFULL = "BoxUnderfull"
PARITY_INFEASIBLE = "ParityInfeasible"
HULL_NO_VERTEX = "HullNoVertex"

HULL_NOTE = (
    "HullNoVertex assumes the vertex images are in general position (no four coplanar), "
    "so the convex hull is simplicial and every hull vertex has a cycle of at least three "
    "hull edges, none of which meets the singular set"
)


@dataclass(frozen=True)
class Step:
    """One derived or decided fact with the rule that produced it."""

    rule: str  # "decision" | "edge-cut" | "box" | "parity"
    kind: str  # "pierce" | "parity"
    target: int  # candidate index or edge index
    value: int
    box: int | None = None
    note: str = ""


class Contradiction(Exception):
    def __init__(self, kind: str, message: str, witness: dict, trail: tuple[Step, ...]):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.witness = witness
        self.trail = trail


class EngineContext:
    """Per-surface static data shared by every state of a search."""

    def __init__(self, s: SimplicialSurface, box_rows: str = "exact"):
        if box_rows not in BOX_ROW_MODES:
            raise ValueError(f"box_rows must be one of {BOX_ROW_MODES}")
        self.surface = s
        self.box_rows = box_rows
        self.info: SurfaceInfo = surface_info(s)
        self.model = IntersectionModel(s)
        self.basis: CycleBasis = fundamental_cycle_basis(s)
        self.n_x = len(self.model.candidates)
        self.n_y = len(s.edges)
        self.edges = s.edges
        self.edge_index = self.model.edge_index
        rows: list[tuple[tuple[int, ...], tuple[int, ...], int, tuple]] = []
        for e in s.edges:
            rows.append((self.model.edge_candidates[e], (self.edge_index[e],), 0, ("def", e)))
        for k, (cyc, w) in enumerate(zip(self.basis.fundamental_cycles, self.basis.w1)):
            rows.append(((), tuple(self.edge_index[e] for e in cyc.edges), w, ("cycle", k)))
        if box_rows == "coupled":
            for cp in self.model.coupled:
                rows.append(((), (self.edge_index[cp.e1], self.edge_index[cp.e2]), 0, ("coupled", cp)))
        limit = {"none": 0, "coupled": 0, "pairs": 2, "exact": 3, "all": None}[box_rows]
        for b, members in enumerate(self.model.box_members):
            if limit is None or len(members) <= limit:
                rows.append((members, (), 0, ("box", b)))
        self.static_rows = rows
        self._short_cycles: list[tuple[EdgeCycle, int]] | None = None

    @property
    def short_cycles(self) -> list[tuple[EdgeCycle, int]]:
        if self._short_cycles is None:
            self._short_cycles = enumerate_simple_cycles(self.surface, 4)
        return self._short_cycles

    def candidate(self, i: int) -> CandidatePair:
        return self.model.candidates[i]

    def fact_text(self, step: Step) -> str:
        if step.kind == "pierce":
            c = self.candidate(step.target)
            return f"pierce({label(c.edge)},{label(c.triangle)})={'yes' if step.value else 'no'}"
        return f"{label(self.edges[step.target])} {'odd' if step.value else 'even'}"


_CONTEXTS: dict[tuple[str, str], EngineContext] = {}


def context(s: SimplicialSurface, box_rows: str = "exact") -> EngineContext:
    key = (s.digest(), box_rows)
    ctx = _CONTEXTS.get(key)
    if ctx is None:
        ctx = _CONTEXTS[key] = EngineContext(s, box_rows)
    return ctx


@dataclass(frozen=True)
class ObstructionState:
    """Immutable snapshot: tri-state pierce and parity values plus the trail of steps."""

    ctx: EngineContext = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    trail: tuple[Step, ...] = ()

    @property
    def surface(self) -> SimplicialSurface:
        return self.ctx.surface

    def pierce_status(self, c: CandidatePair) -> int | None:
        i = self.ctx.model.index.get(c)
        if i is None or self.x[i] == UNKNOWN:
            return None
        return int(self.x[i])

    def pierce(self, edge: Edge, triangle) -> int | None:
        return self.pierce_status(CandidatePair(tuple(sorted(edge)), tuple(sorted(triangle))))

    def parity(self, edge: Edge) -> int | None:
        v = self.y[self.ctx.edge_index[tuple(sorted(edge))]]
        return None if v == UNKNOWN else int(v)

    def bounds(self, edge: Edge) -> tuple[int, int]:
        """Least and greatest pierce count of ``edge`` consistent with the known values."""
        edge = tuple(sorted(edge))
        idx = self.ctx.model.edge_candidates[edge]
        yes = sum(1 for i in idx if self.x[i] == 1)
        unknown = sum(1 for i in idx if self.x[i] == UNKNOWN)
        lo, hi = yes, yes + unknown
        p = self.y[self.ctx.edge_index[edge]]
        if p != UNKNOWN:
            if lo % 2 != p:
                lo += 1
            if hi % 2 != p:
                hi -= 1
        return lo, hi

    def forced_positive(self, edge: Edge) -> bool:
        return self.bounds(edge)[0] >= 1

    @property
    def n_unknown(self) -> int:
        return int(np.count_nonzero(self.x == UNKNOWN))

    def assignment(self) -> dict[CandidatePair, int]:
        return {c: int(v) for c, v in zip(self.ctx.model.candidates, self.x) if v != UNKNOWN}


def init_state(s: SimplicialSurface, box_rows: str = "exact") -> ObstructionState:
    """Fresh state: every pierce bit unknown; edges without candidates are even."""
    ctx = context(s, box_rows)
    x = np.full(ctx.n_x, UNKNOWN, dtype=np.int8)
    y = np.full(ctx.n_y, UNKNOWN, dtype=np.int8)
    steps = []
    for e in s.edges:
        if not ctx.model.edge_candidates[e]:
            k = ctx.edge_index[e]
            y[k] = 0
            steps.append(Step("edge-cut", "parity", k, 0, note=f"{label(e)} has no candidate triangles"))
    return ObstructionState(ctx, x, y, tuple(steps))


def _box_note(yes: int, n_open: int, value: int) -> str:
    if value == 0 and yes == 0 and n_open == 1:
        return "only one unshaded label left, so it is shaded"
    if value == 0 and yes == 2:
        return "two labels circled, the rest are shaded"
    if value == 1 and yes == 1 and n_open == 1:
        return "one label circled and one unshaded label left, so it is circled"
    return "forced in every completion with zero or two circled labels"


def _box_pass(ctx: EngineContext, x: np.ndarray, steps: list[Step], order: list[int]) -> bool:
    changed_any = False
    changed = True
    while changed:
        changed = False
        for b in order:
            members = ctx.model.box_members[b]
            vals = [int(x[i]) for i in members]
            yes = vals.count(1)
            open_pos = [k for k, v in enumerate(vals) if v == UNKNOWN]
            if not open_pos:
                if yes not in (0, 2):
                    _box_contradiction(ctx, b, yes, x, steps)
                continue
            completions = [
                bits for bits in product((0, 1), repeat=len(open_pos)) if yes + sum(bits) in (0, 2)
            ]
            if not completions:
                _box_contradiction(ctx, b, yes, x, steps)
            for j, k in enumerate(open_pos):
                col = {bits[j] for bits in completions}
                if len(col) == 1:
                    value = col.pop()
                    i = members[k]
                    x[i] = value
                    steps.append(
                        Step("box", "pierce", i, value, box=b, note=_box_note(yes, len(open_pos), value))
                    )
                    changed = changed_any = True
            if changed:
                # re-read the box after forcing before moving on
                continue
    return changed_any


def _box_contradiction(ctx: EngineContext, b: int, yes: int, x: np.ndarray, steps: list[Step]):
    box = ctx.model.boxes[b]
    kind = BOX_OVERFULL if yes > 2 else BOX_UNDERFULL
    labels = [
        {"edge": list(ctx.candidate(i).edge), "triangle": list(ctx.candidate(i).triangle), "value": int(x[i])}
        for i in ctx.model.box_members[b]
    ]
    raise Contradiction(
        kind,
        f"box {label(box.t1)}|{label(box.t2)} cannot have zero or two circled labels ({yes} circled)",
        {"box": [list(box.t1), list(box.t2)], "labels": labels},
        tuple(steps),
    )


def _system(ctx: EngineContext, x: np.ndarray, y: np.ndarray, provenance: bool):
    n_var = ctx.n_x + ctx.n_y
    fact_rows = [(int(i), int(v)) for i, v in enumerate(x) if v != UNKNOWN]
    fact_rows += [(ctx.n_x + int(k), int(v)) for k, v in enumerate(y) if v != UNKNOWN]
    n_rows = len(ctx.static_rows) + len(fact_rows)
    width = n_var + 1 + (n_rows if provenance else 0)
    m = np.zeros((n_rows, width), dtype=np.uint8)
    for r, (xs, ys, rhs, _) in enumerate(ctx.static_rows):
        for i in xs:
            m[r, i] ^= 1
        for k in ys:
            m[r, ctx.n_x + k] ^= 1
        m[r, n_var] = rhs
    base = len(ctx.static_rows)
    for j, (col, v) in enumerate(fact_rows):
        m[base + j, col] = 1
        m[base + j, n_var] = v
    if provenance:
        m[:, n_var + 1 :] = np.eye(n_rows, dtype=np.uint8)
    return m, n_var


def _parity_pass(ctx: EngineContext, x: np.ndarray, y: np.ndarray, steps: list[Step]) -> bool:
    m, n_var = _system(ctx, x, y, provenance=False)
    pivots = _kernels.gf2_rref(m, n_var)
    rank = len(pivots)
    if rank < m.shape[0] and m[rank:, n_var].any():
        _parity_contradiction(ctx, x, y, steps)
    new_x: list[tuple[int, int]] = []
    new_y: list[tuple[int, int]] = []
    for r, c in enumerate(pivots):
        if np.count_nonzero(m[r, :n_var]) != 1:
            continue
        v = int(m[r, n_var])
        if c < ctx.n_x:
            if x[c] == UNKNOWN:
                new_x.append((int(c), v))
        else:
            k = int(c) - ctx.n_x
            if y[k] == UNKNOWN:
                new_y.append((k, v))
    for i, v in sorted(new_x):
        x[i] = v
        steps.append(Step("parity", "pierce", i, v, note="forced by the parity system"))
    for k, v in sorted(new_y):
        y[k] = v
        steps.append(Step("parity", "parity", k, v, note="forced by the parity system"))
    return bool(new_x or new_y)


def _known_parity(ctx: EngineContext, x: np.ndarray, y: np.ndarray, e: Edge) -> int | None:
    k = ctx.edge_index[e]
    if y[k] != UNKNOWN:
        return int(y[k])
    vals = [x[i] for i in ctx.model.edge_candidates[e]]
    if any(v == UNKNOWN for v in vals):
        return None
    return int(sum(vals)) % 2


def _parity_contradiction(ctx: EngineContext, x: np.ndarray, y: np.ndarray, steps: list[Step]):
    # prefer a short simple cycle whose parity is already fixed by the known
    # values, and among those the one needing the fewest expanded edges
    found = []
    for cyc, w in ctx.short_cycles:
        parities = [_known_parity(ctx, x, y, e) for e in cyc.edges]
        if None in parities or sum(parities) % 2 == w:
            continue
        expanded = [list(e) for e in cyc.edges if y[ctx.edge_index[e]] == UNKNOWN]
        found.append((len(cyc), len(expanded), cyc.vertices, cyc, w, expanded))
    if found:
        _, _, _, cyc, w, expanded = min(found, key=lambda f: f[:3])
        kind = "orientation-reversing" if w else "orientation-preserving"
        raise Contradiction(
            PARITY_INFEASIBLE,
            f"{kind} cycle {cyc} meets the singular set an {'even' if w else 'odd'} number of times",
            {"cycle": list(cyc.vertices), "cycle_space": [list(e) for e in cyc.edges],
             "w1": w, "expanded": expanded, "boxes": [], "coupled": []},
            tuple(steps),
        )
    m, n_var = _system(ctx, x, y, provenance=True)
    pivots = _kernels.gf2_rref(m, n_var)
    rank = len(pivots)
    bad = rank + int(np.flatnonzero(m[rank:, n_var])[0])
    used = np.flatnonzero(m[bad, n_var + 1 : n_var + 1 + len(ctx.static_rows)])
    z: set[Edge] = set()
    w = 0
    expanded, boxes, coupled = [], [], []
    for r in used:
        tag = ctx.static_rows[r][3]
        if tag[0] == "cycle":
            k = tag[1]
            z ^= set(ctx.basis.fundamental_cycles[k].edges)
            w ^= ctx.basis.w1[k]
        elif tag[0] == "def":
            expanded.append(list(tag[1]))
        elif tag[0] == "coupled":
            coupled.append([list(tag[1].e1), list(tag[1].e2)])
        else:
            box = ctx.model.boxes[tag[1]]
            boxes.append([list(box.t1), list(box.t2)])
    if not z and not boxes and not coupled and len(expanded) == 1:
        e = tuple(expanded[0])
        message = f"{label(e)} is {'odd' if y[ctx.edge_index[e]] else 'even'} but its known pierce values disagree"
    else:
        message = f"parity system is inconsistent (combination of {len(used)} equations)"
    raise Contradiction(
        PARITY_INFEASIBLE,
        message,
        {"cycle": None, "cycle_space": sorted(list(e) for e in z), "w1": w,
         "expanded": sorted(expanded), "boxes": sorted(boxes), "coupled": sorted(coupled)},
        tuple(steps),
    )


def propagate(st: ObstructionState, shuffle_seed: int | None = None) -> ObstructionState:
    """Run box and parity rules to a fixed point; raise :class:`Contradiction` on failure."""
    ctx = st.ctx
    x, y = st.x.copy(), st.y.copy()
    steps = list(st.trail)
    order = list(range(len(ctx.model.boxes)))
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    while True:
        if rng is not None:
            rng.shuffle(order)
        _box_pass(ctx, x, steps, order)
        if not _parity_pass(ctx, x, y, steps):
            break
    return ObstructionState(ctx, x, y, tuple(steps))


def _with_fact(st: ObstructionState, kind: str, target: int, value: int, note: str) -> ObstructionState:
    x, y = st.x.copy(), st.y.copy()
    arr = x if kind == "pierce" else y
    current = arr[target]
    if current == value:
        return st
    if current != UNKNOWN:
        what = st.ctx.fact_text(Step("decision", kind, target, value))
        raise Contradiction(
            "Conflict", f"{what} contradicts an earlier fact", {}, st.trail
        )
    arr[target] = value
    step = Step("decision", kind, target, value, note=note)
    return propagate(ObstructionState(st.ctx, x, y, st.trail + (step,)))


def assert_parity(st: ObstructionState, edge: Edge, parity: int) -> ObstructionState:
    k = st.ctx.edge_index[tuple(sorted(edge))]
    return _with_fact(st, "parity", k, int(parity), "case assumption")


def assert_pierce(st: ObstructionState, c: CandidatePair, value: int) -> ObstructionState:
    return _with_fact(st, "pierce", st.ctx.model.index[c], int(value), "case assumption")


def assert_parities(st: ObstructionState, facts: Iterable[tuple[Edge, int]]) -> ObstructionState:
    """Record several parity decisions at once, then propagate."""
    x, y = st.x.copy(), st.y.copy()
    trail = list(st.trail)
    for edge, p in facts:
        k = st.ctx.edge_index[tuple(sorted(edge))]
        if y[k] == p:
            continue
        if y[k] != UNKNOWN:
            raise Contradiction("Conflict", f"{label(edge)} parity already fixed", {}, tuple(trail))
        y[k] = p
        trail.append(Step("decision", "parity", k, int(p), note="case assumption"))
    return propagate(ObstructionState(st.ctx, x, y, tuple(trail)))


def hull_feasible_vertices(st: ObstructionState) -> tuple[list[int], dict[int, str]]:
    """Greatest set F of vertices that can be convex-hull vertices.

    ``v`` stays in F while the graph on its F-neighbours ``u`` with ``uv``
    free of forced intersections, joined by edges also free of them, still
    contains a cycle.
    """
    s = st.surface
    free = {e: not st.forced_positive(e) for e in s.edges}
    feasible = set(s.vertices)
    reasons: dict[int, str] = {}
    while True:
        nxt = set()
        for v in sorted(feasible):
            nbrs = [u for u in sorted(feasible) if u != v and free.get(tuple(sorted((u, v))), False)]
            links = [(a, b) for i, a in enumerate(nbrs) for b in nbrs[i + 1 :] if free.get((a, b), False)]
            if _has_cycle(nbrs, links):
                nxt.add(v)
            elif len(nbrs) < 3:
                reasons[v] = f"only {len(nbrs)} incident edge(s) can avoid the singular set: " + (
                    ", ".join(label(tuple(sorted((v, u)))) for u in nbrs) or "none"
                )
            else:
                reasons[v] = "edges among " + ",".join(map(str, nbrs)) + " free of intersections (" + (
                    ", ".join(label(e) for e in links) or "none"
                ) + ") cannot form a closed polygon"
        if nxt == feasible:
            break
        feasible = nxt
    return sorted(feasible), {v: reasons[v] for v in sorted(reasons) if v not in feasible}


def _has_cycle(nodes: list[int], links: list[tuple[int, int]]) -> bool:
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in links:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


def hull_check(st: ObstructionState) -> None:
    """Raise ``HullNoVertex`` when fewer than four vertices can lie on the convex hull.

    Only meaningful for neighborly triangulations; skipped otherwise.
    """
    if not st.ctx.info.neighborly:
        return
    feasible, reasons = hull_feasible_vertices(st)
    if len(feasible) < 4:
        raise Contradiction(
            HULL_NO_VERTEX,
            f"only {len(feasible)} vertices can lie on the convex hull, a polyhedron needs four",
            {"feasible": feasible, "reasons": {str(v): r for v, r in reasons.items()}},
            st.trail,
        )


def is_model(ctx: EngineContext, values: dict[CandidatePair, int] | np.ndarray) -> bool:
    """Direct evaluation of every constraint on a full pierce assignment."""
    if not isinstance(values, np.ndarray):
        arr = np.zeros(ctx.n_x, dtype=np.int8)
        for c, v in values.items():
            arr[ctx.model.index[c]] = v
        values = arr
    for members in ctx.model.box_members:
        if int(sum(values[i] for i in members)) not in (0, 2):
            return False
    counts = {e: int(sum(values[i] for i in ctx.model.edge_candidates[e])) for e in ctx.edges}
    for cyc, w in zip(ctx.basis.fundamental_cycles, ctx.basis.w1):
        if sum(counts[e] for e in cyc.edges) % 2 != w:
            return False
    if ctx.info.neighborly:
        full = ObstructionState(ctx, values.astype(np.int8), np.array(
            [counts[e] % 2 for e in ctx.edges], dtype=np.int8))
        if len(hull_feasible_vertices(full)[0]) < 4:
            return False
    return True
