"""Depth-bounded case splitting over engine states.

The root state is propagated first; if it survives, the search splits on
the parity pattern of one orientation-reversing 3-cycle (odd total,
respecting per-edge maximum counts), keeps one pattern per orbit of the
cycle's stabilizer in the automorphism group, and below that branches on
single pierce bits.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..cycles import EdgeCycle, enumerate_simple_cycles, is_orientation_reversing
from ..intersection import CandidatePair
from ..surface import SimplicialSurface
from ..symmetry import Automorphism, automorphism_group, MAX_VERTICES
from .certificate import Certificate, Node, step_record
from .state import (
    UNKNOWN,
    Contradiction,
    ObstructionState,
    assert_parities,
    assert_pierce,
    context,
    hull_check,
    init_state,
    is_model,
    propagate,
)

NON_IMMERSIBLE = "NonImmersible"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 8
    symmetry: bool = True
    # "edge": candidate of a known-parity edge with fewest open candidates, else "box";
    # "box": most constrained box; "index": first unknown candidate
    branch: str = "edge"
    root_cycle: tuple[int, ...] | None = None
    box_rows: str = "none"  # see state.BOX_ROW_MODES


@dataclass
class Verdict:
    kind: str
    certificate: Certificate | None = None
    residual: dict[CandidatePair, int] | None = None
    reason: str = ""
    nodes: int = 0
    seconds: float = 0.0

    @property
    def non_immersible(self) -> bool:
        return self.kind == NON_IMMERSIBLE


class _Open(Exception):
    def __init__(self, reason: str, residual: dict[CandidatePair, int] | None, node_id: str):
        super().__init__(reason)
        self.reason = reason
        self.residual = residual
        self.node_id = node_id


@dataclass
class RootCase:
    values: tuple[int, ...]
    tags: list[tuple[tuple[int, ...], Automorphism]] = field(default_factory=list)


def _group(s: SimplicialSurface) -> list[Automorphism]:
    if s.n_vertices > MAX_VERTICES:
        ident = Automorphism.from_mapping({v: v for v in s.vertices})
        return [ident]
    return automorphism_group(s)


def _stabilizer(group: list[Automorphism], cycle: EdgeCycle) -> list[Automorphism]:
    edges = set(cycle.edges)
    return [g for g in group if {g.apply(e) for e in edges} == edges]


def _pattern_image(g: Automorphism, edges: tuple, values: tuple[int, ...]) -> tuple[int, ...]:
    pos = {e: i for i, e in enumerate(edges)}
    out = [0] * len(edges)
    for e, v in zip(edges, values):
        out[pos[g.apply(e)]] = v
    return tuple(out)


def root_patterns(st: ObstructionState, cycle: EdgeCycle) -> list[tuple[int, ...]]:
    """Odd-total parity patterns on the cycle's edges allowed by each edge's maximum count."""
    out = []
    edges = cycle.edges
    for bits in product((0, 1), repeat=len(edges)):
        if sum(bits) % 2 != 1:
            continue
        ok = True
        for e, b in zip(edges, bits):
            lo, hi = st.bounds(e)
            if b == 1 and hi < 1:
                ok = False
            p = st.parity(e)
            if p is not None and p != b:
                ok = False
        if ok:
            out.append(bits)
    return out


def reduce_patterns(
    patterns: list[tuple[int, ...]], cycle: EdgeCycle, stab: list[Automorphism]
) -> list[RootCase]:
    """One representative per stabilizer orbit, plus the element mapping it to each other pattern."""
    edges = cycle.edges
    remaining = set(patterns)
    cases = []
    for p in sorted(patterns, key=lambda b: (sum(b), tuple(-x for x in b))):
        if p not in remaining:
            continue
        remaining.discard(p)
        case = RootCase(p)
        for g in stab:
            q = _pattern_image(g, edges, p)
            if q in remaining:
                remaining.discard(q)
                case.tags.append((q, g))
        case.tags.sort()
        cases.append(case)
    return cases


def choose_root_cycle(st: ObstructionState, group: list[Automorphism]) -> EdgeCycle:
    """Orientation-reversing triangle-free 3-cycle with the smallest total maximum count.

    Ties go to fewer root cases after symmetry, then to more edges whose
    coupled partner avoids the cycle's vertices (those partners inherit the
    case parities without touching the cycle), then to the least vertex
    sequence. Orbit representatives (least member of each orbit) are the
    only contenders.
    """
    s = st.surface
    partner: dict = {}
    for cp in st.ctx.model.coupled:
        partner[cp.e1] = cp.e2
        partner[cp.e2] = cp.e1
    best = None
    seen: set = set()
    for cyc, w in enumerate_simple_cycles(s, 3):
        if w != 1 or cyc in seen:
            continue
        orbit = {EdgeCycle.of([g(v) for v in cyc.vertices]) for g in group}
        seen |= orbit
        pats = root_patterns(st, cyc)
        if not pats:
            return cyc
        n_cases = len(reduce_patterns(pats, cyc, _stabilizer(group, cyc)))
        total = sum(st.bounds(e)[1] for e in cyc.edges)
        outside = sum(1 for e in cyc.edges if e in partner and not set(partner[e]) & set(cyc.vertices))
        key = (total, n_cases, -outside, cyc.vertices)
        if best is None or key < best[0]:
            best = (key, cyc)
    if best is None:
        raise ValueError("no orientation-reversing 3-cycle to split on")
    return best[1]


def _branch_candidate(st: ObstructionState, strategy: str) -> int:
    x = st.x
    if strategy == "index":
        return int(np.flatnonzero(x == UNKNOWN)[0])
    model = st.ctx.model
    if strategy == "edge":
        # an edge of known parity with the fewest open candidates
        best = None
        for e in st.surface.edges:
            if st.parity(e) is None:
                continue
            open_ = [i for i in model.edge_candidates[e] if x[i] == UNKNOWN]
            if open_ and (best is None or len(open_) < len(best)):
                best = open_
        if best is not None:
            return best[0]
    best = None
    for b, members in enumerate(model.box_members):
        vals = [x[i] for i in members]
        n_open = sum(1 for v in vals if v == UNKNOWN)
        if n_open == 0:
            continue
        key = (n_open, -sum(1 for v in vals if v == 1), b)
        if best is None or key < best[0]:
            best = (key, members)
    if best is None:
        return int(np.flatnonzero(x == UNKNOWN)[0])
    return next(i for i in best[1] if x[i] == UNKNOWN)


def _records(ctx, trail, start: int) -> list[dict]:
    return [step_record(ctx, s) for s in trail[start:] if s.rule != "decision"]


def search(s: SimplicialSurface, cfg: SearchConfig | None = None) -> Verdict:
    """Prove non-immersibility by propagation and case splitting, or report why not."""
    cfg = cfg or SearchConfig()
    t0 = time.perf_counter()
    ctx = context(s, cfg.box_rows)
    counter = [0]

    def new_node(node_id: str) -> Node:
        counter[0] += 1
        return Node(id=node_id)

    if ctx.info.orientable:
        residual = {c: 0 for c in ctx.model.candidates}
        if not is_model(ctx, residual):  # pragma: no cover - zero is always a model when orientable
            raise AssertionError("zero assignment violates constraints on an orientable surface")
        return Verdict(INCONCLUSIVE, None, residual, "orientable", 0, time.perf_counter() - t0)

    st0 = init_state(s, cfg.box_rows)
    root = new_node("0")
    try:
        st = propagate(st0)
        hull_check(st)
    except Contradiction as c:
        root.steps = _records(ctx, c.trail, 0)
        root.contradiction = contradiction_record(c)
        cert = Certificate.build(s, None, root, ctx)
        return Verdict(NON_IMMERSIBLE, cert, None, "proof", counter[0], time.perf_counter() - t0)
    root.steps = _records(ctx, st.trail, 0)

    group = _group(s) if cfg.symmetry else [Automorphism.from_mapping({v: v for v in s.vertices})]
    full_group = _group(s)
    if cfg.root_cycle is not None:
        cycle = EdgeCycle.of(cfg.root_cycle)
        # raises CycleError (a ValueError) for non-cycles
        if len(cycle) != 3 or is_orientation_reversing(s, cycle) != 1:
            raise ValueError(f"root cycle {cycle} is not an orientation-reversing 3-cycle")
    else:
        cycle = choose_root_cycle(st, full_group)
    pats = root_patterns(st, cycle)
    cases = reduce_patterns(pats, cycle, _stabilizer(group, cycle))

    def explore(parent: ObstructionState, node: Node, apply, depth: int) -> Node:
        base = len(parent.trail)
        try:
            cur = apply(parent)
            hull_check(cur)
        except Contradiction as c:
            node.decision = decision_of(ctx, c.trail[base:]) or node.decision
            node.steps = _records(ctx, c.trail, base)
            node.contradiction = contradiction_record(c)
            return node
        node.decision = decision_of(ctx, cur.trail[base:]) or node.decision
        node.steps = _records(ctx, cur.trail, base)
        if cur.n_unknown == 0:
            raise _Open("model", cur.assignment(), node.id)
        if depth >= cfg.max_depth:
            raise _Open("depth-exhausted", None, node.id)
        i = _branch_candidate(cur, cfg.branch)
        c = ctx.candidate(i)
        for k, value in enumerate((0, 1)):
            child = new_node(f"{node.id}.{k}")
            child.decision = {"kind": "pierce", "edge": list(c.edge), "triangle": list(c.triangle), "value": value}
            node.children.append(
                explore(cur, child, lambda p, c=c, value=value: assert_pierce(p, c, value), depth + 1)
            )
        return node

    try:
        for k, case in enumerate(cases):
            child = new_node(f"0.{k}")
            facts = list(zip(cycle.edges, case.values))
            child.decision = {
                "kind": "parity",
                "edges": [list(e) for e in cycle.edges],
                "values": list(case.values),
            }
            root.children.append(explore(st, child, lambda p, facts=facts: assert_parities(p, facts), 1))
            for q, g in case.tags:
                root.symmetric_cases.append(
                    {"values": list(q), "representative": child.id, "automorphism": [list(p) for p in g.pairs]}
                )
    except _Open as o:
        return Verdict(INCONCLUSIVE, None, o.residual, o.reason, counter[0], time.perf_counter() - t0)
    root.symmetric_cases.sort(key=lambda d: d["values"])
    cert = Certificate.build(s, cycle, root, ctx)
    return Verdict(NON_IMMERSIBLE, cert, None, "proof", counter[0], time.perf_counter() - t0)


def decision_of(ctx, steps) -> dict | None:
    decided = [s for s in steps if s.rule == "decision"]
    if not decided:
        return None
    if decided[0].kind == "pierce":
        c = ctx.candidate(decided[0].target)
        return {"kind": "pierce", "edge": list(c.edge), "triangle": list(c.triangle), "value": decided[0].value}
    return None


def contradiction_record(c: Contradiction) -> dict:
    return {"kind": c.kind, "message": c.message, "witness": c.witness}
