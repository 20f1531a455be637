"""Proof trees: canonical JSON form and the human-readable narrative.

A certificate is a tree of nodes. Each node carries the decision that
created it (absent at the root), the facts derived from it in order, and
either a contradiction with a witness or its children. Root children split
on the parity pattern of ``root_cycle``; ``symmetric_cases`` lists the
patterns covered by an automorphism image of a sibling instead of a child.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..cycles import EdgeCycle
from ..surface import SimplicialSurface, label
from .state import HULL_NO_VERTEX, HULL_NOTE, Step

VERSION = 1


@dataclass
class Node:
    id: str
    decision: dict | None = None
    steps: list[dict] = field(default_factory=list)
    contradiction: dict | None = None
    children: list["Node"] = field(default_factory=list)
    symmetric_cases: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "decision": self.decision,
            "steps": self.steps,
            "contradiction": self.contradiction,
            "children": [c.to_dict() for c in self.children],
            "symmetric_cases": self.symmetric_cases,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Node":
        return cls(
            id=str(d["id"]),
            decision=d.get("decision"),
            steps=list(d.get("steps", [])),
            contradiction=d.get("contradiction"),
            children=[cls.from_dict(c) for c in d.get("children", [])],
            symmetric_cases=list(d.get("symmetric_cases", [])),
        )

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=-1)


def step_record(ctx, step: Step) -> dict:
    rec: dict = {"rule": step.rule, "kind": step.kind, "value": int(step.value)}
    if step.kind == "pierce":
        c = ctx.candidate(step.target)
        rec["edge"] = list(c.edge)
        rec["triangle"] = list(c.triangle)
    else:
        rec["edge"] = list(ctx.edges[step.target])
    if step.box is not None:
        box = ctx.model.boxes[step.box]
        rec["box"] = [list(box.t1), list(box.t2)]
    if step.note:
        rec["note"] = step.note
    return rec


@dataclass
class Certificate:
    surface_hash: str
    root_cycle: tuple[int, ...] | None
    tree: Node
    notes: list[str] = field(default_factory=list)
    version: int = VERSION

    @classmethod
    def build(cls, s: SimplicialSurface, cycle: EdgeCycle | None, root: Node, ctx=None) -> "Certificate":
        notes = []
        if any(n.contradiction and n.contradiction["kind"] == HULL_NO_VERTEX for n in root.walk()):
            notes.append(HULL_NOTE)
        return cls(s.digest(), None if cycle is None else tuple(cycle.vertices), root, notes)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "surface_hash": self.surface_hash,
            "root_cycle": None if self.root_cycle is None else list(self.root_cycle),
            "notes": self.notes,
            "tree": self.tree.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        rc = d.get("root_cycle")
        return cls(
            surface_hash=d["surface_hash"],
            root_cycle=None if rc is None else tuple(rc),
            tree=Node.from_dict(d["tree"]),
            notes=list(d.get("notes", [])),
            version=int(d.get("version", VERSION)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))

    @property
    def depth(self) -> int:
        return self.tree.depth

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.tree.walk())

    @property
    def root_cases(self) -> list[Node]:
        return list(self.tree.children)


def fact_text(rec: dict) -> str:
    if rec["kind"] == "pierce":
        return f"pierce({label(rec['edge'])},{label(rec['triangle'])})={'yes' if rec['value'] else 'no'}"
    return f"{label(rec['edge'])} {'odd' if rec['value'] else 'even'}"


def step_text(rec: dict) -> str:
    rule = rec["rule"]
    if rule == "edge-cut":
        return rec.get("note") or f"{label(rec['edge'])} has no candidate triangles"
    what = fact_text(rec)
    if rule == "box":
        t1, t2 = rec["box"]
        return f"box {label(t1)}|{label(t2)}: {what} ({rec.get('note', '')})"
    return f"parity: {what}"


def decision_text(decision: dict) -> str:
    if decision["kind"] == "parity":
        return ", ".join(
            f"{label(e)} {'odd' if v else 'even'}" for e, v in zip(decision["edges"], decision["values"])
        )
    return fact_text(decision)


def contradiction_text(con: dict) -> list[str]:
    lines = [f"contradiction {con['kind']}: {con['message']}"]
    w = con.get("witness") or {}
    if con["kind"] == "ParityInfeasible":
        if not w.get("cycle_space"):
            pass
        elif w.get("cycle"):
            lines.append("  cycle " + "-".join(label(e) for e in w["cycle_space"]) + f" must be {'odd' if w['w1'] else 'even'}")
        else:
            lines.append("  cycle-space element {" + ", ".join(label(e) for e in w["cycle_space"]) + "}"
                         + f" with w1={w['w1']}")
            if w.get("boxes"):
                lines.append("  even boxes used: " + ", ".join(f"{label(a)}|{label(b)}" for a, b in w["boxes"]))
    elif con["kind"] == HULL_NO_VERTEX:
        lines.append("  possible hull vertices: " + (", ".join(map(str, w.get("feasible", []))) or "none"))
        for v, why in sorted(w.get("reasons", {}).items(), key=lambda kv: int(kv[0])):
            lines.append(f"  vertex {v}: {why}")
    return lines


def render(cert: Certificate) -> str:
    """Narrative rendering of a certificate, one indented block per node."""
    out = []
    if cert.root_cycle is None:
        out.append("proof by propagation alone")
    else:
        out.append(f"case split on the parity of the edges of cycle ({','.join(map(str, cert.root_cycle))})")

    def emit(node: Node, indent: int):
        pad = "  " * indent
        head = "root" if node.decision is None else f"case {node.id}: {decision_text(node.decision)}"
        out.append(pad + head)
        for sc in node.symmetric_cases:
            perm = _cycle_notation(sc["automorphism"])
            vals = ", ".join("odd" if v else "even" for v in sc["values"])
            out.append(pad + f"  pattern ({vals}) follows from case {sc['representative']} under {perm}")
        for rec in node.steps:
            out.append(pad + "  " + step_text(rec))
        if node.contradiction:
            out.extend(pad + "  " + line for line in contradiction_text(node.contradiction))
        for c in node.children:
            emit(c, indent + 1)

    emit(cert.tree, 0)
    for n in cert.notes:
        out.append("note: " + n)
    return "\n".join(out) + "\n"


def _cycle_notation(pairs) -> str:
    m = {int(a): int(b) for a, b in pairs}
    seen, parts = set(), []
    for v in sorted(m):
        if v in seen:
            continue
        cyc = [v]
        seen.add(v)
        w = m[v]
        while w != v:
            cyc.append(w)
            seen.add(w)
            w = m[w]
        if len(cyc) > 1:
            parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"
