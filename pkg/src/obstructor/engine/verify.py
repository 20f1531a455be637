"""Independent certificate checker.

Shares only the surface parser and the double-cover lift with the search.
Candidates are recomputed from the definition, the parity system is
rebuilt in coboundary form (``y_e = f_a + f_b + omega_e`` with vertex
unknowns ``f`` and a cochain ``omega`` representing w1, taken from a DFS
tree and double-cover lifts), and elimination runs on Python integer
bitmasks. Every recorded fact is re-derived from the facts before it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from ..cycles import lift_reverses, orientation_double_cover
from ..surface import SimplicialSurface, label
from .certificate import Certificate, Node


@dataclass(frozen=True)
class Verification:
    ok: bool
    node: str | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "certificate accepted" if self.ok else f"rejected at node {self.node}: {self.reason}"


class Rejected(Exception):
    def __init__(self, node: str, reason: str):
        super().__init__(reason)
        self.node = node
        self.reason = reason


def _key(seq) -> tuple[int, ...]:
    return tuple(sorted(int(v) for v in seq))


class _Checker:
    def __init__(self, s: SimplicialSurface):
        self.s = s
        faces = set(s.triangles)
        self.faces = faces
        self.edges = list(s.edges)
        self.cands: list[tuple] = []
        for e in self.edges:
            for t in s.triangles:
                if set(e) & set(t):
                    continue
                if any(_key((e[0], e[1], v)) in faces for v in t):
                    continue
                self.cands.append((e, t))
        self.cand_index = {c: i for i, c in enumerate(self.cands)}
        self.of_edge = {e: [i for i, c in enumerate(self.cands) if c[0] == e] for e in self.edges}
        self.box_labels: dict[tuple, list[int]] = {}
        for t1, t2 in combinations(sorted(faces), 2):
            if set(t1) & set(t2):
                continue
            members = [self.cand_index[(e, t2)] for e in combinations(t1, 2) if (e, t2) in self.cand_index]
            members += [self.cand_index[(e, t1)] for e in combinations(t2, 2) if (e, t1) in self.cand_index]
            self.box_labels[(t1, t2)] = members
        self.omega = self._omega()
        # variable layout: x (candidates) | y (edges) | f (vertices); bit n_var is the constant
        self.nx, self.ny = len(self.cands), len(self.edges)
        self.vpos = {v: self.nx + self.ny + i for i, v in enumerate(s.vertices)}
        self.n_var = self.nx + self.ny + len(s.vertices)
        self.const = 1 << self.n_var
        self.edge_pos = {e: self.nx + i for i, e in enumerate(self.edges)}
        rows = []
        for e in self.edges:
            r = 1 << self.edge_pos[e]
            for i in self.of_edge[e]:
                r ^= 1 << i
            rows.append(r)
            a, b = e
            r = (1 << self.edge_pos[e]) ^ (1 << self.vpos[a]) ^ (1 << self.vpos[b])
            if self.omega[e]:
                r ^= self.const
            rows.append(r)
        for members in self.box_labels.values():
            r = 0
            for i in members:
                r ^= 1 << i
            if r:
                rows.append(r)
        self.static = rows
        self._static_reduction: tuple[bool, dict[int, int]] | None = None

    def _omega(self) -> dict:
        """A 1-cochain whose value on every cycle is w1, from a DFS tree."""
        s = self.s
        nbrs = {v: sorted({u for e in s.edges if v in e for u in e if u != v}) for v in s.vertices}
        parent = {s.vertices[-1]: None}
        stack = [s.vertices[-1]]
        while stack:
            v = stack.pop()
            for u in nbrs[v]:
                if u not in parent:
                    parent[u] = v
                    stack.append(u)
        tree = {_key((v, p)) for v, p in parent.items() if p is not None}
        cover = orientation_double_cover(s)
        omega = {}
        for e in s.edges:
            if e in tree:
                omega[e] = 0
                continue
            path = self._tree_path(parent, e[0], e[1])
            omega[e] = lift_reverses(s, path, cover)
        return omega

    @staticmethod
    def _tree_path(parent, a, b):
        anc = [a]
        while parent[anc[-1]] is not None:
            anc.append(parent[anc[-1]])
        pos = {v: i for i, v in enumerate(anc)}
        up = [b]
        while up[-1] not in pos:
            up.append(parent[up[-1]])
        return anc[: pos[up[-1]] + 1] + up[-2::-1]

    def w1(self, edges) -> int:
        return sum(self.omega[e] for e in edges) % 2

    # --- linear reasoning -------------------------------------------------

    def _reduce(self, facts: dict) -> tuple[bool, dict[int, int]]:
        """Eliminate; return (consistent, pivot column -> reduced row)."""
        if self._static_reduction is None:
            self._static_reduction = self._eliminate({}, self.static)
        ok, base = self._static_reduction
        if not ok:
            return False, dict(base)
        rows = [(1 << col) | (self.const if v else 0) for col, v in facts.items()]
        return self._eliminate(base, rows)

    def _eliminate(self, base: dict[int, int], rows) -> tuple[bool, dict[int, int]]:
        pivots = dict(base)
        mask = self.const - 1
        for r in rows:
            for c, pr in pivots.items():
                if r >> c & 1:
                    r ^= pr
            if r & mask == 0:
                if r:
                    return False, pivots
                continue
            c = (r & mask).bit_length() - 1
            for k in list(pivots):
                if pivots[k] >> c & 1:
                    pivots[k] ^= r
            pivots[c] = r
        return True, pivots

    def entailed(self, facts: dict, col: int, value: int) -> bool:
        return self.entailed_by(self._reduce(facts), col, value)

    def entailed_by(self, reduction: tuple[bool, dict[int, int]], col: int, value: int) -> bool:
        ok, pivots = reduction
        if not ok:
            return True
        r = pivots.get(col)
        if r is None or r & (self.const - 1) != 1 << col:
            return False
        return (1 if r & self.const else 0) == value

    def consistent(self, facts: dict) -> bool:
        return self._reduce(facts)[0]

    # --- per-box and hull reasoning --------------------------------------

    def completions(self, facts: dict, members: list[int]) -> list[tuple[int, ...]]:
        known = [facts.get(i) for i in members]
        open_pos = [k for k, v in enumerate(known) if v is None]
        yes = sum(1 for v in known if v == 1)
        out = []
        for bits in product((0, 1), repeat=len(open_pos)):
            if yes + sum(bits) in (0, 2):
                full = list(known)
                for k, b in zip(open_pos, bits):
                    full[k] = b
                out.append(tuple(full))
        return out

    def min_count_positive(self, facts: dict, e) -> bool:
        vals = [facts.get(i) for i in self.of_edge[e]]
        yes = sum(1 for v in vals if v == 1)
        if yes:
            return True
        p = facts.get(self.edge_pos[e])
        return p == 1

    def hull_set(self, facts: dict) -> list[int]:
        free = {e: not self.min_count_positive(facts, e) for e in self.edges}
        live = set(self.s.vertices)
        while True:
            keep = set()
            for v in live:
                us = [u for u in live if u != v and free.get(_key((u, v)))]
                links = [(a, b) for a, b in combinations(sorted(us), 2) if free.get((a, b))]
                # union-find: a link joining an already connected pair closes a cycle
                comp = {u: u for u in us}

                def find(u, comp=comp):
                    while comp[u] != u:
                        u = comp[u]
                    return u

                cyc = False
                for a, b in links:
                    ra, rb = find(a), find(b)
                    if ra == rb:
                        cyc = True
                        break
                    comp[ra] = rb
                if cyc:
                    keep.add(v)
            if keep == live:
                return sorted(live)
            live = keep

    def is_neighborly(self) -> bool:
        n = self.s.n_vertices
        return len(self.edges) == n * (n - 1) // 2


def _fact_col(ck: _Checker, rec: dict) -> tuple[int, int]:
    e = _key(rec["edge"])
    if rec["kind"] == "pierce":
        c = (e, _key(rec["triangle"]))
        if c not in ck.cand_index:
            raise KeyError(f"{label(e)}|{label(c[1])} is not a candidate pair")
        return ck.cand_index[c], int(rec["value"])
    if rec["kind"] == "parity":
        if e not in ck.edge_pos:
            raise KeyError(f"{label(e)} is not an edge")
        return ck.edge_pos[e], int(rec["value"])
    raise KeyError(f"unknown fact kind {rec['kind']!r}")


def _add(facts: dict, col: int, value: int, node: str, what: str):
    if value not in (0, 1):
        raise Rejected(node, f"{what}: value {value} is not a bit")
    old = facts.get(col)
    if old is not None and old != value:
        raise Rejected(node, f"{what} conflicts with an earlier fact")
    facts[col] = value


def _check_steps(ck: _Checker, node: Node, facts: dict):
    steps = node.steps
    i = 0
    while i < len(steps):
        rec = steps[i]
        rule = rec.get("rule")
        try:
            col, val = _fact_col(ck, rec)
        except (KeyError, TypeError) as exc:
            raise Rejected(node.id, f"step {i}: {exc}") from None
        if rule == "edge-cut":
            e = _key(rec["edge"])
            if rec["kind"] != "parity" or ck.of_edge.get(e) or val != 0:
                raise Rejected(node.id, f"step {i}: edge-cut claim on {label(e)} does not hold")
            _add(facts, col, val, node.id, f"step {i}")
            i += 1
        elif rule == "box":
            if rec["kind"] != "pierce" or "box" not in rec:
                raise Rejected(node.id, f"step {i}: malformed box step")
            t1, t2 = (_key(t) for t in rec["box"])
            members = ck.box_labels.get((min(t1, t2), max(t1, t2)))
            if members is None or col not in members:
                raise Rejected(node.id, f"step {i}: label is not in box {label(t1)}|{label(t2)}")
            comps = ck.completions(facts, members)
            k = members.index(col)
            if any(c[k] != val for c in comps):
                raise Rejected(node.id, f"step {i}: box {label(t1)}|{label(t2)} does not force {val}")
            _add(facts, col, val, node.id, f"step {i}")
            i += 1
        elif rule == "parity":
            # a batch of consecutive parity steps is derived from one elimination
            j = i
            batch = []
            while j < len(steps) and steps[j].get("rule") == "parity":
                try:
                    batch.append(_fact_col(ck, steps[j]))
                except (KeyError, TypeError) as exc:
                    raise Rejected(node.id, f"step {j}: {exc}") from None
                j += 1
            reduction = ck._reduce(facts)
            for n, (c, v) in enumerate(batch):
                if not ck.entailed_by(reduction, c, v):
                    raise Rejected(node.id, f"step {i + n}: not entailed by the parity system")
            for n, (c, v) in enumerate(batch):
                _add(facts, c, v, node.id, f"step {i + n}")
            i = j
        else:
            raise Rejected(node.id, f"step {i}: unknown rule {rule!r}")


def _check_contradiction(ck: _Checker, node: Node, facts: dict):
    con = node.contradiction
    kind = con.get("kind")
    w = con.get("witness") or {}
    if kind in ("BoxOverfull", "BoxUnderfull"):
        try:
            t1, t2 = (_key(t) for t in w["box"])
        except (KeyError, TypeError, ValueError):
            raise Rejected(node.id, "box witness missing") from None
        members = ck.box_labels.get((min(t1, t2), max(t1, t2)))
        if not members:
            raise Rejected(node.id, "witness is not a box with labels")
        if ck.completions(facts, members):
            raise Rejected(node.id, f"box {label(t1)}|{label(t2)} still has a valid completion")
        yes = sum(1 for i in members if facts.get(i) == 1)
        if (kind == "BoxOverfull") != (yes > 2):
            raise Rejected(node.id, f"{kind} does not match {yes} circled labels")
    elif kind == "ParityInfeasible":
        _check_parity_witness(ck, node, facts, w)
    elif kind == "HullNoVertex":
        if not ck.is_neighborly():
            raise Rejected(node.id, "hull rule applies to neighborly triangulations only")
        live = ck.hull_set(facts)
        if sorted(int(v) for v in w.get("feasible", [-1])) != live:
            raise Rejected(node.id, f"hull feasible set is {live}, witness disagrees")
        if len(live) >= 4:
            raise Rejected(node.id, "at least four vertices can lie on the hull")
    else:
        raise Rejected(node.id, f"unknown contradiction kind {kind!r}")


def _check_parity_witness(ck: _Checker, node: Node, facts: dict, w: dict):
    try:
        z = {_key(e) for e in w["cycle_space"]}
        expanded = {_key(e) for e in w.get("expanded", [])}
        boxes = [tuple(_key(t) for t in b) for b in w.get("boxes", [])]
        coupled = [tuple(_key(e) for e in p) for p in w.get("coupled", [])]
        claimed = int(w["w1"])
    except (KeyError, TypeError, ValueError):
        raise Rejected(node.id, "malformed parity witness") from None
    if not z <= set(ck.edges) or not expanded <= set(ck.edges):
        raise Rejected(node.id, "witness names a non-edge")
    deg: dict = {}
    for a, b in z:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    if any(d % 2 for d in deg.values()):
        raise Rejected(node.id, "witness edge set is not a cycle-space element")
    if ck.w1(z) != claimed:
        raise Rejected(node.id, "w1 of the witness is misstated")
    if w.get("cycle") is not None:
        cyc = [int(v) for v in w["cycle"]]
        if {_key((cyc[i], cyc[(i + 1) % len(cyc)])) for i in range(len(cyc))} != z:
            raise Rejected(node.id, "witness cycle does not match its edge set")
    # sum of y over z = w1(z); replace expanded y by their pierce sums, add even boxes and coupled equalities
    acc = claimed
    coeff: dict[tuple, int] = {}

    def flip(var):
        coeff[var] = coeff.get(var, 0) ^ 1

    for e in z:
        flip(("y", e))
    for e in expanded:
        flip(("y", e))
        for i in ck.of_edge[e]:
            flip(("x", i))
    for t1, t2 in boxes:
        members = ck.box_labels.get((min(t1, t2), max(t1, t2)))
        if members is None:
            raise Rejected(node.id, "witness box is not a vertex-disjoint pair")
        for i in members:
            flip(("x", i))
    for e1, e2 in coupled:
        if not _is_coupled(ck, e1, e2):
            raise Rejected(node.id, f"{{{label(e1)},{label(e2)}}} is not a coupled pair")
        flip(("y", e1))
        flip(("y", e2))
    for var, c in coeff.items():
        if not c:
            continue
        col = ck.edge_pos[var[1]] if var[0] == "y" else var[1]
        v = facts.get(col)
        if v is None:
            raise Rejected(node.id, "witness leaves an undetermined variable")
        acc ^= v
    if acc != 1:
        raise Rejected(node.id, "witness combination is satisfiable")


def _is_coupled(ck: _Checker, e1, e2) -> bool:
    s = ck.s
    tri1, tri2 = set(s.edge_to_triangles[e1]), set(s.edge_to_triangles[e2])
    if {ck.cands[i][1] for i in ck.of_edge[e1]} != tri2 or {ck.cands[i][1] for i in ck.of_edge[e2]} != tri1:
        return False
    a, b = sorted(tri1)
    c, d = sorted(tri2)
    for m in (((a, c), (b, d)), ((a, d), (b, c))):
        good = True
        for x, y in m:
            members = ck.box_labels.get((min(x, y), max(x, y)), [])
            if sorted(members) != sorted([ck.cand_index[(e1, y)], ck.cand_index[(e2, x)]]):
                good = False
        if good:
            return True
    return False


def _check_root_split(ck: _Checker, cert: Certificate, node: Node, facts: dict):
    if cert.root_cycle is None:
        raise Rejected(node.id, "root has children but no root cycle")
    cyc = [int(v) for v in cert.root_cycle]
    if len(cyc) != 3 or len(set(cyc)) != 3:
        raise Rejected(node.id, "root cycle must have three distinct vertices")
    edges = [_key((cyc[i], cyc[(i + 1) % 3])) for i in range(3)]
    if any(e not in ck.edge_pos for e in edges):
        raise Rejected(node.id, "root cycle uses a non-edge")
    if lift_reverses(ck.s, cyc) != 1:
        raise Rejected(node.id, "root cycle is not orientation-reversing")
    required = set()
    for bits in product((0, 1), repeat=3):
        if sum(bits) % 2 == 0:
            continue
        # an edge without candidates cannot be odd
        if any(b and not ck.of_edge[e] for e, b in zip(edges, bits)):
            continue
        required.add(bits)
    covered: dict[tuple, str] = {}
    for child in node.children:
        d = child.decision or {}
        if d.get("kind") != "parity" or [_key(e) for e in d.get("edges", [])] != edges:
            raise Rejected(child.id, "root child must fix the parities of the root cycle edges")
        vals = tuple(int(v) for v in d["values"])
        if vals in covered:
            raise Rejected(child.id, "duplicate root case")
        covered[vals] = child.id
    by_id = {c.id: c for c in node.children}
    vertices = list(ck.s.vertices)
    for sc in node.symmetric_cases:
        try:
            vals = tuple(int(v) for v in sc["values"])
            rep = by_id[sc["representative"]]
            g = {int(a): int(b) for a, b in sc["automorphism"]}
        except (KeyError, TypeError, ValueError):
            raise Rejected(node.id, "malformed symmetric case") from None
        if sorted(g) != vertices or sorted(g.values()) != vertices:
            raise Rejected(node.id, "symmetry tag is not a vertex permutation")
        if any(_key(g[v] for v in t) not in ck.faces for t in ck.faces):
            raise Rejected(node.id, "symmetry tag is not an automorphism")
        img = {_key((g[a], g[b])) for a, b in edges}
        if img != set(edges):
            raise Rejected(node.id, "symmetry tag does not preserve the root cycle")
        rep_vals = dict(zip(edges, (int(v) for v in rep.decision["values"])))
        mapped = tuple(rep_vals[next(e for e in edges if _key((g[e[0]], g[e[1]])) == f)] for f in edges)
        if mapped != vals:
            raise Rejected(node.id, "symmetry tag does not map the representative onto the case")
        if vals in covered:
            raise Rejected(node.id, "symmetric case duplicates another case")
        covered[vals] = sc["representative"]
    missing = required - set(covered)
    if missing:
        raise Rejected(node.id, f"root cases miss parity pattern(s) {sorted(missing)}")
    if any(sum(v) % 2 == 0 for v in covered):
        raise Rejected(node.id, "root case with even total")


def _check_node(ck: _Checker, cert: Certificate, node: Node, facts: dict, is_root: bool):
    if node.decision is not None:
        d = node.decision
        try:
            if d["kind"] == "parity":
                for e, v in zip(d["edges"], d["values"]):
                    _add(facts, ck.edge_pos[_key(e)], int(v), node.id, "decision")
            elif d["kind"] == "pierce":
                col, val = _fact_col(ck, d)
                _add(facts, col, val, node.id, "decision")
            else:
                raise Rejected(node.id, f"unknown decision kind {d['kind']!r}")
        except (KeyError, TypeError) as exc:
            raise Rejected(node.id, f"malformed decision: {exc}") from None
    _check_steps(ck, node, facts)
    if node.contradiction is not None:
        if node.children:
            raise Rejected(node.id, "node has both a contradiction and children")
        _check_contradiction(ck, node, facts)
        return
    if not node.children:
        raise Rejected(node.id, "open leaf: no contradiction and no children")
    if is_root:
        _check_root_split(ck, cert, node, facts)
    else:
        if node.symmetric_cases:
            raise Rejected(node.id, "symmetry tags are only allowed at the root")
        ds = [c.decision or {} for c in node.children]
        if len(ds) != 2 or any(d.get("kind") != "pierce" for d in ds):
            raise Rejected(node.id, "inner split must have two pierce children")
        try:
            keys = {(tuple(_key(d["edge"])), tuple(_key(d["triangle"]))) for d in ds}
            vals = sorted(int(d["value"]) for d in ds)
        except (KeyError, TypeError):
            raise Rejected(node.id, "malformed pierce decision") from None
        if len(keys) != 1 or vals != [0, 1]:
            raise Rejected(node.id, "inner split must assign both values of one candidate")
    for child in node.children:
        _check_node(ck, cert, child, dict(facts), False)


def verify(s: SimplicialSurface, cert: Certificate | dict | str) -> Verification:
    """Replay a certificate against ``s``; the result is truthy only on full success."""
    try:
        if isinstance(cert, str):
            cert = Certificate.from_json(cert)
        elif isinstance(cert, dict):
            cert = Certificate.from_dict(cert)
    except (KeyError, TypeError, ValueError) as exc:
        return Verification(False, None, f"malformed certificate: {exc}")
    if cert.surface_hash != s.digest():
        return Verification(False, cert.tree.id, "surface hash does not match the triangulation")
    if cert.tree.decision is not None:
        return Verification(False, cert.tree.id, "root node must not carry a decision")
    ck = _Checker(s)
    try:
        _check_node(ck, cert, cert.tree, {}, True)
    except Rejected as r:
        return Verification(False, r.node, r.reason)
    return Verification(True)
