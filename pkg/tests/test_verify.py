import copy
import json
import random
from pathlib import Path

import pytest

from obstructor import load
from obstructor.engine import SearchConfig, search, verify
from obstructor.symmetry import Automorphism, is_automorphism

GOLDEN = Path(__file__).parent / "golden"
NAMES = ["kb9_008", "delta1", "delta2"]
KINDS = ["BoxOverfull", "BoxUnderfull", "ParityInfeasible", "HullNoVertex"]


def golden(name):
    return json.loads((GOLDEN / f"{name}.cert.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("name", NAMES)
def test_golden_certificates_verify(name):
    result = verify(load(name), golden(name))
    assert result, result


@pytest.mark.parametrize("name", NAMES)
def test_search_reproduces_golden_bytes(name):
    text = search(load(name)).certificate.to_json()
    assert text == (GOLDEN / f"{name}.cert.json").read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["delta1", "delta2"])
@pytest.mark.parametrize(
    "cfg",
    [
        SearchConfig(symmetry=False),
        SearchConfig(branch="box"),
        SearchConfig(box_rows="coupled"),
        SearchConfig(box_rows="exact"),
        SearchConfig(box_rows="all"),
    ],
    ids=["no-symmetry", "box-branching", "coupled", "exact", "all"],
)
def test_other_configurations_verify(name, cfg):
    s = load(name)
    assert verify(s, search(s, cfg).certificate)


def test_wrong_surface_hash_rejected(delta1, delta2):
    result = verify(delta2, golden("delta1"))
    assert not result
    assert result.reason == "surface hash does not match the triangulation"


def test_malformed_json_rejected(delta1):
    assert not verify(delta1, "{not json")
    assert not verify(delta1, {"surface_hash": delta1.digest()})


def test_removed_leaf_contradiction_names_node(delta1):
    cert = golden("delta1")
    leaf = _nodes(cert["tree"])[-1]
    leaf["contradiction"] = None
    result = verify(delta1, cert)
    assert not result
    assert result.node == leaf["id"]


def _nodes(tree):
    out = [tree]
    for c in tree["children"]:
        out.extend(_nodes(c))
    return out


# mutation operators: each returns True when it changed the certificate in a proof-breaking way


def drop_contradiction(cert, rng, s):
    leaves = [n for n in _nodes(cert["tree"]) if n["contradiction"]]
    rng.choice(leaves)["contradiction"] = None
    return True


def delete_child(cert, rng, s):
    inner = [n for n in _nodes(cert["tree"]) if n["children"]]
    if not inner:
        return False
    n = rng.choice(inner)
    n["children"].pop(rng.randrange(len(n["children"])))
    return True


def flip_inner_decision(cert, rng, s):
    kids = [n for n in _nodes(cert["tree"]) if n["decision"] and n["decision"]["kind"] == "pierce"]
    if not kids:
        return False
    d = rng.choice(kids)["decision"]
    d["value"] = 1 - d["value"]
    return True


def change_root_case(cert, rng, s):
    kids = cert["tree"]["children"]
    if not kids:
        return False
    d = rng.choice(kids)["decision"]
    i = rng.randrange(len(d["values"]))
    d["values"][i] ^= 1
    return True


def change_kind(cert, rng, s):
    leaves = [n for n in _nodes(cert["tree"]) if n["contradiction"]]
    con = rng.choice(leaves)["contradiction"]
    con["kind"] = rng.choice([k for k in KINDS if k != con["kind"]])
    return True


def drop_cycle_edge(cert, rng, s):
    ws = [n["contradiction"]["witness"] for n in _nodes(cert["tree"])
          if n["contradiction"] and n["contradiction"]["kind"] == "ParityInfeasible"
          and n["contradiction"]["witness"]["cycle_space"]]
    if not ws:
        return False
    w = rng.choice(ws)
    w["cycle_space"].pop(rng.randrange(len(w["cycle_space"])))
    return True


def toggle_w1(cert, rng, s):
    ws = [n["contradiction"]["witness"] for n in _nodes(cert["tree"])
          if n["contradiction"] and n["contradiction"]["kind"] == "ParityInfeasible"]
    if not ws:
        return False
    w = rng.choice(ws)
    w["w1"] = 1 - int(w["w1"])
    return True


def bogus_box(cert, rng, s):
    ws = [n["contradiction"]["witness"] for n in _nodes(cert["tree"])
          if n["contradiction"] and n["contradiction"]["kind"] == "ParityInfeasible"]
    if not ws:
        return False
    t1 = rng.choice(s.triangles)
    t2 = rng.choice([t for t in s.triangles if set(t) & set(t1)])
    rng.choice(ws).setdefault("boxes", []).append([list(t1), list(t2)])
    return True


def change_hull_set(cert, rng, s):
    ws = [n["contradiction"]["witness"] for n in _nodes(cert["tree"])
          if n["contradiction"] and n["contradiction"]["kind"] == "HullNoVertex"]
    if not ws:
        return False
    w = rng.choice(ws)
    v = rng.choice(s.vertices)
    feas = set(w["feasible"])
    feas ^= {v}
    w["feasible"] = sorted(feas)
    return True


def drop_symmetric_case(cert, rng, s):
    tags = cert["tree"]["symmetric_cases"]
    if not tags:
        return False
    tags.pop(rng.randrange(len(tags)))
    return True


def break_symmetric_case(cert, rng, s):
    tags = cert["tree"]["symmetric_cases"]
    if not tags:
        return False
    tag = rng.choice(tags)
    if rng.random() < 0.3:
        tag["representative"] = "0.99"
        return True
    pairs = tag["automorphism"]
    i, j = rng.sample(range(len(pairs)), 2)
    pairs[i][1], pairs[j][1] = pairs[j][1], pairs[i][1]
    g = Automorphism.from_mapping({a: b for a, b in pairs})
    # a swap can land on another automorphism that maps the case correctly; only count real breaks
    return not is_automorphism(s, g)


def change_hash(cert, rng, s):
    h = cert["surface_hash"]
    cert["surface_hash"] = h[:-1] + ("0" if h[-1] != "0" else "1")
    return True


OPERATORS = [
    drop_contradiction, delete_child, flip_inner_decision, change_root_case, change_kind, drop_cycle_edge,
    toggle_w1, bogus_box, change_hull_set, drop_symmetric_case, break_symmetric_case, change_hash,
]


def test_fuzzed_mutations_are_rejected():
    rng = random.Random(20261015)
    surfaces = {n: load(n) for n in NAMES}
    certs = {n: golden(n) for n in NAMES}
    applied: dict[str, int] = {}
    accepted = []
    while sum(applied.values()) < 1200:
        name = rng.choice(NAMES)
        op = rng.choice(OPERATORS)
        cert = copy.deepcopy(certs[name])
        if not op(cert, rng, surfaces[name]):
            continue
        applied[op.__name__] = applied.get(op.__name__, 0) + 1
        if verify(surfaces[name], cert):
            accepted.append((name, op.__name__))
    assert not accepted, accepted[:10]
    assert len(applied) == len(OPERATORS)


@pytest.mark.parametrize("name", NAMES)
def test_certificate_json_round_trip(name):
    from obstructor.engine import Certificate

    text = (GOLDEN / f"{name}.cert.json").read_text(encoding="utf-8")
    cert = Certificate.from_json(text)
    assert cert.to_json() == text
    assert cert.n_nodes == {"kb9_008": 1, "delta1": 15, "delta2": 47}[name]
