"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed in the summary.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import random
import time
from pathlib import Path

import pytest

from helpers import random_surface
from obstructor import load, surface_info
from obstructor.cycles import enumerate_simple_cycles, is_orientation_reversing, lift_reverses, orientation_double_cover
from obstructor.engine import INCONCLUSIVE, SearchConfig, search, verify
from obstructor.intersection import boxes, candidate_pairs, coupled_pairs
from obstructor.surface import heawood_minimum
from obstructor.symmetry import Automorphism, automorphism_group, brute_force_group, is_automorphism

from test_intersection import _pairs, literal_candidates
from test_surface import _heawood_oracle
from test_verify import OPERATORS, golden

criterion = pytest.mark.criterion


def _steps(cert):
    return [s for n in cert.tree.walk() for s in n.steps]


@criterion(1, "Δ₁ and Δ₂ are NonImmersible in < 60 s with verified certificates and two root cases")
def test_nine_vertex_surfaces_are_refuted():
    for name in ("delta1", "delta2"):
        s = load(name)
        t0 = time.perf_counter()
        v = search(s)
        elapsed = time.perf_counter() - t0
        assert v.non_immersible, name
        assert elapsed < 60, (name, elapsed)
        cert = v.certificate
        assert verify(s, cert)
        cases = [tuple(c.decision["values"]) for c in cert.root_cases]
        assert sorted(sum(c) for c in cases) == [1, 3], (name, cases)
        group = automorphism_group(s)
        orbit = {tuple(sorted(g(v) for v in cert.root_cycle)) for g in group}
        expected = (5, 6, 7) if name == "delta1" else (2, 4, 9)
        assert expected in orbit, (name, cert.root_cycle)
    assert search(load("delta1")).certificate.root_cycle == (5, 6, 7)


@criterion(2, "Klein bottle #8 is NonImmersible at depth 0 with the named facts, in < 1 s")
def test_klein_bottle():
    s = load("kb9_008")
    search(s)  # warm the kernels once so the timing reflects the search
    t0 = time.perf_counter()
    v = search(s)
    assert time.perf_counter() - t0 < 1.0
    cert = v.certificate
    assert v.non_immersible and cert.depth == 0 and verify(s, cert)
    notes = {st.get("note") for st in _steps(cert)}
    assert "46 has no candidate triangles" in notes
    assert "47 has no candidate triangles" in notes
    pierce = {(tuple(st["edge"]), tuple(st["triangle"]), st["value"]) for st in _steps(cert) if st["kind"] == "pierce"}
    assert ((6, 7), (4, 5, 8), 0) in pierce
    assert ((6, 7), (1, 3, 4), 0) in pierce
    con = cert.tree.contradiction
    assert con["kind"] == "ParityInfeasible"
    assert con["witness"]["cycle"] == [4, 6, 7]


@criterion(3, "tetrahedron and Császár torus are Inconclusive with an all-zero residual")
def test_negative_controls():
    for name in ("tetrahedron", "csaszar"):
        v = search(load(name))
        assert v.kind == INCONCLUSIVE
        assert v.residual is not None and not any(v.residual.values())
    for seed in range(20):
        s = random_surface(random.Random(seed))
        if surface_info(s).orientable:
            assert search(s).kind == INCONCLUSIVE


@criterion(4, "band walk and double-cover lift agree on all cycles of length ≤ 5; named cycles classified")
def test_orientation_character():
    for name in ("delta1", "delta2", "kb9_008"):
        s = load(name)
        cover = orientation_double_cover(s)
        for cyc, w in enumerate_simple_cycles(s, 5):
            assert lift_reverses(s, cyc, cover) == w, (name, cyc)
    named = [("delta1", (5, 6, 7), 1), ("delta1", (5, 8, 9), 1), ("delta2", (2, 4, 9), 1),
             ("delta2", (2, 6, 8), 1), ("delta2", (1, 2, 8), 0)]
    for name, cyc, w in named:
        assert is_orientation_reversing(load(name), cyc) == w


@criterion(5, "box counts, coupled pairs, automorphisms, χ, f-vectors and neighborliness")
def test_structural_facts():
    for name in ("delta1", "delta2"):
        s = load(name)
        counts = {}
        for b in boxes(s):
            for c in b.labels:
                counts[c.edge] = counts.get(c.edge, 0) + 1
        assert len(counts) == 36 and set(counts.values()) == {4}
        info = surface_info(s)
        assert info.f_vector == (9, 36, 24) and info.euler_characteristic == -3
        assert info.neighborly and not info.orientable
    assert coupled_pairs(load("delta1")) == _pairs(("12", "56"), ("34", "57"), ("67", "89"))
    assert coupled_pairs(load("delta2")) == _pairs(
        ("12", "56"), ("13", "47"), ("15", "29"), ("18", "25"), ("24", "37"),
        ("34", "57"), ("38", "69"), ("49", "68"), ("67", "89"),
    )
    for name, text in [("delta1", "(1 8 4 2 9 3)(5 6 7)"), ("delta2", "(1 8 3)(5 6 7)(2 9 4)"),
                       ("delta2", "(1 6 3 5 8 7)(2 9 4)")]:
        s = load(name)
        assert is_automorphism(s, Automorphism.from_cycles(text, s.vertices))
    kb = surface_info(load("kb9_008"))
    assert kb.f_vector == (9, 27, 18) and kb.euler_characteristic == 0 and not kb.orientable


@criterion(6, "golden certificates verify and ≥ 1000 fuzzed mutations are all rejected")
def test_verifier_independence():
    import copy

    rng = random.Random(6)
    surfaces = {n: load(n) for n in ("kb9_008", "delta1", "delta2")}
    certs = {n: golden(n) for n in surfaces}
    for n in surfaces:
        assert verify(surfaces[n], certs[n])
    done = 0
    while done < 1000:
        n = rng.choice(sorted(surfaces))
        cert = copy.deepcopy(certs[n])
        if not rng.choice(OPERATORS)(cert, rng, surfaces[n]):
            continue
        done += 1
        assert not verify(surfaces[n], cert), n


@criterion(7, "certificates are byte-reproducible; --no-symmetry gives the same verdicts within 10×")
def test_determinism_and_symmetry():
    golden_dir = Path(__file__).parent / "golden"
    for name in ("kb9_008", "delta1", "delta2"):
        s = load(name)
        text = search(s).certificate.to_json()
        assert text == search(s).certificate.to_json()
        assert text == (golden_dir / f"{name}.cert.json").read_text(encoding="utf-8")
    for name in ("kb9_008", "delta1", "delta2", "tetrahedron", "csaszar"):
        s = load(name)
        t0 = time.perf_counter()
        a = search(s)
        t1 = time.perf_counter()
        b = search(s, SearchConfig(symmetry=False))
        t2 = time.perf_counter()
        assert a.kind == b.kind, name
        if b.certificate:
            assert verify(s, b.certificate)
            assert not b.certificate.tree.symmetric_cases
        assert t2 - t1 <= 10 * max(t1 - t0, 0.05), name


@criterion(8, "brute-force oracles: candidates, automorphism groups, Heawood bound")
def test_brute_force_oracles():
    rng = random.Random(8)
    for _ in range(50):
        s = random_surface(rng)
        assert set(candidate_pairs(s)) == literal_candidates(s)
    for name in ("delta1", "delta2"):
        s = load(name)
        assert set(automorphism_group(s)) == set(brute_force_group(s))
    for chi in range(-30, 3):
        assert heawood_minimum(chi) == _heawood_oracle(chi)


if __name__ == "__main__":
    import subprocess
    import sys

    raise SystemExit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q"]))
