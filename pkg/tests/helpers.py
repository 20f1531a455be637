"""Random valid triangulations for property tests and oracles."""

from __future__ import annotations

import random

from obstructor import load
from obstructor.surface import SimplicialSurface, build_surface

SEEDS = ("tetrahedron", "csaszar", "kb9_008", "delta1", "delta2")


def _flip(tris: set, rng: random.Random) -> bool:
    """Replace triangles abc, abd by acd, bcd when cd is not yet an edge."""
    edges: dict[tuple, list] = {}
    for t in tris:
        for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            edges.setdefault(e, []).append(t)
    e = rng.choice(sorted(edges))
    t1, t2 = edges[e]
    c = next(v for v in t1 if v not in e)
    d = next(v for v in t2 if v not in e)
    if tuple(sorted((c, d))) in edges:
        return False
    a, b = e
    tris -= {t1, t2}
    tris |= {tuple(sorted((a, c, d))), tuple(sorted((b, c, d)))}
    return True


def _subdivide(tris: set, rng: random.Random) -> None:
    t = rng.choice(sorted(tris))
    n = max(v for tri in tris for v in tri) + 1
    a, b, c = t
    tris.discard(t)
    tris |= {(a, b, n), (a, c, n), (b, c, n)}


def random_surface(rng: random.Random, max_vertices: int = 10, moves: int = 12) -> SimplicialSurface:
    base = load(rng.choice(SEEDS))
    tris = set(base.triangles)
    for _ in range(moves):
        n = len({v for t in tris for v in t})
        if n < max_vertices and rng.random() < 0.3:
            _subdivide(tris, rng)
        else:
            _flip(tris, rng)
    verts = sorted({v for t in tris for v in t})
    perm = verts[:]
    rng.shuffle(perm)
    relabel = dict(zip(verts, perm))
    return build_surface([[relabel[v] for v in t] for t in tris])


def _tris(*labels):
    return [tuple(int(c) for c in str(x)) for x in labels]


INTEGRITY = {
    "delta1": {
        "faces": _tris(123, 124, 568, 569, 348, 349, 189, 289, 269, 157),
        "summary": "V=9 E=36 F=24 χ=-3 non-orientable h=5 neighborly",
        "automorphisms": ["(1 8 4 2 9 3)(5 6 7)"],
    },
    "delta2": {
        "faces": [],
        "summary": "V=9 E=36 F=24 χ=-3 non-orientable h=5 neighborly",
        "automorphisms": ["(1 8 3)(5 6 7)(2 9 4)", "(1 6 3 5 8 7)(2 9 4)"],
    },
    "kb9_008": {
        "faces": _tris(246, 468, 347, 457, 679, 458, 257, 134, 267),
        "summary": "V=9 E=27 F=18 χ=0 non-orientable h=2",
        "automorphisms": [],
    },
    "csaszar": {"faces": [], "summary": "V=7 E=21 F=14 χ=0 orientable g=1 neighborly", "automorphisms": []},
    "tetrahedron": {"faces": [], "summary": "V=4 E=6 F=4 χ=2 orientable g=0 neighborly", "automorphisms": []},
}


def bundled_data_problems() -> list[str]:
    """Cross-checks of the bundled triangulations against known facts; empty when all hold."""
    from obstructor import load
    from obstructor.surface import SurfaceError, surface_info
    from obstructor.symmetry import Automorphism, is_automorphism

    problems = []
    for name, facts in INTEGRITY.items():
        try:
            s = load(name)
        except (OSError, SurfaceError) as exc:
            problems.append(f"{name}: {exc}")
            continue
        missing = [t for t in facts["faces"] if t not in s.triangles]
        if missing:
            problems.append(f"{name}: missing faces {missing}")
        summary = surface_info(s).summary()
        if summary != facts["summary"]:
            problems.append(f"{name}: {summary!r} != {facts['summary']!r}")
        for text in facts["automorphisms"]:
            if not is_automorphism(s, Automorphism.from_cycles(text, s.vertices)):
                problems.append(f"{name}: {text} is not an automorphism")
    return problems
