"""Compare the numba and numpy kernels, and time the end-to-end search under each.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit
from itertools import permutations

import numpy as np

from obstructor import _kernels, load
from obstructor.engine.state import _system, context, init_state


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def parity_matrix(name: str, provenance: bool) -> tuple[np.ndarray, int]:
    s = load(name)
    st = init_state(s, "exact")
    return _system(context(s, "exact"), st.x, st.y, provenance)


def rref_case(m: np.ndarray, k: int, repeat: int) -> tuple[float, float]:
    _kernels.gf2_rref_numba(m.copy(), k)  # compile outside the timing
    t_np = best(lambda: _kernels.gf2_rref_numpy(m.copy(), k), repeat)
    t_nb = best(lambda: _kernels.gf2_rref_numba(m.copy(), k), repeat)
    return t_np, t_nb


def filter_case(name: str, repeat: int) -> tuple[float, float]:
    s = load(name)
    n = s.n_vertices
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    faces = np.array([[s.index[v] for v in t] for t in s.triangles], dtype=np.int64)
    _kernels.face_filter_numba(perms[:10], faces, n)
    t_np = best(lambda: _kernels.face_filter_numpy(perms, faces, n), repeat)
    t_nb = best(lambda: _kernels.face_filter_numba(perms, faces, n), repeat)
    return t_np, t_nb


def search_time(name: str, flag: str, repeat: int) -> float:
    code = (
        "import timeit; from obstructor import load; from obstructor.engine import search;"
        f"s = load({name!r}); search(s);"
        f"print(min(timeit.repeat(lambda: search(s), number=1, repeat={repeat})))"
    )
    env = dict(os.environ, OBSTRUCTOR_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not importable; nothing to compare")

    rows = []
    for name in ("delta1", "delta2"):
        for prov in (False, True):
            m, k = parity_matrix(name, prov)
            rows.append((f"gf2_rref {name} {m.shape[0]}x{m.shape[1]}", *rref_case(m, k, args.repeat)))
    rng = np.random.default_rng(0)
    big = rng.integers(0, 2, size=(600, 800), dtype=np.uint8)
    rows.append(("gf2_rref random 600x800", *rref_case(big, 800, args.repeat)))
    rows.append(("face_filter delta1 9!", *filter_case("delta1", args.repeat)))
    for name in ("delta1", "delta2"):
        rows.append(
            (f"search {name}", search_time(name, "0", args.repeat), search_time(name, "1", args.repeat))
        )

    width = max(len(r[0]) for r in rows)
    print(f"{'case'.ljust(width)}  {'numpy ms':>10}  {'numba ms':>10}  {'speedup':>8}")
    for label, t_np, t_nb in rows:
        print(f"{label.ljust(width)}  {t_np * 1e3:10.2f}  {t_nb * 1e3:10.2f}  {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
