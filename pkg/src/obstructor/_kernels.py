"""Hot numeric kernels with numba and pure-numpy implementations.

Set ``OBSTRUCTOR_NUMBA=0`` to force the numpy path (also used automatically
when numba cannot be imported). Both paths are always importable so tests and
the benchmark can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("OBSTRUCTOR_NUMBA", "1") != "0"


def gf2_rref_numpy(m: np.ndarray, n_pivot_cols: int) -> np.ndarray:
    """Reduce ``m`` (uint8, modified in place) to reduced row echelon form over GF(2).

    Pivots are searched in the first ``n_pivot_cols`` columns only; row
    operations span the full width so augmented columns ride along.
    Returns the pivot column indices.
    """
    rows = m.shape[0]
    pivots = []
    r = 0
    for c in range(n_pivot_cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = m[:, c].astype(bool)
        hit[r] = False
        m[hit] ^= m[r]
        pivots.append(c)
        r += 1
    return np.asarray(pivots, dtype=np.int64)


def face_filter_numpy(perms: np.ndarray, faces: np.ndarray, n: int) -> np.ndarray:
    """Boolean mask of the permutations (rows of ``perms``) mapping every face to a face.

    ``faces`` holds 0-based vertex triples; ``n`` is the vertex count.
    """
    table = np.zeros(n * n * n, dtype=bool)
    f = np.sort(faces, axis=1)
    table[(f[:, 0] * n + f[:, 1]) * n + f[:, 2]] = True
    ok = np.ones(len(perms), dtype=bool)
    for a, b, c in faces:
        img = np.sort(perms[:, [a, b, c]], axis=1)
        ok &= table[(img[:, 0] * n + img[:, 1]) * n + img[:, 2]]
    return ok


if HAVE_NUMBA:

    @njit(cache=True)
    def _gf2_rref_nb(m, n_pivot_cols):
        rows, width = m.shape
        pivots = np.empty(n_pivot_cols, dtype=np.int64)
        n_piv = 0
        r = 0
        for c in range(n_pivot_cols):
            if r == rows:
                break
            p = -1
            for i in range(r, rows):
                if m[i, c] != 0:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                for j in range(width):
                    tmp = m[r, j]
                    m[r, j] = m[p, j]
                    m[p, j] = tmp
            for i in range(rows):
                if i != r and m[i, c] != 0:
                    # columns left of c are already zero in the pivot row
                    for j in range(c, width):
                        m[i, j] ^= m[r, j]
            pivots[n_piv] = c
            n_piv += 1
            r += 1
        return pivots[:n_piv]

    @njit(cache=True)
    def _face_filter_nb(perms, faces, n):
        table = np.zeros(n * n * n, dtype=np.bool_)
        for k in range(faces.shape[0]):
            a, b, c = faces[k, 0], faces[k, 1], faces[k, 2]
            lo = min(a, min(b, c))
            hi = max(a, max(b, c))
            mid = a + b + c - lo - hi
            table[(lo * n + mid) * n + hi] = True
        out = np.ones(perms.shape[0], dtype=np.bool_)
        for p in range(perms.shape[0]):
            for k in range(faces.shape[0]):
                a = perms[p, faces[k, 0]]
                b = perms[p, faces[k, 1]]
                c = perms[p, faces[k, 2]]
                lo = min(a, min(b, c))
                hi = max(a, max(b, c))
                mid = a + b + c - lo - hi
                if not table[(lo * n + mid) * n + hi]:
                    out[p] = False
                    break
        return out

    def gf2_rref_numba(m: np.ndarray, n_pivot_cols: int) -> np.ndarray:
        return _gf2_rref_nb(m, n_pivot_cols)

    def face_filter_numba(perms: np.ndarray, faces: np.ndarray, n: int) -> np.ndarray:
        return _face_filter_nb(perms.astype(np.int64), faces.astype(np.int64), n)

else:  # pragma: no cover
    gf2_rref_numba = gf2_rref_numpy
    face_filter_numba = face_filter_numpy


gf2_rref = gf2_rref_numba if USE_NUMBA else gf2_rref_numpy
face_filter = face_filter_numba if USE_NUMBA else face_filter_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
