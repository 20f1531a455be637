import subprocess
import sys
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from obstructor import _kernels, load


def int_rank(m: np.ndarray) -> int:
    pivots: dict[int, int] = {}
    for row in m:
        r = int("".join(map(str, row)) or "0", 2)
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                break
            r ^= pivots[top]
    return len(pivots)


matrices = st.tuples(st.integers(1, 24), st.integers(1, 30)).flatmap(
    lambda shape: arrays(np.uint8, shape, elements=st.integers(0, 1))
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rref_backends_agree(m):
    a, b = m.copy(), m.copy()
    pa = _kernels.gf2_rref_numpy(a, m.shape[1])
    pb = _kernels.gf2_rref_numba(b, m.shape[1])
    assert np.array_equal(pa, pb)
    assert np.array_equal(a, b)
    assert len(pa) == int_rank(m)


@settings(max_examples=60, deadline=None)
@given(matrices, st.integers(0, 30))
def test_rref_with_augmented_columns(m, k):
    k = min(k, m.shape[1])
    a, b = m.copy(), m.copy()
    assert np.array_equal(_kernels.gf2_rref_numpy(a, k), _kernels.gf2_rref_numba(b, k))
    assert np.array_equal(a, b)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rref_shape(m):
    a = m.copy()
    piv = _kernels.gf2_rref_numpy(a, m.shape[1])
    for r, c in enumerate(piv):
        col = a[:, c]
        assert col[r] == 1 and col.sum() == 1
    assert not a[len(piv):].any()


@pytest.mark.parametrize("name", ["tetrahedron", "csaszar", "kb9_008"])
def test_face_filter_backends_agree(name):
    s = load(name)
    n = s.n_vertices
    faces = np.array([[v - 1 for v in t] for t in s.triangles], dtype=np.int64)
    rng = np.random.default_rng(3)
    perms = np.array([rng.permutation(n) for _ in range(3000)] + [np.arange(n)], dtype=np.int64)
    a = _kernels.face_filter_numpy(perms, faces, n)
    b = _kernels.face_filter_numba(perms, faces, n)
    assert np.array_equal(a, b)
    assert a[-1]


def test_face_filter_counts_tetrahedron_group():
    faces = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    perms = np.array(list(permutations(range(4))))
    assert _kernels.face_filter_numpy(perms, faces, 4).sum() == 24


def test_numpy_backend_selected_by_environment():
    code = (
        "from obstructor import _kernels, load; from obstructor.engine import search;"
        "print(_kernels.backend()); print(search(load('delta1')).certificate.to_json(), end='')"
    )
    outs = {}
    for flag in ("0", "1"):
        proc = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env={"OBSTRUCTOR_NUMBA": flag, "PATH": ""}
        )
        assert proc.returncode == 0, proc.stderr
        backend, _, cert = proc.stdout.partition("\n")
        outs[backend] = cert
    assert set(outs) == {"numpy", "numba"}
    assert outs["numpy"] == outs["numba"]
