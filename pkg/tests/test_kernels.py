import os
import subprocess
import sys

import numpy as np
import pytest

from tpc import _jit, kernels


def bell(n):
    """Bell numbers via the Bell triangle."""
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[-1]


@pytest.mark.parametrize("n", range(1, 11))
def test_restricted_growth_string_count(n):
    rgs = kernels.restricted_growth_strings(n)
    assert len(rgs) == bell(n)
    assert len({tuple(r) for r in rgs.tolist()}) == len(rgs)
    assert (rgs[:, 0] == 0).all()
    # each entry is at most one more than the running maximum before it
    running = np.maximum.accumulate(rgs, axis=1)
    assert (rgs[:, 1:] <= running[:, :-1] + 1).all()
    assert [tuple(r) for r in rgs.tolist()] == sorted(tuple(r) for r in rgs.tolist())


def test_known_bell_values():
    assert len(kernels.restricted_growth_strings(8)) == 4140
    assert len(kernels.restricted_growth_strings(10)) == 115975


@pytest.mark.parametrize("seed", range(5))
def test_similarity_backends_agree(seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(30, 40)).astype(np.uint8)
    w = rng.random(40)
    a = kernels.similarity(bits, w, backend="numba")
    b = kernels.similarity(bits, w, backend="numpy")
    assert np.allclose(a, b, rtol=0, atol=1e-10)
    for P in (a, b):
        assert np.array_equal(P, P.T)
        assert not np.diag(P).any()


@pytest.mark.parametrize("seed", range(5))
def test_local_moves_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = 25
    A = np.triu(rng.random((n, n)), 1)
    A = A + A.T
    results = []
    for backend in ("numba", "numpy"):
        comm = np.arange(n, dtype=np.int64)
        degree = A.sum(axis=1)
        tot = degree.copy()
        order = np.random.default_rng(seed).permutation(n).astype(np.int64)
        moves = kernels.local_moves(A, order, comm, degree, tot, A.sum(), 1e-12, backend=backend)
        results.append((moves, comm.tolist(), tot.copy()))
    assert results[0][:2] == results[1][:2]
    assert np.allclose(results[0][2], results[1][2])


def test_partition_scores_backends_agree():
    rng = np.random.default_rng(3)
    B = rng.normal(size=(7, 7))
    rgs = kernels.restricted_growth_strings(7)
    a = kernels.partition_scores(rgs, B, backend="numba")
    b = kernels.partition_scores(rgs, B, backend="numpy")
    assert np.allclose(a, b, atol=1e-12)
    r = rgs[123]
    assert a[123] == pytest.approx(sum(B[i, j] for i in range(7) for j in range(7) if r[i] == r[j]))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.similarity(np.zeros((2, 2)), np.ones(2), backend="cuda")


@pytest.mark.parametrize("value, expected", [("1", True), ("true", True), ("ON", True), ("0", False), ("", False)])
def test_env_flag_parsing(value, expected):
    assert _jit.numba_disabled_by_env({_jit.ENV_FLAG: value}) is expected


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, **{_jit.ENV_FLAG: "1"})
    out = subprocess.run(
        [sys.executable, "-c", "from tpc import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
