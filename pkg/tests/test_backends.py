"""The numba kernels and the numpy fallback must agree."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rmtminors._backend import get_kernels
from rmtminors.ensembles import sample_wigner, sample_wishart
from rmtminors.linalg import JACOBI_MAX_SWEEPS as SWEEPS, JACOBI_TOL as TOL
from rmtminors.minors import INTERLACE_MAX, TIE_RTOL
from rmtminors.rng import RngStream

NB, NP = get_kernels("numba"), get_kernels("numpy")


def test_names():
    assert NB.NAME == "numba" and NP.NAME == "numpy"
    with pytest.raises(ValueError):
        get_kernels("cuda")


def test_jacobi_agree(nprng):
    for k in range(1, 11):
        a = nprng.normal(size=(k, k))
        a = a + a.T
        w1, v1 = NB.jacobi_eigh(a.copy(), True, TOL, SWEEPS)[:2]
        w2, v2 = NP.jacobi_eigh(a.copy(), True, TOL, SWEEPS)[:2]
        np.testing.assert_allclose(np.sort(w1), np.sort(w2), rtol=0, atol=1e-12 * (1 + abs(a).max()))


def test_lambda1_batch_agree(nprng):
    g = nprng.normal(size=(300, 6, 6))
    mats = g + g.transpose(0, 2, 1)
    np.testing.assert_allclose(NB.lambda1_batch(mats.copy(), TOL, SWEEPS),
                               NP.lambda1_batch(mats.copy(), TOL, SWEEPS), rtol=1e-12, atol=1e-12)


def test_polar_fill_agree():
    raw = RngStream(17).raw(200_001)          # odd length: the last word is ignored
    o1, o2 = np.empty(70_000), np.empty(70_000)
    s1, u1 = NB.polar_fill(raw, o1, 0)
    s2, u2 = NP.polar_fill(raw, o2, 0)
    assert (s1, u1) == (s2, u2)              # identical consumption
    # numpy's log and libm's log may differ in the last ulp
    np.testing.assert_allclose(o1, o2, rtol=4e-16, atol=0)
    assert np.mean(o1 == o2) > 0.99
    # partial fills resume where they left off
    o3 = np.empty(10)
    assert NB.polar_fill(raw[:4], o3, 0)[0] == NP.polar_fill(raw[:4], o3.copy(), 0)[0]


def test_search_agree():
    for i in range(20):
        s = RngStream(400 + i)
        a = (sample_wigner(14, 2.0, s) if i % 2 else sample_wishart(20, 14, s)).entries
        for m in (1, 2, 3, 4):
            g1, g2 = NB.greedy_max(a, m, TOL, SWEEPS), NP.greedy_max(a, m, TOL, SWEEPS)
            assert list(g1[1]) == list(g2[1])
            e1, e2 = NB.enumerate_max(a, m, TIE_RTOL, TOL, SWEEPS), NP.enumerate_max(a, m, TIE_RTOL, TOL, SWEEPS)
            assert e1[0] == pytest.approx(e2[0], rel=1e-12) and list(e1[1]) == list(e2[1])
            init = np.array(g1[1], dtype=np.int64)
            b1 = NB.bnb_max(a, m, g1[0], init, INTERLACE_MAX, TIE_RTOL, TOL, SWEEPS)
            b2 = NP.bnb_max(a, m, g2[0], init, INTERLACE_MAX, TIE_RTOL, TOL, SWEEPS)
            assert b1[0] == pytest.approx(e1[0], rel=1e-12)
            assert list(b1[1]) == list(b2[1]) == list(e1[1])


@pytest.mark.parametrize("flag,expect", [("numpy", "numpy"), ("numba", "numba"), ("", "numba")])
def test_env_flag_selects_backend(flag, expect):
    env = dict(os.environ)
    env["RMTMINORS_BACKEND"] = flag
    out = subprocess.run([sys.executable, "-c", "import rmtminors; print(rmtminors.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == expect


def test_numpy_backend_cli_close_to_numba():
    env = dict(os.environ, RMTMINORS_BACKEND="numpy")
    argv = ["extreme", "--ensemble", "wigner", "--p", "8", "--m", "2", "--strategy", "enumerate",
            "--seed", "7"]
    out = subprocess.run([sys.executable, "-m", "rmtminors", *argv], env=env,
                         capture_output=True, text=True, check=True).stdout
    doc = json.loads(out)
    assert doc["subset"] == [0, 3] and doc["nodes_explored"] == 28
    assert doc["value"] == pytest.approx(3.124301920553197, rel=1e-14)
