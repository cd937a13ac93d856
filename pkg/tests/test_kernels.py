import random

import numpy as np
import pytest

from evokit import _fallback, kernels


def _mat(rng, n):
    return [[rng.randint(-3, 3) if j > i else 0 for j in range(n)] for i in range(n)]


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_fallback_selected(monkeypatch):
    import importlib

    monkeypatch.setenv("EVOKIT_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("EVOKIT_PURE")
        importlib.reload(kernels)


compiled = pytest.importorskip("evokit._kernels")


def test_integer_chain_agrees():
    rng = random.Random(11)
    for _ in range(300):
        m = _mat(rng, rng.randint(1, 5))
        assert compiled.principal_index_int(m) == _fallback.principal_index_int(m)


def test_integer_chain_overflow_falls_back():
    big = 3 * 10**18
    m = [[0, big, big], [0, 0, big], [0, 0, 0]]
    assert compiled.principal_index_int(m) == _fallback.principal_index_int(m)
    assert compiled.principal_index_int(m)[0] == 5


def test_lm_agrees():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    Z0 = np.random.default_rng(0).normal(size=(16, 4))
    for mu in (1e-2, 0.0):
        Zc, rc = compiled.lm_bq_batch(A, Z0, mu, 40)
        Zp, rp = _fallback.lm_bq_batch(A, Z0, mu, 40)
        assert np.allclose(Zc, Zp, atol=1e-8)
        assert np.allclose(rc, rp, atol=1e-10)
