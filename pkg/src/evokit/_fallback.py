"""Pure Python / numpy versions of the compiled kernels.

Both functions here have the same signatures and results as their
counterparts in ``_kernels.pyx``; ``kernels`` picks one at import time.
"""
from __future__ import annotations

from math import gcd

import numpy as np


# ---------------------------------------------------------------- integer chains

def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    return row if g in (0, 1) else [x // g for x in row]


def _echelon(rows: list[list[int]], n: int) -> list[list[int]]:
    """Fraction-free row echelon form over the integers (rows kept primitive)."""
    m = [r for r in rows if any(r)]
    out = []
    for c in range(n):
        piv = next((r for r in m if r[c]), None)
        if piv is None:
            continue
        m.remove(piv)
        p = piv[c]
        nxt = []
        for r in m:
            x = r[c]
            if x:
                r = _primitive([p * a - x * b for a, b in zip(r, piv)])
                if any(r):
                    nxt.append(r)
            else:
                nxt.append(r)
        m = nxt
        out.append(piv)
        if not m:
            break
    return out


def _product(A: list[list[int]], U: list[list[int]], V: list[list[int]], n: int) -> list[list[int]]:
    if not U or not V:
        return []
    had = _echelon([[a * b for a, b in zip(u, v)] for u in U for v in V], n)
    imgs = []
    for h in had:
        out = [0] * n
        for i, hi in enumerate(h):
            if hi:
                Ai = A[i]
                for k in range(n):
                    if Ai[k]:
                        out[k] += hi * Ai[k]
        imgs.append(_primitive(out))
    return _echelon(imgs, n)


def principal_index_int(matrix) -> tuple[int | None, int | None, tuple[int, ...]]:
    """Principal chain of an integer structure matrix, dimensions only.

    Returns (index, stabilized_at, dims) with dims[k-1] = dim E^k. The chain
    is nested, so two consecutive terms are equal exactly when their
    dimensions agree; the stopping rule matches ``powers.principal_powers``.
    """
    A = [[int(x) for x in row] for row in matrix]
    n = len(A)
    E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    dims = [n]
    run_of = [0]
    run_value = [E]
    run_start = [1]
    cache: dict = {}
    cap = 2**n + 1
    k = 2
    while k <= cap:
        pairs = set()
        for i in range(1, k // 2 + 1):
            a, b = run_of[i - 1], run_of[k - i - 1]
            pairs.add((min(a, b), max(a, b)))
        rows: list = []
        for key in pairs:
            P = cache.get(key)
            if P is None:
                P = _product(A, run_value[key[0]], run_value[key[1]], n)
                cache[key] = P
            rows.extend(P)
        S = _echelon(rows, n)
        d = len(S)
        prev_run = run_of[-1]
        if d == dims[-1]:
            dims.append(d)
            run_of.append(prev_run)
            p = run_start[prev_run]
            if k >= 2 * p - 1 and k > p:
                return None, p, tuple(dims)
        else:
            dims.append(d)
            run_value.append(S)
            run_start.append(k)
            run_of.append(len(run_value) - 1)
            if d == 0:
                return k, None, tuple(dims)
        k += 1
    raise RuntimeError(f"principal chain did not settle by exponent {cap}")


# ---------------------------------------------------------------- bq search

def _pairs(n):
    iu, ju = np.triu_indices(n, 1)
    return iu, ju


def bq_residuals(A: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Residuals of f(e_i e_j) = g(e_i e_j) = (f_i g_j + f_j g_i)/2, batched over rows of Z."""
    n = A.shape[0]
    f, g = Z[:, :n], Z[:, n:]
    fg = f * g
    iu, ju = _pairs(n)
    return np.concatenate(
        [f @ A.T - fg, g @ A.T - fg, 0.5 * (f[:, iu] * g[:, ju] + f[:, ju] * g[:, iu])], axis=1
    )


def _system(A, Z, mu):
    S, n2 = Z.shape
    n = n2 // 2
    f, g = Z[:, :n], Z[:, n:]
    iu, ju = _pairs(n)
    npair = len(iu)
    m = 2 * n + npair + (3 if mu > 0 else 0)
    r = np.empty((S, m))
    J = np.zeros((S, m, n2))
    fg = f * g
    r[:, :n] = f @ A.T - fg
    r[:, n:2 * n] = g @ A.T - fg
    r[:, 2 * n:2 * n + npair] = 0.5 * (f[:, iu] * g[:, ju] + f[:, ju] * g[:, iu])
    idx = np.arange(n)
    J[:, :n, :n] = A
    J[:, idx, idx] -= g
    J[:, idx, n + idx] = -f
    J[:, n + idx, n:] = A
    J[:, n + idx, n + idx] -= f
    J[:, n + idx, idx] = -g
    rows = 2 * n + np.arange(npair)
    J[:, rows, iu] = 0.5 * g[:, ju]
    J[:, rows, ju] = 0.5 * g[:, iu]
    J[:, rows, n + ju] = 0.5 * f[:, iu]
    J[:, rows, n + iu] = 0.5 * f[:, ju]
    if mu > 0:
        # barrier keeping f, g away from zero and from each other's line
        b = 2 * n + npair
        ff = np.einsum("si,si->s", f, f)
        gg = np.einsum("si,si->s", g, g)
        fgd = np.einsum("si,si->s", f, g)
        N = ff * gg + 1e-300
        D = ff * gg - fgd**2
        s = D / N
        dDf = 2 * gg[:, None] * f - 2 * fgd[:, None] * g
        dDg = 2 * ff[:, None] * g - 2 * fgd[:, None] * f
        dNf = 2 * gg[:, None] * f
        dNg = 2 * ff[:, None] * g
        dsf = (dDf * N[:, None] - D[:, None] * dNf) / N[:, None] ** 2
        dsg = (dDg * N[:, None] - D[:, None] * dNg) / N[:, None] ** 2
        q = s + 1e-12
        r[:, b] = mu / np.sqrt(q)
        coef = -0.5 * mu * q**-1.5
        J[:, b, :n] = coef[:, None] * dsf
        J[:, b, n:] = coef[:, None] * dsg
        nf, ng = np.sqrt(ff) + 1e-12, np.sqrt(gg) + 1e-12
        r[:, b + 1] = mu / nf
        r[:, b + 2] = mu / ng
        J[:, b + 1, :n] = -(mu / nf**3)[:, None] * f
        J[:, b + 2, n:] = -(mu / ng**3)[:, None] * g
    return r, J


def lm_bq_batch(A, Z0, mu: float = 0.0, iters: int = 100, tol: float = 1e-14):
    """Levenberg-Marquardt on the bq residuals (plus barrier when mu > 0) for a
    batch of starting points, one per row of Z0. Returns (Z, max |bq residual|)."""
    A = np.ascontiguousarray(A, dtype=float)
    Z = np.array(Z0, dtype=float, copy=True)
    S, n2 = Z.shape
    lam = np.full(S, 1e-3)
    r, J = _system(A, Z, mu)
    cost = np.einsum("sm,sm->s", r, r)
    active = np.ones(S, dtype=bool)
    eye = np.eye(n2)
    for _ in range(iters):
        if not active.any():
            break
        a = np.flatnonzero(active)
        Ja, ra = J[a], r[a]
        H = np.einsum("smi,smj->sij", Ja, Ja)
        grad = np.einsum("smi,sm->si", Ja, ra)
        diag = np.einsum("sii->si", H)
        M = H + lam[a, None, None] * (diag[:, :, None] * eye + eye)
        try:
            step = np.linalg.solve(M, -grad[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.stack([np.linalg.lstsq(Mi, -gi, rcond=None)[0] for Mi, gi in zip(M, grad)])
        Zt = Z[a] + step
        rt, Jt = _system(A, Zt, mu)
        ct = np.einsum("sm,sm->s", rt, rt)
        ok = np.isfinite(ct) & (ct < cost[a])
        good = a[ok]
        Z[good], r[good], J[good], cost[good] = Zt[ok], rt[ok], Jt[ok], ct[ok]
        lam[good] = np.maximum(lam[good] / 3, 1e-12)
        bad = a[~ok]
        lam[bad] = lam[bad] * 4
        small = np.abs(step).max(axis=1) <= 1e-15 * (1 + np.abs(Z[a]).max(axis=1))
        done = (cost[a] <= tol * tol) | (lam[a] > 1e12) | small
        active[a[done]] = False
    res = np.abs(bq_residuals(A, Z)).max(axis=1)
    return Z, res
