# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: integer principal chains and the batched bq solver.

Same signatures and results as ``_fallback``. The integer kernel works in
int64 with overflow checks and hands the input to the Python-int fallback
when a product would overflow.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, isfinite
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

from . import _fallback

cnp.import_array()

cdef extern from *:
    """
    static inline int ek_mul(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static inline int ek_sub(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    static inline int ek_add(long long a, long long b, long long *r) { return __builtin_add_overflow(a, b, r); }
    """
    int ek_mul(long long a, long long b, long long *r) nogil
    int ek_sub(long long a, long long b, long long *r) nogil
    int ek_add(long long a, long long b, long long *r) nogil


cdef long long _gcd(long long a, long long b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef void _primitive(long long* row, int n) noexcept nogil:
    cdef long long g = 0
    cdef int j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return
    if g > 1:
        for j in range(n):
            row[j] //= g


cdef int _echelon(long long* M, int rows, int n) noexcept nogil:
    """In-place echelon form of a rows x n buffer; returns the rank or -1 on overflow."""
    cdef int rank = 0, c, r, j, piv
    cdef long long p, x, t1, t2
    cdef long long tmp
    for c in range(n):
        if rank == rows:
            break
        piv = -1
        for r in range(rank, rows):
            if M[r * n + c]:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(n):
                tmp = M[piv * n + j]
                M[piv * n + j] = M[rank * n + j]
                M[rank * n + j] = tmp
        p = M[rank * n + c]
        for r in range(rank + 1, rows):
            x = M[r * n + c]
            if x:
                for j in range(n):
                    if ek_mul(p, M[r * n + j], &t1) or ek_mul(x, M[rank * n + j], &t2):
                        return -1
                    if ek_sub(t1, t2, &M[r * n + j]):
                        return -1
                _primitive(&M[r * n], n)
        rank += 1
    # each pivot row was swapped into slot `rank`, so the first `rank` rows are the basis
    return rank


cdef object _as_array(long long* M, int rank, int n):
    out = np.empty((rank, n), dtype=np.int64)
    cdef long long[:, ::1] v = out
    cdef int i, j
    for i in range(rank):
        for j in range(n):
            v[i, j] = M[i * n + j]
    return out


cdef object _product(long long[:, ::1] A, long long[:, ::1] U, long long[:, ::1] V, int n):
    """Returns the echelon basis of U V as an int64 array, or None on overflow."""
    cdef int nu = U.shape[0], nv = V.shape[0]
    if nu == 0 or nv == 0:
        return np.empty((0, n), dtype=np.int64)
    cdef int rows = nu * nv, a, b, j, k, i, rank, rank2
    cdef long long* H = <long long*> malloc(rows * n * sizeof(long long))
    cdef long long* G = <long long*> malloc(n * n * sizeof(long long))
    cdef long long t
    cdef bint bad = False
    try:
        for a in range(nu):
            for b in range(nv):
                for j in range(n):
                    if ek_mul(U[a, j], V[b, j], &H[(a * nv + b) * n + j]):
                        bad = True
                        break
                if bad:
                    break
                _primitive(&H[(a * nv + b) * n], n)
            if bad:
                break
        if bad:
            return None
        rank = _echelon(H, rows, n)
        if rank < 0:
            return None
        for i in range(rank):
            for k in range(n):
                G[i * n + k] = 0
            for j in range(n):
                if H[i * n + j]:
                    for k in range(n):
                        if A[j, k]:
                            if ek_mul(H[i * n + j], A[j, k], &t) or ek_add(G[i * n + k], t, &G[i * n + k]):
                                return None
            _primitive(&G[i * n], n)
        rank2 = _echelon(G, rank, n)
        if rank2 < 0:
            return None
        return _as_array(G, rank2, n)
    finally:
        free(H)
        free(G)


cdef object _echelon_rows(list blocks, int n):
    cdef int rows = 0
    for B in blocks:
        rows += B.shape[0]
    if rows == 0:
        return np.empty((0, n), dtype=np.int64)
    stacked = np.ascontiguousarray(np.concatenate(blocks, axis=0), dtype=np.int64)
    cdef long long[:, ::1] s = stacked
    cdef int rank = _echelon(&s[0, 0], rows, n)
    if rank < 0:
        return None
    return stacked[:rank].copy()


def principal_index_int(matrix):
    """Principal chain of an integer structure matrix, dimensions only.

    Returns (index, stabilized_at, dims); see ``_fallback.principal_index_int``.
    """
    try:
        A_arr = np.ascontiguousarray(np.array(matrix, dtype=np.int64))
    except OverflowError:
        return _fallback.principal_index_int(matrix)
    cdef int n = A_arr.shape[0]
    cdef long long[:, ::1] A = A_arr
    cdef long cap = (1 << n) + 1
    cdef long k = 2
    cdef int i, d
    E = np.eye(n, dtype=np.int64)
    dims = [n]
    run_of = [0]
    run_value = [E]
    run_start = [1]
    cache = {}
    while k <= cap:
        pairs = set()
        for i in range(1, k // 2 + 1):
            a, b = run_of[i - 1], run_of[k - i - 1]
            pairs.add((min(a, b), max(a, b)))
        blocks = []
        for key in pairs:
            P = cache.get(key)
            if P is None:
                P = _product(A, run_value[key[0]], run_value[key[1]], n)
                if P is None:
                    return _fallback.principal_index_int(matrix)
                cache[key] = P
            blocks.append(P)
        S = _echelon_rows(blocks, n)
        if S is None:
            return _fallback.principal_index_int(matrix)
        d = S.shape[0]
        prev_run = run_of[len(run_of) - 1]
        if d == dims[len(dims) - 1]:
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

cdef void _system(double* A, int n, double* z, double mu, double* r, double* J, int m) noexcept nogil:
    cdef int n2 = 2 * n, i, j, k, row
    cdef double* f = z
    cdef double* g = z + n
    cdef double acc_f, acc_g
    cdef double ff = 0.0, gg = 0.0, fgd = 0.0, N, D, s, q, coef, nf, ng
    for i in range(m * n2):
        J[i] = 0.0
    for i in range(n):
        acc_f = 0.0
        acc_g = 0.0
        for k in range(n):
            acc_f += A[i * n + k] * f[k]
            acc_g += A[i * n + k] * g[k]
            J[i * n2 + k] = A[i * n + k]
            J[(n + i) * n2 + n + k] = A[i * n + k]
        r[i] = acc_f - f[i] * g[i]
        r[n + i] = acc_g - f[i] * g[i]
        J[i * n2 + i] -= g[i]
        J[i * n2 + n + i] = -f[i]
        J[(n + i) * n2 + n + i] -= f[i]
        J[(n + i) * n2 + i] = -g[i]
    row = 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            r[row] = 0.5 * (f[i] * g[j] + f[j] * g[i])
            J[row * n2 + i] = 0.5 * g[j]
            J[row * n2 + j] = 0.5 * g[i]
            J[row * n2 + n + j] = 0.5 * f[i]
            J[row * n2 + n + i] = 0.5 * f[j]
            row += 1
    if mu <= 0:
        return
    for i in range(n):
        ff += f[i] * f[i]
        gg += g[i] * g[i]
        fgd += f[i] * g[i]
    N = ff * gg + 1e-300
    D = ff * gg - fgd * fgd
    s = D / N
    q = s + 1e-12
    r[row] = mu / sqrt(q)
    coef = -0.5 * mu / (q * sqrt(q))
    for i in range(n):
        J[row * n2 + i] = coef * (((2 * gg * f[i] - 2 * fgd * g[i]) * N - D * 2 * gg * f[i]) / (N * N))
        J[row * n2 + n + i] = coef * (((2 * ff * g[i] - 2 * fgd * f[i]) * N - D * 2 * ff * g[i]) / (N * N))
    nf = sqrt(ff) + 1e-12
    ng = sqrt(gg) + 1e-12
    r[row + 1] = mu / nf
    r[row + 2] = mu / ng
    for i in range(n):
        J[(row + 1) * n2 + i] = -(mu / (nf * nf * nf)) * f[i]
        J[(row + 2) * n2 + n + i] = -(mu / (ng * ng * ng)) * g[i]


cdef int _solve(double* M, double* b, int n) noexcept nogil:
    """Gaussian elimination with partial pivoting; solution left in b. Returns 0 if singular."""
    cdef int c, r, j, piv
    cdef double best, t, fac
    for c in range(n):
        piv = c
        best = fabs(M[c * n + c])
        for r in range(c + 1, n):
            if fabs(M[r * n + c]) > best:
                best = fabs(M[r * n + c])
                piv = r
        if best == 0.0:
            return 0
        if piv != c:
            for j in range(n):
                t = M[c * n + j]
                M[c * n + j] = M[piv * n + j]
                M[piv * n + j] = t
            t = b[c]
            b[c] = b[piv]
            b[piv] = t
        for r in range(c + 1, n):
            fac = M[r * n + c] / M[c * n + c]
            if fac != 0.0:
                for j in range(c, n):
                    M[r * n + j] -= fac * M[c * n + j]
                b[r] -= fac * b[c]
    for c in range(n - 1, -1, -1):
        t = b[c]
        for j in range(c + 1, n):
            t -= M[c * n + j] * b[j]
        b[c] = t / M[c * n + c]
    return 1


cdef double _cost(double* r, int m) noexcept nogil:
    cdef double c = 0.0
    cdef int i
    for i in range(m):
        c += r[i] * r[i]
    return c


def lm_bq_batch(A, Z0, double mu=0.0, int iters=100, double tol=1e-14):
    """Levenberg-Marquardt on the bq residuals for each row of Z0; see ``_fallback.lm_bq_batch``."""
    A_arr = np.ascontiguousarray(A, dtype=np.float64)
    Z = np.array(Z0, dtype=np.float64, copy=True, order="C")
    cdef int n = A_arr.shape[0]
    cdef int S = Z.shape[0], n2 = 2 * n
    cdef int npair = n * (n - 1) // 2
    cdef int mb = 2 * n + npair
    cdef int m = mb + (3 if mu > 0 else 0)
    cdef double[:, ::1] Av = A_arr
    cdef double[:, ::1] Zv = Z
    res_arr = np.empty(S)
    cdef double[::1] res = res_arr
    cdef double* r = <double*> malloc(m * sizeof(double))
    cdef double* J = <double*> malloc(m * n2 * sizeof(double))
    cdef double* rt = <double*> malloc(m * sizeof(double))
    cdef double* Jt = <double*> malloc(m * n2 * sizeof(double))
    cdef double* H = <double*> malloc(n2 * n2 * sizeof(double))
    cdef double* grad = <double*> malloc(n2 * sizeof(double))
    cdef double* zt = <double*> malloc(n2 * sizeof(double))
    cdef int s, it, i, j, q, ok
    cdef double lam, cost, ct, h, big, zmax
    try:
        with nogil:
            for s in range(S):
                lam = 1e-3
                _system(&Av[0, 0], n, &Zv[s, 0], mu, r, J, m)
                cost = _cost(r, m)
                for it in range(iters):
                    for i in range(n2):
                        grad[i] = 0.0
                        for q in range(m):
                            grad[i] += J[q * n2 + i] * r[q]
                        for j in range(i, n2):
                            h = 0.0
                            for q in range(m):
                                h += J[q * n2 + i] * J[q * n2 + j]
                            H[i * n2 + j] = h
                            H[j * n2 + i] = h
                    for i in range(n2):
                        H[i * n2 + i] += lam * (H[i * n2 + i] + 1.0)
                        grad[i] = -grad[i]
                    ok = _solve(H, grad, n2)
                    big = 0.0
                    zmax = 0.0
                    for i in range(n2):
                        zt[i] = Zv[s, i] + grad[i]
                        if fabs(grad[i]) > big:
                            big = fabs(grad[i])
                        if fabs(Zv[s, i]) > zmax:
                            zmax = fabs(Zv[s, i])
                    if ok:
                        _system(&Av[0, 0], n, zt, mu, rt, Jt, m)
                        ct = _cost(rt, m)
                    if ok and isfinite(ct) and ct < cost:
                        memcpy(&Zv[s, 0], zt, n2 * sizeof(double))
                        memcpy(r, rt, m * sizeof(double))
                        memcpy(J, Jt, m * n2 * sizeof(double))
                        cost = ct
                        lam = lam / 3
                        if lam < 1e-12:
                            lam = 1e-12
                    else:
                        lam = lam * 4
                    if cost <= tol * tol or lam > 1e12 or big <= 1e-15 * (1 + zmax):
                        break
                _system(&Av[0, 0], n, &Zv[s, 0], 0.0, r, J, mb)
                h = 0.0
                for i in range(mb):
                    if fabs(r[i]) > h:
                        h = fabs(r[i])
                res[s] = h
    finally:
        free(r)
        free(J)
        free(rt)
        free(Jt)
        free(H)
        free(grad)
        free(zt)
    return Z, res_arr
