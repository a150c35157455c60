# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 path-ordered exponential for batches of connection samples.

Same contract as ``qhdlab._pykernels.rk4_products``.  Complex matrices are
kept as separate real and imaginary arrays of length j*j.
"""
import numpy as np

cdef enum:
    JMAX = 4
    GMAX = 3


cdef inline void _gen(const double* Tr, const double* Ti, const double* c, Py_ssize_t g,
                      Py_ssize_t jj, double* Gr, double* Gi) noexcept nogil:
    cdef Py_ssize_t a, r
    for r in range(jj):
        Gr[r] = 0.0
        Gi[r] = 0.0
    for a in range(g):
        for r in range(jj):
            Gr[r] += c[a] * Tr[a * jj + r]
            Gi[r] += c[a] * Ti[a * jj + r]


cdef inline void _rmul(const double* Ar, const double* Ai, const double* Br, const double* Bi,
                       double* Cr, double* Ci, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t r, c, q
    cdef double sr, si
    for r in range(j):
        for c in range(j):
            sr = 0.0
            si = 0.0
            for q in range(j):
                sr += Ar[r * j + q] * Br[q * j + c] - Ai[r * j + q] * Bi[q * j + c]
                si += Ar[r * j + q] * Bi[q * j + c] + Ai[r * j + q] * Br[q * j + c]
            Cr[r * j + c] = sr
            Ci[r * j + c] = si


cdef inline void _mul2(const double* A, const double* B, double* C) noexcept nogil:
    # 2x2 complex product, entries stored (re, im) row-major in 8 doubles
    cdef int r, c
    for r in range(2):
        for c in range(2):
            C[4 * r + 2 * c] = (A[4 * r] * B[2 * c] - A[4 * r + 1] * B[2 * c + 1]
                                + A[4 * r + 2] * B[4 + 2 * c] - A[4 * r + 3] * B[4 + 2 * c + 1])
            C[4 * r + 2 * c + 1] = (A[4 * r] * B[2 * c + 1] + A[4 * r + 1] * B[2 * c]
                                    + A[4 * r + 2] * B[4 + 2 * c + 1] + A[4 * r + 3] * B[4 + 2 * c])


cdef void _rk4_j1(const double[:, :, :, ::1] C, const double* T, const double[::1] H,
                  double complex[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t N = C.shape[0], S = C.shape[1], n, k
    cdef double tr = T[0], ti = T[1]
    cdef double ur, ui, h, c0, cm, c1, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, wr, wi
    for n in range(N):
        ur = 1.0
        ui = 0.0
        for k in range(S):
            h = H[k]
            c0 = C[n, k, 0, 0]
            cm = C[n, k, 1, 0]
            c1 = C[n, k, 2, 0]
            k1r = c0 * (ur * tr - ui * ti)
            k1i = c0 * (ur * ti + ui * tr)
            wr = ur + 0.5 * h * k1r
            wi = ui + 0.5 * h * k1i
            k2r = cm * (wr * tr - wi * ti)
            k2i = cm * (wr * ti + wi * tr)
            wr = ur + 0.5 * h * k2r
            wi = ui + 0.5 * h * k2i
            k3r = cm * (wr * tr - wi * ti)
            k3i = cm * (wr * ti + wi * tr)
            wr = ur + h * k3r
            wi = ui + h * k3i
            k4r = c1 * (wr * tr - wi * ti)
            k4i = c1 * (wr * ti + wi * tr)
            ur = ur + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
            ui = ui + (h / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        out[n, 0, 0] = ur + 1j * ui


cdef void _rk4_j2(const double[:, :, :, ::1] C, const double* T, Py_ssize_t g,
                  const double[::1] H, double complex[:, :, ::1] out) noexcept nogil:
    # T holds g generators as 8 doubles each
    cdef Py_ssize_t N = C.shape[0], S = C.shape[1], n, k, a, r, s
    cdef double h
    cdef double U[8]
    cdef double W[8]
    cdef double A[24]
    cdef double k1[8]
    cdef double k2[8]
    cdef double k3[8]
    cdef double k4[8]
    for n in range(N):
        for r in range(8):
            U[r] = 0.0
        U[0] = 1.0
        U[6] = 1.0
        for k in range(S):
            h = H[k]
            for s in range(3):
                for r in range(8):
                    A[8 * s + r] = 0.0
                for a in range(g):
                    for r in range(8):
                        A[8 * s + r] += C[n, k, s, a] * T[8 * a + r]
            _mul2(U, &A[0], k1)
            for r in range(8):
                W[r] = U[r] + 0.5 * h * k1[r]
            _mul2(W, &A[8], k2)
            for r in range(8):
                W[r] = U[r] + 0.5 * h * k2[r]
            _mul2(W, &A[8], k3)
            for r in range(8):
                W[r] = U[r] + h * k3[r]
            _mul2(W, &A[16], k4)
            for r in range(8):
                U[r] += (h / 6.0) * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
        for r in range(4):
            out[n, r // 2, r % 2] = U[2 * r] + 1j * U[2 * r + 1]


cdef enum:
    CHUNK = 16


def rk4_products(const double[:, :, :, ::1] C, T, const double[::1] H,
                 double complex[:, :, ::1] out):
    """RK4 for U' = U A(t), A = sum_a C[n, k, s, a] T_a at stage s of step k."""
    cdef Py_ssize_t N = C.shape[0], nsteps = C.shape[1], g = C.shape[3]
    Tarr = np.ascontiguousarray(T, dtype=complex)
    cdef Py_ssize_t j = Tarr.shape[1]
    if j > JMAX or g > GMAX:
        raise ValueError("group too large for compiled kernel")
    if Tarr.shape[0] != g or H.shape[0] != nsteps or C.shape[2] != 3:
        raise ValueError("inconsistent kernel input shapes")
    cdef double[::1] Tr = np.array(Tarr.real, dtype=float).ravel()
    cdef double[::1] Ti = np.array(Tarr.imag, dtype=float).ravel()
    cdef double[::1] Tp = np.ascontiguousarray(
        np.stack([Tarr.real, Tarr.imag], axis=-1), dtype=float).ravel()
    if j == 1:
        with nogil:
            _rk4_j1(C, &Tp[0], H, out)
        return np.asarray(out)
    if j == 2:
        with nogil:
            _rk4_j2(C, &Tp[0], g, H, out)
        return np.asarray(out)
    cdef Py_ssize_t jj = j * j
    cdef Py_ssize_t n0, nc, q, k, r
    cdef double h
    cdef const double* c
    cdef double* Ur
    cdef double* Ui
    # samples of a chunk advance together so their independent updates overlap
    cdef double Ubr[CHUNK * JMAX * JMAX]
    cdef double Ubi[CHUNK * JMAX * JMAX]
    cdef double Wr[JMAX * JMAX]
    cdef double Wi[JMAX * JMAX]
    cdef double G0r[JMAX * JMAX]
    cdef double G0i[JMAX * JMAX]
    cdef double Gmr[JMAX * JMAX]
    cdef double Gmi[JMAX * JMAX]
    cdef double G1r[JMAX * JMAX]
    cdef double G1i[JMAX * JMAX]
    cdef double k1r[JMAX * JMAX]
    cdef double k1i[JMAX * JMAX]
    cdef double k2r[JMAX * JMAX]
    cdef double k2i[JMAX * JMAX]
    cdef double k3r[JMAX * JMAX]
    cdef double k3i[JMAX * JMAX]
    cdef double k4r[JMAX * JMAX]
    cdef double k4i[JMAX * JMAX]
    with nogil:
        n0 = 0
        while n0 < N:
            nc = min(CHUNK, N - n0)
            for q in range(nc * jj):
                Ubr[q] = 0.0
                Ubi[q] = 0.0
            for q in range(nc):
                for r in range(j):
                    Ubr[q * jj + r * j + r] = 1.0
            for k in range(nsteps):
                h = H[k]
                for q in range(nc):
                    c = &C[n0 + q, k, 0, 0]
                    Ur = &Ubr[q * jj]
                    Ui = &Ubi[q * jj]
                    _gen(&Tr[0], &Ti[0], c, g, jj, G0r, G0i)
                    _gen(&Tr[0], &Ti[0], c + g, g, jj, Gmr, Gmi)
                    _gen(&Tr[0], &Ti[0], c + 2 * g, g, jj, G1r, G1i)
                    _rmul(Ur, Ui, G0r, G0i, k1r, k1i, j)
                    for r in range(jj):
                        Wr[r] = Ur[r] + 0.5 * h * k1r[r]
                        Wi[r] = Ui[r] + 0.5 * h * k1i[r]
                    _rmul(Wr, Wi, Gmr, Gmi, k2r, k2i, j)
                    for r in range(jj):
                        Wr[r] = Ur[r] + 0.5 * h * k2r[r]
                        Wi[r] = Ui[r] + 0.5 * h * k2i[r]
                    _rmul(Wr, Wi, Gmr, Gmi, k3r, k3i, j)
                    for r in range(jj):
                        Wr[r] = Ur[r] + h * k3r[r]
                        Wi[r] = Ui[r] + h * k3i[r]
                    _rmul(Wr, Wi, G1r, G1i, k4r, k4i, j)
                    for r in range(jj):
                        Ur[r] += (h / 6.0) * (k1r[r] + 2.0 * k2r[r] + 2.0 * k3r[r] + k4r[r])
                        Ui[r] += (h / 6.0) * (k1i[r] + 2.0 * k2i[r] + 2.0 * k3i[r] + k4i[r])
            for q in range(nc):
                for r in range(jj):
                    out[n0 + q, r // j, r % j] = Ubr[q * jj + r] + 1j * Ubi[q * jj + r]
            n0 += nc
    return np.asarray(out)
