# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic Jacobi eigensolver for complex Hermitian matrices, compiled core.

Same algorithm and contract as the pure-Python fallback module; results of
the two backends agree to rounding.
"""

import numpy as np

from libc.math cimport fabs, sqrt

ctypedef double complex cplx


cdef double _off2(cplx[:, ::1] a, Py_ssize_t n) noexcept nogil:
    # Summed directly over off-diagonal entries to avoid the cancellation
    # that hits "total norm minus diagonal norm" near convergence.
    cdef double s = 0.0
    cdef Py_ssize_t i, j
    cdef cplx z
    for i in range(n):
        for j in range(n):
            if i != j:
                z = a[i, j]
                s += z.real * z.real + z.imag * z.imag
    return s


cdef int _sweeps(cplx[:, ::1] a, cplx[:, ::1] v, Py_ssize_t n, bint want_v,
                 double stop2, int max_sweeps) noexcept nogil:
    cdef int sweep
    cdef Py_ssize_t p, q, i
    cdef double r, tau, t, c, s, sgn
    cdef cplx apq, phase, sp, spc, xp, xq
    for sweep in range(max_sweeps):
        if _off2(a, n) <= stop2:
            return 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r == 0.0:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if fabs(tau) > 1e150:
                    t = -1.0 / (2.0 * tau)
                else:
                    sgn = 1.0 if tau >= 0.0 else -1.0
                    t = -sgn / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = s * phase.conjugate()

                for i in range(n):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp + spc * xq
                    a[i, q] = c * xq - sp * xp
                for i in range(n):
                    xp = a[p, i]
                    xq = a[q, i]
                    a[p, i] = c * xp + sp * xq
                    a[q, i] = c * xq - spc * xp
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_v:
                    for i in range(n):
                        xp = v[i, p]
                        xq = v[i, q]
                        v[i, p] = c * xp + spc * xq
                        v[i, q] = c * xq - sp * xp
    if _off2(a, n) <= stop2:
        return 0
    return 1


def jacobi_eigh(a, vectors=True, max_sweeps=60):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Mirrors the pure-Python fallback: returns ``(w, v)`` with ``w`` real
    ascending and eigenvectors in the columns of ``v`` (``None`` when
    ``vectors`` is False); raises RuntimeError on sweep-budget exhaustion.
    """
    a_arr = np.array(a, dtype=np.complex128, order="C")
    if a_arr.ndim != 2 or a_arr.shape[0] != a_arr.shape[1]:
        raise ValueError("square matrix required")
    cdef Py_ssize_t n = a_arr.shape[0]
    v_arr = np.eye(n, dtype=np.complex128) if vectors else None

    cdef double scale2 = float(np.vdot(a_arr, a_arr).real)
    if n == 1 or scale2 == 0.0:
        return np.diagonal(a_arr).real.copy(), v_arr

    cdef cplx[:, ::1] am = a_arr
    cdef cplx[:, ::1] vm = v_arr if vectors else a_arr
    cdef bint want_v = 1 if vectors else 0
    cdef double stop2 = (1e-14 * 1e-14) * scale2
    cdef int budget = max_sweeps
    cdef int rc
    with nogil:
        rc = _sweeps(am, vm, n, want_v, stop2, budget)
    if rc != 0:
        raise RuntimeError("jacobi sweep budget exhausted without convergence")

    w = np.diagonal(a_arr).real.copy()
    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order])
    if vectors:
        v_arr = np.ascontiguousarray(v_arr[:, order])
    return w, v_arr
