"""Cyclic Jacobi eigensolver for complex Hermitian matrices, pure Python.

Fallback twin of the compiled kernel; both run the same algorithm so results
only differ by rounding.  Intended for the small operator spaces used here
(dimension up to a few tens), where Jacobi is simple and uniformly accurate.
"""

import numpy as np

# Sweep until the off-diagonal Frobenius norm drops below this fraction of
# the matrix norm; the quadratic final phase overshoots well past it.
_OFF_TOL = 1e-14


def _off_norm2(a):
    # Summed directly over off-diagonal entries: subtracting the diagonal
    # from the total norm cancels catastrophically near convergence.
    b = a.copy()
    np.fill_diagonal(b, 0.0)
    return float((b.real * b.real + b.imag * b.imag).sum())


def jacobi_eigh(a, vectors=True, max_sweeps=60):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Parameters
    ----------
    a : array_like
        Hermitian matrix; only the values are read, the input is not mutated.
    vectors : bool
        When False the eigenvector accumulation is skipped and the second
        return value is None.
    max_sweeps : int
        Budget of full cyclic sweeps before giving up.

    Returns
    -------
    (w, v) : ndarray, ndarray or None
        ``w`` real ascending; columns of ``v`` are the eigenvectors.

    Raises
    ------
    RuntimeError
        If the off-diagonal norm has not converged within ``max_sweeps``.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("square matrix required")
    v = np.eye(n, dtype=np.complex128) if vectors else None

    scale2 = float((np.abs(a) ** 2).sum())
    if n == 1 or scale2 == 0.0:
        return np.diagonal(a).real.copy(), v

    stop2 = (_OFF_TOL * _OFF_TOL) * scale2
    converged = False
    for _ in range(max_sweeps):
        if _off_norm2(a) <= stop2:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = -1.0 / (2.0 * tau)
                else:
                    sign = 1.0 if tau >= 0.0 else -1.0
                    t = -sign / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = s * phase.conjugate()

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp + spc * colq
                a[:, q] = -sp * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp + sp * rowq
                a[q, :] = -spc * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0

                if vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp + spc * vq
                    v[:, q] = -sp * vp + c * vq
    if not converged and _off_norm2(a) > stop2:
        raise RuntimeError("jacobi sweep budget exhausted without convergence")

    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order])
    if vectors:
        v = np.ascontiguousarray(v[:, order])
    return w, v
