"""Dense complex linear algebra for small operator spaces.

Everything downstream funnels its numerics through this module: Hermitian
eigendecomposition (cyclic Jacobi, compiled kernel with pure-Python
fallback), Hermitian-generated matrix exponentials, tensor products,
partial trace and partial transpose, and a time-ordered propagator for
explicitly time-dependent Hermitian generators.  Matrices are plain
``numpy.ndarray`` of complex128; operator spaces here are tiny (dimension
up to a few tens), so uniform accuracy beats asymptotic speed.
"""

from typing import Callable, NamedTuple

import numpy as np

from dephaselab import _kernels
from dephaselab.errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonHermitianGeneratorError,
    NotHermitianError,
)

# Default tolerances; every public routine accepts overrides.
TAU_HERM = 1e-10
TAU_EIG = 1e-12
TAU_UNIT = 1e-12


class EigenSystem(NamedTuple):
    """Spectral data of a Hermitian matrix: ascending eigenvalues and the
    unitary whose columns are the matching eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def frobenius(m) -> float:
    """Frobenius norm."""
    m = np.asarray(m)
    return float(np.sqrt((m.real * m.real + m.imag * m.imag).sum()))


def herm_defect(m) -> float:
    """Frobenius distance from a matrix to its own adjoint."""
    m = np.asarray(m, dtype=np.complex128)
    return frobenius(m - m.conj().T)


def _require_square(m, who: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{who}: expected a square matrix, got shape {m.shape}")
    return m


def eigvals_hermitian(h, tau_herm: float = TAU_HERM) -> np.ndarray:
    """Ascending eigenvalues only; the cheap path used by distance measures."""
    h = _require_square(h, "eigvals_hermitian")
    if herm_defect(h) > tau_herm:
        raise NotHermitianError(f"hermiticity defect {herm_defect(h):.3e} exceeds {tau_herm:.3e}")
    try:
        w, _ = _kernels.jacobi_eigh(h, vectors=False)
    except RuntimeError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return w


def eig_hermitian(h, tau_herm: float = TAU_HERM, tau_eig: float = TAU_EIG) -> EigenSystem:
    """Full spectral decomposition of a Hermitian matrix.

    Parameters
    ----------
    h : array_like
        Hermitian matrix.
    tau_herm : float
        Largest tolerated hermiticity defect of the input.
    tau_eig : float
        Relative reconstruction residual the decomposition must meet.

    Returns
    -------
    EigenSystem
        Eigenvalues ascending; eigenvector matrix unitary.

    Raises
    ------
    NotHermitianError, NoConvergenceError
    """
    h = _require_square(h, "eig_hermitian")
    defect = herm_defect(h)
    if defect > tau_herm:
        raise NotHermitianError(f"hermiticity defect {defect:.3e} exceeds {tau_herm:.3e}")
    try:
        w, v = _kernels.jacobi_eigh(h)
    except RuntimeError as exc:
        raise NoConvergenceError(str(exc)) from exc
    scale = frobenius(h)
    if scale > 0.0:
        residual = frobenius((v * w) @ v.conj().T - h)
        if residual > tau_eig * scale:
            raise NoConvergenceError(
                f"reconstruction residual {residual:.3e} exceeds {tau_eig:.1e} * |H|"
            )
    return EigenSystem(w, v)


def expm_hermitian(h, theta: float, tau_herm: float = TAU_HERM) -> np.ndarray:
    """Unitary exp(-i * theta * H) for Hermitian H, via eigendecomposition."""
    es = eig_hermitian(h, tau_herm=tau_herm)
    phases = np.exp(-1j * theta * es.eigenvalues)
    return (es.eigenvectors * phases) @ es.eigenvectors.conj().T


def kron(a, b) -> np.ndarray:
    """Tensor product; the first operand is the slow (leftmost) factor."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def _check_composite(m, dims, who: str):
    m = _require_square(m, who)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatchError(f"{who}: factor dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if m.shape[0] != total:
        raise DimensionMismatchError(
            f"{who}: matrix of order {m.shape[0]} does not factor as {dims}"
        )
    return m, dims


def partial_trace(m, dims, keep: int) -> np.ndarray:
    """Trace out every tensor factor except ``keep``.

    ``dims`` lists the factor dimensions in row-major (leftmost factor
    slowest) order, matching :func:`kron`.
    """
    m, dims = _check_composite(m, dims, "partial_trace")
    nf = len(dims)
    if not 0 <= keep < nf:
        raise DimensionMismatchError(f"partial_trace: keep={keep} outside 0..{nf - 1}")
    t = m.reshape(dims + dims)
    row_labels = list(range(nf))
    col_labels = [nf if i == keep else i for i in range(nf)]
    return np.einsum(t, row_labels + col_labels, [keep, nf])


def partial_transpose(m, dims, factor: int) -> np.ndarray:
    """Transpose a single tensor factor in place of the composite matrix."""
    m, dims = _check_composite(m, dims, "partial_transpose")
    nf = len(dims)
    if not 0 <= factor < nf:
        raise DimensionMismatchError(f"partial_transpose: factor={factor} outside 0..{nf - 1}")
    t = m.reshape(dims + dims)
    t = np.swapaxes(t, factor, factor + nf)
    return t.reshape(m.shape).copy()


def polar_unitary(u) -> np.ndarray:
    """Nearest unitary U (U^dag U)^(-1/2); input must be near-unitary."""
    u = _require_square(u, "polar_unitary")
    gram = u.conj().T @ u
    es = eig_hermitian(gram)
    inv_sqrt = np.clip(es.eigenvalues, 1e-30, None) ** -0.5
    return u @ (es.eigenvectors * inv_sqrt) @ es.eigenvectors.conj().T


def _sample_generator(b_of_t: Callable, s: float, dim: int | None, tau_herm: float) -> np.ndarray:
    b = np.asarray(b_of_t(s), dtype=np.complex128)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or (dim is not None and b.shape[0] != dim):
        raise NonHermitianGeneratorError(f"generator at t={s}: bad shape {b.shape}")
    if herm_defect(b) > tau_herm:
        raise NonHermitianGeneratorError(
            f"generator at t={s}: hermiticity defect {herm_defect(b):.3e}"
        )
    return b


def time_ordered_propagator(
    b_of_t: Callable, t: float, steps: int, tau_herm: float = TAU_HERM
) -> np.ndarray:
    """Time-ordered propagator of dV/ds = -i B(s) V over [0, t].

    Classic fixed-step fourth-order integration; the result is snapped back
    onto the unitary group by polar projection, so drift shows up as a loss
    of accuracy rather than a loss of unitarity.

    Parameters
    ----------
    b_of_t : callable
        Maps a time to the Hermitian generator at that time.
    t : float
        Final time, t >= 0.
    steps : int
        Number of integration steps, >= 1.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    b_left = _sample_generator(b_of_t, 0.0, None, tau_herm)
    dim = b_left.shape[0]
    u = np.eye(dim, dtype=np.complex128)
    if t == 0.0:
        return u
    h = t / steps
    for k in range(steps):
        s = k * h
        b_mid = _sample_generator(b_of_t, s + 0.5 * h, dim, tau_herm)
        b_right = _sample_generator(b_of_t, s + h, dim, tau_herm)
        k1 = -1j * (b_left @ u)
        k2 = -1j * (b_mid @ (u + (0.5 * h) * k1))
        k3 = -1j * (b_mid @ (u + (0.5 * h) * k2))
        k4 = -1j * (b_right @ (u + h * k3))
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        b_left = b_right
    return polar_unitary(u)
