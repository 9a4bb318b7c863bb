"""Density matrices, Bloch coordinates, and the trace distance.

Basis convention, fixed once for the whole package: computational basis
vectors are ordered |0>, |1>, and the z Pauli operator is |1><1| - |0><0|,
so |1> is its +1 eigenstate and the Bloch vector (0, 0, 1) is the state
|1><1|.  All two-level formulas elsewhere in the package assume exactly
this frame.

Construction of a :class:`DensityMatrix` performs no checks; callers that
need the invariants (hermiticity, unit trace, positivity) call
:meth:`DensityMatrix.validate` explicitly.  This keeps intermediate
arithmetic free to pass through unnormalized matrices.
"""

from dataclasses import dataclass

import numpy as np

from dephaselab import matrixcore
from dephaselab.errors import (
    DimensionMismatchError,
    InvariantViolationError,
    NormExceededError,
    ValidationError,
)

TAU_TR = 1e-10
TAU_PSD = 1e-10
RANK_TOL = 1e-12

# |1> is the +1 eigenstate of SIGMA_Z; see the module docstring.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=np.complex128)


def pauli_dot(v) -> np.ndarray:
    """Real 3-vector contracted with the Pauli triple."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionMismatchError(f"pauli_dot: expected 3 components, got shape {v.shape}")
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A (candidate) state: complex matrix plus ordered factor dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionMismatchError(f"dims must be positive, got {dims}")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] != int(np.prod(dims)):
            raise DimensionMismatchError(
                f"matrix order {m.shape[0]} does not match dims {dims}"
            )
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def validate(
        self,
        tau_herm: float = matrixcore.TAU_HERM,
        tau_tr: float = TAU_TR,
        tau_psd: float = TAU_PSD,
    ) -> "DensityMatrix":
        """Check hermiticity, unit trace, positivity, and dims consistency.

        Raises InvariantViolationError listing every violated invariant.
        """
        problems = []
        m = self.matrix
        defect = matrixcore.herm_defect(m)
        if defect > tau_herm:
            problems.append(f"hermiticity defect {defect:.3e} exceeds {tau_herm:.1e}")
        tr = m.trace()
        if abs(tr - 1.0) > tau_tr:
            problems.append(f"trace {tr:.12g} deviates from 1 beyond {tau_tr:.1e}")
        if defect <= tau_herm:
            w = matrixcore.eigvals_hermitian(m, tau_herm=max(tau_herm, defect))
            if w[0] < -tau_psd:
                problems.append(f"negative eigenvalue {w[0]:.3e} below -{tau_psd:.1e}")
        if problems:
            raise InvariantViolationError("; ".join(problems))
        return self


def pure_state(amplitudes, dims=None) -> DensityMatrix:
    """Projector onto a state vector (normalized here for convenience)."""
    v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    norm = np.sqrt(float(np.vdot(v, v).real))
    if norm == 0.0:
        raise ValidationError("pure_state: zero vector has no direction")
    v = v / norm
    if dims is None:
        dims = (v.size,)
    return DensityMatrix(np.outer(v, v.conj()), tuple(dims))


def from_bloch(a, tau: float = 1e-12) -> DensityMatrix:
    """Qubit state (1 + a . sigma) / 2 from a Bloch vector inside the ball."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise DimensionMismatchError(f"from_bloch: expected 3 components, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if norm > 1.0 + tau:
        raise NormExceededError(f"Bloch vector norm {norm:.12g} exceeds 1")
    m = 0.5 * (np.eye(2, dtype=np.complex128) + pauli_dot(a))
    return DensityMatrix(m, (2,))


def to_bloch(rho: DensityMatrix) -> np.ndarray:
    """Bloch vector of a qubit state; inverse of :func:`from_bloch`."""
    if rho.dims != (2,):
        raise DimensionMismatchError(f"to_bloch: expected dims (2,), got {rho.dims}")
    m = rho.matrix
    return np.array(
        [
            np.trace(m @ SIGMA_X).real,
            np.trace(m @ SIGMA_Y).real,
            np.trace(m @ SIGMA_Z).real,
        ]
    )


def spectral_decompose(rho: DensityMatrix, rank_tol: float = RANK_TOL):
    """Eigenpairs of a state with weights above ``rank_tol``.

    Returns a list of ``(weight, vector)`` with weights descending and
    renormalized to unit sum after dropping the negligible tail.
    """
    es = matrixcore.eig_hermitian(rho.matrix)
    order = np.argsort(es.eigenvalues, kind="stable")[::-1]
    pairs = [
        (float(es.eigenvalues[i]), np.ascontiguousarray(es.eigenvectors[:, i]))
        for i in order
        if es.eigenvalues[i] > rank_tol
    ]
    total = sum(w for w, _ in pairs)
    if total <= 0.0:
        raise InvariantViolationError("spectral_decompose: no weight above rank tolerance")
    return [(w / total, v) for w, v in pairs]


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Half the trace norm of the difference of two states."""
    if rho1.dims != rho2.dims:
        raise DimensionMismatchError(
            f"trace_distance: dims {rho1.dims} vs {rho2.dims} do not match"
        )
    w = matrixcore.eigvals_hermitian(rho1.matrix - rho2.matrix)
    return 0.5 * float(np.abs(w).sum())
