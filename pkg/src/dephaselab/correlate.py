"""Correlation structure of bipartite states.

Entanglement via the two-qubit concurrence and the partial-transpose
criterion (conclusive for 2x2 and 2x3 factor dimensions), classicality via
a projective-measurement pinching search on one qubit factor, the algebraic
criterion for when a two-level dephasing model generates entanglement at
all, and the trace-distance measure of total correlations.
"""

from dataclasses import dataclass

import numpy as np

from dephaselab import dephasing, matrixcore, qstate
from dephaselab.errors import (
    DimensionMismatchError,
    UnsupportedDimensionError,
    UnsupportedModelError,
)
from dephaselab.dephasing import DephasingModel
from dephaselab.qstate import DensityMatrix

TAU_PSD = 1e-10
TAU_PURE = 1e-12
TAU_DISCORD = 1e-7

_YY = matrixcore.kron(qstate.SIGMA_Y, qstate.SIGMA_Y)


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    es = matrixcore.eig_hermitian(m)
    roots = np.sqrt(np.clip(es.eigenvalues, 0.0, None))
    return (es.eigenvectors * roots) @ es.eigenvectors.conj().T


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence.

    The four characteristic values are square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy); the product is similar to the Hermitian
    sqrt(rho) rho~ sqrt(rho), which is what actually gets diagonalized so
    the whole computation stays on the Hermitian eigensolver.  Tiny negative
    eigenvalues from rounding are clamped to zero.

    States that are pure to within ``TAU_PURE`` in purity take a rank-1
    shortcut, 2|ad - bc| on the dominant eigenvector; the generic route
    takes square roots of near-null eigenvalues and cannot resolve the
    value past about 1e-8.
    """
    if rho.dims != (2, 2):
        raise DimensionMismatchError(f"concurrence needs dims (2, 2), got {rho.dims}")
    m = rho.matrix
    if 1.0 - float(np.real(np.trace(m @ m))) <= TAU_PURE:
        es = matrixcore.eig_hermitian(m)
        psi = es.eigenvectors[:, int(np.argmax(es.eigenvalues))]
        return float(2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2]))
    tilde = _YY @ m.conj() @ _YY
    root = _sqrtm_psd(m)
    w = matrixcore.eigvals_hermitian(root @ tilde @ root, tau_herm=1e-8)
    lam = np.sqrt(np.clip(w, 0.0, None))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def ppt_is_entangled(rho: DensityMatrix, tau_psd: float = TAU_PSD) -> bool:
    """Partial-transpose test, conclusive for 2x2 and 2x3 dimensions."""
    if rho.dims not in ((2, 2), (2, 3), (3, 2)):
        raise UnsupportedDimensionError(
            f"partial-transpose test is conclusive only for 2x2 and 2x3, got {rho.dims}"
        )
    pt = matrixcore.partial_transpose(rho.matrix, rho.dims, factor=1)
    w = matrixcore.eigvals_hermitian(pt)
    return bool(w[0] < -tau_psd)


@dataclass(frozen=True)
class DiscordSearch:
    """Resolution of the measurement-direction search."""

    coarse_points: int = 1024
    ring_points: int = 12
    shrink: float = 0.6
    min_radius: float = 1e-9
    early_exit: float = 1e-10


def _sphere_directions(count: int) -> np.ndarray:
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    k = np.arange(count)
    z = 1.0 - (2.0 * k + 1.0) / count
    radius = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * np.pi * ((k / golden) % 1.0)
    return np.stack([radius * np.cos(phi), radius * np.sin(phi), z], axis=1)


def _pinch_residual(rho: DensityMatrix, measured_factor: int, direction) -> tuple:
    es = matrixcore.eig_hermitian(qstate.pauli_dot(direction))
    basis = es.eigenvectors
    other = 1 - measured_factor
    eye_other = np.eye(rho.dims[other], dtype=np.complex128)
    pinched = np.zeros_like(rho.matrix)
    for k in range(2):
        proj = np.outer(basis[:, k], basis[:, k].conj())
        full = (
            matrixcore.kron(proj, eye_other)
            if measured_factor == 0
            else matrixcore.kron(eye_other, proj)
        )
        pinched += full @ rho.matrix @ full
    residual = qstate.trace_distance(rho, DensityMatrix(pinched, rho.dims))
    return residual, basis


def zero_discord_test(rho: DensityMatrix, measured_factor: int = 1,
                      search: DiscordSearch | None = None,
                      tau_disc: float = TAU_DISCORD) -> tuple:
    """Search for a projective basis on one qubit factor that the state
    survives unpinched.

    Returns ``(is_classical, residual, basis)`` where ``residual`` is the
    smallest trace distance found between the state and its pinched image
    and ``basis`` is the minimizing measurement basis (columns).  The state
    is declared classical on that factor when the residual drops below
    ``tau_disc``.  Deterministic: coarse Fibonacci-sphere scan plus a
    shrinking-ring refinement.
    """
    if len(rho.dims) != 2:
        raise UnsupportedDimensionError(f"need a bipartite state, got dims {rho.dims}")
    if measured_factor not in (0, 1):
        raise UnsupportedDimensionError(f"measured_factor must be 0 or 1, got {measured_factor}")
    if rho.dims[measured_factor] != 2:
        raise UnsupportedDimensionError(
            f"measured factor must be two-level, got {rho.dims[measured_factor]}"
        )
    cfg = search or DiscordSearch()

    best_res = np.inf
    best_dir = None
    best_basis = None
    for direction in _sphere_directions(cfg.coarse_points):
        res, basis = _pinch_residual(rho, measured_factor, direction)
        if res < best_res:
            best_res, best_dir, best_basis = res, direction, basis
    radius = 2.0 * np.sqrt(np.pi / cfg.coarse_points)
    angles = 2.0 * np.pi * np.arange(cfg.ring_points) / cfg.ring_points
    while radius > cfg.min_radius and best_res > cfg.early_exit:
        # Orthonormal frame transverse to the current best direction.
        pivot = np.zeros(3)
        pivot[int(np.argmin(np.abs(best_dir)))] = 1.0
        u = np.cross(best_dir, pivot)
        u /= np.linalg.norm(u)
        v = np.cross(best_dir, u)
        improved = False
        for ang in angles:
            cand = best_dir + radius * (np.cos(ang) * u + np.sin(ang) * v)
            cand /= np.linalg.norm(cand)
            res, basis = _pinch_residual(rho, measured_factor, cand)
            if res < best_res:
                best_res, best_dir, best_basis = res, cand, basis
                improved = True
        radius *= cfg.shrink if not improved else 1.0
    return bool(best_res <= tau_disc), float(best_res), best_basis


def entanglement_generation_criterion(model: DephasingModel, t: float,
                                      tol: float = matrixcore.TAU_HERM) -> bool:
    """Whether a two-level dephasing model entangles system and environment
    at time t, decided without building the joint state.

    The joint state at t is, up to a local frame, the initial environment
    state steered by the relative propagator W(t) = V_0(t)^dag V_1(t);
    entanglement exists exactly when the initial environment state fails to
    commute with W(t).
    """
    if model.d_s != 2:
        raise UnsupportedModelError(f"criterion needs a two-level system, got d_s={model.d_s}")
    if not model.commuting_flag:
        raise UnsupportedModelError("criterion implemented for commuting couplings only")
    v0, v1 = dephasing.propagators(model, t)
    w = v0.conj().T @ v1
    rho = model.rho_e0.matrix
    return matrixcore.frobenius(rho @ w - w @ rho) > tol


def total_correlations(rho_se: DensityMatrix) -> float:
    """Trace distance between a joint state and the product of its marginals."""
    if len(rho_se.dims) != 2:
        raise DimensionMismatchError(f"need a bipartite state, got dims {rho_se.dims}")
    sys_m = matrixcore.partial_trace(rho_se.matrix, rho_se.dims, keep=0)
    env_m = matrixcore.partial_trace(rho_se.matrix, rho_se.dims, keep=1)
    product = DensityMatrix(matrixcore.kron(sys_m, env_m), rho_se.dims)
    return qstate.trace_distance(rho_se, product)
