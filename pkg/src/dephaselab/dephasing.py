"""System-environment models with conditional environment dynamics.

A model couples a d_S-level system to an environment through an interaction
that is diagonal in a fixed system basis: each system level n drives the
environment with its own Hermitian operator B_n while the populations stay
frozen.  The reduced dynamics is then fully described by scalar dephasing
factors built from the conditional environment propagators

    V_n(t) = time-ordered exp(-i Int_0^t B_n(s) ds),
    B_n(s) = exp(+i H_E s) B_n exp(-i H_E s),

which collapse to plain exponentials exp(-i B_n t) whenever B_n commutes
with the environment Hamiltonian.

The two-level family used throughout is parametrized by a Bloch vector
``alpha`` for the initial environment state, a unit coupling direction
``eta`` and a coupling strength ``g``: the environment operator is
B = g eta . sigma and the two branches couple through -B and +B.  Closed
forms are provided for the two distinguished members of that family (the
environment-diagonal one, which never builds quantum correlations, and the
pure-environment one, which entangles maximally) so the generic propagation
pipeline can be cross-checked against them.
"""

from dataclasses import dataclass, field

import numpy as np

from dephaselab import matrixcore, qstate
from dephaselab.errors import (
    BadUnitVectorError,
    DimensionMismatchError,
    InvariantViolationError,
    OutOfDomainError,
)
from dephaselab.qstate import DensityMatrix

# Fixed-step budget for genuinely time-ordered propagation.
STEPS_PER_UNIT_TIME = 2000
UNIT_VECTOR_TOL = 1e-12


@dataclass(frozen=True)
class QubitModelParams:
    """Two-level model parameters: environment Bloch vector, coupling
    direction (unit norm), and coupling strength."""

    alpha: tuple[float, float, float]
    eta: tuple[float, float, float]
    g: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        object.__setattr__(self, "eta", tuple(float(x) for x in self.eta))
        object.__setattr__(self, "g", float(self.g))


@dataclass(eq=False)
class DephasingModel:
    """Immutable-by-convention bundle: system dimension, environment
    Hamiltonian, per-level environment couplings, initial environment state,
    and whether every coupling commutes with the environment Hamiltonian."""

    d_s: int
    h_e: np.ndarray
    b_list: tuple
    rho_e0: DensityMatrix
    commuting_flag: bool
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.d_s = int(self.d_s)
        self.h_e = np.asarray(self.h_e, dtype=np.complex128)
        self.b_list = tuple(np.asarray(b, dtype=np.complex128) for b in self.b_list)

    @property
    def d_e(self) -> int:
        return self.h_e.shape[0]


def build_model(d_s: int, h_e, b_list, rho_e0: DensityMatrix,
                tau_herm: float = matrixcore.TAU_HERM) -> DephasingModel:
    """Assemble a model, detecting the commuting property automatically."""
    h_e = np.asarray(h_e, dtype=np.complex128)
    bs = tuple(np.asarray(b, dtype=np.complex128) for b in b_list)
    commuting = all(
        matrixcore.frobenius(h_e @ b - b @ h_e) <= tau_herm for b in bs
    )
    model = DephasingModel(d_s, h_e, bs, rho_e0, commuting)
    validate_model(model, tau_herm=tau_herm)
    return model


def validate_model(model: DephasingModel, tau_herm: float = matrixcore.TAU_HERM) -> DephasingModel:
    """Structural checks; raises on the first violated invariant."""
    d_e = model.d_e
    if model.d_s < 2:
        raise DimensionMismatchError(f"system dimension must be >= 2, got {model.d_s}")
    if len(model.b_list) != model.d_s:
        raise DimensionMismatchError(
            f"need one coupling per system level: {len(model.b_list)} != {model.d_s}"
        )
    if model.h_e.shape != (d_e, d_e):
        raise DimensionMismatchError(f"environment Hamiltonian shape {model.h_e.shape}")
    for n, b in enumerate(model.b_list):
        if b.shape != (d_e, d_e):
            raise DimensionMismatchError(f"coupling {n} shape {b.shape} vs environment {d_e}")
        if matrixcore.herm_defect(b) > tau_herm:
            raise InvariantViolationError(f"coupling {n} is not Hermitian")
    if matrixcore.herm_defect(model.h_e) > tau_herm:
        raise InvariantViolationError("environment Hamiltonian is not Hermitian")
    if model.rho_e0.dims != (d_e,):
        raise DimensionMismatchError(
            f"initial environment state dims {model.rho_e0.dims} vs environment {d_e}"
        )
    model.rho_e0.validate(tau_herm=tau_herm)
    commuting = all(
        matrixcore.frobenius(model.h_e @ b - b @ model.h_e) <= tau_herm for b in model.b_list
    )
    if commuting != model.commuting_flag:
        raise InvariantViolationError(
            f"commuting_flag={model.commuting_flag} inconsistent with couplings"
        )
    return model


def qubit_model(params: QubitModelParams) -> DephasingModel:
    """Two-level model from Bloch-space parameters.

    The system couples through the pair (-B, +B) with B = g eta . sigma; the
    environment Hamiltonian vanishes, so the model always commutes.
    """
    eta = np.asarray(params.eta, dtype=float)
    if abs(float(np.linalg.norm(eta)) - 1.0) > UNIT_VECTOR_TOL:
        raise BadUnitVectorError(f"coupling direction has norm {np.linalg.norm(eta):.12g}")
    rho_e0 = qstate.from_bloch(params.alpha)
    b = params.g * qstate.pauli_dot(eta)
    return DephasingModel(2, np.zeros((2, 2), dtype=np.complex128), (-b, b), rho_e0, True)


def _b_eigensystems(model: DephasingModel):
    if "b_eigs" not in model._cache:
        model._cache["b_eigs"] = tuple(matrixcore.eig_hermitian(b) for b in model.b_list)
    return model._cache["b_eigs"]


def _h_e_eigensystem(model: DephasingModel):
    if "h_eigs" not in model._cache:
        model._cache["h_eigs"] = matrixcore.eig_hermitian(model.h_e)
    return model._cache["h_eigs"]


def _env_spectrum(model: DephasingModel):
    """Initial environment state as (weights, row-stacked eigenvectors)."""
    if "env" not in model._cache:
        pairs = qstate.spectral_decompose(model.rho_e0)
        weights = np.array([w for w, _ in pairs])
        vectors = np.array([v for _, v in pairs])
        model._cache["env"] = (weights, vectors)
    return model._cache["env"]


def _default_steps(t: float, steps) -> int:
    if steps is not None:
        return int(steps)
    return max(1, int(np.ceil(STEPS_PER_UNIT_TIME * abs(t))))


def _interaction_generator(model: DephasingModel, n: int):
    es = _h_e_eigensystem(model)
    b = model.b_list[n]

    def b_of_t(s: float) -> np.ndarray:
        rot = (es.eigenvectors * np.exp(1j * s * es.eigenvalues)) @ es.eigenvectors.conj().T
        return rot @ b @ rot.conj().T

    return b_of_t


def propagators(model: DephasingModel, t: float, steps=None) -> list:
    """Conditional environment propagators [V_0(t), ..., V_{d_S-1}(t)].

    Commuting models use the exact exponential; otherwise a fixed-step
    time-ordered integration with ``steps`` total steps (default
    STEPS_PER_UNIT_TIME per unit of time).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if model.commuting_flag:
        out = []
        for es in _b_eigensystems(model):
            phases = np.exp(-1j * t * es.eigenvalues)
            out.append((es.eigenvectors * phases) @ es.eigenvectors.conj().T)
        return out
    n_steps = _default_steps(t, steps)
    return [
        matrixcore.time_ordered_propagator(_interaction_generator(model, n), t, n_steps)
        for n in range(model.d_s)
    ]


def propagator_trajectory(model: DephasingModel, n: int, times, steps=None) -> np.ndarray:
    """Stacked V_n over an ascending time grid, shape (T, d_E, d_E)."""
    times = np.asarray(times, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise ValueError("times must be ascending and non-negative")
    if model.commuting_flag:
        es = _b_eigensystems(model)[n]
        phases = np.exp(-1j * np.outer(times, es.eigenvalues))
        return np.einsum("ij,kj,lj->kil", es.eigenvectors, phases, es.eigenvectors.conj())
    b_of_t = _interaction_generator(model, n)
    rate = STEPS_PER_UNIT_TIME if steps is None else None
    out = np.empty((times.size, model.d_e, model.d_e), dtype=np.complex128)
    u = np.eye(model.d_e, dtype=np.complex128)
    prev = 0.0
    for k, t_k in enumerate(times):
        span = t_k - prev
        if span > 0:
            if rate is None:
                seg_steps = max(1, int(np.ceil(int(steps) * span / max(times[-1], span))))
            else:
                seg_steps = max(1, int(np.ceil(rate * span)))
            seg = matrixcore.time_ordered_propagator(
                lambda s, t0=prev: b_of_t(t0 + s), span, seg_steps
            )
            u = seg @ u
        out[k] = u
        prev = t_k
    return out


@dataclass(frozen=True)
class DephasingFunctions:
    """Scalar dephasing data at one time: per-eigenstate factors
    F[alpha, n, m] = <phi_alpha| V_m(t)^dag V_n(t) |phi_alpha> together with
    the spectral weights of the initial environment state."""

    weights: np.ndarray
    factors: np.ndarray
    time: float

    def averaged(self) -> np.ndarray:
        """Weight-averaged factor matrix multiplying the coherences."""
        return np.einsum("a,anm->nm", self.weights, self.factors)


def dephasing_functions(model: DephasingModel, t: float, steps=None) -> DephasingFunctions:
    """Evaluate every dephasing factor of the model at time t."""
    weights, vectors = _env_spectrum(model)
    vs = propagators(model, t, steps)
    d_s = model.d_s
    factors = np.empty((weights.size, d_s, d_s), dtype=np.complex128)
    for n in range(d_s):
        for m in range(d_s):
            w_nm = vs[m].conj().T @ vs[n]
            factors[:, n, m] = np.einsum("ai,ij,aj->a", vectors.conj(), w_nm, vectors)
    return DephasingFunctions(weights, factors, float(t))


def factor_trajectory(model: DephasingModel, n: int, m: int, times, steps=None) -> np.ndarray:
    """Averaged dephasing factor for the (n, m) coherence over a time grid."""
    weights, vectors = _env_spectrum(model)
    vn = propagator_trajectory(model, n, times, steps)
    vm = propagator_trajectory(model, m, times, steps)
    w = np.matmul(np.conjugate(np.transpose(vm, (0, 2, 1))), vn)
    per_mode = np.einsum("ai,kij,aj->ka", vectors.conj(), w, vectors)
    return per_mode @ weights.astype(np.complex128)


def reduced_state(model: DephasingModel, rho_s0: DensityMatrix, t: float, steps=None) -> DensityMatrix:
    """System state at time t: coherences scaled by the averaged factors."""
    if rho_s0.dims != (model.d_s,):
        raise DimensionMismatchError(
            f"system state dims {rho_s0.dims} vs model system dimension {model.d_s}"
        )
    f = dephasing_functions(model, t, steps).averaged()
    return DensityMatrix(rho_s0.matrix * f, (model.d_s,))


def reduced_state_trajectory(model: DephasingModel, rho_s0: DensityMatrix, times, steps=None) -> np.ndarray:
    """Stacked system states over a time grid, shape (T, d_S, d_S).

    Fast path for grids: diagonal factors are identically one, and each
    coherence pair is batched over all times at once.
    """
    if rho_s0.dims != (model.d_s,):
        raise DimensionMismatchError(
            f"system state dims {rho_s0.dims} vs model system dimension {model.d_s}"
        )
    times = np.asarray(times, dtype=float)
    d_s = model.d_s
    f = np.ones((times.size, d_s, d_s), dtype=np.complex128)
    for n in range(d_s):
        for m in range(n):
            fnm = factor_trajectory(model, n, m, times, steps)
            f[:, n, m] = fnm
            f[:, m, n] = fnm.conj()
    return f * rho_s0.matrix[None, :, :]


def _controlled_unitary(model: DephasingModel, vs) -> np.ndarray:
    d_s, d_e = model.d_s, model.d_e
    u = np.zeros((d_s * d_e, d_s * d_e), dtype=np.complex128)
    for n in range(d_s):
        u[n * d_e:(n + 1) * d_e, n * d_e:(n + 1) * d_e] = vs[n]
    return u


def global_state(model: DephasingModel, rho_s0: DensityMatrix, t: float, steps=None) -> DensityMatrix:
    """Joint system-environment state at time t.

    Built by conjugating the product initial state with the controlled
    unitary sum_n |n><n| (x) V_n(t); tracing out the environment must
    reproduce :func:`reduced_state`, which the tests use as a cross-check
    of the two routes.
    """
    if rho_s0.dims != (model.d_s,):
        raise DimensionMismatchError(
            f"system state dims {rho_s0.dims} vs model system dimension {model.d_s}"
        )
    u = _controlled_unitary(model, propagators(model, t, steps))
    rho0 = matrixcore.kron(rho_s0.matrix, model.rho_e0.matrix)
    return DensityMatrix(u @ rho0 @ u.conj().T, (model.d_s, model.d_e))


def global_state_trajectory(model: DephasingModel, rho_s0: DensityMatrix, times, steps=None) -> np.ndarray:
    """Stacked joint states over a time grid, shape (T, d_S d_E, d_S d_E)."""
    if rho_s0.dims != (model.d_s,):
        raise DimensionMismatchError(
            f"system state dims {rho_s0.dims} vs model system dimension {model.d_s}"
        )
    times = np.asarray(times, dtype=float)
    d = model.d_s * model.d_e
    trajs = [propagator_trajectory(model, n, times, steps) for n in range(model.d_s)]
    u = np.zeros((times.size, d, d), dtype=np.complex128)
    d_e = model.d_e
    for n in range(model.d_s):
        u[:, n * d_e:(n + 1) * d_e, n * d_e:(n + 1) * d_e] = trajs[n]
    rho0 = matrixcore.kron(rho_s0.matrix, model.rho_e0.matrix)
    return np.matmul(np.matmul(u, rho0[None, :, :]), np.conjugate(np.transpose(u, (0, 2, 1))))


def closed_form_zero_discord(c: float, g: float, rho_s0: DensityMatrix, t: float) -> DensityMatrix:
    """Joint state of the environment-diagonal two-level model.

    The model (alpha = (0,0,c), eta = (0,0,1)) keeps the joint state block
    diagonal in the environment basis at all times: each environment level
    carries the system state with its coherence rotated by e^(-+ 2igt), and
    the blocks are weighted (1+c)/2 and (1-c)/2.  No quantum correlation of
    any kind is ever generated.
    """
    if abs(c) > 1.0:
        raise OutOfDomainError(f"population bias c={c} outside [-1, 1]")
    if rho_s0.dims != (2,):
        raise DimensionMismatchError(f"system state dims {rho_s0.dims}, expected (2,)")
    phase = np.exp(-2j * g * t)
    turn = np.array([[1.0, phase.conjugate()], [phase, 1.0]], dtype=np.complex128)
    rho_plus = rho_s0.matrix * turn
    rho_minus = rho_s0.matrix * turn.conj()
    p_up = np.diag([0.0, 1.0]).astype(np.complex128)
    p_down = np.diag([1.0, 0.0]).astype(np.complex128)
    m = (0.5 * (1.0 + c)) * matrixcore.kron(rho_plus, p_up)
    m = m + (0.5 * (1.0 - c)) * matrixcore.kron(rho_minus, p_down)
    return DensityMatrix(m, (2, 2))


def closed_form_entangled(c: float, g: float, rho_s0: DensityMatrix, t: float) -> DensityMatrix:
    """Joint state of the pure-environment two-level model.

    The partner model (alpha = (0,0,1), eta = (sqrt(1-c^2), 0, c)) starts
    from the pure environment state |1>, whose two conditional images are
    superpositions with amplitudes built from

        ell = cos(gt) + i c sin(gt),   kappa = i sqrt(1-c^2) sin(gt),

    so the joint state generically carries system-environment entanglement
    while producing the same reduced dynamics as the zero-discord form.
    """
    if abs(c) > 1.0:
        raise OutOfDomainError(f"axis overlap c={c} outside [-1, 1]")
    if rho_s0.dims != (2,):
        raise DimensionMismatchError(f"system state dims {rho_s0.dims}, expected (2,)")
    ell = np.cos(g * t) + 1j * c * np.sin(g * t)
    kappa = 1j * np.sqrt(max(0.0, 1.0 - c * c)) * np.sin(g * t)
    # Conditional images of |1>, components ordered (|0>, |1>).
    v0 = np.array([kappa, ell], dtype=np.complex128)
    v1 = np.array([-kappa, ell.conjugate()], dtype=np.complex128)
    vs = (v0, v1)
    m = np.zeros((4, 4), dtype=np.complex128)
    for n in range(2):
        for mm in range(2):
            block = rho_s0.matrix[n, mm] * np.outer(vs[n], vs[mm].conj())
            m[n * 2:(n + 1) * 2, mm * 2:(mm + 1) * 2] = block
    return DensityMatrix(m, (2, 2))
