"""Deciding whether two dephasing models share their reduced dynamics.

Two models with the same system dimension are equivalent when, for every
coherence (n, m), the weight-averaged dephasing factors agree at all times.
Three routes are implemented:

* the time-domain check, authoritative for arbitrary models, which samples
  the factors on a finite grid;
* the moment check for two-level commuting models, which compares
  environment moments of the effective coupling difference operator and
  decides equivalence without any time sampling;
* the inner-product condition for the Bloch-parametrized two-level family,
  where everything collapses to the scalar alpha . eta at equal coupling.

``construct_partner`` produces, for the environment-diagonal model with
population bias c, the pure-environment partner passing all three checks.

Verdicts carry a ``borderline`` flag: a discrepancy inside (tol, 2 tol]
still reads "not equivalent" but is marked as too close to call firmly.
"""

from dataclasses import dataclass

import numpy as np

from dephaselab import dephasing
from dephaselab.errors import (
    CouplingMismatchError,
    DimensionMismatchError,
    OutOfDomainError,
    UnsupportedModelError,
)
from dephaselab.dephasing import DephasingModel, QubitModelParams

DEFAULT_TOL = 1e-9
DEFAULT_GRID_POINTS = 200
DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of one equivalence check.

    ``witness`` localizes the worst discrepancy: (n, m, t) for the
    time-domain route, (k,) for the moment route, None for the scalar
    inner-product route.
    """

    equivalent: bool
    method: str
    max_discrepancy: float
    witness: tuple | None = None
    borderline: bool = False


def _verdict(method: str, disc: float, witness, tol: float) -> EquivalenceVerdict:
    equivalent = disc <= tol
    borderline = (not equivalent) and disc <= 2.0 * tol
    return EquivalenceVerdict(equivalent, method, float(disc), witness, borderline)


def default_time_grid(model_a: DephasingModel, model_b: DephasingModel,
                      points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Grid spanning four periods of the fastest coupling frequency."""
    scale = 0.0
    for model in (model_a, model_b):
        for b in model.b_list:
            # Frobenius norm upper-bounds the spectral radius; good enough
            # to size a sampling window.
            scale = max(scale, 0.5 * float(np.sqrt((np.abs(b) ** 2).sum())))
    if scale == 0.0:
        scale = 1.0
    return np.linspace(0.0, 4.0 * np.pi / scale, points)


def time_domain_check(model_a: DephasingModel, model_b: DephasingModel,
                      grid=None, tol: float = DEFAULT_TOL, steps=None) -> EquivalenceVerdict:
    """Compare averaged dephasing factors of two models on a time grid."""
    if model_a.d_s != model_b.d_s:
        raise DimensionMismatchError(
            f"system dimensions differ: {model_a.d_s} vs {model_b.d_s}"
        )
    if grid is None:
        grid = default_time_grid(model_a, model_b)
    grid = np.asarray(grid, dtype=float)
    disc = 0.0
    witness = None
    for n in range(model_a.d_s):
        for m in range(n):
            fa = dephasing.factor_trajectory(model_a, n, m, grid, steps)
            fb = dephasing.factor_trajectory(model_b, n, m, grid, steps)
            gap = np.abs(fa - fb)
            k = int(np.argmax(gap))
            if gap[k] >= disc:
                disc = float(gap[k])
                witness = (n, m, float(grid[k]))
    return _verdict("time-domain", disc, witness, tol)


def _difference_operator(model: DephasingModel) -> np.ndarray:
    # Two-level reduction: only B_1 - B_0 enters the single coherence; the
    # factor of 1/2 restores the +-B parametrization of qubit_model.
    return 0.5 * (model.b_list[1] - model.b_list[0])


def moment_check(model_a: DephasingModel, model_b: DephasingModel,
                 k_max=None, tol: float = DEFAULT_TOL) -> EquivalenceVerdict:
    """Compare environment moments of the effective coupling operator.

    Only defined for two-level commuting models, where the single dephasing
    factor is the characteristic function of the coupling spectrum in the
    initial environment state and is pinned down by finitely many moments
    (squared environment dimension minus one).
    """
    for who, model in (("first", model_a), ("second", model_b)):
        if model.d_s != 2:
            raise UnsupportedModelError(f"moment check needs a two-level system ({who} model)")
        if not model.commuting_flag:
            raise UnsupportedModelError(f"moment check needs commuting couplings ({who} model)")
    if k_max is None:
        k_max = max(model_a.d_e, model_b.d_e) ** 2 - 1
    disc = 0.0
    witness = None
    wa = _difference_operator(model_a)
    wb = _difference_operator(model_b)
    pa = model_a.rho_e0.matrix
    pb = model_b.rho_e0.matrix
    power_a = np.eye(model_a.d_e, dtype=np.complex128)
    power_b = np.eye(model_b.d_e, dtype=np.complex128)
    for k in range(1, int(k_max) + 1):
        power_a = power_a @ wa
        power_b = power_b @ wb
        ma = np.trace(pa @ power_a)
        mb = np.trace(pb @ power_b)
        gap = abs(ma - mb)
        if gap >= disc:
            disc = float(gap)
            witness = (k,)
    return _verdict("moments", disc, witness, tol)


def qubit_condition(a: QubitModelParams, b: QubitModelParams,
                    tol: float = DEFAULT_TOL) -> EquivalenceVerdict:
    """Scalar equivalence test for the Bloch-parametrized two-level family.

    At equal coupling strength the reduced dynamics depends on the model
    only through alpha . eta; unequal couplings are rejected outright.
    """
    if abs(a.g - b.g) > tol:
        raise CouplingMismatchError(f"coupling strengths differ: {a.g} vs {b.g}")
    ip_a = float(np.dot(a.alpha, a.eta))
    ip_b = float(np.dot(b.alpha, b.eta))
    return _verdict("inner-product", abs(ip_a - ip_b), None, tol)


def construct_partner(c: float, d: float = 0.0, g: float = 1.0) -> QubitModelParams:
    """Pure-environment partner of the environment-diagonal model.

    For the model (alpha = (0,0,c), eta = (0,0,1), g) returns parameters
    with a pure initial environment state, alpha = (0,0,1) and
    eta = (sqrt(1 - c^2 - d^2), d, c), which shares the reduced dynamics.
    The transverse component d is free; c = 1 is excluded (the two models
    would coincide up to a frame rotation, leaving nothing to construct).
    """
    c = float(c)
    d = float(d)
    if c * c + d * d > 1.0 + DOMAIN_TOL:
        raise OutOfDomainError(f"(c, d) = ({c}, {d}) lies outside the unit disk")
    if c >= 1.0:
        raise OutOfDomainError(f"population bias c={c} must be < 1")
    ex = float(np.sqrt(max(0.0, 1.0 - c * c - d * d)))
    return QubitModelParams(alpha=(0.0, 0.0, 1.0), eta=(ex, d, c), g=g)
