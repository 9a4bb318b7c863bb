"""Trace-distance information flow and its environment/correlation budget.

For a pair of initial system states evolving under one model, the central
objects are the distinguishability trajectory D(t) between the two reduced
states, its variation delta_S(t, s) = D(t) - D(s) over an interval, and the
three-term budget evaluated at the earlier time s:

    env_term      distance between the two environment marginals,
    corr_term_1   total correlations in the first joint state,
    corr_term_2   total correlations in the second joint state.

Any later gain in distinguishability is bounded by the sum of the three
terms; a model that never correlates system and environment and never
imprints the system on the environment therefore admits no backflow.

The backflow measure integrates every positive increment of D over a grid,
maximized over a set of candidate pairs.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from dephaselab import dephasing, matrixcore, qstate
from dephaselab.errors import BadIntervalError, DimensionMismatchError, EmptyInputError
from dephaselab.dephasing import DephasingModel
from dephaselab.qstate import DensityMatrix


@dataclass(frozen=True)
class StatePair:
    """Two candidate initial system states plus a display label."""

    first: DensityMatrix
    second: DensityMatrix
    label: str = ""


class IseTerms(NamedTuple):
    """Budget terms at one time; ``total`` is their sum."""

    env_term: float
    corr_term_1: float
    corr_term_2: float
    total: float


@dataclass(frozen=True)
class InfoFlowReport:
    """Grid evaluation of everything above for one model and pair.

    ``delta[i, j]`` is D(times[j]) - D(times[i]); entries with j < i are
    just the negated mirror and are kept for convenience.
    """

    times: np.ndarray
    distances: np.ndarray
    delta: np.ndarray
    env_term: np.ndarray
    corr_term_1: np.ndarray
    corr_term_2: np.ndarray
    i_se: np.ndarray


def _check_pair(model: DephasingModel, pair: StatePair):
    want = (model.d_s,)
    if pair.first.dims != want or pair.second.dims != want:
        raise DimensionMismatchError(
            f"state pair dims {pair.first.dims}/{pair.second.dims} vs system {want}"
        )


def distance_trajectory(model: DephasingModel, pair: StatePair, times, steps=None) -> np.ndarray:
    """D(t) between the two reduced states over a time grid."""
    _check_pair(model, pair)
    times = np.asarray(times, dtype=float)
    tr1 = dephasing.reduced_state_trajectory(model, pair.first, times, steps)
    tr2 = dephasing.reduced_state_trajectory(model, pair.second, times, steps)
    out = np.empty(times.size, dtype=float)
    for k in range(times.size):
        w = matrixcore.eigvals_hermitian(tr1[k] - tr2[k])
        out[k] = 0.5 * float(np.abs(w).sum())
    return out


def delta_S(model: DephasingModel, pair: StatePair, s: float, t: float, steps=None) -> float:
    """Distinguishability variation D(t) - D(s) over the interval [s, t]."""
    if not 0.0 <= s <= t:
        raise BadIntervalError(f"need 0 <= s <= t, got s={s}, t={t}")
    d_s_val, d_t_val = distance_trajectory(model, pair, np.array([s, t]), steps)
    return float(d_t_val - d_s_val)


def ise_terms(model: DephasingModel, pair: StatePair, s: float, steps=None) -> IseTerms:
    """Environment and correlation budget terms at time s."""
    if s < 0:
        raise BadIntervalError(f"need s >= 0, got s={s}")
    _check_pair(model, pair)
    dims = (model.d_s, model.d_e)
    joint1 = dephasing.global_state(model, pair.first, s, steps)
    joint2 = dephasing.global_state(model, pair.second, s, steps)
    terms = []
    envs = []
    for joint in (joint1, joint2):
        sys_m = matrixcore.partial_trace(joint.matrix, dims, keep=0)
        env_m = matrixcore.partial_trace(joint.matrix, dims, keep=1)
        envs.append(env_m)
        product = DensityMatrix(matrixcore.kron(sys_m, env_m), dims)
        terms.append(qstate.trace_distance(joint, product))
    env_term = qstate.trace_distance(
        DensityMatrix(envs[0], (model.d_e,)), DensityMatrix(envs[1], (model.d_e,))
    )
    return IseTerms(env_term, terms[0], terms[1], env_term + terms[0] + terms[1])


def budget_trajectory(model: DephasingModel, pair: StatePair, times, steps=None):
    """Budget terms over a grid, shape (T,) each: (env, corr_1, corr_2).

    Shares the propagator work across the whole grid instead of rebuilding
    the joint states point by point.
    """
    _check_pair(model, pair)
    times = np.asarray(times, dtype=float)
    dims = (model.d_s, model.d_e)
    g1 = dephasing.global_state_trajectory(model, pair.first, times, steps)
    g2 = dephasing.global_state_trajectory(model, pair.second, times, steps)
    env = np.empty(times.size)
    c1 = np.empty(times.size)
    c2 = np.empty(times.size)
    for k in range(times.size):
        envs = []
        corr = []
        for joint in (g1[k], g2[k]):
            sys_m = matrixcore.partial_trace(joint, dims, keep=0)
            env_m = matrixcore.partial_trace(joint, dims, keep=1)
            envs.append(env_m)
            diff = joint - matrixcore.kron(sys_m, env_m)
            corr.append(0.5 * float(np.abs(matrixcore.eigvals_hermitian(diff)).sum()))
        w = matrixcore.eigvals_hermitian(envs[0] - envs[1])
        env[k] = 0.5 * float(np.abs(w).sum())
        c1[k] = corr[0]
        c2[k] = corr[1]
    return env, c1, c2


def blp_measure(model: DephasingModel, candidate_pairs: Sequence[StatePair],
                grid, steps=None):
    """Summed positive increments of D over a grid, maximized over pairs.

    Returns ``(measure, best_pair)``.
    """
    pairs = list(candidate_pairs)
    if not pairs:
        raise EmptyInputError("no candidate pairs")
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise EmptyInputError("grid needs at least two points")
    if np.any(np.diff(grid) < 0) or grid[0] < 0:
        raise BadIntervalError("grid must be ascending and non-negative")
    best = -1.0
    best_pair = None
    for pair in pairs:
        d = distance_trajectory(model, pair, grid, steps)
        inc = np.diff(d)
        measure = float(inc[inc > 0].sum())
        if measure > best:
            best = measure
            best_pair = pair
    return best, best_pair


def antipodal_pairs(count: int) -> list:
    """Deterministic antipodal pure-state pairs covering the Bloch sphere.

    Directions follow the Fibonacci lattice; pair k is the pure state along
    direction k together with its antipode.
    """
    if count < 1:
        raise EmptyInputError("count must be >= 1")
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    pairs = []
    for k in range(count):
        z = 1.0 - (2.0 * k + 1.0) / count
        radius = np.sqrt(max(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * ((k / golden) % 1.0)
        direction = np.array([radius * np.cos(phi), radius * np.sin(phi), z])
        pairs.append(
            StatePair(
                qstate.from_bloch(direction),
                qstate.from_bloch(-direction),
                label=f"antipodal-{k}",
            )
        )
    return pairs


def info_flow_report(model: DephasingModel, pair: StatePair, times, steps=None) -> InfoFlowReport:
    """Evaluate distances, variations, and budget terms over a grid."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise EmptyInputError("empty time grid")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise BadIntervalError("times must be ascending and non-negative")
    d = distance_trajectory(model, pair, times, steps)
    delta = d[None, :] - d[:, None]
    env, c1, c2 = budget_trajectory(model, pair, times, steps)
    return InfoFlowReport(times, d, delta, env, c1, c2, env + c1 + c2)
