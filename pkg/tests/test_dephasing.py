"""Model construction, propagators, reduced/global states, closed forms."""

import numpy as np
import pytest

from dephaselab import dephasing, matrixcore, qstate
from dephaselab.dephasing import QubitModelParams
from dephaselab.errors import (
    BadUnitVectorError,
    DimensionMismatchError,
    InvariantViolationError,
    OutOfDomainError,
)
from conftest import random_density, random_hermitian, random_pure

PSI_PLUS = qstate.pure_state([1.0, 1.0])


def _noncommuting_model():
    # Environment Hamiltonian along x, couplings along z: B_n(t) genuinely
    # rotates, forcing the time-ordered path.
    h_e = 0.7 * qstate.SIGMA_X
    b = 0.9 * qstate.SIGMA_Z
    rho = qstate.from_bloch((0.0, 0.3, 0.5))
    return dephasing.build_model(2, h_e, [-b, b], rho)


def test_qubit_model_structure():
    params = QubitModelParams((0.0, 0.0, 0.6), (0.0, 0.0, 1.0), g=1.3)
    model = dephasing.qubit_model(params)
    assert model.d_s == 2 and model.d_e == 2
    assert model.commuting_flag
    assert np.abs(model.b_list[0] + model.b_list[1]).max() < 1e-15
    assert np.abs(model.b_list[1] - 1.3 * qstate.SIGMA_Z).max() < 1e-15
    assert np.abs(model.rho_e0.matrix - np.diag([0.2, 0.8])).max() < 1e-12


def test_qubit_model_rejects_non_unit_direction():
    with pytest.raises(BadUnitVectorError):
        dephasing.qubit_model(QubitModelParams((0.0, 0.0, 0.0), (0.0, 0.0, 1.1)))


def test_build_model_detects_commuting():
    h_e = np.diag([0.2, -0.4]).astype(complex)
    b = qstate.SIGMA_Z.astype(complex)
    rho = qstate.from_bloch((0.0, 0.0, 0.3))
    model = dephasing.build_model(2, h_e, [-b, b], rho)
    assert model.commuting_flag
    assert not _noncommuting_model().commuting_flag


def test_validate_model_rejects_inconsistencies(rng):
    rho = qstate.from_bloch((0.0, 0.0, 0.0))
    good_b = qstate.SIGMA_Z.astype(complex)
    zero_h = np.zeros((2, 2), dtype=complex)
    with pytest.raises(DimensionMismatchError):
        dephasing.validate_model(dephasing.DephasingModel(2, zero_h, (good_b,), rho, True))
    with pytest.raises(InvariantViolationError, match="Hermitian"):
        dephasing.validate_model(dephasing.DephasingModel(
            2, zero_h, (good_b, good_b + 0.1j * np.eye(2)), rho, True))
    with pytest.raises(DimensionMismatchError):
        dephasing.validate_model(dephasing.DephasingModel(
            2, zero_h, (good_b, good_b), random_density(rng, (3,)), True))
    with pytest.raises(InvariantViolationError, match="commuting_flag"):
        dephasing.validate_model(dephasing.DephasingModel(
            2, 0.7 * qstate.SIGMA_X.astype(complex), (good_b, good_b), rho, True))


def test_propagators_are_unitary():
    for model in (dephasing.qubit_model(QubitModelParams((0.1, 0.2, 0.3), (0.0, 1.0, 0.0))),
                  _noncommuting_model()):
        for v in dephasing.propagators(model, 0.8):
            assert np.abs(v @ v.conj().T - np.eye(model.d_e)).max() < 1e-12


def test_commuting_propagator_is_plain_exponential():
    model = dephasing.qubit_model(QubitModelParams((0.0, 0.0, 0.4), (1.0, 0.0, 0.0)))
    t = 0.65
    vs = dephasing.propagators(model, t)
    for v, b in zip(vs, model.b_list):
        assert np.abs(v - matrixcore.expm_hermitian(b, theta=t)).max() < 1e-12


def test_time_ordered_propagator_matches_interaction_identity():
    # V_n(t) = e^{+i H t} e^{-i (H + B_n) t} holds exactly for
    # B_n(s) = e^{iHs} B_n e^{-iHs}.
    model = _noncommuting_model()
    for t in (0.3, 1.1):
        vs = dephasing.propagators(model, t)
        for v, b in zip(vs, model.b_list):
            want = (matrixcore.expm_hermitian(model.h_e, theta=-t)
                    @ matrixcore.expm_hermitian(model.h_e + b, theta=t))
            assert np.abs(v - want).max() < 1e-10


def test_propagator_trajectory_matches_pointwise():
    times = np.linspace(0.0, 1.5, 7)
    for model in (dephasing.qubit_model(QubitModelParams((0.0, 0.0, 0.5), (0.0, 0.0, 1.0))),
                  _noncommuting_model()):
        for n in range(model.d_s):
            traj = dephasing.propagator_trajectory(model, n, times)
            for k, t in enumerate(times):
                v = dephasing.propagators(model, float(t))[n]
                assert np.abs(traj[k] - v).max() < 1e-10


def test_fig3_factors_are_cos_2t(fig3_models):
    ma, mb = fig3_models
    times = np.linspace(0.0, np.pi, 41)
    for model in (ma, mb):
        f = dephasing.factor_trajectory(model, 1, 0, times)
        assert np.abs(f - np.cos(2.0 * times)).max() < 1e-10


def test_dephasing_functions_shape_and_average(fig3_models):
    ma, _ = fig3_models
    fn = dephasing.dephasing_functions(ma, 0.7)
    assert fn.factors.shape == (fn.weights.size, 2, 2)
    assert abs(fn.weights.sum() - 1.0) < 1e-12
    avg = fn.averaged()
    manual = np.einsum("a,anm->nm", fn.weights.astype(complex), fn.factors)
    assert np.abs(avg - manual).max() < 1e-15
    assert np.abs(np.diagonal(avg) - 1.0).max() < 1e-12


def test_reduced_state_preserves_populations(rng):
    model = _noncommuting_model()
    rho0 = random_density(rng, (2,))
    for t in (0.0, 0.4, 1.3):
        rho_t = dephasing.reduced_state(model, rho0, t)
        assert np.abs(np.diagonal(rho_t.matrix) - np.diagonal(rho0.matrix)).max() < 1e-12
        rho_t.validate()


def test_reduced_state_dual_route(rng):
    # Hadamard route (averaged factors) against trace-out of the global
    # state: the two constructions must agree for commuting and
    # time-ordered models alike.
    models = (
        dephasing.qubit_model(QubitModelParams((0.2, -0.1, 0.5), (0.0, 0.0, 1.0), g=0.8)),
        _noncommuting_model(),
    )
    for model in models:
        rho0 = random_pure(rng)
        for t in (0.35, 1.2):
            direct = dephasing.reduced_state(model, rho0, t).matrix
            joint = dephasing.global_state(model, rho0, t)
            traced = matrixcore.partial_trace(joint.matrix, (2, model.d_e), keep=0)
            assert np.abs(direct - traced).max() < 1e-11


def test_trajectories_match_pointwise(rng):
    model = dephasing.qubit_model(QubitModelParams((0.0, 0.0, 0.3), (0.6, 0.0, 0.8)))
    rho0 = random_pure(rng)
    times = np.linspace(0.0, 2.0, 9)
    red = dephasing.reduced_state_trajectory(model, rho0, times)
    glob = dephasing.global_state_trajectory(model, rho0, times)
    for k, t in enumerate(times):
        assert np.abs(red[k] - dephasing.reduced_state(model, rho0, float(t)).matrix).max() < 1e-12
        assert np.abs(glob[k] - dephasing.global_state(model, rho0, float(t)).matrix).max() < 1e-12


def test_global_state_is_valid_density(rng):
    model = _noncommuting_model()
    rho0 = random_density(rng, (2,))
    joint = dephasing.global_state(model, rho0, 0.9)
    joint.validate()
    assert joint.dims == (2, 2)


def test_closed_forms_match_generic_propagation():
    times = np.linspace(0.0, np.pi, 21)
    for c in (0.0, 0.3, 0.6):
        pa = QubitModelParams((0.0, 0.0, c), (0.0, 0.0, 1.0), 1.0)
        eta = (float(np.sqrt(1 - c * c)), 0.0, c)
        pb = QubitModelParams((0.0, 0.0, 1.0), eta, 1.0)
        ma = dephasing.qubit_model(pa)
        mb = dephasing.qubit_model(pb)
        for t in times:
            za = dephasing.closed_form_zero_discord(c, 1.0, PSI_PLUS, float(t))
            zb = dephasing.closed_form_entangled(c, 1.0, PSI_PLUS, float(t))
            ga = dephasing.global_state(ma, PSI_PLUS, float(t))
            gb = dephasing.global_state(mb, PSI_PLUS, float(t))
            assert np.abs(za.matrix - ga.matrix).max() < 1e-10
            assert np.abs(zb.matrix - gb.matrix).max() < 1e-10


def test_closed_form_entangled_quarter_period_state():
    got = dephasing.closed_form_entangled(0.0, 1.0, PSI_PLUS, np.pi / 4).matrix
    amp = 0.5 * np.array([1j, 1.0, -1j, 1.0])
    want = np.outer(amp, amp.conj())
    assert np.abs(got - want).max() < 1e-12


def test_closed_forms_reject_out_of_domain():
    with pytest.raises(OutOfDomainError):
        dephasing.closed_form_zero_discord(1.2, 1.0, PSI_PLUS, 0.1)
    with pytest.raises(OutOfDomainError):
        dephasing.closed_form_entangled(-1.2, 1.0, PSI_PLUS, 0.1)


def test_state_dims_checked():
    model = dephasing.qubit_model(QubitModelParams((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)))
    wrong = qstate.pure_state([1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        dephasing.reduced_state(model, wrong, 0.5)
    with pytest.raises(DimensionMismatchError):
        dephasing.global_state(model, wrong, 0.5)


def test_steps_override_accepted():
    model = _noncommuting_model()
    coarse = dephasing.propagators(model, 0.5, steps=64)
    fine = dephasing.propagators(model, 0.5, steps=4096)
    assert np.abs(coarse[0] - fine[0]).max() < 1e-7


def test_three_level_system_model(rng):
    # d_s = 3 with distinct diagonal couplings: factors are products of
    # environment phase averages; populations still frozen.
    h_e = np.zeros((2, 2), dtype=complex)
    bs = [0.4 * qstate.SIGMA_Z, -0.9 * qstate.SIGMA_Z, 1.5 * qstate.SIGMA_Z]
    rho_e = qstate.from_bloch((0.0, 0.0, 0.2))
    model = dephasing.build_model(3, h_e, bs, rho_e)
    rho0 = random_density(rng, (3,))
    t = 0.8
    out = dephasing.reduced_state(model, rho0, t)
    out.validate()
    assert np.abs(np.diagonal(out.matrix) - np.diagonal(rho0.matrix)).max() < 1e-12
    joint = dephasing.global_state(model, rho0, t)
    traced = matrixcore.partial_trace(joint.matrix, (3, 2), keep=0)
    assert np.abs(out.matrix - traced).max() < 1e-11
