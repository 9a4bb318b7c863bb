"""Dense Hermitian linear algebra: decomposition, exponentials, tensor ops."""

import numpy as np
import pytest

from dephaselab import matrixcore
from dephaselab.errors import (
    NoConvergenceError,
    NonHermitianGeneratorError,
    NotHermitianError,
)
from conftest import random_hermitian


def test_eig_hermitian_reconstructs(rng):
    for n in (2, 3, 4, 8):
        h = random_hermitian(rng, n)
        w, v = matrixcore.eig_hermitian(h)
        assert np.abs((v * w) @ v.conj().T - h).max() < 1e-12
        assert np.all(np.diff(w) >= 0)


def test_eig_hermitian_rejects_non_hermitian(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    with pytest.raises(NotHermitianError):
        matrixcore.eig_hermitian(m)
    with pytest.raises(NotHermitianError):
        matrixcore.eigvals_hermitian(m)


def test_eigvals_match_full_decomposition(rng):
    h = random_hermitian(rng, 5)
    w_only = matrixcore.eigvals_hermitian(h)
    w_full, _ = matrixcore.eig_hermitian(h)
    assert np.abs(w_only - w_full).max() < 1e-13


def test_expm_hermitian_unitary(rng):
    for n in (2, 4):
        h = random_hermitian(rng, n)
        u = matrixcore.expm_hermitian(h, theta=0.73)
        assert np.abs(u @ u.conj().T - np.eye(n)).max() < 1e-12


def test_expm_hermitian_known_rotation():
    # exp(-i theta sigma_x) = cos(theta) 1 - i sin(theta) sigma_x
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    theta = 0.4
    u = matrixcore.expm_hermitian(sx, theta=theta)
    want = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * sx
    assert np.abs(u - want).max() < 1e-14


def test_expm_hermitian_group_property(rng):
    h = random_hermitian(rng, 3)
    u1 = matrixcore.expm_hermitian(h, theta=0.3)
    u2 = matrixcore.expm_hermitian(h, theta=0.5)
    u12 = matrixcore.expm_hermitian(h, theta=0.8)
    assert np.abs(u1 @ u2 - u12).max() < 1e-12


def test_partial_trace_of_product(rng):
    a = random_hermitian(rng, 2)
    b = random_hermitian(rng, 3)
    m = matrixcore.kron(a, b)
    got_a = matrixcore.partial_trace(m, (2, 3), keep=0)
    got_b = matrixcore.partial_trace(m, (2, 3), keep=1)
    assert np.abs(got_a - np.trace(b) * a).max() < 1e-13
    assert np.abs(got_b - np.trace(a) * b).max() < 1e-13


def test_partial_trace_preserves_trace(rng):
    m = random_hermitian(rng, 6)
    for dims in ((2, 3), (3, 2)):
        for keep in (0, 1):
            red = matrixcore.partial_trace(m, dims, keep=keep)
            assert abs(np.trace(red) - np.trace(m)) < 1e-13


def test_partial_transpose_involution_and_full_transpose(rng):
    m = random_hermitian(rng, 6)
    pt1 = matrixcore.partial_transpose(m, (2, 3), factor=1)
    assert np.abs(matrixcore.partial_transpose(pt1, (2, 3), factor=1) - m).max() < 1e-15
    both = matrixcore.partial_transpose(
        matrixcore.partial_transpose(m, (2, 3), factor=0), (2, 3), factor=1)
    assert np.abs(both - m.T).max() < 1e-15


def test_partial_transpose_on_product(rng):
    a = random_hermitian(rng, 2)
    b = random_hermitian(rng, 2)
    m = matrixcore.kron(a, b)
    got = matrixcore.partial_transpose(m, (2, 2), factor=1)
    assert np.abs(got - matrixcore.kron(a, b.T)).max() < 1e-14


def test_polar_unitary_projects(rng):
    u0 = matrixcore.expm_hermitian(random_hermitian(rng, 4), theta=1.0)
    dirty = u0 + 1e-6 * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    u = matrixcore.polar_unitary(dirty)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() < 1e-12
    assert np.abs(u - u0).max() < 1e-5


def test_time_ordered_constant_generator_matches_expm(rng):
    h = random_hermitian(rng, 3)
    t = 1.3
    u = matrixcore.time_ordered_propagator(lambda s: h, t, steps=400)
    want = matrixcore.expm_hermitian(h, theta=t)
    assert np.abs(u - want).max() < 1e-10


def test_time_ordered_interaction_picture_identity(rng):
    # For B(s) = e^{iHs} B e^{-iHs} the ordered product is
    # e^{+iHt} e^{-i(H+B)t}, which pins the integrator against a closed form
    # with a genuinely time-dependent, non-commuting generator.
    h = random_hermitian(rng, 3)
    b = random_hermitian(rng, 3)
    t = 0.9

    def b_of_s(s):
        u = matrixcore.expm_hermitian(h, theta=-s)
        return u @ b @ u.conj().T

    got = matrixcore.time_ordered_propagator(b_of_s, t, steps=2000)
    want = matrixcore.expm_hermitian(h, theta=-t) @ matrixcore.expm_hermitian(h + b, theta=t)
    assert np.abs(got - want).max() < 1e-10


def test_time_ordered_fourth_order_convergence(rng):
    h = random_hermitian(rng, 2)
    b = random_hermitian(rng, 2)
    t = 1.1

    def b_of_s(s):
        u = matrixcore.expm_hermitian(h, theta=-s)
        return u @ b @ u.conj().T

    want = matrixcore.expm_hermitian(h, theta=-t) @ matrixcore.expm_hermitian(h + b, theta=t)
    errs = [np.abs(matrixcore.time_ordered_propagator(b_of_s, t, steps=n) - want).max()
            for n in (8, 16, 32)]
    # Successive halvings of the step should shrink the error ~16x.
    assert errs[0] / errs[1] > 12.0
    assert errs[1] / errs[2] > 12.0


def test_time_ordered_rejects_bad_inputs(rng):
    h = random_hermitian(rng, 2)
    skew = h + 0.1j * np.eye(2)
    with pytest.raises(NonHermitianGeneratorError):
        matrixcore.time_ordered_propagator(lambda s: skew, 0.5, steps=10)
    with pytest.raises(ValueError):
        matrixcore.time_ordered_propagator(lambda s: h, 0.5, steps=0)
    with pytest.raises(ValueError):
        matrixcore.time_ordered_propagator(lambda s: h, -0.5, steps=10)


def test_frobenius_and_herm_defect():
    m = np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex)
    assert abs(matrixcore.frobenius(m) - np.sqrt(10.0)) < 1e-15
    assert matrixcore.herm_defect(m) < 1e-15
    assert matrixcore.herm_defect(m + 1j * np.diag([1.0, 0.0])) > 0.5


def test_reconstruction_failure_raises(monkeypatch, rng):
    # A kernel returning garbage vectors must be caught by the residual
    # check rather than silently accepted.
    h = random_hermitian(rng, 3)
    w = np.linalg.eigvalsh(h)

    def broken(a, vectors=True, max_sweeps=60):
        return w.copy(), np.eye(3, dtype=complex)

    monkeypatch.setattr(matrixcore._kernels, "jacobi_eigh", broken)
    with pytest.raises(NoConvergenceError):
        matrixcore.eig_hermitian(h)
