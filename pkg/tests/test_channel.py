import numpy as np
import pytest

from conftest import random_density, stream
from randomizer import (
    DimensionMismatch,
    InvalidDimension,
    RandomUnitaryChannel,
    RngStream,
    apply_adjoint,
    apply_channel,
    build_random_channel,
    build_weyl_channel,
    deviation,
    maximally_mixed,
    operator_norm,
    pair_statistic,
    pure_output,
    pure_projector,
    random_pure_state,
    sample_haar_unitaries,
)
from randomizer.linalg import hermitian_eigensystem


def naive_apply(unitaries, rho):
    """Independent oracle: direct sum of conjugations, plain matrix products."""
    total = np.zeros_like(rho)
    for u in unitaries:
        total = total + u @ rho @ np.conj(u.T)
    return total / len(unitaries)


def basis_state(d, k=0):
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


def test_build_reproducible():
    a = build_random_channel(2, 3, RngStream(5))
    b = build_random_channel(2, 3, RngStream(5))
    assert np.array_equal(a.unitaries, b.unitaries)
    assert a.provenance["seed"] == 5


def test_build_dim_one():
    ch = build_random_channel(1, 5, RngStream(6))
    assert ch.count == 5
    assert np.allclose(np.abs(ch.unitaries), 1.0, atol=1e-12)


def test_build_contract_and_errors():
    ch = build_random_channel(4, 16, RngStream(7))
    from randomizer import unitarity_defect
    assert unitarity_defect(ch.unitaries) <= 1e-10
    with pytest.raises(InvalidDimension):
        build_random_channel(0, 3, RngStream(0))
    with pytest.raises(InvalidDimension):
        build_random_channel(3, 0, RngStream(0))


def test_weyl_dim_one_and_two():
    w1 = build_weyl_channel(1)
    assert w1.count == 1
    assert np.allclose(w1.unitaries[0], [[1.0]])

    w2 = build_weyl_channel(2)
    eye = np.eye(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    expected = [eye, z, x, x @ z]
    assert w2.count == 4
    for got, want in zip(w2.unitaries, expected):
        assert np.allclose(got, want, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_weyl_randomizes_exactly(d):
    w = build_weyl_channel(d)
    out = naive_apply(w.unitaries, pure_projector(basis_state(d)))
    assert np.max(np.abs(out - np.eye(d) / d)) <= 1e-12
    out2 = apply_channel(w, random_density(d, stream(50, d)))
    assert np.max(np.abs(out2 - np.eye(d) / d)) <= 1e-12


def test_apply_identity_channel():
    ch = RandomUnitaryChannel(np.eye(3, dtype=complex)[None, :, :])
    rho = random_density(3, stream(51))
    assert np.max(np.abs(apply_channel(ch, rho) - rho)) <= 1e-14
    assert np.max(np.abs(apply_adjoint(ch, rho) - rho)) <= 1e-14


def test_apply_matches_naive_oracle():
    ch = build_random_channel(4, 7, RngStream(52))
    rho = random_density(4, stream(53))
    assert np.max(np.abs(apply_channel(ch, rho) - naive_apply(ch.unitaries, rho))) <= 1e-13


def test_apply_preserves_trace_and_positivity():
    gen = stream(54)
    for trial in range(1000):
        d = 2 + trial % 7  # dimensions 2..8
        ch = build_random_channel(d, 3, gen.child(trial, 0))
        rho = random_density(d, gen.child(trial, 1), rank=1 + trial % d)
        out = apply_channel(ch, rho)
        assert abs(np.trace(out).real - 1.0) <= 1e-11
        assert np.linalg.eigvalsh(out)[0] >= -1e-10


def test_adjoint_duality():
    ch = build_random_channel(3, 5, RngStream(55))
    for trial in range(20):
        rho = random_density(3, stream(56, trial))
        sigma = random_density(3, stream(57, trial))
        lhs = np.trace(apply_channel(ch, rho) @ sigma).real
        rhs = np.trace(rho @ apply_adjoint(ch, sigma)).real
        assert abs(lhs - rhs) <= 1e-11


def test_pair_statistic_trivia():
    ch = RandomUnitaryChannel(np.eye(2, dtype=complex)[None, :, :])
    e0, e1 = basis_state(2, 0), basis_state(2, 1)
    assert pair_statistic(ch, e0, e0) == pytest.approx(1.0, abs=1e-15)
    assert pair_statistic(ch, e0, e1) == pytest.approx(0.0, abs=1e-15)


def test_pair_statistic_weyl_is_flat():
    w = build_weyl_channel(2)
    for trial in range(10):
        phi = random_pure_state(2, stream(58, trial))
        psi = random_pure_state(2, stream(59, trial))
        assert abs(pair_statistic(w, phi, psi) - 0.5) <= 1e-12


def test_pair_statistic_equals_trace_path():
    ch = build_random_channel(4, 6, RngStream(60))
    for trial in range(50):
        phi = random_pure_state(4, stream(61, trial))
        psi = random_pure_state(4, stream(62, trial))
        via_trace = np.trace(apply_channel(ch, pure_projector(phi)) @ pure_projector(psi)).real
        assert abs(pair_statistic(ch, phi, psi) - via_trace) <= 1e-11


def test_pure_output_matches_apply():
    ch = build_random_channel(5, 4, RngStream(63))
    phi = random_pure_state(5, stream(64))
    assert np.max(np.abs(pure_output(ch, phi) - apply_channel(ch, pure_projector(phi)))) <= 1e-13


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_deviation_vanishes(d):
    w = build_weyl_channel(d)
    for trial in range(10):
        assert deviation(w, random_pure_state(d, stream(65, d, trial))) <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 6])
def test_single_unitary_deviation(d):
    # R(phi) stays pure, so the spectrum of R(phi) - I/d is {1 - 1/d, -1/d, ...}
    ch = build_random_channel(d, 1, RngStream(66 + d))
    phi = random_pure_state(d, stream(67, d))
    assert abs(deviation(ch, phi) - (1.0 - 1.0 / d)) <= 1e-12


def test_deviation_dim_one():
    ch = build_random_channel(1, 3, RngStream(68))
    assert deviation(ch, np.array([1.0 + 0j])) <= 1e-15


def test_variational_identity():
    # sup over psi of |statistic - 1/d| is the extreme eigenvalue magnitude
    ch = build_random_channel(3, 8, RngStream(69))
    phi = random_pure_state(3, stream(70))
    dev = deviation(ch, phi)
    es = hermitian_eigensystem(pure_output(ch, phi) - maximally_mixed(3))
    idx = int(np.argmax(np.abs(es.eigenvalues)))
    psi_star = es.eigenvectors[:, idx]
    assert abs(abs(pair_statistic(ch, phi, psi_star) - 1.0 / 3.0) - dev) <= 1e-9
    for trial in range(100):
        psi = random_pure_state(3, stream(71, trial))
        assert abs(pair_statistic(ch, phi, psi) - 1.0 / 3.0) <= dev + 1e-9


def test_convexity_restriction():
    # channel deviation on mixed states never beats the worst eigenvector
    ch = build_random_channel(3, 5, RngStream(72))
    eye = maximally_mixed(3)
    for trial in range(200):
        rho = random_density(3, stream(73, trial))
        mixed_dev = operator_norm(apply_channel(ch, rho) - eye)
        es = hermitian_eigensystem(rho)
        pure_best = max(deviation(ch, es.eigenvectors[:, k]) for k in range(3))
        assert mixed_dev <= pure_best + 1e-9


def test_haar_one_design():
    # E over single-unitary channels of the statistic is 1/d
    d, m = 4, 10_000
    us = sample_haar_unitaries(d, m, RngStream(74))
    phi = random_pure_state(d, stream(75))
    psi = random_pure_state(d, stream(76))
    amps = np.einsum("nij,j,i->n", us, phi, np.conj(psi), optimize=True)
    values = np.abs(amps) ** 2
    sigma = float(np.std(values))
    assert abs(float(np.mean(values)) - 1.0 / d) <= 3.0 * sigma / np.sqrt(m)
    # spot-check the batch against the per-channel statistic path
    for k in range(25):
        ch = RandomUnitaryChannel(us[k:k + 1])
        assert abs(pair_statistic(ch, phi, psi) - values[k]) <= 1e-13


def test_dimension_mismatch():
    ch = build_random_channel(3, 2, RngStream(77))
    with pytest.raises(DimensionMismatch):
        apply_channel(ch, np.eye(2, dtype=complex) / 2)
    with pytest.raises(DimensionMismatch):
        pair_statistic(ch, basis_state(3), basis_state(2))
    with pytest.raises(DimensionMismatch):
        deviation(ch, basis_state(4))
