import math

import numpy as np
import pytest

from conftest import random_rotation
from stecverify.errors import DegenerateInput, InvalidObserver, NonRestFrame, SuperluminalBoost
from stecverify.tensor_core import (
    METRIC,
    Observer4Velocity,
    StressEnergyTensor,
    boost,
    boost_matrix,
    observer_contraction,
    rest_frame_decompose,
    sorted_eigh3,
)


def test_symmetrized_on_construction():
    c = np.arange(16.0).reshape(4, 4)
    T = StressEnergyTensor(c)
    assert np.array_equal(T.components, T.components.T)
    assert np.array_equal(T.components, 0.5 * (c + c.T))


def test_symmetrization_idempotent(rng):
    a = rng.normal(size=(4, 4))
    s = 0.5 * (a + a.T)
    assert np.array_equal(StressEnergyTensor(s).components, s)


def test_components_read_only():
    T = StressEnergyTensor.perfect_fluid(1.0, 0.1)
    with pytest.raises(ValueError):
        T.components[0, 0] = 2.0


@pytest.mark.parametrize("bad", [np.eye(3), np.full((4, 4), np.nan), np.diag([1, np.inf, 0, 0])])
def test_degenerate_input(bad):
    with pytest.raises(DegenerateInput):
        StressEnergyTensor(bad)


def test_trace_and_spatial_trace():
    T = StressEnergyTensor.diagonal(2.0, 0.1, 0.2, 0.3)
    assert T.trace == pytest.approx(-2.0 + 0.6)
    assert T.spatial_trace == pytest.approx(0.6)


def test_decompose_diagonal():
    d = rest_frame_decompose(StressEnergyTensor.diagonal(1, 0.2, 0.2, 0.2))
    assert d.rho == 1.0
    np.testing.assert_allclose(d.pressures, [0.2, 0.2, 0.2], rtol=1e-15)


def test_decompose_radiation_form():
    d = rest_frame_decompose(StressEnergyTensor.diagonal(3, 1, 1, 1))
    np.testing.assert_allclose(d.pressures, [1, 1, 1], rtol=1e-15)


def test_decompose_offdiagonal_block():
    # hand-solved 2x2 eigenproblem: eigenvalues +-1 with axes (1, +-1, 0)/sqrt2
    c = np.zeros((4, 4))
    c[0, 0] = 2.0
    c[1, 2] = c[2, 1] = 1.0
    d = rest_frame_decompose(StressEnergyTensor(c))
    assert d.rho == 2.0
    np.testing.assert_allclose(d.pressures, [1.0, 0.0, -1.0], atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(d.axes[:, 0], [s, s, 0], atol=1e-14)
    np.testing.assert_allclose(d.axes[:, 1], [0, 0, 1], atol=1e-14)
    np.testing.assert_allclose(d.axes[:, 2], [s, -s, 0], atol=1e-14)


def test_axes_right_handed_orthonormal(rng):
    for _ in range(200):
        a = rng.normal(size=(3, 3))
        c = np.zeros((4, 4))
        c[0, 0] = 1.0
        c[1:, 1:] = a + a.T
        d = rest_frame_decompose(StressEnergyTensor(c))
        np.testing.assert_allclose(d.axes.T @ d.axes, np.eye(3), atol=1e-12)
        assert np.linalg.det(d.axes) == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(d.pressures) <= 0)


def test_reconstruction_on_random_tensors(rng):
    a = rng.normal(size=(10_000, 3, 3))
    blocks = a + a.transpose(0, 2, 1)
    w, v = sorted_eigh3(blocks)
    rec = np.einsum("nij,nj,nkj->nik", v, w, v)
    err = np.abs(rec - blocks).max(axis=(1, 2)) / np.abs(blocks).max(axis=(1, 2))
    assert err.max() <= 1e-10


def test_eigenvalues_match_lapack(rng, backend):
    a = rng.normal(size=(500, 3, 3))
    blocks = a + a.transpose(0, 2, 1)
    w, _ = sorted_eigh3(blocks, backend=backend)
    ref = np.linalg.eigvalsh(blocks)[:, ::-1]
    np.testing.assert_allclose(w, ref, atol=1e-13 * np.abs(ref).max())


def test_repeated_eigenvalues_deterministic():
    w, v = sorted_eigh3(np.eye(3)[None] * 2.0)
    np.testing.assert_array_equal(w[0], [2.0, 2.0, 2.0])
    np.testing.assert_allclose(v[0], np.eye(3))


def test_non_rest_frame_rejected():
    c = np.diag([1.0, 0.1, 0.1, 0.1])
    c[0, 1] = c[1, 0] = 1e-6
    with pytest.raises(NonRestFrame):
        rest_frame_decompose(StressEnergyTensor(c))


def test_tiny_flux_tolerated():
    c = np.diag([1.0, 0.1, 0.1, 0.1])
    c[0, 1] = c[1, 0] = 1e-13
    assert rest_frame_decompose(StressEnergyTensor(c)).rho == 1.0


def test_boost_identity(rng):
    T = StressEnergyTensor(rng.normal(size=(4, 4)))
    np.testing.assert_array_equal(boost(T, [0, 0, 0]).components, T.components)


@pytest.mark.parametrize("beta", [0.1, 0.5, 0.9, 0.99])
def test_perfect_fluid_boost(beta):
    rho, p = 2.0, 0.3
    g2 = 1 / (1 - beta**2)
    Tb = boost(StressEnergyTensor.perfect_fluid(rho, p), [beta, 0, 0])
    assert Tb.components[0, 0] == pytest.approx(g2 * (rho + beta**2 * p), rel=1e-13)
    # momentum density (rho + p) gamma^2 beta along the motion, lower index flips sign
    assert abs(Tb.components[0, 1]) == pytest.approx(g2 * (rho + p) * beta, rel=1e-13)


def test_boost_sign_convention():
    # dust moving with +x velocity seen from a frame moving at +beta: dust appears to move in -x
    Tb = boost(StressEnergyTensor.diagonal(1, 0, 0, 0), [0.5, 0, 0])
    # T^{0x} < 0 means flux toward -x; lower both indices: T_{0x} = -T^{0x}
    assert Tb.components[0, 1] > 0


def test_stiff_trace_invariant():
    T = StressEnergyTensor.perfect_fluid(1.0, 1.0)
    for beta in ([0.3, 0, 0], [0.2, 0.5, -0.4], [0, 0, 0.999]):
        assert boost(T, beta).trace == pytest.approx(2.0, rel=1e-10)


def test_boost_roundtrip(rng):
    T = StressEnergyTensor(rng.normal(size=(4, 4)))
    beta = np.array([0.6, -0.5, 0.4])
    beta *= 0.99 / np.linalg.norm(beta)
    back = boost(boost(T, beta), -beta)
    np.testing.assert_allclose(back.components, T.components, atol=1e-10 * np.abs(T.components).max() * 1e3)


def test_boost_matrix_is_lorentz():
    lam = boost_matrix([0.3, -0.2, 0.5])
    np.testing.assert_allclose(lam.T @ METRIC @ lam, METRIC, atol=1e-14)


@pytest.mark.parametrize("beta", [[1.0, 0, 0], [0.6, 0.8, 0], [1 - 1e-10, 0, 0]])
def test_superluminal(beta):
    with pytest.raises(SuperluminalBoost):
        boost(StressEnergyTensor.perfect_fluid(1, 0), beta)


def test_observer_validation():
    Observer4Velocity([1, 0, 0, 0])
    with pytest.raises(InvalidObserver):
        Observer4Velocity([1, 0.1, 0, 0])
    with pytest.raises(InvalidObserver):
        Observer4Velocity([-1, 0, 0, 0])
    u = Observer4Velocity.from_rapidity(4.0, [1, 1, 0])
    assert u.u @ METRIC @ u.u == pytest.approx(-1.0, abs=1e-12 * u.u[0] ** 2)


def test_contraction_dust_at_rest():
    rho_u, f, ff = observer_contraction(StressEnergyTensor.diagonal(1, 0, 0, 0), Observer4Velocity([1, 0, 0, 0]))
    assert rho_u == 1.0
    np.testing.assert_array_equal(f, [1, 0, 0, 0])
    assert ff == -1.0


def test_contraction_moving_observer():
    rho, p, beta = 2.0, 0.3, 0.7
    u = Observer4Velocity.from_velocity([beta, 0, 0])
    rho_u, _, _ = observer_contraction(StressEnergyTensor.perfect_fluid(rho, p), u)
    assert rho_u == pytest.approx((rho + beta**2 * p) / (1 - beta**2), rel=1e-13)


def test_contraction_matches_boosted_energy_density():
    T = StressEnergyTensor.diagonal(1.5, 0.2, -0.1, 0.4)
    beta = np.array([0.3, -0.4, 0.2])
    rho_u, _, _ = observer_contraction(T, Observer4Velocity.from_velocity(beta))
    assert rho_u == pytest.approx(boost(T, beta).components[0, 0], rel=1e-13)


def test_stiff_flux_tends_to_null():
    # f.f = -1 exactly for stiff matter, while rho_u grows as cosh(2 chi): relative f.f -> 0-
    T = StressEnergyTensor.perfect_fluid(1.0, 1.0)
    rel = []
    for chi in (1.0, 3.0, 6.0):
        rho_u, _, ff = observer_contraction(T, Observer4Velocity.from_rapidity(chi, [1, 0, 0]))
        assert ff == pytest.approx(-1.0, rel=1e-9)
        rel.append(ff / rho_u**2)
        assert rel[-1] == pytest.approx(-1.0 / math.cosh(2 * chi) ** 2, rel=1e-9)
    assert rel[0] < rel[1] < rel[2] < 0
