import math

import numpy as np
import pytest

from stecverify.errors import ChainStepFailed, IntegratorToleranceExceeded, SupportTooLarge
from stecverify.trace_method import (
    BumpSeed,
    Grid,
    beltrami_field,
    control_field,
    divergence,
    gl3_step_matrix,
    integrate_oscillator,
    scalar_trace_identity,
    trace_bound_chain,
    virial_residual,
)
import stecverify.trace_method as tm
from stecverify.wall_mechanics import Verdict, WallMesh, equilibrium_shell, shell_mesh

SEED = BumpSeed(1.0, 0.5)
L = 0.75


def grid(h):
    return Grid.from_spacing(L, h)


def profile_integral(a):
    # int (1 - u^2/a^2)^3 du over [-a, a]
    return 32 * a / 35


def test_grid_spacing():
    g = grid(1 / 16)
    assert g.n == 25
    assert g.h == pytest.approx(1 / 16)
    with pytest.raises(ValueError):
        Grid.from_spacing(1.0, 0.3)


def test_profile_derivatives_match_finite_differences():
    for kind in ("poly", "gaussian"):
        seed = BumpSeed(1.0, 0.5, kind)
        u = np.linspace(-0.45, 0.45, 41)
        e = 1e-5
        b, b1, b2 = seed.profile(u)
        bp, _, _ = seed.profile(u + e)
        bm, _, _ = seed.profile(u - e)
        np.testing.assert_allclose(b1, (bp - bm) / (2 * e), atol=1e-8)
        np.testing.assert_allclose(b2, (bp - 2 * b + bm) / e**2, atol=1e-4)


def test_zero_seed():
    f = beltrami_field(BumpSeed(0.0, 0.5), grid(1 / 16))
    assert not np.any(f.values)
    assert virial_residual(f) == (0.0, 0.0, 0.0)


def test_symmetric_exactly():
    f = beltrami_field(SEED, grid(1 / 16))
    assert np.array_equal(f.values, f.values.swapaxes(-1, -2))


def test_compact_support():
    g = grid(1 / 16)
    f = beltrami_field(SEED, g)
    x = g.axis
    outside = (np.abs(x)[:, None, None] >= 0.5) | (np.abs(x)[None, :, None] >= 0.5) | (np.abs(x)[None, None, :] >= 0.5)
    assert not np.any(f.values[outside])


def test_support_too_large():
    with pytest.raises(SupportTooLarge):
        beltrami_field(BumpSeed(1.0, 0.6), grid(1 / 16))


def test_divergence_l1_converges():
    norms = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        d = divergence(beltrami_field(SEED, grid(h)))
        norms.append(np.abs(d).sum() * h**3)
    # first-order kinks sit on the support faces; the bulk is second order
    assert norms[0] > norms[1] > norms[2]
    assert np.log2(norms[1] / norms[2]) > 1.5


def test_divergence_interior_second_order():
    seed = BumpSeed(1.0, 0.5, "gaussian")
    errs = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        g = grid(h)
        d = divergence(beltrami_field(seed, g))
        x = g.axis[1:-1]
        inner = (np.abs(x) < 0.25)
        errs.append(np.abs(d[np.ix_(inner, inner, inner)]).max())
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    np.testing.assert_allclose(ratios, 4.0, rtol=0.3)


def test_virial_order_two():
    res = [virial_residual(beltrami_field(SEED, grid(h)))[2] for h in (1 / 16, 1 / 32, 1 / 64)]
    ratios = np.array(res[:-1]) / np.array(res[1:])
    np.testing.assert_allclose(ratios, 4.0, rtol=0.3)


def test_virial_euler_maclaurin_constant():
    # volume term -> -48 / a^3 * (32 a / 35)^2 * h^2 from the end corrections of sum h b''
    a = SEED.support_radius
    c = -48 / a**3 * profile_integral(a) ** 2
    h = 1 / 64
    _, volume, _ = virial_residual(beltrami_field(SEED, grid(h)))
    assert volume / h**2 == pytest.approx(c, rel=2e-3)


def test_surface_term_zero():
    s, _, _ = virial_residual(beltrami_field(SEED, grid(1 / 32)))
    assert s == 0.0


def test_control_converges_to_nonzero():
    ref = 3 * profile_integral(0.5) ** 3
    res = [virial_residual(control_field(SEED, grid(h)))[2] for h in (1 / 16, 1 / 32, 1 / 64)]
    assert res[-1] == pytest.approx(ref, rel=1e-4)
    finest = virial_residual(beltrami_field(SEED, grid(1 / 64)))[2]
    assert res[-1] > 10 * finest


def shell(ratio, E_v=-0.1):
    sh = equilibrium_shell(E_v, 1.0, 0.01)
    return shell_mesh(sh.with_density(ratio * sh.P), 32, 64)


def test_chain_passes_for_ordinary_wall():
    r = trace_bound_chain(-0.1, None, shell(3))
    assert r.verdict is Verdict.POSITIVE_TOTAL
    assert abs(r.details["field_trace_integral"] + r.trace_integral) < 1e-6 * 0.1
    assert r.total > 0


def test_chain_zero_field_dust_wall():
    n = 20
    stress = np.zeros((n, 4, 4))
    stress[:, 0, 0] = 1.0
    mesh = WallMesh(np.zeros((n, 3)), np.full(n, 0.01), stress)
    r = trace_bound_chain(0.0, 0.0, mesh)
    assert r.verdict is Verdict.INCONCLUSIVE
    assert r.E_v == 0.0 and r.trace_integral == 0.0


def test_chain_stiff_wall_fails_stec_step():
    with pytest.raises(ChainStepFailed) as exc:
        trace_bound_chain(-0.1, None, shell(1))
    assert exc.value.step == "stec"
    assert exc.value.report.total == pytest.approx(-0.05, rel=1e-10)


def test_chain_exchange_step():
    with pytest.raises(ChainStepFailed) as exc:
        trace_bound_chain(-0.1, -0.2, shell(3))
    assert exc.value.step == "exchange"


def test_chain_trace_sign_step():
    # field trace integral above E_v breaks T <= 0; wall balanced to that value
    sh = equilibrium_shell(-0.05, 1.0, 0.01)
    mesh = shell_mesh(sh.with_density(3 * sh.P), 16, 32)
    with pytest.raises(ChainStepFailed) as exc:
        trace_bound_chain(-0.1, -0.05, mesh)
    assert exc.value.step == "trace_sign"


def test_chain_saturated_is_inconclusive():
    r = trace_bound_chain(-0.1, None, shell(2))
    assert r.verdict is Verdict.INCONCLUSIVE


def test_chain_rejects_nonfinite():
    with pytest.raises(ValueError):
        trace_bound_chain(float("nan"), None, shell(3))


def test_gl3_map_is_symplectic():
    M = gl3_step_matrix(2.0, 0.05)
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-14)


def test_gl3_matches_exact_rotation():
    m, h = 1.5, 0.01
    M = gl3_step_matrix(m, h)
    exact = np.array([[math.cos(m * h), math.sin(m * h) / m], [-m * math.sin(m * h), math.cos(m * h)]])
    np.testing.assert_allclose(M, exact, atol=1e-14)


def test_trace_identity_closed_form():
    mean_trace, mass_term, disc = scalar_trace_identity(2.0, 1.0, 10)
    assert mean_trace == pytest.approx(-2.0, abs=1e-8)
    assert mass_term == pytest.approx(-2.0, abs=1e-8)
    assert disc < 1e-8


def test_trace_identity_zero_amplitude():
    assert scalar_trace_identity(1.0, 0.0) == (0.0, 0.0, 0.0)


def test_trace_identity_convergence_order():
    d = [scalar_trace_identity(2.0, 1.0, 10, s)[2] for s in (16, 32, 64)]
    orders = np.log2(np.array(d[:-1]) / np.array(d[1:]))
    # sixth-order scheme; ratios approach 64 from below
    np.testing.assert_allclose(orders, 6.0, atol=0.3)


def test_energy_conserved():
    st = integrate_oscillator(5.0, 10.0, 3, 512)
    e = st.energy()
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-10


def test_drift_guard(monkeypatch):
    monkeypatch.setattr(tm, "ENERGY_DRIFT_TOL", 1e-20)
    with pytest.raises(IntegratorToleranceExceeded):
        scalar_trace_identity(2.0, 1.0, 2, 8)


@pytest.mark.parametrize("bad", [dict(m=0.0, A=1.0), dict(m=1.0, A=1.0, periods=0)])
def test_oscillator_preconditions(bad):
    with pytest.raises(ValueError):
        scalar_trace_identity(**bad)
