import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from balanced_coupling.transmission_lines import (
    LineParams,
    coupler_response,
    kappa_chi,
    propagate,
    vi_generator,
    wave_basis,
    wave_generator,
)

OMEGA = 2 * math.pi * 5e9


def matched(L_g=2.5e-7, C_g=1e-10, Z=50.0, v=1e8):
    return LineParams.from_impedances(Z, Z, v, v, L_g, C_g)


def test_constructors():
    p = LineParams.from_impedances(50.0, 70.0, 1e8, 1.5e8)
    assert (p.Z_a, p.Z_b) == pytest.approx((50.0, 70.0))
    assert (p.v_a, p.v_b) == pytest.approx((1e8, 1.5e8))
    q = LineParams.from_ground_capacitances(1e-7, 1e-7, 3e-11, 4e-11, 0.0, 1e-11)
    assert (q.C_a, q.C_b) == pytest.approx((4e-11, 5e-11))
    assert math.isinf(p.Z_g)


@pytest.mark.parametrize("kw", [dict(L_a=0.0), dict(C_b=-1.0), dict(L_g=-1e-9)])
def test_invalid_parameters(kw):
    base = dict(L_a=1e-7, L_b=1e-7, C_a=1e-10, C_b=1e-10)
    base.update(kw)
    with pytest.raises(ValueError):
        LineParams(**base)


def test_example_kappa_chi():
    kc = kappa_chi(matched(), OMEGA)
    assert kc.kappa == 0.0
    assert kc.chi == pytest.approx(2 * math.pi * 25.0, rel=1e-14)
    assert kc.beta_a == kc.beta_b == pytest.approx(OMEGA / 1e8)


def test_no_coupling_no_rates():
    kc = kappa_chi(matched(0.0, 0.0), OMEGA)
    assert kc.kappa == 0.0 and kc.chi == 0.0


def test_geometric_mean_impedance_nulls_kappa():
    p = LineParams.from_impedances(40.0, 90.0, 1e8, 1.2e8, L_g=3e-8 * 60.0, C_g=3e-8 / 60.0)
    assert p.Z_g == pytest.approx(math.sqrt(p.Z_a * p.Z_b))
    assert abs(kappa_chi(p, OMEGA).kappa) < 1e-12 * abs(kappa_chi(p, OMEGA).chi)


def test_uncoupled_generator_blocks():
    d = vi_generator(matched(0.0, 0.0), OMEGA)
    assert not np.any(d[:2, 2:]) and not np.any(d[2:, :2])
    k = wave_generator(matched(0.0, 0.0), OMEGA)
    beta = OMEGA / 1e8
    np.testing.assert_allclose(k, np.diag([beta, -beta, -beta, beta]))


def test_symmetric_lines_swap_symmetry():
    d = vi_generator(matched(), OMEGA)
    swap = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    np.testing.assert_allclose(swap @ d @ swap, d)


def test_kappa_zero_decouples_directions():
    k = wave_generator(matched(), OMEGA)
    assert not np.any(k[:2, 2:]) and not np.any(k[2:, :2])


def test_zero_length_identity():
    x = np.array([1.0, 0.5j, -0.2, 0.1])
    np.testing.assert_allclose(propagate(x, matched(), OMEGA, 0.0), x)
    with pytest.raises(ValueError):
        propagate(x, matched(), OMEGA, -1.0)


def test_invariant_subspace_without_kappa():
    out = propagate([1, 0, 0, 0], matched(), OMEGA, 0.37)
    assert abs(out[3]) < 1e-12 and abs(out[2]) < 1e-12


def _ode_oracle(p, omega, length, x0):
    k = wave_generator(p, omega)
    sol = solve_ivp(lambda x, y: 1j * (k @ y), (0, length), np.asarray(x0, complex), method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[:, -1]


@pytest.mark.parametrize("length", [0.0025, 0.01, 0.0173])
def test_propagation_matches_ode(length):
    p = LineParams.from_impedances(50.0, 50.0, 1e8, 1e8, 3e-7, 0.9e-10)
    x0 = [1.0, 0.0, 0.2j, 0.0]
    np.testing.assert_allclose(propagate(x0, p, OMEGA, length), _ode_oracle(p, OMEGA, length, x0), atol=1e-9)


def test_forward_wave_coupling_closed_form():
    # b+ moves backward, so in forward propagation it stays at chi^2 sin^2(qx)/q^2, q^2 = beta^2 - chi^2.
    p = matched()
    kc = kappa_chi(p, OMEGA)
    q = math.sqrt(kc.beta_a**2 - kc.chi**2)
    for x in (0.001, 0.004, 0.01):
        out = propagate([1, 0, 0, 0], p, OMEGA, x)
        assert abs(out[1]) ** 2 == pytest.approx(kc.chi**2 * math.sin(q * x) ** 2 / q**2, rel=1e-9)
        ref = _ode_oracle(p, OMEGA, x, [1, 0, 0, 0])
        assert abs(out[1]) ** 2 == pytest.approx(abs(ref[1]) ** 2, rel=1e-7)


def test_coupler_closed_form():
    p = matched()
    kc = kappa_chi(p, OMEGA)
    beta, chi = kc.beta_a, kc.chi
    q = math.sqrt(beta**2 - chi**2)
    for L in (0.003, 0.01, 0.021):
        s, c = math.sin(q * L), math.cos(q * L)
        den = c - 1j * beta * s / q
        coupled = -(1j * chi * s / q) / den
        through = c + 1j * beta * s / q - 1j * chi * s / q * coupled
        r = coupler_response(p, OMEGA, L)
        assert r.coupled == pytest.approx(coupled, rel=1e-10)
        assert r.through == pytest.approx(through, rel=1e-10)
        assert abs(r.isolated) < 1e-12 and abs(r.reflected) < 1e-12
        assert r.isolation_dB < -240


def test_uncoupled_coupler_transmits_phase():
    r = coupler_response(matched(0.0, 0.0), OMEGA, 0.0123)
    assert abs(r.through) == pytest.approx(1.0, rel=1e-14)
    assert r.through == pytest.approx(np.exp(1j * OMEGA / 1e8 * 0.0123), rel=1e-12)


def test_isolation_grows_with_impedance_mismatch():
    taus = [1.0, 1.02, 1.05, 1.1, 1.3]  # Z_g / sqrt(Z_a Z_b)
    iso = []
    for tau in taus:
        L_g, C_g = 2.5e-7 * tau, 1e-10 / tau
        iso.append(abs(coupler_response(matched(L_g, C_g), OMEGA, 0.004).isolated))
    assert iso[0] < 1e-12
    assert np.all(np.diff(iso) > 0)


pos = st.floats(0.5, 2.0)


@given(za=st.floats(20, 100), zb=st.floats(20, 100), va=st.floats(0.5e8, 3e8), vb=st.floats(0.5e8, 3e8), lg=st.floats(0, 1), cg=st.floats(0, 1), f=st.floats(1e9, 1e10))
def test_power_conserved(za, zb, va, vb, lg, cg, f):
    p = LineParams.from_impedances(za, zb, va, vb, lg * 0.3 * za / va, cg * 0.3 / (zb * vb))
    r = coupler_response(p, 2 * math.pi * f, 0.01)
    total = abs(r.through) ** 2 + abs(r.coupled) ** 2 + abs(r.isolated) ** 2 + abs(r.reflected) ** 2
    assert total == pytest.approx(1.0, abs=1e-9)


def test_conjugation_identity_random_lines():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        za, zb = rng.uniform(10, 150, 2)
        va, vb = rng.uniform(0.5e8, 3e8, 2)
        p = LineParams.from_impedances(za, zb, va, vb, rng.uniform(0, 0.5) * za / va, rng.uniform(0, 0.5) / (zb * vb))
        w = 2 * math.pi * rng.uniform(1e8, 2e10)
        b = wave_basis(p)
        lhs = b @ vi_generator(p, w)
        rhs = 1j * wave_generator(p, w) @ b
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))))
    assert worst < 1e-12
