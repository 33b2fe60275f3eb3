import math

import numpy as np
import pytest

from viscowave.errors import NoThreshold, RootClassificationFailure
from viscowave.model import validate_params
from viscowave.spectrum import (
    asymptotic_roots,
    characteristic_poly,
    control_time_threshold,
    cubic_coefficients,
    exact_roots,
    root_table,
    spectral_limits,
)

# 50-digit reference roots for the canonical parameters, data-independent
FROZEN_ROOTS = {
    1: (0.9900530265497917622549 + 0.09899031505335874878059j, -0.2020193698932825024388),
    2: (1.99500634397044043039 + 0.09974937974615814530893j, -0.2005012405076837093821),
    7: (6.998571574522555236158 + 0.09997958767435597541387j, -0.2000408246512880491723),
}


def test_frozen_roots(params):
    for n, (omega_ref, rho_ref) in FROZEN_ROOTS.items():
        r = exact_roots(params, float(n * n), n=n)
        assert abs(r.omega - omega_ref) < 1e-13 * abs(omega_ref)
        assert abs(r.rho - rho_ref) < 1e-13 * abs(rho_ref)


def test_zero_is_always_a_root(params):
    # constant term lam*(r1 r2 - b1 r2 - b2 r1) vanishes under the unit-mass
    # condition; evaluating the factored form leaves at most a few ulp
    scale = params.r1 * params.r2 + params.b1 * params.r2 + params.b2 * params.r1
    for lam in (1.0, 49.0, 1e4):
        assert abs(characteristic_poly(params, lam, 0.0)) <= 1e-12 * lam * scale


def test_quartic_relative_residuals(params):
    for r in root_table(params, 100):
        assert r.residual <= 1e-12


def test_cubic_vieta(params):
    # deflated cubic s^3 + (r1+r2) s^2 + (r1 r2 + lam) s + lam alpha
    lam = 25.0
    coeffs = cubic_coefficients(params, lam)
    np.testing.assert_allclose(
        coeffs,
        [1.0, params.r1 + params.r2, params.r1 * params.r2 + lam, lam * params.alpha],
        rtol=1e-15,
    )
    r = exact_roots(params, lam)
    s_plus = 1j * r.omega
    s_minus = np.conj(s_plus)
    assert s_plus + s_minus + r.rho == pytest.approx(-(params.r1 + params.r2), abs=1e-12)
    assert (s_plus * s_minus * r.rho).real == pytest.approx(-lam * params.alpha, rel=1e-12)


def test_classification_sign_conventions(params):
    r = exact_roots(params, 16.0)
    assert r.omega.real > 0 and r.omega.imag > 0
    assert r.rho < 0
    # the conjugate pair and rho solve the quartic
    for s in (1j * r.omega, np.conj(1j * r.omega), r.rho):
        lam = 16.0
        scale = sum(
            abs(c) * abs(s) ** k
            for k, c in enumerate(
                [
                    0.0,
                    lam * params.alpha,
                    params.r1 * params.r2 + lam,
                    params.r1 + params.r2,
                    1.0,
                ]
            )
        )
        assert abs(characteristic_poly(params, lam, s)) <= 1e-12 * scale


def test_overdamped_modes_are_rejected(params):
    # tiny lam: all three deflated roots are real, no oscillatory pair
    with pytest.raises(RootClassificationFailure):
        exact_roots(params, 1e-6)


def test_root_table_matches_scalar_path(params):
    table = root_table(params, 12)
    assert [r.n for r in table] == list(range(1, 13))
    for r in table:
        single = exact_roots(params, r.lam, n=r.n)
        assert abs(r.omega - single.omega) < 1e-14 * abs(single.omega)
        assert abs(r.rho - single.rho) < 1e-14 * abs(single.rho)


def test_asymptotic_roots_leading_terms(params):
    omega_t, rho_t = asymptotic_roots(params, 400.0)
    assert omega_t == pytest.approx(20.0 + 0.1j)
    assert rho_t == pytest.approx(-0.2)


def test_asymptotic_error_decays(params):
    errs = []
    for n in (5, 50, 200):
        r = exact_roots(params, float(n * n))
        omega_t, rho_t = asymptotic_roots(params, r.lam)
        errs.append(abs(r.omega - omega_t) + abs(r.rho - rho_t))
    assert errs[0] > errs[1] > errs[2]


def test_spectral_limits(params, roots50, limits50):
    # successive Re omega gaps approach gamma from above
    re = np.array([r.omega.real for r in roots50])
    gaps = np.diff(re)
    assert limits50.min_gap == pytest.approx(float(np.min(gaps)))
    assert limits50.gap > params.gamma
    assert limits50.alpha_omega == pytest.approx((params.b1 + params.b2) / 2.0, abs=1e-4)
    assert limits50.nmax == 50


def test_n0_excludes_low_modes(params, limits50):
    # Re omega_1 = 0.99005 sits below gap*sqrt(1-eps) = 0.99498 for eps = 0.01
    assert limits50.n0_table[0.01] == 2


def test_control_time_threshold_value(params, limits50, t0):
    expected = 2.0 * math.pi / math.sqrt(limits50.gap**2 - 16.0 * limits50.alpha_omega**2)
    assert t0 == pytest.approx(expected, rel=1e-14)
    assert t0 == pytest.approx(6.8555, abs=1e-3)


def test_no_threshold_when_damping_dominates():
    # b1 + b2 = 0.6 gives 16 alpha_omega^2 = 1.44 > gap^2 ~ 1
    p = validate_params(1.0, 0.48, 0.12, 0.5, 3.0)
    with pytest.raises(NoThreshold):
        control_time_threshold(p, spectral_limits(p, 30))


def test_gamma_scales_the_spectrum():
    p = validate_params(2.0, 0.05, 0.15, 0.1, 0.3)
    r = exact_roots(p, p.gamma**2 * 9.0, n=3)
    assert r.omega.real == pytest.approx(6.0, abs=0.01)
