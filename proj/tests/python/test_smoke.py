import math

import numpy as np
import pytest

import warpcrit as wc


def test_profile_and_first_integral():
    p = wc.OdeParams(3, 0.0, 1.0)
    sol = wc.integrate_r(p, 1.0, 4.0)
    assert sol.kappa0 == pytest.approx(2.0, abs=1e-14)
    assert np.max(np.abs(sol.energy_residual)) < 1e-10
    assert sol.theta == pytest.approx(0.904437239733059, abs=1e-10)
    prof = wc.solve_lambda(sol, 0.3)
    assert len(prof) == sol.s.size
    np.testing.assert_allclose(prof.lam, sol.lam0 + 0.3 * sol.rp, atol=1e-14)


def test_verify_and_negative_control():
    prof = wc.solve_lambda(wc.integrate_r(wc.OdeParams(4, -6.0, 2.0), 1.0, 3.0), 0.2)
    rep = wc.verify_critical(prof)
    assert rep["passed"]
    assert rep["max_critical_residual"] < 1e-8
    with pytest.raises(wc.WarpcritError) as err:
        wc.verify_critical(prof, fiber_kappa0=prof.kappa0 + 0.01)
    assert err.value.kind == "fiber_mismatch"


def test_matching_and_examples():
    sol = wc.integrate_r(wc.OdeParams(3, -6.0, 1.0), 1.0, 12.0)
    m = wc.match_boundary(sol, 1.3 * sol.theta)
    assert m["zeta2"] == pytest.approx(m["zeta2_direct"], abs=1e-9)
    assert wc.critical_C0(sol) == pytest.approx(0.27459606388, abs=1e-9)
    ex2 = wc.build_example2(wc.OdeParams(3, 0.0, 1.0), 1.0)
    assert "quotient_record" in ex2


def test_spectral_signs():
    rep = wc.verify_prop36(wc.OdeParams(3, 6.0, 1.0), 0.8, 0.3)
    assert rep["zero_mode"]["sign"] == "ZERO"
    assert rep["matched"]["sign"] == "POSITIVE"


def test_schwarzschild_horizon():
    sf = wc.schwarzschild_form(wc.OdeParams(3, 0.0, 0.5))
    assert sf["horizon_radius"] == pytest.approx(1.0, abs=1e-10)


def test_invalid_input():
    with pytest.raises(wc.WarpcritError):
        wc.OdeParams(2, 0.0, 1.0)
    assert math.isfinite(wc.space_form_profile(3, 1, 0.0, 1.0).lam_at(0.5))
