import math

import numpy as np
import pytest

from riccati4 import exprlang
from riccati4.hypotheses import (
    F_operator_eval,
    alpha_displayed,
    check_h2,
    contraction_constants,
    envelope_report,
    kernel_route_A,
    rho_bound,
    smallness_check,
)


def test_class_transform_top_root(cd_test):
    E = exprlang.parse("exp(-t)")
    # closed form: integral_t^inf e^{(t-s)} e^{-s} ds = e^{-t} / 2
    assert F_operator_eval(cd_test, 1, E, 0.0, 0.0) == pytest.approx(0.5, rel=1e-9)
    assert F_operator_eval(cd_test, 1, E, 2.0, 0.0) == pytest.approx(
        0.5 * math.exp(-2.0), rel=1e-9)


def test_class_transform_second_root(cd_test):
    E = exprlang.parse("exp(-t)")
    # t e^{-t} + e^{-t}/3 at t = 1 -> 4 / (3 e)
    assert F_operator_eval(cd_test, 2, E, 1.0, 0.0) == pytest.approx(
        4.0 / (3.0 * math.e), rel=1e-9)


def test_class_transform_zero(cd_test):
    assert F_operator_eval(cd_test, 3, exprlang.parse("0"), 1.0, 0.0) == 0.0


def test_class_transform_matches_closed_form_randomly(cd_test):
    rng = np.random.default_rng(3)
    lam = cd_test.lam
    for _ in range(50):
        a = float(rng.uniform(0.2, 3.0))
        t = float(rng.uniform(0.0, 4.0))
        E = exprlang.parse(f"exp(-{a}*t)")
        # i=1 tail: rate g = lam2 - lam1 < 0
        g = lam[1] - lam[0]
        expected = math.exp(-a * t) / (a + (-g)) if a + (-g) > 0 else None
        # integral_t^inf e^{-g(t-s)} e^{-a s} ds = e^{-a t} / (a - g)... with g<0
        expected = math.exp(-a * t) / (a - g)
        assert F_operator_eval(cd_test, 1, E, t, 0.0) == pytest.approx(
            expected, rel=1e-8)


def test_rho_bound_examples(cd_test):
    r = ["0.001*exp(-t)", "0", "0", "0"]
    assert rho_bound(cd_test, 1, r, 0.0) == pytest.approx(5e-4, rel=1e-6)
    assert rho_bound(cd_test, 2, ["0"] * 4, 0.0) == 0.0
    # i=4 head transform of e^{-t} is t e^{-t}, sup at t=1
    rho4 = rho_bound(cd_test, 4, ["exp(-t)", "0", "0", "0"], 0.0)
    assert rho4 == pytest.approx(math.exp(-1.0), rel=1e-3)


def test_contraction_constants_worked(cd_test):
    dw, alpha, a_const, varsigma = contraction_constants(cd_test, 1, 0.25)
    assert dw == pytest.approx(-6.0)
    assert alpha == pytest.approx((6.0, 18.0, 60.0))
    assert a_const == pytest.approx(14.0)
    assert varsigma == pytest.approx(44.0)  # 25 + 76 * 0.25


def test_constants_symmetry_and_kernel_agreement(cd_test):
    _, _, a1, _ = contraction_constants(cd_test, 1, 0.25)
    _, _, a4, _ = contraction_constants(cd_test, 4, 0.25)
    assert a1 == pytest.approx(a4, rel=1e-13)
    for i in (1, 2, 3, 4):
        _, alpha, a_i, _ = contraction_constants(cd_test, i, 0.25)
        assert a_i == pytest.approx(kernel_route_A(cd_test, i), abs=1e-12 * a_i)
        displayed = alpha_displayed(cd_test, i)
        if i == 3:
            # printed i=3 pattern disagrees with the kernel constants
            assert not np.allclose(displayed, alpha)
        else:
            assert np.allclose(displayed, alpha, rtol=1e-13)


def test_eta_validation(cd_test):
    with pytest.raises(ValueError):
        contraction_constants(cd_test, 1, 0.7)


def test_smallness_examples():
    ok, phi = smallness_check(5e-4, 14.0, 44.0)
    assert ok
    assert phi == pytest.approx(14.0 / (1.0 - 0.308), rel=1e-12)
    assert phi == pytest.approx(20.2312, rel=1e-4)
    ok0, phi0 = smallness_check(0.0, 14.0, 44.0)
    assert ok0 and phi0 == 14.0
    okb, phib = smallness_check(1.0 / (14.0 * 44.0), 14.0, 44.0)
    assert not okb and phib is None


def test_h2_zero_perturbation(cd_test):
    report = check_h2(cd_test, 1, ["0"] * 4)
    assert report.verdict == "PASS"
    assert all(v == 0.0 for _, v in report.samples)
    assert report.fitted_rate is None


def test_h2_exponential_passes_with_unit_rate(cd_test):
    report = check_h2(cd_test, 1, ["exp(-t)", "0", "0", "0"])
    assert report.verdict == "PASS"
    assert report.fitted_rate == pytest.approx(-1.0, abs=0.02)


def test_h2_constant_fails(cd_test):
    report = check_h2(cd_test, 1, ["1", "0", "0", "0"],
                      sample_ts=np.linspace(0.0, 12.0, 8))
    assert report.verdict == "FAIL"


def test_envelope_report_epsilon(cd_test, r_eps):
    env = envelope_report(cd_test, 1, r_eps, 0.25)
    assert env.smallness_ok
    assert env.Phi == pytest.approx(20.2312, rel=1e-4)
    assert env.rho == pytest.approx(5e-4, rel=1e-6)
    assert env.h2.verdict == "PASS"
    assert env.A == pytest.approx(env.A_kernel, abs=1e-12 * env.A)
