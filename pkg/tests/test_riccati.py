import numpy as np
import pytest

from riccati4.grid import GridFunction
from riccati4.riccati import (
    build_system,
    eval_F,
    lift_residual_equivalence,
    residual_profile,
)
from riccati4.spectra import characteristic_data


def exp_sum(coefs, rates):
    """Smooth test function sum(c * exp(-a t)) with analytic derivatives."""
    coefs = np.asarray(coefs, dtype=float)
    rates = np.asarray(rates, dtype=float)

    def derivs(t):
        t = np.asarray(t, dtype=float)
        basis = np.exp(-np.outer(t, rates) if t.ndim else -rates * t)
        out = []
        for order in range(4):
            weights = coefs * (-rates) ** order
            out.append(basis @ weights if t.ndim else float(np.dot(basis, weights)))
        return tuple(out)

    return derivs


def test_build_system_zero_perturbation(cd_test, r_zero):
    sys2 = build_system(cd_test, r_zero, 2)
    assert sys2.b == pytest.approx((4.0, 1.0, -6.0))
    ts = np.linspace(0.0, 5.0, 11)
    assert np.all(sys2.omega(ts) == 0.0)
    assert sys2.lambda1(1.0) == (0.0, 0.0, 0.0)
    assert sys2.lambda2(1.0) == (0.0, 0.0, 0.0)


def test_constant_vector_pairings(cd_test, r_zero):
    sys1 = build_system(cd_test, r_zero, 1)
    # pairing order (x2^2, x1 x2, x1 x3, x1^2, x1^2 x2, x1^3, x1^4)
    assert sys1.C[1] == pytest.approx(-24.0)  # -(12*2 + 3*0)
    assert sys1.C == pytest.approx([-3.0, -24.0, -4.0, -19.0, -6.0, -8.0, -1.0])


def test_omega_single_perturbation(cd_test, r_eps):
    sys1 = build_system(cd_test, r_eps, 1)
    ts = np.linspace(0.0, 4.0, 9)
    assert np.allclose(sys1.omega(ts), -0.001 * np.exp(-ts), rtol=1e-15)
    assert np.allclose(sys1.p_value(ts), 0.001 * np.exp(-ts), rtol=1e-15)


def test_F_vanishes_at_origin(cd_test, r_eps):
    for i in (1, 2, 3, 4):
        sys = build_system(cd_test, r_eps, i)
        for t in (0.0, 1.3, 8.0):
            assert eval_F(sys, t, 0.0, 0.0, 0.0) == 0.0


def test_F_pure_state_cubic(cd_test, r_zero):
    sys1 = build_system(cd_test, r_zero, 1)
    x1 = 0.1
    value = eval_F(sys1, 0.7, x1, 0.0, 0.0)
    assert value == pytest.approx(-(19.0 * 0.01 + 8.0 * 0.001 + 0.0001))
    assert value == pytest.approx(-0.1981)


def test_zero_residual_for_trivial_problem(cd_test, r_zero, nodes_1024):
    sys1 = build_system(cd_test, r_zero, 1)
    z = GridFunction.zero(nodes_1024)
    assert np.max(np.abs(residual_profile(sys1, z))) == 0.0


def test_lift_equivalence_trivial(cd_test, r_zero):
    sys1 = build_system(cd_test, r_zero, 1)
    zero = lambda t: (0.0 * np.asarray(t), 0.0 * np.asarray(t),
                      0.0 * np.asarray(t), 0.0 * np.asarray(t))
    r4, r3y = lift_residual_equivalence(sys1, zero, 2.0, t0=0.0)
    assert r4 == 0.0 and r3y == 0.0


def test_lift_equivalence_exponential(cd_test, r_zero):
    sys1 = build_system(cd_test, r_zero, 1)
    z = exp_sum([0.01], [1.0])
    for t in (0.5, 1.5, 3.0):
        r4, r3y = lift_residual_equivalence(sys1, z, t, t0=0.0)
        assert r4 != 0.0
        assert r4 == pytest.approx(r3y, rel=1e-8)


def test_lift_equivalence_random_tuples(cd_test):
    """The master correctness check across roots and perturbations."""
    rng = np.random.default_rng(11)
    for trial in range(30):
        i = int(rng.integers(1, 5))
        r = [
            f"{rng.uniform(-0.05, 0.05):.6f}*exp(-{rng.uniform(0.3, 2.0):.3f}*t)"
            for _ in range(4)
        ]
        sys = build_system(characteristic_data(cd_test.a), r, i)
        z = exp_sum(rng.uniform(-0.05, 0.05, size=3), rng.uniform(0.2, 2.5, size=3))
        for t in rng.uniform(0.3, 5.0, size=3):
            r4, r3y = lift_residual_equivalence(sys, z, float(t), t0=0.0)
            scale = max(abs(r4), abs(r3y), 1e-30)
            assert abs(r4 - r3y) / scale <= 1e-8
