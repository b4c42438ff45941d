"""Fundamental system built from the Riccati fixed points.

Each solution is y_i = exp(integral from t0 of (lam_i + z_i)); only its
logarithm is stored so large exponents never overflow.  Derivatives come from
the logarithmic-derivative identities, the Wronskian is evaluated on the
ratio-normalized matrix [y^(l)/y] whose limit is the Vandermonde determinant
of the roots, and the asymptotic integral representation is checked against
the direct product construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, hermite_eval
from .quadrature import cumulative_integral, make_panels
from .riccati import RiccatiSystem, eval_F, log_derivative_ratios


@dataclass(frozen=True)
class FundamentalSolution:
    i: int
    lam: float
    z: GridFunction
    log_y: np.ndarray          # integral of (lam + z) at the nodes
    pi_i: float                # product of (lam_k - lam_i), k != i

    @property
    def nodes(self):
        return self.z.nodes

    def log_y_at(self, ts):
        return hermite_eval(self.nodes, self.log_y, self.lam + self.z.value, ts)

    def y_at(self, ts):
        return np.exp(self.log_y_at(ts))

    def ratios(self, ts=None):
        """(y'/y, y''/y, y'''/y, y''''/y) at the nodes (or at ts)."""
        if ts is None:
            z0, z1, z2, z3 = self.z.value, self.z.d1, self.z.d2, self.z.d3
        else:
            z0, z1, z2 = self.z.channels_at(ts)
            z3 = hermite_eval(self.nodes, self.z.d3, np.gradient(self.z.d3, self.nodes), ts)
        return log_derivative_ratios(self.lam, z0, z1, z2, z3)

    def initial_state(self):
        """(y, y', y'', y''') at t0; y(t0) = 1 by the normalization."""
        r1, r2, r3, _ = self.ratios()
        return np.array([1.0, r1[0], r2[0], r3[0]])


def fundamental_solution(sys: RiccatiSystem, z: GridFunction, cd) -> FundamentalSolution:
    """Assemble y_i from a converged z on its grid."""
    panels = make_panels(z.nodes)
    z_gl, _, _ = z.channels_at(panels.gl_x)
    log_y = cumulative_integral(panels, sys.lam + z_gl)
    pi_i = 1.0
    for k in range(4):
        if k + 1 != sys.i:
            pi_i *= cd.lam[k] - sys.lam
    return FundamentalSolution(i=sys.i, lam=sys.lam, z=z, log_y=log_y, pi_i=pi_i)


def derivative_ratio_limits(fs: FundamentalSolution, ts=None, ratio_tol=1e-4):
    """|y^(l)/y - lam^l| for l = 1..4 at the sample times.

    Returns (errors array shape (4, len(ts)), verdict string): PASS when all
    four errors at the final time are below ratio_tol."""
    if ts is None:
        ts = fs.nodes
    ts = np.asarray(ts, dtype=float)
    idx = np.searchsorted(fs.nodes, ts)
    idx = np.clip(idx, 0, fs.nodes.size - 1)
    z0 = fs.z.value[idx]
    z1 = fs.z.d1[idx]
    z2 = fs.z.d2[idx]
    z3 = fs.z.d3[idx]
    ratios = log_derivative_ratios(fs.lam, z0, z1, z2, z3)
    errors = np.vstack([
        np.abs(np.asarray(ratios[l]) - fs.lam ** (l + 1)) for l in range(4)
    ])
    verdict = "PASS" if np.all(errors[:, -1] <= ratio_tol) else "FAIL"
    return errors, verdict


def wronskian_normalized(fss, t):
    """det of the 4x4 matrix with rows (1, y'/y, y''/y, y'''/y) per solution.

    This is W / (y_1 y_2 y_3 y_4); with z = 0 it is the Vandermonde
    determinant of the roots, and it tends to that value in general."""
    if len(fss) != 4:
        raise ValueError("need all four fundamental solutions")
    cols = []
    for fs in fss:
        idx = int(np.argmin(np.abs(fs.nodes - t)))
        z0, z1, z2, z3 = fs.z.value[idx], fs.z.d1[idx], fs.z.d2[idx], fs.z.d3[idx]
        r1, r2, r3, _ = log_derivative_ratios(fs.lam, z0, z1, z2, z3)
        cols.append([1.0, float(r1), float(r2), float(r3)])
    return float(np.linalg.det(np.array(cols).T))


def vandermonde_target(cd):
    """prod over ordered pairs of (lam_j - lam_i), the Wronskian limit."""
    out = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            out *= cd.lam[j] - cd.lam[i]
    return out


def wronskian_raw(fss, t):
    """Unnormalized Wronskian; carries the exp(sum integral(lam_i + z_i))
    growth factor, reported alongside the normalized determinant."""
    log_scale = sum(float(fs.log_y_at(t)) for fs in fss)
    return wronskian_normalized(fss, t) * math.exp(log_scale)


def asymptotic_integral_formula(fs: FundamentalSolution, sys: RiccatiSystem):
    """Predicted log y from the asymptotic representation
    lam (t - t0) + (1/pi_i) * integral of [p(lam_i, s) + F(s, z, z', z'')].

    Returns (predicted log_y at the nodes, relative gap profile against the
    direct product construction)."""
    panels = make_panels(fs.nodes)
    x = panels.gl_x
    z0, z1, z2 = fs.z.channels_at(x)
    integrand = sys.p_value(x) + eval_F(sys, x, z0, z1, z2)
    correction = cumulative_integral(panels, integrand) / fs.pi_i
    predicted = fs.lam * (fs.nodes - fs.nodes[0]) + correction
    gap = np.abs(np.expm1(predicted - fs.log_y))
    return predicted, gap


def double_integral_identity_residual(a, decay, t, t0=0.0):
    """Self-test of the iterated-integral identity used by the asymptotic
    formula: for H(s) = exp(-decay s) with decay > a > 0,

      int_t0^t exp(-a tau) int_tau^inf exp(a s) H(s) ds dtau
        = -(1/a) [G(t) - G(t0)] - (1/a) int_t0^t H,   G(t) = int_t^inf
          exp(-a (t - s)) H(s) ds.

    Returns the relative mismatch from numerically integrating the left side
    against the closed-form right side.
    """
    from .quadrature import adaptive_interval

    if not (decay > a > 0.0):
        raise ValueError("need decay > a > 0 for the tail to converge")

    def inner(tau):
        tau = np.asarray(tau, dtype=float)
        # int_tau^inf e^{a s} e^{-decay s} ds = e^{(a-decay) tau} / (decay - a)
        return np.exp(-a * tau) * np.exp((a - decay) * tau) / (decay - a)

    lhs = adaptive_interval(inner, t0, t, 1e-14)

    def g_func(x):
        return math.exp(-decay * x) / (decay - a)

    int_h = (math.exp(-decay * t0) - math.exp(-decay * t)) / decay
    rhs = -(g_func(t) - g_func(t0)) / a - int_h / a
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale
