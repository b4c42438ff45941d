"""Integral-operator fixed point engine.

The operator T maps z to the kernel integral of Omega + F(., z, z', z'')
over [t0, t_max] (plus an analytic tail beyond the grid where the iterate is
negligible and the forcing reduces to Omega).  Because every kernel branch
is a short sum of exponentials, each output channel is assembled from
prefix/suffix recurrences whose factors stay bounded by exp(rate * panel
width); no large exponent is ever formed.

Orientation: ``resolve_orientation`` builds T for a zero-nonlinearity probe
under both kernel orientations and measures the residual of the third-order
operator against the forcing.  The orientation that inverts the operator
(residual at quadrature level) is adopted; the other one is retained for the
envelope certificates, which are statements about its iterates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import Diverged, MaxIterExceeded, NoLimit
from .grid import GridFunction
from .quadrature import (
    PanelGrid,
    exponential_tail_seed,
    graded_nodes,
    head_transform,
    make_panels,
    tail_transform,
)
from .riccati import RiccatiSystem, eval_F

FP_TOL = 1e-10
QUAD_TOL = 1e-12
MAX_ITER = 50
DEFAULT_NODES = 2048
TRUNCATION = 1e-12


def default_t_max(cd, t0, truncation=TRUNCATION):
    """Horizon where exp(-min_gap * (t_max - t0)) < truncation."""
    return t0 + math.log(1.0 / truncation) / cd.min_gap


def default_grid(cd, t0, n_nodes=DEFAULT_NODES, t_max=None):
    if t_max is None:
        t_max = default_t_max(cd, t0)
    return graded_nodes(t0, t_max, n_nodes)


class IntegralOperator:
    """T for one Riccati system on a fixed panel grid."""

    def __init__(self, sys: RiccatiSystem, nodes, orientation="direct",
                 quad_tol=QUAD_TOL):
        self.sys = sys
        self.orientation = orientation
        self.quad_tol = quad_tol
        self.panels: PanelGrid = make_panels(nodes)
        self.modes = sys.kernel.modes(orientation)
        self._omega_gl = np.asarray(sys.omega(self.panels.gl_x), dtype=float)
        self._omega_nodes = np.asarray(sys.omega(self.panels.nodes), dtype=float)
        self._zero_forcing = not np.any(self._omega_gl)
        self._seeds = {}
        for m in self.modes.tail:
            if self._zero_forcing:
                self._seeds[m.rate] = 0.0
            else:
                self._seeds[m.rate] = exponential_tail_seed(
                    sys.omega, float(self.panels.nodes[-1]), m.rate, quad_tol,
                    first_width=float(self.panels.widths[-1]),
                )

    # -- forcing samples -----------------------------------------------------

    def _forcing(self, z: GridFunction | None):
        if z is None:
            return self._omega_gl, self._omega_nodes
        x = self.panels.gl_x
        z0, z1, z2 = z.channels_at(x)
        f_gl = self._omega_gl + eval_F(self.sys, x, z0, z1, z2)
        f_nodes = self._omega_nodes + eval_F(
            self.sys, self.panels.nodes, z.value, z.d1, z.d2
        )
        return f_gl, f_nodes

    def _assemble(self, f_gl, f_nodes) -> GridFunction:
        n = self.panels.nodes.size
        ch = np.zeros((4, n))
        for m in self.modes.head:
            h = head_transform(self.panels, f_gl, m.rate)
            for d in range(4):
                ch[d] += m.coef * m.rate**d * h
        for m in self.modes.tail:
            k = tail_transform(self.panels, f_gl, m.rate, self._seeds.get(m.rate, 0.0))
            for d in range(4):
                ch[d] += m.coef * m.rate**d * k
        ch[3] += self.modes.jump * f_nodes
        return GridFunction(self.panels.nodes, ch[0], ch[1], ch[2], ch[3])

    def apply(self, z: GridFunction | None) -> GridFunction:
        """T z (z = None means the zero function)."""
        return self._assemble(*self._forcing(z))

    def apply_forcing(self, forcing) -> GridFunction:
        """Kernel integral of an arbitrary forcing callable (probe use).

        The tail seed beyond the grid is recomputed for the probe."""
        f_gl = np.asarray(forcing(self.panels.gl_x), dtype=float)
        f_nodes = np.asarray(forcing(self.panels.nodes), dtype=float)
        saved = self._seeds
        try:
            self._seeds = {
                m.rate: exponential_tail_seed(
                    forcing, float(self.panels.nodes[-1]), m.rate, self.quad_tol,
                    first_width=float(self.panels.widths[-1]),
                )
                for m in self.modes.tail
            }
            return self._assemble(f_gl, f_nodes)
        finally:
            self._seeds = saved


def apply_T(sys: RiccatiSystem, z: GridFunction, orientation="direct",
            quad_tol=QUAD_TOL) -> GridFunction:
    """One application of T on z's own grid."""
    return IntegralOperator(sys, z.nodes, orientation, quad_tol).apply(z)


# --- orientation ground-truth test -------------------------------------------

def resolve_orientation(sys: RiccatiSystem, t0=0.0, n_nodes=1536,
                        residual_tol=1e-8):
    """Adopt the kernel orientation under which T inverts the operator.

    A zero-nonlinearity problem (pure linear cubic with a smooth non-resonant
    exponential forcing) is solved with both orientations; the residual of
    z''' + b2 z'' + b1 z' + b0 z against the forcing decides.
    """
    gmax = max(abs(g) for g in sys.kernel.gamma)
    sigma = 1.37 * gmax + 0.7071
    probe = lambda s: np.exp(-sigma * (np.asarray(s, dtype=float) - t0))
    t_max = t0 + math.log(1e10) / min(abs(g) for g in sys.kernel.gamma)
    nodes = graded_nodes(t0, t_max, n_nodes)
    b2, b1, b0 = sys.b
    residuals = {}
    for orientation in ("direct", "adjoint"):
        op = IntegralOperator(sys, nodes, orientation, quad_tol=1e-13)
        z = op.apply_forcing(probe)
        z3 = CubicSpline(nodes, z.d2)(nodes, 1)
        res = z3 + b2 * z.d2 + b1 * z.d1 + b0 * z.value - probe(nodes)
        residuals[orientation] = float(np.max(np.abs(res)))
    passing = [o for o, r in residuals.items() if r <= residual_tol]
    if not passing:
        raise Diverged(
            f"no kernel orientation inverts the operator (residuals {residuals!r})"
        )
    selected = min(passing, key=residuals.get)
    return {"selected": selected, "residuals": residuals, "probe_rate": sigma}


# --- fixed-point iteration ------------------------------------------------------

@dataclass
class IterationTrace:
    norms: list = field(default_factory=list)      # ||omega_n||_0
    deltas: list = field(default_factory=list)     # ||omega_{n+1} - omega_n||_0
    contraction: list = field(default_factory=list)
    converged: bool = False
    n_iter: int = 0
    certificate: float = float("nan")              # ||T z* - z*||_0
    orientation: str = ""


def iterate_to_fixed_point(sys: RiccatiSystem, nodes, fp_tol=FP_TOL,
                           max_iter=MAX_ITER, eta=0.25, orientation=None,
                           quad_tol=QUAD_TOL, snapshot=None):
    """Plain Picard iteration from omega_0 = 0.

    Returns (z, trace).  Raises Diverged when the iterate leaves the eta
    ball by a factor 10 or deltas grow three steps in a row; MaxIterExceeded
    at the cap.  snapshot, when given, is called with (iteration, GridFunction)
    after every step.
    """
    if orientation is None:
        orientation = resolve_orientation(sys, t0=float(np.asarray(nodes)[0]))["selected"]
    op = IntegralOperator(sys, nodes, orientation, quad_tol)
    trace = IterationTrace(orientation=orientation)

    z = GridFunction.zero(op.panels.nodes)
    previous = z
    for n in range(1, max_iter + 1):
        z_new = op.apply(None if n == 1 else previous)
        delta = z_new.diff_norm(previous)
        norm = z_new.norm_c02()
        trace.norms.append(norm)
        trace.deltas.append(delta)
        if len(trace.deltas) >= 2 and trace.deltas[-2] > 0:
            trace.contraction.append(delta / trace.deltas[-2])
        if norm > 10.0 * eta:
            raise Diverged(
                f"iterate norm {norm:.3e} left the eta ball (eta={eta}) at step {n}"
            )
        if len(trace.deltas) >= 4 and all(
            trace.deltas[-k] > trace.deltas[-k - 1] for k in (1, 2, 3)
        ):
            raise Diverged(f"deltas grew for 3 consecutive steps at step {n}")
        previous = z_new
        if snapshot is not None:
            snapshot(n, z_new)
        if delta <= fp_tol:
            trace.converged = True
            trace.n_iter = n
            trace.certificate = op.apply(z_new).diff_norm(z_new)
            return z_new, trace
    raise MaxIterExceeded(f"no convergence in {max_iter} iterations")


def phi_sequence(a_const, rho, varsigma, n):
    """Phi_1 = A, Phi_k = A (1 + Phi_{k-1} rho varsigma); returns
    (sequence, limit A / (1 - rho A varsigma)).  NoLimit when the geometric
    ratio rho A varsigma reaches 1."""
    ratio = rho * a_const * varsigma
    seq = []
    phi = a_const
    for _ in range(n):
        seq.append(phi)
        phi = a_const * (1.0 + phi * rho * varsigma)
    if ratio >= 1.0:
        raise NoLimit(f"rho * A * varsigma = {ratio:.6g} >= 1")
    return seq, a_const / (1.0 - ratio)


# --- pointwise decay envelope -----------------------------------------------

def beta_interval(sys: RiccatiSystem):
    """Admissible beta interval per root index: [gap, 0) for i = 1..3
    (with the index-specific neighbouring gap), (0, gap] for i = 4."""
    g = sys.kernel.gamma
    if sys.i == 1:
        return (g[0], 0.0)
    if sys.i == 2:
        return (g[1], 0.0)
    if sys.i == 3:
        return (g[2], 0.0)
    return (0.0, g[2])


def envelope_integral(sys: RiccatiSystem, nodes, beta, quad_tol=QUAD_TOL,
                      variant="displayed"):
    """E_i(t) on the nodes: the case-specific integral of
    exp(-beta (t-s)) |p(lam_i, s)|.

    i = 1 integrates the tail, i = 4 the head.  For i = 2, 3 the displayed
    variant integrates over the whole half line (which makes E grow like
    exp(|beta| t): a valid but weak envelope); the split variant uses the
    neighbouring gap on the head side instead.
    """
    panels = make_panels(nodes)
    p_abs = lambda s: np.abs(sys.omega(s))
    p_gl = np.abs(np.asarray(sys.omega(panels.gl_x), dtype=float))
    if not np.any(p_gl):
        return np.zeros(panels.nodes.size)
    t0 = float(panels.nodes[0])
    t_max = float(panels.nodes[-1])
    first_width = float(panels.widths[-1])

    def tail_part(rate):
        seed = exponential_tail_seed(p_abs, t_max, rate, quad_tol,
                                     first_width=first_width)
        return tail_transform(panels, p_gl, rate, seed)

    if sys.i == 1:
        return tail_part(-beta)
    if sys.i == 4:
        return head_transform(panels, p_gl, -beta)
    if variant == "split":
        head_gap = sys.kernel.gamma[0] if sys.i == 2 else sys.kernel.gamma[1]
        return head_transform(panels, p_gl, -head_gap) + tail_part(-beta)
    # displayed: integral over [t0, inf) factorizes as C * exp(-beta (t - t0))
    weights = np.exp(beta * (panels.gl_x - t0))
    constant = float(np.sum(panels.gl_w * weights * p_gl))
    constant += math.exp(beta * (t_max - t0)) * exponential_tail_seed(
        p_abs, t_max, -beta, quad_tol, first_width=first_width
    )
    return constant * np.exp(-beta * (panels.nodes - t0))


def envelope_check(sys: RiccatiSystem, z: GridFunction, beta, phi,
                   quad_tol=QUAD_TOL, variant="displayed"):
    """Verify sum_j |z^(j)(t)| <= phi * E_i(t) on the grid.

    Returns (verdict, max_ratio, envelope_values)."""
    lo, hi = beta_interval(sys)
    if sys.i == 4:
        if not (lo < beta <= hi):
            raise ValueError(f"beta={beta} outside ({lo}, {hi}] for i=4")
    else:
        if not (lo <= beta < hi):
            raise ValueError(f"beta={beta} outside [{lo}, {hi}) for i={sys.i}")
    envelope = envelope_integral(sys, z.nodes, beta, quad_tol, variant)
    numerator = np.abs(z.value) + np.abs(z.d1) + np.abs(z.d2)
    den = phi * envelope
    tiny = 1e-300
    ratio = np.where(den > tiny, numerator / np.maximum(den, tiny),
                     np.where(numerator <= 1e-14, 0.0, np.inf))
    max_ratio = float(np.max(ratio))
    return max_ratio <= 1.0 + 1e-9, max_ratio, envelope


def first_iterate_ratio(sys: RiccatiSystem, nodes, a_const, beta,
                        orientation="adjoint", quad_tol=QUAD_TOL):
    """sup_t |T0(t)| / (A * E_i(t)): the first-step envelope sharpness."""
    op = IntegralOperator(sys, nodes, orientation, quad_tol)
    t0_iterate = op.apply(None)
    envelope = envelope_integral(sys, nodes, beta, quad_tol)
    mask = a_const * envelope > 1e-300
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(t0_iterate.value[mask]) / (a_const * envelope[mask])))
