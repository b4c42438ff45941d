"""Sampled functions on [t0, t_max] with value and derivative channels.

A GridFunction stores z, z', z'' at the panel boundary nodes plus an
auxiliary third-derivative channel used only to interpolate z'' between
nodes.  Interpolation is cubic Hermite per channel, pairing each channel
with the next one as its slope, so the three channels stay mutually
consistent to interpolation accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NonFinite


def hermite_eval(nodes, values, slopes, x):
    """Vectorized cubic Hermite evaluation at points x inside [nodes[0], nodes[-1]]."""
    x = np.asarray(x, dtype=float)
    idx = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
    h = nodes[idx + 1] - nodes[idx]
    u = (x - nodes[idx]) / h
    u2 = u * u
    u3 = u2 * u
    h00 = 2.0 * u3 - 3.0 * u2 + 1.0
    h10 = u3 - 2.0 * u2 + u
    h01 = -2.0 * u3 + 3.0 * u2
    h11 = u3 - u2
    return (h00 * values[idx] + h10 * h * slopes[idx]
            + h01 * values[idx + 1] + h11 * h * slopes[idx + 1])


@dataclass(frozen=True)
class GridFunction:
    nodes: np.ndarray
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray  # slope channel for d2 interpolation / fourth-order ratios

    def __post_init__(self):
        for ch in (self.value, self.d1, self.d2, self.d3):
            if ch.shape != self.nodes.shape:
                raise ValueError("channel shape mismatch")
            if not np.all(np.isfinite(ch)):
                raise NonFinite("grid function has non-finite samples")

    @classmethod
    def zero(cls, nodes):
        nodes = np.asarray(nodes, dtype=float)
        z = np.zeros_like(nodes)
        return cls(nodes=nodes, value=z, d1=z.copy(), d2=z.copy(), d3=z.copy())

    @classmethod
    def from_channels(cls, nodes, value, d1, d2, d3=None):
        nodes = np.asarray(nodes, dtype=float)
        value = np.asarray(value, dtype=float)
        d1 = np.asarray(d1, dtype=float)
        d2 = np.asarray(d2, dtype=float)
        if d3 is None:
            # fallback slope channel from a spline through d2
            d3 = CubicSpline(nodes, d2)(nodes, 1)
        return cls(nodes=nodes, value=value, d1=d1, d2=d2, d3=np.asarray(d3, dtype=float))

    @property
    def t0(self):
        return float(self.nodes[0])

    @property
    def t_max(self):
        return float(self.nodes[-1])

    def channels_at(self, x):
        """(z, z', z'') at arbitrary points inside the grid."""
        z = hermite_eval(self.nodes, self.value, self.d1, x)
        z1 = hermite_eval(self.nodes, self.d1, self.d2, x)
        z2 = hermite_eval(self.nodes, self.d2, self.d3, x)
        return z, z1, z2

    def norm_c02(self):
        """sup over nodes of |z| + |z'| + |z''|."""
        return float(np.max(np.abs(self.value) + np.abs(self.d1) + np.abs(self.d2)))

    def diff_norm(self, other):
        return float(np.max(
            np.abs(self.value - other.value)
            + np.abs(self.d1 - other.d1)
            + np.abs(self.d2 - other.d2)
        ))
