"""Shape-preserving piecewise cubic Hermite interpolation (PCHIP).

Node slopes follow the Fritsch-Carlson construction: a weighted harmonic
mean of adjacent secant slopes at interior nodes (zero across local
extrema), and a limited one-sided three-point formula at the ends. The
interpolant reproduces node values exactly, preserves monotonicity of
monotone data, and has a continuous first derivative.
"""

import numpy as np

from .errors import OutOfSpan, UnsortedNodes


def _edge_slope(h0, h1, m0, m1):
    # one-sided three-point estimate, limited to preserve shape
    d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1)
    if np.sign(d) != np.sign(m0):
        return 0.0
    if np.sign(m0) != np.sign(m1) and abs(d) > 3.0 * abs(m0):
        return 3.0 * m0
    return d


def _slopes(x, y):
    h = np.diff(x)
    m = np.diff(y) / h
    n = x.size
    d = np.zeros(n)
    if n == 2:
        d[:] = m[0]
        return d
    # interior: weighted harmonic mean where secants share a sign
    for k in range(1, n - 1):
        mk0, mk1 = float(m[k - 1]), float(m[k])
        if mk0 == 0.0 or mk1 == 0.0 or (mk0 > 0) != (mk1 > 0):
            d[k] = 0.0
        else:
            w1 = 2.0 * h[k] + h[k - 1]
            w2 = h[k] + 2.0 * h[k - 1]
            # a denormal secant overflows its reciprocal to inf, which
            # correctly drives the harmonic-mean slope to zero
            with np.errstate(over="ignore"):
                den = w1 / mk0 + w2 / mk1
            # den underflows only when both secants are astronomically steep
            d[k] = (w1 + w2) / den if den != 0.0 else np.copysign(np.inf, mk0)
    d[0] = _edge_slope(h[0], h[1], m[0], m[1])
    d[-1] = _edge_slope(h[-1], h[-2], m[-1], m[-2])
    return d


class Pchip:
    """Monotone piecewise-cubic interpolant through strictly increasing x."""

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 2 or y.shape != x.shape:
            raise UnsortedNodes(
                f"need two 1-D arrays of equal length >= 2, got {x.shape}/{y.shape}")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise UnsortedNodes("non-finite node data")
        if not np.all(np.diff(x) > 0.0):
            raise UnsortedNodes("node abscissae must strictly increase")
        self.x = x
        self.y = y
        self.d = _slopes(x, y)

    @property
    def span(self):
        return float(self.x[0]), float(self.x[-1])

    def __call__(self, q, clamp=False):
        q = np.asarray(q, dtype=float)
        scalar = q.ndim == 0
        q = np.atleast_1d(q)
        if clamp:
            q = np.clip(q, self.x[0], self.x[-1])
        elif np.any(q < self.x[0]) or np.any(q > self.x[-1]):
            bad = q[(q < self.x[0]) | (q > self.x[-1])][0]
            raise OutOfSpan(
                f"query {bad!r} outside node span [{self.x[0]!r}, {self.x[-1]!r}]")
        idx = np.clip(np.searchsorted(self.x, q, side="right") - 1,
                      0, self.x.size - 2)
        h = self.x[idx + 1] - self.x[idx]
        t = (q - self.x[idx]) / h
        t2 = t * t
        t3 = t2 * t
        # cubic Hermite basis
        v = (self.y[idx] * (2.0 * t3 - 3.0 * t2 + 1.0)
             + h * self.d[idx] * (t3 - 2.0 * t2 + t)
             + self.y[idx + 1] * (-2.0 * t3 + 3.0 * t2)
             + h * self.d[idx + 1] * (t3 - t2))
        return float(v[0]) if scalar else v

    def derivative(self, q):
        """First derivative of the interpolant (for smoothness checks)."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        idx = np.clip(np.searchsorted(self.x, q, side="right") - 1,
                      0, self.x.size - 2)
        h = self.x[idx + 1] - self.x[idx]
        t = (q - self.x[idx]) / h
        dv = (self.y[idx] * (6.0 * t * t - 6.0 * t) / h
              + self.d[idx] * (3.0 * t * t - 4.0 * t + 1.0)
              + self.y[idx + 1] * (6.0 * t - 6.0 * t * t) / h
              + self.d[idx + 1] * (3.0 * t * t - 2.0 * t))
        return dv
