"""Shared numerical helpers for the test suite.

The exact-spectrum checks need two reusable tools: continuity-tracked
extraction of the node's eigenvalue pair along a parameter scan, and a
coincidence detector that bisects a signed Re/Im difference to decide
whether two eigenvalue sheets cross or avoid along a transverse cut.
"""

import numpy as np

from campbell.oracle import nearest_pair


def pair_at(node, model, delta, nu, kappa, omega, ref=None):
    """Node eigenvalue pair, ordered for continuity with a reference pair."""
    lam = nearest_pair(node, model.with_scales(delta=delta, kappa=kappa, nu=nu), omega)
    if ref is not None:
        a, b = lam
        if abs(a - ref[0]) + abs(b - ref[1]) > abs(a - ref[1]) + abs(b - ref[0]):
            lam = (b, a)
    return lam


def _diff(pair, part):
    if part == "im":
        return pair[0].imag - pair[1].imag
    return pair[0].real - pair[1].real


def min_abs_diff(node, model, delta, nu, kappa, om_lo, om_hi, part, n=41):
    """Minimum |Re or Im difference| of the node pair across a speed scan.

    A sign change of the tracked difference is refined by bisection, so a
    true crossing reports a machine-level minimum; an avoided crossing
    reports the actual gap on the scan grid.
    """
    oms = np.linspace(om_lo, om_hi, n)
    vals, prev = [], None
    for om in oms:
        prev = pair_at(node, model, delta, nu, kappa, float(om), prev)
        vals.append(_diff(prev, part))
    vals = np.array(vals)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        return float(np.min(np.abs(vals)))
    i = int(idx[0])
    lo, hi = float(oms[i]), float(oms[i + 1])
    p_lo = pair_at(node, model, delta, nu, kappa, lo)
    f_lo = _diff(p_lo, part)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        p_mid = pair_at(node, model, delta, nu, kappa, mid, p_lo)
        f_mid = _diff(p_mid, part)
        if f_mid == 0.0:
            return 0.0
        if np.sign(f_mid) == np.sign(f_lo):
            lo, p_lo, f_lo = mid, p_mid, f_mid
        else:
            hi = mid
    p = pair_at(node, model, delta, nu, kappa, 0.5 * (lo + hi), p_lo)
    return abs(_diff(p, part))


def refine_min(f, x0, y0, half, levels=7, pts=17, shrink=0.3):
    """Minimize f over a square by recursive grid refinement (deterministic).

    Returns (min value, x, y).
    """
    best = (f(x0, y0), x0, y0)
    cx, cy, h = x0, y0, half
    for _ in range(levels):
        for x in np.linspace(cx - h, cx + h, pts):
            for y in np.linspace(cy - h, cy + h, pts):
                v = f(float(x), float(y))
                if v < best[0]:
                    best = (v, float(x), float(y))
        _, cx, cy = best
        h *= shrink
    return best


def log_slope(h_values, errors):
    """Least-squares slope of log(error) against log(h)."""
    return float(np.polyfit(np.log(h_values), np.log(errors), 1)[0])
