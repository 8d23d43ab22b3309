"""Rotating circular string through a spring/damper/friction eyelet.

Closed-form treatment of the classic continuum example.  The unperturbed
branches are lam_n^eps = i n (1 + eps Omega) for nonzero integers n, crossing
at nodes

    Omega0 = (n - m) / (m dlt - n eps),
    omega0 = n m (dlt - eps) / (m dlt - n eps).

At every nonzero-frequency crossing dlt = -eps, so omega0 = 2nm/(n+m).  The
eyelet's damping d, stiffness k and friction mu unfold each node exactly as
in the finite-dimensional theory, with explicit formulas for the split
eigenvalues, the exceptional points, their branch-cut line and their
complex-plane loci.

The loci of both exceptional points of a crossing share
Re lam_EP = -d/(4 pi); their imaginary parts are
2nm/(n+m) +- (d/4 pi)(n-m)/sqrt(nm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PI = math.pi


@dataclass(frozen=True)
class StringParams:
    """Nondimensional eyelet parameters: damping d, stiffness k, friction mu."""

    d: float = 0.0
    k: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("d", "k", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class StringCrossing:
    """Crossing of branches (n, eps) and (m, dlt) of the string mesh."""

    n: int
    m: int
    eps: int
    delta_sign: int
    Omega0: float
    omega0: float

    @property
    def krein_definite(self) -> bool:
        return self.n * self.m > 0

    @property
    def sig_product(self) -> int:
        return 1 if self.n * self.m > 0 else -1


def string_crossing(n: int, eps: int, m: int, delta_sign: int) -> StringCrossing:
    """Crossing node of the branches i n (1 + eps Omega) and i m (1 + dlt Omega)."""
    if n == 0 or m == 0:
        raise ValueError("branch indices must be nonzero integers")
    if eps not in (1, -1) or delta_sign not in (1, -1):
        raise ValueError("eps and delta_sign must be +1 or -1")
    denom = m * delta_sign - n * eps
    if denom == 0:
        raise ValueError("parallel branches (m*delta == n*eps) do not cross")
    Omega0 = (n - m) / denom
    omega0 = n * m * (delta_sign - eps) / denom
    return StringCrossing(n=n, m=m, eps=eps, delta_sign=delta_sign,
                          Omega0=Omega0, omega0=omega0)


def _c_string(cross: StringCrossing, p: StringParams, d_omega: float) -> complex:
    n, m, eps, dlt = cross.n, cross.m, cross.eps, cross.delta_sign
    w0 = cross.omega0
    d, k, mu = p.d, p.k, p.mu
    im_c = (
        k * (2 * d * w0 - eps * mu * (n - m)) / (16 * PI**2 * n * m)
        - 2 * (eps * (n + m) / 2 * d_omega + (m - n) * k / (8 * PI * n * m))
        * (eps * mu / (4 * PI) - d * (m - n) * w0 / (8 * PI * n * m))
    )
    re_c = (
        ((eps * n - dlt * m) / 2 * d_omega + (m - n) * k / (8 * PI * n * m)) ** 2
        + k**2 / (16 * PI**2 * n * m)
        - (d * (m + n) * w0) ** 2 / (64 * PI**2 * n**2 * m**2)
    )
    return complex(re_c, im_c)


def _base(cross: StringCrossing, p: StringParams, d_omega: float) -> complex:
    n, m, eps = cross.n, cross.m, cross.eps
    w0 = cross.omega0
    re = -p.d * (n + m) * w0 / (8 * PI * n * m)
    im = w0 + eps * (n - m) / 2 * d_omega + (n + m) * p.k / (8 * PI * n * m)
    return complex(re, im)


def string_eigen_approx(cross: StringCrossing, p: StringParams, Omega: float):
    """First-order split eigenvalues (lam_plus, lam_minus) near the crossing.

    Valid for nonzero-frequency crossings (delta_sign = -eps); the zero
    doublets at Omega0 = +-1 are excluded.
    """
    if cross.omega0 == 0:
        raise ValueError("expansion undefined at zero-frequency crossings")
    d_omega = Omega - cross.Omega0
    c = _c_string(cross, p, d_omega)
    root = 1j * np.sqrt(c)
    base = _base(cross, p, d_omega)
    return base + root, base - root


@dataclass(frozen=True)
class StringEP:
    """Exceptional-point pair of a string crossing with its branch-cut line.

    The line holds Im c = 0: coef_dOmega * (Omega - Omega0) + coef_k * k = 0.
    degenerate marks the pure-friction case d = 0 where both EPs merge at
    (Omega0, 0) and the line collapses to Omega = Omega0.
    """

    crossing: StringCrossing
    Omega_ep_plus: float
    Omega_ep_minus: float
    kappa_ep_plus: float
    kappa_ep_minus: float
    lambda_ep_plus: complex
    lambda_ep_minus: complex
    exists: bool
    degenerate: bool
    coef_dOmega: float
    coef_k: float

    def k_at(self, Omega: float) -> float:
        if self.coef_k == 0.0:
            raise ZeroDivisionError("branch-cut line is vertical (Omega = Omega0)")
        return -self.coef_dOmega * (Omega - self.crossing.Omega0) / self.coef_k


def _line_coefficients(cross: StringCrossing, d: float, mu: float):
    n, m, eps = cross.n, cross.m, cross.eps
    w0 = cross.omega0
    a = eps * (n + m) / 2
    b = (m - n) / (8 * PI * n * m)
    e = (2 * d * w0 - eps * mu * (n - m)) / (16 * PI**2 * n * m)
    f = eps * mu / (4 * PI) - d * (m - n) * w0 / (8 * PI * n * m)
    return -2 * a * f, e - 2 * b * f  # coefficients of dOmega and k in Im c


def string_ep(cross: StringCrossing, d: float, mu: float) -> StringEP:
    """EP pair of a crossing under damping d and friction mu.

    Existence requires nm > 0 (definite Krein type); the inner sign pairing
    of the (Omega_EP, kappa_EP) formulas is fixed by requiring c = 0 at each
    returned point, checked numerically on both candidate pairings.
    """
    if d == 0.0 and mu == 0.0:
        raise ValueError("EPs need a nonzero damping or friction coefficient")
    if cross.omega0 == 0:
        raise ValueError("EP formulas undefined at zero-frequency crossings")
    n, m, eps = cross.n, cross.m, cross.eps
    w0 = cross.omega0
    coef_domega, coef_k = _line_coefficients(cross, d, mu)
    radicand = n * m * (mu**2 * n * m + d**2 * w0**2)
    if radicand <= 0:
        nan = math.nan
        return StringEP(cross, nan, nan, nan, nan, complex(nan, nan),
                        complex(nan, nan), False, False, coef_domega, coef_k)
    root = math.sqrt(radicand)
    if d == 0.0:
        # pure friction: both EPs merge at the node, line degenerates
        lam = _base(cross, StringParams(d=0.0, k=0.0, mu=mu), 0.0)
        return StringEP(cross, cross.Omega0, cross.Omega0, 0.0, 0.0, lam, lam,
                        True, True, coef_domega, coef_k)
    om_mag = eps * (m + n) * d**2 * w0**2 / (8 * PI * n * m * root)
    ka_mag = d * w0 * (2 * eps * mu * n * m - d * (m - n) * w0) / (2 * root)
    candidates = [((om_mag, ka_mag), (-om_mag, -ka_mag)),
                  ((om_mag, -ka_mag), (-om_mag, ka_mag))]
    scale = max(abs(_c_string(cross, StringParams(d=d, k=0.0, mu=mu), 0.0)), 1e-300)

    def residual(pairing):
        worst = 0.0
        for d_om, ka in pairing:
            c = _c_string(cross, StringParams(d=d, k=ka, mu=mu), d_om)
            worst = max(worst, abs(c))
        return worst

    pairing = min(candidates, key=residual)
    if residual(pairing) > 1e-9 * scale:
        raise ArithmeticError("no sign pairing zeroes c; EP formulas inconsistent here")
    (d_om_p, ka_p), (d_om_m, ka_m) = pairing
    lam_p = _base(cross, StringParams(d=d, k=ka_p, mu=mu), d_om_p)
    lam_m = _base(cross, StringParams(d=d, k=ka_m, mu=mu), d_om_m)
    return StringEP(cross, cross.Omega0 + d_om_p, cross.Omega0 + d_om_m,
                    ka_p, ka_m, lam_p, lam_m, True, False, coef_domega, coef_k)


def enumerate_crossings(n_max: int, Omega_window=(-1.0, 1.0),
                        definite_only: bool = True):
    """Unique nonzero-frequency crossings with 1 <= n <= m <= n_max.

    Branch labels are restricted to the upper half-mesh (positive n, m);
    the conjugate crossings with both labels negated project onto the same
    exceptional points.  For n < m both orientations eps = +-1 appear, for
    n = m only eps = +1 (the standstill doublet).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lo, hi = Omega_window
    out = []
    for n in range(1, n_max + 1):
        for m in range(n, n_max + 1):
            eps_options = (1,) if n == m else (1, -1)
            for eps in eps_options:
                cross = string_crossing(n, eps, m, -eps)
                if not (lo <= cross.Omega0 <= hi):
                    continue
                if definite_only and not cross.krein_definite:
                    continue
                out.append(cross)
    out.sort(key=lambda c: (c.Omega0, c.omega0, c.n, c.m, -c.eps))
    return out


def butterfly_atlas(d: float, mu: float, n_max: int, Omega_window=(-1.0, 1.0)):
    """EP pairs of all definite crossings in a subcritical speed window.

    Their (Omega_EP, kappa_EP) projections fill the butterfly-shaped region
    around the origin; only n = m crossings put EPs on the kappa = 0 axis.
    """
    lo, hi = Omega_window
    if lo < -1.0 or hi > 1.0:
        raise ValueError("window must lie in the subcritical range (-1, 1)")
    return [string_ep(cross, d, mu)
            for cross in enumerate_crossings(n_max, Omega_window, definite_only=True)]


def string_atlas_rows(eps_list):
    """CSV rows: one row per exceptional point (two per crossing).

    Columns: n, m, eps, delta, Omega0, omega0, Omega_EP, kappa_EP,
    Re_lambda_EP, Im_lambda_EP_plus, Im_lambda_EP_minus.  The three lambda
    columns describe the crossing's EP pair in the complex plane and repeat
    on both rows.
    """
    rows = []
    for ep in eps_list:
        if not ep.exists:
            continue
        c = ep.crossing
        shared = (float(ep.lambda_ep_plus.real),
                  float(ep.lambda_ep_plus.imag), float(ep.lambda_ep_minus.imag))
        for om, ka in ((ep.Omega_ep_plus, ep.kappa_ep_plus),
                       (ep.Omega_ep_minus, ep.kappa_ep_minus)):
            rows.append((c.n, c.m, c.eps, c.delta_sign, c.Omega0, c.omega0,
                         float(om), float(ka), *shared))
    return rows
