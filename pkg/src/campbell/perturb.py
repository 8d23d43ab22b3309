"""First-order perturbation of a doublet at a mesh node.

Two independent routes to the split eigenvalues are provided and kept in
exact agreement:

* the reduced 2x2 pencil det(R + (lam - lam0) Q) = 0 assembled from the
  explicit doublet eigenvectors, and
* closed forms built from four 2x2 blocks of D, K, N: coefficients A1, A2,
  B1, B2, a complex coefficient c(dOmega, delta, kappa, nu), and

      Re lam = -(Im A1/(alpha w_s) + Im B1/(beta w_t))/8 +- sqrt((|c|-Re c)/2)
      Im lam = w0 + dOmega (s eps + t sigma)/2
               + kappa (tr K_ss/(alpha w_s) + tr K_tt/(beta w_t))/8
               +- sqrt((|c|+Re c)/2)

  with the +- pairing fixed by lam = base +- i sqrt(c) (principal branch).

Stiffness-only perturbation reduces c to a real quadratic form whose level
set Re c = 0 bounds the instability sector of mixed-signature nodes; this is
exposed as the eigenvalue cone and boundary-line operations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .mesh import Branch, Node, branch_eigenvector
from .model import RotorModel, block


class DegenerateReductionError(ArithmeticError):
    """The 2x2 reduction broke down (non-invertible Q)."""


def sign_matrices(eps: int, sigma: int):
    """I = diag(eps, sigma) and J = [[0, -sigma], [eps, 0]]."""
    i_es = np.array([[eps, 0], [0, sigma]], dtype=float)
    j_es = np.array([[0, -sigma], [eps, 0]], dtype=float)
    return i_es, j_es


def _tr_i(m: np.ndarray, eps: int, sigma: int) -> float:
    return eps * m[0, 0] + sigma * m[1, 1]


def _tr_j(m: np.ndarray, eps: int, sigma: int) -> float:
    return eps * m[0, 1] - sigma * m[1, 0]


@dataclass(frozen=True)
class NodeTraces:
    """Scale-independent block data of a node; everything c depends on."""

    s: int
    t: int
    alpha: int
    beta: int
    eps: int
    sigma: int
    w_s: float
    w_t: float
    omega0: float
    Omega0: float
    tr_D_ss: float
    tr_D_tt: float
    tr_K_ss: float
    tr_K_tt: float
    n12_s: float
    n12_t: float
    tr_D_st_J: float
    tr_D_st_I: float
    tr_K_st_J: float
    tr_K_st_I: float
    tr_N_st_J: float
    tr_N_st_I: float

    def coefficients(self, delta: float, kappa: float, nu: float):
        """A1, A2, B1, B2 at lam0 = i omega0 for the given scales."""
        lam0 = 1j * self.omega0
        a1 = delta * lam0 * self.tr_D_ss + kappa * self.tr_K_ss + 2j * self.eps * nu * self.n12_s
        b1 = delta * lam0 * self.tr_D_tt + kappa * self.tr_K_tt + 2j * self.sigma * nu * self.n12_t
        a2 = self.sigma * nu * self.tr_N_st_I + 1j * (
            delta * lam0 * self.tr_D_st_J + kappa * self.tr_K_st_J)
        b2 = self.sigma * nu * self.tr_N_st_J - 1j * (
            delta * lam0 * self.tr_D_st_I + kappa * self.tr_K_st_I)
        return a1, a2, b1, b2


def node_traces(node: Node, model: RotorModel) -> NodeTraces:
    a, b = node.branch_a, node.branch_b
    s, t = a.s, b.s
    eps, sigma = a.eps, b.eps
    d_ss, d_tt = block(model.D, s, s), block(model.D, t, t)
    d_st = block(model.D, s, t).as_array()
    k_ss, k_tt = block(model.K, s, s), block(model.K, t, t)
    k_st = block(model.K, s, t).as_array()
    n_st = block(model.N, s, t).as_array()
    return NodeTraces(
        s=s, t=t, alpha=a.alpha, beta=b.alpha, eps=eps, sigma=sigma,
        w_s=model.omegas[s - 1], w_t=model.omegas[t - 1],
        omega0=node.omega0, Omega0=node.Omega0,
        tr_D_ss=d_ss.trace, tr_D_tt=d_tt.trace,
        tr_K_ss=k_ss.trace, tr_K_tt=k_tt.trace,
        n12_s=float(model.N[2 * s - 2, 2 * s - 1]),
        n12_t=float(model.N[2 * t - 2, 2 * t - 1]),
        tr_D_st_J=_tr_j(d_st, eps, sigma), tr_D_st_I=_tr_i(d_st, eps, sigma),
        tr_K_st_J=_tr_j(k_st, eps, sigma), tr_K_st_I=_tr_i(k_st, eps, sigma),
        tr_N_st_J=_tr_j(n_st, eps, sigma), tr_N_st_I=_tr_i(n_st, eps, sigma),
    )


@dataclass(frozen=True)
class NodeExpansion:
    """Local expansion data at a node, evaluated at the model's scales."""

    node: Node
    A1: complex
    A2: complex
    B1: complex
    B2: complex
    trK_ss: float
    trK_tt: float
    trK_st_J: float
    trK_st_I: float
    I_eps_sigma: np.ndarray
    J_eps_sigma: np.ndarray
    traces: NodeTraces

    def c(self, dOmega: float, delta: float, kappa: float, nu: float) -> complex:
        return _c_from_traces(self.traces, dOmega, delta, kappa, nu)


def expansion_coefficients(node: Node, model: RotorModel) -> NodeExpansion:
    """A1, A2, B1, B2 and the stored block traces at the model's scales."""
    tr = node_traces(node, model)
    if node.clustered:
        warnings.warn(
            "node is clustered (other branches pass through the same point); "
            "the pairwise 2x2 expansion ignores them",
            stacklevel=2,
        )
    a1, a2, b1, b2 = tr.coefficients(model.delta, model.kappa, model.nu)
    i_es, j_es = sign_matrices(tr.eps, tr.sigma)
    return NodeExpansion(
        node=node, A1=a1, A2=a2, B1=b1, B2=b2,
        trK_ss=tr.tr_K_ss, trK_tt=tr.tr_K_tt,
        trK_st_J=tr.tr_K_st_J, trK_st_I=tr.tr_K_st_I,
        I_eps_sigma=i_es, J_eps_sigma=j_es, traces=tr,
    )


def _c_from_traces(tr: NodeTraces, dOmega: float, delta: float, kappa: float,
                   nu: float) -> complex:
    a1, a2, b1, b2 = tr.coefficients(delta, kappa, nu)
    al, be = tr.alpha, tr.beta
    s, t, eps, sg = tr.s, tr.t, tr.eps, tr.sigma
    ws, wt = tr.w_s, tr.w_t
    im_a1, im_b1 = a1.imag, b1.imag
    re_a2, re_b2 = a2.real, b2.real
    tj, ti = tr.tr_K_st_J, tr.tr_K_st_I

    im_c = (
        (al * wt * im_a1 - be * ws * im_b1) / (8 * ws * wt) * (s * eps - t * sg) * dOmega
        + kappa * (al * ws * tr.tr_K_tt - be * wt * tr.tr_K_ss)
        * (al * ws * im_b1 - be * wt * im_a1) / (32 * ws**2 * wt**2)
        - al * be * kappa * (re_a2 * tj - re_b2 * ti) / (8 * ws * wt)
    )
    re_c = (
        ((t * sg - s * eps) / 2 * dOmega
         + kappa * (be * ws * tr.tr_K_tt - al * wt * tr.tr_K_ss) / (8 * ws * wt)) ** 2
        + al * be * (tj**2 + ti**2) / (16 * ws * wt) * kappa**2
        - ((al * ws * im_b1 - be * wt * im_a1) ** 2
           + 4 * al * be * ws * wt * (re_a2**2 + re_b2**2)) / (64 * ws**2 * wt**2)
    )
    return complex(re_c, im_c)


def c_coefficient(node: Node, model: RotorModel, dOmega: float, delta: float,
                  kappa: float, nu: float) -> complex:
    """The complex coefficient c under the eigenvalue square roots."""
    return _c_from_traces(node_traces(node, model), dOmega, delta, kappa, nu)


def eigen_approx(node: Node, model: RotorModel, Omega: float, delta: float,
                 kappa: float, nu: float):
    """First-order split eigenvalues (lam_plus, lam_minus) near the node.

    lam_+- = base +- i sqrt(c) with the principal square root; this pairing
    reproduces the printed Re/Im formulas with correlated signs and agrees
    with the reduced-pencil roots to rounding.
    """
    tr = node_traces(node, model)
    a1, _, b1, _ = tr.coefficients(delta, kappa, nu)
    d_omega = Omega - node.Omega0
    base = (
        1j * tr.omega0
        + 0.5j * (tr.eps * tr.s + tr.sigma * tr.t) * d_omega
        + 1j * (a1 / (8 * tr.alpha * tr.w_s) + b1 / (8 * tr.beta * tr.w_t))
    )
    c = _c_from_traces(tr, d_omega, delta, kappa, nu)
    root = 1j * np.sqrt(complex(c))
    return base + root, base - root


def reduced_pencil(node: Node, model: RotorModel, Omega: float):
    """2x2 matrices (Q, R) of the local pencil det(R + (lam - lam0) Q) = 0.

    Assembled directly from the doublet eigenvectors: Q contracts the
    lam-derivative of the unperturbed operator, R the Omega-derivative times
    (Omega - Omega0) plus the perturbation delta lam0 D + kappa K + nu N.
    Scales are taken from the model.
    """
    n = model.n
    g = model.gyro()
    lam0 = 1j * node.omega0
    Omega0 = node.Omega0
    vecs = [branch_eigenvector(node.branch_a, n), branch_eigenvector(node.branch_b, n)]
    dl = (model.delta * lam0 * model.D + model.kappa * model.K + model.nu * model.N)
    d_omega_op = 2 * lam0 * g + 2 * Omega0 * (g @ g)
    q = np.empty((2, 2), dtype=complex)
    r = np.empty((2, 2), dtype=complex)
    for i, ua in enumerate(vecs):
        ua_c = np.conj(ua)
        for j, ub in enumerate(vecs):
            q[i, j] = 2 * lam0 * (ua_c @ ub) + 2 * Omega0 * (ua_c @ (g @ ub))
            r[i, j] = (Omega - Omega0) * (ua_c @ (d_omega_op @ ub)) + ua_c @ (dl @ ub)
    return q, r


def pencil_roots(q, r, lam0: complex):
    """The two roots of det(R + (lam - lam0) Q) = 0.

    Raises DegenerateReductionError when Q is (near-)singular, which signals
    breakdown of the two-mode reduction.
    """
    q = np.asarray(q, dtype=complex)
    r = np.asarray(r, dtype=complex)
    a2 = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
    scale = max(np.max(np.abs(q)) ** 2, 1e-300)
    if abs(a2) <= 1e-12 * scale:
        raise DegenerateReductionError("Q is numerically singular")
    a1 = r[0, 0] * q[1, 1] + q[0, 0] * r[1, 1] - r[0, 1] * q[1, 0] - q[0, 1] * r[1, 0]
    a0 = r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]
    disc = np.sqrt(a1 * a1 - 4 * a2 * a0)
    mu1 = (-a1 + disc) / (2 * a2)
    mu2 = (-a1 - disc) / (2 * a2)
    return lam0 + mu1, lam0 + mu2


@dataclass(frozen=True)
class MackayCone:
    """Conical eigenvalue surface at a Hamiltonian (stiffness-only) node.

    The Im lam surface satisfies (Im lam - plane)^2 = Re c with the plane
    Im lam = omega0 + kappa_slope * kappa + Omega_slope * (Omega - Omega0);
    Re c is the quadratic form  a dOmega^2 + b dOmega kappa + c kappa^2.
    """

    node: Node
    apex: tuple
    kappa_slope: float
    Omega_slope: float
    quad_a: float
    quad_b: float
    quad_c: float
    orientation: str  # "near-vertical" (definite) or "near-horizontal" (mixed)
    has_membrane: bool

    def re_c(self, dOmega: float, kappa: float) -> float:
        return (self.quad_a * dOmega**2 + self.quad_b * dOmega * kappa
                + self.quad_c * kappa**2)

    def plane(self, dOmega: float, kappa: float) -> float:
        return self.apex[2] + self.kappa_slope * kappa + self.Omega_slope * dOmega


def mackay_cone(node: Node, model: RotorModel) -> MackayCone:
    """Cone parameters of the stiffness-only unfolding at a node."""
    if model.delta != 0.0 or model.nu != 0.0:
        raise ValueError("eigenvalue cone requires delta = nu = 0 (Hamiltonian case)")
    tr = node_traces(node, model)
    al, be = tr.alpha, tr.beta
    ws, wt = tr.w_s, tr.w_t
    m = (tr.t * tr.sigma - tr.s * tr.eps) / 2
    x = (be * ws * tr.tr_K_tt - al * wt * tr.tr_K_ss) / (8 * ws * wt)
    quad_c = x**2 + al * be * (tr.tr_K_st_J**2 + tr.tr_K_st_I**2) / (16 * ws * wt)
    mixed = al * be < 0
    return MackayCone(
        node=node,
        apex=(node.Omega0, 0.0, node.omega0),
        kappa_slope=(tr.tr_K_ss / (al * ws) + tr.tr_K_tt / (be * wt)) / 8,
        Omega_slope=(tr.s * tr.eps + tr.t * tr.sigma) / 2,
        quad_a=m**2, quad_b=2 * m * x, quad_c=quad_c,
        orientation="near-horizontal" if mixed else "near-vertical",
        has_membrane=mixed,
    )


@dataclass(frozen=True)
class InstabilityBoundary:
    """The two lines kappa = slope * (Omega - Omega0) bounding Re c < 0."""

    node: Node
    slope_plus: float
    slope_minus: float

    def kappa_at(self, Omega: float):
        d = Omega - self.node.Omega0
        return self.slope_plus * d, self.slope_minus * d


def instability_boundary(node: Node, model: RotorModel) -> InstabilityBoundary:
    """Linear flutter/divergence boundary of a mixed-signature node.

    Only exists for sig_product < 0 under stiffness-only perturbation; the
    sector Re c < 0 between the lines is the first-order instability domain.
    """
    if model.delta != 0.0 or model.nu != 0.0:
        raise ValueError("boundary lines require delta = nu = 0")
    if node.sig_product >= 0:
        raise ValueError("definite-signature node has no real boundary lines")
    tr = node_traces(node, model)
    al, be = tr.alpha, tr.beta
    ws, wt = tr.w_s, tr.w_t
    root = 2 * np.sqrt((tr.tr_K_st_I**2 + tr.tr_K_st_J**2) / (-al * be * ws * wt))
    base = tr.tr_K_tt / (be * wt) - tr.tr_K_ss / (al * ws)
    num = 4 * (tr.s * tr.eps - tr.t * tr.sigma)
    return InstabilityBoundary(
        node=node,
        slope_plus=num / (base + root),
        slope_minus=num / (base - root),
    )


def surface_samples(node: Node, model: RotorModel, Omega_grid, kappa_grid,
                    delta: float, nu: float, exact_fn=None):
    """Long-format rows (Omega, kappa, branch, approx/exact Re and Im).

    exact_fn(model_at_scales, Omega) must return the two exact eigenvalues
    tracking the node; when omitted the exact columns repeat the approximation
    (used by lightweight callers that only need the closed form).
    """
    rows = []
    for kappa in kappa_grid:
        for Omega in Omega_grid:
            approx = eigen_approx(node, model, Omega, delta, kappa, nu)
            if exact_fn is not None:
                exact = exact_fn(model.with_scales(delta=delta, kappa=kappa, nu=nu), Omega)
            else:
                exact = approx
            for branch_id, (ap, ex) in enumerate(zip(approx, exact)):
                rows.append((
                    float(Omega), float(kappa), branch_id,
                    float(ap.real), float(ap.imag), float(ex.real), float(ex.imag),
                ))
    return rows
