"""Exceptional-point geometry and unfolding classification.

Dissipative/circulatory perturbation deforms the stiffness-only eigenvalue
cones into singular surfaces whose corners are exceptional points (EPs): the
solutions of c = 0.  Their first-order loci in the (Omega, kappa)-plane are

    kappa_EP = +- sqrt(N/D),
    Omega_EP = Omega0 +- (4 w_s w_t U - beta w_s trK_tt + alpha w_t trK_ss)
                        / (4 w_s w_t (t sigma - s eps)) * sqrt(N/D),

with discriminants U, D, N built from Im A1, Im B1, Re A2, Re B2 and the
K-coupling block.  The signs of D and N select one of four unfolding
scenarios for the Re/Im eigenvalue surfaces.

The symbols D and N here are the scalar discriminants (D_disc, N_disc), not
the damping and circulatory matrices; the name collision is inherited from
the underlying theory and resolved by the _disc suffix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .mesh import Node
from .model import RotorModel, block
from .perturb import NodeTraces, _c_from_traces, node_traces

_DEGENERACY_RTOL = 1e-12


class DegenerateDiscriminantError(ArithmeticError):
    """D_disc or N_disc vanishes; the EP prediction degenerates."""


class UnfoldingClass(enum.Enum):
    """Which of Re/Im eigenvalue surfaces carries which singular shape."""

    IM_COFFEE_FILTER_RE_VIADUCT = "IM_COFFEE_FILTER_RE_VIADUCT"
    IM_VIADUCT_RE_COFFEE_FILTER = "IM_VIADUCT_RE_COFFEE_FILTER"
    IM_CROSS_RE_SEPARATE = "IM_CROSS_RE_SEPARATE"
    IM_SEPARATE_RE_CROSS = "IM_SEPARATE_RE_CROSS"


@dataclass(frozen=True)
class Discriminants:
    """U, D_disc, N_disc of the EP loci (infinite U/D marks the p1 = 0 limit)."""

    U: float
    D_disc: float
    N_disc: float


@dataclass(frozen=True)
class ExceptionalPointPair:
    Omega_ep_plus: float
    Omega_ep_minus: float
    kappa_ep_plus: float
    kappa_ep_minus: float
    exists: bool
    classification: UnfoldingClass
    discriminants: Discriminants
    node: Node | None = None


def _discriminant_pieces(tr: NodeTraces, delta: float, nu: float):
    a1, a2, b1, b2 = tr.coefficients(delta, 0.0, nu)
    ws, wt, al, be = tr.w_s, tr.w_t, tr.alpha, tr.beta
    p1 = al * ws * b1.imag - be * wt * a1.imag
    csum = a2.real * tr.tr_K_st_J - b2.real * tr.tr_K_st_I
    n_disc = (p1 / (4 * ws * wt)) ** 2 + al * be * (a2.real**2 + b2.real**2) / (4 * ws * wt)
    n_scale = (p1 / (4 * ws * wt)) ** 2 + (a2.real**2 + b2.real**2) / (4 * ws * wt)
    t2 = tr.tr_K_st_J**2 + tr.tr_K_st_I**2
    return p1, csum, n_disc, n_scale, t2


def _discriminants(tr: NodeTraces, delta: float, nu: float) -> Discriminants:
    p1, csum, n_disc, _, t2 = _discriminant_pieces(tr, delta, nu)
    ws, wt, al, be = tr.w_s, tr.w_t, tr.alpha, tr.beta
    if p1 == 0.0:
        u = math.inf if csum != 0.0 else math.nan
        d_disc = math.inf if csum != 0.0 else math.nan
    else:
        u = csum / p1
        d_disc = u**2 + al * be * t2 / (4 * ws * wt)
    return Discriminants(U=u, D_disc=d_disc, N_disc=n_disc)


def exceptional_points(node: Node, model: RotorModel, delta: float,
                       nu: float) -> ExceptionalPointPair:
    """Predicted EP pair of a node under scales (delta, nu).

    The pair solves c = 0 exactly in the first-order expansion; exists is
    False when no real solution lies near the node (mixed signature with
    N/D < 0).  A vanishing D_disc or N_disc raises rather than clamping.
    The pure-damping limit (p1 = 0 with nonzero coupling) is taken
    analytically and lands the pair on the kappa = 0 axis.
    """
    if delta == 0.0 and nu == 0.0:
        raise ValueError("EP prediction needs a nonzero non-Hamiltonian scale")
    tr = node_traces(node, model)
    p1, csum, n_disc, n_scale, t2 = _discriminant_pieces(tr, delta, nu)
    ws, wt, al, be = tr.w_s, tr.w_t, tr.alpha, tr.beta
    denom_ts = tr.t * tr.sigma - tr.s * tr.eps
    disc = _discriminants(tr, delta, nu)
    cls = _classify(tr, disc)

    if p1 == 0.0:
        if csum == 0.0:
            raise DegenerateDiscriminantError(
                "both p1 and the coupling sum vanish; c has no Omega-dependent "
                "imaginary part and the EP loci are undefined at this node"
            )
        if n_disc <= 0.0:
            return ExceptionalPointPair(math.nan, math.nan, math.nan, math.nan,
                                        False, cls, disc, node)
        d_omega = math.sqrt(n_disc) / abs(denom_ts)
        return ExceptionalPointPair(node.Omega0 + d_omega, node.Omega0 - d_omega,
                                    0.0, 0.0, True, cls, disc, node)

    d_disc = disc.D_disc
    d_scale = disc.U**2 + t2 / (4 * ws * wt)
    if abs(d_disc) <= _DEGENERACY_RTOL * max(d_scale, 1e-300):
        raise DegenerateDiscriminantError(f"D_disc = {d_disc:.3e} is numerically zero")
    if abs(n_disc) <= _DEGENERACY_RTOL * max(n_scale, 1e-300):
        raise DegenerateDiscriminantError(f"N_disc = {n_disc:.3e} is numerically zero")
    ratio = n_disc / d_disc
    if ratio < 0.0:
        return ExceptionalPointPair(math.nan, math.nan, math.nan, math.nan,
                                    False, cls, disc, node)
    root = math.sqrt(ratio)
    d_omega = (4 * ws * wt * disc.U - be * ws * tr.tr_K_tt + al * wt * tr.tr_K_ss) \
        / (4 * ws * wt * denom_ts) * root
    return ExceptionalPointPair(node.Omega0 + d_omega, node.Omega0 - d_omega,
                                root, -root, True, cls, disc, node)


def axis_node_ep(s: int, model: RotorModel, mode: str) -> ExceptionalPointPair:
    """EP pair of the standstill doublet of mode s in the two pure cases.

    mode "pure_nu" (delta = 0): Omega_EP = 0 and
        kappa_EP = +- 2 nu n_{2s-1,2s} / (rho_1(K_ss) - rho_2(K_ss));
    mode "pure_delta" (nu = 0): kappa_EP = 0 and
        Omega_EP = +- delta (mu_1(D_ss) - mu_2(D_ss)) / (4 s),
    with rho/mu the eigenvalues of the 2x2 diagonal blocks.
    """
    if mode not in ("pure_nu", "pure_delta"):
        raise ValueError(f"unknown mode {mode!r}")
    if not 1 <= s <= model.n:
        raise IndexError(f"mode index {s} out of range")
    w_s = model.omegas[s - 1]
    n12 = float(model.N[2 * s - 2, 2 * s - 1])
    k_ss = block(model.K, s, s).as_array()
    rho = np.linalg.eigvalsh(k_ss)
    rho_gap = float(rho[1] - rho[0])
    if mode == "pure_nu":
        if model.delta != 0.0:
            raise ValueError("pure_nu mode requires delta = 0")
        nu = model.nu
        if nu == 0.0:
            raise ValueError("pure_nu mode requires a nonzero nu scale")
        if rho_gap == 0.0:
            raise DegenerateDiscriminantError(
                "K_ss block is isotropic (rho_1 = rho_2); EPs escape to infinity"
            )
        kap = 2 * nu * n12 / rho_gap
        disc = Discriminants(U=0.0, D_disc=rho_gap**2 / (4 * w_s**2),
                             N_disc=(nu * n12 / w_s) ** 2)
        return ExceptionalPointPair(0.0, 0.0, kap, -kap, True,
                                    UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT, disc)
    if model.nu != 0.0:
        raise ValueError("pure_delta mode requires nu = 0")
    delta = model.delta
    if delta == 0.0:
        raise ValueError("pure_delta mode requires a nonzero delta scale")
    d_ss = block(model.D, s, s).as_array()
    mu = np.linalg.eigvalsh(d_ss)
    mu_gap = float(mu[1] - mu[0])
    om = delta * mu_gap / (4 * s)
    disc = Discriminants(U=math.inf, D_disc=math.inf,
                         N_disc=delta**2 * mu_gap**2 / 4)
    return ExceptionalPointPair(om, -om, 0.0, 0.0, True,
                                UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT, disc)


def _classify(tr: NodeTraces, disc: Discriminants) -> UnfoldingClass:
    if tr.alpha * tr.beta > 0:
        return UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT
    d, n = disc.D_disc, disc.N_disc
    if math.isnan(d) or math.isnan(n):
        raise DegenerateDiscriminantError("discriminants undefined at this node")
    if d > 0 and n > 0:
        return UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT
    if d < 0 and n < 0:
        return UnfoldingClass.IM_VIADUCT_RE_COFFEE_FILTER
    if n > 0:
        return UnfoldingClass.IM_CROSS_RE_SEPARATE
    return UnfoldingClass.IM_SEPARATE_RE_CROSS


def classify_unfolding(node: Node, model: RotorModel, delta: float,
                       nu: float) -> UnfoldingClass:
    """Unfolding scenario of a node under scales (delta, nu).

    Definite signature always yields the coffee-filter/viaduct pair; mixed
    signature branches on the signs of D_disc and N_disc.  Discriminants
    within 1e-12 (relative) of zero are degenerate boundary cases and raise.
    """
    if delta == 0.0 and nu == 0.0:
        raise ValueError("zero non-Hamiltonian perturbation is unclassifiable")
    tr = node_traces(node, model)
    if tr.alpha * tr.beta > 0:
        return UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT
    p1, csum, n_disc, n_scale, t2 = _discriminant_pieces(tr, delta, nu)
    disc = _discriminants(tr, delta, nu)
    if p1 == 0.0 and csum == 0.0:
        raise DegenerateDiscriminantError("discriminants degenerate (p1 = coupling = 0)")
    if p1 != 0.0:
        d_scale = disc.U**2 + t2 / (4 * tr.w_s * tr.w_t)
        if abs(disc.D_disc) <= _DEGENERACY_RTOL * max(d_scale, 1e-300):
            raise DegenerateDiscriminantError("D_disc on the degenerate boundary")
    if abs(n_disc) <= _DEGENERACY_RTOL * max(n_scale, 1e-300):
        raise DegenerateDiscriminantError("N_disc on the degenerate boundary")
    return _classify(tr, disc)


@dataclass(frozen=True)
class BranchCutLine:
    """The line Im c = 0 through the node in the (Omega, kappa)-plane.

    Points satisfy coef_dOmega * (Omega - Omega0) + coef_kappa * kappa = 0.
    When the EP pair exists, the segment between the EPs is the branch cut of
    the Im surface (Re c < 0 there) and the complementary rays are the cuts
    of the Re surface (Re c > 0).
    """

    node: Node
    coef_dOmega: float
    coef_kappa: float
    delta: float
    nu: float
    eps_pair: ExceptionalPointPair | None
    traces: NodeTraces

    def kappa_at(self, Omega: float) -> float:
        if self.coef_kappa == 0.0:
            raise ZeroDivisionError("line is vertical (Omega = Omega0)")
        return -self.coef_dOmega * (Omega - self.node.Omega0) / self.coef_kappa

    def point(self, t: float):
        """Point on the line at parameter t (t = 0 is the node)."""
        scale = math.hypot(self.coef_dOmega, self.coef_kappa)
        return (self.node.Omega0 + t * self.coef_kappa / scale,
                -t * self.coef_dOmega / scale)

    def segment(self, Omega: float, kappa: float) -> str:
        """Which surface's cut a point of the line belongs to.

        "im_cut" where Re c <= 0 (imaginary parts coincide), "re_cut" where
        Re c >= 0 (real parts coincide); the EPs themselves satisfy both.
        """
        c = _c_from_traces(self.traces, Omega - self.node.Omega0, self.delta,
                           kappa, self.nu)
        return "im_cut" if c.real <= 0 else "re_cut"


def branch_cut_line(node: Node, model: RotorModel, delta: float,
                    nu: float) -> BranchCutLine:
    """Line Im c = 0 with its EP segmentation.

    Degenerate when Im c vanishes identically (raises); the pure-damping
    standstill case yields the horizontal line kappa = 0, matching EPs on
    the speed axis.
    """
    if delta == 0.0 and nu == 0.0:
        raise ValueError("branch cuts need a nonzero non-Hamiltonian scale")
    tr = node_traces(node, model)
    a1, a2, b1, b2 = tr.coefficients(delta, 0.0, nu)
    ws, wt, al, be = tr.w_s, tr.w_t, tr.alpha, tr.beta
    g1 = al * wt * a1.imag - be * ws * b1.imag
    p1 = al * ws * b1.imag - be * wt * a1.imag
    csum = a2.real * tr.tr_K_st_J - b2.real * tr.tr_K_st_I
    coef_domega = g1 * (tr.s * tr.eps - tr.t * tr.sigma) / (8 * ws * wt)
    coef_kappa = ((al * ws * tr.tr_K_tt - be * wt * tr.tr_K_ss) * p1
                  / (32 * ws**2 * wt**2)
                  - al * be * csum / (8 * ws * wt))
    if coef_domega == 0.0 and coef_kappa == 0.0:
        raise DegenerateDiscriminantError("Im c vanishes identically; no branch-cut line")
    try:
        pair = exceptional_points(node, model, delta, nu)
    except DegenerateDiscriminantError:
        pair = None
    return BranchCutLine(node=node, coef_dOmega=coef_domega, coef_kappa=coef_kappa,
                         delta=delta, nu=nu, eps_pair=pair, traces=tr)


_AXIS_CASES = ("nu_cross", "nu_avoid", "nu_at_ep", "delta_cut", "delta_avoid",
               "delta_at_ep")


@dataclass(frozen=True)
class AxisNodeExpansion:
    """Leading-order expansion at a standstill doublet for one regime.

    The nu_* cases expand the real parts for pure circulatory perturbation;
    the delta_* cases expand both parts for pure damping.  evaluate_* check
    the regime (e.g. kappa^2 > kappa_EP^2 for nu_cross) and raise outside it.
    """

    case: str
    s: int
    omega_s: float
    n12: float
    rho_gap: float
    mu_gap: float
    tr_D_ss: float
    tr_K_ss: float
    gamma: float
    scale: float        # the active nu or delta
    kappa_ep: float     # |kappa_EP| for nu cases, 0 otherwise
    Omega_ep: float     # |Omega_EP| for delta cases, 0 otherwise

    def re_lambda(self, Omega: float, kappa: float):
        s, w = self.s, self.omega_s
        if self.case == "nu_cross":
            if kappa**2 <= self.kappa_ep**2:
                raise ValueError("nu_cross requires kappa^2 > kappa_EP^2")
            c = 2 * self.scale * s * self.n12 * Omega / (
                self.rho_gap * math.sqrt(kappa**2 - self.kappa_ep**2))
            return c, -c
        if self.case == "nu_avoid":
            if kappa**2 >= self.kappa_ep**2:
                raise ValueError("nu_avoid requires kappa^2 < kappa_EP^2")
            c = self.rho_gap / (4 * w) * math.sqrt(self.kappa_ep**2 - kappa**2)
            return c, -c
        if self.case == "nu_at_ep":
            arg = 2 * self.scale * s * self.n12 * Omega / w
            if arg < 0:
                raise ValueError("nu_at_ep touching requires nu*n12*Omega >= 0")
            c = 0.5 * math.sqrt(arg)
            return c, -c
        off = -self.scale * self.tr_D_ss / 4
        if self.case == "delta_cut":
            if Omega**2 <= self.Omega_ep**2:
                raise ValueError("delta_cut requires Omega^2 > Omega_EP^2")
            c = self.gamma * self.scale * kappa / (
                16 * s * w * math.sqrt(Omega**2 - self.Omega_ep**2))
            return off + c, off - c
        if self.case == "delta_avoid":
            if Omega**2 >= self.Omega_ep**2:
                raise ValueError("delta_avoid requires Omega^2 < Omega_EP^2")
            c = s * math.sqrt(self.Omega_ep**2 - Omega**2)
            return off + c, off - c
        # delta_at_ep
        arg = -self.scale * kappa * self.gamma / w
        if arg < 0:
            raise ValueError("delta_at_ep touching requires -delta*kappa*gamma >= 0")
        c = 0.25 * math.sqrt(arg)
        return off + c, off - c

    def im_lambda(self, Omega: float, kappa: float):
        if self.case.startswith("nu_"):
            raise ValueError("imaginary-part expansions are only printed for the "
                             "pure-damping (delta_*) cases")
        s, w = self.s, self.omega_s
        if self.case == "delta_cut":
            if Omega**2 <= self.Omega_ep**2:
                raise ValueError("delta_cut requires Omega^2 > Omega_EP^2")
            c = s * math.sqrt(Omega**2 - self.Omega_ep**2)
            return w + c, w - c
        if self.case == "delta_avoid":
            if Omega**2 >= self.Omega_ep**2:
                raise ValueError("delta_avoid requires Omega^2 < Omega_EP^2")
            base = w + self.tr_K_ss * kappa / (4 * w)
            c = self.gamma * self.scale * kappa / (
                16 * s * w * math.sqrt(self.Omega_ep**2 - Omega**2))
            return base + c, base - c
        # delta_at_ep
        arg = -self.scale * kappa * self.gamma / w
        if arg < 0:
            raise ValueError("delta_at_ep touching requires -delta*kappa*gamma >= 0")
        base = w + self.tr_K_ss * kappa / (4 * w)
        c = 0.25 * math.sqrt(arg)
        return base + c, base - c


def axis_node_asymptotics(s: int, model: RotorModel, case: str) -> AxisNodeExpansion:
    """Printed asymptotic expansions near the standstill doublet of mode s."""
    if case not in _AXIS_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {_AXIS_CASES}")
    if not 1 <= s <= model.n:
        raise IndexError(f"mode index {s} out of range")
    w_s = model.omegas[s - 1]
    k_ss = block(model.K, s, s).as_array()
    d_ss = block(model.D, s, s).as_array()
    rho = np.linalg.eigvalsh(k_ss)
    mu = np.linalg.eigvalsh(d_ss)
    n12 = float(model.N[2 * s - 2, 2 * s - 1])
    gamma = 2 * float(np.trace(k_ss @ d_ss)) - float(np.trace(k_ss)) * float(np.trace(d_ss))
    if case.startswith("nu_"):
        if model.delta != 0.0:
            raise ValueError("nu_* cases require delta = 0")
        if model.nu == 0.0:
            raise ValueError("nu_* cases require a nonzero nu scale")
        pair = axis_node_ep(s, model, "pure_nu")
        scale = model.nu
        kappa_ep, omega_ep = abs(pair.kappa_ep_plus), 0.0
    else:
        if model.nu != 0.0:
            raise ValueError("delta_* cases require nu = 0")
        if model.delta == 0.0:
            raise ValueError("delta_* cases require a nonzero delta scale")
        pair = axis_node_ep(s, model, "pure_delta")
        scale = model.delta
        kappa_ep, omega_ep = 0.0, abs(pair.Omega_ep_plus)
    return AxisNodeExpansion(
        case=case, s=s, omega_s=w_s, n12=n12,
        rho_gap=float(rho[1] - rho[0]), mu_gap=float(mu[1] - mu[0]),
        tr_D_ss=float(np.trace(d_ss)), tr_K_ss=float(np.trace(k_ss)),
        gamma=gamma, scale=scale, kappa_ep=kappa_ep, Omega_ep=omega_ep,
    )


def ep_atlas(nodes, model: RotorModel, delta: float, nu: float):
    """EP table rows for CSV emission; degenerate nodes are tagged, not dropped.

    Columns: node_id, Omega0, omega0, sig_product, Omega_EP_plus,
    kappa_EP_plus, Omega_EP_minus, kappa_EP_minus, exists, class.
    """
    rows = []
    for node_id, node in enumerate(nodes):
        try:
            pair = exceptional_points(node, model, delta, nu)
        except DegenerateDiscriminantError:
            rows.append((node_id, node.Omega0, node.omega0, node.sig_product,
                         None, None, None, None, False, "degenerate"))
            continue
        coords = (pair.Omega_ep_plus, pair.kappa_ep_plus,
                  pair.Omega_ep_minus, pair.kappa_ep_minus)
        if pair.exists:
            rows.append((node_id, node.Omega0, node.omega0, node.sig_product,
                         *[float(v) for v in coords], True, pair.classification.value))
        else:
            rows.append((node_id, node.Omega0, node.omega0, node.sig_product,
                         None, None, None, None, False, pair.classification.value))
    return rows
