import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from campbell.ep import (DegenerateDiscriminantError, UnfoldingClass,
                         axis_node_asymptotics, axis_node_ep, branch_cut_line,
                         classify_unfolding, ep_atlas, exceptional_points)
from campbell.mesh import enumerate_nodes, find_node
from campbell.model import RotorModel, example_6dof
from campbell.perturb import c_coefficient, eigen_approx
from conftest import two_mode_model
from helpers import log_slope


def test_definite_nodes_always_have_eps(model6, nodes6):
    for nd in nodes6:
        if nd.sig_product <= 0 or nd.clustered:
            continue
        try:
            pair = exceptional_points(nd, model6, 0.1, 0.2)
        except DegenerateDiscriminantError:
            continue  # uncoupled K block: EPs escape to infinity
        assert pair.exists
        assert pair.classification is UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT


def test_c_vanishes_at_every_ep(model6, nodes6_all):
    delta, nu = 0.1, 0.2
    scale2 = max(delta, nu) ** 2
    for nd in nodes6_all:
        try:
            pair = exceptional_points(nd, model6, delta, nu)
        except DegenerateDiscriminantError:
            continue
        if not pair.exists:
            continue
        for omega, kappa in ((pair.Omega_ep_plus, pair.kappa_ep_plus),
                             (pair.Omega_ep_minus, pair.kappa_ep_minus)):
            c = c_coefficient(nd, model6, omega - nd.Omega0, delta, kappa, nu)
            assert abs(c) <= 1e-10 * scale2


def test_ep_pair_symmetry(model6, node_definite):
    pair = exceptional_points(node_definite, model6, 0.1, 0.2)
    assert pair.kappa_ep_plus == -pair.kappa_ep_minus


def test_mixed_node_without_eps():
    # N > 0 forces D < 0 at a mixed node: no real EP pair
    model = two_mode_model(d11=-0.1, k_couple=((1.0, 0.0), (0.0, 0.0)))
    nd = find_node(enumerate_nodes(model.omegas, (0.0, 2.5)), 4.0 / 3.0, 1.0 / 3.0)
    pair = exceptional_points(nd, model, 0.05, 0.05)
    assert not pair.exists
    assert math.isnan(pair.Omega_ep_plus)
    assert pair.discriminants.N_disc / pair.discriminants.D_disc < 0


def test_degenerate_coupling_raises(model6, nodes6):
    # K couples modes (1,2) only: nodes involving mode 3 have D_disc = 0
    nd = find_node(nodes6, 0.6, 4.2)
    with pytest.raises(DegenerateDiscriminantError):
        exceptional_points(nd, model6, 0.1, 0.2)


def test_zero_perturbation_rejected(model6, node_definite):
    with pytest.raises(ValueError):
        exceptional_points(node_definite, model6, 0.0, 0.0)


def test_ep_tracks_exact_coalescence(model6, node_definite):
    """Predicted EP locations approach the true ones quadratically in scale."""
    from helpers import refine_min
    from campbell.oracle import nearest_pair

    dists = []
    for f in (1.0, 0.5):
        delta, nu = 0.1 * f, 0.2 * f
        pair = exceptional_points(node_definite, model6, delta, nu)

        def gap(omega, kappa):
            lam = nearest_pair(node_definite,
                               model6.with_scales(delta=delta, kappa=kappa, nu=nu),
                               omega)
            return abs(lam[0] - lam[1])

        best = refine_min(gap, pair.Omega_ep_plus, pair.kappa_ep_plus,
                          0.12 * f, levels=5)
        assert best[0] < 0.05 * max(delta, nu)
        dists.append(math.hypot(best[1] - pair.Omega_ep_plus,
                                best[2] - pair.kappa_ep_plus))
    assert dists[1] < 0.45 * dists[0]  # at least ~quadratic shrink


def test_axis_node_ep_pure_delta_frozen(model6):
    # D_ss = [[-1, 2], [2, 3]]: eigenvalue gap 4*sqrt(2)
    model = model6.with_scales(delta=0.1)
    pair = axis_node_ep(1, model, "pure_delta")
    assert pair.Omega_ep_plus == pytest.approx(0.1 * math.sqrt(2.0), abs=1e-12)
    assert pair.Omega_ep_minus == pytest.approx(-0.1 * math.sqrt(2.0), abs=1e-12)
    assert pair.kappa_ep_plus == 0.0


def test_axis_node_ep_pure_nu_frozen(model6):
    # K_ss = [[1, 2], [2, 1]]: rho gap 4; n12 = -1
    model = model6.with_scales(nu=0.2)
    pair = axis_node_ep(1, model, "pure_nu")
    assert pair.kappa_ep_plus == pytest.approx(-0.1, abs=1e-12)
    assert pair.Omega_ep_plus == 0.0


def test_axis_node_ep_isotropic_block_rejected():
    k = np.kron(np.eye(2), np.diag([2.0, 2.0]))
    model = RotorModel(omegas=(1.0, 3.0), D=np.zeros((4, 4)), K=k,
                       N=np.array([[0, 1, 0, 0], [-1, 0, 0, 0],
                                   [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float),
                       nu=0.1)
    with pytest.raises(DegenerateDiscriminantError, match="isotropic"):
        axis_node_ep(1, model, "pure_nu")


def test_axis_node_ep_mode_validation(model6):
    with pytest.raises(ValueError):
        axis_node_ep(1, model6.with_scales(delta=0.1), "pure_nu")
    with pytest.raises(ValueError):
        axis_node_ep(1, model6.with_scales(nu=0.1), "pure_delta")
    with pytest.raises(ValueError):
        axis_node_ep(1, model6, "both")


@pytest.mark.parametrize("mode,scales", [
    ("pure_delta", dict(delta=0.1)),
    ("pure_nu", dict(nu=0.2)),
])
def test_general_formula_specializes_at_standstill(model6, nodes6, mode, scales):
    model = model6.with_scales(**scales)
    for s in (1, 2, 3):
        nd = find_node(nodes6, 0.0, model6.omegas[s - 1])
        special = axis_node_ep(s, model, mode)
        general = exceptional_points(nd, model6, model.delta, model.nu)
        assert general.exists
        assert general.Omega_ep_plus == pytest.approx(special.Omega_ep_plus, abs=1e-10)
        assert abs(general.kappa_ep_plus) == pytest.approx(abs(special.kappa_ep_plus),
                                                           abs=1e-10)


def test_classify_definite(model6, node_definite):
    cls = classify_unfolding(node_definite, model6, 0.1, 0.2)
    assert cls is UnfoldingClass.IM_COFFEE_FILTER_RE_VIADUCT


def test_classify_mixed_constructions():
    cases = [
        (two_mode_model(d11=-0.1, k_couple=((1.0, 0.0), (0.0, 0.0)),
                        n_couple=((-1.0, 0.0), (0.0, 0.0))),
         UnfoldingClass.IM_VIADUCT_RE_COFFEE_FILTER),
        (two_mode_model(d11=-0.1, k_couple=((1.0, 0.0), (0.0, 0.0))),
         UnfoldingClass.IM_CROSS_RE_SEPARATE),
        (two_mode_model(d11=-0.1, k_couple=((1.0, 0.0), (0.0, 0.0)),
                        n_couple=((0.0, -1.0), (0.0, 0.0))),
         UnfoldingClass.IM_SEPARATE_RE_CROSS),
    ]
    for model, expected in cases:
        nd = find_node(enumerate_nodes(model.omegas, (0.0, 2.5)), 4.0 / 3.0, 1.0 / 3.0)
        assert classify_unfolding(nd, model, 0.05, 0.05) is expected


def test_classify_scale_invariant():
    model = two_mode_model(d11=-0.1, k_couple=((1.0, 0.0), (0.0, 0.0)),
                           n_couple=((-1.0, 0.0), (0.0, 0.0)))
    nd = find_node(enumerate_nodes(model.omegas, (0.0, 2.5)), 4.0 / 3.0, 1.0 / 3.0)
    base = classify_unfolding(nd, model, 0.05, 0.05)
    for f in (2.0, 0.5, 10.0):
        assert classify_unfolding(nd, model, 0.05 * f, 0.05 * f) is base


def test_classify_zero_perturbation_rejected(model6, node_mixed):
    with pytest.raises(ValueError):
        classify_unfolding(node_mixed, model6, 0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.1, 5))
def test_mixed_signature_excludes_double_positive(p1, ra, rb, tj, ti, ws, wt):
    """At mixed signature, D_disc > 0 and N_disc > 0 cannot hold together.

    Cauchy-Schwarz on (ra, -rb) against (tj, ti) forces at least one
    discriminant nonpositive whenever alpha*beta = -1, whatever the blocks.
    """
    if p1 == 0.0:
        return
    u = (ra * tj - rb * ti) / p1
    d_disc = u**2 - (tj**2 + ti**2) / (4 * ws * wt)
    n_disc = (p1 / (4 * ws * wt)) ** 2 - (ra**2 + rb**2) / (4 * ws * wt)
    assert not (d_disc > 1e-12 and n_disc > 1e-12)


def test_branch_cut_segmentation(model6, node_definite):
    delta, nu = 0.05, 0.1
    line = branch_cut_line(node_definite, model6, delta, nu)
    pair = line.eps_pair
    assert pair is not None and pair.exists
    # between the EPs: Im coincide (im_cut); outside: Re coincide (re_cut)
    for frac, expected in ((0.5, "im_cut"), (1.5, "re_cut"), (-0.7, "im_cut")):
        kappa = frac * pair.kappa_ep_plus
        omega = node_definite.Omega0 - line.coef_kappa * kappa / line.coef_dOmega
        assert line.segment(omega, kappa) == expected
        lp, lm = eigen_approx(node_definite, model6, omega, delta, kappa, nu)
        if expected == "im_cut":
            assert abs(lp.imag - lm.imag) < 1e-12
            assert abs(lp.real - lm.real) > 1e-6
        else:
            assert abs(lp.real - lm.real) < 1e-12
            assert abs(lp.imag - lm.imag) > 1e-6


def test_branch_cut_coincide_only_at_eps(model6, node_definite):
    delta, nu = 0.05, 0.1
    line = branch_cut_line(node_definite, model6, delta, nu)
    pair = line.eps_pair
    kappa = pair.kappa_ep_plus
    omega = pair.Omega_ep_plus
    lp, lm = eigen_approx(node_definite, model6, omega, delta, kappa, nu)
    assert abs(lp - lm) < 1e-10


def test_branch_cut_pure_delta_is_speed_axis(model6, node_standstill):
    line = branch_cut_line(node_standstill, model6, 0.1, 0.0)
    assert line.coef_dOmega == 0.0 and line.coef_kappa != 0.0  # kappa = 0 axis


def test_branch_cut_degenerate(model6, nodes6):
    nd = find_node(nodes6, 1.0, 0.0)  # critical node, lam0 = 0 kills all terms
    with pytest.raises(DegenerateDiscriminantError):
        branch_cut_line(nd, model6, 0.1, 0.2)


def test_ep_atlas_rows(model6, nodes6):
    rows = ep_atlas(nodes6, model6, 0.1, 0.2)
    assert len(rows) == len(nodes6)
    by_id = {r[0]: r for r in rows}
    nd_id = nodes6.index(find_node(nodes6, 2.0 / 3.0, 5.0 / 3.0))
    row = by_id[nd_id]
    assert row[8] is True
    assert row[9] == "IM_COFFEE_FILTER_RE_VIADUCT"
    degenerate = [r for r in rows if r[9] == "degenerate"]
    assert degenerate and all(r[4] is None for r in degenerate)


# ---- standstill asymptotics against the closed-form eigenvalues ----

def _nu_model(model6):
    return model6.with_scales(delta=0.0, nu=0.2)


def _delta_model(model6):
    return model6.with_scales(delta=0.1, nu=0.0)


def _approx_re(node, model, omega, kappa):
    lp, lm = eigen_approx(node, model, omega, model.delta, kappa, model.nu)
    return sorted([lp.real, lm.real])


def _approx_im(node, model, omega, kappa):
    lp, lm = eigen_approx(node, model, omega, model.delta, kappa, model.nu)
    return sorted([lp.imag, lm.imag])


def test_nu_at_ep_square_root_touching(model6, node_standstill):
    model = _nu_model(model6)
    exp = axis_node_asymptotics(1, model, "nu_at_ep")
    # n12 = -1 and nu > 0: the touching lives on the Omega < 0 side
    omega = -0.01
    re = exp.re_lambda(omega, exp.kappa_ep)
    expected = 0.5 * math.sqrt(2 * 0.2 * 1 * 1 * 0.01 / 1.0)
    assert max(re) == pytest.approx(expected)


def test_delta_cut_constant_term(model6):
    model = _delta_model(model6)
    exp = axis_node_asymptotics(1, model, "delta_cut")
    re = exp.re_lambda(0.5, 0.0)
    assert re[0] == pytest.approx(-0.1 * exp.tr_D_ss / 4)
    assert exp.gamma == pytest.approx(16.0)  # 2 tr(K_ss D_ss) - trK trD


@pytest.mark.parametrize("case,min_slope", [
    ("nu_cross", 2.0), ("nu_at_ep", 1.2), ("delta_cut", 1.8), ("delta_avoid", 1.5),
])
def test_asymptotics_match_eigen_approx(model6, node_standstill, case, min_slope):
    """Each printed expansion converges to the closed form at its stated order."""
    model = _nu_model(model6) if case.startswith("nu") else _delta_model(model6)
    exp = axis_node_asymptotics(1, model, case)
    h_values = [0.04, 0.02, 0.01, 0.005]
    errors = []
    for h in h_values:
        if case == "nu_cross":
            omega, kappa = -h, 2.0 * exp.kappa_ep
        elif case == "nu_at_ep":
            omega, kappa = -h, exp.kappa_ep
        elif case == "delta_cut":
            omega, kappa = 2.0 * exp.Omega_ep, h
        else:  # delta_avoid
            omega, kappa = 0.5 * exp.Omega_ep, h
        re_asym = sorted(exp.re_lambda(omega, kappa))
        re_full = _approx_re(node_standstill, model, node_standstill.Omega0 + omega, kappa)
        err = max(abs(a - b) for a, b in zip(re_asym, re_full))
        if case.startswith("delta"):
            im_asym = sorted(exp.im_lambda(omega, kappa))
            im_full = _approx_im(node_standstill, model,
                                 node_standstill.Omega0 + omega, kappa)
            err = max(err, max(abs(a - b) for a, b in zip(im_asym, im_full)))
        errors.append(max(err, 1e-15))
    assert log_slope(h_values, errors) >= min_slope


def test_nu_avoid_matches_at_origin(model6, node_standstill):
    model = _nu_model(model6)
    exp = axis_node_asymptotics(1, model, "nu_avoid")
    re_asym = sorted(exp.re_lambda(0.0, 0.5 * exp.kappa_ep))
    re_full = _approx_re(node_standstill, model, 0.0, 0.5 * exp.kappa_ep)
    assert re_asym == pytest.approx(re_full, abs=1e-12)


def test_delta_at_ep_touching(model6, node_standstill):
    model = _delta_model(model6)
    exp = axis_node_asymptotics(1, model, "delta_at_ep")
    kappa = -0.004  # -delta*kappa*gamma > 0 needs kappa < 0 here
    re_asym = sorted(exp.re_lambda(exp.Omega_ep, kappa))
    re_full = _approx_re(node_standstill, model, exp.Omega_ep, kappa)
    assert max(abs(a - b) for a, b in zip(re_asym, re_full)) < 2e-3
    assert re_asym[1] - re_asym[0] == pytest.approx(
        0.5 * math.sqrt(-model.delta * kappa * exp.gamma / 1.0), abs=1e-12)


def test_asymptotics_regime_validation(model6, node_standstill):
    model = _nu_model(model6)
    exp = axis_node_asymptotics(1, model, "nu_cross")
    with pytest.raises(ValueError, match="kappa"):
        exp.re_lambda(0.01, 0.5 * exp.kappa_ep)
    exp = axis_node_asymptotics(1, model, "nu_avoid")
    with pytest.raises(ValueError, match="kappa"):
        exp.re_lambda(0.01, 2.0 * exp.kappa_ep)
    with pytest.raises(ValueError, match="imaginary-part"):
        exp.im_lambda(0.01, 0.0)
    dmodel = _delta_model(model6)
    exp = axis_node_asymptotics(1, dmodel, "delta_cut")
    with pytest.raises(ValueError, match="Omega"):
        exp.re_lambda(0.5 * exp.Omega_ep, 0.01)


def test_asymptotics_case_validation(model6):
    with pytest.raises(ValueError, match="unknown case"):
        axis_node_asymptotics(1, _nu_model(model6), "nu_sideways")
    with pytest.raises(ValueError, match="delta = 0"):
        axis_node_asymptotics(1, model6.with_scales(delta=0.1, nu=0.1), "nu_cross")
