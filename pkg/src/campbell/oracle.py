"""Exact-spectrum ground truth and approximation-error measurement.

Everything the closed forms claim is checked against full quadratic-pencil
spectra obtained by companion linearization: sweeps with eigenvalue tracking,
nearest-pair extraction at a node, Hausdorff error of the first-order
formulas and empirical convergence orders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import eig_dense, qep_linearize
from .mesh import Node, all_branches, branch_value
from .model import RotorModel, pencil_at
from .perturb import eigen_approx


@dataclass(frozen=True)
class SpectrumSample:
    """All 4n eigenvalues at one parameter point, with track labels."""

    Omega: float
    kappa_scale: float
    delta_scale: float
    nu_scale: float
    eigenvalues: np.ndarray
    track_ids: np.ndarray


@dataclass(frozen=True)
class ErrorReport:
    node_id: str
    h_values: tuple
    errors: tuple
    fitted_slope: float


def exact_spectrum(model: RotorModel, Omega: float) -> SpectrumSample:
    """All 4n pencil eigenvalues at speed Omega (scales from the model)."""
    c, k = pencil_at(model, Omega)
    dec = eig_dense(qep_linearize(np.eye(2 * model.n), c, k))
    lam = np.array(sorted(dec.eigenvalues, key=lambda z: (z.real, z.imag)))
    return SpectrumSample(
        Omega=float(Omega), kappa_scale=model.kappa, delta_scale=model.delta,
        nu_scale=model.nu, eigenvalues=lam,
        track_ids=np.arange(lam.size),
    )


def multiset_distance(a, b) -> float:
    """Largest matched distance under the optimal pairing of two spectra."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        raise ValueError("spectra must have equal cardinality")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def sweep(model: RotorModel, Omega_grid, scale_overrides: dict | None = None):
    """Spectrum samples over a speed grid with continuity-tracked labels.

    Matching between adjacent grid points is an optimal assignment on
    pairwise distances, which resolves ties deterministically; track ids at
    the first point follow the lexicographic (Re, Im) order.
    """
    Omega_grid = [float(w) for w in Omega_grid]
    if not Omega_grid:
        raise ValueError("speed grid must be nonempty")
    if any(b < a for a, b in zip(Omega_grid, Omega_grid[1:])):
        raise ValueError("speed grid must be sorted")
    if scale_overrides:
        model = model.with_scales(**scale_overrides)
    samples = []
    prev = None
    for Omega in Omega_grid:
        c, k = pencil_at(model, Omega)
        lam = eig_dense(qep_linearize(np.eye(2 * model.n), c, k)).eigenvalues
        if prev is None:
            order = np.lexsort((lam.imag, lam.real))
            lam = lam[order]
            tracks = np.arange(lam.size)
        else:
            cost = np.abs(prev[:, None] - lam[None, :])
            rows, cols = linear_sum_assignment(cost)
            new = np.empty_like(lam)
            new[rows] = lam[cols]
            lam = new
            tracks = np.arange(lam.size)
        samples.append(SpectrumSample(
            Omega=Omega, kappa_scale=model.kappa, delta_scale=model.delta,
            nu_scale=model.nu, eigenvalues=lam, track_ids=tracks,
        ))
        prev = lam
    return samples


def local_spacing(node: Node, omegas) -> float:
    """Distance from the node frequency to the nearest other branch value.

    Evaluated on the unperturbed mesh at Omega0; this is the natural scale
    separating the node's doublet from foreign eigenvalues.
    """
    values = [branch_value(b, omegas[b.s - 1], node.Omega0).imag
              for b in all_branches(len(omegas))]
    others = [v for v in values if abs(v - node.omega0) > 1e-9]
    if not others:
        raise ArithmeticError("node has no neighbouring branch values")
    return float(min(abs(v - node.omega0) for v in others))


def nearest_pair(node: Node, model: RotorModel, Omega: float):
    """The two exact eigenvalues tracking the node's doublet.

    Search radius is half the unperturbed local spacing; fewer than two
    eigenvalues inside it means the perturbation pushed the pair out of the
    asymptotic regime, which is an error.
    """
    radius = 0.5 * local_spacing(node, model.omegas)
    lam = exact_spectrum(model, Omega).eigenvalues
    dist = np.abs(lam - 1j * node.omega0)
    inside = np.nonzero(dist <= radius)[0]
    if inside.size < 2:
        raise ArithmeticError(
            f"only {inside.size} exact eigenvalues within radius {radius:.3g} "
            f"of the node doublet; perturbation too large"
        )
    order = inside[np.argsort(dist[inside])]
    pair = lam[order[:2]]
    return pair[0], pair[1]


def hausdorff_pair_distance(pair_a, pair_b) -> float:
    """Hausdorff distance between two 2-element eigenvalue sets."""
    a = np.asarray(pair_a, dtype=complex)
    b = np.asarray(pair_b, dtype=complex)
    d_ab = max(min(abs(x - y) for y in b) for x in a)
    d_ba = max(min(abs(x - y) for y in a) for x in b)
    return float(max(d_ab, d_ba))


def approx_error(node: Node, model: RotorModel, Omega: float, delta: float,
                 kappa: float, nu: float) -> float:
    """Hausdorff distance between the first-order pair and the exact pair."""
    approx = eigen_approx(node, model, Omega, delta, kappa, nu)
    exact = nearest_pair(node, model.with_scales(delta=delta, kappa=kappa, nu=nu), Omega)
    return hausdorff_pair_distance(approx, exact)


def convergence_order(node: Node, model: RotorModel, direction, h_list,
                      node_id: str = "") -> ErrorReport:
    """Least-squares slope of log(error) vs log(h) for joint scaling.

    direction = (kappa, delta, nu, dOmega) multipliers; at step h the scales
    are direction * h and the speed is Omega0 + direction[3] * h.  Errors
    below 1e-13 (rounding floor) are excluded from the fit.
    """
    direction = tuple(float(x) for x in direction)
    if len(direction) != 4:
        raise ValueError("direction must be (kappa, delta, nu, dOmega)")
    if all(x == 0.0 for x in direction):
        raise ValueError("degenerate zero direction")
    h_list = [float(h) for h in h_list]
    if len(h_list) < 3 or any(h <= 0 for h in h_list) \
            or any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ValueError("need >= 3 strictly decreasing positive step sizes")
    errors = []
    for h in h_list:
        kappa, delta, nu, d_omega = (x * h for x in direction)
        errors.append(approx_error(node, model, node.Omega0 + d_omega,
                                   delta, kappa, nu))
    kept = [(h, e) for h, e in zip(h_list, errors) if e > 1e-13]
    if len(kept) < 2:
        raise ArithmeticError("errors underflow the rounding floor; fit rejected")
    log_h = np.log([h for h, _ in kept])
    log_e = np.log([e for _, e in kept])
    slope = float(np.polyfit(log_h, log_e, 1)[0])
    return ErrorReport(node_id=node_id or node.label(), h_values=tuple(h_list),
                       errors=tuple(errors), fitted_slope=slope)


def sweep_rows(samples):
    """CSV rows: Omega, kappa, track_id, Re_lambda, Im_lambda."""
    rows = []
    for sample in samples:
        for tid, lam in zip(sample.track_ids, sample.eigenvalues):
            rows.append((sample.Omega, sample.kappa_scale, int(tid),
                         float(lam.real), float(lam.imag)))
    return rows
