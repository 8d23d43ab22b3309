"""Analytic spectral mesh of the isotropic rotor.

Every unperturbed eigenvalue lies on a straight branch

    lam(Omega) = i (alpha w_s + eps s Omega),   alpha, eps in {+1, -1},

so the Campbell diagram is a mesh of lines whose crossings (nodes) carry
double semi-simple eigenvalues.  The symplectic (Krein) signature of a branch
equals alpha and decides how a node unfolds under perturbation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import eig_dense, qep_linearize
from .model import RotorModel, pencil_at

SIGNS = (1, -1)


@dataclass(frozen=True, order=True)
class Branch:
    """Mesh line labelled by mode index s and the two signs (alpha, eps)."""

    s: int
    alpha: int
    eps: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("mode index must be >= 1")
        if self.alpha not in SIGNS or self.eps not in SIGNS:
            raise ValueError("alpha and eps must be +1 or -1")

    @property
    def signature(self) -> int:
        return self.alpha

    def label(self) -> str:
        return f"{self.s}{'+' if self.alpha > 0 else '-'}{'+' if self.eps > 0 else '-'}"


def branch_value(branch: Branch, omega_s: float, Omega: float) -> complex:
    """i (alpha w_s + eps s Omega)."""
    if omega_s <= 0:
        raise ValueError("doublet frequency must be positive")
    return 1j * (branch.alpha * omega_s + branch.eps * branch.s * Omega)


def doublet_eigenvectors(s: int, n: int):
    """Eigenvector pair of the standstill doublet for mode s (1-based).

    u_plus carries -i at entry 2s-1 and 1 at entry 2s; u_minus is its
    conjugate.  u_plus belongs to eps = +1 branches, u_minus to eps = -1.
    """
    if not 1 <= s <= n:
        raise IndexError(f"mode index {s} out of range for n={n}")
    u = np.zeros(2 * n, dtype=complex)
    u[2 * s - 2] = -1j
    u[2 * s - 1] = 1.0
    return u, np.conj(u)


def branch_eigenvector(branch: Branch, n: int) -> np.ndarray:
    u_plus, u_minus = doublet_eigenvectors(branch.s, n)
    return u_plus if branch.eps > 0 else u_minus


def critical_speeds(omegas):
    """(w_1/1, w_2/2, ..., w_n/n); the minimum is the critical speed."""
    return [float(w) / s for s, w in enumerate(omegas, start=1)]


@dataclass(frozen=True)
class Node:
    """Crossing of two mesh branches at (Omega0, omega0)."""

    Omega0: float
    omega0: float
    branch_a: Branch
    branch_b: Branch
    sig_product: int
    regime: str
    clustered: bool = False

    def label(self) -> str:
        return f"{self.branch_a.label()}x{self.branch_b.label()}"

    @property
    def s(self) -> int:
        return self.branch_a.s

    @property
    def t(self) -> int:
        return self.branch_b.s


def crossing_point(a: Branch, b: Branch, omegas):
    """(Omega0, omega0) where two branches meet; None for parallel lines."""
    ws, wt = omegas[a.s - 1], omegas[b.s - 1]
    denom = b.eps * b.s - a.eps * a.s
    if denom == 0:
        return None
    Omega0 = (a.alpha * ws - b.alpha * wt) / denom + 0.0  # normalize -0.0
    omega0 = (a.alpha * b.eps * ws * b.s - b.alpha * a.eps * wt * a.s) / denom + 0.0
    return Omega0, omega0


def _regime(Omega0: float, omega0: float, omega1: float, tol: float = 1e-12) -> str:
    if abs(omega0) <= tol:
        return "critical"
    return "subcritical" if abs(Omega0) < omega1 else "supercritical"


def all_branches(n: int):
    return [Branch(s, a, e) for s in range(1, n + 1) for a in SIGNS for e in SIGNS]


def enumerate_nodes(omegas, Omega_range=(-np.inf, np.inf),
                    include_negative_frequency: bool = False, tol: float = 1e-10):
    """All pairwise branch crossings with Omega0 inside the given interval.

    Each unordered branch pair is reported once.  Distinct pairs that land on
    the same point (Omega0, omega0) are kept as separate nodes and flagged as
    clustered, since the pairwise 2x2 reduction ignores the extra branches.
    By default only crossings in the upper half-plane (omega0 >= 0) are
    returned, matching the Campbell-diagram view.
    """
    omegas = [float(w) for w in omegas]
    lo, hi = Omega_range
    if not lo <= hi:
        raise ValueError("Omega_range must be an ordered interval")
    branches = all_branches(len(omegas))
    raw = []
    for i, a in enumerate(branches):
        for b in branches[i + 1:]:
            pt = crossing_point(a, b, omegas)
            if pt is None:
                continue
            Omega0, omega0 = pt
            if not (lo <= Omega0 <= hi):
                continue
            if not include_negative_frequency and omega0 < -tol:
                continue
            raw.append((Omega0, omega0, a, b))
    raw.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    clustered = [False] * len(raw)
    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            same = (abs(raw[i][0] - raw[j][0]) <= tol * max(1.0, abs(raw[i][0]))
                    and abs(raw[i][1] - raw[j][1]) <= tol * max(1.0, abs(raw[i][1])))
            if same:
                clustered[i] = clustered[j] = True
    nodes = []
    for flag, (Omega0, omega0, a, b) in zip(clustered, raw):
        nodes.append(Node(
            Omega0=Omega0, omega0=omega0, branch_a=a, branch_b=b,
            sig_product=a.alpha * b.alpha,
            regime=_regime(Omega0, omega0, omegas[0]),
            clustered=flag,
        ))
    return nodes


def find_node(nodes, Omega0: float, omega0: float, tol: float = 1e-9) -> Node:
    """Node matching the given crossing coordinates (convenience lookup)."""
    hits = [nd for nd in nodes
            if abs(nd.Omega0 - Omega0) <= tol and abs(nd.omega0 - omega0) <= tol]
    if not hits:
        raise LookupError(f"no node at ({Omega0}, {omega0})")
    if len(hits) > 1:
        warnings.warn(f"{len(hits)} nodes share ({Omega0}, {omega0}); returning the first")
    return hits[0]


def _phase_space_form(n: int) -> np.ndarray:
    """[[0, -I], [I, 0]] of size 4n acting on (x, dx/dt + Omega G x)."""
    eye = np.eye(2 * n)
    z = np.zeros((2 * n, 2 * n))
    return np.block([[z, -eye], [eye, z]])


def krein_product(model: RotorModel, Omega: float, lam: complex, x) -> float:
    """Indefinite product i [a, a] with a = (x, lam x + Omega G x).

    Real by construction; with the standstill eigenvectors scaled to
    ||x||^2 = 2 it evaluates to +-4 w_s for the doublet branches.
    """
    x = np.asarray(x, dtype=complex)
    g = model.gyro()
    a = np.concatenate([x, lam * x + Omega * (g @ x)])
    j = _phase_space_form(model.n)
    val = 1j * (np.conj(a) @ (j @ a))
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise ArithmeticError("indefinite product is not real; eigenpair is inconsistent")
    return float(val.real)


def krein_signature(model: RotorModel, Omega: float, lam: complex, x,
                    tol: float = 1e-8) -> int:
    """Sign of the indefinite product for a pure-imaginary eigenpair.

    Only defined for the Hamiltonian case (all perturbation scales zero) and
    away from zero eigenvalues; a near-zero product signals a degenerate or
    non-Hamiltonian input and raises.
    """
    if model.delta != 0.0 or model.kappa != 0.0 or model.nu != 0.0:
        raise ValueError("Krein signature requires delta = kappa = nu = 0")
    if abs(lam.imag) <= tol:
        raise ValueError("signature undefined for (near-)zero eigenvalues")
    x = np.asarray(x, dtype=complex)
    val = krein_product(model, Omega, lam, x)
    if abs(val) < tol * float(np.vdot(x, x).real):
        raise ArithmeticError(
            f"indefinite product {val:.3e} is numerically zero; "
            "degenerate or non-Hamiltonian input"
        )
    return 1 if val > 0 else -1


def branch_eigenpair(model: RotorModel, Omega: float, branch: Branch):
    """Exact eigenpair of the unperturbed pencil tracking the given branch.

    Matches by nearest eigenvalue to the analytic branch value; ties within
    1e-9 are broken by eigenvector overlap with the standstill doublet vector.
    """
    target = branch_value(branch, model.omegas[branch.s - 1], Omega)
    c, k = pencil_at(model, Omega)
    dec = eig_dense(qep_linearize(np.eye(2 * model.n), c, k))
    dist = np.abs(dec.eigenvalues - target)
    order = np.argsort(dist)
    best = [int(order[0])]
    for idx in order[1:]:
        if dist[idx] - dist[best[0]] <= 1e-9:
            best.append(int(idx))
        else:
            break
    if len(best) > 1:
        u = branch_eigenvector(branch, model.n)
        overlaps = [abs(np.vdot(u, dec.eigenvectors[: 2 * model.n, i])) for i in best]
        choice = best[int(np.argmax(overlaps))]
    else:
        choice = best[0]
    lam = dec.eigenvalues[choice]
    x = dec.eigenvectors[: 2 * model.n, choice]
    return lam, x


def sample_branches(omegas, Omega_grid, upper_half_plane: bool = True):
    """Mesh samples as (Omega, s, alpha, eps, Im lam) rows for CSV emission."""
    rows = []
    for b in all_branches(len(omegas)):
        w = omegas[b.s - 1]
        for Omega in Omega_grid:
            im = branch_value(b, w, Omega).imag
            if upper_half_plane and im < 0:
                continue
            rows.append((float(Omega), b.s, b.alpha, b.eps, float(im)))
    return rows
