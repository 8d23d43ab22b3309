"""Rotor model data types, builders and the JSON file format.

A rotor with n doublet modes is described by 2n coordinates.  The quadratic
pencil at speed Omega is

    lam^2 I + lam (2 Omega G + delta D) + (P + Omega^2 G^2 + kappa K + nu N)

with gyroscopic G = blockdiag(J, 2J, ..., nJ), stiffness P = diag(w_s^2 twice
each), symmetric damping D, symmetric stiffness modification K and
antisymmetric circulatory N.  The perturbation matrices are stored exactly;
symmetry is enforced entrywise with zero tolerance.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field

import numpy as np


class GapConditionWarning(UserWarning):
    """Doublet spacing w_{s+1} - w_s >= w_s / s fails for some s."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def gyro_matrix(n: int) -> np.ndarray:
    """blockdiag(J, 2J, ..., nJ) with J = [[0, -1], [1, 0]]."""
    if n < 1:
        raise ValueError("mode count must be >= 1")
    g = np.zeros((2 * n, 2 * n))
    for s in range(1, n + 1):
        g[2 * s - 2, 2 * s - 1] = -s
        g[2 * s - 1, 2 * s - 2] = s
    return g


def stiffness_matrix(omegas) -> np.ndarray:
    """diag(w_1^2, w_1^2, ..., w_n^2, w_n^2)."""
    omegas = np.asarray(omegas, dtype=float)
    return np.diag(np.repeat(omegas**2, 2))


@dataclass(frozen=True)
class RotorModel:
    """Weakly anisotropic rotor: frequencies, perturbation matrices, scales."""

    omegas: tuple
    D: np.ndarray
    K: np.ndarray
    N: np.ndarray
    delta: float = 0.0
    kappa: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        omegas = tuple(float(w) for w in self.omegas)
        object.__setattr__(self, "omegas", omegas)
        n = len(omegas)
        if n < 1:
            raise ValueError("at least one doublet frequency required")
        if any(w <= 0 for w in omegas):
            raise ValueError("doublet frequencies must be positive")
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise ValueError("doublet frequencies must be strictly increasing")
        for name in ("D", "K", "N"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != (2 * n, 2 * n):
                raise ValueError(f"{name} must be {2*n}x{2*n}, got {m.shape}")
            object.__setattr__(self, name, _freeze(m))
        # symmetry invariants hold exactly as stored, no tolerance
        if not np.array_equal(self.D, self.D.T):
            raise ValueError("D must be symmetric (exact)")
        if not np.array_equal(self.K, self.K.T):
            raise ValueError("K must be symmetric (exact)")
        if not np.array_equal(self.N, -self.N.T):
            raise ValueError("N must be antisymmetric (exact)")
        gaps_ok = all(
            omegas[s] - omegas[s - 1] >= omegas[s - 1] / s - 1e-15
            for s in range(1, n)
        )
        if not gaps_ok:
            warnings.warn(
                "doublet spacing violates w_{s+1} - w_s >= w_s/s; "
                "sub/supercritical labels lose their guarantee",
                GapConditionWarning,
                stacklevel=2,
            )

    @property
    def n(self) -> int:
        return len(self.omegas)

    def with_scales(self, delta: float | None = None, kappa: float | None = None,
                    nu: float | None = None) -> "RotorModel":
        return dataclasses.replace(
            self,
            delta=self.delta if delta is None else float(delta),
            kappa=self.kappa if kappa is None else float(kappa),
            nu=self.nu if nu is None else float(nu),
        )

    def gyro(self) -> np.ndarray:
        return gyro_matrix(self.n)

    def stiffness(self) -> np.ndarray:
        return stiffness_matrix(self.omegas)


def pencil_at(model: RotorModel, Omega: float):
    """Damping/stiffness blocks (C, K_full) of the pencil at speed Omega.

    C = 2 Omega G + delta D,  K_full = P + Omega^2 G^2 + kappa K + nu N.
    The mass matrix is the identity.
    """
    g = model.gyro()
    c = 2.0 * Omega * g + model.delta * model.D
    # G^2 = blockdiag(-s^2 I2); assemble diagonally for exactness
    s_idx = np.repeat(np.arange(1, model.n + 1), 2)
    diag = np.repeat(np.asarray(model.omegas) ** 2, 2) - (Omega * s_idx) ** 2
    k_full = np.diag(diag) + model.kappa * model.K + model.nu * model.N
    return c, k_full


@dataclass(frozen=True)
class Block2x2:
    """2x2 sub-block of a 2n x 2n matrix, rows {2s-1, 2s}, cols {2t-1, 2t}."""

    m11: float
    m12: float
    m21: float
    m22: float
    s: int
    t: int

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def trace(self) -> float:
        return self.m11 + self.m22


def block(m, s: int, t: int) -> Block2x2:
    """Extract the (s, t) mode block; s, t are 1-based mode indices."""
    m = np.asarray(m)
    n = m.shape[0] // 2
    if not (1 <= s <= n and 1 <= t <= n):
        raise IndexError(f"block indices ({s}, {t}) out of range for n={n}")
    r, c = 2 * (s - 1), 2 * (t - 1)
    return Block2x2(
        float(m[r, c]), float(m[r, c + 1]), float(m[r + 1, c]), float(m[r + 1, c + 1]), s, t
    )


def shaft_model(m: float, k1: float, kappa: float = 0.0, mu1: float = 0.0,
                mu2: float = 0.0, beta: float = 0.0) -> RotorModel:
    """Two-degree-of-freedom rotating shaft on anisotropic supports.

    Mass m on springs k1 and k2 = k1 + kappa with dampers mu1, mu2 and a
    circulatory force of strength beta, mapped into the canonical pencil by
    dividing through by the mass:  w1 = sqrt(k1/m), D = diag(mu1, mu2)/m with
    delta = 1, K = diag(0, 1)/m scaled by kappa, N = [[0, 1], [-1, 0]] scaled
    by beta/m.
    """
    if m <= 0 or k1 <= 0:
        raise ValueError("mass and base stiffness must be positive")
    d = np.diag([mu1 / m, mu2 / m])
    k = np.diag([0.0, 1.0 / m])
    nmat = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return RotorModel(
        omegas=(np.sqrt(k1 / m),), D=d, K=k, N=nmat,
        delta=1.0, kappa=float(kappa), nu=beta / m,
    )


# Fig-style 6-DOF demo data: three doublets imitating a circular ring.
_K1_UPPER = {
    (1, 1): 1.0, (1, 2): 2.0, (1, 3): 1.0, (1, 4): 2.0,
    (2, 2): 1.0, (2, 3): 3.0, (2, 4): 4.0,
    (3, 3): -3.0, (4, 4): -2.5, (5, 5): 4.0, (6, 6): 2.0,
}

_D1 = np.array([
    [-1, 2, 1, 7, 2, -2],
    [2, 3, -2, -4, 3, 1],
    [1, -2, 1, 8, 2, 1],
    [7, -4, 8, 3, -2, 3],
    [2, 3, 2, -2, 5, 5],
    [-2, 1, 1, 3, 5, 6],
], dtype=float)

_N1 = np.array([
    [0, -1, 1, -1, -3, 8],
    [1, 0, 2, 3, 2, 4],
    [-1, -2, 0, 7, 1, 3],
    [1, -3, -7, 0, 8, 2],
    [3, -2, -1, -8, 0, 2],
    [-8, -4, -3, -2, -2, 0],
], dtype=float)


def example_6dof(delta: float = 0.0, kappa: float = 0.0, nu: float = 0.0) -> RotorModel:
    """Bundled three-doublet rotor (w = 1, 3, 6) with fixed D, K, N matrices.

    Only the nonzero upper-triangular entries of K are listed in the source
    data; the matrix is completed symmetrically with zeros elsewhere.
    """
    k1 = np.zeros((6, 6))
    for (i, j), v in _K1_UPPER.items():
        k1[i - 1, j - 1] = v
        k1[j - 1, i - 1] = v
    return RotorModel(omegas=(1.0, 3.0, 6.0), D=_D1, K=k1, N=_N1,
                      delta=delta, kappa=kappa, nu=nu)


BUNDLED_MODELS = {
    "6dof": example_6dof,
    "shaft": lambda: shaft_model(1.0, 4.0),
}


def load_model(path) -> RotorModel:
    """Load a model from its JSON file format; symmetry is checked exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    required = {"n", "omegas", "delta", "kappa", "nu", "D", "K", "N"}
    missing = required - set(data)
    if missing:
        raise ValueError(f"model file is missing fields: {sorted(missing)}")
    n = int(data["n"])
    omegas = [float(w) for w in data["omegas"]]
    if len(omegas) != n:
        raise ValueError(f"expected {n} frequencies, got {len(omegas)}")
    mats = {}
    for name in ("D", "K", "N"):
        m = np.array(data[name], dtype=float)
        if m.shape != (2 * n, 2 * n):
            raise ValueError(f"{name} must be a row-major {2*n}x{2*n} array")
        mats[name] = m
    return RotorModel(
        omegas=tuple(omegas), D=mats["D"], K=mats["K"], N=mats["N"],
        delta=float(data["delta"]), kappa=float(data["kappa"]), nu=float(data["nu"]),
    )


def save_model(model: RotorModel, path) -> None:
    """Write the JSON file format; floats round-trip exactly."""
    data = {
        "n": model.n,
        "omegas": list(model.omegas),
        "delta": model.delta,
        "kappa": model.kappa,
        "nu": model.nu,
        "D": model.D.tolist(),
        "K": model.K.tolist(),
        "N": model.N.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
