"""Finite-N equilibrium of the multi-group log gas and density extraction.

Eigenvalue i sits in group I_i (the flat-connection block).  The discrete
saddle equations are

    p lam_i = (t/N) sum_{j != i} h_ij(lam_i - lam_j),
    h_ij(x) = (coth(x/2 + i th_ij) + coth(x/2 + i q th_ij)) / 2,  th_ij = pi (I_i - I_j)/p.

The real solver keeps Re h, which is the closed form
sinh x / (cosh x - cos 2th).  The imaginary remainder vanishes at a genuine
real saddle and is reported as a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ai_zeros

from ..errors import ConvergenceError, DegenerateInput
from ..lattice import LensSpace


@dataclass(frozen=True)
class TooftData:
    t: float
    fillings: tuple[float, ...]

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        f = tuple(float(s) for s in self.fillings)
        if any(s < 0 for s in f):
            raise ValueError("fillings must be non-negative")
        if abs(sum(f) - self.t) > 1e-9 * max(1.0, self.t):
            raise ValueError(f"fillings sum to {sum(f)}, expected t={self.t}")
        object.__setattr__(self, "fillings", f)

    @classmethod
    def symmetric(cls, p: int, t: float, S0: float | None = None) -> "TooftData":
        """S_0 = S0 and S_1 = ... = S_{p-1} = (t - S0)/(p - 1)."""
        if p == 1:
            return cls(t, (t,))
        S0 = t / p if S0 is None else S0
        if not 0 <= S0 <= t:
            raise ValueError("need 0 <= S0 <= t")
        return cls(t, (S0,) + ((t - S0) / (p - 1),) * (p - 1))

    @property
    def p(self) -> int:
        return len(self.fillings)

    @property
    def is_symmetric(self) -> bool:
        rest = self.fillings[1:]
        return all(abs(s - rest[0]) <= 1e-12 * self.t for s in rest) if rest else True

    def group_sizes(self, N: int) -> list[int]:
        """Integer group sizes summing to N.

        On the symmetric slice N_1 = ... = N_{p-1} is kept exactly (the
        remainder goes to group 0); otherwise largest-remainder rounding.
        """
        p = self.p
        if p > 1 and self.is_symmetric:
            n1 = int(round(N * self.fillings[1] / self.t))
            n1 = min(n1, N // (p - 1))
            return [N - (p - 1) * n1] + [n1] * (p - 1)
        raw = [N * s / self.t for s in self.fillings]
        sizes = [int(math.floor(r)) for r in raw]
        order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - sizes[i]), i))
        for i in order[: N - sum(sizes)]:
            sizes[i] += 1
        return sizes


@dataclass
class EquilibriumConfig:
    p: int
    q: int
    N: int
    t: float
    fillings: tuple[float, ...]
    groups: list[np.ndarray]
    residual: float
    imag_residual: float
    iterations: int
    kernel: str = "real"
    meta: dict = field(default_factory=dict)

    @property
    def effective_fillings(self) -> tuple[float, ...]:
        """t N_I / N, the fillings actually represented at this N."""
        return tuple(self.t * len(g) / self.N for g in self.groups)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate(self.groups) if self.groups else np.empty(0)

    def parity_defect(self) -> float:
        """max over groups of |sorted(lam) + sorted(-lam)|."""
        out = 0.0
        for g in self.groups:
            if len(g):
                s = np.sort_complex(g) if np.iscomplexobj(g) else np.sort(g)
                out = max(out, float(np.max(np.abs(s.real + s.real[::-1]))))
        return out

    def to_dict(self) -> dict:
        def enc(g):
            if np.iscomplexobj(g):
                return [{"re": float(z.real), "im": float(z.imag)} for z in g]
            return [float(x) for x in g]
        return {"p": self.p, "q": self.q, "N": self.N, "t": self.t,
                "fillings": list(self.fillings),
                "effective_fillings": list(self.effective_fillings), "kernel": self.kernel,
                "residual": self.residual, "imag_residual": self.imag_residual,
                "iterations": self.iterations,
                "groups": [enc(g) for g in self.groups]}


def _pair_cosines(labels: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    th = math.pi * (labels[:, None] - labels[None, :]) / p
    return th, np.cos(2 * th), np.cos(2 * q * th)


def _real_kernel(x, c):
    return np.sinh(x) / (np.cosh(x) - c)


def _real_kernel_prime(x, c):
    ch = np.cosh(x)
    return (1 - c * ch) / (ch - c) ** 2


class _System:
    """Force and jacobian of the discrete saddle equations."""

    def __init__(self, labels: np.ndarray, p: int, q: int, N: int, t: float):
        self.labels, self.p, self.q, self.N, self.t = labels, p, q, N, t
        self.th, self.c1, self.c2 = _pair_cosines(labels.astype(float), p, q)
        self.off = ~np.eye(len(labels), dtype=bool)

    def _dx(self, lam):
        x = lam[:, None] - lam[None, :]
        return np.where(self.off, x, 1.0)

    def force(self, lam: np.ndarray) -> np.ndarray:
        x = self._dx(lam)
        with np.errstate(over="ignore", invalid="ignore"):
            h = 0.5 * (_real_kernel(x, self.c1) + _real_kernel(x, self.c2))
        h = np.where(self.off, h, 0.0)
        return self.p * lam - self.t / self.N * h.sum(axis=1)

    def jacobian(self, lam: np.ndarray) -> np.ndarray:
        x = self._dx(lam)
        with np.errstate(over="ignore", invalid="ignore"):
            hp = 0.5 * (_real_kernel_prime(x, self.c1) + _real_kernel_prime(x, self.c2))
        hp = np.where(self.off, hp, 0.0)
        J = self.t / self.N * hp
        J[np.diag_indices_from(J)] = self.p - self.t / self.N * hp.sum(axis=1)
        return J

    def imag_force(self, lam: np.ndarray) -> np.ndarray:
        """Imaginary part of the full holomorphic force at real positions."""
        x = self._dx(lam) / 2
        with np.errstate(over="ignore", invalid="ignore"):
            h = 0.5 * (1 / np.tanh(x + 1j * self.th) + 1 / np.tanh(x + 1j * self.q * self.th))
        h = np.where(self.off, h, 0.0)
        return -self.t / self.N * h.imag.sum(axis=1)

    # holomorphic version for complex refinement
    def complex_force(self, lam: np.ndarray) -> np.ndarray:
        x = self._dx(lam) / 2
        h = 0.5 * (1 / np.tanh(x + 1j * self.th) + 1 / np.tanh(x + 1j * self.q * self.th))
        h = np.where(self.off, h, 0.0)
        return self.p * lam - self.t / self.N * h.sum(axis=1)

    def complex_jacobian(self, lam: np.ndarray) -> np.ndarray:
        x = self._dx(lam) / 2
        hp = -0.25 * (1 / np.sinh(x + 1j * self.th) ** 2 + 1 / np.sinh(x + 1j * self.q * self.th) ** 2)
        hp = np.where(self.off, hp, 0.0)
        J = self.t / self.N * hp
        J[np.diag_indices_from(J)] = self.p - self.t / self.N * hp.sum(axis=1)
        return J


def semicircle_quantiles(n: int) -> np.ndarray:
    """Points x_k in (-1, 1) with F(x_k) = (k - 1/2)/n for the unit semicircle law."""
    target = (np.arange(1, n + 1) - 0.5) / n
    lo, hi = -np.ones(n), np.ones(n)
    for _ in range(60):
        mid = (lo + hi) / 2
        F = 0.5 + (mid * np.sqrt(1 - mid * mid) + np.arcsin(mid)) / math.pi
        lo = np.where(F < target, mid, lo)
        hi = np.where(F < target, hi, mid)
    return (lo + hi) / 2


def _initial(sizes: Sequence[int], fillings: Sequence[float], p: int) -> tuple[np.ndarray, np.ndarray]:
    lam, labels = [], []
    for I, (n, S) in enumerate(zip(sizes, fillings)):
        if n == 0:
            continue
        R = 2 * math.sqrt(max(S, 1e-12) / p)
        lam.append(R * semicircle_quantiles(n))
        labels.append(np.full(n, I))
    return np.concatenate(lam), np.concatenate(labels)


def _newton(sys_, lam, labels, tol, max_iter, force, jac, norm):
    # the within-group ordering of the start must persist: a swap means a collision
    orders = {I: np.argsort(lam[labels == I].real) for I in np.unique(labels)}

    def ok(v):
        for I, o in orders.items():
            if np.any(np.diff(v[labels == I].real[o]) <= 0):
                return False
        return True

    F = force(lam)
    res = norm(F)
    it = 0
    while res > tol:
        if it >= max_iter:
            raise ConvergenceError(f"saddle solver stalled at residual {res:.3e} after {it} iterations")
        step = np.linalg.solve(jac(lam), -F)
        alpha = 1.0
        while True:
            trial = lam + alpha * step
            if ok(trial):
                Ft = force(trial)
                rt = norm(Ft)
                if np.isfinite(rt) and rt < res:
                    break
            alpha /= 2
            if alpha < 1e-10:
                raise ConvergenceError("damped Newton could not decrease the residual")
        lam, F, res = trial, Ft, rt
        it += 1
    return lam, res, it


def saddle_solve(ls: LensSpace, N: int, t: float, fillings: Sequence[float] | TooftData | None = None,
                 tol: float = 1e-10, max_iter: int = 200, kernel: str = "real",
                 allow_p1: bool = False) -> EquilibriumConfig:
    """Damped Newton solution of the finite-N saddle equations.

    ``fillings`` defaults to the fully symmetric point S_I = t/p.  With
    ``kernel="complex"`` the real solution is refined with the holomorphic
    force, letting eigenvalues leave the real axis when the fillings do not
    cancel the imaginary parts.
    """
    p, q = ls.p, ls.q
    if isinstance(fillings, TooftData):
        td = fillings
    elif fillings is None:
        td = TooftData.symmetric(p, t)
    else:
        td = TooftData(t, tuple(fillings))
    if td.p != p:
        raise ValueError(f"expected {p} fillings, got {td.p}")
    if N < 2 * p and not allow_p1:
        raise ValueError(f"need N >= 2p = {2 * p}")
    sizes = td.group_sizes(N)
    lam, labels = _initial(sizes, td.fillings, p)
    sys_ = _System(labels, p, q, N, t)
    maxnorm = lambda F: float(np.max(np.abs(F)))
    lam, res, it = _newton(sys_, lam, labels, tol, max_iter, sys_.force, sys_.jacobian, maxnorm)
    imag = float(np.max(np.abs(sys_.imag_force(lam))))
    if kernel == "complex":
        lam, res, it2 = _newton(sys_, lam.astype(complex), labels, tol, max_iter,
                                sys_.complex_force, sys_.complex_jacobian, maxnorm)
        it += it2
        imag = 0.0
    elif kernel != "real":
        raise ValueError(f"unknown kernel {kernel!r}")
    groups = []
    for I in range(p):
        g = lam[labels == I]
        groups.append(g[np.argsort(g.real)])
    return EquilibriumConfig(p, q, N, t, td.fillings, groups, res, imag, it, kernel,
                             meta={"sizes": sizes})


def saddle_energy(cfg: EquilibriumConfig) -> float:
    """Discrete action whose real-kernel gradient is the saddle force."""
    lam = cfg.eigenvalues.real
    labels = np.concatenate([np.full(len(g), I) for I, g in enumerate(cfg.groups)])
    _, c1, c2 = _pair_cosines(labels.astype(float), cfg.p, cfg.q)
    iu = np.triu_indices(len(lam), 1)
    x = (lam[:, None] - lam[None, :])[iu]
    pair = 0.5 * (np.log(np.cosh(x) - c1[iu]) + np.log(np.cosh(x) - c2[iu]))
    return float(cfg.p * np.sum(lam ** 2) / 2 - cfg.t / cfg.N * np.sum(pair))


# --------------------------------------------------------------------------
# densities

@dataclass(frozen=True)
class Density:
    support: tuple[float, float]
    grid: np.ndarray
    values: np.ndarray
    mass: float
    group: int = 0
    # exact profile when one is known; the grid then only serves plotting
    func: Callable | None = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        if self.func is not None:
            a, b = self.support
            x = np.asarray(x, dtype=float)
            return np.where((x >= a) & (x <= b), self.func(x), 0.0)
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))

    def to_dict(self) -> dict:
        return {"group": self.group, "support": list(self.support), "mass": self.mass,
                "grid": self.grid.tolist(), "values": self.values.tolist()}


def cut_endpoints(eigs: np.ndarray, n_fit: int = 4):
    """Continuum edges from a least-squares Airy fit of the outermost eigenvalues.

    Near a soft edge the k-th eigenvalue sits at a + c a_k with a_k the k-th
    zero of Ai; fitting (a, c) to the n_fit outermost points on each side
    removes the N^{-2/3} offset of the extreme eigenvalue.  Complex
    eigenvalues (curved cuts) are fitted with complex (a, c) after sorting
    by real part.
    """
    x = np.asarray(eigs)
    x = x[np.argsort(x.real)]
    cast = complex if np.iscomplexobj(x) else float
    if len(x) < 2 * n_fit:
        return cast(x[0]), cast(x[-1])
    ak = ai_zeros(n_fit)[0]
    A = np.column_stack([np.ones(n_fit), ak]).astype(x.dtype)
    right = np.linalg.lstsq(A, x[::-1][:n_fit], rcond=None)[0][0]
    left = np.linalg.lstsq(A, -x[:n_fit], rcond=None)[0][0]
    return cast(-left), cast(right)


def extrapolated_endpoints(cfg: EquilibriumConfig, cfg2: EquilibriumConfig, group: int):
    """Richardson combination 2 e(2N) - e(N) of Airy-fitted edges.

    The fitted edges of an n-point group approach the continuum endpoints
    as 1/n; ``cfg2`` must be the same problem at twice the rank.
    """
    if cfg2.N != 2 * cfg.N:
        raise ValueError("cfg2 must have twice the rank of cfg")
    a1, b1 = cut_endpoints(cfg.groups[group])
    a2, b2 = cut_endpoints(cfg2.groups[group])
    return 2 * a2 - a1, 2 * b2 - b1


def empirical_density(cfg: EquilibriumConfig, group: int, n_grid: int = 401) -> Density:
    """Spacing estimator tied to square-root edges, normalised to S_I.

    Between neighbours the density is (t/N)/(gap), placed at the midpoint.
    Beyond the outermost midpoints it decays as sqrt(distance to the Airy
    fitted edge).  The result is rescaled so it integrates to S_I.
    """
    g = np.asarray(cfg.groups[group])
    if len(g) == 0:
        raise DegenerateInput(f"group {group} is empty")
    S = cfg.effective_fillings[group]
    lam = np.sort(g.real)
    if len(lam) < 3:
        raise DegenerateInput(f"group {group} has too few eigenvalues for a density")
    a, b = cut_endpoints(lam)
    mids = (lam[1:] + lam[:-1]) / 2
    vals = cfg.t / cfg.N / np.diff(lam)
    x = np.linspace(a, b, n_grid)
    y = np.interp(x, mids, vals)
    lo, hi = x < mids[0], x > mids[-1]
    y[lo] = vals[0] * np.sqrt(np.clip((x[lo] - a) / (mids[0] - a), 0, None))
    y[hi] = vals[-1] * np.sqrt(np.clip((b - x[hi]) / (b - mids[-1]), 0, None))
    y *= S / np.trapezoid(y, x)
    return Density((a, b), x, y, S, group)


def solve_rank_pair(ls: LensSpace, N: int, t: float, fillings=None, **kw):
    """Solve at rank N and at 2N with the effective fillings of the first solve.

    Reusing the represented fillings makes the group sizes double exactly,
    which is what :func:`extrapolated_endpoints` needs.
    """
    cfg = saddle_solve(ls, N, t, fillings, **kw)
    cfg2 = saddle_solve(ls, 2 * N, t, cfg.effective_fillings, **kw)
    if [2 * len(g) for g in cfg.groups] != [len(g) for g in cfg2.groups]:
        raise DegenerateInput("group sizes did not double")
    return cfg, cfg2
