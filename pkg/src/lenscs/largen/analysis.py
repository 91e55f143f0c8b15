"""q-independence report, Plemelj-type limits of the coth kernel, and the Claim 1 verdict."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from ..lattice import LensSpace, build_fan, fan_automorphism
from ..mirror import curve_invariants, newton_polynomial, q1_specialization
from .saddle import Density, TooftData, cut_endpoints, empirical_density, saddle_solve

# --------------------------------------------------------------------------
# q-independence


@dataclass
class QIndependenceReport:
    p: int
    q_list: list[int]
    N: int
    t: float
    fillings: tuple[float, ...]
    kernel: str
    endpoints: dict[int, list[tuple[complex, complex]]]
    endpoint_discrepancy: float
    density_distance: float
    verdict: str
    residuals: dict[int, float] = field(default_factory=dict)
    imag_residuals: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        enc = lambda z: {"re": float(np.real(z)), "im": float(np.imag(z))}
        return {"p": self.p, "q_list": self.q_list, "N": self.N, "t": self.t,
                "fillings": list(self.fillings), "kernel": self.kernel,
                "endpoints": {str(q): [[enc(a), enc(b)] for a, b in e] for q, e in self.endpoints.items()},
                "endpoint_discrepancy": self.endpoint_discrepancy,
                "density_distance": self.density_distance, "verdict": self.verdict,
                "residuals": {str(k): v for k, v in self.residuals.items()},
                "imag_residuals": {str(k): v for k, v in self.imag_residuals.items()}}


def _middle(a: float, b: float, frac: float = 0.8, n: int = 201) -> np.ndarray:
    m, h = (a + b) / 2, (b - a) / 2
    return np.linspace(m - frac * h, m + frac * h, n)


def density_sup_distance(d1: Density, d2: Density, frac: float = 0.8) -> float:
    """sup |d1 - d2| over the middle ``frac`` of the common support, relative to max d2."""
    a = max(d1.support[0], d2.support[0])
    b = min(d1.support[1], d2.support[1])
    if b <= a:
        return math.inf
    xs = _middle(a, b, frac)
    ref = float(np.max(d2(xs)))
    return float(np.max(np.abs(d1(xs) - d2(xs)))) / ref if ref > 0 else math.inf


def q_independence_test(p: int, q_list: Sequence[int], N: int, t: float, S0: float | None = None,
                        fillings: Sequence[float] | None = None, kernel: str = "real",
                        endpoint_tol: float = 0.01, density_tol: float = 0.02) -> QIndependenceReport:
    """Solve the saddle equations for each q at identical (p, N, t, fillings) and compare.

    The endpoint discrepancy is the largest pairwise endpoint difference
    divided by the cut half-length; the density distance is the largest
    pairwise sup-distance on the middle 80% of each cut relative to the peak.
    The verdict is PASS/FAIL on the symmetric slice and REPORT elsewhere.
    """
    td = TooftData(t, tuple(fillings)) if fillings is not None else TooftData.symmetric(p, t, S0)
    cfgs = {q: saddle_solve(LensSpace(p, q), N, t, td, kernel=kernel) for q in q_list}
    ends = {q: [cut_endpoints(g) for g in c.groups] for q, c in cfgs.items()}
    e_disc = 0.0
    d_dist = 0.0
    for q1, q2 in itertools.combinations(q_list, 2):
        for I in range(p):
            if not len(cfgs[q1].groups[I]):
                continue
            (a1, b1), (a2, b2) = ends[q1][I], ends[q2][I]
            half = abs(b2 - a2) / 2
            e_disc = max(e_disc, max(abs(a1 - a2), abs(b1 - b2)) / half)
            if kernel == "real" and len(cfgs[q1].groups[I]) >= 3:
                d1 = empirical_density(cfgs[q1], I)
                d2 = empirical_density(cfgs[q2], I)
                d_dist = max(d_dist, density_sup_distance(d1, d2), density_sup_distance(d2, d1))
    if td.is_symmetric:
        ok = e_disc < endpoint_tol and d_dist < density_tol
        verdict = "PASS" if ok else "FAIL"
    else:
        verdict = "REPORT"
    return QIndependenceReport(p, list(q_list), N, t, td.fillings, kernel, ends, e_disc, d_dist, verdict,
                               {q: c.residual for q, c in cfgs.items()},
                               {q: c.imag_residual for q, c in cfgs.items()})


# --------------------------------------------------------------------------
# Sokhotski-Plemelj for the coth kernel


@dataclass
class SokhotskiResult:
    eps: tuple[float, ...]
    sum_errors: list[float]
    diff_errors: list[float]
    extrapolated_error: float

    def to_dict(self) -> dict:
        return {"eps": list(self.eps), "sum_errors": self.sum_errors,
                "diff_errors": self.diff_errors, "extrapolated_error": self.extrapolated_error}


def gaussian_bump(sigma: float = 0.3, mass: float = 1.0, width: float = 8.0) -> Density:
    """Gaussian of the given mass, truncated to +-width*sigma."""
    L = width * sigma
    x = np.linspace(-L, L, 2001)
    f = lambda y: mass * np.exp(-np.asarray(y) ** 2 / (2 * sigma ** 2)) / (sigma * math.sqrt(2 * math.pi))
    return Density((-L, L), x, f(x), mass, func=f)


def _coth_minus_pole(w):
    # coth(w) - 1/w, regular at w = 0
    w = complex(w)
    if abs(w) < 1e-4:
        return w / 3 - w ** 3 / 45
    return 1 / np.tanh(w) - 1 / w


def _cquad(f, a, b, points=None) -> complex:
    kw = dict(limit=400, epsabs=1e-12, epsrel=1e-10)
    if points is not None:
        kw["points"] = points
    re = quad(lambda y: f(y).real, a, b, **kw)[0]
    im = quad(lambda y: f(y).imag, a, b, **kw)[0]
    return complex(re, im)


def _regularised(rho: Callable, a: float, b: float, x: float, eps: float) -> complex:
    """int rho(y) coth(x - y + i eps) dy with the 1/w pole handled analytically."""
    smooth = _cquad(lambda y: rho(y) * _coth_minus_pole(x - y + 1j * eps), a, b, points=[x])
    rx = rho(x)
    sub = _cquad(lambda y: (rho(y) - rx) / (x - y + 1j * eps), a, b, points=[x])
    log = rx * (np.log(x - a + 1j * eps) - np.log(x - b + 1j * eps))
    return smooth + sub + log


def _principal_value(rho: Callable, a: float, b: float, x: float) -> float:
    smooth = quad(lambda y: rho(y) * _coth_minus_pole(x - y).real, a, b, points=[x], limit=400,
                  epsabs=1e-12, epsrel=1e-10)[0]
    # quad's cauchy weight gives pv int f(y)/(y - x)
    pv = quad(rho, a, b, weight="cauchy", wvar=x, epsabs=1e-12, epsrel=1e-10, limit=400)[0]
    return smooth - pv


def sokhotski_check(density: Density | tuple[Callable, tuple[float, float]],
                    x_points: Sequence[float] | None = None,
                    eps: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> SokhotskiResult:
    """Check coth_+ + coth_- -> 2 pv coth and coth_+ - coth_- -> -2 pi i delta against a density.

    coth_+- means coth(x - y +- i eps) convolved with rho(y).  The error of
    each identity is measured at every eps, then the two smallest eps are
    combined by Richardson extrapolation (the approach is linear in eps).
    """
    if isinstance(density, Density):
        rho, (a, b) = (lambda y: float(density(y))), density.support
    else:
        rho, (a, b) = density
    if x_points is None:
        x_points = np.linspace(a, b, 7)[1:-1]
    eps = tuple(sorted(eps, reverse=True))
    sum_err, diff_err = [], []
    vals = []
    targets = []
    for x in x_points:
        targets.append((2 * _principal_value(rho, a, b, x), -2j * math.pi * float(rho(x))))
    for e in eps:
        row = []
        se = de = 0.0
        for x, (ts, td) in zip(x_points, targets):
            Fp = _regularised(rho, a, b, x, e)
            Fm = _regularised(rho, a, b, x, -e)
            s, d = Fp + Fm, Fp - Fm
            row.append((s, d))
            se = max(se, abs(s - ts))
            de = max(de, abs(d - td))
        vals.append(row)
        sum_err.append(se)
        diff_err.append(de)
    e1, e2 = eps[-2], eps[-1]
    extrap = 0.0
    for k, (ts, td) in enumerate(targets):
        for m, target in ((0, ts), (1, td)):
            v1, v2 = vals[-2][k][m], vals[-1][k][m]
            v0 = (e1 * v2 - e2 * v1) / (e1 - e2)
            extrap = max(extrap, abs(v0 - target))
    return SokhotskiResult(eps, [float(v) for v in sum_err], [float(v) for v in diff_err], float(extrap))


# --------------------------------------------------------------------------
# Claim 1


@dataclass(frozen=True)
class Claim1Verdict:
    p: int
    q: int
    verdict: str
    lattice_width: int
    genus: int
    punctures: int
    hyperelliptic_family: bool
    constrained_genus: int
    constrained_width: int
    equivalent_to_q1: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def claim1_report(p: int, q: int) -> Claim1Verdict:
    """Compare the Hori-Vafa support of L(p,q) with the q-independent constrained family.

    The constrained large-N curve is hyperelliptic of genus p-1 for every q;
    such a member exists inside the Hori-Vafa family only when the Newton
    polygon has lattice width 2, which happens exactly for q = 1, p-1.
    """
    ls = LensSpace(p, q)
    inv = curve_invariants(newton_polynomial(ls))
    cons = curve_invariants(q1_specialization(p, 1))
    consistent = inv.hyperelliptic_family and inv.genus == cons.genus
    if p > 2 and q != 1:
        equiv = fan_automorphism(build_fan(ls), build_fan(LensSpace(p, 1))) is not None
    else:
        equiv = q == 1 or p == 2
    return Claim1Verdict(p, q, "DUALITY-CONSISTENT" if consistent else "OBSTRUCTED",
                         inv.lattice_width, inv.genus, inv.punctures, inv.hyperelliptic_family,
                         cons.genus, cons.lattice_width, equiv)
