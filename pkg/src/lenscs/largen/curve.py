"""Constrained spectral curve for q=1 and its periods.

Eigenvalues of group J are placed at z = lam + 2 pi i J/p on the cylinder
(Im z mod 2 pi).  The resolvent

    omega(z) = t int rho(w) coth((z - w)/2) dw

tends to -t as Re z -> -inf and +t as Re z -> +inf.  On cut J the saddle
equation reads omega_+ + omega_- = 2pz - 4 pi i J, so X = exp(omega/2)
obeys X_+ X_- = Z^p with Z = e^z, and g = X + Z^p/X is a polynomial:

    g(Z) = e^{-t/2} (1 + sum_{n=1}^{p-1} d_n Z^n + Z^p).

The jump omega_+ - omega_- = -4 pi i t rho gives the local density
sigma = t rho = arccos(+-g/(2 Z^{p/2}))/pi, and the A-period of cut J is

    S_J = (1/(4 pi i)) oint omega dz = -(1/(2 pi i)) oint z X'(z)/X(z) dz.

The Hori-Vafa form of the same curve has coefficients -d_n (see
:meth:`SpectralCurveQ1.hori_vafa_coefficients`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from ..errors import ConvergenceError, DegenerateInput
from .saddle import Density


@dataclass(frozen=True)
class SpectralCurveQ1:
    p: int
    t: float
    d: tuple[float, ...]

    def __post_init__(self):
        if len(self.d) != self.p - 1:
            raise ValueError(f"need p-1 = {self.p - 1} coefficients")
        object.__setattr__(self, "d", tuple(float(x) for x in self.d))

    # polynomial data --------------------------------------------------------
    def g_coefficients(self) -> np.ndarray:
        """Coefficients of g in increasing powers of Z."""
        return math.exp(-self.t / 2) * np.array([1.0, *self.d, 1.0])

    def g(self, Z):
        return np.polynomial.polynomial.polyval(Z, self.g_coefficients())

    def g_prime(self, Z):
        return np.polynomial.polynomial.polyval(Z, np.polynomial.polynomial.polyder(self.g_coefficients()))

    def discriminant_poly(self) -> np.ndarray:
        """g^2 - 4 Z^p, increasing powers."""
        P = np.polynomial.polynomial.polymul(self.g_coefficients(), self.g_coefficients())
        P[self.p] -= 4.0
        return P

    def hori_vafa_coefficients(self) -> list[float]:
        """d_n entering (e^v-1)(e^{pu+v}-1) + e^t - 1 + e^v sum d_n e^{nu}."""
        return [-x for x in self.d]

    def is_smooth(self, tol: float = 1e-10) -> bool:
        r = np.polynomial.polynomial.polyroots(self.discriminant_poly())
        gaps = np.abs(r[:, None] - r[None, :]) + np.eye(len(r))
        return bool(np.min(gaps) > tol)

    # cuts --------------------------------------------------------------------
    def branch_points(self) -> list[tuple[complex, complex]]:
        """Pairs of branch points in the z-plane, cut J placed near Im z = 2 pi J/p.

        Each pair is ordered by real part.
        """
        p = self.p
        roots = np.polynomial.polynomial.polyroots(self.discriminant_poly())
        if np.any(np.abs(roots) < 1e-300):
            raise DegenerateInput("branch point at Z=0")
        z = np.log(roots.astype(complex))
        cuts: list[list[complex]] = [[] for _ in range(p)]
        for w in z:
            J = int(round(w.imag * p / (2 * math.pi))) % p
            centre = 2 * math.pi * J / p
            k = round((centre - w.imag) / (2 * math.pi))
            cuts[J].append(complex(w.real, w.imag + 2 * math.pi * k))
        if any(len(c) != 2 for c in cuts):
            raise DegenerateInput(f"branch points do not pair into {p} cuts: {[len(c) for c in cuts]}")
        return [tuple(sorted(c, key=lambda w: w.real)) for c in cuts]

    def c_function(self, z):
        """g(e^z) / (2 e^{pz/2})."""
        z = np.asarray(z, dtype=complex)
        return self.g(np.exp(z)) / (2 * np.exp(self.p * z / 2))

    def _sign(self, J: int) -> float:
        # sign s with s*c = +1 at the branch points of cut J
        a, _ = self.branch_points()[J]
        return float(np.sign(self.c_function(a).real)) or 1.0

    def density(self, J: int, x):
        """sigma_J(x) = arccos(s c(x + 2 pi i J/p))/pi along the straight cut of group J.

        ``x`` is the real coordinate on the cut (the eigenvalue lam).
        """
        s = self._sign(J)
        c = s * self.c_function(np.asarray(x, dtype=float) + 2j * math.pi * J / self.p)
        return np.arccos(np.clip(c.real, -1.0, 1.0)) / math.pi

    # periods -----------------------------------------------------------------
    def _x_physical_at(self, z0: complex, n_steps: int = 4000, run: float = 40.0) -> complex:
        """sqrt(g^2 - 4Z^p) continued from Re z = -inf (where it equals +g) to z0."""
        path = z0 - run + np.linspace(0.0, run, n_steps + 1)
        Z = np.exp(path)
        D = self.g(Z) ** 2 - 4 * Z ** self.p
        r = np.sqrt(D.astype(complex))
        s = r[0] if abs(r[0] - self.g(Z[0])) < abs(r[0] + self.g(Z[0])) else -r[0]
        for k in range(1, len(r)):
            s = r[k] if abs(r[k] - s) <= abs(r[k] + s) else -r[k]
        return complex(s)

    def a_period(self, J: int, rel_tol: float = 1e-13, max_nodes: int = 1 << 16) -> complex:
        """(1/4 pi i) oint_{A_J} omega dz on the physical sheet.

        The contour is an ellipse around cut J with semi-axis 1.5 times the
        half-length along the cut; the trapezoidal rule is doubled until
        converged (it is spectrally accurate for this periodic integrand).
        """
        a, b = self.branch_points()[J]
        centre = (a + b) / 2
        half = abs(b - a) / 2
        if half == 0:
            return 0j
        rot = (b - a) / abs(b - a)
        A = 1.5 * half
        B = min(A, 0.45 * 2 * math.pi / self.p)
        self._check_contour(J, centre, rot, A, B)
        n = 64
        prev = None
        while True:
            # start at the left-most point so the anchoring path from Re z = -inf misses the cut
            th = math.pi + 2 * math.pi * np.arange(n) / n
            z = centre + rot * (A * np.cos(th) + 1j * B * np.sin(th))
            dz = rot * (-A * np.sin(th) + 1j * B * np.cos(th)) * (2 * math.pi / n)
            Z = np.exp(z)
            g = self.g(Z)
            gp = self.g_prime(Z) * Z
            D = g * g - 4 * Z ** self.p
            Dp = 2 * g * gp - 4 * self.p * Z ** self.p
            r = np.sqrt(D)
            # continuity of the square root along the contour, anchored on the physical sheet
            r0 = self._x_physical_at(complex(z[0]))
            sgn = np.empty(n)
            cur = r0
            for k in range(n):
                sgn[k] = 1.0 if abs(r[k] - cur) <= abs(r[k] + cur) else -1.0
                cur = sgn[k] * r[k]
            r = sgn * r
            X = (g + r) / 2
            Xp = (gp + Dp / (2 * r)) / 2
            terms = z * Xp / X * dz
            val = -np.sum(terms) / (2j * math.pi)
            scale = float(np.sum(np.abs(terms))) / (2 * math.pi)
            if prev is not None and abs(val - prev) <= rel_tol * max(scale, 1e-300):
                return complex(val)
            if n >= max_nodes:
                raise ConvergenceError("A-period quadrature did not converge")
            prev = val
            n *= 2

    def _check_contour(self, J, centre, rot, A, B):
        for K, (a, b) in enumerate(self.branch_points()):
            if K == J:
                continue
            for w in (a, b):
                for shift in (-2j * math.pi, 0, 2j * math.pi):
                    u = (w + shift - centre) / rot
                    if (u.real / A) ** 2 + (u.imag / B) ** 2 <= 1:
                        raise DegenerateInput(f"A-period contour of cut {J} encloses cut {K}")

    def a_periods(self) -> list[float]:
        return [self.a_period(J).real for J in range(self.p)]

    def cut_mass(self, J: int, n: int = 200) -> float:
        """Integral of the density along cut J, an independent route to S_J.

        arccos(s c(z))/pi is analytic between the true (possibly curved) cut
        and the chord joining its branch points, so the integral is taken
        along the chord with Gauss-Legendre nodes.
        """
        a, b = self.branch_points()[J]
        s = self._sign(J)
        xg, wg = np.polynomial.legendre.leggauss(n)
        # substitution x = sin-type map clusters nodes at the square-root endpoints
        th = (xg + 1) * math.pi / 4
        u = np.sin(th) ** 2
        du = np.sin(2 * th) * math.pi / 4
        z = a + u * (b - a)
        vals = np.arccos(s * self.c_function(z)) / math.pi
        return float(np.real(np.sum(wg * du * vals) * (b - a)))

    def single_valuedness_defect(self, J: int, eps: float = 1e-6, samples: int = 9) -> float:
        """max |(X_+ + Z^p/X_+) - (X_- + Z^p/X_-)| across the cut."""
        a, b = self.branch_points()[J]
        worst = 0.0
        for s in np.linspace(0.1, 0.9, samples):
            z = a + s * (b - a)
            vals = []
            for side in (1, -1):
                zz = z + side * 1j * eps
                Z = np.exp(zz)
                r = self._x_physical_at(complex(zz), run=40.0)
                X = (self.g(Z) + r) / 2
                vals.append(X + Z ** self.p / X)
            worst = max(worst, abs(vals[0] - vals[1]))
        return worst

    def to_dict(self) -> dict:
        bps = self.branch_points()
        return {"p": self.p, "t": self.t, "d": list(self.d),
                "hori_vafa_d": self.hori_vafa_coefficients(),
                "branch_points": [[{"re": w.real, "im": w.imag} for w in pair] for pair in bps]}


def density_from_curve(curve: SpectralCurveQ1, group: int, n_grid: int = 401) -> Density:
    a, b = curve.branch_points()[group]
    x = np.linspace(a.real, b.real, n_grid)
    y = curve.density(group, x)
    return Density((a.real, b.real), x, y, curve.cut_mass(group), group)


def _palindromic(p: int, half: Sequence[float]) -> tuple[float, ...]:
    d = [0.0] * (p - 1)
    for n, v in enumerate(half, start=1):
        d[n - 1] = v
        d[p - n - 1] = v
    return tuple(d)


def build_curve_q1(p: int, t: float, S0: float, tol: float = 1e-12, max_iter: int = 50,
                   steps: int | None = None) -> SpectralCurveQ1:
    """Fix d_1..d_{p-1} so the A-periods equal (S0, S1, ..., S1), S1 = (t-S0)/(p-1).

    Under these fillings the curve is invariant under Z -> 1/Z and complex
    conjugation, so d_n = d_{p-n} is real and only floor(p/2) unknowns
    remain.  d = 0 is exactly the point S_I = t/p; Newton with a finite
    difference jacobian continues from there to the requested S0.
    """
    if p < 2:
        raise ValueError("p >= 2 required")
    if not 0 < S0 < t:
        raise ValueError("need 0 < S0 < t")
    S1 = (t - S0) / (p - 1)
    m = p // 2
    x = np.zeros(m)

    def periods(xv, S0_target):
        c = SpectralCurveQ1(p, t, _palindromic(p, xv))
        S1_target = (t - S0_target) / (p - 1)
        got = np.array([c.a_period(J).real for J in range(m)])
        want = np.array([S0_target] + [S1_target] * (m - 1))
        return got - want

    n_steps = steps or max(1, int(math.ceil(abs(S0 - t / p) / (0.1 * t))))
    for S0_k in np.linspace(t / p, S0, n_steps + 1)[1:]:
        for _ in range(max_iter):
            F = periods(x, S0_k)
            if np.max(np.abs(F)) < tol:
                break
            h = 1e-7
            Jm = np.empty((m, m))
            for i in range(m):
                e = np.zeros(m)
                e[i] = h
                Jm[:, i] = (periods(x + e, S0_k) - periods(x - e, S0_k)) / (2 * h)
            step = np.linalg.solve(Jm, -F)
            alpha = 1.0
            while alpha > 1e-6:
                try:
                    Ft = periods(x + alpha * step, S0_k)
                    if np.max(np.abs(Ft)) < np.max(np.abs(F)):
                        break
                except DegenerateInput:
                    pass
                alpha /= 2
            else:
                raise ConvergenceError("period matching stalled")
            x = x + alpha * step
        else:
            raise ConvergenceError("period matching did not converge")
    return SpectralCurveQ1(p, t, _palindromic(p, x))
