"""Eigenvalue-integral representations of the lens-space partition function.

Three representations are supported, all parametrised by one real coupling
``gs`` > 0 which plays the role of g_s^2 in :mod:`lenscs.exact`:

``mmcs``
    exp(-gs p x.x + 4 pi i m.x) prod_{i<j} sinh(D_ij + i pi (q-1)(m_i-m_j)/p) sinh(D_ij),
    D_ij = gs (x_i - x_j)/2.
``mmcs2``
    p groups of eigenvalues, gaussian exp(-p u.u / gs), and
    sinh((u_i-u_j)/2 + i pi (I-J)/p) sinh((u_i-u_j)/2 + i q pi (I-J)/p)
    for u_i in group I = m_i, u_j in group J = m_j.  (In the grouped form the
    coupling is customarily halved, gs/2, which is why the gaussian reads
    p u^2 / (2 (gs/2)).)
``mmcs1a``
    trivial sector only: exp(-p x.x/(gs q)) prod sinh((x_i-x_j)/(2q)) sinh((x_i-x_j)/2).

:func:`normalization` returns the factor, tracked through every gaussian
rescaling and contour shift, for which ``normalization * integral`` equals
:func:`lenscs.exact.z_exact` at g_s^2 = gs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, ConvergenceError, DegenerateInput
from .exact import ExactCSInput, root_data
from .lattice import LensSpace

REPRESENTATIONS = ("mmcs", "mmcs2", "mmcs1a")
TAIL_EPS = 1e-14


@dataclass(frozen=True)
class MatrixModelSpec:
    ls: LensSpace
    N: int
    gs: float
    m: tuple[int, ...] = ()
    representation: str = "mmcs"

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if not self.gs > 0:
            raise ValueError("gs must be a positive real (euclidean continuation)")
        m = tuple(int(x) % self.ls.p for x in self.m) if self.m else (0,) * self.N
        if len(m) != self.N:
            raise ValueError(f"m has length {len(m)}, expected N={self.N}")
        if self.representation == "mmcs1a" and any(m):
            raise ValueError("mmcs1a only describes the trivial flat connection m=0")
        object.__setattr__(self, "m", m)

    @property
    def group_sizes(self) -> list[int]:
        """N_I = multiplicity of I in m, I = 0..p-1."""
        return [self.m.count(I) for I in range(self.ls.p)]

    def exact_input(self) -> ExactCSInput:
        return ExactCSInput(self.ls, self.N, math.sqrt(self.gs), self.m)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    evaluations: int
    converged: bool = True
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value_re": self.value.real, "value_im": self.value.imag,
                "err": self.abs_error_estimate, "evals": self.evaluations,
                "converged": self.converged}


def _pairs(N):
    return [(i, j) for i in range(N) for j in range(i + 1, N)]


def _gaussian_coefficient(spec: MatrixModelSpec) -> float:
    p, q, g = spec.ls.p, spec.ls.q, spec.gs
    return {"mmcs": g * p, "mmcs2": p / g, "mmcs1a": p / (g * q)}[spec.representation]


def _sinh_slope(spec: MatrixModelSpec) -> float:
    # growth rate of log|sinh * sinh| per unit |x_i - x_j|
    q, g = spec.ls.q, spec.gs
    return {"mmcs": g, "mmcs2": 1.0, "mmcs1a": 0.5 / q + 0.5}[spec.representation]


def contour_shift(spec: MatrixModelSpec) -> np.ndarray:
    """Imaginary offset of the integration contour per coordinate.

    For ``mmcs`` the linear phase 4 pi i m.x is removed by integrating along
    Im x = 2 pi m/(gs p); the integrand is entire with gaussian decay, so the
    value is unchanged while the oscillation disappears.
    """
    if spec.representation == "mmcs":
        return 2 * math.pi * np.asarray(spec.m, dtype=float) / (spec.gs * spec.ls.p)
    return np.zeros(spec.N)


def integrand(spec: MatrixModelSpec, x) -> np.ndarray:
    """Pointwise integrand; ``x`` has shape (..., N) and may be complex."""
    x = np.asarray(x)
    p, q, g = spec.ls.p, spec.ls.q, spec.gs
    m = np.asarray(spec.m, dtype=float)
    rep = spec.representation
    if rep == "mmcs":
        val = np.exp(-g * p * np.sum(x * x, axis=-1) + 4j * math.pi * (x @ m))
    else:
        val = np.exp(-_gaussian_coefficient(spec) * np.sum(x * x, axis=-1)).astype(complex)
    for i, j in _pairs(spec.N):
        dx = x[..., i] - x[..., j]
        dm = m[i] - m[j]
        if rep == "mmcs":
            d = g * dx / 2
            val = val * np.sinh(d + 1j * math.pi * (q - 1) * dm / p) * np.sinh(d)
        elif rep == "mmcs2":
            th = math.pi * dm / p
            val = val * np.sinh(dx / 2 + 1j * th) * np.sinh(dx / 2 + 1j * q * th)
        else:
            val = val * np.sinh(dx / (2 * q)) * np.sinh(dx / 2)
    return val


def normalization(spec: MatrixModelSpec) -> complex:
    """Constant with ``normalization(spec) * integral == z_exact`` at g_s^2 = gs."""
    p, q, g, N = spec.ls.p, spec.ls.q, spec.gs, spec.N
    m = np.asarray(spec.m, dtype=float)
    npos = N * (N - 1) // 2
    rho2 = root_data(N).rho_squared
    msq = float(m @ m)
    if spec.representation == "mmcs":
        return (math.exp(-4 * math.pi ** 2 * (q - 1) * msq / (g * p) - g * rho2 / (2 * p))
                * (p * g / math.pi) ** (N / 2) * 4 ** npos)
    if spec.representation == "mmcs2":
        return (math.exp(-4 * math.pi ** 2 * q * msq / (g * p) - g * rho2 / (2 * p))
                * (p / (math.pi * g)) ** (N / 2) * 4 ** npos)
    return ((p / (math.pi * g * q)) ** (N / 2) * 4 ** npos
            * math.exp(-g / (4 * p) * (q + 1 / q) * rho2))


def sector_prefactor(spec: MatrixModelSpec) -> float:
    """The m-dependent part of :func:`normalization`.

    Completing the square in the flat-connection phase leaves a factor
    exp(-4 pi^2 c m.m / (gs p)) with c = q-1 (mmcs) or q (mmcs2). It is not
    a constant across sectors, so sector ratios of bare integrals need it.
    """
    p, q, g = spec.ls.p, spec.ls.q, spec.gs
    msq = float(sum(x * x for x in spec.m))
    c = {"mmcs": q - 1, "mmcs2": q, "mmcs1a": 0}[spec.representation]
    return math.exp(-4 * math.pi ** 2 * c * msq / (g * p))


def truncation(spec: MatrixModelSpec, eps: float = TAIL_EPS) -> float:
    """Half-width L of the box [-L, L]^N outside which the integrand is below eps."""
    c = _gaussian_coefficient(spec)
    npos = spec.N * (spec.N - 1) // 2
    r = 2 * _sinh_slope(spec) * npos
    log_inv = math.log(1 / eps)
    return (r + math.sqrt(r * r + 4 * c * log_inv)) / (2 * c)


def _gl_rule(panels: int, order: int, L: float) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-L, L, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def _tensor_quad(spec: MatrixModelSpec, nodes: np.ndarray, weights: np.ndarray) -> tuple[complex, float]:
    """Return the tensor-rule estimate and the same rule applied to |integrand|."""
    N = spec.N
    shift = 1j * contour_shift(spec)
    if N == 1:
        f = integrand(spec, nodes[:, None] + shift)
        return complex(np.sum(weights * f)), float(np.sum(weights * np.abs(f)))
    # iterate over the first coordinate to bound memory
    grids = np.meshgrid(*([nodes] * (N - 1)), indexing="ij")
    rest = np.stack([a.ravel() for a in grids], axis=-1)
    rest_w = np.ones(len(rest))
    for r in np.meshgrid(*([weights] * (N - 1)), indexing="ij"):
        rest_w = rest_w * r.ravel()
    re_parts, im_parts, abs_parts = [], [], []
    for x0, w0 in zip(nodes, weights):
        pts = np.concatenate([np.full((len(rest), 1), x0), rest], axis=1) + shift
        f = integrand(spec, pts)
        z = w0 * np.sum(rest_w * f)
        re_parts.append(z.real)
        im_parts.append(z.imag)
        abs_parts.append(w0 * np.sum(rest_w * np.abs(f)))
    return complex(math.fsum(re_parts), math.fsum(im_parts)), math.fsum(abs_parts)


def z_quadrature(spec: MatrixModelSpec, rel_tol: float = 1e-10, order: int = 24,
                 max_evaluations: int = 40_000_000, max_n: int = 3,
                 initial_panels: int = 2) -> QuadratureResult:
    """Tensor-product composite Gauss-Legendre on the truncated box.

    The panel count doubles until two successive estimates agree to
    ``rel_tol`` relative to the integral of |integrand|, which is the natural
    scale when sign cancellations make the value itself small.
    """
    N = spec.N
    if N > max_n:
        raise BudgetExceeded(f"tensor quadrature limited to N <= {max_n}, got N={N}")
    L = truncation(spec)
    panels = initial_panels
    prev = None
    evals = 0
    while True:
        nodes, weights = _gl_rule(panels, order, L)
        cost = len(nodes) ** N
        if evals + cost > max_evaluations:
            if prev is None:
                raise BudgetExceeded("quadrature budget exhausted before a first estimate")
            return QuadratureResult(prev, float("nan"), evals, converged=False,
                                    meta={"L": L, "panels": panels // 2})
        val, scale = _tensor_quad(spec, nodes, weights)
        evals += cost
        if prev is not None:
            err = abs(val - prev)
            if err <= rel_tol * scale:
                return QuadratureResult(val, err, evals, meta={"L": L, "panels": panels, "abs_scale": scale})
        prev = val
        panels *= 2


def z_matrix(spec: MatrixModelSpec, **kw) -> complex:
    """Normalised quadrature value, directly comparable with z_exact."""
    return normalization(spec) * z_quadrature(spec, **kw).value


def z_monte_carlo(spec: MatrixModelSpec, samples: int, seed: int = 0,
                  batch: int = 200_000) -> QuadratureResult:
    """Importance sampling with the gaussian factor as proposal.

    Draws x ~ N(0, 1/(2c)) per coordinate, c the gaussian coefficient, and
    averages integrand/pdf. Deterministic for a given seed and batch size.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    N = spec.N
    c = _gaussian_coefficient(spec)
    sigma = math.sqrt(1 / (2 * c))
    rng = np.random.default_rng(seed)
    shift = 1j * contour_shift(spec)
    log_norm = N * math.log(sigma * math.sqrt(2 * math.pi))
    s1 = 0j
    s2 = 0.0
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        x = rng.normal(0.0, sigma, size=(n, N))
        logpdf = -np.sum(x * x, axis=1) / (2 * sigma ** 2) - log_norm
        w = integrand(spec, x + shift) / np.exp(logpdf)
        s1 += complex(np.sum(w))
        s2 += float(np.sum(np.abs(w) ** 2))
        done += n
    mean = s1 / samples
    var = max(s2 / samples - abs(mean) ** 2, 0.0)
    stderr = math.sqrt(var / samples)
    return QuadratureResult(mean, stderr, samples, meta={"seed": seed})


# --------------------------------------------------------------------------
# Itzykson-Zuber

@dataclass(frozen=True)
class IZInput:
    a: tuple[float, ...]
    b: tuple[float, ...]
    beta: complex = 1.0


def _vandermonde(v: np.ndarray) -> complex:
    out = 1.0 + 0j
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            out *= v[j] - v[i]
    return out


def superfactorial(n: int) -> int:
    """prod_{j=1}^{n-1} j!."""
    return math.prod(math.factorial(j) for j in range(1, n))


def iz_integral(inp: IZInput) -> complex:
    """Haar-normalised int dU exp(beta Tr(U A U^+ B)) for diagonal A, B.

    c_N det(e^{beta a_i b_j}) / (Delta(a) Delta(b) beta^{N(N-1)/2}), with
    c_N = prod_{j<N} j! and Delta(a) = prod_{i<j} (a_j - a_i).
    """
    a = np.asarray(inp.a, dtype=float)
    b = np.asarray(inp.b, dtype=float)
    N = len(a)
    if len(b) != N:
        raise ValueError("a and b must have equal length")
    if len(set(a.tolist())) < N or len(set(b.tolist())) < N:
        raise DegenerateInput("Itzykson-Zuber formula needs distinct eigenvalues")
    beta = complex(inp.beta)
    if N == 1:
        return complex(np.exp(beta * a[0] * b[0]))
    if beta == 0:
        return 1.0 + 0j
    det = np.linalg.det(np.exp(beta * np.outer(a, b)))
    return complex(superfactorial(N) * det / (_vandermonde(a) * _vandermonde(b) * beta ** (N * (N - 1) // 2)))


def u2_group_integral(a: Sequence[float], b: Sequence[float], beta: complex = 1.0,
                      n_beta: int = 64, n_angle: int = 8) -> complex:
    """Direct Euler-angle quadrature of int_{U(2)} dU exp(beta Tr(U A U^+ B)).

    U = e^{i a s_z/2} e^{i b s_y/2} e^{i c s_z/2} with Haar density
    sin(b)/(16 pi^2); the overall U(1) phase drops out of the trace.
    """
    A = np.diag(np.asarray(a, dtype=complex))
    B = np.diag(np.asarray(b, dtype=complex))
    xb, wb = np.polynomial.legendre.leggauss(n_beta)
    betas = (xb + 1) * math.pi / 2
    wbs = wb * math.pi / 2
    alphas = np.arange(n_angle) * 2 * math.pi / n_angle
    gammas = np.arange(2 * n_angle) * 4 * math.pi / (2 * n_angle)
    total = 0j
    for al in alphas:
        for ga in gammas:
            for be, w in zip(betas, wbs):
                c, s = math.cos(be / 2), math.sin(be / 2)
                U = np.array([[np.exp(0.5j * (al + ga)) * c, np.exp(0.5j * (al - ga)) * s],
                              [-np.exp(-0.5j * (al - ga)) * s, np.exp(-0.5j * (al + ga)) * c]])
                tr = np.trace(U @ A @ U.conj().T @ B)
                total += w * math.sin(be) * np.exp(beta * tr)
    # trapezoid weights in alpha (2pi/n) and gamma (4pi/2n); volume 16 pi^2
    total *= (2 * math.pi / n_angle) * (4 * math.pi / (2 * n_angle)) / (16 * math.pi ** 2)
    return complex(total)


# --------------------------------------------------------------------------
# unitary-matrix chain for the trivial sector

def hermitian_measure_constant(N: int) -> float:
    """Omega_N in int dX f(X) = Omega_N int d^N x Delta(x)^2 f(diag x).

    dX is the flat measure prod dX_ii prod_{i<j} dRe X_ij dIm X_ij.
    """
    return math.pi ** (N * (N - 1) // 2) / math.prod(math.factorial(j) for j in range(1, N + 1))


def unitary_chain_prefactor(ls: LensSpace, N: int, gs: float) -> float:
    """Everything multiplying int dU exp((gs/2p) Tr(U A U^+ A)), A = diag(1..N).

    Obtained from the trivial-sector integral by writing both sinh products
    as Vandermonde determinants, trading them for Itzykson-Zuber integrals,
    lifting to a hermitian matrix integral and doing the gaussian over X.
    """
    p, q = ls.p, ls.q
    npos = N * (N - 1) // 2
    c = p / (gs * q)
    A = np.arange(1, N + 1, dtype=float)
    trA, trA2 = float(A.sum()), float(A @ A)
    kappa = (q + 1) * (N + 1) / (2 * q)
    const = (4.0 ** -npos * q ** -npos / hermitian_measure_constant(N)
             * (math.pi / c) ** (N / 2) * (math.pi / (2 * c)) ** npos)
    expo = gs * q / (4 * p) * ((1 + 1 / q ** 2) * trA2 + N * kappa ** 2 - 2 * kappa * (1 + 1 / q) * trA)
    return const * math.exp(expo)


def printed_chain_prefactor(ls: LensSpace, N: int, gs: float) -> float:
    """The same prefactor with the constants exactly as they are usually quoted.

    Kept for comparison only: it omits the gs-dependence of the gaussian
    matrix integral, so its ratio to the eigenvalue integral drifts with gs.
    """
    p, q = ls.p, ls.q
    npos = N * (N - 1) // 2
    A = np.arange(1, N + 1, dtype=float)
    trA, trA2 = float(A.sum()), float(A @ A)
    bracket = ((N - 1) / 4) ** 2 * N * (q + 1) ** 2 + (q * q + 1) * trA2 - (N - 1) * (q + 1) ** 2 * trA
    return math.factorial(N) / (4 * math.pi * q) ** npos * math.exp(gs / (8 * p * q) * bracket)


def z_unitary_chain(ls: LensSpace, N: int, gs: float, m: Sequence[int] = (),
                    convention: str = "derived", max_n: int = 3) -> complex:
    """Trivial-sector integral as a single Itzykson-Zuber evaluable unitary integral."""
    if any(int(x) % ls.p for x in m):
        raise ValueError("the unitary chain only covers the trivial flat connection")
    if N > max_n:
        raise BudgetExceeded(f"unitary chain limited to N <= {max_n}")
    A = tuple(float(i) for i in range(1, N + 1))
    unitary = iz_integral(IZInput(A, A, gs / (2 * ls.p)))
    if convention == "derived":
        return unitary_chain_prefactor(ls, N, gs) * unitary
    if convention == "printed":
        return printed_chain_prefactor(ls, N, gs) * unitary
    raise ValueError(f"unknown convention {convention!r}")


def check_converged(res: QuadratureResult) -> QuadratureResult:
    if not res.converged:
        raise ConvergenceError("quadrature did not reach the requested tolerance")
    return res
