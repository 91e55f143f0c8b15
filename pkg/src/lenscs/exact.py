"""Exact Chern-Simons partition function on L(p,q) by the double permutation sum.

Per flat connection m in Z_p^N the value is

    exp(-4 pi^2 q m.m / (g_s^2 p))
      * sum_{w~, w in S_N} sgn(w) exp(g_s^2/(2p) w(rho).rho)
                                  exp(2 pi i/p  w~(m).(q rho + w(rho)))

with the overall constant C_N set to 1.
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .lattice import LensSpace

DEFAULT_MAX_N = 7
CONVENTION = "C_N=1; m reduced to {0..p-1} before evaluation"
# fixed chunking of the outer sum so results do not depend on the worker count
_CHUNK = 256


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LENSCS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RootData:
    rank_n: int
    weyl_vector: np.ndarray
    positive_roots: np.ndarray

    @property
    def rho_squared(self) -> float:
        return float(self.weyl_vector @ self.weyl_vector)


def root_data(N: int) -> RootData:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    rho = np.array([(N - 1) / 2 - i for i in range(N)])
    roots = []
    for i in range(N):
        for j in range(i + 1, N):
            a = np.zeros(N)
            a[i], a[j] = 1.0, -1.0
            roots.append(a)
    return RootData(N, rho, np.array(roots).reshape(-1, N))


@lru_cache(maxsize=16)
def permutations_with_sign(N: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(N))), dtype=np.int64).reshape(-1, N)
    signs = np.empty(len(perms), dtype=np.int64)
    for k, perm in enumerate(perms):
        inv = sum(1 for i in range(N) for j in range(i + 1, N) if perm[i] > perm[j])
        signs[k] = -1 if inv % 2 else 1
    return perms, signs


@dataclass(frozen=True, order=True)
class FlatConnection:
    m: tuple[int, ...]

    def __post_init__(self):
        if list(self.m) != sorted(self.m, reverse=True):
            raise ValueError(f"flat connection representative must be non-increasing: {self.m}")

    @classmethod
    def from_any(cls, m: Sequence[int], p: int) -> "FlatConnection":
        return cls(tuple(sorted((int(x) % p for x in m), reverse=True)))

    def multiplicities(self, p: int) -> list[int]:
        return [self.m.count(I) for I in range(p)]

    def orbit_size(self) -> int:
        n = math.factorial(len(self.m))
        for v in set(self.m):
            n //= math.factorial(self.m.count(v))
        return n


def flat_connections(p: int, N: int) -> list[FlatConnection]:
    """Sorted representatives of Z_p^N / S_N; there are C(N+p-1, p-1) of them."""
    reps = itertools.combinations_with_replacement(range(p - 1, -1, -1), N)
    return [FlatConnection(tuple(r)) for r in reps]


@dataclass(frozen=True)
class ExactCSInput:
    ls: LensSpace
    N: int
    coupling: complex
    m: tuple[int, ...] = field(default=())
    k: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.coupling == 0:
            raise ValueError("coupling must be nonzero")
        if not self.m:
            object.__setattr__(self, "m", (0,) * self.N)
        if len(self.m) != self.N:
            raise ValueError(f"m has length {len(self.m)}, expected N={self.N}")

    @classmethod
    def from_level(cls, ls: LensSpace, N: int, k: int, m: Sequence[int] = ()) -> "ExactCSInput":
        """g_s^2 = 4 pi i / (k + N)."""
        return cls(ls, N, cmath.sqrt(4j * math.pi / (k + N)), tuple(m), k)

    @property
    def gs2(self) -> complex:
        if self.k is not None:
            return 4j * math.pi / (self.k + self.N)
        return complex(self.coupling) ** 2


@dataclass(frozen=True)
class PartitionValue:
    value: complex
    convention: str = CONVENTION
    m: tuple[int, ...] = ()

    def __abs__(self):
        return abs(self.value)

    def to_dict(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "m": list(self.m),
                "convention": self.convention}


def _chunk_sums(terms: np.ndarray) -> tuple[float, float]:
    # numpy's pairwise summation inside a chunk; chunks are merged with fsum
    s = terms.sum()
    return float(s.real), float(s.imag)


def _double_sum(p: int, q: int, N: int, gs2: complex, m: np.ndarray, workers: int) -> complex:
    perms, signs = permutations_with_sign(N)
    rho = root_data(N).weyl_vector
    wrho = rho[perms]                                    # (N!, N) rows are w(rho)
    inner = signs * np.exp(gs2 / (2 * p) * (wrho @ rho))  # sgn(w) e^{g^2/2p w(rho).rho}
    wm = m[perms].astype(float)                          # rows are w~(m)
    shift = wrho + q * rho                               # q rho + w(rho)

    def chunk(lo: int) -> tuple[float, float]:
        block = wm[lo:lo + _CHUNK]
        phase = np.exp(2j * math.pi / p * (block @ shift.T))
        return _chunk_sums((phase * inner[None, :]).ravel())

    starts = range(0, len(perms), _CHUNK)
    if workers > 1 and len(perms) > _CHUNK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(chunk, starts))
    else:
        partial = [chunk(lo) for lo in starts]
    return complex(math.fsum(r for r, _ in partial), math.fsum(i for _, i in partial))


def z_exact(inp: ExactCSInput, max_n: int = DEFAULT_MAX_N, workers: int | None = None) -> PartitionValue:
    """Partition function in the flat-connection sector ``inp.m`` with C_N = 1."""
    p, q, N = inp.ls.p, inp.ls.q, inp.N
    if N > max_n:
        raise BudgetExceeded(f"N={N} needs (N!)^2 = {math.factorial(N) ** 2} terms; budget N <= {max_n}")
    m = np.array([x % p for x in inp.m], dtype=np.int64)
    gs2 = inp.gs2
    pref = cmath.exp(-4 * math.pi ** 2 * q * float(m @ m) / (gs2 * p))
    total = _double_sum(p, q, N, gs2, m, workers or worker_count())
    return PartitionValue(pref * total, m=tuple(int(x) for x in m))


def z_full(ls: LensSpace, N: int, k: int, weighted: bool = False,
           max_n: int = DEFAULT_MAX_N) -> PartitionValue:
    """Sum of z_exact over flat connections at level k.

    ``weighted=True`` counts each S_N orbit with its size, i.e. sums over all
    of Z_p^N instead of over sorted representatives.
    """
    parts = []
    for fc in flat_connections(ls.p, N):
        val = z_exact(ExactCSInput.from_level(ls, N, k, fc.m), max_n=max_n).value
        parts.append(val * (fc.orbit_size() if weighted else 1))
    total = complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))
    conv = CONVENTION + ("; orbit-size weights" if weighted else "; one term per orbit")
    return PartitionValue(total, convention=conv)


def weyl_sum(N: int, phi: Sequence[float]) -> complex:
    """sum_{w in S_N} sgn(w) exp(i phi.w(rho)).

    Near zeros of the product form the N! unit terms cancel almost
    completely, so phases and the sum are carried in extended precision
    (np.longdouble; plain double on platforms without it).
    """
    perms, signs = permutations_with_sign(N)
    rho = root_data(N).weyl_vector.astype(np.longdouble)
    theta = rho[perms] @ np.asarray(phi, dtype=np.longdouble)
    return complex(float(np.sum(signs * np.cos(theta))), float(np.sum(signs * np.sin(theta))))


def weyl_product(N: int, phi: Sequence[float]) -> complex:
    """prod_{alpha>0} 2i sin(alpha.phi/2), the closed form of :func:`weyl_sum`.

    Each positive root contributes e^{i x} - e^{-i x} = 2i sin x, hence the
    factor i^{N(N-1)/2} in front of the product of sines.
    """
    roots = root_data(N).positive_roots
    if not len(roots):
        return 1.0 + 0j
    x = roots.astype(np.longdouble) @ np.asarray(phi, dtype=np.longdouble) / 2
    mag = float(np.prod(2 * np.sin(x)))
    return (1, 1j, -1, -1j)[len(roots) % 4] * mag + 0j
