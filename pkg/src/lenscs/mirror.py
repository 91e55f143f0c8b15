"""Hori-Vafa Newton polynomials of the resolved geometry and their invariants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import sympy as sp

from .lattice import (AffineMap, LensSpace, build_fan, find_affine_map, lattice_point_counts,
                      lattice_width)

u_sym, v_sym = sp.symbols("u v")


def coefficient_symbols(p: int) -> dict[int, sp.Symbol]:
    return {j: sp.Symbol(f"d{j}") for j in range(1, p + 1)}


@dataclass(frozen=True)
class NewtonPolynomial:
    """sum_k c_k exp(a_k u + b_k v), stored as {(a_k, b_k): c_k}.

    Coefficients are sympy expressions, so numeric and symbolic values mix.
    Zero coefficients are dropped.
    """

    terms: tuple[tuple[tuple[int, int], sp.Expr], ...]

    @classmethod
    def from_dict(cls, terms: Mapping[tuple[int, int], object]) -> "NewtonPolynomial":
        clean = {}
        for e, c in terms.items():
            c = sp.nsimplify(c) if isinstance(c, float) else sp.sympify(c)
            c = sp.expand(c)
            if c != 0:
                clean[(int(e[0]), int(e[1]))] = c
        return cls(tuple(sorted(clean.items())))

    @classmethod
    def from_expression(cls, expr: sp.Expr) -> "NewtonPolynomial":
        X, Y = sp.symbols("X Y")
        poly = sp.Poly(sp.expand(expr.subs({sp.exp(u_sym): X, sp.exp(v_sym): Y})
                                 .rewrite(sp.exp)), X, Y)
        return cls.from_dict({m: c for m, c in poly.terms()})

    @property
    def support(self) -> list[tuple[int, int]]:
        return [e for e, _ in self.terms]

    def as_dict(self) -> dict[tuple[int, int], sp.Expr]:
        return dict(self.terms)

    def substitute(self, values: Mapping) -> "NewtonPolynomial":
        return NewtonPolynomial.from_dict({e: sp.sympify(c).subs(values) for e, c in self.terms})

    def expression(self) -> sp.Expr:
        return sum((c * sp.exp(a * u_sym + b * v_sym) for (a, b), c in self.terms), sp.Integer(0))

    def __call__(self, u: complex, v: complex) -> complex:
        import cmath
        return complex(sum(complex(c) * cmath.exp(a * u + b * v) for (a, b), c in self.terms))

    def pretty(self) -> str:
        parts = []
        for (a, b), c in self.terms:
            mono = " + ".join(s for s in (f"{a}u" if a else "", f"{b}v" if b else "") if s)
            coef = sp.sstr(c)
            if mono:
                parts.append(f"({coef})*e^({mono})" if coef not in ("1",) else f"e^({mono})")
            else:
                parts.append(f"({coef})")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        out = []
        for (a, b), c in self.terms:
            if c.free_symbols:
                coef = {"symbolic": sp.sstr(c)}
            else:
                z = complex(c)
                coef = {"re": z.real, "im": z.imag}
            out.append({"exponent": [a, b], "coefficient": coef})
        return {"terms": out}


def newton_polynomial(ls: LensSpace, coeffs: Mapping[int, object] | None = None) -> NewtonPolynomial:
    """Expand (e^{pu+qv}-1)(e^v-1) + d_p + sum_j d_j e^{ju+(q-[(p-j)q/p])v}.

    ``coeffs`` maps j=1..p to numbers or sympy expressions; ``None`` keeps all
    d_j symbolic. The constant monomial collects 1 + d_p.
    """
    p, q = ls.p, ls.q
    if coeffs is None:
        coeffs = coefficient_symbols(p)
    missing = [j for j in range(1, p + 1) if j not in coeffs]
    if missing:
        raise KeyError(f"missing coefficients d_j for j={missing}")
    terms: dict[tuple[int, int], sp.Expr] = {}

    def add(e, c):
        terms[e] = terms.get(e, sp.Integer(0)) + sp.sympify(c)

    add((p, q + 1), 1)
    add((p, q), -1)
    add((0, 1), -1)
    add((0, 0), 1)
    add((0, 0), coeffs[p])
    for j in range(1, p):
        add((j, q - ((p - j) * q) // p), coeffs[j])
    return NewtonPolynomial.from_dict(terms)


def generic_support(ls: LensSpace) -> list[tuple[int, int]]:
    """Support of the Newton polynomial with all coefficients nonzero."""
    return newton_polynomial(ls).support


def fan_to_mirror_map(ls: LensSpace) -> AffineMap | None:
    """Affine unimodular map from fan points onto the Newton support."""
    return find_affine_map(build_fan(ls).points, generic_support(ls))


@dataclass(frozen=True)
class CurveInvariants:
    genus: int
    punctures: int
    hyperelliptic_family: bool
    lattice_width: int

    def to_dict(self) -> dict:
        return {"genus": self.genus, "punctures": self.punctures,
                "hyperelliptic_family": self.hyperelliptic_family,
                "lattice_width": self.lattice_width}


def curve_invariants(np_: NewtonPolynomial) -> CurveInvariants:
    """Genus and puncture count of the generic member with this support.

    Genus counts interior lattice points of the Newton polygon, punctures
    count its boundary lattice points, and the support lies in the
    hyperelliptic family when its lattice width is at most 2.
    """
    supp = np_.support
    interior, boundary = lattice_point_counts(supp)
    w = lattice_width(supp)
    return CurveInvariants(genus=interior, punctures=boundary, hyperelliptic_family=w <= 2,
                           lattice_width=w)


def q1_specialization(p: int, t, d: Sequence | None = None) -> NewtonPolynomial:
    """(e^v-1)(e^{pu+v}-1) + e^t - 1 + e^v sum_{n=1}^{p-1} d_n e^{nu}.

    ``t`` and the entries of ``d`` may be numbers or sympy expressions; with
    ``d=None`` the coefficients are symbols d1..d_{p-1}.
    """
    if p < 1:
        raise ValueError("p must be positive")
    if d is None:
        d = [sp.Symbol(f"d{n}") for n in range(1, p)]
    if len(d) != p - 1:
        raise ValueError(f"expected {p - 1} coefficients, got {len(d)}")
    t = sp.nsimplify(t) if isinstance(t, float) else sp.sympify(t)
    terms: dict[tuple[int, int], sp.Expr] = {}

    def add(e, c):
        terms[e] = terms.get(e, sp.Integer(0)) + sp.sympify(c)

    add((p, 2), 1)
    add((0, 1), -1)
    add((p, 1), -1)
    add((0, 0), 1)
    add((0, 0), sp.exp(t) - 1)
    for n, dn in enumerate(d, start=1):
        add((n, 1), dn)
    return NewtonPolynomial.from_dict(terms)
