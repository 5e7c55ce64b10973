"""Sparse polynomials in chart coordinates x_j and xi_j with integer coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

# a variable is (kind, index) with kind 0 for x_j and 1 for xi_j; this tuple
# order is also the priority order used for printing
Var = tuple[int, int]
Monomial = tuple[tuple[Var, int], ...]

X, XI = 0, 1


def x(j: int) -> "Poly":
    return Poly({(((X, j), 1),): 1})


def xi(j: int) -> "Poly":
    return Poly({(((XI, j), 1),): 1})


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly | int") -> "Poly":
        if isinstance(other, int):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m}

    def degree_in(self, kind: int) -> set[int]:
        """Total degrees in the variables of one kind, over all terms."""
        return {sum(e for (k, _), e in m if k == kind) for m in self.terms}

    def evaluate(self, point: Mapping[Var, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = Fraction(c)
            for v, e in m:
                t *= point[v] ** e
            total += t
        return total

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in descending lexicographic order (x0 > x1 > ... > xi0 > xi1 > ...)."""
        allvars = sorted({v for m in self.terms for v, _ in m})

        def vec(item):
            m = dict(item[0])
            return tuple(m.get(v, 0) for v in allvars)

        return sorted(self.terms.items(), key=vec, reverse=True)

    def render(self, unicode: bool = False) -> str:
        if not self.terms:
            return "0"
        name = {X: "x", XI: "ξ" if unicode else "xi"}
        times = "·" if unicode else "*"
        minus = " − " if unicode else " - "
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            factors = [
                f"{name[k]}{j}" + (f"^{e}" if e > 1 else "") for (k, j), e in m
            ]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = times.join(factors)
            else:
                body = f"{mag}{times}" + times.join(factors)
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((minus if c < 0 else " + ") + body)
        return "".join(out)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()!r})"
