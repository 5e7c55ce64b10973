"""Divisor combinatorics on a resolved fan: exponents, strata and support labels."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .fan import Cone, Edge, GenerableSet, edge_pairing, is_sigma_good, sigma_bad
from .matrix import IntMatrix, PreconditionError

PLANE = "stratum-plane"
PLANE_INF = "stratum-infinity"
DIVISOR = "divisor"
DIVISOR_INF = "divisor-infinity"
LABEL_KINDS = (PLANE, PLANE_INF, DIVISOR, DIVISOR_INF)

ZERO_SECTION = "zero-section"
INFINITY = "infinity-conormal"
SUPPORT = "resolved-support"
SUPPORT_INF = "resolved-support-infinity"


@dataclass(frozen=True)
class ExponentTable:
    sigma: Cone
    entries: tuple[tuple[int, ...], ...]  # entries[k][i-1] = b+ of edge k, column i

    def polynomial(self) -> str:
        """G_B(sigma) with terms in column order, t_k for the k-th edge."""
        terms = []
        for i in range(len(self.entries[0])):
            factors = [f"X{i + 1}"]
            for k, row in enumerate(self.entries):
                a = row[i]
                if a == 1:
                    factors.append(f"t{k + 1}")
                elif a > 1:
                    factors.append(f"t{k + 1}^{a}")
            terms.append("*".join(factors))
        return " + ".join(terms)

    def to_json(self) -> dict:
        return {
            "cone": self.sigma.to_json(),
            "b_plus": [list(r) for r in self.entries],
            "G": self.polynomial(),
        }


def exponent_table(B: IntMatrix, sigma: Cone) -> ExponentTable:
    rows = []
    for e in sigma.edges:
        b = edge_pairing(B, e)
        m = min(b)
        rows.append(tuple(x - m for x in b))
    return ExponentTable(sigma, tuple(rows))


@dataclass(frozen=True)
class SNCWitness:
    """Coordinate change putting the divisor of G_B(sigma) in normal crossings.

    ``G = prod_k t_k^factor[k] * X'`` where ``X' = X_{gamma(1)} + sum_{i>=2}
    X_{gamma(i)} prod_k t_k^{rest[i-2][k]}`` and every exponent is
    nonnegative, so ``{X0 * X' * prod t_k = 0}`` is a union of coordinate
    hyperplanes in the chart ``(X0, X', X_{gamma(2)}, ..., t_1, ..., t_d)``.
    """

    gamma: tuple[int, ...]
    factor: tuple[int, ...]
    rest: tuple[tuple[int, ...], ...]
    divisors: tuple[str, ...]

    def substituted(self) -> str:
        terms = [f"X{self.gamma[0]}"]
        for col, exps in zip(self.gamma[1:], self.rest):
            f = [f"X{col}"] + [
                f"t{k + 1}" if a == 1 else f"t{k + 1}^{a}" for k, a in enumerate(exps) if a
            ]
            terms.append("*".join(f))
        return " + ".join(terms)

    def to_json(self) -> dict:
        return {
            "gamma": list(self.gamma),
            "factor": list(self.factor),
            "rest": [list(r) for r in self.rest],
            "substitution": f"X{self.gamma[0]}' = {self.substituted()}",
            "divisors": list(self.divisors),
        }


def snc_witness(B: IntMatrix, sigma: Cone) -> SNCWitness:
    good, gamma = is_sigma_good(B, sigma)
    if not good:
        raise PreconditionError(f"B is not good on the cone {sigma.edges}")
    table = exponent_table(B, sigma).entries
    first = gamma[0] - 1
    factor = tuple(row[first] for row in table)
    rest = tuple(
        tuple(row[c - 1] - row[first] for row in table) for c in gamma[1:]
    )
    assert all(a >= 0 for r in rest for a in r)
    divisors = ("X0", f"X{gamma[0]}'") + tuple(f"t{k + 1}" for k in range(sigma.d))
    return SNCWitness(gamma, factor, rest, divisors)


# -- strata -------------------------------------------------------------------

def theta_of(B: IntMatrix, eps: Iterable[Edge]) -> tuple[int, ...]:
    """Columns minimising the pairing on every edge of eps (all columns if eps is empty)."""
    theta = set(range(1, B.ncols + 1))
    for e in eps:
        b = edge_pairing(B, e)
        m = min(b)
        theta &= {i + 1 for i, x in enumerate(b) if x == m}
    return tuple(sorted(theta))


def _eps_key(eps: tuple[Edge, ...]):
    return (len(eps), eps)


def enumerate_epsilon(fan: GenerableSet) -> list[tuple[Edge, ...]]:
    """Edge subsets lying in a common cone, by size then lexicographically."""
    found = set()
    for c in fan.cones:
        edges = sorted(c.edges)
        for r in range(len(edges) + 1):
            found.update(combinations(edges, r))
    return sorted(found, key=_eps_key)


@dataclass(frozen=True)
class Label:
    kind: str
    epsilon: tuple[Edge, ...] | None
    theta: tuple[int, ...] | None
    provenance: tuple = ()

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        out["epsilon"] = None if self.epsilon is None else [list(e) for e in self.epsilon]
        out["theta"] = None if self.theta is None else list(self.theta)
        out["provenance"] = [
            {"epsilon": [list(e) for e in eps], "cone": c.to_json()} for eps, c in self.provenance
        ]
        return out


def _require_good(B: IntMatrix, fan: GenerableSet) -> None:
    if B.nrows != fan.d:
        raise PreconditionError(f"matrix has {B.nrows} rows but the fan lives in Z^{fan.d}")
    bad = sigma_bad(B, fan)
    if bad:
        raise PreconditionError(
            f"B is not good on {len(bad)} cone(s) of the fan; run resolve() first"
        )


def _members(fan: GenerableSet, eps: Sequence[Edge]) -> list[Cone]:
    """Sigma(eps); the empty set of edges is read as the whole fan."""
    return [c for c in fan.cones if all(e in c.edges for e in eps)]


def n_components(B: IntMatrix, fan: GenerableSet) -> list[Label]:
    """Four conormal label families per edge subset lying in a cone."""
    _require_good(B, fan)
    out = []
    for eps in enumerate_epsilon(fan):
        theta = theta_of(B, eps)
        prov = tuple((eps, c) for c in _members(fan, eps))
        for kind in LABEL_KINDS:
            out.append(Label(kind, eps, theta, prov))
    return out


def direct_image_support(B: IntMatrix, fan: GenerableSet) -> list[Label]:
    """Support bound of the pushed-forward conormal family, one label per (kind, theta)."""
    _require_good(B, fan)
    witnesses: dict[tuple[int, ...], list] = {}
    for eps in enumerate_epsilon(fan):
        for c in _members(fan, eps):
            theta = theta_of(B, [e for e in eps if e in c.edges])
            witnesses.setdefault(theta, []).append((eps, c))
    out = [Label(ZERO_SECTION, None, None), Label(INFINITY, None, None)]
    for theta in sorted(witnesses, key=lambda t: (len(t), t)):
        prov = tuple(witnesses[theta])
        out.append(Label(SUPPORT, None, theta, prov))
        out.append(Label(SUPPORT_INF, None, theta, prov))
    return out
