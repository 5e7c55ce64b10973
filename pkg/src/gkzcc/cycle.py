"""Characteristic cycles: the umbrella index set, assembly and specialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .conormal import dim_report
from .divisor import INFINITY, SUPPORT, SUPPORT_INF, ZERO_SECTION, direct_image_support
from .fan import GenerableSet, default_complete_fan, resolve
from .lp import feasible_point
from .matrix import (
    CharacterVector,
    GKZError,
    IntMatrix,
    PreconditionError,
    character_transform,
    check_theta,
    hat,
    is_non_confluent,
    is_p_nondegenerate,
    is_sub_non_confluent,
    p_divide_row,
    require_prime,
    solve_row_lattice,
    square_reduce,
    theta_subsets,
)

UMBRELLA = "umbrella-stratum"
KIND_ORDER = (ZERO_SECTION, INFINITY, UMBRELLA, SUPPORT, SUPPORT_INF)
CHAR0, CHARP = "char0", "charp"


class TrivialCharacter0(PreconditionError):
    """The first component of the character is trivial."""


class NondegeneracyFailure(GKZError):
    """The matrix stays p-degenerate after the permitted reductions."""

    def __init__(self, message: str, failing: list, excess: list):
        super().__init__(message)
        self.failing = failing
        self.excess = excess


class DimensionGateFailure(GKZError):
    """A characteristic-p stratum came out larger than n."""


def theta_str(theta: Sequence[int]) -> str:
    return "{" + ",".join(map(str, theta)) + "}"


def symbol_for(kind: str, theta: Sequence[int] | None) -> str:
    return f"m({theta_str(theta)})" if theta is not None else f"m({kind})"


@dataclass(frozen=True)
class CycleComponent:
    kind: str
    theta: tuple[int, ...] | None
    mult: int | str
    field: str = CHAR0

    def key(self):
        t = self.theta or ()
        return (KIND_ORDER.index(self.kind), self.theta is not None, len(t), t)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.theta is not None:
            out["theta"] = list(self.theta)
        out["mult"] = self.mult
        out["field"] = self.field
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "CycleComponent":
        kind = data["kind"]
        if kind not in KIND_ORDER:
            raise PreconditionError(f"unknown component kind {kind!r}")
        theta = tuple(data["theta"]) if "theta" in data else None
        mult = data["mult"]
        if data["field"] not in (CHAR0, CHARP):
            raise PreconditionError(f"unknown field tag {data['field']!r}")
        return cls(kind, theta, mult, data["field"])


@dataclass(frozen=True)
class Cycle:
    sign_exp: int
    components: tuple[CycleComponent, ...] = ()

    def __post_init__(self):
        merged: dict = {}
        for c in self.components:
            k = (c.kind, c.theta)
            if k not in merged:
                merged[k] = c
                continue
            old = merged[k]
            if old.field != c.field:
                raise PreconditionError(f"component {k} appears with two field tags")
            if isinstance(old.mult, int) and isinstance(c.mult, int):
                merged[k] = replace(old, mult=old.mult + c.mult)
            elif old.mult != c.mult:
                raise PreconditionError(f"cannot add multiplicities {old.mult!r} and {c.mult!r}")
        comps = tuple(sorted(merged.values(), key=CycleComponent.key))
        object.__setattr__(self, "components", comps)

    @property
    def thetas(self) -> list[tuple[int, ...]]:
        return [c.theta for c in self.components if c.theta is not None]

    def to_json(self) -> dict:
        return {"sign_exp": self.sign_exp, "components": [c.to_json() for c in self.components]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: Mapping) -> "Cycle":
        try:
            return cls(int(data["sign_exp"]), tuple(CycleComponent.from_json(c) for c in data["components"]))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed cycle: {exc}") from None

    @classmethod
    def loads(cls, text: str) -> "Cycle":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class MultiplicityTable:
    entries: Mapping[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        for theta, m in self.entries.items():
            if not isinstance(m, int) or isinstance(m, bool) or m < 0:
                raise PreconditionError(f"multiplicity for {theta_str(theta)} must be a nonnegative integer")

    @classmethod
    def from_json(cls, data) -> "MultiplicityTable":
        """Accepts a list of {"theta": [...], "mult": int} objects."""
        if not isinstance(data, list):
            raise PreconditionError("multiplicity table must be a list of {theta, mult} objects")
        out = {}
        for item in data:
            try:
                out[tuple(item["theta"])] = item["mult"]
            except (KeyError, TypeError) as exc:
                raise PreconditionError(f"malformed multiplicity entry: {exc}") from None
        return cls(out)


# -- umbrella -----------------------------------------------------------------

def umbrella(A: IntMatrix) -> list[tuple[int, ...]]:
    """Zero sets of linear functionals that are nonnegative on every column.

    theta qualifies when some h vanishes on the columns in theta and is
    positive on the others (the full set via h = 0), i.e. the faces of the
    column cone, empty face included.  The all-ones row must lie in the row
    lattice; full rank is not required.
    """
    if solve_row_lattice(A, [1] * A.ncols) is None:
        raise PreconditionError("umbrella needs a non-confluent matrix (all-ones row not in the row lattice)")
    cols = A.columns()
    n, m = A.ncols, A.nrows
    out = []
    for theta in theta_subsets(n, include_empty=True):
        if len(theta) == n:
            out.append(theta)
            continue
        eq = [cols[j - 1] for j in theta]
        ge = [cols[j - 1] for j in range(1, n + 1) if j not in theta]
        if feasible_point(eq, [0] * len(eq), ge, [1] * len(ge), m) is not None:
            out.append(theta)
    return out


# -- specialization -----------------------------------------------------------

def specialize(c: Cycle) -> Cycle:
    """Relabel a characteristic-zero cycle as its characteristic-p image."""
    tags = {comp.field for comp in c.components}
    if tags == {CHARP}:
        raise PreconditionError("cycle is already specialized")
    if len(tags) > 1:
        raise PreconditionError("cycle mixes field tags")
    return Cycle(c.sign_exp, tuple(replace(comp, field=CHARP) for comp in c.components))


# -- end-to-end ---------------------------------------------------------------

def _excess(A: IntMatrix, failing, p: int) -> list[dict]:
    out = []
    for theta in failing:
        rep = dim_report(A, theta, 0, p)
        out.append({"theta": list(theta), "k": 0, "dim": rep.dim_exact, "n": A.ncols})
    return out


def _reduce_rows(B: IntMatrix, p: int) -> tuple[IntMatrix, list[int]]:
    divided = []
    for i in range(1, B.nrows + 1):
        if all(x % p == 0 for x in B.rows[i - 1]):
            B = p_divide_row(B, i, p)
            divided.append(i)
    return B, divided


def cc_gkz(
    B: IntMatrix,
    p: int,
    chi: CharacterVector,
    mult: MultiplicityTable | None = None,
) -> tuple[Cycle, dict]:
    """Characteristic cycle of the GKZ sheaf attached to hat(B) over the umbrella.

    Returns the specialized cycle and a report holding the nondegeneracy
    audit, any reduction performed and the twist metadata.
    """
    require_prime(p)
    if not is_sub_non_confluent(B):
        raise PreconditionError("B is not sub-non-confluent: hat(B) must have rank d+1")
    d, n = B.nrows, B.ncols
    if len(chi.exponents) != d + 1:
        raise PreconditionError(f"character needs {d + 1} exponents, got {len(chi.exponents)}")
    if not chi.nontrivial0:
        raise TrivialCharacter0("the first character component is trivial")

    report: dict = {"input": {"B": B.tolist(), "p": p, "character": chi.to_json()}}
    A = hat(B)
    ok, failing = is_p_nondegenerate(A, p)
    report["audit"] = {"p_nondegenerate": ok, "failing": [list(t) for t in failing]}
    reduction: dict | None = None

    if not ok and n == d + 1:
        A2, transcript = square_reduce(A, p)
        chi2 = chi
        for step in transcript.steps:
            chi2 = character_transform(chi2, step.P)
        good, P = is_non_confluent(A2)
        if not good:
            raise NondegeneracyFailure("reduced matrix is not non-confluent", failing, [])
        chi2 = character_transform(chi2, P)
        A = P @ A2
        B = IntMatrix(A.rows[1:])
        reduction = {
            "method": "square",
            "transcript": transcript.to_json(),
            "standardize": P.tolist(),
            "character": chi2.to_json(),
        }
        chi = chi2
        if not chi.nontrivial0:
            raise TrivialCharacter0("the first character component became trivial after reduction")
    elif not ok:
        B2, divided = _reduce_rows(B, p)
        if divided:
            B = B2
            A = hat(B)
            reduction = {"method": "row-division", "B_rows": divided, "B": B.tolist()}

    if reduction is not None:
        ok, failing = is_p_nondegenerate(A, p)
        reduction["p_nondegenerate"] = ok
        reduction["failing"] = [list(t) for t in failing]
    report["reduction"] = reduction

    if not ok:
        excess = _excess(A, failing, p)
        worst = [e for e in excess if e["dim"] > e["n"]]
        shown = worst or excess
        detail = "; ".join(f"theta={theta_str(e['theta'])}: dim S_0 = {e['dim']} > {e['n']}" for e in shown)
        raise NondegeneracyFailure(
            f"hat(B) is not {p}-nondegenerate and no permitted reduction repairs it; {detail}",
            failing,
            excess,
        )

    strata = umbrella(A)
    table = dict(mult.entries) if mult else {}
    for theta in table:
        check_theta(theta, n)
        if tuple(theta) not in strata:
            raise PreconditionError(f"multiplicity given for {theta_str(theta)}, which is not an umbrella member")
    comps = tuple(
        CycleComponent(UMBRELLA, theta, table.get(theta, symbol_for(UMBRELLA, theta)), CHAR0)
        for theta in strata
    )
    cycle0 = Cycle(0, comps)
    cycle = specialize(cycle0)

    gate = []
    for theta in strata:
        if not theta:
            continue
        for k in range(n + 1):
            rep = dim_report(A, theta, k, p)
            if rep.dim_exact != n:
                gate.append(rep.to_json())
    if gate:
        raise DimensionGateFailure(f"{len(gate)} characteristic-p strata exceed dimension {n}")

    report["final"] = {"B": B.tolist(), "A": A.tolist(), "character": chi.to_json()}
    report["umbrella"] = [list(t) for t in strata]
    report["metadata"] = {
        "twist": "G(chi_0, psi)",
        "shift": d + n,
        "z": {"order": chi.order, "exponents": list(chi.exponents)},
    }
    return cycle, report


def cc_via_resolution(B: IntMatrix, fan: GenerableSet | None = None) -> tuple[Cycle, dict]:
    """Support-level cycle from a resolution of the divisor of B."""
    if not is_sub_non_confluent(B):
        raise PreconditionError("B is not sub-non-confluent: hat(B) must have rank d+1")
    d, n = B.nrows, B.ncols
    start = fan or default_complete_fan(d)
    final, records = resolve(B, start)
    labels = direct_image_support(B, final)
    comps = tuple(
        CycleComponent(lab.kind, lab.theta, symbol_for(lab.kind, lab.theta), CHARP) for lab in labels
    )
    trace = {
        "start": start.to_json(),
        "fan": final.to_json(),
        "blowups": [r.to_json() for r in records],
        "labels": [lab.to_json() for lab in labels],
    }
    return Cycle(d + n, comps), trace
