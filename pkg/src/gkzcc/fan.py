"""Nonsingular fans, the edge pairing and resolution by standard blow-ups."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from math import gcd
from typing import Iterable, Sequence

from .lp import nonneg_solution
from .matrix import GKZError, IntMatrix, PreconditionError, determinant, inverse_unimodular

Edge = tuple[int, ...]


class ResolutionError(GKZError):
    """The resolution loop exceeded its step budget."""


def make_edge(v: Iterable[int]) -> Edge:
    v = tuple(v)
    if not v or any(not isinstance(x, int) or isinstance(x, bool) for x in v):
        raise PreconditionError(f"edge {v!r} must be a non-empty integer vector")
    if reduce(gcd, v, 0) != 1:
        raise PreconditionError(f"edge {v} is not a primitive nonzero vector")
    return v


@dataclass(frozen=True)
class Cone:
    """A full-dimensional nonsingular cone, given by its ordered edges."""

    edges: tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple(make_edge(e) for e in self.edges)
        d = len(edges)
        if d == 0 or any(len(e) != d for e in edges):
            raise PreconditionError("a cone in Z^d needs exactly d edges of length d")
        if len(set(edges)) != d:
            raise PreconditionError(f"repeated edge in cone {edges}")
        if abs(determinant(edges)) != 1:
            raise PreconditionError(f"cone {edges} is not nonsingular")
        object.__setattr__(self, "edges", edges)

    @property
    def d(self) -> int:
        return len(self.edges)

    def __contains__(self, e: Edge) -> bool:
        return e in self.edges

    def to_json(self) -> list[list[int]]:
        return [list(e) for e in self.edges]


@dataclass(frozen=True)
class GenerableSet:
    """An ordered list of d-dimensional nonsingular cones (a fan's maximal cones)."""

    d: int
    cones: tuple[Cone, ...]

    def __post_init__(self):
        cones = tuple(c if isinstance(c, Cone) else Cone(tuple(map(tuple, c))) for c in self.cones)
        for c in cones:
            if c.d != self.d:
                raise PreconditionError(f"cone {c.edges} does not live in Z^{self.d}")
        object.__setattr__(self, "cones", cones)

    def edges(self) -> list[Edge]:
        """E(Sigma) in sorted order."""
        return sorted({e for c in self.cones for e in c.edges})

    def star(self, e: Edge) -> list[Cone]:
        """Sigma(e): the cones having ``e`` as an edge."""
        return [c for c in self.cones if e in c.edges]

    def to_json(self) -> dict:
        return {"d": self.d, "cones": [c.to_json() for c in self.cones]}

    @classmethod
    def from_json(cls, data) -> "GenerableSet":
        try:
            d = data["d"]
            cones = [Cone(tuple(tuple(v) for v in c)) for c in data["cones"]]
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed fan: {exc}") from None
        if not isinstance(d, int) or d < 1 or not cones:
            raise PreconditionError("fan needs d >= 1 and at least one cone")
        return cls(d, tuple(cones))


@dataclass(frozen=True)
class BlowupRecord:
    eps1: Edge
    eps2: Edge
    eps_ex: Edge
    replaced: tuple[Cone, ...]
    created: tuple[Cone, ...]
    pair: tuple[int, int] | None = None
    before: tuple[int, int] | None = None  # (mu, nu) of the subproblem
    after: tuple[int, int] | None = None

    def to_json(self) -> dict:
        out = {
            "eps1": list(self.eps1),
            "eps2": list(self.eps2),
            "eps_ex": list(self.eps_ex),
            "replaced": [c.to_json() for c in self.replaced],
            "created": [c.to_json() for c in self.created],
        }
        if self.pair is not None:
            out["pair"] = list(self.pair)
            out["mu_nu_before"] = list(self.before)
            out["mu_nu_after"] = list(self.after)
        return out


# -- pairing and goodness -----------------------------------------------------

def dual_basis(sigma: Cone) -> list[tuple[int, ...]]:
    """Rows of (V^-1)^T: u_e with <v_e', u_e> = [e == e']."""
    inv = inverse_unimodular(sigma.edges)
    return [tuple(r) for r in zip(*inv)]


def edge_pairing(B: IntMatrix, e: Sequence[int]) -> tuple[int, ...]:
    """b_e = (<v_e, column i of B>)_i."""
    if len(e) != B.nrows:
        raise PreconditionError(f"edge of length {len(e)} against a matrix with {B.nrows} rows")
    return tuple(sum(v * b for v, b in zip(e, col)) for col in zip(*B.rows))


def _pairings(B: IntMatrix, sigma: Cone) -> list[tuple[int, ...]]:
    return [edge_pairing(B, e) for e in sigma.edges]


def is_sigma_good(B: IntMatrix, sigma: Cone) -> tuple[bool, tuple[int, ...] | None]:
    """Do all edges of ``sigma`` order the columns the same way?

    Returns the verdict and, when good, the sorting permutation (1-based,
    ties broken by column index).
    """
    rows = _pairings(B, sigma)
    n = B.ncols
    for i, j in combinations(range(n), 2):
        signs = {(r[i] > r[j]) - (r[i] < r[j]) for r in rows}
        if 1 in signs and -1 in signs:
            return False, None
    gamma = sorted(range(n), key=lambda i: (tuple(r[i] for r in rows), i))
    return True, tuple(i + 1 for i in gamma)


def sigma_bad(B: IntMatrix, fan: GenerableSet) -> list[Cone]:
    return [c for c in fan.cones if not is_sigma_good(B, c)[0]]


def is_fan_good(B: IntMatrix, fan: GenerableSet) -> bool:
    return not sigma_bad(B, fan)


# -- fan structure ------------------------------------------------------------

def cones_meet_properly(s1: Cone, s2: Cone) -> bool:
    """Is s1 n s2 the cone on their common edges (a face of both)?

    Writing the extra edges T of s1 in the basis of s2, the intersection is
    larger than the common face exactly when some nonzero nonnegative
    combination of T has nonnegative coordinates on the extra edges T' of s2.
    """
    common = set(s1.edges) & set(s2.edges)
    T = [e for e in s1.edges if e not in common]
    if not T:
        return True
    duals = dual_basis(s2)
    rows = [u for w, u in zip(s2.edges, duals) if w not in common]
    N = [[sum(a * b for a, b in zip(u, v)) for v in T] for u in rows]
    cols = list(zip(*N))
    if any(all(x >= 0 for x in col) for col in cols):
        return False
    if all(sum(col) < 0 for col in cols):
        return True
    t, k = len(T), len(rows)
    A = [[1] * t + [0] * k]
    A += [list(r) + [-int(i == j) for j in range(k)] for i, r in enumerate(N)]
    return nonneg_solution(A, [1] + [0] * k) is None


def is_generable(cones: Iterable[Cone]) -> bool:
    cones = list(cones)
    return all(cones_meet_properly(a, b) for a, b in combinations(cones, 2))


def is_complete(fan: GenerableSet) -> bool:
    """Every codimension-one face lies in exactly two cones."""
    count: dict[frozenset, int] = {}
    for c in fan.cones:
        for face in combinations(c.edges, fan.d - 1):
            key = frozenset(face)
            count[key] = count.get(key, 0) + 1
    return all(v == 2 for v in count.values())


def default_complete_fan(d: int) -> GenerableSet:
    """The 2^d coordinate orthants."""
    if d < 1:
        raise PreconditionError("dimension must be at least 1")
    cones = []
    for signs in product((1, -1), repeat=d):
        cones.append(Cone(tuple(tuple(s if i == j else 0 for j in range(d)) for i, s in enumerate(signs))))
    return GenerableSet(d, tuple(cones))


def standard_blowup(fan: GenerableSet, e1: Edge, e2: Edge) -> tuple[GenerableSet, BlowupRecord]:
    """Star subdivision at v_e1 + v_e2."""
    e1, e2 = tuple(e1), tuple(e2)
    if e1 == e2:
        raise PreconditionError("blow-up needs two distinct edges")
    ex = tuple(a + b for a, b in zip(e1, e2))
    replaced, created, out = [], [], []
    for c in fan.cones:
        if e1 in c.edges and e2 in c.edges:
            c1 = Cone(tuple(ex if e == e2 else e for e in c.edges))
            c2 = Cone(tuple(ex if e == e1 else e for e in c.edges))
            replaced.append(c)
            created += [c1, c2]
            out += [c1, c2]
        else:
            out.append(c)
    if not replaced:
        raise PreconditionError(f"edges {e1} and {e2} share no cone")
    new = GenerableSet(fan.d, tuple(out))
    return new, BlowupRecord(e1, e2, ex, tuple(replaced), tuple(created))


# -- two-column measures and resolution ---------------------------------------

@dataclass(frozen=True)
class MuNu:
    mu: int
    nu: int
    worst: tuple[Edge, ...]  # E_B(Sigma)
    opposite: dict = field(default_factory=dict)  # E_B(Sigma, e) for e in worst


def _gap(B: IntMatrix, e: Edge) -> int:
    b = edge_pairing(B, e)
    return b[0] - b[1]


def mu_nu(B: IntMatrix, fan: GenerableSet) -> MuNu:
    if B.ncols != 2:
        raise PreconditionError("mu/nu are defined for two-column matrices")
    bad = sigma_bad(B, fan)
    if not bad:
        return MuNu(0, 0, (), {})
    bad_edges = sorted({e for c in bad for e in c.edges})
    gap = {e: _gap(B, e) for e in bad_edges}
    mu = max(abs(g) for g in gap.values())
    worst = tuple(e for e in bad_edges if abs(gap[e]) == mu)
    opposite = {}
    for e in worst:
        near = {f for c in fan.star(e) for f in c.edges}
        opposite[e] = tuple(f for f in bad_edges if f in near and gap[e] * gap[f] < 0)
    nu = sum(len(v) for v in opposite.values())
    return MuNu(mu, nu, worst, opposite)


def b_good_blowup_step(B: IntMatrix, fan: GenerableSet) -> tuple[GenerableSet, BlowupRecord]:
    """One B-good blow-up; lexicographically smallest choice of (e1, e2)."""
    m = mu_nu(B, fan)
    if not m.worst:
        raise PreconditionError("matrix is already good on this fan")
    e1 = min(e for e in m.worst if m.opposite[e])
    cands = m.opposite[e1]
    top = max(abs(_gap(B, f)) for f in cands)
    e2 = min(f for f in cands if abs(_gap(B, f)) == top)
    return standard_blowup(fan, e1, e2)


def column_pair(B: IntMatrix, i: int, j: int) -> IntMatrix:
    """B[i;j], the two-column submatrix (1-based)."""
    return IntMatrix([[r[i - 1], r[j - 1]] for r in B.rows])


def bad_pairs(B: IntMatrix, fan: GenerableSet) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i, j in combinations(range(1, B.ncols + 1), 2)
        if sigma_bad(column_pair(B, i, j), fan)
    ]


class _Workspace:
    """Mutable fan with an edge index, used by ``resolve``.

    Cones carry a path key (original position, then 0/1 per subdivision) so
    that sorting by key reproduces the in-place order of ``standard_blowup``.
    """

    def __init__(self, B: IntMatrix, fan: GenerableSet):
        self.B = B
        self.cones: dict[tuple, Cone] = {(i,): c for i, c in enumerate(fan.cones)}
        self.by_edge: dict[Edge, set] = {}
        for key, c in self.cones.items():
            for e in c.edges:
                self.by_edge.setdefault(e, set()).add(key)
        self._pairing: dict[Edge, tuple[int, ...]] = {}
        self.gap: dict[Edge, int] = {}
        self.bad: set = set()
        self.bad_count: dict[Edge, int] = {}

    def pairing(self, e: Edge) -> tuple[int, ...]:
        b = self._pairing.get(e)
        if b is None:
            b = self._pairing[e] = edge_pairing(self.B, e)
        return b

    def fan(self) -> GenerableSet:
        return GenerableSet(self.B.nrows, tuple(self.cones[k] for k in sorted(self.cones)))

    def bad_pairs(self) -> list[tuple[int, int]]:
        out = set()
        n = self.B.ncols
        for c in self.cones.values():
            rows = [self.pairing(e) for e in c.edges]
            for i, j in combinations(range(n), 2):
                if (i + 1, j + 1) in out:
                    continue
                signs = {(r[i] > r[j]) - (r[i] < r[j]) for r in rows}
                if 1 in signs and -1 in signs:
                    out.add((i + 1, j + 1))
        return sorted(out)

    # -- two-column subproblem

    def focus(self, i: int, j: int) -> None:
        self.pair = (i - 1, j - 1)
        self.gap = {e: self._gap(e) for e in self.by_edge}
        self.opp: dict[Edge, tuple[Edge, ...]] = {}  # cached E_B(Sigma, e)
        self.deps: dict[Edge, set] = {}  # f -> edges whose cached opp looked at f
        self.flipped: set = set()  # edges whose bad status changed
        self.bad = set()
        self.bad_count = {}
        self.level: dict[int, set] = {}  # |gap| -> bad edges
        for key, c in self.cones.items():
            if self._sub_bad(c):
                self._mark_bad(key, c)

    def _gap(self, e: Edge) -> int:
        b = self.pairing(e)
        return b[self.pair[0]] - b[self.pair[1]]

    def g(self, e: Edge) -> int:
        return self.gap[e]

    def _sub_bad(self, c: Cone) -> bool:
        pos = neg = False
        gap = self.gap
        for e in c.edges:
            x = gap[e]
            if x > 0:
                pos = True
            elif x < 0:
                neg = True
        return pos and neg

    def _mark_bad(self, key, c: Cone) -> None:
        self.bad.add(key)
        for e in c.edges:
            n = self.bad_count.get(e, 0)
            self.bad_count[e] = n + 1
            if not n:
                self.flipped.add(e)
                self.level.setdefault(abs(self.gap[e]), set()).add(e)

    def _unmark_bad(self, key, c: Cone) -> None:
        self.bad.discard(key)
        for e in c.edges:
            self.bad_count[e] -= 1
            if not self.bad_count[e]:
                del self.bad_count[e]
                self.flipped.add(e)
                a = abs(self.gap[e])
                self.level[a].discard(e)
                if not self.level[a]:
                    del self.level[a]

    def mu_nu(self) -> MuNu:
        if not self.bad:
            return MuNu(0, 0, (), {})
        mu = max(self.level)
        worst = tuple(sorted(self.level[mu]))
        gap, bad_edges, cones = self.gap, self.bad_count, self.cones
        opposite = {}
        for e in worst:
            o = self.opp.get(e)
            if o is None:
                ge = gap[e]
                near = {f for key in self.by_edge[e] for f in cones[key].edges}
                for f in near:
                    self.deps.setdefault(f, set()).add(e)
                o = self.opp[e] = tuple(sorted(f for f in near if f in bad_edges and ge * gap[f] < 0))
            opposite[e] = o
        return MuNu(mu, sum(len(v) for v in opposite.values()), worst, opposite)

    def blowup(self, e1: Edge, e2: Edge) -> BlowupRecord:
        ex = tuple(a + b for a, b in zip(e1, e2))
        if ex not in self.gap:
            self.gap[ex] = self._gap(ex)
        keys = sorted(self.by_edge[e1] & self.by_edge[e2])
        if not keys:
            raise PreconditionError(f"edges {e1} and {e2} share no cone")
        replaced, created = [], []
        touched = set()
        self.flipped = set()
        for key in keys:
            c = self.cones.pop(key)
            touched.update(c.edges)
            for e in c.edges:
                self.by_edge[e].discard(key)
            if key in self.bad:
                self._unmark_bad(key, c)
            replaced.append(c)
            kids = (
                _trusted_cone(tuple(ex if e == e2 else e for e in c.edges)),
                _trusted_cone(tuple(ex if e == e1 else e for e in c.edges)),
            )
            for t, kid in enumerate(kids):
                touched.update(kid.edges)
                kk = key + (t,)
                self.cones[kk] = kid
                for e in kid.edges:
                    self.by_edge.setdefault(e, set()).add(kk)
                if self._sub_bad(kid):
                    self._mark_bad(kk, kid)
                created.append(kid)
        # a cached neighbour list goes stale when the star of its edge
        # changes (edge touched) or a neighbour changes bad status
        for f in touched:
            self.opp.pop(f, None)
        for f in self.flipped:
            for e in self.deps.pop(f, ()):
                self.opp.pop(e, None)
        return BlowupRecord(e1, e2, ex, tuple(replaced), tuple(created))


def _trusted_cone(edges: tuple[Edge, ...]) -> Cone:
    # star subdivision of a nonsingular cone at v1 + v2 keeps |det| = 1
    c = object.__new__(Cone)
    object.__setattr__(c, "edges", edges)
    return c


def resolve(
    B: IntMatrix, fan: GenerableSet, check_complete: bool = True
) -> tuple[GenerableSet, list[BlowupRecord]]:
    """Blow up until B is good on every cone.

    Bad column pairs are handled in lexicographic order; each is driven to
    goodness by B-good blow-ups (same choice as ``b_good_blowup_step``)
    before the list of bad pairs is recomputed.
    """
    if B.nrows != fan.d:
        raise PreconditionError(f"matrix has {B.nrows} rows but the fan lives in Z^{fan.d}")
    if check_complete and not is_complete(fan):
        raise PreconditionError("starting fan is not complete")
    ws = _Workspace(B, fan)
    pairs = ws.bad_pairs()
    records: list[BlowupRecord] = []
    while pairs:
        i, j = pairs[0]
        ws.focus(i, j)
        before = ws.mu_nu()
        # budget for this pair, measured on the fan it starts from; earlier
        # pairs refine the fan and can raise mu well above its initial value
        cap = len(records) + 10 * before.mu * len(ws.by_edge) ** 2
        while before.mu:
            if len(records) >= cap:
                raise ResolutionError(
                    f"resolution exceeded its blow-up budget on pair {(i, j)}; mu={before.mu}, nu={before.nu}"
                )
            e1 = min(e for e in before.worst if before.opposite[e])
            cands = before.opposite[e1]
            top = max(abs(ws.g(f)) for f in cands)
            e2 = min(f for f in cands if abs(ws.g(f)) == top)
            rec = ws.blowup(e1, e2)
            after = ws.mu_nu()
            records.append(
                BlowupRecord(
                    rec.eps1, rec.eps2, rec.eps_ex, rec.replaced, rec.created,
                    (i, j), (before.mu, before.nu), (after.mu, after.nu),
                )
            )
            before = after
        pairs = ws.bad_pairs()
    return ws.fan(), records


def replay(fan: GenerableSet, records: Sequence[BlowupRecord]) -> GenerableSet:
    for r in records:
        fan, _ = standard_blowup(fan, r.eps1, r.eps2)
    return fan
