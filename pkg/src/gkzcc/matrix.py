"""Exact integer linear algebra for GKZ matrices.

Everything here works on Python integers; there is no floating point
anywhere.  Row and column indices exposed to callers are 1-based, matching
the usual way the matrices ``A``, ``B`` and their column subsets are written
down; internal helpers use 0-based lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class GKZError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(GKZError, ValueError):
    """An operation was called on input violating its precondition."""


class IntMatrix:
    """Immutable arbitrary-precision integer matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise PreconditionError("matrix must have at least one row and one column")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise PreconditionError("ragged matrix literal")
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise PreconditionError(f"non-integer entry {x!r}")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = width

    @classmethod
    def from_json(cls, data) -> "IntMatrix":
        """Build from a row-major JSON array; a flat list is read as one row."""
        if not isinstance(data, list) or not data:
            raise PreconditionError("matrix literal must be a non-empty array")
        if all(isinstance(x, int) and not isinstance(x, bool) for x in data):
            data = [data]
        for r in data:
            if not isinstance(r, list) or not all(
                isinstance(x, int) and not isinstance(x, bool) for x in r
            ):
                raise PreconditionError("matrix entries must be integers")
        return cls(data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        """Column ``j`` (0-based)."""
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.rows))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise PreconditionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows]
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"


def _as_lists(M: IntMatrix | Sequence[Sequence[int]]) -> list[list[int]]:
    if isinstance(M, IntMatrix):
        return M.tolist()
    return [list(r) for r in M]


# -- primality and small number theory ---------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin (exact for p < 3.3e24)."""
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def require_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        raise PreconditionError(f"{p!r} is not a prime")


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def val_p(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise PreconditionError("valuation of zero is undefined")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# -- ranks and determinants ---------------------------------------------------

def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place; returns (rank, signed last pivot).

    For a square nonsingular input the second value is the determinant.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    prev = 1
    sign = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        pr = rows[r]
        a = pr[c]
        for i in range(r + 1, m):
            ri = rows[i]
            b = ri[c]
            for j in range(c + 1, n):
                ri[j] = (a * ri[j] - b * pr[j]) // prev
            ri[c] = 0
        prev = a
        r += 1
    return r, sign * prev


def rank_rational(M: IntMatrix | Sequence[Sequence[int]]) -> int:
    """Rank over the rationals, by fraction-free (Bareiss) elimination."""
    rows = _as_lists(M)
    if not rows or not rows[0]:
        return 0
    return _bareiss(rows)[0]


def determinant(M: IntMatrix | Sequence[Sequence[int]]) -> int:
    rows = _as_lists(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise PreconditionError("determinant of a non-square matrix")
    r, d = _bareiss(rows)
    return d if r == n else 0


def _rref_mod_p(rows: list[list[int]], p: int) -> list[int]:
    """Reduced row echelon form over F_p in place; returns pivot columns."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    for row in rows:
        for j in range(n):
            row[j] %= p
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank_mod_p(M: IntMatrix | Sequence[Sequence[int]], p: int) -> int:
    """Rank of ``M mod p`` over the field with ``p`` elements."""
    require_prime(p)
    rows = _as_lists(M)
    if not rows or not rows[0]:
        return 0
    return len(_rref_mod_p(rows, p))


def pivot_columns_mod_p(M: IntMatrix | Sequence[Sequence[int]], p: int) -> list[int]:
    """Leftmost pivot columns (0-based) of the mod-p echelon form."""
    rows = _as_lists(M)
    return _rref_mod_p(rows, p)


def pivot_columns_rational(M: IntMatrix | Sequence[Sequence[int]]) -> list[int]:
    """Leftmost pivot columns (0-based) of the rational echelon form."""
    rows = _as_lists(M)
    m = len(rows)
    pivots = []
    r = 0
    n = len(rows[0]) if m else 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        a = rows[r][c]
        for i in range(r + 1, m):
            b = rows[i][c]
            rows[i] = [(a * x - b * y) // prev for x, y in zip(rows[i], rows[r])]
        prev = a
        pivots.append(c)
        r += 1
    return pivots


def nullspace_mod_p(M: IntMatrix | Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Basis (in RREF, leftmost pivots) of {x : M x = 0 mod p}."""
    rows = _as_lists(M)
    n = len(rows[0])
    pivots = _rref_mod_p(rows, p)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f] % p
        basis.append(v)
    if not basis:
        return []
    _rref_mod_p(basis, p)
    return [b for b in basis if any(b)]


# -- column subsets -----------------------------------------------------------

def theta_subsets(n: int, include_empty: bool = False) -> Iterator[tuple[int, ...]]:
    """Subsets of {1..n}: smallest cardinality first, then lexicographic."""
    start = 0 if include_empty else 1
    for size in range(start, n + 1):
        yield from combinations(range(1, n + 1), size)


def check_theta(theta: Iterable[int], n: int) -> tuple[int, ...]:
    theta = tuple(theta)
    if list(theta) != sorted(set(theta)):
        raise PreconditionError(f"theta {theta} must be strictly increasing")
    if any(not 1 <= j <= n for j in theta):
        raise PreconditionError(f"theta {theta} out of range 1..{n}")
    return theta


def column_submatrix(M: IntMatrix, theta: Iterable[int]) -> IntMatrix:
    """Columns of ``M`` indexed by the (1-based) members of ``theta``."""
    theta = check_theta(theta, M.ncols)
    if not theta:
        raise PreconditionError("column_submatrix needs a nonempty theta")
    return IntMatrix([[r[j - 1] for j in theta] for r in M.rows])


def hat(B: IntMatrix) -> IntMatrix:
    """Prepend the all-ones row."""
    return IntMatrix([(1,) * B.ncols, *B.rows])


def is_sub_non_confluent(B: IntMatrix) -> bool:
    return rank_rational(hat(B)) == B.nrows + 1


# -- Hermite normal form and lattices -----------------------------------------

def hermite_normal_form(M: IntMatrix | Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U M = H``; ``H`` is in row
    echelon form with positive pivots and entries above each pivot reduced
    into ``[0, pivot)``.  Zero rows of ``H`` sit at the bottom.
    """
    H = _as_lists(M)
    m = len(H)
    n = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            b = H[i][c]
            if b == 0:
                continue
            a = H[r][c]
            g, s, t = xgcd(a, b)
            ag, bg = a // g, b // g
            for X in (H, U):
                xr, xi = X[r], X[i]
                X[r] = [s * u + t * v for u, v in zip(xr, xi)]
                X[i] = [-bg * u + ag * v for u, v in zip(xr, xi)]
        a = H[r][c]
        if a == 0:
            continue
        if a < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
            a = -a
        for i in range(r):
            q = H[i][c] // a
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def solve_row_lattice(M: IntMatrix, target: Sequence[int]) -> list[int] | None:
    """Integer ``y`` with ``y M = target``, or ``None`` if target is not in the row lattice."""
    H, U = hermite_normal_form(M)
    rest = list(target)
    z = [0] * len(H)
    for i, row in enumerate(H):
        c = next((j for j, x in enumerate(row) if x), None)
        if c is None:
            break
        q, rem = divmod(rest[c], row[c])
        if rem:
            return None
        z[i] = q
        if q:
            rest = [x - q * y for x, y in zip(rest, row)]
    if any(rest):
        return None
    m = len(U)
    return [sum(z[i] * U[i][j] for i in range(m)) for j in range(m)]


def integer_kernel_basis(M: IntMatrix) -> list[list[int]]:
    """Canonical (Hermite-reduced) basis of the integer kernel {w : M w = 0}."""
    H, U = hermite_normal_form(M.transpose())
    basis = [U[i] for i, row in enumerate(H) if not any(row)]
    if not basis:
        return []
    K, _ = hermite_normal_form(basis)
    return [row for row in K if any(row)]


def complete_to_unimodular(row: Sequence[int]) -> IntMatrix:
    """Unimodular matrix whose first row is the given primitive vector.

    Column operations driven by extended gcds reduce ``row`` to ``(1, 0, ..., 0)``
    (its Hermite form as a 1-row matrix); the inverse of the accumulated
    transform has ``row`` as its first row.
    """
    y = list(row)
    m = len(y)
    W = [[int(i == j) for j in range(m)] for i in range(m)]
    for j in range(1, m):
        a, b = y[0], y[j]
        if b == 0:
            continue
        g, s, t = xgcd(a, b)
        ag, bg = a // g, b // g
        y[0], y[j] = g, 0
        w0, wj = W[0], W[j]
        W[0] = [ag * u + bg * v for u, v in zip(w0, wj)]
        W[j] = [-t * u + s * v for u, v in zip(w0, wj)]
    if y[0] == -1:
        W[0] = [-x for x in W[0]]
        y[0] = 1
    if y[0] != 1:
        raise PreconditionError(f"{list(row)} is not primitive")
    assert W[0] == list(row)
    return IntMatrix(W)


def is_non_confluent(A: IntMatrix) -> tuple[bool, IntMatrix | None]:
    """Decide whether a unimodular ``P`` makes the first row of ``P A`` all ones.

    Criterion: ``A`` has full row rank and the all-ones vector lies in the row
    lattice of ``A`` and is primitive there.  On success the witness ``P`` is
    returned; its first row is the lattice coefficient vector of the ones row.
    """
    n = A.ncols
    if rank_rational(A) != A.nrows:
        return False, None
    ones = [1] * n
    y = solve_row_lattice(A, ones)
    if y is None:
        return False, None
    # (1,...,1)/g is integral only for g = 1, so membership already implies
    # primitivity; y itself is then primitive because A has full row rank
    P = complete_to_unimodular(y)
    assert (P @ A).rows[0] == tuple(ones)
    return True, P


def standardize(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Return ``(P, P A)`` with ``P A`` standard (first row all ones)."""
    ok, P = is_non_confluent(A)
    if not ok:
        raise PreconditionError("matrix is not non-confluent")
    return P, P @ A


# -- p-nondegeneracy and reduction -------------------------------------------

def is_p_nondegenerate(A: IntMatrix, p: int) -> tuple[bool, list[tuple[int, ...]]]:
    """Compare rational and mod-p ranks of every nonempty column subset.

    Returns the verdict and all failing subsets in deterministic order
    (cardinality first, then lexicographic).
    """
    require_prime(p)
    cols = A.columns()
    failing = []
    for theta in theta_subsets(A.ncols):
        sub = [[cols[j - 1][i] for j in theta] for i in range(A.nrows)]
        if rank_rational(sub) != rank_mod_p(sub, p):
            failing.append(theta)
    return not failing, failing


def p_divide_row(A: IntMatrix, i: int, p: int) -> IntMatrix:
    """Divide row ``i`` (1-based) exactly by ``p``."""
    if not 1 <= i <= A.nrows:
        raise PreconditionError(f"row {i} out of range")
    row = A.rows[i - 1]
    if any(x % p for x in row):
        raise PreconditionError(f"row {i} is not divisible by {p}")
    rows = list(A.rows)
    rows[i - 1] = tuple(x // p for x in row)
    return IntMatrix(rows)


@dataclass(frozen=True)
class ReductionStep:
    P: IntMatrix
    divided_row: int = 1


@dataclass(frozen=True)
class ReductionTranscript:
    initial: IntMatrix
    final: IntMatrix
    p: int
    steps: tuple[ReductionStep, ...] = ()

    def replay(self) -> IntMatrix:
        A = self.initial
        for st in self.steps:
            A = p_divide_row(st.P @ A, st.divided_row, self.p)
        return A

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "initial": self.initial.tolist(),
            "final": self.final.tolist(),
            "steps": [{"P": s.P.tolist(), "divided_row": s.divided_row} for s in self.steps],
        }


def square_reduce(A: IntMatrix, p: int) -> tuple[IntMatrix, ReductionTranscript]:
    """Strip the p-part of ``det A`` one factor at a time.

    Each step takes the lexicographically smallest nonzero vector ``x`` of the
    mod-p left kernel (coordinates in ``[0, p)``), completes it to a unimodular
    ``P``, and divides the first row of ``P A`` by ``p``.
    """
    require_prime(p)
    if A.nrows != A.ncols:
        raise PreconditionError("square_reduce needs a square matrix")
    det = determinant(A)
    if det == 0:
        raise PreconditionError("square_reduce needs a nonsingular matrix")
    steps = []
    cur = A
    for _ in range(val_p(det, p)):
        kernel = nullspace_mod_p(cur.transpose(), p)
        # the last RREF row has the most leading zeros and a leading 1
        x = kernel[-1]
        P = complete_to_unimodular(x)
        cur = p_divide_row(P @ cur, 1, p)
        steps.append(ReductionStep(P, 1))
    return cur, ReductionTranscript(A, cur, p, tuple(steps))


# -- characters ---------------------------------------------------------------

@dataclass(frozen=True)
class CharacterVector:
    """Multiplicative character of mu_{q-1}^{d+1} as an exponent vector."""

    order: int
    exponents: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.order < 1:
            raise PreconditionError("character order must be positive")
        exps = tuple(int(e) for e in self.exponents)
        if not exps:
            raise PreconditionError("character needs at least one exponent")
        if any(not 0 <= e < self.order for e in exps):
            raise PreconditionError(f"exponents {exps} must lie in [0, {self.order})")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def reduced(cls, order: int, exponents: Iterable[int]) -> "CharacterVector":
        return cls(order, tuple(e % order for e in exponents))

    @property
    def nontrivial0(self) -> bool:
        return self.exponents[0] % self.order != 0

    def to_json(self) -> dict:
        return {"order": self.order, "exponents": list(self.exponents)}


def character_transform(chi: CharacterVector, M: IntMatrix) -> CharacterVector:
    """Exponents of chi^M: ``e'_i = sum_k m_ik e_k`` mod the order."""
    d1 = len(chi.exponents)
    if M.shape != (d1, d1):
        raise PreconditionError(f"character of length {d1} needs a {d1}x{d1} matrix")
    return CharacterVector.reduced(
        chi.order, [sum(m * e for m, e in zip(row, chi.exponents)) for row in M.rows]
    )


def to_fractions(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in r] for r in rows]


def inverse_unimodular(M: IntMatrix | Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact inverse of an integer matrix with determinant +-1, as det * adjugate."""
    rows = _as_lists(M)
    n = len(rows)
    det = determinant(rows)
    if det == 0:
        raise PreconditionError("matrix is singular")
    if abs(det) != 1:
        raise PreconditionError("matrix is not unimodular")
    if n == 1:
        return [[det]]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            out[j][i] = det * (-1) ** (i + j) * determinant(minor)
    return out
