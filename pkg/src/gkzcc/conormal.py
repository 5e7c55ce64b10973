"""Generators and dimensions of the local conormal pieces S_k(A, theta).

Chart ``k`` (0 <= k <= n) has coordinates ``x_j = X_j/X_k`` and
``xi_j = xi(X_j/X_k)`` for ``j != k``.  Where a formula asks for ``xi_k`` in
its own chart it stands for ``-sum_{m != k} x_m xi_m``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import (
    GKZError,
    IntMatrix,
    PreconditionError,
    check_theta,
    column_submatrix,
    integer_kernel_basis,
    pivot_columns_mod_p,
    rank_mod_p,
    rank_rational,
    require_prime,
)
from .poly import XI, X, Poly, x, xi

XI_FAMILY, L_FAMILY, BOX_FAMILY, XI_INF_FAMILY = "Xi", "L", "Box", "XiInf"


@dataclass(frozen=True)
class GeneratorSet:
    chart: int
    family: str
    generators: tuple[Poly, ...]

    def render(self, unicode: bool = False) -> list[str]:
        return [g.render(unicode) for g in self.generators]

    def to_json(self) -> dict:
        return {"chart": self.chart, "family": self.family, "generators": self.render()}


def _check(A: IntMatrix, theta: Sequence[int], k: int) -> tuple[int, ...]:
    theta = check_theta(theta, A.ncols)
    if not 0 <= k <= A.ncols:
        raise PreconditionError(f"chart {k} out of range 0..{A.ncols}")
    return theta


def own_xi(n: int, k: int) -> Poly:
    """xi_k in chart k: minus the Euler sum over the other coordinates."""
    out = Poly()
    for m in range(n + 1):
        if m != k:
            out = out - x(m) * xi(m)
    return out


def _xi_var(n: int, k: int, j: int) -> Poly:
    return own_xi(n, k) if j == k else xi(j)


def _xj_xij(n: int, k: int, j: int) -> Poly:
    # x_k = 1 in chart k
    return own_xi(n, k) if j == k else x(j) * xi(j)


def xi_generators(A: IntMatrix, theta: Sequence[int], k: int, infinity: bool = False) -> GeneratorSet:
    theta = _check(A, theta, k)
    if infinity and k == 0:
        raise PreconditionError("the infinity family lives in charts k >= 1")
    n = A.ncols
    gens = [xi(j) for j in range(n + 1) if j not in theta and j != k]
    if infinity:
        gens = [x(0) if g == xi(0) else g for g in gens]
    return GeneratorSet(k, XI_INF_FAMILY if infinity else XI_FAMILY, tuple(gens))


def l_generators(A: IntMatrix, theta: Sequence[int], k: int, dedup: bool = True) -> GeneratorSet:
    """One Euler-type generator per row of A, restricted to theta.

    With ``dedup`` the zero polynomial is dropped and repeats are merged;
    without it exactly one entry per row is returned.
    """
    theta = _check(A, theta, k)
    n = A.ncols
    gens = []
    for row in A.rows:
        g = Poly()
        for j in theta:
            g = g + _xj_xij(n, k, j) * row[j - 1]
        gens.append(g)
    if dedup:
        seen, out = set(), []
        for g in gens:
            if not g.is_zero() and g not in seen:
                seen.add(g)
                out.append(g)
        gens = out
    return GeneratorSet(k, L_FAMILY, tuple(gens))


def box_generators(A: IntMatrix, theta: Sequence[int], k: int) -> GeneratorSet:
    """Binomials for a Hermite-reduced basis of the integer kernel of A[theta]."""
    theta = _check(A, theta, k)
    if not theta:
        return GeneratorSet(k, BOX_FAMILY, ())
    n = A.ncols
    gens = []
    for w in integer_kernel_basis(column_submatrix(A, theta)):
        lead = next(c for c in w if c)
        if lead < 0:
            w = [-c for c in w]
        plus, minus = Poly.const(1), Poly.const(1)
        for j, c in zip(theta, w):
            if c > 0:
                plus = plus * _xi_var(n, k, j) ** c
            elif c < 0:
                minus = minus * _xi_var(n, k, j) ** (-c)
        gens.append(plus - minus)
    return GeneratorSet(k, BOX_FAMILY, tuple(gens))


def all_generators(A: IntMatrix, theta: Sequence[int], k: int, infinity: bool = False) -> list[GeneratorSet]:
    return [
        xi_generators(A, theta, k, infinity),
        l_generators(A, theta, k),
        box_generators(A, theta, k),
    ]


# -- dimensions ---------------------------------------------------------------

@dataclass(frozen=True)
class DimReport:
    theta: tuple[int, ...]
    k: int
    n: int
    r: int
    r_p: int | None
    dim_lower: int
    dim_upper: int
    dim_exact: int | None
    pivots_p: tuple[int, ...] = ()
    pivots_ext: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "theta": list(self.theta),
            "k": self.k,
            "n": self.n,
            "r": self.r,
            "r_p": self.r_p,
            "dim_lower": self.dim_lower,
            "dim_upper": self.dim_upper,
            "dim_exact": self.dim_exact,
            "pivots_p": list(self.pivots_p),
            "pivots_ext": list(self.pivots_ext),
        }


def dim_report(A: IntMatrix, theta: Sequence[int], k: int, p: int | None = None) -> DimReport:
    """Dimension of S_k(A, theta) in characteristic 0 (p None) or p.

    In characteristic p the mod-p leftmost pivots n_1..n_{r_p} are extended
    greedily from the left to a rational pivot set; the dimension drops by
    one exactly when the chart index is one of the added columns.
    """
    theta = _check(A, theta, k)
    if not theta:
        raise PreconditionError("dim_report needs a nonempty theta")
    n = A.ncols
    sub = column_submatrix(A, theta)
    r = rank_rational(sub)
    if p is None:
        return DimReport(theta, k, n, r, None, n, n, n)
    require_prime(p)
    r_p = rank_mod_p(sub, p)
    piv_p = [theta[c] for c in pivot_columns_mod_p(sub, p)]
    chosen = list(piv_p)
    ext = []
    for j in theta:
        if len(chosen) == r:
            break
        if j in chosen:
            continue
        trial = sorted(chosen + [j])
        if rank_rational(column_submatrix(A, trial)) == len(trial):
            chosen = trial
            ext.append(j)
    exact = n + r - r_p - (1 if k in ext else 0)
    return DimReport(theta, k, n, r, r_p, n, n + r - r_p, exact, tuple(piv_p), tuple(ext))


# -- sample points ------------------------------------------------------------

class SamplingError(GKZError):
    """No usable parameter draw was found within the retry budget."""


def _rand_nonzero(rng: random.Random, bound: int = 7) -> Fraction:
    while True:
        a = rng.randint(-bound, bound)
        if a:
            return Fraction(a, rng.randint(1, bound))


def _rational_kernel(rows: list[list[int]], ncols: int) -> list[list[Fraction]]:
    """Basis of the rational kernel, by Gauss-Jordan over Fraction."""
    M = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -M[i][f]
        basis.append(v)
    return basis


def membership_sample(
    A: IntMatrix,
    theta: Sequence[int],
    k: int,
    count: int,
    infinity: bool = False,
    rng: random.Random | None = None,
    retries: int = 50,
) -> list[dict]:
    """Rational points of S_k(A, theta) (or its infinity variant).

    The xi-coordinates on theta follow a torus monomial ``xi_j = t^{a_j}``,
    which kills every binomial; the products ``y_j = x_j xi_j`` are a random
    kernel vector of A[theta] (summing to zero when the chart index is in
    theta, where ``y_k`` must also equal ``t^{a_k}``), which kills the linear
    generators; coordinates outside theta are zeroed or left free as the Xi
    family dictates.
    """
    theta = _check(A, theta, k)
    if infinity and k == 0:
        raise PreconditionError("the infinity family lives in charts k >= 1")
    rng = rng or random.Random(0)
    n, d1 = A.ncols, A.nrows
    cols = A.columns()
    inner = [j for j in theta if j != k]
    rows = [[row[j - 1] for j in theta] for row in A.rows]
    if k in theta:
        rows.append([1] * len(theta))
    kernel = _rational_kernel(rows, len(theta)) if theta else []
    kpos = theta.index(k) if k in theta else None
    need_k = kpos is not None and any(v[kpos] for v in kernel)

    points = []
    for _ in range(count):
        for _attempt in range(retries):
            t = [_rand_nonzero(rng) for _ in range(d1)]

            def mono(j: int) -> Fraction:
                out = Fraction(1)
                for ti, a in zip(t, cols[j - 1]):
                    out *= ti ** a
                return out

            y = [Fraction(0)] * len(theta)
            for v in kernel:
                c = rng.randint(-5, 5)
                y = [a + c * b for a, b in zip(y, v)]
            if need_k:
                if y[kpos] == 0:
                    continue
                scale = mono(k) / y[kpos]
                y = [scale * a for a in y]
            break
        else:
            raise SamplingError(f"no usable draw for theta={theta}, k={k}")
        pt = {}
        for j in range(n + 1):
            if j == k:
                continue
            if j in inner:
                xj = mono(j)
                pt[(XI, j)] = xj
                pt[(X, j)] = y[theta.index(j)] / xj
            else:
                pt[(XI, j)] = Fraction(0)
                pt[(X, j)] = _rand_nonzero(rng)
        if infinity:
            pt[(X, 0)] = Fraction(0)
            pt[(XI, 0)] = _rand_nonzero(rng)
        points.append(pt)
    return points
