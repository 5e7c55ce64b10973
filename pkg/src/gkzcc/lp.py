"""Exact feasibility for small linear programs.

Phase one of the simplex method over ``Fraction`` with Bland's rule, which
is enough for the cone and face questions asked elsewhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def nonneg_solution(A: Sequence[Sequence[int | Fraction]], b: Sequence[int | Fraction]) -> list[Fraction] | None:
    """Return some ``x >= 0`` with ``A x = b``, or ``None`` if none exists."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    # tableau rows: [coeffs of x | coeffs of artificials | rhs], rhs >= 0
    T = []
    for i in range(m):
        sgn = -1 if b[i] < 0 else 1
        row = [Fraction(sgn * a) for a in A[i]]
        row += [Fraction(int(i == j)) for j in range(m)]
        row.append(Fraction(sgn * b[i]))
        T.append(row)
    width = n + m
    basis = list(range(n, n + m))
    # objective: minimise the sum of artificials, kept as reduced costs
    cost = [Fraction(0)] * (width + 1)
    for row in T:
        for j in range(width + 1):
            cost[j] -= row[j]
    for j in range(n, width):
        cost[j] += 1

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            # phase one is bounded below by zero, so this cannot happen
            raise ArithmeticError("unbounded phase-one problem")
        _pivot(T, cost, leave, enter)
        basis[leave] = enter

    if cost[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][-1]
    return x


def _pivot(T: list[list[Fraction]], cost: list[Fraction], r: int, c: int) -> None:
    pr = T[r]
    inv = 1 / pr[c]
    T[r] = pr = [x * inv for x in pr]
    for i, row in enumerate(T):
        if i != r and row[c]:
            f = row[c]
            T[i] = [x - f * y for x, y in zip(row, pr)]
    if cost[c]:
        f = cost[c]
        cost[:] = [x - f * y for x, y in zip(cost, pr)]


def feasible_point(
    eq: Sequence[Sequence[int]],
    eq_rhs: Sequence[int],
    ge: Sequence[Sequence[int]],
    ge_rhs: Sequence[int],
    nvars: int,
) -> list[Fraction] | None:
    """Find free ``y`` with ``eq y = eq_rhs`` and ``ge y >= ge_rhs``.

    Free variables are split as ``y = y+ - y-`` and each inequality gets a
    surplus variable; the result is the recombined ``y`` or ``None``.
    """
    k = len(ge)
    rows, rhs = [], []
    for r, c in zip(eq, eq_rhs):
        rows.append(list(r) + [-x for x in r] + [0] * k)
        rhs.append(c)
    for i, (r, c) in enumerate(zip(ge, ge_rhs)):
        rows.append(list(r) + [-x for x in r] + [-int(i == j) for j in range(k)])
        rhs.append(c)
    if not rows:
        return [Fraction(0)] * nvars
    x = nonneg_solution(rows, rhs)
    if x is None:
        return None
    return [x[i] - x[nvars + i] for i in range(nvars)]
