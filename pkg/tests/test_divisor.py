import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pairing

from gkzcc.divisor import (
    INFINITY,
    LABEL_KINDS,
    SUPPORT,
    SUPPORT_INF,
    ZERO_SECTION,
    direct_image_support,
    enumerate_epsilon,
    exponent_table,
    n_components,
    snc_witness,
    theta_of,
)
from gkzcc.fan import Cone, GenerableSet, default_complete_fan, is_sigma_good, resolve
from gkzcc.matrix import IntMatrix, PreconditionError

M = IntMatrix
POS, NEG = Cone(((1,),)), Cone(((-1,),))
LINE = default_complete_fan(1)


def rand_matrix(rng, d, lo, hi, ncols):
    return M([[rng.randint(lo, hi) for _ in range(ncols)] for _ in range(d)])


def resolved(B):
    fan, _ = resolve(B, default_complete_fan(B.nrows))
    return fan


def test_exponent_table_examples():
    t = exponent_table(M([[0, 1, 2]]), POS)
    assert t.entries == ((0, 1, 2),)
    assert t.polynomial() == "X1 + X2*t1 + X3*t1^2"
    t = exponent_table(M([[0, 1, 2]]), NEG)
    assert t.entries == ((2, 1, 0),)
    assert t.polynomial() == "X1*t1^2 + X2*t1 + X3"
    assert exponent_table(M([[0, 0, 1]]), POS).entries == ((0, 0, 1),)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_exponent_rows_are_shifted_pairings(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2, 3])
    B = rand_matrix(rng, d, -6, 6, rng.randint(1, 4))
    for c in default_complete_fan(d).cones:
        t = exponent_table(B, c)
        for e, row in zip(c.edges, t.entries):
            b = pairing(B.rows, e)
            assert min(row) == 0
            assert list(row) == [x - min(b) for x in b]


def test_snc_witness_example():
    w = snc_witness(M([[0, 1, 2]]), POS)
    assert w.gamma == (1, 2, 3)
    assert w.factor == (0,)
    assert w.divisors == ("X0", "X1'", "t1")
    assert w.to_json()["substitution"] == "X1' = X1 + X2*t1 + X3*t1^2"


def test_snc_witness_without_t_factors():
    w = snc_witness(M([[4, 4], [1, 1]]), Cone(((1, 0), (0, 1))))
    assert w.rest == ((0, 0),) and w.factor == (0, 0)
    assert w.substituted() == "X1 + X2"


def test_snc_witness_rejects_bad_cone():
    with pytest.raises(PreconditionError):
        snc_witness(M([[1, 0], [0, 1]]), Cone(((1, 0), (0, 1))))


def _evaluate_G(table, X, t):
    total = Fraction(0)
    for i in range(len(X)):
        term = Fraction(X[i])
        for k, row in enumerate(table.entries):
            term *= Fraction(t[k]) ** row[i]
        total += term
    return total


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_snc_witness_factors_G(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2])
    n = rng.randint(1, 4)
    B = rand_matrix(rng, d, -3, 3, n)
    fan = resolved(B)
    for c in fan.cones:
        w = snc_witness(B, c)
        table = exponent_table(B, c)
        X = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
        t = [Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(d)]
        assert all(a >= 0 for r in w.rest for a in r)
        prime = X[w.gamma[0] - 1]
        for col, exps in zip(w.gamma[1:], w.rest):
            term = X[col - 1]
            for k, a in enumerate(exps):
                term *= t[k] ** a
            prime += term
        lead = Fraction(1)
        for k, a in enumerate(w.factor):
            lead *= t[k] ** a
        assert _evaluate_G(table, X, t) == lead * prime


def test_theta_of_examples():
    B = M([[0, 1, 2]])
    assert theta_of(B, [(1,)]) == (1,)
    assert theta_of(B, [(-1,)]) == (3,)
    assert theta_of(B, []) == (1, 2, 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_theta_intersection_law(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 3])
    B = rand_matrix(rng, d, -3, 3, rng.randint(1, 4))
    edges = default_complete_fan(d).edges()
    a = rng.sample(edges, rng.randint(0, 2))
    b = rng.sample(edges, rng.randint(0, 2))
    both = theta_of(B, a + b)
    assert set(both) == set(theta_of(B, a)) & set(theta_of(B, b))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_exceptional_theta_contains_intersection(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 3])
    B = rand_matrix(rng, d, -3, 3, rng.randint(2, 3))
    _, recs = resolve(B, default_complete_fan(d))
    for r in recs:
        ex = set(theta_of(B, [r.eps_ex]))
        assert ex >= set(theta_of(B, [r.eps1])) & set(theta_of(B, [r.eps2]))


def test_enumerate_epsilon_examples():
    assert enumerate_epsilon(LINE) == [(), ((-1,),), ((1,),)]
    eps = enumerate_epsilon(default_complete_fan(2))
    assert len(eps) == 9
    assert sum(len(e) == 2 for e in eps) == 4
    assert ((-1, 0), (1, 0)) not in eps
    single = GenerableSet(3, (Cone(((1, 0, 0), (0, 1, 0), (0, 0, 1))),))
    assert len(enumerate_epsilon(single)) == 8


def test_n_components_example():
    labels = n_components(M([[0, 1, 2]]), LINE)
    assert len(labels) == 12
    assert [lab.kind for lab in labels[:4]] == list(LABEL_KINDS)
    assert labels[0].epsilon == () and labels[0].theta == (1, 2, 3)
    with pytest.raises(PreconditionError):
        n_components(M([[1, 0], [0, 1]]), default_complete_fan(2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_n_components_count(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2])
    B = rand_matrix(rng, d, -3, 3, rng.randint(1, 3))
    fan = resolved(B)
    labels = n_components(B, fan)
    assert len(labels) == 4 * len(enumerate_epsilon(fan))
    assert len({(lab.kind, lab.epsilon) for lab in labels}) == len(labels)


def _support_thetas(labels):
    return [lab.theta for lab in labels if lab.kind == SUPPORT]


def test_direct_image_support_examples():
    labels = direct_image_support(M([[0, 1, 2]]), LINE)
    assert [lab.kind for lab in labels[:2]] == [ZERO_SECTION, INFINITY]
    assert _support_thetas(labels) == [(1,), (3,), (1, 2, 3)]
    assert [lab.theta for lab in labels if lab.kind == SUPPORT_INF] == [(1,), (3,), (1, 2, 3)]
    B = M([[0, 0, 1]])
    got = _support_thetas(direct_image_support(B, resolved(B)))
    assert (1, 2) in got and (3,) in got
    const = M([[2, 2, 2], [-1, -1, -1]])
    assert _support_thetas(direct_image_support(const, default_complete_fan(2))) == [(1, 2, 3)]


def test_provenance_witnesses_theta():
    B = M([[0, 1, 2]])
    for lab in direct_image_support(B, LINE)[2:]:
        for eps, cone in lab.provenance:
            assert theta_of(B, [e for e in eps if e in cone.edges]) == lab.theta


@pytest.mark.parametrize("rows", [[[0, 0, 1]], [[0, 5, 10]], [[0, 1, 5]]])
def test_support_invariant_under_start_fan(rows):
    # a different valid starting fan changes every tie-break downstream
    B = M(rows)
    other = GenerableSet(1, (Cone(((-1,),)), Cone(((1,),))))
    a = _support_thetas(direct_image_support(B, resolved(B)))
    fan, _ = resolve(B, other)
    assert a == _support_thetas(direct_image_support(B, fan))


def test_labels_serialize():
    lab = direct_image_support(M([[0, 1, 2]]), LINE)[2]
    js = lab.to_json()
    assert js["kind"] == SUPPORT and js["theta"] == [1] and js["provenance"]
    assert all(is_sigma_good(M([[0, 1, 2]]), c)[0] for c in LINE.cones)
