import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unimodular
from oracles import umbrella_oracle

from gkzcc.cycle import (
    CHAR0,
    CHARP,
    UMBRELLA,
    Cycle,
    CycleComponent,
    MultiplicityTable,
    NondegeneracyFailure,
    TrivialCharacter0,
    cc_gkz,
    cc_via_resolution,
    specialize,
    umbrella,
)
from gkzcc.divisor import INFINITY, SUPPORT, ZERO_SECTION
from gkzcc.fan import Cone, GenerableSet, default_complete_fan
from gkzcc.matrix import CharacterVector, IntMatrix, PreconditionError, hat

M = IntMatrix
CHI = CharacterVector(6, (1, 1))


def H(*row):
    return hat(M([list(row)]))


FACES_001 = [(), (3,), (1, 2), (1, 2, 3)]


def test_umbrella_examples():
    assert umbrella(H(0, 0, 1)) == FACES_001
    assert umbrella(H(0, 1, 2)) == [(), (1,), (3,), (1, 2, 3)]
    assert umbrella(H(0, 0, 0)) == [(), (1, 2, 3)]
    assert umbrella(M([[1, 1], [0, 0]])) == [(), (1, 2)]
    with pytest.raises(PreconditionError):
        umbrella(M([[2, 2, 2]]))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_umbrella_matches_functional_search(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2])
    n = rng.randint(1, 4)
    B = M([[rng.randint(-2, 2) for _ in range(n)] for _ in range(d)])
    A = hat(B)
    assert umbrella(A) == umbrella_oracle(A.rows, bound=6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_umbrella_unimodular_invariance(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    B = M([[rng.randint(-4, 4) for _ in range(n)] for _ in range(2)])
    A = hat(B)
    P = random_unimodular(rng, 3)
    assert umbrella(P @ A) == umbrella(A)


def test_specialize():
    assert specialize(Cycle(0)) == Cycle(0)
    c0 = Cycle(2, (CycleComponent(UMBRELLA, (1,), "m({1})", CHAR0),))
    c1 = specialize(c0)
    assert c1.components[0].field == CHARP
    assert c1.dumps() == c0.dumps().replace('"char0"', '"charp"')
    with pytest.raises(PreconditionError):
        specialize(c1)
    mixed = Cycle(0, (CycleComponent(UMBRELLA, (1,), 1, CHAR0), CycleComponent(UMBRELLA, (2,), 1, CHARP)))
    with pytest.raises(PreconditionError):
        specialize(mixed)


def test_cycle_merging_and_order():
    c = Cycle(1, (
        CycleComponent(UMBRELLA, (1, 2), 2),
        CycleComponent(ZERO_SECTION, None, "m(zero-section)"),
        CycleComponent(UMBRELLA, (1, 2), 3),
        CycleComponent(UMBRELLA, (3,), "m({3})"),
    ))
    assert [comp.theta for comp in c.components] == [None, (3,), (1, 2)]
    assert c.components[2].mult == 5
    with pytest.raises(PreconditionError):
        Cycle(0, (CycleComponent(UMBRELLA, (1,), 1), CycleComponent(UMBRELLA, (1,), "m({1})")))
    with pytest.raises(PreconditionError):
        Cycle(0, (CycleComponent(UMBRELLA, (1,), 1, CHAR0), CycleComponent(UMBRELLA, (1,), 1, CHARP)))


def test_cycle_json_round_trip():
    cycle, _ = cc_gkz(M([[0, 0, 1]]), 7, CHI, MultiplicityTable({(3,): 2}))
    text = cycle.dumps()
    assert Cycle.loads(text) == cycle
    assert Cycle.loads(text).dumps() == text
    with pytest.raises(PreconditionError):
        Cycle.from_json({"sign_exp": 0})
    with pytest.raises(PreconditionError):
        Cycle.from_json({"sign_exp": 0, "components": [{"kind": "bogus", "mult": 1, "field": CHAR0}]})


def test_multiplicity_table():
    t = MultiplicityTable.from_json([{"theta": [1, 2], "mult": 4}])
    assert t.entries == {(1, 2): 4}
    for bad in ([{"theta": [1], "mult": -1}], [{"theta": [1], "mult": True}], {"theta": [1]}, [{"mult": 1}]):
        with pytest.raises(PreconditionError):
            MultiplicityTable.from_json(bad)


def test_cc_gkz_example_001():
    cycle, report = cc_gkz(M([[0, 0, 1]]), 7, CHI)
    assert cycle.thetas == FACES_001
    assert all(c.field == CHARP and c.mult == f"m({{{','.join(map(str, c.theta))}}})" for c in cycle.components)
    assert report["audit"]["p_nondegenerate"] and report["reduction"] is None
    assert report["metadata"]["shift"] == 4


def test_cc_gkz_multiplicities():
    cycle, _ = cc_gkz(M([[0, 0, 1]]), 7, CHI, MultiplicityTable({(1, 2): 3}))
    assert {c.theta: c.mult for c in cycle.components}[(1, 2)] == 3
    with pytest.raises(PreconditionError):
        cc_gkz(M([[0, 0, 1]]), 7, CHI, MultiplicityTable({(1,): 3}))


def test_cc_gkz_row_division():
    cycle, report = cc_gkz(M([[0, 5, 10]]), 5, CHI)
    assert report["reduction"]["method"] == "row-division"
    assert report["final"]["B"] == [[0, 1, 2]]
    assert cycle.thetas == umbrella(H(0, 1, 2))


def test_cc_gkz_degenerate_fails():
    with pytest.raises(NondegeneracyFailure) as err:
        cc_gkz(M([[0, 1, 5]]), 5, CHI)
    assert (1, 3) in err.value.failing
    assert {"theta": [1, 3], "k": 0, "dim": 4, "n": 3} in err.value.excess


def test_cc_gkz_square_path():
    B = M([[0, 5]])
    cycle, report = cc_gkz(B, 5, CHI)
    assert report["reduction"]["method"] == "square"
    assert report["reduction"]["p_nondegenerate"]
    assert cycle.thetas == umbrella(hat(M(report["final"]["B"])))


def test_cc_gkz_precondition_errors():
    with pytest.raises(TrivialCharacter0):
        cc_gkz(M([[0, 0, 1]]), 7, CharacterVector(6, (0, 1)))
    with pytest.raises(PreconditionError):
        cc_gkz(M([[0, 0, 1]]), 7, CharacterVector(6, (1, 1, 1)))
    with pytest.raises(PreconditionError):
        cc_gkz(M([[1, 1, 1]]), 7, CHI)
    with pytest.raises(PreconditionError):
        cc_gkz(M([[0, 0, 1]]), 6, CHI)


@pytest.mark.parametrize("rows", [[[0, 0, 1]], [[0, 1, 2]], [[0, 1, 5]], [[0, 5, 10]]])
def test_resolution_route_lies_in_umbrella(rows):
    B = M(rows)
    cycle, trace = cc_via_resolution(B)
    assert cycle.sign_exp == B.nrows + B.ncols
    kinds = [c.kind for c in cycle.components]
    assert ZERO_SECTION in kinds and INFINITY in kinds
    support = {c.theta for c in cycle.components if c.kind == SUPPORT}
    assert support <= set(umbrella(hat(B)))
    assert trace["blowups"] == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_resolution_route_inclusion_random(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2])
    n = rng.randint(2, 3)
    B = M([[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)])
    try:
        cycle, _ = cc_via_resolution(B)
    except PreconditionError:
        return
    assert set(cycle.thetas) <= set(umbrella(hat(B)))


def test_resolution_route_with_start_fan_and_blowups():
    B = M([[1, 0, 0], [0, 1, 0]])
    start = default_complete_fan(2)
    cycle, trace = cc_via_resolution(B, start)
    assert trace["start"] == start.to_json() and trace["blowups"]
    line = GenerableSet(1, (Cone(((1,),)), Cone(((-1,),))))
    _, t2 = cc_via_resolution(M([[0, 0, 1]]), line)
    assert t2["start"] == line.to_json()
