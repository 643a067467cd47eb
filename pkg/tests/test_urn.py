import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyaurn import (
    dirac,
    expected_replacement,
    make_urn,
    scalar_urn,
    second_moment_matrix,
    unit_urn,
    urn_from_json,
    urn_to_json,
    zero_urn,
)
from polyaurn.errors import (
    InputError,
    NegativeActivity,
    NegativeInitial,
    ProbabilityMass,
    SupportViolation,
    ZeroActivityRule,
)
from polyaurn.sampling import UrnSamplerConfig, random_urn
from polyaurn.urn import ReplacementMeasure


def test_classic_urn_accepted(classic):
    assert classic.colour_count == 2
    assert classic.activities == (1, 1)
    assert classic.initial == (1, 1)


def test_zero_activity_rule_rejected():
    with pytest.raises(ZeroActivityRule):
        make_urn(1, [dirac((-1,))], [0], [1])


def test_support_violation_rejected():
    with pytest.raises(SupportViolation):
        make_urn(2, [dirac((-1, -1)), dirac((0, 0))], [1, 1], [1, 1])


def test_support_allows_removing_drawn_ball():
    urn = make_urn(1, [dirac((-1,))], [1], [2])
    assert urn.measures[0].atoms[0][0] == (-1,)


def test_probability_mass_must_be_one():
    with pytest.raises(ProbabilityMass):
        ReplacementMeasure((((0, 0), Fraction(1, 2)),))
    with pytest.raises(ProbabilityMass):
        ReplacementMeasure((((0, 0), Fraction(3, 2)),))


def test_duplicate_atoms_rejected():
    with pytest.raises(InputError):
        ReplacementMeasure((((0, 1), Fraction(1, 2)), ((0, 1), Fraction(1, 2))))


def test_negative_activity_and_initial():
    with pytest.raises(NegativeActivity):
        make_urn(1, [dirac((0,))], [-1], [1])
    with pytest.raises(NegativeInitial):
        make_urn(1, [dirac((0,))], [1], [-1])
    with pytest.raises(NegativeActivity):
        scalar_urn(Fraction(-1, 2))


def test_zero_urn():
    empty = zero_urn()
    assert empty.colour_count == 0
    assert empty == zero_urn()


def test_unit_urn():
    unit = unit_urn()
    assert unit.colour_count == 1
    assert unit.activities == (0,)
    assert unit.initial == (1,)
    assert unit.measures[0].is_dirac_at_zero()


def test_scalar_urn():
    p = scalar_urn(Fraction(3))
    assert p.activities == (3,)
    assert p.measures[0].is_dirac_at_zero()
    assert scalar_urn(0) == unit_urn()


def test_expected_replacement(classic):
    assert expected_replacement(classic, 0) == (1, 0)
    assert expected_replacement(unit_urn(), 0) == (0,)
    mixed = make_urn(
        2,
        [
            ReplacementMeasure((((-1, 2), Fraction(1, 2)), ((0, 1), Fraction(1, 2)))),
            dirac((0, 0)),
        ],
        [1, 1],
        [1, 1],
    )
    assert expected_replacement(mixed, 0) == (Fraction(-1, 2), Fraction(3, 2))


def brute_second_moment(measure):
    # independent oracle: plain loop over atoms, no shared code path
    q = measure.width
    out = [[Fraction(0)] * q for _ in range(q)]
    for x, p in measure.atoms:
        for i in range(q):
            for j in range(q):
                out[i][j] += p * x[i] * x[j]
    return tuple(tuple(row) for row in out)


def test_second_moment_examples(classic):
    assert second_moment_matrix(unit_urn(), 0) == ((0,),)
    assert second_moment_matrix(classic, 0) == ((1, 0), (0, 0))
    m = ReplacementMeasure((((1, 1), Fraction(1, 2)), ((-1, 0), Fraction(1, 2))))
    urn = make_urn(2, [m, dirac((0, 0))], [1, 1], [1, 1])
    expected = (
        (Fraction(1), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(1, 2)),
    )
    assert second_moment_matrix(urn, 0) == expected
    assert brute_second_moment(m) == expected


@given(st.integers(0, 2**32), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_moments_exact_under_atom_reordering(seed, q):
    rng = random.Random(seed)
    cfg = UrnSamplerConfig(min_colours=q, max_colours=q)
    urn = random_urn(rng, cfg)
    for i in range(q):
        atoms = list(urn.measures[i].atoms)
        rng.shuffle(atoms)
        shuffled = ReplacementMeasure(tuple(atoms))
        assert shuffled.mean() == urn.measures[i].mean()
        assert shuffled.second_moment() == urn.measures[i].second_moment()
        assert brute_second_moment(shuffled) == urn.measures[i].second_moment()


def test_zero_activity_colour_has_zero_moments():
    rng = random.Random(5)
    for _ in range(25):
        urn = random_urn(rng, UrnSamplerConfig(zero_activity_prob=0.9, min_colours=1))
        for i in range(urn.colour_count):
            if urn.activities[i] == 0:
                assert expected_replacement(urn, i) == (0,) * urn.colour_count
                assert all(
                    v == 0 for row in second_moment_matrix(urn, i) for v in row
                )


def test_support_invariant_on_random_urns():
    rng = random.Random(11)
    for _ in range(60):
        urn = random_urn(rng)
        for i in range(urn.colour_count):
            for x, _ in urn.measures[i].atoms:
                for j, v in enumerate(x):
                    assert v >= -(1 if i == j else 0)


def test_labels_are_metadata(classic):
    labelled = make_urn(
        2, [dirac((1, 0)), dirac((0, 1))], [1, 1], [1, 1], labels=("A", "B")
    )
    assert labelled == classic
    assert labelled.colour_name(0) == "A"
    assert classic.colour_name(0) == "c0"


def test_json_roundtrip_random():
    rng = random.Random(17)
    for _ in range(40):
        urn = random_urn(rng)
        assert urn_from_json(urn_to_json(urn)) == urn


def test_json_format_shape(friedman):
    doc = urn_to_json(friedman)
    assert set(doc) == {"colours", "activities", "initial", "replacements"}
    assert doc["activities"] == ["1", "1"]
    assert doc["replacements"][0] == [{"prob": "1", "delta": {"c1": 1}}]


def test_json_malformed_rational():
    doc = urn_to_json(unit_urn())
    doc["activities"] = ["1/0"]
    with pytest.raises(InputError, match="1/0"):
        urn_from_json(doc)


def test_json_unknown_colour_in_delta():
    doc = {
        "colours": ["a"],
        "activities": ["1"],
        "initial": [1],
        "replacements": [[{"prob": "1", "delta": {"zz": 1}}]],
    }
    with pytest.raises(InputError, match="zz"):
        urn_from_json(doc)


def test_json_errors_name_colour_and_atom():
    doc = {
        "colours": ["a", "b"],
        "activities": ["1", "1"],
        "initial": [1, 1],
        "replacements": [
            [{"prob": "1", "delta": {"a": 1}}],
            [{"prob": "1/2", "delta": {"b": 1}}],
        ],
    }
    with pytest.raises(Exception, match="b"):
        urn_from_json(doc)


def test_json_is_serializable(classic):
    json.dumps(urn_to_json(classic))
