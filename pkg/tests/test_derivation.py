import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from bellwright.core import TRUE, FiniteProbabilitySpace, Variable, ev
from bellwright.derivation import (
    BiconditionalFails,
    NotPerfectlyCorrelated,
    NotScreeningOff,
    OutOfRange,
    bell_check,
    cause_probabilities,
    decompose_probabilities,
    derive_minimal_theories,
    reduce_to_binary,
    run_derivation,
)
from bellwright.models import (
    ASSIGNMENTS,
    PAIRS,
    HiddenVariableModel,
    anti_13_model,
    conspiratorial_model,
    forced_settings_model,
    mth_outcomes,
    model_to_space,
    no_outcome_model,
    point_mass,
    szabo_standin,
    uniform_model,
)

from conftest import mth_models, random_reduction_case

A, B = ev("A"), ev("B")


def three_valued():
    # V = q1 (1/5), q2 (3/10), q3 (1/2); A = B = "V is q1 or q2"
    atoms = ["q1a", "q1b", "q2", "q3a", "q3b"]
    w = {"q1a": Fraction(1, 10), "q1b": Fraction(1, 10), "q2": Fraction(3, 10),
         "q3a": Fraction(1, 4), "q3b": Fraction(1, 4)}
    ext = {"A": ["q1a", "q1b", "q2"], "B": ["q1a", "q1b", "q2"],
           "Q1": ["q1a", "q1b"], "Q2": ["q2"], "Q3": ["q3a", "q3b"], "X": ["q1a", "q3a"]}
    space = FiniteProbabilitySpace(atoms, w, ext)
    return space, Variable.from_mapping("V", {"q1": "Q1", "q2": "Q2", "q3": "Q3"})


class TestReduction:
    def test_three_valued(self):
        space, v = three_valued()
        split = reduce_to_binary(space, v, A, B)
        assert split.plus_values == ("q1", "q2")
        assert split.minus_values == ("q3",)
        from bellwright.core import prob, cond_prob
        assert prob(space, split.event) == Fraction(1, 2)
        assert cond_prob(space, A, split.event) == 1
        assert cond_prob(space, B, split.complement) == 0

    def test_binary_is_identity(self):
        space = FiniteProbabilitySpace.uniform(["c", "n"], {"C": ["c"], "A": ["c"], "B": ["c"]})
        split = reduce_to_binary(space, Variable.binary("C", ev("C")), A, B)
        assert split.plus_values == ("true",)
        assert split.event == ev("C")

    def test_not_perfectly_correlated(self):
        space = FiniteProbabilitySpace.uniform(["11", "10", "01", "00"], {"A": ["11", "10"], "B": ["11", "01"]})
        space = space.with_extension("T", space.atoms)
        with pytest.raises(NotPerfectlyCorrelated):
            reduce_to_binary(space, Variable.from_mapping("V", {"q": "T"}), A, B)

    def test_not_screening_off(self):
        space = FiniteProbabilitySpace.uniform(["11", "00"], {"A": ["11"], "B": ["11"], "T": ["11", "00"]})
        with pytest.raises(NotScreeningOff) as info:
            reduce_to_binary(space, Variable.from_mapping("V", {"q": "T"}), A, B)
        assert info.value.value == "q"

    def test_given_restricts(self):
        # outside G the correlation is broken; inside G it is perfect
        space = FiniteProbabilitySpace.uniform(
            ["g1", "g0", "o"], {"G": ["g1", "g0"], "A": ["g1", "o"], "B": ["g1"], "C": ["g1"]}
        )
        v = Variable.binary("C", ev("C"))
        with pytest.raises(NotPerfectlyCorrelated):
            reduce_to_binary(space, v, A, B)
        assert reduce_to_binary(space, v, A, B, given=ev("G")).plus_values == ("true",)

    def test_random_sound(self):
        rng = random.Random(11)
        for _ in range(100):
            space, v, g, signs = random_reduction_case(rng)
            split = reduce_to_binary(space, v, A, B, g)
            assert set(split.plus_values) == {f"q{q}" for q, s in enumerate(signs) if s}
            # oracle: raw sums over the given-atoms of each value
            for q, s in enumerate(signs):
                members = [a for a in space.atoms if a[0] == q and a[1] == "in"]
                num = sum(space.weight[a] for a in members if a in space.extension["A"])
                den = sum(space.weight[a] for a in members)
                assert num / den == (1 if s else 0)
                key = "eq16" if s else "eq15"
                row = next(r for r in split.residuals[key] if r[0] == f"q{q}")
                assert row[1] == row[2]


def _mth_with_table(change):
    table = {(a, p): mth_outcomes(a, p) for a in ASSIGNMENTS for p in PAIRS}
    change(table)
    return HiddenVariableModel({a: Fraction(1, 8) for a in ASSIGNMENTS}, response=table)


class TestMinimalTheories:
    def test_uniform(self):
        assert len(derive_minimal_theories(model_to_space(uniform_model()))) == 4

    def test_flipped_outcome(self):
        a = ASSIGNMENTS[7]

        def flip(table):
            table[(a, (1, 3))] = ("-", table[(a, (1, 3))][1])

        m = _mth_with_table(flip)
        with pytest.raises(BiconditionalFails) as info:
            derive_minimal_theories(model_to_space(m))
        assert info.value.atom == ("TTT", 1, 3)
        assert info.value.direction == "condition without outcome"
        rep = run_derivation(m)
        assert rep.first_failure().key in {"eq19", "eq20", "eq23", "eq24", "loc2", "loc3", "mth"}

    def test_zero_weight_assignment_ignored(self):
        a = ASSIGNMENTS[7]

        def flip(table):
            table[(a, (1, 3))] = ("-", "-")

        m = _mth_with_table(flip)
        dist = dict(m.cause_dist)
        dist[a], dist[ASSIGNMENTS[0]] = Fraction(0), Fraction(1, 4)
        m = HiddenVariableModel(dist, response=m.response)
        assert len(derive_minimal_theories(model_to_space(m))) == 4


class TestIdentities:
    def test_decompose_uniform(self):
        ids = {i.key: i for i in decompose_probabilities(model_to_space(uniform_model()))}
        assert all(i.holds for i in ids.values())
        assert ids["eq25"].lhs == Fraction(1, 36)

    def test_decompose_point_mass(self):
        ids = {i.key: i for i in decompose_probabilities(model_to_space(point_mass("TFT")))}
        assert ids["eq25"].lhs == ids["eq25"].rhs == Fraction(1, 9)

    def test_decompose_survives_conspiracy(self):
        assert all(i.holds for i in decompose_probabilities(model_to_space(conspiratorial_model())))

    def test_cause_sums_uniform(self):
        ids, step = cause_probabilities(model_to_space(uniform_model()))
        assert [i.key for i in ids] == ["eq28", "eq29", "eq30"]
        assert all(i.holds for i in ids)
        assert ids[0].lhs == Fraction(1, 4)
        assert step["eq28"]["marginal"] == Fraction(1, 4)

    def test_cause_sums_anti13(self):
        ids, _ = cause_probabilities(model_to_space(anti_13_model()))
        assert ids[2].lhs == ids[2].rhs == Fraction(1, 2)

    def test_cause_sums_flag_conspiracy(self):
        ids, step = cause_probabilities(model_to_space(conspiratorial_model()))
        assert not step["eq28"]["holds"]
        assert not ids[0].holds
        assert "C11 & ~C22" in ids[0].note


class TestBellCheck:
    def test_quantum_sixty(self):
        assert bell_check(Fraction(3, 8), Fraction(1, 8), Fraction(1, 8)) == (False, Fraction(-1, 8))

    def test_boundary(self):
        assert bell_check(Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)) == (True, 0)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            bell_check(Fraction(3, 2), 0, 0)


class TestRunDerivation:
    def test_uniform_all_proven(self):
        rep = run_derivation(uniform_model())
        assert rep.all_proven
        assert rep.first_failure() is None
        assert rep["eq32"].detail["slack"] == Fraction(1, 4)
        assert rep["sep"].status == "premise"

    def test_step_order(self):
        keys = [s.key for s in run_derivation(uniform_model()).steps]
        assert keys[0] == "eq9" and keys[-1] == "eq32"
        assert keys.index("eq31") < keys.index("eq28")
        assert keys.index("mth") < keys.index("eq25")

    def test_conspiracy_blocks(self):
        rep = run_derivation(conspiratorial_model())
        assert rep.first_failure().key == "eq31"
        for key in ("eq28", "eq29", "eq30", "eq32"):
            assert rep[key].status == "blocked"
        assert rep["eq32"].holds is True

    def test_szabo_fails_at_nocons(self):
        rep = run_derivation(szabo_standin())
        assert rep.first_failure().key == "eq31"
        assert rep["eq31"].detail["violation_count"] > 0

    def test_unrealized_parallel(self):
        rep = run_derivation(forced_settings_model())
        assert rep.first_failure().key == "eq9"

    def test_missing_outcome(self):
        rep = run_derivation(no_outcome_model())
        assert rep.first_failure().key == "eq21"

    def test_json(self):
        doc = json.loads(run_derivation(uniform_model()).dumps())
        assert doc["all_proven"]
        assert doc["steps"]["eq32"]["detail"]["slack"] == "1/4"

    @hsettings(max_examples=100, deadline=None)
    @given(mth_models())
    def test_sound_on_random_models(self, m):
        rep = run_derivation(m)
        assert rep.all_proven
        assert rep.p12 + rep.p23 - rep.p13 >= 0


@given(st.integers(0, 2**32))
@hsettings(max_examples=50, deadline=None)
def test_random_reductions_property(seed):
    space, v, g, signs = random_reduction_case(random.Random(seed))
    split = reduce_to_binary(space, v, A, B, g)
    assert len(split.plus_values) == sum(signs)
