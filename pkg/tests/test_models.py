import json
from fractions import Fraction

import pytest
from hypothesis import given

from bellwright.core import ZeroConditioning, cond_prob, ev, prob
from bellwright.models import (
    ASSIGNMENTS,
    BUILTIN_MODELS,
    PAIRS,
    CauseAssignment,
    HiddenVariableModel,
    InvalidModel,
    MalformedTargets,
    SettingPolicy,
    TargetStatistics,
    all_cause_events,
    anti_13_model,
    cause_conjunctions,
    check_ex_nowm,
    check_ex_nowm_space,
    check_no_cons,
    conspiratorial_model,
    forced_settings_model,
    model_to_space,
    no_outcome_model,
    point_mass,
    predicted_conditionals,
    product_model,
    settings,
    szabo_standin,
    uniform_model,
)

from conftest import brute_conditionals, mth_models

H = Fraction(1, 2)


def test_assignment_order_and_labels():
    assert ASSIGNMENTS[0] == (False, False, False)
    assert ASSIGNMENTS[5].label == "TFT"
    assert [a.index for a in ASSIGNMENTS] == list(range(8))
    assert CauseAssignment.parse("TFT") == ASSIGNMENTS[5]


class TestSpace:
    def test_uniform_has_72_atoms(self):
        space = model_to_space(uniform_model())
        assert len(space.atoms) == 72
        assert all(w == Fraction(1, 72) for w in space.weight.values())

    def test_point_mass_extensions(self):
        space = model_to_space(point_mass("TFT"))
        assert len(space.atoms) == 9
        assert prob(space, ev("C11")) == 1
        assert prob(space, ev("C22")) == 0
        # MTH: left + iff C_i, right + iff not C_j
        assert cond_prob(space, ev("L1+") & ev("R2+"), settings(1, 2)) == 1
        assert cond_prob(space, ev("L2-") & ev("R3-"), settings(2, 3)) == 1

    def test_keep_zero(self):
        assert len(model_to_space(point_mass("FFF"), keep_zero=True).atoms) == 72

    def test_policy_dependence_visible(self):
        space = model_to_space(conspiratorial_model())
        s12 = settings(1, 2)
        assert cond_prob(space, s12, ev("C11")) != prob(space, s12)


class TestPredicted:
    def test_uniform(self):
        t = predicted_conditionals(uniform_model())
        assert t.p(1, 2) == Fraction(1, 4)
        assert t.p(1, 1) == 0
        assert t.p(1, 1, "+", "-") == H

    def test_anti_13(self):
        t = predicted_conditionals(anti_13_model())
        assert t.p(1, 3) == H
        assert t.p(1, 2) == Fraction(1, 4)

    def test_unrealized_pair(self):
        with pytest.raises(ZeroConditioning):
            predicted_conditionals(forced_settings_model())

    @given(mth_models())
    def test_matches_brute_force(self, m):
        oracle = brute_conditionals(
            lambda *c: m.cause_dist[CauseAssignment(*c)],
            lambda c, pair: m.policy.dist(CauseAssignment(*c))[pair],
        )
        assert predicted_conditionals(m).probs == oracle

    @given(mth_models())
    def test_pcorr_holds_for_mth(self, m):
        t = predicted_conditionals(m)
        for k in (1, 2, 3):
            assert t.p(k, k) == 0 and t.p(k, k, "-", "-") == 0


class TestNoCons:
    def test_independent_policy_clean(self):
        r = check_no_cons(product_model(Fraction(1, 3), Fraction(1, 5), Fraction(2, 7)))
        assert r.ok
        assert r.checked == 9 * 26

    def test_forced_settings(self):
        r = check_no_cons(forced_settings_model())
        assert not r.ok
        v = next(v for v in r.violations if v.event == "C11" and v.pair == (1, 2))
        assert v.conditional == 1 and v.marginal == H

    def test_szabo_single_atoms_pass_conjunction_fails(self):
        m = szabo_standin()
        r = check_no_cons(m)
        assert r.single_atom_ok and not r.ok
        v = next(v for v in r.violations if v.event == "C11 & C22" and v.pair == (1, 2))
        assert v.conditional == Fraction(3, 8)
        assert v.marginal == Fraction(1, 4)
        assert all(v.literals >= 2 for v in r.violations)
        assert {v.pair for v in r.violations} == {(1, 2), (2, 1)}

    def test_full_sweep(self):
        assert check_no_cons(uniform_model(), full=True).ok
        r = check_no_cons(szabo_standin(), full=True)
        assert not r.ok

    def test_conjunction_enumeration(self):
        conj = list(cause_conjunctions())
        assert len(conj) == 6 + 12 + 8
        assert len({sat for _, _, sat in all_cause_events()}) == 256

    @given(mth_models())
    def test_independent_policy_never_flags(self, m):
        assert check_no_cons(m).ok


class TestExNowm:
    def test_mth_clean(self):
        assert check_ex_nowm(uniform_model()).ok

    def test_missing_outcome(self):
        r = check_ex_nowm(no_outcome_model())
        assert not r.ex_ok and r.nowm_ok
        assert r.ex_failures[0][:2] == ("L", (1, 2))

    def test_outcome_without_setting(self):
        space = model_to_space(uniform_model())
        stray = next(a for a in space.atoms if a[1:] == (2, 2))
        space = space.with_extension("L1+", space.extension["L1+"] | {stray})
        r = check_ex_nowm_space(space)
        assert not r.nowm_ok
        assert "L1+" in r.nowm_failures[0]


class TestValidation:
    def test_float_weights_rejected(self):
        with pytest.raises((InvalidModel, TypeError)):
            HiddenVariableModel({a: 0.125 for a in ASSIGNMENTS})

    def test_weights_must_sum_to_one(self):
        with pytest.raises(InvalidModel):
            HiddenVariableModel({a: Fraction(1, 9) for a in ASSIGNMENTS})

    def test_bad_policy(self):
        with pytest.raises(InvalidModel):
            SettingPolicy({(1, 2): H})

    def test_malformed_targets(self):
        t = predicted_conditionals(uniform_model())
        bad = dict(t.probs)
        bad[(1, 2, "+", "+")] += Fraction(1, 100)
        with pytest.raises(MalformedTargets):
            TargetStatistics(bad).validate()
        with pytest.raises(MalformedTargets):
            t.restrict([(1, 2)]).validate([(1, 3)])

    def test_incomplete_response_table(self):
        with pytest.raises(InvalidModel):
            HiddenVariableModel({a: Fraction(1, 8) for a in ASSIGNMENTS}, response={})


class TestJson:
    @pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
    def test_builtins_round_trip(self, name):
        m = BUILTIN_MODELS[name]()
        text = m.dumps()
        back = HiddenVariableModel.loads(text)
        assert back == m
        assert back.dumps() == text

    @given(mth_models())
    def test_round_trip(self, m):
        assert HiddenVariableModel.from_json(json.loads(m.dumps())) == m

    def test_unknown_field(self):
        doc = uniform_model().to_json()
        doc["extra"] = 1
        with pytest.raises(InvalidModel):
            HiddenVariableModel.from_json(doc)

    def test_targets_round_trip(self):
        t = predicted_conditionals(szabo_standin())
        assert TargetStatistics.from_json(json.loads(json.dumps(t.to_json()))) == t

    def test_policy_with_only(self):
        m = uniform_model().with_policy(SettingPolicy.only((1, 2), (2, 3), (1, 3)))
        assert HiddenVariableModel.loads(m.dumps()) == m
        assert PAIRS[1] == (1, 2)
