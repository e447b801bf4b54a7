import math
import random

import pytest

from dietks.assessment import (ACTIVITIES, COMORBIDITIES, MULTIPLIERS,
                               IncompleteAssessmentError, Patient,
                               PatientValidationError, assess, bmi,
                               classify_bmi, patient_from_dict,
                               prescribed_servings, seed_facts,
                               total_calories, validate_patient_fields)
from dietks.kb import FoodGroup, parse_kb
from dietks.ruleslang import infer, parse_rules, serialize_rules, WorkingMemory

from oracles import reference_bmi, reference_derived_facts, round_half_up


def make_patient(**overrides):
    base = dict(id="t1", name="Test", gender="male", age=40, weight=70.0,
                height=1.70, activity="moderate")
    base.update(overrides)
    return Patient(**base)


def random_patient(rng, **overrides):
    fields = dict(
        id=f"r{rng.randrange(10**6)}",
        name="R",
        gender=rng.choice(["male", "female"]),
        age=rng.randint(1, 130),
        weight=round(rng.uniform(3.0, 200.0), 1),
        height=round(rng.uniform(0.4, 2.2), 2),
        activity=rng.choice(ACTIVITIES),
        comorbidities=frozenset(rng.sample(COMORBIDITIES,
                                           rng.randint(0, len(COMORBIDITIES)))),
    )
    fields.update(overrides)
    return Patient(**fields)


class TestBmi:
    def test_direct_values(self):
        assert bmi(80, 1.80) == pytest.approx(24.691358024691358, rel=1e-12)
        assert bmi(50, 1.60) == pytest.approx(19.53125, rel=1e-12)
        assert bmi(100, 1.70) == pytest.approx(34.602076124567475, rel=1e-12)

    def test_no_rounding(self):
        assert bmi(70, 1.7) == 70 / 1.7 ** 2

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            bmi(0, 1.7)
        with pytest.raises(ValueError):
            bmi(70, -1)

    def test_against_independent_evaluation(self):
        rng = random.Random(42)
        for _ in range(1000):
            w = rng.uniform(1.0, 500.0)
            h = rng.uniform(0.3, 2.5)
            assert bmi(w, h) == pytest.approx(reference_bmi(w, h), rel=1e-9)


class TestClassifyBmi:
    @pytest.mark.parametrize("value, expected", [
        (18.5, "slim"),
        (25.0, "normal"),
        (30.0, "obese"),
        (27.0, "overweight"),
        (10.0, "slim"),
        (18.500001, "normal"),
        (29.999999, "overweight"),
        (55.0, "obese"),
    ])
    def test_boundaries(self, value, expected):
        assert classify_bmi(value) == expected

    def test_total_exhaustive_partition(self):
        rng = random.Random(1)
        for _ in range(2000):
            value = rng.uniform(0.01, 80.0)
            category = classify_bmi(value)
            expected = ("slim" if value <= 18.5 else
                        "normal" if value <= 25 else
                        "overweight" if value < 30 else "obese")
            assert category == expected

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            classify_bmi(0)


class TestTotalCalories:
    @pytest.mark.parametrize("weight, category, activity, expected", [
        (70, "normal", "moderate", 2100),
        (60, "slim", "very_active", 2400),
        (90, "obese", "little", 1800),
        (45, "slim", "little", 1350),
        (70, "slim", "moderate", 2450),
        (80, "normal", "very_active", 2800),
        (80, "normal", "little", 2000),
        (65, "obese", "very_active", 1950),
        (65, "obese", "moderate", 1625),
        (70, "overweight", "very_active", 2100),
        (70, "overweight", "moderate", 1750),
        (70, "overweight", "little", 1400),
    ])
    def test_multiplier_table(self, weight, category, activity, expected):
        assert total_calories(weight, category, activity) == expected

    def test_rounding_half_up_at_tenths(self):
        # 70.3 * 25 = 1757.5 -> 1758; 70.1 * 25 = 1752.5 -> 1753
        assert total_calories(70.3, "obese", "moderate") == 1758
        assert total_calories(70.1, "obese", "moderate") == 1753
        assert total_calories(70.34, "obese", "moderate") == 1759  # 1758.5

    def test_matches_fraction_rounding(self):
        rng = random.Random(9)
        for _ in range(500):
            w = round(rng.uniform(1, 300), 1)
            category = rng.choice(list(MULTIPLIERS))
            activity = rng.choice(ACTIVITIES)
            expected = round_half_up(w * MULTIPLIERS[category][activity])
            assert total_calories(w, category, activity) == expected

    def test_multiplier_monotonic(self):
        by_category = ["slim", "normal", "overweight", "obese"]
        by_activity = ["very_active", "moderate", "little"]
        for activity in by_activity:
            col = [MULTIPLIERS[c][activity] for c in by_category]
            assert col == sorted(col, reverse=True)
        for category in by_category:
            row = [MULTIPLIERS[category][a] for a in by_activity]
            assert row == sorted(row, reverse=True)


class TestPrescribedServings:
    def test_elderly_gets_extra_fruit(self, default_kb):
        p = make_patient(age=70)
        s = prescribed_servings(p, default_kb)
        assert s["fruit"] == 4
        assert s["starch"] == 6
        assert s["protein"] == 3
        assert s["milk"] == 3

    def test_gout_restricts_protein_and_milk(self, default_kb):
        s = prescribed_servings(make_patient(comorbidities=frozenset({"gout"})),
                                default_kb)
        assert s["protein"] == 2
        assert s["milk"] == 2

    def test_very_active_starch(self, default_kb):
        s = prescribed_servings(make_patient(activity="very_active"), default_kb)
        assert s["starch"] == 8

    def test_little_and_underweight_starch(self, default_kb):
        p = make_patient(activity="little", weight=46.0, height=1.65)  # bmi ~16.9
        s = prescribed_servings(p, default_kb)
        assert s["starch"] == 10

    def test_little_not_underweight_defaults(self, default_kb):
        p = make_patient(activity="little")  # bmi 24.2
        s = prescribed_servings(p, default_kb)
        assert s["starch"] == 6

    def test_fixed_groups(self, default_kb):
        s = prescribed_servings(make_patient(), default_kb)
        assert (s["vegetable"], s["sugar"], s["fat"]) == (3, 0, 1)

    def test_anorexia_and_surgery_fruit(self, default_kb):
        for c in ("anorexia", "surgery"):
            s = prescribed_servings(make_patient(comorbidities=frozenset({c})),
                                    default_kb)
            assert s["fruit"] == 4


class TestAssess:
    def test_normal_moderate_example(self, default_kb, default_rules):
        rx = assess(make_patient(), default_kb, default_rules)
        assert rx.total_kcal == 2100
        assert rx.category == "normal"
        assert rx.servings == {"starch": 6, "vegetable": 3, "fruit": 2,
                               "protein": 3, "milk": 3, "sugar": 0, "fat": 1}
        assert rx.bmi == pytest.approx(70 / 1.7 ** 2)
        assert "kcal_normal_moderate" in rx.trace

    def test_slim_little_example(self, default_kb, default_rules):
        p = make_patient(weight=45.0, height=1.65, activity="little")  # bmi 16.5
        rx = assess(p, default_kb, default_rules)
        assert rx.total_kcal == 1350
        assert rx.servings["starch"] == 10

    def test_missing_milk_rules_reported(self, default_kb, default_rules):
        pruned = serialize_rules(default_rules)
        pruned = "\n".join(block for block in pruned.split("\n\n")
                           if "milk_servings" not in block)
        with pytest.raises(IncompleteAssessmentError) as exc:
            assess(make_patient(), default_kb, parse_rules(pruned))
        assert exc.value.fact_name == "milk_servings"

    def test_matches_direct_composition(self, default_kb, default_rules):
        rng = random.Random(123)
        for _ in range(300):
            p = random_patient(rng)
            rx = assess(p, default_kb, default_rules)
            assert rx.category == classify_bmi(bmi(p.weight, p.height))
            assert rx.total_kcal == total_calories(p.weight, rx.category,
                                                   p.activity)
            assert rx.servings == prescribed_servings(p, default_kb)
            # rule outputs already sit inside the default KB ranges
            assert not any("clamped" in note for note in rx.notes)

    def test_derived_facts_match_reference_oracle(self, default_rules):
        rng = random.Random(321)
        for _ in range(300):
            p = random_patient(rng)
            memory = infer(default_rules,
                           WorkingMemory.from_facts(seed_facts(p)))
            expected = reference_derived_facts(p.age, p.weight, p.height,
                                               p.activity, p.comorbidities)
            derived = {name: memory.facts[name] for name in expected}
            assert derived == expected

    def test_clamping_recorded_in_notes(self, default_kb, default_rules):
        import dataclasses
        kb = default_kb
        groups = dict(kb.groups)
        groups["starch"] = FoodGroup("starch", 80, 2, 7)
        narrow = dataclasses.replace(kb, groups=groups)
        p = make_patient(activity="very_active")  # rules say starch 8
        rx = assess(p, narrow, default_rules)
        assert rx.servings["starch"] == 7
        assert any("clamped starch" in note for note in rx.notes)
        assert prescribed_servings(p, narrow)["starch"] == 7

    def test_bgl_advisory_note(self, default_kb, default_rules):
        rx = assess(make_patient(bgl=450.0), default_kb, default_rules)
        assert any("bgl" in note for note in rx.notes)
        rx_ok = assess(make_patient(bgl=120.0), default_kb, default_rules)
        assert not any("bgl" in note for note in rx_ok.notes)
        # out-of-range BGL changes nothing but the note
        assert rx.servings == rx_ok.servings
        assert rx.total_kcal == rx_ok.total_kcal


class TestPatientValidation:
    def test_valid_patient_passes(self):
        data = dict(name="A", gender="female", age=40, weight=70, height=1.7,
                    activity="moderate")
        assert validate_patient_fields(data) == {}
        p = patient_from_dict(data, "x1")
        assert p.id == "x1" and p.weight == 70.0

    @pytest.mark.parametrize("override, field", [
        ({"weight": -5}, "weight"),
        ({"weight": 0}, "weight"),
        ({"weight": 501}, "weight"),
        ({"height": 3.0}, "height"),
        ({"height": 0.2}, "height"),
        ({"age": 0}, "age"),
        ({"age": 131}, "age"),
        ({"age": 40.5}, "age"),
        ({"gender": "other"}, "gender"),
        ({"activity": "sometimes"}, "activity"),
        ({"name": "  "}, "name"),
        ({"bgl": -1}, "bgl"),
        ({"comorbidities": ["smallpox"]}, "comorbidities"),
        ({"preferred_items": ["rice"]}, "preferred_items"),
    ])
    def test_field_errors(self, override, field):
        data = dict(name="A", gender="female", age=40, weight=70, height=1.7,
                    activity="moderate")
        data.update(override)
        errors = validate_patient_fields(data)
        assert field in errors
        with pytest.raises(PatientValidationError) as exc:
            patient_from_dict(data)
        assert field in exc.value.fields

    def test_comorbidity_seed_only_present_flags(self):
        p = make_patient(comorbidities=frozenset({"gout"}))
        facts = seed_facts(p)
        assert facts["gout"] is True
        assert "typhoid" not in facts
        assert math.isclose(facts["bmi"], 70 / 1.7 ** 2)
