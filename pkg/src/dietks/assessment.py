"""Patient assessment: BMI, calorie allowance and per-group servings.

`assess` drives the shipped ruleset through the inference engine and is the
production path; `classify_bmi`, `total_calories` and `prescribed_servings`
are direct hard-coded equivalents kept as an independent route for checking
the rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from . import ruleslang
from .kb import GROUP_IDS, KnowledgeBase
from .ruleslang import RuleSet, WorkingMemory

GENDERS = ("male", "female")
ACTIVITIES = ("very_active", "moderate", "little")
COMORBIDITIES = ("anorexia", "surgery", "gout", "heart_disease",
                 "gallbladder", "liver", "hypertension", "typhoid")
# Comorbidities that restrict protein and milk servings.
RESTRICTIVE = ("gout", "heart_disease", "gallbladder", "liver",
               "hypertension", "typhoid")

CATEGORIES = ("slim", "normal", "overweight", "obese")

# kcal-per-kg multiplier by (category, activity).
MULTIPLIERS = {
    "slim": {"very_active": 40, "moderate": 35, "little": 30},
    "normal": {"very_active": 35, "moderate": 30, "little": 25},
    "overweight": {"very_active": 30, "moderate": 25, "little": 20},
    "obese": {"very_active": 30, "moderate": 25, "little": 20},
}

BGL_ADVISORY_RANGE = (50.0, 400.0)


class PatientValidationError(ValueError):
    """Bad patient data; `fields` maps field name -> message."""

    def __init__(self, fields: dict[str, str]):
        super().__init__("; ".join(f"{k}: {v}" for k, v in fields.items()))
        self.fields = fields


class IncompleteAssessmentError(RuntimeError):
    """The ruleset failed to derive a fact the prescription needs."""

    def __init__(self, fact_name: str):
        super().__init__(f"assessment incomplete: fact '{fact_name}' was not derived")
        self.fact_name = fact_name


@dataclass(frozen=True)
class Patient:
    id: str
    name: str
    gender: str
    age: int
    weight: float  # kg, accepted to 0.1 kg
    height: float  # meters
    activity: str
    bgl: float | None = None  # mg/dL, advisory only
    comorbidities: frozenset[str] = frozenset()
    preferred_items: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Prescription:
    total_kcal: int
    servings: dict[str, int]  # group id -> allowed servings
    category: str
    bmi: float
    trace: tuple[str, ...] = ()  # fired rule names, in order
    notes: tuple[str, ...] = ()  # clamp events and advisories


def _as_number(value) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    return float(value)


def validate_patient_fields(data: dict) -> dict[str, str]:
    """Field-level problems with a patient JSON object; empty dict if clean."""
    errors: dict[str, str] = {}

    name = data.get("name")
    if not isinstance(name, str) or not name.strip():
        errors["name"] = "required non-empty string"
    if data.get("gender") not in GENDERS:
        errors["gender"] = f"must be one of {', '.join(GENDERS)}"
    if data.get("activity") not in ACTIVITIES:
        errors["activity"] = f"must be one of {', '.join(ACTIVITIES)}"

    age = _as_number(data.get("age"))
    if age is None or age != int(age):
        errors["age"] = "must be an integer"
    elif not 1 <= age <= 130:
        errors["age"] = "must be in [1, 130] years"

    weight = _as_number(data.get("weight"))
    if weight is None:
        errors["weight"] = "must be a number (kg)"
    elif not 0 < weight <= 500:
        errors["weight"] = "must be in (0, 500] kg"

    height = _as_number(data.get("height"))
    if height is None:
        errors["height"] = "must be a number (meters)"
    elif not 0.3 < height <= 2.5:
        errors["height"] = "must be in (0.3, 2.5] meters"

    if data.get("bgl") is not None:
        bgl_value = _as_number(data.get("bgl"))
        if bgl_value is None or bgl_value < 0:
            errors["bgl"] = "must be a number >= 0 (mg/dL)"

    comorbidities = data.get("comorbidities", [])
    if not isinstance(comorbidities, (list, tuple, set, frozenset)):
        errors["comorbidities"] = "must be a list of condition names"
    else:
        unknown = [c for c in comorbidities if c not in COMORBIDITIES]
        if unknown:
            errors["comorbidities"] = (
                f"unknown condition(s): {', '.join(map(str, unknown))}; "
                f"known: {', '.join(COMORBIDITIES)}")

    preferred = data.get("preferred_items", [])
    if not isinstance(preferred, (list, tuple, set, frozenset)) or any(
            isinstance(i, bool) or not isinstance(i, int) for i in preferred):
        errors["preferred_items"] = "must be a list of item ids"
    return errors


def patient_from_dict(data: dict, patient_id: str = "anonymous") -> Patient:
    """Build a Patient from its JSON object; raises PatientValidationError."""
    errors = validate_patient_fields(data)
    if errors:
        raise PatientValidationError(errors)
    return Patient(
        id=str(data.get("id", patient_id)),
        name=data["name"].strip(),
        gender=data["gender"],
        age=int(data["age"]),
        weight=float(data["weight"]),
        height=float(data["height"]),
        activity=data["activity"],
        bgl=None if data.get("bgl") is None else float(data["bgl"]),
        comorbidities=frozenset(data.get("comorbidities", [])),
        preferred_items=frozenset(data.get("preferred_items", [])),
    )


def patient_to_dict(patient: Patient) -> dict:
    return {
        "id": patient.id,
        "name": patient.name,
        "gender": patient.gender,
        "age": patient.age,
        "weight": patient.weight,
        "height": patient.height,
        "activity": patient.activity,
        "bgl": patient.bgl,
        "comorbidities": sorted(patient.comorbidities),
        "preferred_items": sorted(patient.preferred_items),
    }


def bmi(weight: float, height: float) -> float:
    """Body mass index: weight in kg over squared height in meters."""
    if weight <= 0 or height <= 0:
        raise ValueError("weight and height must be positive")
    return weight / (height * height)


def classify_bmi(value: float) -> str:
    """slim <= 18.5 < normal <= 25 < overweight < 30 <= obese."""
    if value <= 0:
        raise ValueError("bmi must be positive")
    if value <= 18.5:
        return "slim"
    if value <= 25:
        return "normal"
    if value < 30:
        return "overweight"
    return "obese"


def total_calories(weight: float, category: str, activity: str) -> int:
    """Daily allowance: weight times the multiplier cell, rounded half-up."""
    if weight <= 0:
        raise ValueError("weight must be positive")
    multiplier = MULTIPLIERS[category][activity]
    exact = Decimal(str(weight)) * multiplier
    return int(exact.quantize(Decimal("1"), rounding=ROUND_HALF_UP))


def _clamp_servings(raw: dict[str, int], kb: KnowledgeBase) -> tuple[dict[str, int], list[str]]:
    clamped: dict[str, int] = {}
    notes: list[str] = []
    for gid in GROUP_IDS:
        group = kb.groups[gid]
        value = raw[gid]
        bounded = min(max(value, group.min_servings), group.max_servings)
        if bounded != value:
            notes.append(f"clamped {gid} servings {value} -> {bounded} "
                         f"(allowed {group.min_servings}..{group.max_servings})")
        clamped[gid] = bounded
    return clamped, notes


def prescribed_servings(patient: Patient, kb: KnowledgeBase) -> dict[str, int]:
    """Direct (non-rule-engine) computation of allowed servings per group."""
    value = bmi(patient.weight, patient.height)
    restricted = any(c in patient.comorbidities for c in RESTRICTIVE)

    raw = {
        "fruit": 4 if ("anorexia" in patient.comorbidities
                       or "surgery" in patient.comorbidities
                       or patient.age > 65) else 2,
        "starch": (6 if patient.activity == "moderate"
                   else 8 if patient.activity == "very_active"
                   else 10 if value < 18.5 else 6),
        "protein": 2 if restricted else 3,
        "milk": 2 if restricted else 3,
        "vegetable": 3,
        "sugar": 0,
        "fat": 1,
    }
    clamped, _ = _clamp_servings(raw, kb)
    return clamped


def seed_facts(patient: Patient) -> dict[str, ruleslang.Value]:
    """Working-memory facts for one patient; absent comorbidities stay unset."""
    facts: dict[str, ruleslang.Value] = {
        "age": patient.age,
        "weight": patient.weight,
        "bmi": bmi(patient.weight, patient.height),
        "activity": patient.activity,
    }
    for condition in patient.comorbidities:
        facts[condition] = True
    return facts


def assess(patient: Patient, kb: KnowledgeBase, ruleset: RuleSet) -> Prescription:
    """Run the ruleset over the patient's facts and assemble a Prescription."""
    memory = ruleslang.infer(ruleset, WorkingMemory.from_facts(seed_facts(patient)))

    def derived(fact_name: str):
        if fact_name not in memory.derived:
            raise IncompleteAssessmentError(fact_name)
        return memory.facts[fact_name]

    category = derived("bmi_category")
    multiplier = derived("kcal_multiplier")
    raw = {gid: int(derived(f"{gid}_servings")) for gid in GROUP_IDS}

    servings, notes = _clamp_servings(raw, kb)
    if patient.bgl is not None and not (
            BGL_ADVISORY_RANGE[0] <= patient.bgl <= BGL_ADVISORY_RANGE[1]):
        notes.append(f"bgl {patient.bgl:g} mg/dL outside advisory range "
                     f"{BGL_ADVISORY_RANGE[0]:g}-{BGL_ADVISORY_RANGE[1]:g}")

    exact = Decimal(str(patient.weight)) * int(multiplier)
    total = int(exact.quantize(Decimal("1"), rounding=ROUND_HALF_UP))
    return Prescription(
        total_kcal=total,
        servings=servings,
        category=str(category),
        bmi=bmi(patient.weight, patient.height),
        trace=tuple(memory.fired_rules()),
        notes=tuple(notes),
    )


def load_default_rules() -> RuleSet:
    """The assessment ruleset shipped with the package."""
    from importlib.resources import files

    text = files("dietks.data").joinpath("assessment.rules").read_text("utf-8")
    return ruleslang.parse_rules(text)
