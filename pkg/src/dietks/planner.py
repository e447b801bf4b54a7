"""Five-meal day planning from a serving prescription.

The planner first tops up servings so total calories approach the daily
allowance without ever exceeding it, splits each group's servings across
the five meals by largest-remainder apportionment, then assigns servings
to concrete foods round-robin over the patient's selected items.  Every
step is deterministic: equal inputs produce byte-identical plans.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .assessment import Prescription
from .kb import GROUP_IDS, KnowledgeBase, items_in_group

# Meal slots in day order with their share of the day's servings.
SLOTS = ("breakfast", "snack1", "lunch", "snack2", "dinner")
SLOT_FRACTIONS = {
    "breakfast": Fraction(2, 10),
    "snack1": Fraction(1, 10),
    "lunch": Fraction(3, 10),
    "snack2": Fraction(1, 10),
    "dinner": Fraction(3, 10),
}

# Groups that may absorb leftover calories, in top-up order. Protein stays
# capped by the comorbidity rules and sugar is never added for a diabetic.
FILLER_ORDER = ("starch", "milk", "fruit", "vegetable", "fat")

# Shedding order when the prescribed servings already exceed the allowance:
# sugar and fat go first, protein is preserved longest.
TRIM_ORDER = ("sugar", "fat", "vegetable", "fruit", "milk", "starch", "protein")


class UnknownItemError(ValueError):
    def __init__(self, item_ids: list[int]):
        ids = ", ".join(str(i) for i in sorted(item_ids))
        super().__init__(f"unknown item {ids}")
        self.item_ids = sorted(item_ids)


@dataclass(frozen=True)
class MealEntry:
    item: int  # FoodItem id
    servings: int
    kcal: int


@dataclass(frozen=True)
class MealPlan:
    patient: str  # Patient id
    meals: dict[str, list[MealEntry]]  # slot -> entries
    total_kcal: int
    target_kcal: int
    warnings: tuple[str, ...] = ()


def fill_residual(prescription: Prescription,
                  kb: KnowledgeBase) -> tuple[dict[str, int], list[str]]:
    """Adjust servings toward the calorie target, which is a hard ceiling.

    Normally the prescribed servings fall short of the allowance and the
    loop tops them up, one serving per filler group per cycle, skipping
    groups at their maximum or whose serving would overshoot.  For light or
    heavily restricted patients the prescribed servings can already exceed
    the allowance; then servings are shed (pyramid minimums first, to zero
    only if unavoidable) until the plan fits.  Any final shortfall is
    reported as a calorie_gap warning.
    """
    servings = dict(prescription.servings)
    target = prescription.total_kcal
    total = sum(servings[g] * kb.groups[g].kcal_per_serving for g in servings)
    warnings = []

    if total > target:
        trimmed = 0
        for floors in ({g: kb.groups[g].min_servings for g in servings},
                       {g: 0 for g in servings}):
            shrunk = True
            while total > target and shrunk:
                shrunk = False
                for gid in TRIM_ORDER:
                    if total <= target:
                        break
                    if servings[gid] > floors[gid]:
                        servings[gid] -= 1
                        total -= kb.groups[gid].kcal_per_serving
                        trimmed += 1
                        shrunk = True
        warnings.append(f"calorie_cap: trimmed {trimmed} serving(s) to stay "
                        f"within {target} kcal")

    added = True
    while added:
        added = False
        for gid in FILLER_ORDER:
            group = kb.groups[gid]
            if (servings[gid] < group.max_servings
                    and total + group.kcal_per_serving <= target):
                servings[gid] += 1
                total += group.kcal_per_serving
                added = True

    if total < target:
        warnings.append(f"calorie_gap: {target - total} kcal short")
    return servings, warnings


def apportion(count: int, fractions=None) -> dict[str, int]:
    """Split an integer count across the meal slots by largest remainder.

    Floors each slot's exact share, then grants the leftover units to the
    largest fractional remainders; remainder ties go to the earlier slot.
    The result always sums to `count` exactly.
    """
    if fractions is None:
        fractions = SLOT_FRACTIONS
    shares = {slot: fractions[slot] * count for slot in SLOTS}
    result = {slot: int(shares[slot]) for slot in SLOTS}
    leftover = count - sum(result.values())
    by_remainder = sorted(
        range(len(SLOTS)),
        key=lambda i: (-(shares[SLOTS[i]] - result[SLOTS[i]]), i))
    for i in by_remainder[:leftover]:
        result[SLOTS[i]] += 1
    return result


def distribute_servings(servings: dict[str, int]) -> dict[str, dict[str, int]]:
    """Per-slot serving counts for every group; conserves each group total."""
    per_group = {gid: apportion(count) for gid, count in servings.items()}
    return {slot: {gid: per_group[gid][slot] for gid in servings}
            for slot in SLOTS}


def compose_meals(prescription: Prescription, kb: KnowledgeBase,
                  preferred: frozenset[int] | set[int],
                  patient_id: str = "anonymous") -> MealPlan:
    """Build the five-meal plan for one day.

    Within each slot and group, servings go round-robin over the patient's
    selected items of that group (ascending id), falling back to the whole
    group when nothing is selected; consecutive servings of one item merge
    into a single entry.
    """
    unknown = [i for i in preferred if i not in kb.items]
    if unknown:
        raise UnknownItemError(unknown)

    servings, warnings = fill_residual(prescription, kb)
    allocation = distribute_servings(servings)

    candidates: dict[str, list] = {}
    for gid in GROUP_IDS:
        chosen = [kb.items[i] for i in sorted(preferred)
                  if kb.items[i].group == gid]
        candidates[gid] = chosen or items_in_group(kb, gid)

    meals: dict[str, list[MealEntry]] = {}
    total = 0
    for slot in SLOTS:
        entries: list[MealEntry] = []
        for gid in GROUP_IDS:
            count = allocation[slot][gid]
            pool = candidates[gid]
            sequence = [pool[i % len(pool)] for i in range(count)]
            run_start = 0
            while run_start < len(sequence):
                run_end = run_start
                while (run_end + 1 < len(sequence)
                       and sequence[run_end + 1].id == sequence[run_start].id):
                    run_end += 1
                item = sequence[run_start]
                n = run_end - run_start + 1
                kcal = n * kb.effective_kcal(item)
                entries.append(MealEntry(item.id, n, kcal))
                total += kcal
                run_start = run_end + 1
        meals[slot] = entries
    return MealPlan(
        patient=patient_id,
        meals=meals,
        total_kcal=total,
        target_kcal=prescription.total_kcal,
        warnings=tuple(warnings),
    )


def plan_calories(plan: MealPlan, kb: KnowledgeBase) -> int:
    """Recompute the plan's calories from the knowledge base."""
    total = 0
    for entries in plan.meals.values():
        for entry in entries:
            if entry.item not in kb.items:
                raise UnknownItemError([entry.item])
            total += entry.servings * kb.effective_kcal(kb.items[entry.item])
    return total


def plan_to_dict(plan: MealPlan, kb: KnowledgeBase) -> dict:
    """JSON object for a plan; key order is fixed for byte-determinism."""
    return {
        "patient_id": plan.patient,
        "target_kcal": plan.target_kcal,
        "total_kcal": plan.total_kcal,
        "warnings": list(plan.warnings),
        "meals": {
            slot: [
                {
                    "item_id": e.item,
                    "name_en": kb.items[e.item].name_en,
                    "name_ar": kb.items[e.item].name_ar,
                    "servings": e.servings,
                    "kcal": e.kcal,
                }
                for e in plan.meals[slot]
            ]
            for slot in SLOTS
        },
    }


def serialize_plan(plan: MealPlan, kb: KnowledgeBase) -> str:
    return json.dumps(plan_to_dict(plan, kb), ensure_ascii=False, indent=2) + "\n"
