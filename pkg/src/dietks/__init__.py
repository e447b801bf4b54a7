"""Diet planning for type-2 diabetes.

A food knowledge base, a forward-chaining rule engine with a small rules
DSL, patient assessment (BMI, calorie allowance, per-group servings) and a
deterministic five-meal planner, exposed as a library, CLI and HTTP service.
"""

from .assessment import (Patient, Prescription, assess, bmi, classify_bmi,
                         load_default_rules, prescribed_servings,
                         total_calories)
from .kb import (FoodGroup, FoodItem, KnowledgeBase, items_in_group,
                 load_default_kb, parse_kb, serialize_kb, validate_kb)
from .planner import (MealEntry, MealPlan, compose_meals, distribute_servings,
                      fill_residual, plan_calories, serialize_plan)
from .ruleslang import (Condition, Rule, RuleSet, WorkingMemory, explain,
                        infer, parse_rules, serialize_rules)

__version__ = "0.1.0"

__all__ = [
    "FoodGroup", "FoodItem", "KnowledgeBase", "parse_kb", "serialize_kb",
    "validate_kb", "items_in_group", "load_default_kb",
    "Condition", "Rule", "RuleSet", "WorkingMemory", "parse_rules",
    "serialize_rules", "infer", "explain",
    "Patient", "Prescription", "bmi", "classify_bmi", "total_calories",
    "prescribed_servings", "assess", "load_default_rules",
    "MealEntry", "MealPlan", "fill_residual", "distribute_servings",
    "compose_meals", "plan_calories", "serialize_plan",
    "__version__",
]
