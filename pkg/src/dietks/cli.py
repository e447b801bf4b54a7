"""Command line entry point: validate, assess, plan, serve.

Machine-readable output (prescription and plan JSON) goes to stdout;
everything else, including errors, goes to stderr.  Exit codes: 0 success,
1 domain or validation failure, 2 I/O or environment failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib.resources import files

from . import assessment
from .assessment import PatientValidationError, assess, patient_from_dict
from .kb import KbParseError, parse_kb, validate_kb
from .planner import UnknownItemError, compose_meals, serialize_plan
from .ruleslang import RuleParseError, parse_rules

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _default_path(name: str) -> str:
    return str(files("dietks.data").joinpath(name))


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_inputs(args):
    kb = parse_kb(_read(args.kb))
    ruleset = parse_rules(_read(args.rules))
    return kb, ruleset


def _load_patient(path: str, patient_id: str = "cli"):
    data = json.loads(_read(path))
    if not isinstance(data, dict):
        raise PatientValidationError({"patient": "file must hold a JSON object"})
    return patient_from_dict(data, patient_id)


def cmd_validate(args) -> int:
    status = EXIT_OK
    try:
        kb = parse_kb(_read(args.kb))
    except KbParseError as exc:
        print(f"{args.kb}: {exc}", file=sys.stderr)
        status = EXIT_DOMAIN
    else:
        for violation in validate_kb(kb):
            print(f"{args.kb}: {violation}", file=sys.stderr)
            status = EXIT_DOMAIN
    try:
        parse_rules(_read(args.rules))
    except RuleParseError as exc:
        print(f"{args.rules}: {exc}", file=sys.stderr)
        status = EXIT_DOMAIN
    return status


def cmd_assess(args) -> int:
    kb, ruleset = _load_inputs(args)
    patient = _load_patient(args.patient)
    prescription = assess(patient, kb, ruleset)
    document = {
        "bmi": prescription.bmi,
        "category": prescription.category,
        "total_kcal": prescription.total_kcal,
        "servings": prescription.servings,
        "notes": list(prescription.notes),
        "trace": list(prescription.trace),
    }
    print(json.dumps(document, ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_plan(args) -> int:
    kb, ruleset = _load_inputs(args)
    patient = _load_patient(args.patient)
    preferred = patient.preferred_items
    if args.select is not None:
        try:
            preferred = frozenset(int(s) for s in args.select.split(",") if s.strip())
        except ValueError:
            print("--select must be a comma-separated list of item ids",
                  file=sys.stderr)
            return EXIT_DOMAIN
    prescription = assess(patient, kb, ruleset)
    plan = compose_meals(prescription, kb, preferred, patient_id=patient.id)
    sys.stdout.write(serialize_plan(plan, kb))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    try:
        app = build_app(kb_path=args.kb, rules_path=args.rules,
                        store_path=args.store)
    except (KbParseError, RuleParseError) as exc:
        print(f"cannot start: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"cannot start: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except SystemExit as exc:
        return exc.code or EXIT_IO
    except OSError as exc:
        print(f"cannot bind: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dietks",
        description="Diet planning for type-2 diabetes: knowledge base, "
                    "rule-driven assessment and five-meal plans.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_kb_rules(p):
        p.add_argument("--kb", default=_default_path("food_kb.txt"),
                       help="knowledge base file (default: shipped KB)")
        p.add_argument("--rules", default=_default_path("assessment.rules"),
                       help="assessment rules file (default: shipped rules)")

    p = sub.add_parser("validate", help="check a knowledge base and rules file")
    add_kb_rules(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("assess", help="print the prescription for a patient")
    p.add_argument("--patient", required=True, help="patient JSON file")
    add_kb_rules(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("plan", help="print a five-meal plan for a patient")
    p.add_argument("--patient", required=True, help="patient JSON file")
    add_kb_rules(p)
    p.add_argument("--select", default=None,
                   help="comma-separated item ids overriding the patient's "
                        "preferred foods")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("serve", help="run the HTTP service")
    add_kb_rules(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--store", default="dietks_store.jsonl",
                   help="patient store file (JSON lines)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KbParseError, RuleParseError, UnknownItemError,
            assessment.IncompleteAssessmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PatientValidationError as exc:
        for name, message in exc.fields.items():
            print(f"error: patient field '{name}': {message}", file=sys.stderr)
        return EXIT_DOMAIN
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
