"""HTTP/JSON service: patient records, food listing and plan generation.

Persistence is a single append-only JSON-lines file.  Every mutation
appends a full record snapshot; reload applies last-write-wins per patient
id, so a restart reproduces the latest acknowledged state.  A torn final
line (partial write from a crash) is skipped with a warning.
"""

from __future__ import annotations

import json
import logging
import os
import secrets
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import assessment
from .assessment import (IncompleteAssessmentError, Patient, assess,
                         patient_from_dict, patient_to_dict,
                         validate_patient_fields)
from .kb import KnowledgeBase, items_in_group
from .planner import compose_meals, plan_to_dict
from .ruleslang import RuleSet

logger = logging.getLogger("dietks.service")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class PatientRecord:
    patient: Patient
    created_at: str
    updated_at: str
    last_plan: dict | None = None  # stored plan response body

    def to_dict(self) -> dict:
        return {
            "id": self.patient.id,
            "patient": patient_to_dict(self.patient),
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "last_plan": self.last_plan,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PatientRecord":
        patient = patient_from_dict(data["patient"], data["id"])
        return cls(
            patient=patient,
            created_at=data["created_at"],
            updated_at=data["updated_at"],
            last_plan=data.get("last_plan"),
        )


class Store:
    """Append-only JSON-lines patient store with last-write-wins reload."""

    def __init__(self, path: str):
        self.path = path
        self.records: dict[str, PatientRecord] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._load()
        with open(self.path, "a", encoding="utf-8"):
            pass  # fail at startup, not on the first write

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.decode("utf-8", errors="replace").strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                    record = PatientRecord.from_dict(data)
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    logger.warning("skipping unreadable store line %d in %s: %s",
                                   lineno, self.path, exc)
                    continue
                self.records[record.patient.id] = record
        self._counter = len(self.records)

    def next_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"p{self._counter:04d}-{secrets.token_hex(3)}"

    def put(self, record: PatientRecord):
        """Persist then publish; readers never see an unpersisted record."""
        with self._lock:
            self._write(record)

    def update(self, patient_id: str, mutate) -> PatientRecord | None:
        """Read-modify-write under the single writer lock; None if absent."""
        with self._lock:
            record = self.records.get(patient_id)
            if record is None:
                return None
            updated = mutate(record)
            self._write(updated)
            return updated

    def _write(self, record: PatientRecord):
        # caller holds the lock
        line = json.dumps(record.to_dict(), ensure_ascii=False) + "\n"
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(line)
            f.flush()
            os.fsync(f.fileno())
        self.records[record.patient.id] = record

    def get(self, patient_id: str) -> PatientRecord | None:
        return self.records.get(patient_id)

    def all_records(self) -> list[PatientRecord]:
        return list(self.records.values())


def _error(status: int, message: str, fields: list[dict] | None = None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": message, "fields": fields or []})


def _field_errors(errors: dict[str, str]) -> list[dict]:
    return [{"field": name, "message": msg} for name, msg in errors.items()]


async def _read_json(request: Request):
    """Parse a JSON request body; returns (data, error_response)."""
    content_type = request.headers.get("content-type", "")
    if "application/json" not in content_type.lower():
        return None, _error(415, "content type must be application/json")
    try:
        data = json.loads(await request.body())
    except json.JSONDecodeError as exc:
        return None, _error(400, f"malformed JSON body: {exc}")
    if not isinstance(data, dict):
        return None, _error(400, "request body must be a JSON object")
    return data, None


def create_app(kb: KnowledgeBase, ruleset: RuleSet, store: Store) -> FastAPI:
    app = FastAPI(title="dietks", docs_url=None, redoc_url=None)
    app.add_middleware(  # the web UI is served from its own origin
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    def food_dict(item) -> dict:
        return {
            "id": item.id,
            "group": item.group,
            "name_en": item.name_en,
            "name_ar": item.name_ar,
            "serving_desc": item.serving_desc,
            "kcal": kb.effective_kcal(item),
        }

    def summary(record: PatientRecord) -> dict:
        return {
            "id": record.patient.id,
            "name": record.patient.name,
            "gender": record.patient.gender,
            "age": record.patient.age,
            "created_at": record.created_at,
            "updated_at": record.updated_at,
            "has_plan": record.last_plan is not None,
        }

    @app.get("/health")
    def health():
        return {"status": "ok", "kb_version": kb.version}

    @app.get("/foods")
    def get_foods(group: str | None = None):
        if group is not None and group not in kb.groups:
            return _error(400, f"unknown group '{group}'",
                          [{"field": "group", "message": f"unknown group '{group}'"}])
        if group is None:
            items = sorted(kb.items.values(), key=lambda i: i.id)
        else:
            items = items_in_group(kb, group)
        return [food_dict(i) for i in items]

    @app.post("/patients", status_code=201)
    async def create_patient(request: Request):
        data, err = await _read_json(request)
        if err:
            return err
        errors = validate_patient_fields(data)
        if not errors.get("preferred_items"):
            unknown = [i for i in data.get("preferred_items", []) if i not in kb.items]
            if unknown:
                errors["preferred_items"] = \
                    f"unknown item id(s): {', '.join(map(str, sorted(unknown)))}"
        if errors:
            return _error(400, "invalid patient", _field_errors(errors))
        data = dict(data)
        data.pop("id", None)  # ids are always server-generated
        patient = patient_from_dict(data, store.next_id())
        now = _utc_now()
        store.put(PatientRecord(patient=patient, created_at=now, updated_at=now))
        return JSONResponse(status_code=201, content={"id": patient.id})

    @app.get("/patients")
    def list_patients():
        records = sorted(store.all_records(),
                         key=lambda r: (r.created_at, r.patient.id))
        return [summary(r) for r in records]

    @app.get("/patients/{patient_id}")
    def get_patient(patient_id: str):
        record = store.get(patient_id)
        if record is None:
            return _error(404, f"unknown patient '{patient_id}'")
        return record.to_dict()

    @app.put("/patients/{patient_id}/selection")
    async def set_selection(patient_id: str, request: Request):
        record = store.get(patient_id)
        if record is None:
            return _error(404, f"unknown patient '{patient_id}'")
        data, err = await _read_json(request)
        if err:
            return err
        item_ids = data.get("item_ids")
        if not isinstance(item_ids, list) or any(
                isinstance(i, bool) or not isinstance(i, int) for i in item_ids):
            return _error(400, "item_ids must be a list of integers",
                          [{"field": "item_ids", "message": "must be a list of integers"}])
        unknown = sorted(i for i in item_ids if i not in kb.items)
        if unknown:
            return _error(400,
                          f"unknown item id(s): {', '.join(map(str, unknown))}",
                          [{"field": "item_ids",
                            "message": f"unknown item id(s): {', '.join(map(str, unknown))}"}])
        store.update(patient_id, lambda current: replace(
            current,
            patient=replace(current.patient, preferred_items=frozenset(item_ids)),
            updated_at=_utc_now()))
        return {"id": patient_id, "item_ids": sorted(set(item_ids))}

    @app.post("/patients/{patient_id}/plan")
    def generate_plan(patient_id: str):
        record = store.get(patient_id)
        if record is None:
            return _error(404, f"unknown patient '{patient_id}'")
        try:
            prescription = assess(record.patient, kb, ruleset)
        except IncompleteAssessmentError as exc:
            return _error(500, str(exc))
        plan = compose_meals(prescription, kb, record.patient.preferred_items,
                             patient_id=record.patient.id)
        body = {
            "prescription": {
                "bmi": prescription.bmi,
                "category": prescription.category,
                "total_kcal": prescription.total_kcal,
                "servings": prescription.servings,
            },
            "plan": plan_to_dict(plan, kb),
            "warnings": list(prescription.notes) + list(plan.warnings),
            "trace": list(prescription.trace),
        }
        store.update(patient_id, lambda current: replace(
            current, last_plan=body, updated_at=_utc_now()))
        return body

    return app


def build_app(kb_path: str | None = None, rules_path: str | None = None,
              store_path: str = "dietks_store.jsonl") -> FastAPI:
    """App factory from file paths; defaults to the shipped KB and rules."""
    from .kb import load_default_kb, parse_kb

    if kb_path is None:
        kb = load_default_kb()
    else:
        with open(kb_path, encoding="utf-8") as f:
            kb = parse_kb(f.read())
    if rules_path is None:
        ruleset = assessment.load_default_rules()
    else:
        from .ruleslang import load_rules_file
        ruleset = load_rules_file(rules_path)
    return create_app(kb, ruleset, Store(store_path))
