import type { PlanResponse } from "./api.js";

export type Step = "intake" | "selection" | "plan";

// One consultation per page; the wizard owns a single mutable instance.
export interface ConsultationState {
  step: Step;
  patientId: string | null;
  selectedIds: Set<number>;
  lastPlan: PlanResponse | null;
}

export function initialState(): ConsultationState {
  return { step: "intake", patientId: null, selectedIds: new Set(), lastPlan: null };
}

export function toSelection(state: ConsultationState, patientId: string): void {
  state.patientId = patientId;
  state.step = "selection";
}

export function toPlan(state: ConsultationState, plan: PlanResponse): void {
  if (!state.patientId) {
    throw new Error("selection step requires a patient id");
  }
  state.lastPlan = plan;
  state.step = "plan";
}

export function backToSelection(state: ConsultationState): void {
  if (!state.patientId) {
    throw new Error("selection step requires a patient id");
  }
  state.step = "selection";
}
