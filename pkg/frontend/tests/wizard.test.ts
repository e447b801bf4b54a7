import { beforeEach, describe, expect, inject, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { applyFieldErrors, renderIntake } from "../src/intake.js";
import { createWizard, Wizard } from "../src/wizard.js";

const base = inject("serviceBase");

function mount(): { root: HTMLElement; wizard: Wizard } {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const wizard = createWizard(root, new ApiClient(base));
  return { root, wizard };
}

async function waitFor<T>(probe: () => T | null | undefined,
                          what: string, timeout = 15000): Promise<T> {
  const deadline = Date.now() + timeout;
  while (Date.now() < deadline) {
    const result = probe();
    if (result) {
      return result;
    }
    await new Promise((r) => setTimeout(r, 20));
  }
  throw new Error(`timed out waiting for ${what}`);
}

function setValue(field: string, value: string): void {
  const input = document.querySelector<HTMLInputElement>(`[name="${field}"]`)!;
  input.value = value;
}

function fillValidIntake(): void {
  setValue("name", "Amna");
  setValue("gender", "female");
  setValue("age", "40");
  setValue("weight", "70");
  setValue("height", "1.7");
  setValue("activity", "moderate");
}

function submitIntake(): void {
  document.querySelector<HTMLFormElement>("#intake-form")!.requestSubmit();
}

async function completeIntake(): Promise<void> {
  await waitFor(() => document.querySelector("#intake-form"), "intake form");
  fillValidIntake();
  submitIntake();
  await waitFor(() => document.querySelector("#food-grid"), "food grid");
}

describe("intake step", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("advances to the selection grid after a valid submit", async () => {
    const { wizard } = mount();
    await completeIntake();
    expect(wizard.state.step).toBe("selection");
    expect(wizard.state.patientId).toBeTruthy();
  });

  it("rejects weight 0 locally without any request", async () => {
    mount();
    await waitFor(() => document.querySelector("#intake-form"), "intake form");
    const fetchSpy = vi.spyOn(globalThis, "fetch");
    fillValidIntake();
    setValue("weight", "0");
    submitIntake();
    await new Promise((r) => setTimeout(r, 50));
    const box = document.querySelector('.field-error[data-field="weight"]')!;
    expect(box.textContent).toContain("weight");
    expect(document.querySelector("#intake-form")).toBeTruthy();
    expect(fetchSpy).not.toHaveBeenCalled();
    fetchSpy.mockRestore();
  });

  it("maps server field errors onto the form", async () => {
    document.body.innerHTML = '<div id="host"></div>';
    const host = document.getElementById("host")!;
    renderIntake(host, {
      submit: async () => {
        throw new ApiError(400, "invalid patient",
          [{ field: "weight", message: "server rejected this weight" }]);
      },
    });
    fillValidIntake();
    submitIntake();
    const box = await waitFor(() => {
      const node = document.querySelector('.field-error[data-field="weight"]');
      return node?.textContent ? node : null;
    }, "mapped server error");
    expect(box.textContent).toBe("server rejected this weight");
  });

  it("applyFieldErrors clears stale messages", () => {
    document.body.innerHTML = `
      <form id="f">
        <div class="field-error" data-field="age">old</div>
        <div class="field-error" data-field="name"></div>
      </form>`;
    const form = document.getElementById("f") as HTMLFormElement;
    applyFieldErrors(form, { name: "required" });
    expect(form.querySelector('[data-field="age"]')!.textContent).toBe("");
    expect(form.querySelector('[data-field="name"]')!.textContent).toBe("required");
  });
});

describe("food grid step", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders the seven pyramid columns with all 45 foods", async () => {
    mount();
    await completeIntake();
    const columns = document.querySelectorAll(".grid-column");
    expect(columns).toHaveLength(7);
    expect(Array.from(columns).map((c) => c.getAttribute("data-group")))
      .toEqual(["starch", "vegetable", "fruit", "protein", "milk", "sugar", "fat"]);
    expect(document.querySelectorAll('#food-grid input[type="checkbox"]'))
      .toHaveLength(45);
  });

  it("renders Arabic names right-to-left", async () => {
    mount();
    await completeIntake();
    const arabic = document.querySelectorAll("#food-grid .name-ar");
    expect(arabic.length).toBeGreaterThan(0);
    for (const span of arabic) {
      expect(span.getAttribute("dir")).toBe("rtl");
      expect(span.getAttribute("lang")).toBe("ar");
    }
  });

  it("save persists the toggled selection", async () => {
    const { wizard } = mount();
    await completeIntake();
    document.querySelector<HTMLInputElement>("#food-42")!.click();
    document.querySelector<HTMLInputElement>("#grid-save")!.click();
    await new Promise((r) => setTimeout(r, 200));
    const record = await (await fetch(
      `${base}/patients/${wizard.state.patientId}`)).json();
    expect(record.patient.preferred_items).toEqual([42]);
  });

  it("generates a plan even with an empty selection", async () => {
    mount();
    await completeIntake();
    document.querySelector<HTMLButtonElement>("#grid-generate")!.click();
    await waitFor(() => document.querySelector("#plan-view"), "plan view");
    expect(document.querySelectorAll(".meal-section")).toHaveLength(5);
  });
});

describe("plan step", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  async function runFullFlow(): Promise<Wizard> {
    const { wizard } = mount();
    await completeIntake();
    for (const id of [42, 22, 11]) {
      document.querySelector<HTMLInputElement>(`#food-${id}`)!.click();
    }
    document.querySelector<HTMLButtonElement>("#grid-generate")!.click();
    await waitFor(() => document.querySelector("#plan-view"), "plan view");
    return wizard;
  }

  it("walks intake -> select {42,22,11} -> generate -> plan", async () => {
    const wizard = await runFullFlow();
    expect(wizard.state.step).toBe("plan");

    const sections = document.querySelectorAll(".meal-section");
    expect(sections).toHaveLength(5);
    expect(Array.from(sections).map((s) => s.getAttribute("data-slot")))
      .toEqual(["breakfast", "snack1", "lunch", "snack2", "dinner"]);

    // header totals must match what the service recorded for this patient
    const record = await (await fetch(
      `${base}/patients/${wizard.state.patientId}`)).json();
    const plan = record.last_plan.plan;
    expect(document.querySelector("#plan-totals")!.textContent)
      .toBe(`${plan.total_kcal} of ${plan.target_kcal} kcal`);
    expect(document.querySelector("#plan-category")!.textContent)
      .toBe(record.last_plan.prescription.category);

    // display-sum check: rendered rows add up to the displayed total
    const rendered = Array.from(document.querySelectorAll(".meal-row .kcal"))
      .reduce((sum, cell) => sum + Number(cell.textContent), 0);
    expect(rendered).toBe(plan.total_kcal);

    // warnings surface as a visible banner whenever the service sent any
    if (record.last_plan.warnings.length > 0) {
      expect(document.querySelector("#plan-warnings")).toBeTruthy();
    } else {
      expect(document.querySelector("#plan-warnings")).toBeNull();
    }
  });

  it("edit selection returns to the grid with the boxes still checked", async () => {
    await runFullFlow();
    document.querySelector<HTMLButtonElement>("#plan-edit-selection")!.click();
    await waitFor(() => document.querySelector("#food-grid"), "food grid again");
    for (const id of [42, 22, 11]) {
      expect(document.querySelector<HTMLInputElement>(`#food-${id}`)!.checked)
        .toBe(true);
    }
    expect(document.querySelector<HTMLInputElement>("#food-43")!.checked)
      .toBe(false);
  });

  it("regenerating without changes renders the identical plan", async () => {
    await runFullFlow();
    const first = document.querySelector("#plan-view")!.innerHTML;
    document.querySelector<HTMLButtonElement>("#plan-regenerate")!.click();
    await new Promise((r) => setTimeout(r, 300));
    await waitFor(() => document.querySelector("#plan-view"), "plan view again");
    expect(document.querySelector("#plan-view")!.innerHTML).toBe(first);
  });
});
