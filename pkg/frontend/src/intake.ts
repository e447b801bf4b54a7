import { ApiError, type PatientForm } from "./api.js";
import { el, clear } from "./dom.js";

export const ACTIVITIES = ["very_active", "moderate", "little"];
export const COMORBIDITIES = [
  "anorexia", "surgery", "gout", "heart_disease",
  "gallbladder", "liver", "hypertension", "typhoid",
];

export interface IntakeCallbacks {
  submit: (form: PatientForm) => Promise<void>;
}

// Client-side mirror of the service's patient rules, so obvious mistakes
// never leave the page. The server remains the authority.
export function validateForm(form: PatientForm): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!form.name.trim()) {
    errors.name = "name is required";
  }
  if (form.gender !== "male" && form.gender !== "female") {
    errors.gender = "choose a gender";
  }
  if (!Number.isInteger(form.age) || form.age < 1 || form.age > 130) {
    errors.age = "age must be a whole number from 1 to 130";
  }
  if (!(form.weight > 0) || form.weight > 500) {
    errors.weight = "weight must be above 0 and at most 500 kg";
  }
  if (!(form.height > 0.3) || form.height > 2.5) {
    errors.height = "height must be above 0.3 and at most 2.5 meters";
  }
  if (!ACTIVITIES.includes(form.activity)) {
    errors.activity = "choose an activity level";
  }
  if (form.bgl !== null && !(form.bgl >= 0)) {
    errors.bgl = "blood glucose must be 0 or higher";
  }
  return errors;
}

export function applyFieldErrors(
  form: HTMLFormElement,
  errors: Record<string, string>,
): void {
  for (const box of form.querySelectorAll(".field-error")) {
    box.textContent = "";
  }
  for (const [field, message] of Object.entries(errors)) {
    const box = form.querySelector(`.field-error[data-field="${field}"]`);
    if (box) {
      box.textContent = message;
    }
  }
}

function labelled(field: string, label: string, input: HTMLElement): HTMLElement {
  return el("div", { class: "field" }, [
    el("label", { for: `intake-${field}` }, [label]),
    input,
    el("div", { class: "field-error", "data-field": field }),
  ]);
}

export function renderIntake(root: HTMLElement, callbacks: IntakeCallbacks): void {
  clear(root);
  const form = el("form", { id: "intake-form", novalidate: "novalidate" });

  const text = (field: string, type = "text", step?: string) => {
    const attrs: Record<string, string> = {
      id: `intake-${field}`, name: field, type,
    };
    if (step) {
      attrs.step = step;
    }
    return el("input", attrs);
  };

  const gender = el("select", { id: "intake-gender", name: "gender" }, [
    el("option", { value: "" }, ["choose..."]),
    el("option", { value: "female" }, ["female"]),
    el("option", { value: "male" }, ["male"]),
  ]);
  const activity = el("select", { id: "intake-activity", name: "activity" }, [
    el("option", { value: "" }, ["choose..."]),
    ...ACTIVITIES.map((a) => el("option", { value: a }, [a.replace("_", " ")])),
  ]);

  form.append(
    el("h2", {}, ["Patient"]),
    labelled("name", "Name", text("name")),
    labelled("gender", "Gender", gender),
    labelled("age", "Age (years)", text("age", "number")),
    labelled("weight", "Weight (kg)", text("weight", "number", "0.1")),
    labelled("height", "Height (m)", text("height", "number", "0.01")),
    labelled("activity", "Activity", activity),
    labelled("bgl", "Blood glucose (mg/dL, optional)", text("bgl", "number")),
  );

  const conditions = el("fieldset", { class: "comorbidities" }, [
    el("legend", {}, ["Additional conditions"]),
  ]);
  for (const condition of COMORBIDITIES) {
    const box = el("input", {
      type: "checkbox", id: `intake-${condition}`, name: "comorbidities",
      value: condition,
    });
    conditions.append(el("label", { class: "condition" },
      [box, " " + condition.replace("_", " ")]));
  }
  form.append(conditions);

  const submitError = el("div", { class: "field-error", "data-field": "_form" });
  const submit = el("button", { type: "submit", id: "intake-submit" }, ["Continue"]);
  form.append(submitError, submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void handleSubmit();
  });

  async function handleSubmit(): Promise<void> {
    const value = (field: string) =>
      (form.querySelector(`[name="${field}"]`) as HTMLInputElement).value.trim();
    const numeric = (field: string) => {
      const raw = value(field);
      return raw === "" ? NaN : Number(raw);
    };
    const bglRaw = value("bgl");
    const body: PatientForm = {
      name: value("name"),
      gender: value("gender"),
      age: numeric("age"),
      weight: numeric("weight"),
      height: numeric("height"),
      activity: value("activity"),
      bgl: bglRaw === "" ? null : Number(bglRaw),
      comorbidities: Array.from(
        form.querySelectorAll<HTMLInputElement>('input[name="comorbidities"]:checked'),
      ).map((box) => box.value),
      preferred_items: [],
    };

    const errors = validateForm(body);
    applyFieldErrors(form, errors);
    if (Object.keys(errors).length > 0) {
      return; // nothing leaves the page until the form is coherent
    }

    submit.setAttribute("disabled", "disabled");
    try {
      await callbacks.submit(body);
    } catch (error) {
      if (error instanceof ApiError && error.fields.length > 0) {
        const mapped: Record<string, string> = {};
        for (const fieldError of error.fields) {
          mapped[fieldError.field] = fieldError.message;
        }
        applyFieldErrors(form, mapped);
      } else {
        applyFieldErrors(form, { _form: String(error) });
      }
    } finally {
      submit.removeAttribute("disabled");
    }
  }

  root.append(form);
}
