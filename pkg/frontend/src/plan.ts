import type { PlanResponse } from "./api.js";
import { bilingual, clear, el, errorBox } from "./dom.js";

export const SLOT_ORDER = ["breakfast", "snack1", "lunch", "snack2", "dinner"];

const SLOT_LABELS: Record<string, string> = {
  breakfast: "Breakfast",
  snack1: "Morning snack",
  lunch: "Lunch",
  snack2: "Afternoon snack",
  dinner: "Dinner",
};

export interface PlanCallbacks {
  editSelection: () => void;
  regenerate: () => Promise<void>;
}

export function renderPlan(
  root: HTMLElement,
  response: PlanResponse,
  callbacks: PlanCallbacks,
): void {
  clear(root);
  const container = el("div", { id: "plan-view" });
  const { prescription, plan } = response;

  container.append(el("h2", {}, ["Daily meal plan"]));
  container.append(el("div", { class: "plan-header" }, [
    el("span", { id: "plan-bmi" }, [`BMI ${prescription.bmi.toFixed(1)}`]),
    " · ",
    el("span", { id: "plan-category" }, [prescription.category]),
    " · ",
    el("span", { id: "plan-totals" },
      [`${plan.total_kcal} of ${plan.target_kcal} kcal`]),
  ]));

  if (response.warnings.length > 0) {
    const banner = el("div", { id: "plan-warnings", class: "warning-banner",
                               role: "alert" });
    for (const warning of response.warnings) {
      banner.append(el("div", { class: "warning" }, [warning]));
    }
    container.append(banner);
  }

  for (const slot of SLOT_ORDER) {
    const section = el("section", { class: "meal-section", "data-slot": slot });
    section.append(el("h3", {}, [SLOT_LABELS[slot]]));
    const table = el("table", {}, [
      el("thead", {}, [el("tr", {}, [
        el("th", {}, ["Food"]),
        el("th", {}, ["Servings"]),
        el("th", {}, ["kcal"]),
      ])]),
    ]);
    const tbody = el("tbody");
    for (const entry of plan.meals[slot] ?? []) {
      tbody.append(el("tr", { class: "meal-row" }, [
        el("td", {}, [bilingual(entry.name_en, entry.name_ar)]),
        el("td", { class: "servings" }, [String(entry.servings)]),
        el("td", { class: "kcal" }, [String(entry.kcal)]),
      ]));
    }
    if (tbody.children.length === 0) {
      tbody.append(el("tr", { class: "meal-empty" },
        [el("td", { colspan: "3" }, ["—"])]));
    }
    table.append(tbody);
    section.append(table);
    container.append(section);
  }

  const edit = el("button", { type: "button", id: "plan-edit-selection" },
    ["Edit selection"]);
  edit.addEventListener("click", () => callbacks.editSelection());
  const status = el("div", { class: "plan-status" });
  const regenerate = el("button", { type: "button", id: "plan-regenerate" },
    ["Regenerate"]);
  regenerate.addEventListener("click", () => {
    clear(status);
    regenerate.setAttribute("disabled", "disabled");
    callbacks.regenerate()
      .catch((error) => status.append(errorBox(String(error))))
      .finally(() => regenerate.removeAttribute("disabled"));
  });

  container.append(el("div", { class: "plan-actions" }, [edit, " ", regenerate]),
    status);
  root.append(container);
}
