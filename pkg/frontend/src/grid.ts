import type { Food } from "./api.js";
import { bilingual, clear, el, errorBox } from "./dom.js";

// Pyramid column order, mirroring the food-groups dialog.
export const GROUP_ORDER = [
  "starch", "vegetable", "fruit", "protein", "milk", "sugar", "fat",
];

const GROUP_LABELS: Record<string, [string, string]> = {
  starch: ["Starches", "النشويات"],
  vegetable: ["Vegetables", "الخضروات"],
  fruit: ["Fruits", "الفواكه"],
  protein: ["Protein", "بروتينيات"],
  milk: ["Milk", "الألبان"],
  sugar: ["Sugar", "السكريات"],
  fat: ["Fat", "الدهون"],
};

export interface GridCallbacks {
  save: (itemIds: number[]) => Promise<void>;
  generate: (itemIds: number[]) => Promise<void>;
}

export function renderGrid(
  root: HTMLElement,
  foods: Food[],
  selected: Set<number>,
  callbacks: GridCallbacks,
): void {
  clear(root);
  const container = el("div", { id: "food-grid" });
  container.append(el("h2", {}, ["Food groups"]));

  const columns = el("div", { class: "grid-columns" });
  for (const group of GROUP_ORDER) {
    const [en, ar] = GROUP_LABELS[group];
    const column = el("div", { class: "grid-column", "data-group": group });
    column.append(el("h3", {}, [bilingual(en, ar)]));
    for (const food of foods.filter((f) => f.group === group)) {
      const box = el("input", {
        type: "checkbox",
        id: `food-${food.id}`,
        value: String(food.id),
        "data-kcal": String(food.kcal),
      });
      if (selected.has(food.id)) {
        box.setAttribute("checked", "checked");
      }
      box.addEventListener("change", () => {
        if ((box as HTMLInputElement).checked) {
          selected.add(food.id);
        } else {
          selected.delete(food.id);
        }
      });
      column.append(el("label", { class: "food-item" }, [
        box, " ", bilingual(food.name_en, food.name_ar),
        el("span", { class: "food-id" }, [` (${food.id})`]),
      ]));
    }
    columns.append(column);
  }
  container.append(columns);

  const status = el("div", { class: "grid-status" });
  const save = el("button", { type: "button", id: "grid-save" }, ["Save"]);
  const generate = el("button", { type: "button", id: "grid-generate" },
    ["Generate plan"]);

  const run = async (action: (ids: number[]) => Promise<void>) => {
    clear(status);
    save.setAttribute("disabled", "disabled");
    generate.setAttribute("disabled", "disabled");
    try {
      await action(Array.from(selected).sort((a, b) => a - b));
    } catch (error) {
      status.append(errorBox(String(error)));
    } finally {
      save.removeAttribute("disabled");
      generate.removeAttribute("disabled");
    }
  };

  save.addEventListener("click", () => void run(callbacks.save));
  generate.addEventListener("click", () => void run(callbacks.generate));

  container.append(el("div", { class: "grid-actions" }, [save, " ", generate]),
    status);
  root.append(container);
}
