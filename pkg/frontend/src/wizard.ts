import { ApiClient, type PatientForm } from "./api.js";
import { clear, el, errorBox } from "./dom.js";
import { renderGrid } from "./grid.js";
import { renderIntake } from "./intake.js";
import { renderPlan } from "./plan.js";
import { backToSelection, initialState, toPlan, toSelection,
         type ConsultationState } from "./state.js";

// The three-dialog consultation loop: intake, food selection, plan, with
// "edit selection" feeding back into the grid.
export class Wizard {
  readonly state: ConsultationState = initialState();

  constructor(private root: HTMLElement, private api: ApiClient) {}

  start(): void {
    this.render();
  }

  private render(): void {
    clear(this.root);
    const host = el("div", { class: `wizard step-${this.state.step}` });
    this.root.append(host);

    if (this.state.step === "intake") {
      renderIntake(host, {
        submit: async (form: PatientForm) => {
          const patientId = await this.api.createPatient(form);
          toSelection(this.state, patientId);
          this.render();
        },
      });
      return;
    }

    if (this.state.step === "selection") {
      void this.renderSelection(host);
      return;
    }

    renderPlan(host, this.state.lastPlan!, {
      editSelection: () => {
        backToSelection(this.state);
        this.render();
      },
      regenerate: async () => {
        await this.generate(Array.from(this.state.selectedIds));
      },
    });
  }

  private async renderSelection(host: HTMLElement): Promise<void> {
    try {
      const foods = await this.api.getFoods();
      renderGrid(host, foods, this.state.selectedIds, {
        save: async (itemIds) => {
          await this.api.setSelection(this.state.patientId!, itemIds);
        },
        generate: async (itemIds) => {
          await this.api.setSelection(this.state.patientId!, itemIds);
          await this.generate(itemIds);
        },
      });
    } catch (error) {
      host.append(errorBox(`could not load foods: ${String(error)}`));
    }
  }

  private async generate(_itemIds: number[]): Promise<void> {
    const plan = await this.api.generatePlan(this.state.patientId!);
    toPlan(this.state, plan);
    this.render();
  }
}

export function createWizard(root: HTMLElement, api: ApiClient): Wizard {
  const wizard = new Wizard(root, api);
  wizard.start();
  return wizard;
}
