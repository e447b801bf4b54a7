// Typed client for the dietks HTTP service. The UI never computes
// nutrition itself; every prescription and plan comes from these calls.

export interface Food {
  id: number;
  group: string;
  name_en: string;
  name_ar: string;
  serving_desc: string;
  kcal: number;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface PatientForm {
  name: string;
  gender: string;
  age: number;
  weight: number;
  height: number;
  activity: string;
  bgl: number | null;
  comorbidities: string[];
  preferred_items: number[];
}

export interface PlanEntry {
  item_id: number;
  name_en: string;
  name_ar: string;
  servings: number;
  kcal: number;
}

export interface PlanDocument {
  patient_id: string;
  target_kcal: number;
  total_kcal: number;
  warnings: string[];
  meals: Record<string, PlanEntry[]>;
}

export interface PlanResponse {
  prescription: {
    bmi: number;
    category: string;
    total_kcal: number;
    servings: Record<string, number>;
  };
  plan: PlanDocument;
  warnings: string[];
  trace: string[];
}

export class ApiError extends Error {
  status: number;
  fields: FieldError[];

  constructor(status: number, message: string, fields: FieldError[] = []) {
    super(message);
    this.status = status;
    this.fields = fields;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.error ?? response.statusText,
      Array.isArray(body.fields) ? body.fields : []);
  } catch {
    return new ApiError(response.status, response.statusText);
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json() as Promise<T>;
  }

  getFoods(): Promise<Food[]> {
    return this.request<Food[]>("/foods");
  }

  async createPatient(body: PatientForm): Promise<string> {
    const created = await this.request<{ id: string }>("/patients", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return created.id;
  }

  async setSelection(patientId: string, itemIds: number[]): Promise<void> {
    await this.request(`/patients/${patientId}/selection`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ item_ids: itemIds }),
    });
  }

  generatePlan(patientId: string): Promise<PlanResponse> {
    return this.request<PlanResponse>(`/patients/${patientId}/plan`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{}",
    });
  }
}
