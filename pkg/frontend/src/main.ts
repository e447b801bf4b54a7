import { ApiClient } from "./api.js";
import { createWizard } from "./wizard.js";

declare global {
  interface Window {
    DIETKS_BASE_URL?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  const baseUrl = window.DIETKS_BASE_URL ?? "http://127.0.0.1:8080";
  createWizard(root, new ApiClient(baseUrl));
}
