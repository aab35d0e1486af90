/** DOM rendering. Render functions are pure (state in, HTML out) so the
 * interesting logic stays in the store; this file only wires events. */

import { ConsoleApi } from "./api.js";
import { ConsoleStore, ConsoleState } from "./store.js";
import { fieldErrors, validateConfig } from "./validation.js";
import type { AlertView, DeviceConfig, DeviceView } from "./types.js";

const STATE_BADGES: Record<string, string> = {
  pending: "badge-pending",
  verifying: "badge-verifying",
  confirmed: "badge-confirmed",
  rejected: "badge-rejected",
  notified: "badge-notified",
  dismissed: "badge-dismissed",
};

export function renderAlertRow(alert: AlertView, clipUrl: string): string {
  const score =
    alert.verifier_score === null ? "&mdash;" : alert.verifier_score.toFixed(3);
  const terminal = ["rejected", "notified", "dismissed"].includes(alert.state);
  return `
    <tr data-alert="${alert.alert_id}">
      <td class="mono">${alert.alert_id}</td>
      <td>${alert.device_id}</td>
      <td><span class="badge ${STATE_BADGES[alert.state] ?? ""}">${alert.state}</span></td>
      <td>${alert.trigger_class} @ ${alert.trigger_seq}</td>
      <td>${score}</td>
      <td><button class="view-clip" data-clip="${clipUrl}">clip</button></td>
      <td><button class="dismiss" data-alert="${alert.alert_id}"
            ${terminal ? "disabled" : ""}>dismiss</button></td>
    </tr>`;
}

export function renderDeviceRow(device: DeviceView): string {
  const config = device.config;
  const queued = device.queued_config
    ? `<span class="badge badge-queued">update queued</span>`
    : "";
  return `
    <tr data-device="${device.device_id}">
      <td class="mono">${device.device_id}</td>
      <td>${device.online ? "●" : "○"} ${device.online ? "online" : "offline"}</td>
      <td>v${device.config_version} ${queued}</td>
      <td>
        <form class="config-form" data-device="${device.device_id}">
          ${numField("alpha", config.alpha)} ${numField("beta", config.beta)}
          ${numField("k", config.k)} ${numField("n", config.n)}
          ${numField("threshold_gun", config.thresholds.gun)}
          ${numField("threshold_knife", config.thresholds.knife)}
          ${numField("cooldown_ms", config.cooldown_ms)}
          ${numField("motion_ratio_min", config.motion_ratio_min)}
          <button type="submit">save</button>
          <span class="form-error" data-field="_form"></span>
        </form>
      </td>
    </tr>`;
}

function numField(name: string, value: number): string {
  return `<label class="field">${name}
    <input name="${name}" value="${value}" size="6">
    <span class="field-error" data-field="${name}"></span>
  </label>`;
}

export function configFromForm(form: HTMLFormElement): DeviceConfig {
  const read = (name: string) =>
    Number((form.elements.namedItem(name) as HTMLInputElement).value);
  return {
    alpha: read("alpha"),
    beta: read("beta"),
    k: read("k"),
    n: read("n"),
    thresholds: { gun: read("threshold_gun"), knife: read("threshold_knife") },
    cooldown_ms: read("cooldown_ms"),
    motion_ratio_min: read("motion_ratio_min"),
  };
}

export function showFieldErrors(form: HTMLFormElement, byField: Record<string, string>): void {
  form.querySelectorAll<HTMLElement>("[data-field]").forEach((el) => {
    el.textContent = byField[el.dataset.field ?? ""] ?? "";
  });
}

export class App {
  private store: ConsoleStore;
  private api: ConsoleApi;

  constructor(root: HTMLElement, base = "") {
    this.api = new ConsoleApi(base);
    this.store = new ConsoleStore(this.api);
    this.store.subscribe((state) => this.render(root, state));
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("submit", (event) => this.onSubmit(event));
  }

  async start(): Promise<void> {
    await this.store.start();
  }

  private render(root: HTMLElement, state: ConsoleState): void {
    const alerts = root.querySelector("#alert-rows");
    if (alerts) {
      alerts.innerHTML = state.alerts
        .map((a) => renderAlertRow(a, this.api.clipUrl(a.alert_id)))
        .join("");
    }
    const devices = root.querySelector("#device-rows");
    if (devices) {
      devices.innerHTML = state.devices.map(renderDeviceRow).join("");
    }
    const staleBanner = root.querySelector<HTMLElement>("#stale");
    if (staleBanner) {
      staleBanner.style.display = state.stale ? "block" : "none";
    }
    const toast = root.querySelector<HTMLElement>("#toast");
    if (toast) {
      toast.textContent = state.toast ?? "";
      toast.style.display = state.toast ? "block" : "none";
    }
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    if (target.matches("button.dismiss")) {
      void this.store.dismiss(target.dataset.alert!);
    } else if (target.matches("button.view-clip")) {
      const viewer = document.querySelector<HTMLImageElement>("#clip-viewer");
      if (viewer) {
        viewer.src = target.dataset.clip!;
        viewer.style.display = "block";
      }
    } else if (target.id === "toast") {
      this.store.clearToast();
    }
  }

  private onSubmit(event: Event): void {
    const form = event.target as HTMLFormElement;
    if (!form.matches("form.config-form")) {
      return;
    }
    event.preventDefault();
    const config = configFromForm(form);
    const clientErrors = fieldErrors(validateConfig(config));
    if (Object.keys(clientErrors).length > 0) {
      showFieldErrors(form, clientErrors);
      return;
    }
    void this.store
      .saveConfig(form.dataset.device!, config)
      .then(({ fieldErrors: serverErrors }) => showFieldErrors(form, serverErrors));
  }
}
