/** REST client for the console API. Pure client: every call maps to one
 * documented endpoint and nothing here mutates state locally. */

import type { AlertView, DeviceConfig, DeviceView } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public fieldErrors: string[] = [],
  ) {
    super(message);
  }
}

async function asJson(response: Response): Promise<any> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const errors: string[] = Array.isArray(body.errors) ? body.errors : [];
    throw new ApiError(response.status, body.error ?? `http ${response.status}`, errors);
  }
  return body;
}

export class ConsoleApi {
  constructor(
    private base: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  async listAlerts(state?: string): Promise<AlertView[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : "";
    const body = await asJson(await this.fetchFn(`${this.base}/alerts${query}`));
    return body.alerts;
  }

  async getAlert(alertId: string): Promise<AlertView> {
    return asJson(await this.fetchFn(`${this.base}/alerts/${alertId}`));
  }

  clipUrl(alertId: string): string {
    return `${this.base}/alerts/${alertId}/clip`;
  }

  async dismissAlert(alertId: string): Promise<AlertView> {
    return asJson(
      await this.fetchFn(`${this.base}/alerts/${alertId}/dismiss`, { method: "POST" }),
    );
  }

  async listDevices(): Promise<DeviceView[]> {
    const body = await asJson(await this.fetchFn(`${this.base}/devices`));
    return body.devices;
  }

  async patchConfig(
    deviceId: string,
    config: DeviceConfig,
  ): Promise<{ ok: boolean; version: number; queued: boolean }> {
    return asJson(
      await this.fetchFn(`${this.base}/devices/${deviceId}/config`, {
        method: "PATCH",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
      }),
    );
  }

  eventsUrl(): string {
    return `${this.base}/events`;
  }
}
