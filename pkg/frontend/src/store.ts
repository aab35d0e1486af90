/** Console state: alerts and devices mirrored from the server.
 *
 * The store never invents a state transition. New alert rows come from
 * the server's own SSE records, updates from alert_state events or from
 * REST responses, and every mutating action is exactly one API call
 * whose response (not the optimistic guess) lands in the store.
 */

import { ApiError, ConsoleApi } from "./api.js";
import { SseClient } from "./sse.js";
import { fieldErrors } from "./validation.js";
import type {
  AlertReceivedEvent,
  AlertStateEvent,
  AlertView,
  DeviceConfig,
  DeviceView,
} from "./types.js";

export interface ConsoleState {
  alerts: AlertView[]; // newest first
  devices: DeviceView[];
  stale: boolean;
  toast: string | null;
}

type Listener = (state: ConsoleState) => void;

export class ConsoleStore {
  private alerts = new Map<string, AlertView>();
  private devices = new Map<string, DeviceView>();
  private stale = false;
  private toast: string | null = null;
  private listeners: Listener[] = [];
  private sse: SseClient | null = null;

  constructor(private api: ConsoleApi) {}

  // -- wiring ------------------------------------------------------------

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.snapshot());
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  snapshot(): ConsoleState {
    const alerts = [...this.alerts.values()].sort(
      (a, b) => b.created_at - a.created_at || (a.alert_id < b.alert_id ? 1 : -1),
    );
    return {
      alerts,
      devices: [...this.devices.values()],
      stale: this.stale,
      toast: this.toast,
    };
  }

  private publish(): void {
    const state = this.snapshot();
    for (const listener of this.listeners) {
      listener(state);
    }
  }

  async start(sseOptions = {}): Promise<void> {
    await this.resync();
    this.sse = new SseClient(
      this.api.eventsUrl(),
      {
        onEvent: (name, data) => this.applyEvent(name, data),
        onStale: () => {
          this.stale = true;
          this.publish();
        },
        onConnected: (wasReconnect) => {
          this.stale = false;
          if (wasReconnect) {
            void this.resync();
          }
          this.publish();
        },
      },
      sseOptions,
    );
    this.sse.start();
  }

  stop(): void {
    this.sse?.stop();
  }

  async resync(): Promise<void> {
    const [alerts, devices] = await Promise.all([
      this.api.listAlerts(),
      this.api.listDevices(),
    ]);
    this.alerts = new Map(alerts.map((a) => [a.alert_id, a]));
    this.devices = new Map(devices.map((d) => [d.device_id, d]));
    this.publish();
  }

  // -- SSE ---------------------------------------------------------------

  applyEvent(name: string, data: any): void {
    if (name === "alert") {
      const event = data as AlertReceivedEvent;
      if (!this.alerts.has(event.alert_id)) {
        this.alerts.set(event.alert_id, {
          alert_id: event.alert_id,
          device_id: event.device_id,
          state: "pending",
          trigger_class: event.trigger_class,
          trigger_seq: event.trigger_seq,
          created_at: event.captured_at ?? 0,
          verifier_score: null,
          clip_ref: event.clip_ref,
          history: [],
        });
      }
    } else if (name === "alert_state") {
      const event = data as AlertStateEvent;
      const alert = this.alerts.get(event.alert_id);
      if (alert) {
        alert.state = event.to;
        if (event.score !== undefined) {
          alert.verifier_score = event.score;
        }
      }
    } else if (name === "device") {
      // fleet shape changed; cheap full refresh keeps us honest
      void this.api.listDevices().then((devices) => {
        this.devices = new Map(devices.map((d) => [d.device_id, d]));
        this.publish();
      });
      return;
    }
    this.publish();
  }

  // -- operator actions ----------------------------------------------------

  async dismiss(alertId: string): Promise<void> {
    try {
      const updated = await this.api.dismissAlert(alertId);
      this.alerts.set(updated.alert_id, updated);
      this.publish();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast = `alert is already settled: ${error.message}`;
        this.publish();
        await this.resync();
        return;
      }
      throw error;
    }
  }

  /** Returns per-field errors ({} on success); server answer wins. */
  async saveConfig(
    deviceId: string,
    config: DeviceConfig,
  ): Promise<{ fieldErrors: Record<string, string>; queued: boolean }> {
    try {
      const result = await this.api.patchConfig(deviceId, config);
      const devices = await this.api.listDevices();
      this.devices = new Map(devices.map((d) => [d.device_id, d]));
      if (result.queued) {
        this.toast = `config for ${deviceId} queued until it reconnects`;
      }
      this.publish();
      return { fieldErrors: {}, queued: result.queued };
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        return { fieldErrors: fieldErrors(error.fieldErrors), queued: false };
      }
      throw error;
    }
  }

  clearToast(): void {
    this.toast = null;
    this.publish();
  }
}
