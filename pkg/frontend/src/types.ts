export type AlertState =
  | "pending"
  | "verifying"
  | "confirmed"
  | "rejected"
  | "notified"
  | "dismissed";

export interface AlertView {
  alert_id: string;
  device_id: string;
  state: AlertState;
  trigger_class: string;
  trigger_seq: number;
  created_at: number;
  verifier_score: number | null;
  clip_ref: string;
  history: [string, number, string][];
}

export interface DeviceConfig {
  alpha: number;
  beta: number;
  k: number;
  n: number;
  thresholds: { gun: number; knife: number };
  cooldown_ms: number;
  motion_ratio_min: number;
}

export interface DeviceView {
  device_id: string;
  config: DeviceConfig;
  config_version: number;
  fps: number;
  last_heartbeat: number;
  online: boolean;
  queued_config: DeviceConfig | null;
}

/** SSE payload for a newly received alert (the alert_received record). */
export interface AlertReceivedEvent {
  alert_id: string;
  device_id: string;
  trigger_class: string;
  trigger_seq: number;
  momentum: number | null;
  captured_at: number | null;
  clip_ref: string;
}

export interface AlertStateEvent {
  alert_id: string;
  from: AlertState;
  to: AlertState;
  actor: string;
  score?: number;
}
