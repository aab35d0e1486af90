/** Client-side mirror of the server's device-config validation.
 *
 * Same rules, same messages, so the form can flag problems before the
 * request and render server errors (the authority) on the same fields.
 */

import type { DeviceConfig } from "./types.js";

export function validateConfig(config: DeviceConfig): string[] {
  const errors: string[] = [];
  if (!(config.alpha > 0)) {
    errors.push("alpha must be > 0");
  }
  if (!(config.k > 0 && config.k < 1)) {
    errors.push("k out of (0,1)");
  }
  if (!Number.isInteger(config.n) || config.n < 0) {
    errors.push("n must be a non-negative integer");
  }
  for (const cls of ["gun", "knife"] as const) {
    const threshold = config.thresholds[cls];
    if (threshold === undefined) {
      errors.push(`missing threshold for ${cls}`);
    } else if (!(threshold > 0)) {
      errors.push(`threshold for ${cls} must be > 0`);
    }
  }
  if (config.cooldown_ms < 0) {
    errors.push("cooldown_ms must be >= 0");
  }
  if (!(config.motion_ratio_min >= 0 && config.motion_ratio_min <= 1)) {
    errors.push("motion_ratio_min out of [0,1]");
  }
  return errors;
}

const FIELD_PREFIXES: [string, string][] = [
  ["alpha", "alpha"],
  ["beta", "beta"],
  ["k ", "k"],
  ["n ", "n"],
  ["threshold for gun", "threshold_gun"],
  ["threshold for knife", "threshold_knife"],
  ["missing threshold for gun", "threshold_gun"],
  ["missing threshold for knife", "threshold_knife"],
  ["cooldown_ms", "cooldown_ms"],
  ["motion_ratio_min", "motion_ratio_min"],
];

/** Map validator messages (ours or the server's) onto form fields. */
export function fieldErrors(errors: string[]): Record<string, string> {
  const byField: Record<string, string> = {};
  for (const error of errors) {
    const match = FIELD_PREFIXES.find(([prefix]) => error.startsWith(prefix));
    byField[match ? match[1] : "_form"] = error;
  }
  return byField;
}
