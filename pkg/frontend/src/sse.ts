/** Server-sent events over fetch + ReadableStream.
 *
 * Works identically in browsers and node (no EventSource dependency),
 * reconnects with jittered exponential backoff, and tells the caller
 * when the stream goes stale so the UI can show it and resync on
 * recovery.
 */

export interface SseHandlers {
  onEvent: (name: string, data: any) => void;
  /** stream lost; UI should mark data as stale */
  onStale?: () => void;
  /** stream (re)established; UI should resync via REST */
  onConnected?: (wasReconnect: boolean) => void;
}

export interface SseOptions {
  baseDelayMs?: number;
  maxDelayMs?: number;
  fetchFn?: typeof fetch;
  /** injectable for deterministic tests */
  random?: () => number;
}

export class SseClient {
  private stopped = false;
  private attempt = 0;
  private everConnected = false;

  constructor(
    private url: string,
    private handlers: SseHandlers,
    private options: SseOptions = {},
  ) {}

  start(): void {
    void this.loop();
  }

  stop(): void {
    this.stopped = true;
  }

  private async loop(): Promise<void> {
    const fetchFn = this.options.fetchFn ?? fetch;
    while (!this.stopped) {
      try {
        const response = await fetchFn(this.url, {
          headers: { Accept: "text/event-stream" },
        });
        if (!response.ok || !response.body) {
          throw new Error(`events stream http ${response.status}`);
        }
        this.attempt = 0;
        this.handlers.onConnected?.(this.everConnected);
        this.everConnected = true;
        await this.consume(response.body);
        if (this.stopped) return;
        throw new Error("events stream ended");
      } catch {
        if (this.stopped) return;
        this.handlers.onStale?.();
        await sleep(this.nextDelay());
      }
    }
  }

  private nextDelay(): number {
    const base = this.options.baseDelayMs ?? 500;
    const cap = this.options.maxDelayMs ?? 10_000;
    const random = this.options.random ?? Math.random;
    const delay = Math.min(base * 2 ** this.attempt, cap);
    this.attempt += 1;
    return delay * (0.5 + random() * 0.5); // jitter to avoid thundering herds
  }

  private async consume(body: ReadableStream<Uint8Array>): Promise<void> {
    const reader = body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    let eventName = "message";
    let data = "";
    while (!this.stopped) {
      const { done, value } = await reader.read();
      if (done) return;
      buffer += decoder.decode(value, { stream: true });
      let newline: number;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).replace(/\r$/, "");
        buffer = buffer.slice(newline + 1);
        if (line === "") {
          if (data !== "") {
            try {
              this.handlers.onEvent(eventName, JSON.parse(data));
            } catch {
              // non-JSON data frame: ignore
            }
          }
          eventName = "message";
          data = "";
        } else if (line.startsWith("event: ")) {
          eventName = line.slice(7);
        } else if (line.startsWith("data: ")) {
          data += line.slice(6);
        } // comments (":" prefix) keep the connection alive; nothing to do
      }
    }
    reader.cancel().catch(() => undefined);
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
