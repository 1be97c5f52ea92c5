import { ApiClient } from "./api.js";
import { ApiError, HistoryEntry, SessionView } from "./types.js";

/** One table row plus the API-reported cumulative sum at that point. */
export interface Row {
  setting: string;
  value: number;
  stderr: number | null;
  sum: number;
}

/** Everything the page needs to draw; all numbers came from the server. */
export interface RenderModel {
  phase: "setup" | "session";
  sessionId: string | null;
  nQubits: number | null;
  threshold: number | null;
  status: "running" | "entangled" | "exhausted" | null;
  rows: Row[];
  sum: number;
  /** progress toward the detection threshold of 1, clamped for the bar */
  progress: number;
  nextSetting: string | null;
  banner: string | null;
  whatif: { sum: number; status: string; wouldDetect: boolean } | null;
  whatifEnabled: boolean;
  error: string | null;
}

export function validateQubitCount(n: number): string | null {
  if (!Number.isInteger(n) || n < 2 || n > 8) {
    return "qubit count must be an integer between 2 and 8";
  }
  return null;
}

export function validateCorrelation(value: number): string | null {
  if (!Number.isFinite(value) || Math.abs(value) > 1) {
    return "correlation values lie between -1 and 1";
  }
  return null;
}

function propagatedError(history: HistoryEntry[]): number | null {
  const terms = history.filter((h) => h.stderr !== null && h.stderr !== undefined);
  if (terms.length === 0) {
    return null;
  }
  // d(sum)/d(value) = 2 value, uncorrelated settings
  const variance = terms.reduce((acc, h) => acc + (2 * h.value * (h.stderr as number)) ** 2, 0);
  return Math.sqrt(variance);
}

export function bannerText(view: SessionView): string | null {
  if (view.status === "running") {
    return null;
  }
  const label = view.status === "entangled" ? "ENTANGLED" : "UNDETERMINED";
  const err = propagatedError(view.history);
  const suffix = err === null ? "" : ` ± ${err.toFixed(3)}`;
  return `${label}, sum ${view.sum.toFixed(3)}${suffix}`;
}

/**
 * Single-session wizard state.  Every mutation waits for the server reply
 * and re-renders from it; nothing is computed optimistically.
 */
export class SessionModel {
  private view: SessionView | null = null;
  private whatifResult: RenderModel["whatif"] = null;
  private error: string | null = null;

  constructor(private client: ApiClient) {}

  async create(nQubits: number, threshold?: number, mode = "manual"): Promise<RenderModel> {
    const problem = validateQubitCount(nQubits);
    if (problem) {
      this.error = problem;
      return this.render();
    }
    this.error = null;
    try {
      const created = await this.client.createSession(nQubits, threshold, mode);
      this.view = await this.client.getSession(created.id);
    } catch (exc) {
      this.error = exc instanceof ApiError ? exc.message : String(exc);
    }
    return this.render();
  }

  async recordValue(value: number, stderr?: number): Promise<RenderModel> {
    if (!this.view || this.view.next_setting === null) {
      this.error = "no running session";
      return this.render();
    }
    const problem = validateCorrelation(value);
    if (problem) {
      this.error = problem;
      return this.render();
    }
    this.error = null;
    this.whatifResult = null;
    try {
      await this.client.record(this.view.id, this.view.next_setting, value, stderr);
      this.view = await this.client.getSession(this.view.id);
    } catch (exc) {
      this.error = exc instanceof ApiError ? exc.message : String(exc);
    }
    return this.render();
  }

  async exploreWhatif(value: number): Promise<RenderModel> {
    if (!this.view || this.view.status !== "running" || this.view.next_setting === null) {
      return this.render();
    }
    const problem = validateCorrelation(value);
    if (problem) {
      this.error = problem;
      return this.render();
    }
    this.error = null;
    try {
      const result = await this.client.whatif(this.view.id, this.view.next_setting, value);
      this.whatifResult = {
        sum: result.sum,
        status: result.status,
        wouldDetect: result.status === "entangled",
      };
    } catch (exc) {
      this.error = exc instanceof ApiError ? exc.message : String(exc);
    }
    return this.render();
  }

  async refresh(): Promise<RenderModel> {
    if (this.view) {
      this.view = await this.client.getSession(this.view.id);
    }
    return this.render();
  }

  render(): RenderModel {
    const view = this.view;
    if (!view) {
      return {
        phase: "setup",
        sessionId: null,
        nQubits: null,
        threshold: null,
        status: null,
        rows: [],
        sum: 0,
        progress: 0,
        nextSetting: null,
        banner: null,
        whatif: null,
        whatifEnabled: false,
        error: this.error,
      };
    }
    return {
      phase: "session",
      sessionId: view.id,
      nQubits: view.n_qubits,
      threshold: view.threshold,
      status: view.status,
      rows: view.history.map((h) => ({ ...h })),
      sum: view.sum,
      progress: Math.min(view.sum, 1),
      nextSetting: view.next_setting,
      banner: bannerText(view),
      whatif: this.whatifResult,
      whatifEnabled: view.status === "running" && view.next_setting !== null,
      error: this.error,
    };
  }
}
