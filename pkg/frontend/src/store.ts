// Estimate state machine. Two rules keep the display trustworthy:
//
// 1. single source of truth: every displayed number comes from an API
//    response, verbatim;
// 2. monotone request counter: a response renders only while it is newer
//    than anything already rendered, so rapid edits can never leave a
//    stale estimate on screen.
//
// The surface slider schedules debounced submissions (default 150 ms) so
// dragging feels live without flooding the API.

import { ApiClient } from "./api.js";
import { EstimateView, HouseholdFields } from "./types.js";
import { FormState, toRecord, validateForm } from "./validate.js";

export type EstimateStatus = "idle" | "loading" | "ready" | "error";

export interface StoreState {
  form: FormState;
  status: EstimateStatus;
  estimate: EstimateView | null;
  error: string | null;
}

type Listener = (state: StoreState) => void;
type TimerHandle = ReturnType<typeof setTimeout>;

export const DEFAULT_DEBOUNCE_MS = 150;

export class EstimateStore {
  private state: StoreState;
  private listeners: Listener[] = [];
  private lastIssued = 0;
  private lastApplied = 0;
  private pendingTimer: TimerHandle | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly debounceMs: number = DEFAULT_DEBOUNCE_MS,
  ) {
    this.state = {
      form: validateForm({}),
      status: "idle",
      estimate: null,
      error: null,
    };
  }

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private setState(partial: Partial<StoreState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Update form fields; no request is sent until submit. */
  setFields(values: Partial<HouseholdFields>): FormState {
    const form = validateForm({ ...this.state.form.values, ...values });
    this.setState({ form });
    return form;
  }

  /** Submit immediately. Invalid forms never produce a request. */
  async submit(): Promise<void> {
    if (this.pendingTimer !== null) {
      clearTimeout(this.pendingTimer);
      this.pendingTimer = null;
    }
    const form = this.state.form;
    if (!form.valid) {
      return;
    }
    const record = toRecord(form);
    const requestId = ++this.lastIssued;
    this.setState({ status: "loading" });
    try {
      const result = await this.api.estimate(record);
      if (requestId <= this.lastApplied) {
        return; // superseded while in flight
      }
      this.lastApplied = requestId;
      this.setState({
        status: "ready",
        error: null,
        estimate: {
          car_kwh: result.predict.car_kwh,
          monthly_installment_eur: result.predict.monthly_installment_eur,
          trace: result.trace,
          requestId,
        },
      });
    } catch (err) {
      if (requestId <= this.lastApplied) {
        return;
      }
      this.lastApplied = requestId;
      this.setState({ status: "error", error: String(err) });
    }
  }

  /** Debounced submit for slider-style rapid edits. */
  scheduleSubmit(): void {
    if (this.pendingTimer !== null) {
      clearTimeout(this.pendingTimer);
    }
    this.pendingTimer = setTimeout(() => {
      this.pendingTimer = null;
      void this.submit();
    }, this.debounceMs);
  }

  /** Convenience for the surface slider: set + debounce in one step. */
  setSurface(surface: number): void {
    this.setFields({ surface_m2: surface });
    this.scheduleSubmit();
  }
}
