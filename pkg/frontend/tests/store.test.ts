// The store's core promises: server values verbatim, no stale renders, a
// validation gate in front of the network.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, FetchLike } from "../src/api.js";
import { EstimateStore } from "../src/store.js";
import { HouseholdFields } from "../src/types.js";
import { VALID_FORM, deferredBackend, scriptedBackend } from "./helpers.js";

function makeStore(fetchFn: FetchLike, debounceMs = 0) {
  return new EstimateStore(new ApiClient("http://api.test", fetchFn), debounceMs);
}

afterEach(() => {
  vi.useRealTimers();
});

describe("displayed values equal API responses exactly", () => {
  it("matches on 20 scripted form states", async () => {
    const car = (r: HouseholdFields) =>
      123.456 + 13.37 * r.surface_m2 + 250.25 * r.occupants + (r.heating_type === "electric" ? 777.7 : 0);
    const backend = scriptedBackend(car);
    const store = makeStore(backend.fetchFn);

    const heatings = ["electric", "gas", "fuel", "heat_pump", "district"];
    for (let i = 0; i < 20; i++) {
      const values: HouseholdFields = {
        ...VALID_FORM,
        surface_m2: 15 + 14 * i,
        occupants: 1 + (i % 5),
        heating_type: heatings[i % heatings.length],
      };
      store.setFields(values);
      await store.submit();
      const state = store.getState();
      expect(state.status).toBe("ready");
      // exact equality with what the backend computed, no rounding drift
      const expected = car(values);
      expect(state.estimate!.car_kwh).toBe(expected);
      expect(state.estimate!.monthly_installment_eur).toBe(
        Math.round((expected * 0.2516) / 12 * 100) / 100,
      );
      expect(state.estimate!.trace).not.toBe("unavailable");
    }
    // one predict + one explain per submission, nothing more
    expect(backend.requests.length).toBe(40);
  });

  it("keeps the trace verbatim including the leaf identity", async () => {
    const backend = scriptedBackend(() => 4321.5);
    const store = makeStore(backend.fetchFn);
    store.setFields(VALID_FORM);
    await store.submit();
    const trace = store.getState().estimate!.trace;
    expect(trace).not.toBe("unavailable");
    if (trace !== "unavailable") {
      expect(trace.prediction).toBe(4321.5);
      expect(trace.leaf_id).toBe("LL");
      expect(trace.alpha + trace.beta * trace.surface_m2).toBeCloseTo(4321.5, 9);
    }
  });
});

describe("stale responses never render", () => {
  it("ignores an older response resolving after a newer one", async () => {
    const backend = deferredBackend([1111, 2222]);
    const store = makeStore(backend.fetchFn);
    store.setFields({ ...VALID_FORM, surface_m2: 50 });
    const first = store.submit();
    store.setFields({ ...VALID_FORM, surface_m2: 60 });
    const second = store.submit();

    backend.release(1); // newer request finishes first
    await second;
    expect(store.getState().estimate!.car_kwh).toBe(2222);

    backend.release(0); // older finishes afterwards
    await first;
    expect(store.getState().estimate!.car_kwh).toBe(2222);
    expect(store.getState().status).toBe("ready");
  });

  it("applies responses in order when they arrive in order", async () => {
    const backend = deferredBackend([10, 20]);
    const store = makeStore(backend.fetchFn);
    store.setFields(VALID_FORM);
    const first = store.submit();
    store.setFields({ ...VALID_FORM, occupants: 3 });
    const second = store.submit();
    backend.release(0);
    await first;
    expect(store.getState().estimate!.car_kwh).toBe(10);
    backend.release(1);
    await second;
    expect(store.getState().estimate!.car_kwh).toBe(20);
  });
});

describe("validation gate", () => {
  it("sends nothing for invalid occupants", async () => {
    const backend = scriptedBackend(() => 1);
    const store = makeStore(backend.fetchFn);
    const form = store.setFields({ ...VALID_FORM, occupants: 0 });
    expect(form.valid).toBe(false);
    expect(form.errors.occupants).toBeTruthy();
    await store.submit();
    expect(backend.requests.length).toBe(0);
    expect(store.getState().status).toBe("idle");
  });

  it("sends nothing while fields are missing", async () => {
    const backend = scriptedBackend(() => 1);
    const store = makeStore(backend.fetchFn);
    store.setFields({ surface_m2: 100 });
    await store.submit();
    expect(backend.requests.length).toBe(0);
  });
});

describe("debounced slider edits", () => {
  it("collapses rapid surface changes into one request", async () => {
    vi.useFakeTimers();
    const backend = scriptedBackend((r) => 100 + r.surface_m2);
    const store = new EstimateStore(new ApiClient("http://api.test", backend.fetchFn), 150);
    store.setFields(VALID_FORM);
    store.setSurface(81);
    store.setSurface(82);
    store.setSurface(83);
    await vi.advanceTimersByTimeAsync(149);
    expect(backend.requests.length).toBe(0);
    await vi.advanceTimersByTimeAsync(2);
    await vi.runAllTimersAsync();
    expect(backend.requests.length).toBe(2); // one predict + one explain
    expect(store.getState().estimate!.car_kwh).toBe(183);
  });
});

describe("error handling", () => {
  it("flags API failures and offers retry state", async () => {
    const store = makeStore(async () =>
      new Response(JSON.stringify({ error: "boom" }), { status: 500 }),
    );
    store.setFields(VALID_FORM);
    await store.submit();
    const state = store.getState();
    expect(state.status).toBe("error");
    expect(state.error).toContain("boom");
  });

  it("renders unavailable explanations without losing the estimate", async () => {
    const backend = scriptedBackend(() => 999.25, () => "unavailable");
    const store = makeStore(backend.fetchFn);
    store.setFields(VALID_FORM);
    await store.submit();
    const state = store.getState();
    expect(state.status).toBe("ready");
    expect(state.estimate!.car_kwh).toBe(999.25);
    expect(state.estimate!.trace).toBe("unavailable");
  });
});
