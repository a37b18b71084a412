// Scripted fetch doubles for driving the store without a server.

import { FetchLike } from "../src/api.js";
import { HouseholdFields, Trace } from "../src/types.js";

export const VALID_FORM: HouseholdFields = {
  surface_m2: 80,
  heating_type: "electric",
  water_heating_type: "electric",
  cooking_type: "gas",
  occupants: 2,
  house_type: "apartment",
  tariff_index: "base",
  max_power_kva: 6,
};

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface ScriptedBackend {
  fetchFn: FetchLike;
  requests: { path: string; record: HouseholdFields }[];
}

/**
 * Backend double whose numbers are a deterministic function of the record,
 * so tests can assert displayed values equal the response values exactly.
 */
export function scriptedBackend(
  car: (record: HouseholdFields) => number,
  trace?: (record: HouseholdFields, carValue: number) => Trace | "unavailable",
): ScriptedBackend {
  const requests: ScriptedBackend["requests"] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const record = JSON.parse(String(init?.body)) as HouseholdFields;
    const path = url.replace(/^.*\/v1/, "/v1");
    requests.push({ path, record });
    const carValue = car(record);
    if (path === "/v1/predict") {
      return jsonResponse(200, {
        car_kwh: carValue,
        monthly_installment_eur: Math.round((carValue * 0.2516) / 12 * 100) / 100,
      });
    }
    if (path === "/v1/explain") {
      const t = trace ? trace(record, carValue) : defaultTrace(record, carValue);
      if (t === "unavailable") {
        return jsonResponse(409, { error: "no traces for this model" });
      }
      return jsonResponse(200, { car_kwh: carValue, trace: t });
    }
    return jsonResponse(404, { error: `no such route ${path}` });
  };
  return { fetchFn, requests };
}

export function defaultTrace(record: HouseholdFields, carValue: number): Trace {
  const beta = 12.0;
  const alpha = carValue - beta * record.surface_m2;
  return {
    steps: [
      { level: 0, feature: "occupants", rule: "occupants <= 2.5", branch: "left" },
      { level: 1, feature: "heating_type", rule: "heating_type in {electric}", branch: "left" },
    ],
    leaf_id: "LL",
    alpha,
    beta,
    surface_m2: record.surface_m2,
    surface_term: beta * record.surface_m2,
    prediction: carValue,
  };
}

/** A fetch double whose responses resolve only when the test says so. */
export function deferredBackend(cars: number[]): {
  fetchFn: FetchLike;
  release: (index: number) => void;
} {
  const released = new Set<number>();
  const waiting = new Map<number, (() => void)[]>();
  let calls = 0;
  const fetchFn: FetchLike = (url, init) => {
    const record = JSON.parse(String(init?.body)) as HouseholdFields;
    const index = Math.floor(calls / 2); // predict + explain per submission
    calls += 1;
    const carValue = cars[index];
    const path = url.replace(/^.*\/v1/, "/v1");
    const body =
      path === "/v1/predict"
        ? { car_kwh: carValue, monthly_installment_eur: carValue / 100 }
        : { car_kwh: carValue, trace: defaultTrace(record, carValue) };
    return new Promise((resolve) => {
      const fire = () => resolve(jsonResponse(200, body));
      if (released.has(index)) {
        fire();
      } else {
        waiting.set(index, [...(waiting.get(index) ?? []), fire]);
      }
    });
  };
  const release = (index: number) => {
    released.add(index);
    for (const fire of waiting.get(index) ?? []) {
      fire();
    }
    waiting.delete(index);
  };
  return { fetchFn, release };
}
