// Shapes shared with the /v1 HTTP API. Field names mirror the CSV schema.

export const HEATING_TYPES = ["district", "electric", "fuel", "gas", "heat_pump", "other"] as const;
export const WATER_HEATING_TYPES = ["electric", "gas", "other", "thermodynamic"] as const;
export const COOKING_TYPES = ["electric", "gas", "mixed"] as const;
export const HOUSE_TYPES = ["apartment", "house"] as const;
export const TARIFF_INDEXES = ["base", "peak_offpeak"] as const;
export const MAX_POWER_KVA = [3, 6, 9, 12, 15, 18, 24, 30, 36] as const;

export const SURFACE_MIN = 10;
export const SURFACE_MAX = 300;

export interface HouseholdFields {
  surface_m2: number;
  heating_type: string;
  water_heating_type: string;
  cooking_type: string;
  occupants: number;
  house_type: string;
  tariff_index: string;
  max_power_kva: number;
}

export interface PredictResponse {
  car_kwh: number;
  monthly_installment_eur: number;
}

export interface TraceStep {
  level: number;
  feature: string;
  rule: string;
  branch: "left" | "right";
}

export interface Trace {
  steps: TraceStep[];
  leaf_id: string;
  alpha: number;
  beta: number;
  surface_m2: number;
  surface_term: number;
  prediction: number;
}

export interface ExplainResponse {
  car_kwh: number;
  trace: Trace;
}

/** What the panel renders: server numbers verbatim, never recomputed. */
export interface EstimateView {
  car_kwh: number;
  monthly_installment_eur: number;
  trace: Trace | "unavailable";
  requestId: number;
}
