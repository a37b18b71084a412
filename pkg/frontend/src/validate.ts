// Field validation mirroring the API's closed sets. Submit is only enabled
// when every field validates, so the server should never see a 422 from us.

import {
  COOKING_TYPES,
  HEATING_TYPES,
  HOUSE_TYPES,
  HouseholdFields,
  MAX_POWER_KVA,
  SURFACE_MAX,
  SURFACE_MIN,
  TARIFF_INDEXES,
  WATER_HEATING_TYPES,
} from "./types.js";

export interface FormState {
  values: Partial<HouseholdFields>;
  errors: Partial<Record<keyof HouseholdFields, string>>;
  valid: boolean;
}

const CATEGORY_SETS: Record<string, readonly string[]> = {
  heating_type: HEATING_TYPES,
  water_heating_type: WATER_HEATING_TYPES,
  cooking_type: COOKING_TYPES,
  house_type: HOUSE_TYPES,
  tariff_index: TARIFF_INDEXES,
};

export function validateForm(values: Partial<HouseholdFields>): FormState {
  const errors: FormState["errors"] = {};

  const surface = values.surface_m2;
  if (surface === undefined || !Number.isFinite(surface)) {
    errors.surface_m2 = "surface is required";
  } else if (surface < SURFACE_MIN || surface > SURFACE_MAX) {
    errors.surface_m2 = `surface must be between ${SURFACE_MIN} and ${SURFACE_MAX} m²`;
  }

  const occupants = values.occupants;
  if (occupants === undefined || !Number.isInteger(occupants)) {
    errors.occupants = "occupants is required";
  } else if (occupants < 1) {
    errors.occupants = "occupants must be at least 1";
  }

  const maxPower = values.max_power_kva;
  if (maxPower === undefined || !(MAX_POWER_KVA as readonly number[]).includes(maxPower)) {
    errors.max_power_kva = `meter capacity must be one of ${MAX_POWER_KVA.join(", ")} kVA`;
  }

  for (const [field, allowed] of Object.entries(CATEGORY_SETS)) {
    const value = values[field as keyof HouseholdFields];
    if (typeof value !== "string" || !allowed.includes(value)) {
      errors[field as keyof HouseholdFields] = `choose one of ${allowed.join(", ")}`;
    }
  }

  return { values, errors, valid: Object.keys(errors).length === 0 };
}

/** Narrow a validated form to the API payload. Throws if called on an invalid form. */
export function toRecord(state: FormState): HouseholdFields {
  if (!state.valid) {
    throw new Error("cannot build a record from an invalid form");
  }
  return state.values as HouseholdFields;
}
