// Browser wiring: build the form, subscribe the panel to the store.

import { ApiClient } from "./api.js";
import { formatEur, formatKwh } from "./format.js";
import { traceCards } from "./render.js";
import { EstimateStore } from "./store.js";
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

const API_BASE = (window as { HEARTHCAST_API_BASE?: string }).HEARTHCAST_API_BASE ?? "";

const store = new EstimateStore(new ApiClient(API_BASE));

const CATEGORY_FIELDS: [keyof HouseholdFields, readonly (string | number)[]][] = [
  ["heating_type", HEATING_TYPES],
  ["water_heating_type", WATER_HEATING_TYPES],
  ["cooking_type", COOKING_TYPES],
  ["house_type", HOUSE_TYPES],
  ["tariff_index", TARIFF_INDEXES],
  ["max_power_kva", MAX_POWER_KVA],
];

function buildForm(root: HTMLElement): void {
  for (const [field, options] of CATEGORY_FIELDS) {
    const label = document.createElement("label");
    label.textContent = field.replace(/_/g, " ") + " ";
    const select = document.createElement("select");
    select.id = field;
    const empty = document.createElement("option");
    empty.value = "";
    empty.textContent = "choose…";
    select.appendChild(empty);
    for (const option of options) {
      const el = document.createElement("option");
      el.value = String(option);
      el.textContent = String(option);
      select.appendChild(el);
    }
    select.addEventListener("change", () => {
      const raw = select.value;
      store.setFields({
        [field]: field === "max_power_kva" ? Number(raw) : raw,
      } as Partial<HouseholdFields>);
      refreshSubmit();
    });
    label.appendChild(select);
    root.appendChild(label);
  }

  const occupants = document.createElement("input");
  occupants.type = "number";
  occupants.id = "occupants";
  occupants.min = "1";
  occupants.addEventListener("input", () => {
    store.setFields({ occupants: Number(occupants.value) });
    refreshSubmit();
  });
  const occLabel = document.createElement("label");
  occLabel.textContent = "occupants ";
  occLabel.appendChild(occupants);
  root.appendChild(occLabel);

  const slider = document.createElement("input");
  slider.type = "range";
  slider.id = "surface_m2";
  slider.min = String(SURFACE_MIN);
  slider.max = String(SURFACE_MAX);
  slider.value = "80";
  const sliderValue = document.createElement("span");
  sliderValue.textContent = "80 m²";
  slider.addEventListener("input", () => {
    sliderValue.textContent = `${slider.value} m²`;
    store.setSurface(Number(slider.value));
    refreshSubmit();
  });
  const sliderLabel = document.createElement("label");
  sliderLabel.textContent = "surface ";
  sliderLabel.appendChild(slider);
  sliderLabel.appendChild(sliderValue);
  root.appendChild(sliderLabel);
  store.setFields({ surface_m2: 80 });

  const submit = document.createElement("button");
  submit.id = "submit";
  submit.textContent = "estimate";
  submit.addEventListener("click", () => void store.submit());
  root.appendChild(submit);

  function refreshSubmit(): void {
    submit.disabled = !store.getState().form.valid;
  }
  refreshSubmit();
}

function renderPanel(panel: HTMLElement): void {
  const state = store.getState();
  panel.replaceChildren();
  if (state.status === "error") {
    const err = document.createElement("p");
    err.className = "error";
    err.textContent = `request failed: ${state.error}. Adjust and retry.`;
    panel.appendChild(err);
    return;
  }
  if (state.estimate === null) {
    const hint = document.createElement("p");
    hint.textContent =
      state.status === "loading" ? "estimating…" : "fill the form to get an estimate";
    panel.appendChild(hint);
    return;
  }
  const headline = document.createElement("h2");
  headline.textContent = formatKwh(state.estimate.car_kwh);
  panel.appendChild(headline);
  const installment = document.createElement("p");
  installment.textContent = `${formatEur(state.estimate.monthly_installment_eur)} / month`;
  panel.appendChild(installment);
  const list = document.createElement("ol");
  for (const card of traceCards(state.estimate.trace)) {
    const item = document.createElement("li");
    item.className = `card card-${card.kind}`;
    item.textContent = card.text;
    list.appendChild(item);
  }
  panel.appendChild(list);
  if (state.status === "loading") {
    const updating = document.createElement("p");
    updating.textContent = "updating…";
    panel.appendChild(updating);
  }
}

function start(): void {
  const form = document.getElementById("form");
  const panel = document.getElementById("panel");
  if (!form || !panel) {
    throw new Error("missing #form/#panel containers");
  }
  buildForm(form);
  store.subscribe(() => renderPanel(panel));
  renderPanel(panel);
}

start();
