// Trace rendering as plain view-model cards; the DOM layer just prints them.

import { formatNumber } from "./format.js";
import { Trace } from "./types.js";

export interface RuleCard {
  kind: "rule";
  level: number;
  text: string;
  branch: "left" | "right";
}

export interface LeafCard {
  kind: "leaf";
  text: string;
}

export interface UnavailableCard {
  kind: "unavailable";
  text: string;
}

export type TraceCard = RuleCard | LeafCard | UnavailableCard;

/** One card per decision step, in order, plus the leaf arithmetic card. */
export function traceCards(trace: Trace | "unavailable"): TraceCard[] {
  if (trace === "unavailable") {
    return [{ kind: "unavailable", text: "explanations unavailable for this model" }];
  }
  const cards: TraceCard[] = trace.steps.map((step) => ({
    kind: "rule",
    level: step.level,
    text: `${step.rule} → ${step.branch}`,
    branch: step.branch,
  }));
  cards.push({
    kind: "leaf",
    text:
      `base ${formatNumber(trace.alpha)} + ${formatNumber(trace.beta)} × ` +
      `${formatNumber(trace.surface_m2)} m² = ${formatNumber(trace.prediction)} kWh`,
  });
  return cards;
}
