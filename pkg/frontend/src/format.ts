// Display formatting only: the underlying state always keeps the raw
// server values.

export function formatKwh(value: number): string {
  return `${Math.round(value)} kWh`;
}

export function formatEur(value: number): string {
  return `${value.toFixed(2)} €`;
}

export function formatNumber(value: number): string {
  return Number.isInteger(value) ? String(value) : String(Number(value.toPrecision(6)));
}
