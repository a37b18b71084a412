// Thin client for the /v1 endpoints. The fetch function is injectable so
// tests can script responses without a server.

import { ExplainResponse, HouseholdFields, PredictResponse, Trace } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export interface EstimateResult {
  predict: PredictResponse;
  trace: Trace | "unavailable";
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async predict(record: HouseholdFields): Promise<PredictResponse> {
    const response = await this.post("/v1/predict", record);
    if (!response.ok) {
      throw new ApiError(response.status, await errorText(response));
    }
    return (await response.json()) as PredictResponse;
  }

  /** Explanation is optional: a 409 means the served model has no traces. */
  async explain(record: HouseholdFields): Promise<Trace | "unavailable"> {
    const response = await this.post("/v1/explain", record);
    if (response.status === 409) {
      return "unavailable";
    }
    if (!response.ok) {
      throw new ApiError(response.status, await errorText(response));
    }
    const body = (await response.json()) as ExplainResponse;
    return body.trace;
  }

  /** Both calls for one form submission; the view needs both to render. */
  async estimate(record: HouseholdFields): Promise<EstimateResult> {
    const [predict, trace] = await Promise.all([this.predict(record), this.explain(record)]);
    return { predict, trace };
  }
}

async function errorText(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    return body.error ?? `HTTP ${response.status}`;
  } catch {
    return `HTTP ${response.status}`;
  }
}
