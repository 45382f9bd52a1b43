/** Typed client for the labeling service's HTTP+JSON API. */

export interface RecordView {
  id: string;
  attributes: Record<string, string>;
}

export interface OfferedPair {
  pair_id: string;
  left: RecordView;
  right: RecordView;
  machine_label: "match" | "unmatch";
  risk: number;
}

export interface NextResponse {
  status: "awaiting_label" | "complete";
  session_id: string;
  pair?: OfferedPair;
  remaining_budget?: number;
}

export interface SessionMetrics {
  session_id: string;
  status: string;
  consumed_budget: number;
  budget: number;
  pickup: number;
  precision?: number;
  recall?: number;
  f1?: number;
}

export interface LabelAck {
  status: string;
  seq: number;
  duplicate: boolean;
  metrics: SessionMetrics;
}

export interface StartSessionRequest {
  dataset_dir: string;
  strategy?: string;
  budget: number;
  theta?: number;
  seed?: number;
  train_budget?: number;
  session_id?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, (body as { detail?: string }).detail ?? resp.statusText);
  }
  return body as T;
}

export class LabelingApi {
  constructor(private baseUrl: string) {}

  startSession(req: StartSessionRequest): Promise<{ session_id: string; status: string }> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(req),
    });
  }

  nextPair(sessionId: string): Promise<NextResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/next`);
  }

  submitLabel(sessionId: string, seq: number, pairId: string,
              label: "match" | "unmatch"): Promise<LabelAck> {
    return request(`${this.baseUrl}/sessions/${sessionId}/labels`, {
      method: "POST",
      body: JSON.stringify({ seq, pair_id: pairId, label }),
    });
  }

  metrics(sessionId: string): Promise<SessionMetrics> {
    return request(`${this.baseUrl}/sessions/${sessionId}/metrics`);
  }

  report(sessionId: string): Promise<unknown> {
    return request(`${this.baseUrl}/sessions/${sessionId}/report`);
  }
}
