// Typed client for the evoshape service. Every number shown in the UI comes
// out of these payloads; the client never post-processes geometry or scores.

export type Point = [number, number];

export type GenomePayload = {
  harmonic_count: number;
  coeffs: [number, number][];
};

export type IndividualPayload = {
  id: number;
  fitness: number | null;
  generation_born: number;
  parent_ids: number[] | null;
  points: Point[];
};

export type GenerationPage = {
  generation: number;
  page: number;
  page_count: number;
  population_size: number;
  individuals: IndividualPayload[];
};

export type SessionSummary = {
  id: string;
  mode: string;
  seed: number;
  created_at: string;
  generation: number;
  generation_count: number;
  population_size: number;
  graded: number;
  positive_grades: number;
  config: Record<string, unknown>;
  codec: Record<string, unknown>;
};

export type GradeAck = {
  individual_id: number;
  fitness: number;
  generation: number;
};

export type TraceResponse = {
  genome: GenomePayload;
  preview: { points: Point[] };
};

export type TrialResponse = {
  trial_id: string;
  gene_i: number;
  gene_j: number;
  base: GenomePayload;
  variant_i: GenomePayload;
  variant_j: GenomePayload;
  previews: { base: Point[]; variant_i: Point[]; variant_j: Point[] };
};

export type VariantResponse = {
  trial_id: string;
  scale: number;
  variant_j: GenomePayload;
  preview: Point[];
};

export type JudgmentResponse = {
  trial_id: string;
  gene_i: number;
  gene_j: number;
  dist_i: number;
  dist_j: number;
  iso_similar: boolean;
  similarity_level: number | null;
};

export type TraceEntry = {
  generation: number;
  avg_fitness: number;
  best_fitness: number;
  avg_similarity: number;
};

export type MetricsResponse = { entries: TraceEntry[] };

export type CurvePayload = { points: Point[] };

export type SessionRequest = {
  curves: CurvePayload[];
  seed?: number;
  config?: Record<string, unknown>;
  codec?: Record<string, unknown>;
};

export type FetchLike = (
  input: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  readonly status: number;
  readonly family: string;

  constructor(status: number, family: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.family = family;
  }
}

type ErrorBody = { error?: string; message?: string };

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? (fetch as unknown as FetchLike);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const payload = (await response.json()) as T & ErrorBody;
    if (response.status >= 400) {
      throw new ApiError(
        response.status,
        payload.error ?? "HTTPError",
        payload.message ?? `request failed with status ${response.status}`,
      );
    }
    return payload;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/healthz");
  }

  createSession(request: SessionRequest): Promise<SessionSummary> {
    return this.request("POST", "/sessions", request);
  }

  getSession(sessionId: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  getGeneration(
    sessionId: string,
    generation: number,
    page = 0,
  ): Promise<GenerationPage> {
    return this.request(
      "GET",
      `/sessions/${sessionId}/generation/${generation}?page=${page}`,
    );
  }

  postGrade(
    sessionId: string,
    individualId: number,
    fitness: number,
  ): Promise<GradeAck> {
    return this.request("POST", `/sessions/${sessionId}/grades`, {
      individual_id: individualId,
      fitness,
    });
  }

  evolve(sessionId: string): Promise<SessionSummary> {
    return this.request("POST", `/sessions/${sessionId}/evolve`);
  }

  getMetrics(sessionId: string): Promise<MetricsResponse> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }

  trace(points: Point[]): Promise<TraceResponse> {
    return this.request("POST", "/trace", { points });
  }

  createTrial(request: {
    gene_i: number;
    gene_j: number;
    perturbation_scale?: number;
    seed?: number;
    base?: GenomePayload;
  }): Promise<TrialResponse> {
    return this.request("POST", "/calibration/trials", request);
  }

  adjustVariant(trialId: string, scale: number): Promise<VariantResponse> {
    return this.request("POST", `/calibration/trials/${trialId}/variant`, {
      scale,
    });
  }

  postJudgment(request: {
    trial_id: string;
    iso_similar?: boolean;
    similarity_level?: number;
  }): Promise<JudgmentResponse> {
    return this.request("POST", "/calibration/judgments", request);
  }

  fit(model: "exponential" | "weighted"): Promise<Record<string, unknown>> {
    return this.request("POST", "/calibration/fit", { model });
  }
}
