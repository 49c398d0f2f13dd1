/** Typed client for the service's /v1 API. All bodies are JSON; motions
 * and code sequences travel as their canonical text formats.
 */

import { ApiError } from "./errors.js";

export interface FetchLike {
  (url: string, init?: RequestInit): Promise<Response>;
}

export interface SessionInfo {
  session_id: string;
  description: string;
  history: { instruction: string; codes: string }[];
}

export interface EditResult {
  codes: string;
  trace: unknown;
  motion?: string;
}

export interface CodebookInfo {
  categories: number;
  codes: number;
  table: string;
}

/** The subset of the client the session controller needs; lets tests
 * substitute a canned implementation.
 */
export interface ServiceApi {
  decode(codes: string): Promise<{ motion: string }>;
  edit(sessionId: string, instruction: string, range?: [number, number] | null): Promise<EditResult>;
  getSession(sessionId: string): Promise<SessionInfo>;
  codebook(): Promise<CodebookInfo>;
}

export class ApiClient implements ServiceApi {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (url, init) => fetch(url, init)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${(err as Error).message}`, 0);
    }
    let payload: unknown = null;
    try {
      payload = await resp.json();
    } catch {
      // non-JSON body; fall through with the status alone
    }
    if (!resp.ok) {
      const rec = (payload ?? {}) as { error?: string; stage?: string };
      const message = typeof rec.error === "string" ? rec.error : `HTTP ${resp.status}`;
      const stage = typeof rec.stage === "string" && rec.stage !== "" ? rec.stage : null;
      throw new ApiError(message, resp.status, stage);
    }
    return payload as T;
  }

  encode(motion: string, downsample?: number): Promise<{ codes: string }> {
    const body: Record<string, unknown> = { motion };
    if (downsample !== undefined) body.downsample = downsample;
    return this.request("POST", "/v1/encode", body);
  }

  decode(codes: string): Promise<{ motion: string }> {
    return this.request("POST", "/v1/decode", { codes });
  }

  createSession(input: {
    motion?: string;
    codes?: string;
    text?: string;
    downsample?: number;
    seed?: number;
  }): Promise<{ session_id: string; codes: string }> {
    return this.request("POST", "/v1/sessions", input);
  }

  /** range is the inclusive [start, end] step selection, or null to let the model pick. */
  edit(sessionId: string, instruction: string, range: [number, number] | null = null): Promise<EditResult> {
    const body: Record<string, unknown> = { instruction };
    if (range !== null) body.range = range;
    return this.request("POST", `/v1/sessions/${encodeURIComponent(sessionId)}/edit`, body);
  }

  getSession(sessionId: string): Promise<SessionInfo> {
    return this.request("GET", `/v1/sessions/${encodeURIComponent(sessionId)}`);
  }

  codebook(): Promise<CodebookInfo> {
    return this.request("GET", "/v1/codebook");
  }
}
