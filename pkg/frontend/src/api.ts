// Typed client for the play service /v1 endpoints.  This module is the
// only place that talks to the network; everything above it works on
// the parsed snapshots.

export type ModeName = "nonrep" | "erase" | "hard";
export type PlayerName = "ANN" | "BEN";
export type Terminal =
  | "BEN_WON"
  | "LENGTH_TARGET_REACHED"
  | "ENGINE_RESIGNED"
  | null;

export interface Snapshot {
  id: string;
  mode: ModeName;
  k: number;
  word: number[];
  turn: PlayerName;
  terminal: Terminal;
  lastErased: number[][];
  plyCount: number;
  resignReason?: string;
}

export type MoveJson = { letter: number } | { pass: true };

export interface EngineMoveResponse {
  move: MoveJson | null;
  state: Snapshot;
}

export interface HintEntry {
  move: MoveJson;
  weight: number | null;
  completesSquare: boolean;
  leavesThreat: boolean;
  erased: number[][];
  safe: boolean;
}

export interface HintResponse {
  turn: PlayerName;
  moves: HintEntry[];
}

export interface CreateOptions {
  lengthTarget?: number;
  lookahead?: number;
  seed?: number;
  benStrategy?: "random" | "weightmin" | "script3";
}

export interface CreateRequest {
  mode: ModeName;
  k: number;
  humanRole: PlayerName;
  options?: CreateOptions;
}

export type ErrorCode =
  | "UNKNOWN_SESSION"
  | "NOT_YOUR_TURN"
  | "NOT_ENGINE_TURN"
  | "ILLEGAL_MOVE"
  | "UNSUPPORTED"
  | "BUSY";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: ErrorCode,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Network-level failure, as opposed to a structured service refusal. */
export class ServiceUnreachableError extends Error {
  constructor(cause: unknown) {
    super(`play service unreachable: ${String(cause)}`);
    this.name = "ServiceUnreachableError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(url, init);
  } catch (err) {
    throw new ServiceUnreachableError(err);
  }
  if (res.status === 204) {
    return undefined as T;
  }
  const body = await res.json();
  if (!res.ok) {
    throw new ApiError(res.status, body.code, body.message);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}/v1${path}`;
  }

  createGame(req: CreateRequest): Promise<Snapshot> {
    return request<Snapshot>(this.url("/games"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  getGame(id: string): Promise<Snapshot> {
    return request<Snapshot>(this.url(`/games/${id}`));
  }

  postMove(id: string, move: MoveJson): Promise<Snapshot> {
    return request<Snapshot>(this.url(`/games/${id}/move`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(move),
    });
  }

  engineMove(id: string): Promise<EngineMoveResponse> {
    return request<EngineMoveResponse>(this.url(`/games/${id}/engine-move`), {
      method: "POST",
    });
  }

  hint(id: string): Promise<HintResponse> {
    return request<HintResponse>(this.url(`/games/${id}/hint`));
  }

  deleteGame(id: string): Promise<void> {
    return request<void>(this.url(`/games/${id}`), { method: "DELETE" });
  }
}
