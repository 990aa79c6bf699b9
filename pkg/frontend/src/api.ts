/** Typed client for the game server's JSON API. The server is authoritative
 * for everything: phases, verdicts, coverage. This module only moves JSON. */

export interface LevelSummary {
  phase: string;
  name: string;
}

export interface GameState {
  player_id: string;
  current_level: number;
  game_complete: boolean;
  pack_size: number;
  levels: Record<string, LevelSummary>;
}

export interface LevelPayload {
  phase: string;
  name: string;
  cut_source: string;
  test_buffer: string;
  revealed_hidden_tests: string[];
  intro_dialog: string;
  debug_hint: string;
  coverage_threshold: string;
  can_edit_cut: boolean;
}

export interface TestResult {
  name: string;
  verdict: string;
  passed: boolean;
  message: string;
  log: string[];
  covered_lines: number[];
}

export interface RunPayload {
  attempt_class: string;
  tests: TestResult[];
  diagnostics: string[];
  covered_lines: number[];
  coverage_ratio: string;
  coverage_percent: number;
  activation_eligible: boolean;
  phase: string;
}

export interface FixPayload {
  outcome: string;
  revealed_test: string | null;
  player_result: Omit<RunPayload, "phase" | "activation_eligible">;
  test_buffer: string;
  phase: string;
}

export interface GridCell {
  kind: string;
  rotation: number;
  port?: number;
}

export interface Grid {
  width: number;
  height: number;
  cells: GridCell[][];
}

export interface MinigamePayload {
  grid: Grid;
  phase: string;
}

export interface SolveResponse {
  solved: boolean;
  phase: string;
  current_level: number;
  game_complete: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class Api {
  private token: string | null = null;

  constructor(private readonly base: string) {}

  async createSession(name: string): Promise<{ player_id: string; resumed: boolean }> {
    const body = await this.request<{ token: string; player_id: string; resumed: boolean }>(
      "POST", "/api/session", { name }, false,
    );
    this.token = body.token;
    return { player_id: body.player_id, resumed: body.resumed };
  }

  getState(): Promise<GameState> {
    return this.request("GET", "/api/state");
  }

  getLevel(level: number): Promise<LevelPayload> {
    return this.request("GET", `/api/levels/${level}`);
  }

  saveBuffer(level: number, pane: "cut" | "test", text: string): Promise<{ ok: boolean; phase: string }> {
    return this.request("PUT", `/api/levels/${level}/buffers`, { pane, text });
  }

  run(level: number): Promise<RunPayload> {
    return this.request("POST", `/api/levels/${level}/run`);
  }

  activate(level: number): Promise<{ ok: boolean; phase: string }> {
    return this.request("POST", `/api/levels/${level}/activate`);
  }

  submitFix(level: number): Promise<FixPayload> {
    return this.request("POST", `/api/levels/${level}/fix`);
  }

  getMinigame(level: number): Promise<MinigamePayload> {
    return this.request("GET", `/api/levels/${level}/minigame`);
  }

  submitRotations(level: number, rotations: Array<[number, number]>): Promise<SolveResponse> {
    return this.request("POST", `/api/levels/${level}/minigame`, { rotations });
  }

  sendUiEvents(events: Array<{ category: string }>): Promise<{ ok: boolean }> {
    return this.request("POST", "/api/events", { events });
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    authenticated = true,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (authenticated) {
      if (!this.token) {
        throw new ApiError("unauthorized", "no session", 401);
      }
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "error";
      let message = `${response.status}`;
      try {
        const payload = await response.json();
        if (payload && payload.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
        } else if (payload && payload.detail) {
          message = String(payload.detail);
        }
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }
}
