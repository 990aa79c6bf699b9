import type { GameState, RunPayload } from "./api.js";

export type Screen = "login" | "map" | "editor" | "minigame";

/** Client-side view state. The phase mirror is only ever assigned from
 * server responses; the client never advances it on its own. */
export class ClientViewState {
  screen: Screen = "login";
  focusLevel = 1;
  lastResult: RunPayload | null = null;
  serverState: GameState | null = null;

  mirrorFromServer(state: GameState): void {
    this.serverState = state;
  }

  phaseOf(level: number): string {
    const summary = this.serverState?.levels[String(level)];
    return summary ? summary.phase : "locked";
  }
}
