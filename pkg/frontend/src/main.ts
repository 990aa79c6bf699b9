/** App shell: login, ship map, room consoles, door puzzles, robot dialog.
 * The server is authoritative; the client re-reads /api/state after every
 * screen change and shows whatever phase it is told. */

import { Api } from "./api.js";
import { DialogPane } from "./dialog.js";
import { EditorScreen } from "./editor.js";
import { MapScreen } from "./map.js";
import { MinigameScreen } from "./minigame.js";
import { ClientViewState } from "./state.js";

export class App {
  readonly view = new ClientViewState();
  readonly api: Api;
  readonly map: MapScreen;
  readonly editor: EditorScreen;
  readonly minigame: MinigameScreen;
  readonly dialog: DialogPane;
  private readonly doc: Document;
  private readonly rootElement: HTMLElement;
  private readonly loginForm: HTMLElement;
  private uiEventQueue: Array<{ category: string }> = [];
  private alarmSeen = new Set<number>();
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(doc: Document, root: HTMLElement, baseUrl: string) {
    this.doc = doc;
    this.rootElement = root;
    this.api = new Api(baseUrl);
    this.dialog = new DialogPane(doc, () => this.queueUiEvent("dialog"));
    this.map = new MapScreen(doc, {
      onEnterRoom: (level) => void this.enterRoom(level),
      onDoorPanel: (level) => void this.openDoorPanel(level),
      onMove: () => this.queueUiEvent("movement"),
    });
    this.editor = new EditorScreen(doc, this.api, {
      onPhase: () => void 0,
      onRobotSays: (lines) => this.dialog.say(lines),
      onBack: () => void this.showMap(),
      onRepaired: () => void this.refreshState(),
    });
    this.minigame = new MinigameScreen(doc, this.api, {
      onSolved: () => void this.showMap(),
      onRobotSays: (lines) => this.dialog.say(lines),
      onBack: () => void this.showMap(),
    });
    this.loginForm = this.buildLogin();
    root.append(this.loginForm, this.map.root, this.editor.root,
                this.minigame.root, this.dialog.root);
  }

  private buildLogin(): HTMLElement {
    const form = this.doc.createElement("form");
    form.className = "login-screen";
    form.innerHTML = `
      <h1>Sojourner</h1>
      <p>Crew member, report for duty.</p>
      <input class="player-name" placeholder="crew name" />
      <button type="submit" class="login-button">Board the ship</button>
      <p class="login-error" hidden></p>
    `;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const name = (form.querySelector(".player-name") as HTMLInputElement).value;
      void this.login(name);
    });
    return form;
  }

  async login(name: string): Promise<boolean> {
    const errorLine = this.loginForm.querySelector(".login-error") as HTMLElement;
    try {
      await this.api.createSession(name);
    } catch (err) {
      errorLine.hidden = false;
      errorLine.textContent = err instanceof Error ? err.message : "login failed";
      return false;
    }
    errorLine.hidden = true;
    this.loginForm.hidden = true;
    this.dialog.say([
      "You are awake! The cryo pod dropped you out early - something is wrong with the ship.",
      "I am your maintenance unit. Find a console, write tests, and we will catch the saboteur's work.",
    ]);
    await this.showMap();
    return true;
  }

  async refreshState(): Promise<void> {
    const state = await this.api.getState();
    this.view.mirrorFromServer(state);
    this.map.render(state);
    let alarmText: string | null = null;
    for (let level = 1; level <= state.pack_size; level += 1) {
      const phase = state.levels[String(level)].phase;
      if ((phase === "sabotaged-alarm" || phase === "sabotaged-destroyed")
          && !this.alarmSeen.has(level)) {
        this.alarmSeen.add(level);
        const name = state.levels[String(level)].name;
        this.dialog.say(
          phase === "sabotaged-alarm"
            ? [`Alarm! Your tests caught a sabotage in the ${name}. To the console!`]
            : [`The ${name} component was destroyed - the sabotage slipped past your tests.`,
               "I patched the hardware and added a test that pinpoints the bug. Go take a look."],
        );
      }
      if (phase === "sabotaged-alarm" || phase === "sabotaged-destroyed" || phase === "debugging") {
        const name = state.levels[String(level)].name;
        alarmText = `⚠ ${name} needs debugging`;
      }
    }
    this.map.setAlarm(alarmText);
  }

  async showMap(): Promise<void> {
    this.view.screen = "map";
    this.editor.hide();
    this.minigame.hide();
    await this.refreshState();
    this.map.show();
    void this.flushUiEvents();
  }

  async enterRoom(level: number): Promise<void> {
    this.queueUiEvent("interaction");
    this.view.screen = "editor";
    this.view.focusLevel = level;
    this.map.hide();
    this.minigame.hide();
    await this.editor.show(level);
  }

  async openDoorPanel(level: number): Promise<void> {
    this.queueUiEvent("interaction");
    this.view.screen = "minigame";
    this.view.focusLevel = level;
    this.map.hide();
    this.editor.hide();
    await this.minigame.show(level);
  }

  queueUiEvent(category: "movement" | "dialog" | "interaction"): void {
    this.uiEventQueue.push({ category });
  }

  async flushUiEvents(): Promise<void> {
    if (this.uiEventQueue.length === 0) {
      return;
    }
    const batch = this.uiEventQueue;
    this.uiEventQueue = [];
    try {
      await this.api.sendUiEvents(batch);
    } catch {
      this.uiEventQueue = batch.concat(this.uiEventQueue);
    }
  }

  /** Poll for server-side phase changes (sabotage fires on its own clock). */
  startPolling(intervalMs = 3000): void {
    if (this.pollTimer !== null) {
      return;
    }
    this.pollTimer = setInterval(() => {
      if (this.view.screen === "map") {
        void this.refreshState();
      }
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}

export function mount(doc: Document, baseUrl?: string): App {
  const root = doc.getElementById("app") ?? doc.body;
  const app = new App(doc, root as HTMLElement, baseUrl ?? "");
  app.startPolling();
  return app;
}

declare global {
  interface Window {
    __shipgameAutoMount?: boolean;
  }
}

if (typeof window !== "undefined" && window.__shipgameAutoMount !== false && typeof document !== "undefined") {
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => mount(document));
  } else if (document.getElementById("app")) {
    mount(document);
  }
}
