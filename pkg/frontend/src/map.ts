/** Linear ship map: one room per level, a door between neighbours. Rooms
 * render their lock/repair status from the server's phase map; clicking an
 * unlocked room enters its console. */

import type { GameState } from "./api.js";

const STATUS_ICON: Record<string, string> = {
  "locked": "\u{1F512}",
  "testing": "\u{1F50D}",
  "activated": "\u{1F6E1}",
  "sabotaged-alarm": "\u{1F6A8}",
  "sabotaged-destroyed": "\u{1F4A5}",
  "debugging": "\u{1F527}",
  "repaired": "✅",
};

export interface MapCallbacks {
  onEnterRoom(level: number): void;
  onDoorPanel(level: number): void;
  onMove(): void;
}

export class MapScreen {
  readonly root: HTMLElement;
  private readonly doc: Document;

  constructor(doc: Document, private readonly hooks: MapCallbacks) {
    this.doc = doc;
    this.root = doc.createElement("section");
    this.root.className = "map-screen";
    this.root.hidden = true;
    const title = doc.createElement("h2");
    title.textContent = "Ship deck";
    const rooms = doc.createElement("ol");
    rooms.className = "rooms";
    const banner = doc.createElement("div");
    banner.className = "alarm-banner";
    banner.hidden = true;
    this.root.append(title, banner, rooms);
  }

  show(): void {
    this.root.hidden = false;
  }

  hide(): void {
    this.root.hidden = true;
  }

  setAlarm(text: string | null): void {
    const banner = this.root.querySelector(".alarm-banner") as HTMLElement;
    banner.hidden = text === null;
    banner.textContent = text ?? "";
  }

  render(state: GameState): void {
    const rooms = this.root.querySelector(".rooms") as HTMLOListElement;
    rooms.innerHTML = "";
    for (let level = 1; level <= state.pack_size; level += 1) {
      const summary = state.levels[String(level)];
      const item = this.doc.createElement("li");
      item.className = `room room-${summary.phase}`;
      item.dataset.level = String(level);
      const label = this.doc.createElement("button");
      label.className = "room-enter";
      label.textContent = `${STATUS_ICON[summary.phase] ?? "?"} ${summary.name}`;
      label.disabled = summary.phase === "locked";
      label.addEventListener("click", () => {
        this.hooks.onMove();
        this.hooks.onEnterRoom(level);
      });
      item.appendChild(label);
      if (summary.phase === "repaired" && !state.game_complete) {
        const door = this.doc.createElement("button");
        door.className = "door-panel";
        door.textContent = "door panel";
        door.addEventListener("click", () => this.hooks.onDoorPanel(level));
        item.appendChild(door);
      }
      rooms.appendChild(item);
    }
    const done = this.doc.createElement("li");
    if (state.game_complete) {
      done.className = "ship-secure";
      done.textContent = "The ship is secure.";
      rooms.appendChild(done);
    }
  }
}
