/** Wire-rotation door puzzle board. Clicking a rotatable piece turns it a
 * quarter clockwise locally and records the click; the accumulated clicks
 * are posted to the server, which alone decides "solved". */

import { Api, ApiError, Grid, GridCell } from "./api.js";

const GLYPHS: Record<string, string[]> = {
  // index = rotation
  straight: ["│", "─", "│", "─"],
  bend: ["└", "┌", "┐", "┘"],
  tee: ["┴", "├", "┬", "┤"],
  cross: ["┼", "┼", "┼", "┼"],
};

const PORT_ARROWS = ["↑", "→", "↓", "←"];

export interface MinigameCallbacks {
  onSolved(): void;
  onRobotSays(lines: string[]): void;
  onBack(): void;
}

export class MinigameScreen {
  readonly root: HTMLElement;
  private readonly doc: Document;
  private level = 1;
  private grid: Grid | null = null;
  private clicks: Array<[number, number]> = [];
  private submitting = false;

  constructor(doc: Document, private readonly api: Api, private readonly hooks: MinigameCallbacks) {
    this.doc = doc;
    this.root = doc.createElement("section");
    this.root.className = "minigame-screen";
    this.root.hidden = true;
    this.root.innerHTML = `
      <h2>Door circuit</h2>
      <p class="minigame-hint">Rotate the wires to connect the power source to the door.</p>
      <table class="wire-board"></table>
      <div class="minigame-controls">
        <button class="connect-button">Connect</button>
        <button class="leave-button">Back</button>
      </div>
    `;
    (this.root.querySelector(".connect-button") as HTMLButtonElement)
      .addEventListener("click", () => void this.submit());
    (this.root.querySelector(".leave-button") as HTMLButtonElement)
      .addEventListener("click", () => hooks.onBack());
  }

  async show(level: number): Promise<void> {
    this.level = level;
    const payload = await this.api.getMinigame(level);
    this.grid = payload.grid;
    this.clicks = [];
    this.root.hidden = false;
    this.renderBoard();
  }

  hide(): void {
    this.root.hidden = true;
  }

  get pendingClicks(): ReadonlyArray<[number, number]> {
    return this.clicks;
  }

  get currentGrid(): Grid | null {
    return this.grid;
  }

  cellElement(x: number, y: number): HTMLTableCellElement {
    return this.root.querySelector(
      `td[data-x="${x}"][data-y="${y}"]`,
    ) as HTMLTableCellElement;
  }

  clickCell(x: number, y: number): void {
    if (!this.grid) {
      return;
    }
    const cell = this.grid.cells[y][x];
    if (cell.kind === "source" || cell.kind === "sink" || cell.kind === "cross") {
      const element = this.cellElement(x, y);
      element.classList.remove("shake");
      // force a reflow-free retrigger of the animation class
      void element.offsetWidth;
      element.classList.add("shake");
      return;
    }
    cell.rotation = (cell.rotation + 1) % 4;
    this.clicks.push([x, y]);
    this.renderCell(x, y, cell);
  }

  private renderBoard(): void {
    const board = this.root.querySelector(".wire-board") as HTMLTableElement;
    board.innerHTML = "";
    if (!this.grid) {
      return;
    }
    for (let y = 0; y < this.grid.height; y += 1) {
      const row = this.doc.createElement("tr");
      for (let x = 0; x < this.grid.width; x += 1) {
        const cell = this.doc.createElement("td");
        cell.dataset.x = String(x);
        cell.dataset.y = String(y);
        cell.addEventListener("click", () => this.clickCell(x, y));
        row.appendChild(cell);
      }
      board.appendChild(row);
      for (let x = 0; x < this.grid.width; x += 1) {
        this.renderCell(x, y, this.grid.cells[y][x]);
      }
    }
  }

  private renderCell(x: number, y: number, cell: GridCell): void {
    const element = this.cellElement(x, y);
    element.className = `wire wire-${cell.kind}`;
    if (cell.kind === "source" || cell.kind === "sink") {
      const arrow = PORT_ARROWS[cell.port ?? 0];
      element.textContent = cell.kind === "source" ? `⚡${arrow}` : `${arrow}\u{1F6AA}`;
    } else {
      element.textContent = GLYPHS[cell.kind][cell.rotation];
    }
    element.dataset.rotation = String(cell.rotation);
  }

  private async submit(): Promise<void> {
    if (this.submitting) {
      return;
    }
    this.submitting = true;
    try {
      const response = await this.api.submitRotations(this.level, this.clicks);
      if (response.solved) {
        this.hooks.onRobotSays(
          response.game_complete
            ? ["The last door opens onto a quiet, secure ship. Well done."]
            : ["The door hums open. Next room unlocked!"],
        );
        this.hooks.onSolved();
      } else {
        this.hooks.onRobotSays(["No current at the door yet; keep turning."]);
      }
    } catch (err) {
      if (err instanceof ApiError) {
        this.hooks.onRobotSays([`Hm. ${err.message}`]);
      }
    } finally {
      this.submitting = false;
    }
  }
}
