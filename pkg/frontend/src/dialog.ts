/** Robot dialog pane: queued lines, one advanced per click. */

export class DialogPane {
  readonly root: HTMLElement;
  private queue: string[] = [];
  private onAdvance: () => void;

  constructor(document: Document, onAdvance: () => void) {
    this.onAdvance = onAdvance;
    this.root = document.createElement("aside");
    this.root.className = "robot-dialog";
    this.root.hidden = true;
    const text = document.createElement("p");
    text.className = "dialog-text";
    const button = document.createElement("button");
    button.className = "dialog-next";
    button.textContent = "...";
    button.addEventListener("click", () => this.advance());
    this.root.append(text, button);
  }

  say(lines: string[]): void {
    this.queue = lines.filter((line) => line.trim().length > 0);
    this.render();
  }

  advance(): void {
    this.queue.shift();
    this.onAdvance();
    this.render();
  }

  get open(): boolean {
    return !this.root.hidden;
  }

  private render(): void {
    const text = this.root.querySelector(".dialog-text") as HTMLElement;
    if (this.queue.length === 0) {
      this.root.hidden = true;
      text.textContent = "";
      return;
    }
    this.root.hidden = false;
    text.textContent = this.queue[0];
  }
}
