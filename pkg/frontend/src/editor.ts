/** Dual-pane code editor: component source (read-only until sabotage) and
 * the player's tests, a line-number gutter with coverage highlighting, a
 * per-test console, and run / activate / fix / back controls.
 *
 * All verdicts, coverage and phase changes come from server responses;
 * this module only renders them. */

import { Api, ApiError, FixPayload, LevelPayload, RunPayload, TestResult } from "./api.js";

export interface EditorCallbacks {
  onPhase(phase: string): void;
  onRobotSays(lines: string[]): void;
  onBack(): void;
  onRepaired(): void;
}

const DEBUG_PHASES = new Set(["sabotaged-alarm", "sabotaged-destroyed", "debugging"]);

export class EditorScreen {
  readonly root: HTMLElement;
  private level = 1;
  private levelData: LevelPayload | null = null;
  private lastRun: RunPayload | null = null;
  private runInFlight = false;
  private readonly doc: Document;

  constructor(doc: Document, private readonly api: Api, private readonly hooks: EditorCallbacks) {
    this.doc = doc;
    this.root = doc.createElement("section");
    this.root.className = "editor-screen";
    this.root.hidden = true;
    this.root.innerHTML = `
      <header class="editor-header">
        <h2 class="room-name"></h2>
        <div class="editor-controls">
          <button class="run-button">Run tests</button>
          <button class="activate-button" disabled>Activate</button>
          <button class="fix-button" hidden>Submit fix</button>
          <button class="back-button">Back to ship</button>
        </div>
      </header>
      <div class="panes">
        <div class="pane pane-cut">
          <h3>Component</h3>
          <div class="code-wrap">
            <ol class="gutter gutter-cut"></ol>
            <textarea class="code cut-code" spellcheck="false"></textarea>
          </div>
        </div>
        <div class="pane pane-test active-pane">
          <h3>Your tests</h3>
          <div class="code-wrap">
            <ol class="gutter gutter-test"></ol>
            <textarea class="code test-code" spellcheck="false"></textarea>
          </div>
        </div>
      </div>
      <div class="console">
        <div class="coverage-note"></div>
        <ul class="test-results"></ul>
        <pre class="diagnostics" hidden></pre>
      </div>
    `;
    this.q<HTMLButtonElement>(".run-button").addEventListener("click", () => void this.runTests());
    this.q<HTMLButtonElement>(".activate-button").addEventListener("click", () => void this.activate());
    this.q<HTMLButtonElement>(".fix-button").addEventListener("click", () => void this.submitFix());
    this.q<HTMLButtonElement>(".back-button").addEventListener("click", () => hooks.onBack());
    const cutPane = this.q<HTMLElement>(".pane-cut");
    const testPane = this.q<HTMLElement>(".pane-test");
    for (const [pane, other] of [[cutPane, testPane], [testPane, cutPane]] as const) {
      pane.querySelector("textarea")!.addEventListener("focus", () => {
        pane.classList.add("active-pane");
        other.classList.remove("active-pane");
      });
    }
  }

  private q<T extends Element>(selector: string): T {
    return this.root.querySelector(selector) as T;
  }

  get cutText(): string {
    return this.q<HTMLTextAreaElement>(".cut-code").value;
  }

  get testText(): string {
    return this.q<HTMLTextAreaElement>(".test-code").value;
  }

  setTestText(text: string): void {
    this.q<HTMLTextAreaElement>(".test-code").value = text;
  }

  setCutText(text: string): void {
    this.q<HTMLTextAreaElement>(".cut-code").value = text;
  }

  get lastResult(): RunPayload | null {
    return this.lastRun;
  }

  coveredGutterLines(): number[] {
    const covered: number[] = [];
    this.q<HTMLOListElement>(".gutter-cut")
      .querySelectorAll("li.covered")
      .forEach((item) => covered.push(Number((item as HTMLElement).dataset.line)));
    return covered;
  }

  async show(level: number): Promise<void> {
    this.level = level;
    const data = await this.api.getLevel(level);
    this.levelData = data;
    this.lastRun = null;
    this.root.hidden = false;
    this.q<HTMLElement>(".room-name").textContent = data.name;
    this.setCutText(data.cut_source);
    this.setTestText(data.test_buffer);
    this.applyPhase(data.phase);
    this.renderGutters([]);
    this.q<HTMLUListElement>(".test-results").innerHTML = "";
    this.q<HTMLElement>(".coverage-note").textContent = "";
    const intro: string[] = [];
    if (data.intro_dialog) {
      intro.push(data.intro_dialog);
    }
    if (DEBUG_PHASES.has(data.phase) && data.debug_hint) {
      intro.push(data.debug_hint);
    }
    if (intro.length > 0) {
      this.hooks.onRobotSays(intro);
    }
  }

  hide(): void {
    this.root.hidden = true;
  }

  /** Switch editability and controls to match the authoritative phase. */
  applyPhase(phase: string): void {
    const debugging = DEBUG_PHASES.has(phase);
    this.q<HTMLTextAreaElement>(".cut-code").readOnly = !debugging;
    this.q<HTMLButtonElement>(".fix-button").hidden = !debugging;
    this.q<HTMLButtonElement>(".activate-button").hidden = phase !== "testing";
    this.root.classList.toggle("debugging", debugging);
    this.hooks.onPhase(phase);
  }

  private setBusy(busy: boolean): void {
    this.runInFlight = busy;
    this.q<HTMLButtonElement>(".run-button").disabled = busy;
    this.q<HTMLButtonElement>(".fix-button").disabled = busy;
  }

  async runTests(): Promise<RunPayload | null> {
    if (this.runInFlight) {
      return null;
    }
    this.setBusy(true);
    try {
      await this.saveBuffers();
      const result = await this.api.run(this.level);
      this.lastRun = result;
      this.renderRun(result);
      this.applyPhase(result.phase);
      return result;
    } catch (err) {
      this.robotError(err);
      return null;
    } finally {
      this.setBusy(false);
    }
  }

  async activate(): Promise<boolean> {
    try {
      const response = await this.api.activate(this.level);
      this.applyPhase(response.phase);
      this.hooks.onRobotSays([
        "Tests activated. They are standing guard over this component now.",
        "Feel free to explore; I will raise the alarm if anything trips them.",
      ]);
      return true;
    } catch (err) {
      this.robotError(err);
      return false;
    }
  }

  async submitFix(): Promise<FixPayload | null> {
    if (this.runInFlight) {
      return null;
    }
    this.setBusy(true);
    try {
      await this.saveBuffers();
      const fix = await this.api.submitFix(this.level);
      this.setTestText(fix.test_buffer);
      this.applyPhase(fix.phase);
      if (fix.outcome === "repaired") {
        this.hooks.onRobotSays([
          "All tests pass, the hidden diagnostics too. Component repaired!",
          "Head to the door panel when you are ready to move on.",
        ]);
        this.hooks.onRepaired();
      } else if (fix.outcome === "hidden-test-revealed") {
        this.hooks.onRobotSays([
          `My diagnostics still fail: ${fix.revealed_test}. I added that check to your suite.`,
        ]);
      } else {
        this.hooks.onRobotSays(["Your own tests are still red; keep digging."]);
      }
      return fix;
    } catch (err) {
      this.robotError(err);
      return null;
    } finally {
      this.setBusy(false);
    }
  }

  private async saveBuffers(): Promise<void> {
    await this.api.saveBuffer(this.level, "test", this.testText);
    if (this.levelData && !this.q<HTMLTextAreaElement>(".cut-code").readOnly) {
      await this.api.saveBuffer(this.level, "cut", this.cutText);
    }
  }

  private robotError(err: unknown): void {
    if (err instanceof ApiError) {
      this.hooks.onRobotSays([`Hm. ${err.message}`]);
    } else {
      this.hooks.onRobotSays(["Something glitched in the console. Try that again."]);
    }
  }

  private renderRun(result: RunPayload): void {
    this.renderGutters(result.covered_lines);
    const list = this.q<HTMLUListElement>(".test-results");
    list.innerHTML = "";
    for (const test of result.tests) {
      list.appendChild(this.renderTest(test));
    }
    const diagnostics = this.q<HTMLPreElement>(".diagnostics");
    if (result.attempt_class === "compile-error") {
      diagnostics.hidden = false;
      diagnostics.textContent = result.diagnostics.join("\n");
    } else {
      diagnostics.hidden = true;
      diagnostics.textContent = "";
    }
    const note = this.q<HTMLElement>(".coverage-note");
    note.textContent =
      result.attempt_class === "compile-error"
        ? "compile error"
        : `coverage ${result.coverage_percent.toFixed(0)}% (${result.coverage_ratio})`;
    const activate = this.q<HTMLButtonElement>(".activate-button");
    activate.disabled = !result.activation_eligible;
  }

  private renderTest(test: TestResult): HTMLElement {
    const item = this.doc.createElement("li");
    item.className = `test-result ${test.passed ? "test-green" : "test-red"}`;
    item.dataset.test = test.name;
    const title = this.doc.createElement("span");
    title.className = "test-name";
    title.textContent = `${test.passed ? "PASS" : "FAIL"} ${test.name}`;
    item.appendChild(title);
    if (test.message) {
      const message = this.doc.createElement("pre");
      message.className = "test-message";
      message.textContent = test.message;
      item.appendChild(message);
    }
    if (test.log.length > 0) {
      const log = this.doc.createElement("pre");
      log.className = "test-log";
      log.textContent = test.log.join("\n");
      item.appendChild(log);
    }
    return item;
  }

  /** Line-number gutters; component lines in `covered` get the green mark. */
  private renderGutters(covered: number[]): void {
    const coveredSet = new Set(covered);
    const cutGutter = this.q<HTMLOListElement>(".gutter-cut");
    cutGutter.innerHTML = "";
    const cutLines = this.cutText.split("\n").length;
    for (let line = 1; line <= cutLines; line += 1) {
      const item = this.doc.createElement("li");
      item.dataset.line = String(line);
      item.textContent = String(line);
      if (coveredSet.has(line)) {
        item.classList.add("covered");
      }
      cutGutter.appendChild(item);
    }
    const testGutter = this.q<HTMLOListElement>(".gutter-test");
    testGutter.innerHTML = "";
    const testLines = this.testText.split("\n").length;
    for (let line = 1; line <= testLines; line += 1) {
      const item = this.doc.createElement("li");
      item.textContent = String(line);
      testGutter.appendChild(item);
    }
  }
}
