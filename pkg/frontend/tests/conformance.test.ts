/** Client conformance: a scripted session completes level 1 end-to-end
 * against a live game server (write tests -> activate -> alarm -> fix ->
 * minigame -> room 2), and the coverage gutter shows exactly the
 * covered-lines array the server returned from /run. */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import type { Grid } from "../src/api.js";
import { App } from "../src/main.js";

const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess;
let baseUrl: string;

async function freePort(): Promise<number> {
  return new Promise((resolvePort) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as { port: number }).port;
      probe.close(() => resolvePort(port));
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  const workDir = mkdtempSync(join(tmpdir(), "shipgame-e2e-"));
  const configPath = join(workDir, "config.json");
  writeFileSync(configPath, JSON.stringify({
    port,
    data_dir: join(workDir, "data"),
    sabotage_delay_ms: 0,
    admin_token: "e2e",
  }));
  server = spawn("python3", ["-m", "shipgame.service.cli", "serve", "--config", configPath], {
    env: { ...process.env, PYTHONPATH: join(REPO_ROOT, "src") },
    stdio: ["ignore", "pipe", "pipe"],
  });
  const stderr: string[] = [];
  server.stderr!.on("data", (chunk) => stderr.push(String(chunk)));
  for (let attempt = 0; attempt < 150; attempt += 1) {
    try {
      const response = await fetch(`${baseUrl}/api/session`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ name: "probe" }),
      });
      if (response.ok) {
        return;
      }
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`game server did not come up:\n${stderr.join("")}`);
}, 60_000);

afterAll(() => {
  server?.kill("SIGINT");
});

/** Independent of the client: find rotations that connect source to sink by
 * searching simple paths whose pieces can face both neighbours. */
function solveGrid(grid: Grid): Array<[number, number, number]> {
  const BASE: Record<string, number[]> = {
    straight: [0, 2], bend: [0, 1], tee: [0, 1, 3], cross: [0, 1, 2, 3],
  };
  const DELTA: Array<[number, number]> = [[0, -1], [1, 0], [0, 1], [-1, 0]];
  const ports = (kind: string, rotation: number) =>
    new Set(BASE[kind].map((d) => (d + rotation) % 4));
  const find = (kind: string): [number, number] => {
    for (let y = 0; y < grid.height; y += 1) {
      for (let x = 0; x < grid.width; x += 1) {
        if (grid.cells[y][x].kind === kind) {
          return [x, y];
        }
      }
    }
    throw new Error(`no ${kind}`);
  };
  const feasible = (x: number, y: number, needed: number[]): number | null => {
    const cell = grid.cells[y][x];
    if (cell.kind === "source" || cell.kind === "sink") {
      return null;
    }
    for (let r = 0; r < 4; r += 1) {
      if (cell.kind === "cross" && r > 0) {
        break;
      }
      const have = ports(cell.kind, r);
      if (needed.every((d) => have.has(d))) {
        return r;
      }
    }
    return null;
  };
  const [sx, sy] = find("source");
  const [tx, ty] = find("sink");
  const sourceDir = grid.cells[sy][sx].port!;
  const sinkDir = grid.cells[ty][tx].port!;
  const firstX = sx + DELTA[sourceDir][0];
  const firstY = sy + DELTA[sourceDir][1];
  const path: Array<[number, number]> = [[sx, sy]];
  const visited = new Set<string>([`${sx},${sy}`]);

  const dfs = (x: number, y: number, entry: number): boolean => {
    if (x === tx && y === ty) {
      return entry === sinkDir;
    }
    const kind = grid.cells[y][x].kind;
    if (kind === "source" || kind === "sink") {
      return false;
    }
    for (let onward = 0; onward < 4; onward += 1) {
      if (onward === entry) {
        continue;
      }
      const nx = x + DELTA[onward][0];
      const ny = y + DELTA[onward][1];
      if (nx < 0 || ny < 0 || nx >= grid.width || ny >= grid.height) {
        continue;
      }
      if (visited.has(`${nx},${ny}`)) {
        continue;
      }
      if (feasible(x, y, [entry, onward]) === null) {
        continue;
      }
      visited.add(`${nx},${ny}`);
      path.push([nx, ny]);
      if (dfs(nx, ny, (onward + 2) % 4)) {
        return true;
      }
      path.pop();
      visited.delete(`${nx},${ny}`);
    }
    return false;
  };

  if (firstX < 0 || firstY < 0 || firstX >= grid.width || firstY >= grid.height) {
    throw new Error("source points off the board");
  }
  visited.add(`${firstX},${firstY}`);
  path.push([firstX, firstY]);
  if (!(firstX === tx && firstY === ty) && !dfs(firstX, firstY, (sourceDir + 2) % 4)) {
    throw new Error("puzzle is not solvable");
  }
  const targets: Array<[number, number, number]> = [];
  for (let i = 1; i < path.length - 1; i += 1) {
    const [x, y] = path[i];
    const toPrev = DELTA.findIndex(
      ([dx, dy]) => x + dx === path[i - 1][0] && y + dy === path[i - 1][1],
    );
    const toNext = DELTA.findIndex(
      ([dx, dy]) => x + dx === path[i + 1][0] && y + dy === path[i + 1][1],
    );
    const rotation = feasible(x, y, [toPrev, toNext]);
    if (rotation !== null && grid.cells[y][x].kind !== "cross") {
      targets.push([x, y, rotation]);
    }
  }
  return targets;
}

const PLAYER_TESTS = [
  "fn test_wakes_after_one_day() {",
  "    CryoSleep pod = new CryoSleep(1);",
  "    pod.dayPassed();",
  "    assertFalse(pod.isFrozen());",
  "}",
  "",
  "fn test_idle_pod_stays_awake() {",
  "    CryoSleep pod = new CryoSleep(0);",
  "    pod.dayPassed();",
  "    assertFalse(pod.isFrozen());",
  "    assertEquals(0, pod.daysLeft());",
  "}",
].join("\n");

describe("level 1 end to end", () => {
  it("completes write tests -> activate -> alarm -> fix -> minigame -> room 2", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const app = new App(document, document.getElementById("app")!, baseUrl);

    // board the ship
    const ok = await app.login("navigator");
    expect(ok).toBe(true);
    expect(app.view.screen).toBe("map");
    expect(app.view.phaseOf(1)).toBe("testing");
    expect(app.view.phaseOf(2)).toBe("locked");
    const lockedDoor = app.map.root.querySelectorAll(".room-enter")[1] as HTMLButtonElement;
    expect(lockedDoor.disabled).toBe(true);

    // write tests in the console and run them
    await app.enterRoom(1);
    expect(app.view.screen).toBe("editor");
    app.editor.setTestText(PLAYER_TESTS);
    const run = await app.editor.runTests();
    expect(run).not.toBeNull();
    expect(run!.attempt_class).toBe("passed");
    expect(run!.activation_eligible).toBe(true);

    // the coverage gutter shows exactly the covered-lines array from /run
    expect(app.editor.coveredGutterLines()).toEqual(run!.covered_lines);
    expect(run!.covered_lines.length).toBeGreaterThan(0);

    // activate; the zero-delay sabotage trips the suite -> alarm on the map
    expect(await app.editor.activate()).toBe(true);
    await app.showMap();
    expect(app.view.phaseOf(1)).toBe("sabotaged-alarm");
    const banner = app.map.root.querySelector(".alarm-banner") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("Cryo Chamber");

    // debug: the mutated code is in the component pane and editable now
    await app.enterRoom(1);
    const cutPane = app.editor.root.querySelector(".cut-code") as HTMLTextAreaElement;
    expect(cutPane.readOnly).toBe(false);
    expect(cutPane.value).toContain("remaining < 0");
    // first submit with the sabotage still in place: player tests fail
    const failing = await app.editor.submitFix();
    expect(failing!.outcome).toBe("player-tests-failing");
    // repair the off-by-one boundary and resubmit
    app.editor.setCutText(cutPane.value.replace("remaining < 0", "remaining <= 0"));
    const repaired = await app.editor.submitFix();
    expect(repaired!.outcome).toBe("repaired");

    // door puzzle: click the wires into place, then connect
    await app.showMap();
    expect(app.view.phaseOf(1)).toBe("repaired");
    const doorButton = app.map.root.querySelector(".door-panel") as HTMLButtonElement;
    expect(doorButton).not.toBeNull();
    await app.openDoorPanel(1);
    expect(app.view.screen).toBe("minigame");
    const grid = structuredClone(app.minigame.currentGrid!);
    for (const [x, y, rotation] of solveGrid(grid)) {
      const current = grid.cells[y][x].rotation;
      const turns = (rotation - current + 4) % 4;
      for (let i = 0; i < turns; i += 1) {
        app.minigame.cellElement(x, y).click();
      }
    }
    (app.minigame.root.querySelector(".connect-button") as HTMLButtonElement).click();
    for (let i = 0; i < 100 && app.view.screen !== "map"; i += 1) {
      await new Promise((r) => setTimeout(r, 50));
    }

    // room 2 is open for testing
    expect(app.view.screen).toBe("map");
    expect(app.view.phaseOf(1)).toBe("repaired");
    expect(app.view.phaseOf(2)).toBe("testing");
    const door2 = app.map.root.querySelectorAll(".room-enter")[1] as HTMLButtonElement;
    expect(door2.disabled).toBe(false);
    await app.enterRoom(2);
    expect(app.editor.root.querySelector(".room-name")!.textContent)
      .toBe("Engine Compartment");
  }, 120_000);
});
