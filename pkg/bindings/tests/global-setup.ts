/** Boots one `pkex serve` instance and builds CLI fixture files; test
 * workers discover both through a JSON handshake file. The fixtures
 * are the parity reference: whatever the CLI printed, the client must
 * reproduce over HTTP.
 */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const RUNTIME_FILE = join(tmpdir(), "pkexplain-bindings-runtime.json");

let server: ChildProcess | undefined;
let fixtureDir: string | undefined;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.on("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("could not allocate a port"));
        return;
      }
      srv.close(() => resolve(address.port));
    });
  });
}

async function waitHealthy(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`pkex serve exited early with code ${child.exitCode}`);
    }
    try {
      const res = await fetch(`${baseUrl}/healthz`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service at ${baseUrl} did not become healthy`);
}

function cli(args: string[], cwd: string): string {
  return execFileSync("pkex", args, { cwd, encoding: "utf-8" });
}

/** Drop the trailing y column of a CLI dataset CSV; optionally keep
 * only the first `rows` data rows. */
function stripTarget(dir: string, src: string, dst: string, rows?: number): void {
  const lines = readFileSync(join(dir, src), "utf-8").trim().split("\n");
  const kept = rows === undefined ? lines : lines.slice(0, rows + 1);
  const out = kept
    .map((line) => line.split(",").slice(0, -1).join(","))
    .join("\n");
  writeFileSync(join(dir, dst), out + "\n");
}

function targetColumn(dir: string, src: string, dst: string): void {
  const lines = readFileSync(join(dir, src), "utf-8").trim().split("\n");
  const out = lines.map((line) => {
    const cells = line.split(",");
    return cells[cells.length - 1];
  });
  writeFileSync(join(dir, dst), out.join("\n") + "\n");
}

export async function setup(): Promise<void> {
  const dir = mkdtempSync(join(tmpdir(), "pkexplain-fixtures-"));
  fixtureDir = dir;

  // model + probe rows + expected attributions
  cli(["datagen", "linear", "--n", "40", "--d", "5", "--seed", "3", "--out", "train.csv"], dir);
  cli(["fit", "--data", "train.csv", "--target", "y", "--ridge", "1e-6", "--out", "model.json"], dir);
  stripTarget(dir, "train.csv", "probe.csv", 6);
  cli(["explain", "--model", "model.json", "--data", "probe.csv", "--out", "expected_explain.jsonl"], dir);
  cli(["explain", "--model", "model.json", "--data", "probe.csv", "--normalized",
       "--out", "expected_explain_normalized.jsonl"], dir);

  // two-sample fixtures
  cli(["datagen", "mmd-pair", "--n", "60", "--d", "6", "--seed", "1",
       "--out-x", "mx.csv", "--out-z", "mz.csv"], dir);
  cli(["mmd", "--x", "mx.csv", "--z", "mz.csv", "--out", "expected_mmd.json"], dir);

  // dependence fixtures: target mode and two-block mode
  stripTarget(dir, "train.csv", "hx.csv");
  targetColumn(dir, "train.csv", "hy.csv");
  cli(["hsic", "--x", "hx.csv", "--y", "hy.csv", "--out", "expected_hsic.json"], dir);
  cli(["datagen", "linear", "--n", "40", "--d", "2", "--seed", "21", "--out", "block.csv"], dir);
  stripTarget(dir, "block.csv", "hz.csv");
  cli(["hsic", "--x", "hx.csv", "--z", "hz.csv", "--out", "expected_hsic_biv.jsonl"], dir);

  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  server = spawn("pkex", ["serve", "--port", String(port)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  server.stderr?.resume();
  await waitHealthy(baseUrl, server);

  writeFileSync(RUNTIME_FILE, JSON.stringify({ baseUrl, fixtureDir: dir }));
}

export async function teardown(): Promise<void> {
  if (server && server.exitCode === null) {
    server.kill("SIGTERM");
    await new Promise((r) => setTimeout(r, 300));
    if (server.exitCode === null) server.kill("SIGKILL");
  }
  rmSync(RUNTIME_FILE, { force: true });
  if (fixtureDir) rmSync(fixtureDir, { recursive: true, force: true });
}
