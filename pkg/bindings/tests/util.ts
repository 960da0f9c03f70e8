import { readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { AttributionDoc, Matrix, ModelDoc, Vector } from "../src/types";

const RUNTIME_FILE = join(tmpdir(), "pkexplain-bindings-runtime.json");

export interface Runtime {
  baseUrl: string;
  fixtureDir: string;
}

export function runtime(): Runtime {
  return JSON.parse(readFileSync(RUNTIME_FILE, "utf-8")) as Runtime;
}

export function fixture(name: string): string {
  return readFileSync(join(runtime().fixtureDir, name), "utf-8");
}

/** Parse a CLI-written CSV (header row, float cells) into rows. */
export function csvRows(name: string): Matrix {
  const lines = fixture(name).trim().split("\n");
  return lines.slice(1).map((line) => line.split(",").map(Number));
}

export function csvColumn(name: string): Vector {
  return csvRows(name).map((row) => row[0] as number);
}

export function jsonLines<T>(name: string): T[] {
  return fixture(name)
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line) as T);
}

export function modelFixture(): ModelDoc {
  return JSON.parse(fixture("model.json")) as ModelDoc;
}

export function expectedAttributions(name: string): AttributionDoc[] {
  return jsonLines<AttributionDoc>(name);
}

export const PARITY = 1e-12;

export function maxAbsDiff(a: Vector, b: Vector): number {
  if (a.length !== b.length) return Infinity;
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    worst = Math.max(worst, Math.abs((a[i] as number) - (b[i] as number)));
  }
  return worst;
}
