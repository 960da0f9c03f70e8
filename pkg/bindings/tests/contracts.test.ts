/** Behavioral contracts that do not need CLI fixtures: trivial zero
 * cases, the efficiency identity, error surfacing, determinism. */

import { describe, expect, it } from "vitest";

import {
  PkexServiceError,
  explain,
  fit,
  gen_linear,
  gen_mmd_pair,
  gen_nonlinear,
  health,
  hsic_explain,
  mmd_explain,
} from "../src/index";
import { modelFixture, runtime } from "./util";

const opts = () => ({ baseUrl: runtime().baseUrl });

const sum = (v: number[]) => v.reduce((a, b) => a + b, 0);

describe("service health", () => {
  it("reports ok with a version", async () => {
    const res = await health(opts());
    expect(res.status).toBe("ok");
    expect(res.version).toMatch(/^\d+\.\d+\.\d+$/);
  });
});

describe("explain contracts", () => {
  it("returns empty arrays for an empty batch without calling out", async () => {
    // unroutable port: a network call would reject
    const res = await explain(modelFixture(), [], { baseUrl: "http://127.0.0.1:9" });
    expect(res).toEqual({ phi: [], v_full: [], v_empty: [] });
  });

  it("rejects a wrong column count with the core diagnostic", async () => {
    const err = await explain(modelFixture(), [[1.0, 2.0]], opts()).catch((e) => e);
    expect(err).toBeInstanceOf(PkexServiceError);
    expect((err as PkexServiceError).status).toBe(400);
    expect((err as PkexServiceError).message).toMatch(/expected/);
  });

  it("satisfies the efficiency identity per row", async () => {
    const gen = await gen_linear(25, 4, { ...opts(), seed: 9 });
    const doc = await fit(gen.x, gen.y, { ...opts(), ridge: 1e-6 });
    const res = await explain(doc, gen.x.slice(0, 5), opts());
    res.phi.forEach((row, i) => {
      const gap = (res.v_full[i] as number) - (res.v_empty[i] as number);
      expect(Math.abs(sum(row) - gap)).toBeLessThanOrEqual(1e-8 * Math.max(1, Math.abs(gap)));
    });
  });
});

describe("mmd contracts", () => {
  it("attributes exactly zero when both samples repeat one row", async () => {
    const row = [0.5, -1.25, 2.0];
    const x = Array.from({ length: 15 }, () => [...row]);
    const res = await mmd_explain(x, x, opts());
    expect(Math.abs(res.statistic)).toBeLessThanOrEqual(1e-10);
    for (const p of res.phi) expect(Math.abs(p)).toBeLessThanOrEqual(1e-10);
  });

  it("sums phi to the statistic on distinct samples", async () => {
    const pair = await gen_mmd_pair(50, 6, { ...opts(), seed: 4 });
    const res = await mmd_explain(pair.x, pair.z, opts());
    expect(res.phi).toHaveLength(6);
    expect(Math.abs(sum(res.phi) - res.statistic)).toBeLessThanOrEqual(
      1e-8 * Math.max(1, Math.abs(res.statistic)),
    );
  });
});

describe("hsic contracts", () => {
  it("attributes exactly zero for a constant target", async () => {
    const gen = await gen_linear(18, 3, { ...opts(), seed: 2 });
    const y = gen.x.map(() => [1.0]);
    const res = await hsic_explain(gen.x, y, { ...opts(), target_kernel: "categorical" });
    expect(res.statistic).toBe(0);
    expect(res.phi).toEqual([0, 0, 0]);
  });

  it("sums phi to the statistic in target mode", async () => {
    const gen = await gen_linear(30, 4, { ...opts(), seed: 6 });
    const y = gen.y.map((v) => [v]);
    const res = await hsic_explain(gen.x, y, opts());
    expect(res.statistic).toBeGreaterThan(0);
    expect(Math.abs(sum(res.phi) - res.statistic)).toBeLessThanOrEqual(
      1e-8 * Math.abs(res.statistic),
    );
  });

  it("returns both sides in block mode, sharing the statistic", async () => {
    const gen = await gen_linear(20, 5, { ...opts(), seed: 8 });
    const x = gen.x.map((row) => row.slice(0, 3));
    const z = gen.x.map((row) => row.slice(3));
    const res = await hsic_explain(x, z, { ...opts(), block: true });
    expect(res.phi).toHaveLength(3);
    expect(res.phi_z).toHaveLength(2);
    expect(Math.abs(sum(res.phi) - res.statistic)).toBeLessThanOrEqual(
      1e-8 * Math.max(1e-12, Math.abs(res.statistic)),
    );
    expect(Math.abs(sum(res.phi_z as number[]) - res.statistic)).toBeLessThanOrEqual(
      1e-8 * Math.max(1e-12, Math.abs(res.statistic)),
    );
  });
});

describe("fit contracts", () => {
  it("surfaces numerical failure as a 422 service error", async () => {
    const x = Array.from({ length: 4 }, () => [1.0, 2.0]);
    const err = await fit(x, [1, 1, 1, 1], { ...opts(), ridge: 0 }).catch((e) => e);
    expect(err).toBeInstanceOf(PkexServiceError);
    expect((err as PkexServiceError).status).toBe(422);
  });
});

describe("data generators", () => {
  it("are deterministic given a seed", async () => {
    const a = await gen_nonlinear("poly5", 12, 6, { ...opts(), seed: 11 });
    const b = await gen_nonlinear("poly5", 12, 6, { ...opts(), seed: 11 });
    const c = await gen_nonlinear("poly5", 12, 6, { ...opts(), seed: 12 });
    expect(a).toEqual(b);
    expect(a.x).not.toEqual(c.x);
    expect(a.active).toEqual([0, 1]);
  });

  it("rejects invalid arguments with a 400", async () => {
    const err = await gen_mmd_pair(10, 5, opts()).catch((e) => e);
    expect(err).toBeInstanceOf(PkexServiceError);
    expect((err as PkexServiceError).status).toBe(400);
  });
});
