/** Cross-interface parity: the client, talking HTTP, must reproduce
 * the CLI's numbers on the same inputs to 1e-12 (they share one
 * handler layer, so the match is expected to be bit-exact).
 */

import { describe, expect, it } from "vitest";

import {
  AttributionDoc,
  explain,
  fit,
  hsic_explain,
  mmd_explain,
} from "../src/index";
import {
  PARITY,
  csvColumn,
  csvRows,
  expectedAttributions,
  fixture,
  maxAbsDiff,
  modelFixture,
  runtime,
} from "./util";

const opts = () => ({ baseUrl: runtime().baseUrl });

describe("explain parity with the CLI", () => {
  it("matches phi, v_full and v_empty on the probe batch", async () => {
    const expected = expectedAttributions("expected_explain.jsonl");
    const res = await explain(modelFixture(), csvRows("probe.csv"), opts());
    expect(res.phi).toHaveLength(expected.length);
    expected.forEach((want, i) => {
      expect(maxAbsDiff(res.phi[i] as number[], want.phi)).toBeLessThanOrEqual(PARITY);
      expect(Math.abs((res.v_full[i] as number) - want.v_full)).toBeLessThanOrEqual(PARITY);
      expect(Math.abs((res.v_empty[i] as number) - want.v_empty)).toBeLessThanOrEqual(PARITY);
    });
  });

  it("matches the normalized variant", async () => {
    const expected = expectedAttributions("expected_explain_normalized.jsonl");
    const res = await explain(modelFixture(), csvRows("probe.csv"), {
      ...opts(),
      normalized: true,
    });
    expected.forEach((want, i) => {
      expect(maxAbsDiff(res.phi[i] as number[], want.phi)).toBeLessThanOrEqual(PARITY);
    });
  });
});

describe("mmd parity with the CLI", () => {
  it("matches statistic and phi on the fixture pair", async () => {
    const want = JSON.parse(fixture("expected_mmd.json")) as AttributionDoc;
    const res = await mmd_explain(csvRows("mx.csv"), csvRows("mz.csv"), opts());
    expect(Math.abs(res.statistic - want.v_full)).toBeLessThanOrEqual(PARITY);
    expect(maxAbsDiff(res.phi, want.phi)).toBeLessThanOrEqual(PARITY);
  });
});

describe("hsic parity with the CLI", () => {
  it("matches the target form", async () => {
    const want = JSON.parse(fixture("expected_hsic.json")) as AttributionDoc;
    const y = csvColumn("hy.csv").map((v) => [v]);
    const res = await hsic_explain(csvRows("hx.csv"), y, opts());
    expect(Math.abs(res.statistic - want.v_full)).toBeLessThanOrEqual(PARITY);
    expect(maxAbsDiff(res.phi, want.phi)).toBeLessThanOrEqual(PARITY);
    expect(res.phi_z).toBeUndefined();
  });

  it("matches both sides of the two-block form", async () => {
    const lines = fixture("expected_hsic_biv.jsonl").trim().split("\n");
    const wantX = JSON.parse(lines[0] as string) as AttributionDoc;
    const wantZ = JSON.parse(lines[1] as string) as AttributionDoc;
    const res = await hsic_explain(csvRows("hx.csv"), csvRows("hz.csv"), {
      ...opts(),
      block: true,
    });
    expect(maxAbsDiff(res.phi, wantX.phi)).toBeLessThanOrEqual(PARITY);
    expect(maxAbsDiff(res.phi_z ?? [], wantZ.phi)).toBeLessThanOrEqual(PARITY);
    expect(Math.abs(res.statistic - wantX.v_full)).toBeLessThanOrEqual(PARITY);
  });
});

describe("fit parity with the CLI", () => {
  it("reproduces the serialized model from the same training data", async () => {
    const want = modelFixture();
    const rows = csvRows("train.csv");
    const doc = await fit(
      rows.map((r) => r.slice(0, -1)),
      rows.map((r) => r[r.length - 1] as number),
      { ...opts(), ridge: 1e-6 },
    );
    expect(doc.schema_version).toBe(want.schema_version);
    expect(maxAbsDiff(doc.alpha, want.alpha)).toBeLessThanOrEqual(PARITY);
    expect(doc.bias).toBe(want.bias);
    doc.kernel.features.forEach((f, j) => {
      expect(f.kind).toBe(want.kernel.features[j]?.kind);
      expect(
        Math.abs(f.bandwidth - (want.kernel.features[j]?.bandwidth as number)),
      ).toBeLessThanOrEqual(PARITY);
    });
  });

  it("feeds explain directly and stays on the CLI numbers", async () => {
    const rows = csvRows("train.csv");
    const doc = await fit(
      rows.map((r) => r.slice(0, -1)),
      rows.map((r) => r[r.length - 1] as number),
      { ...opts(), ridge: 1e-6 },
    );
    const expected = expectedAttributions("expected_explain.jsonl");
    const res = await explain(doc, csvRows("probe.csv"), opts());
    expected.forEach((want, i) => {
      expect(maxAbsDiff(res.phi[i] as number[], want.phi)).toBeLessThanOrEqual(PARITY);
    });
  });
});
