/** Attribution service client.
 *
 * Exposes batch-level entry points only; per-coalition value queries
 * stay inside the service. All functions accept plain nested number
 * arrays and return the service's numbers unchanged.
 */

import { ClientOptions, post } from "./client";
import {
  AttributionDoc,
  Backend,
  ExplainResult,
  FitOptions,
  GenLinearResult,
  GenMmdPairResult,
  GenNonlinearResult,
  HsicOptions,
  HsicResult,
  Matrix,
  MmdOptions,
  MmdResult,
  ModelDoc,
  Vector,
} from "./types";

export { health, PkexServiceError, resolveBaseUrl } from "./client";
export type { ClientOptions } from "./client";
export * from "./types";

export interface ExplainOptions {
  backend?: Backend;
  normalized?: boolean;
}

/** Shapley attributions for a batch of rows under a fitted model. */
export async function explain(
  model: ModelDoc,
  xBatch: Matrix,
  opts?: ExplainOptions & ClientOptions,
): Promise<ExplainResult> {
  if (xBatch.length === 0) {
    return { phi: [], v_full: [], v_empty: [] };
  }
  const res = await post<{ attributions: AttributionDoc[] }>(
    "/explain",
    {
      model,
      data: xBatch,
      backend: opts?.backend ?? "auto",
      normalized: opts?.normalized ?? false,
    },
    opts,
  );
  return {
    phi: res.attributions.map((a) => a.phi),
    v_full: res.attributions.map((a) => a.v_full),
    v_empty: res.attributions.map((a) => a.v_empty),
  };
}

/** Per-feature attribution of the squared-MMD estimate between x and z. */
export async function mmd_explain(
  x: Matrix,
  z: Matrix,
  opts?: MmdOptions & ClientOptions,
): Promise<MmdResult> {
  const res = await post<AttributionDoc>(
    "/mmd",
    {
      x,
      z,
      bandwidths: opts?.bandwidths ?? "median",
      kind: opts?.kind ?? "rbf",
      backend: opts?.backend ?? "stable",
      seed: opts?.seed ?? 0,
    },
    opts,
  );
  return { statistic: res.v_full, phi: res.phi };
}

/** Per-feature attribution of the HSIC estimate between x and a target
 * (default) or a second feature block (opts.block). */
export async function hsic_explain(
  x: Matrix,
  yOrZ: Matrix,
  opts?: HsicOptions & ClientOptions,
): Promise<HsicResult> {
  const body = {
    x,
    [opts?.block ? "z" : "y"]: yOrZ,
    target_kernel: opts?.target_kernel ?? "rbf",
    backend: opts?.backend ?? "stable",
  };
  const res = await post<{
    x_attribution: AttributionDoc;
    z_attribution?: AttributionDoc;
  }>("/hsic", body, opts);
  const out: HsicResult = {
    statistic: res.x_attribution.v_full,
    phi: res.x_attribution.phi,
  };
  if (res.z_attribution) out.phi_z = res.z_attribution.phi;
  return out;
}

/** Kernel ridge fit; the returned document feeds explain() directly. */
export async function fit(
  x: Matrix,
  y: Vector,
  opts?: FitOptions & ClientOptions,
): Promise<ModelDoc> {
  return post<ModelDoc>(
    "/fit",
    {
      x,
      y,
      kind: opts?.kind ?? "rbf",
      bandwidths: opts?.bandwidths ?? "median",
      bandwidth_scale: opts?.bandwidth_scale ?? 1.0,
      ridge: opts?.ridge ?? 1e-8,
    },
    opts,
  );
}

export async function gen_linear(
  n: number,
  d: number,
  opts?: { noise_sigma?: number; seed?: number } & ClientOptions,
): Promise<GenLinearResult> {
  return post<GenLinearResult>(
    "/datagen/linear",
    { n, d, noise_sigma: opts?.noise_sigma ?? 0.1, seed: opts?.seed ?? 0 },
    opts,
  );
}

export async function gen_nonlinear(
  task: "poly5" | "poly10" | "sqexp",
  n: number,
  d: number,
  opts?: { seed?: number } & ClientOptions,
): Promise<GenNonlinearResult> {
  return post<GenNonlinearResult>(
    "/datagen/nonlinear",
    { task, n, d, seed: opts?.seed ?? 0 },
    opts,
  );
}

export async function gen_mmd_pair(
  n: number,
  d: number,
  opts?: { dof?: number; seed?: number } & ClientOptions,
): Promise<GenMmdPairResult> {
  return post<GenMmdPairResult>(
    "/datagen/mmd-pair",
    { n, d, dof: opts?.dof ?? 3.0, seed: opts?.seed ?? 0 },
    opts,
  );
}
