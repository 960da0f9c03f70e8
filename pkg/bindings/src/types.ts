/** Wire types mirroring the service's request/response documents. */

export type Matrix = number[][];
export type Vector = number[];

export type KernelKind = "rbf" | "laplacian_rbf" | "cauchy" | "categorical";
export type Backend = "auto" | "stable" | "newton";
export type ExactBackend = "stable" | "newton";

export interface KernelFeature {
  kind: KernelKind;
  bandwidth: number;
}

export interface KernelSpecDoc {
  features: KernelFeature[];
}

/** Same schema as the model JSON files written by the CLI. */
export interface ModelDoc {
  schema_version: number;
  kernel: KernelSpecDoc;
  alpha: Vector;
  bias: number;
  train_X: Matrix;
}

export interface AttributionDoc {
  phi: Vector;
  v_full: number;
  v_empty: number;
  method: string;
}

/** Batch attribution result: one row of phi per explained input row. */
export interface ExplainResult {
  phi: Matrix;
  v_full: Vector;
  v_empty: Vector;
}

export interface MmdResult {
  statistic: number;
  phi: Vector;
}

export interface HsicResult {
  statistic: number;
  phi: Vector;
  /** Present only for the two-block (bivariate) form. */
  phi_z?: Vector;
}

export interface MmdOptions {
  bandwidths?: "median" | Vector;
  kind?: KernelKind;
  backend?: ExactBackend;
  seed?: number;
}

export interface HsicOptions {
  /** Treat the second argument as a feature block instead of a target. */
  block?: boolean;
  target_kernel?: "rbf" | "categorical";
  backend?: ExactBackend;
}

export interface FitOptions {
  kind?: KernelKind;
  bandwidths?: "median" | Vector;
  bandwidth_scale?: number;
  ridge?: number;
}

export interface GenLinearResult {
  x: Matrix;
  y: Vector;
  coefficients: Vector;
}

export interface GenNonlinearResult {
  x: Matrix;
  y: Vector;
  active: number[];
}

export interface GenMmdPairResult {
  x: Matrix;
  z: Matrix;
}
