/** Minimal HTTP transport for the attribution service.
 *
 * The client adds no numerics: every number it returns came verbatim
 * from the service, which shares its handler layer with the CLI.
 */

export interface ClientOptions {
  /** Service root, default PKEX_SERVICE_URL or http://127.0.0.1:8000 */
  baseUrl?: string;
}

/** Service-side rejection: carries the HTTP status and the core's
 * diagnostic text. 400 marks invalid input, 422 numerical failure. */
export class PkexServiceError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "PkexServiceError";
    this.status = status;
  }
}

export function resolveBaseUrl(opts?: ClientOptions): string {
  const url =
    opts?.baseUrl ?? process.env.PKEX_SERVICE_URL ?? "http://127.0.0.1:8000";
  return url.replace(/\/+$/, "");
}

export async function post<T>(
  path: string,
  body: unknown,
  opts?: ClientOptions,
): Promise<T> {
  const res = await fetch(`${resolveBaseUrl(opts)}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const payload = (await res.json()) as { detail?: unknown };
      if (payload.detail !== undefined) detail = JSON.stringify(payload.detail);
      if (typeof payload.detail === "string") detail = payload.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new PkexServiceError(res.status, detail);
  }
  return (await res.json()) as T;
}

export async function health(
  opts?: ClientOptions,
): Promise<{ status: string; version: string }> {
  const res = await fetch(`${resolveBaseUrl(opts)}/healthz`);
  if (!res.ok) throw new PkexServiceError(res.status, res.statusText);
  return (await res.json()) as { status: string; version: string };
}
