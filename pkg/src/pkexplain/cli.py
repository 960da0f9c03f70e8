"""Command-line front end.

Commands print machine-readable payloads (JSON lines or CSV) to
standard output; diagnostics go to standard error. Exit codes: 0
success, 2 invalid input or usage, 3 numerical failure.

Core modules are imported inside the command bodies so that --threads
(or PKEX_THREADS) can cap the BLAS pools before numpy starts them.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

ORACLE_CHECK_TOLERANCE = 1e-7


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        from .errors import PkexError

        try:
            return fn(*args, **kwargs)
        except PkexError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_bandwidth(value: str):
    if value == "median":
        return "median"
    try:
        return [float(tok) for tok in value.replace(",", " ").split()]
    except ValueError:
        raise click.UsageError(
            f"--bandwidth must be 'median' or a comma-separated float list, got {value!r}"
        ) from None


@click.group()
@click.version_option()
@click.option(
    "--threads",
    type=int,
    envvar="PKEX_THREADS",
    default=None,
    help="Cap BLAS/OpenMP thread pools (default: all cores).",
)
def main(threads):
    """Exact Shapley attributions for product-kernel predictors, MMD and HSIC."""
    if threads is not None:
        if threads < 1:
            raise click.UsageError(f"--threads must be >= 1, got {threads}")
        for var in _THREAD_VARS:
            os.environ[var] = str(threads)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(), help="Model JSON file.")
@click.option("--data", "data_path", required=True, type=click.Path(), help="CSV of rows to explain.")
@click.option("--backend", type=click.Choice(["auto", "stable", "newton"]), default="auto")
@click.option("--normalized", is_flag=True, help="Report per-feature shares of the normalized game.")
@click.option("--out", type=click.Path(), default=None, help="Write JSON lines here instead of stdout.")
@_handle_errors
def explain(model_path, data_path, backend, normalized, out):
    """Attribute model predictions; one JSON object per data row."""
    from .model_io import load_model, load_table
    from .service.handlers import explain_rows

    model = load_model(model_path)
    X, _, _ = load_table(data_path)
    docs = explain_rows(model, X, backend=backend, normalized=normalized)
    _emit([json.dumps(doc.model_dump()) for doc in docs], out)


@main.command()
@click.option("--x", "x_path", required=True, type=click.Path(), help="CSV sample X.")
@click.option("--z", "z_path", required=True, type=click.Path(), help="CSV sample Z.")
@click.option("--bandwidth", default="median", help="'median' or comma-separated per-feature widths.")
@click.option("--kind", type=click.Choice(["rbf", "laplacian_rbf", "cauchy"]), default="rbf")
@click.option("--backend", type=click.Choice(["stable", "newton"]), default="stable")
@click.option("--seed", type=int, default=0, help="Seed for the median-heuristic subsample.")
@click.option("--out", type=click.Path(), default=None)
@_handle_errors
def mmd(x_path, z_path, bandwidth, kind, backend, seed, out):
    """Attribute the squared MMD between two samples across features."""
    from .model_io import load_table
    from .service import schemas
    from .service.handlers import mmd as mmd_handler

    X, _, _ = load_table(x_path)
    Z, _, _ = load_table(z_path)
    req = schemas.MmdRequest(
        x=X.tolist(),
        z=Z.tolist(),
        bandwidths=_parse_bandwidth(bandwidth),
        kind=kind,
        backend=backend,
        seed=seed,
    )
    _emit([json.dumps(mmd_handler(req).model_dump())], out)


@main.command()
@click.option("--x", "x_path", required=True, type=click.Path(), help="CSV feature sample.")
@click.option("--y", "y_path", type=click.Path(), default=None, help="CSV target column(s).")
@click.option("--z", "z_path", type=click.Path(), default=None, help="CSV second block (bivariate mode).")
@click.option("--target-kernel", type=click.Choice(["rbf", "categorical"]), default="rbf")
@click.option("--backend", type=click.Choice(["stable", "newton"]), default="stable")
@click.option("--out", type=click.Path(), default=None)
@_handle_errors
def hsic(x_path, y_path, z_path, target_kernel, backend, out):
    """Attribute HSIC dependence; bivariate mode emits both sides."""
    from .model_io import load_table
    from .service import schemas
    from .service.handlers import hsic as hsic_handler

    X, _, _ = load_table(x_path)
    req = schemas.HsicRequest(
        x=X.tolist(),
        y=load_table(y_path)[0].tolist() if y_path else None,
        z=load_table(z_path)[0].tolist() if z_path else None,
        target_kernel=target_kernel,
        backend=backend,
    )
    res = hsic_handler(req)
    lines = [json.dumps(res.x_attribution.model_dump())]
    if res.z_attribution is not None:
        lines.append(json.dumps(res.z_attribution.model_dump()))
    _emit(lines, out)


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(), help="Training CSV.")
@click.option("--target", required=True, help="Name of the target column.")
@click.option("--kind", type=click.Choice(["rbf", "laplacian_rbf", "cauchy", "categorical"]), default="rbf")
@click.option("--bandwidth", default="median", help="'median' or comma-separated per-feature widths.")
@click.option("--bandwidth-scale", type=float, default=1.0, help="Multiplier on the chosen widths.")
@click.option("--ridge", type=float, default=1e-8)
@click.option("--out", required=True, type=click.Path(), help="Where to write the model JSON.")
@_handle_errors
def fit(data_path, target, kind, bandwidth, bandwidth_scale, ridge, out):
    """Fit a kernel ridge model and save it as model JSON."""
    from .model_io import load_table, save_model
    from .service import schemas
    from .service.handlers import fit as fit_handler, model_from_doc

    X, y, _ = load_table(data_path, target_column=target)
    req = schemas.FitRequest(
        x=X.tolist(),
        y=y.tolist(),
        kind=kind,
        bandwidths=_parse_bandwidth(bandwidth),
        bandwidth_scale=bandwidth_scale,
        ridge=ridge,
    )
    doc = fit_handler(req)
    save_model(model_from_doc(doc), out)
    click.echo(json.dumps({"model": out, "n": X.shape[0], "d": X.shape[1]}))


@main.command()
@click.option("--d", "ds", multiple=True, type=int, default=(10, 20, 30, 50), show_default=True)
@click.option(
    "--coalitions", multiple=True, type=int, default=(200, 1_000, 10_000), show_default=True
)
@click.option("--instances", type=int, default=20, show_default=True)
@click.option("--n-train", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None, help="CSV destination (default stdout).")
@_handle_errors
def benchmark(ds, coalitions, instances, n_train, seed, out):
    """Sweep sampled-regression error across d and coalition counts."""
    from .benchmark import run_benchmark, write_benchmark_csv

    rows = run_benchmark(
        ds=ds,
        coalition_counts=coalitions,
        instances=instances,
        n_train=n_train,
        seed=seed,
    )
    write_benchmark_csv(rows, sys.stdout if out is None else out)


@main.command("oracle-check")
@click.option("--max-d", type=int, default=6, show_default=True)
@click.option("--trials", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0)
@_handle_errors
def oracle_check(max_d, trials, seed):
    """Cross-check every exact explainer against brute force; exit 1
    if any deviation exceeds the tolerance."""
    from .benchmark import oracle_cross_check

    worst = oracle_cross_check(ds=tuple(range(2, max_d + 1)), trials=trials, seed=seed)
    payload = dict(worst)
    payload["tolerance"] = ORACLE_CHECK_TOLERANCE
    click.echo(json.dumps(payload))
    if max(worst.values()) > ORACLE_CHECK_TOLERANCE:
        click.echo("error: oracle deviation above tolerance", err=True)
        sys.exit(1)


@main.group()
def datagen():
    """Write seeded synthetic datasets as CSV."""


def _write_xy_csv(path, X, y):
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(X.shape[1])] + ["y"])
        for row, target in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(target))])


def _write_x_csv(path, X):
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(X.shape[1])])
        for row in X:
            writer.writerow([repr(float(v)) for v in row])


@datagen.command("linear")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--noise-sigma", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", required=True, type=click.Path(), help="CSV with features and a y column.")
@_handle_errors
def datagen_linear(n, d, noise_sigma, seed, out):
    """Linear response with Gaussian noise."""
    from .datagen import gen_linear

    X, y, w = gen_linear(n, d, noise_sigma, seed)
    _write_xy_csv(out, X, y)
    click.echo(json.dumps({"out": out, "n": n, "d": d, "coefficients": w.tolist()}))


@datagen.command("nonlinear")
@click.option("--task", type=click.Choice(["poly5", "poly10", "sqexp"]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", required=True, type=click.Path(), help="CSV with features and a y column.")
@_handle_errors
def datagen_nonlinear(task, n, d, seed, out):
    """Response driven by the first third of the features."""
    from .datagen import gen_nonlinear

    X, y, active = gen_nonlinear(task, n, d, seed)
    _write_xy_csv(out, X, y)
    click.echo(json.dumps({"out": out, "n": n, "d": d, "active": [int(j) for j in active]}))


@datagen.command("mmd-pair")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, default=20, show_default=True)
@click.option("--dof", type=float, default=3.0, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--out-x", required=True, type=click.Path())
@click.option("--out-z", required=True, type=click.Path())
@_handle_errors
def datagen_mmd_pair(n, d, dof, seed, out_x, out_z):
    """Two samples agreeing on the first half of the features."""
    from .datagen import gen_mmd_pair

    X, Z = gen_mmd_pair(n, d, dof, seed)
    _write_x_csv(out_x, X)
    _write_x_csv(out_z, Z)
    click.echo(json.dumps({"out_x": out_x, "out_z": out_z, "n": n, "d": d}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
