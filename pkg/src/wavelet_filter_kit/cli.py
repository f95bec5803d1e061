from __future__ import annotations

import json
import math
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import typer

from .config import WaveletKitConfig
from .errors import (
    DimensionError,
    FormatError,
    InvariantError,
    VerificationError,
    WaveletKitError,
)
from .filters import box_to_params, sample_box, wavelet_eval
from .harness import verify_parameters, verify_realization
from .logging_utils import trace_command
from .realization import eval_realization, mcmillan_degree, realize_wavelet
from .reporting import write_report
from .storage import (
    detect_kind,
    load_box,
    load_params,
    load_realization,
    read_signal,
    save_filters,
    save_params,
    save_realization,
    write_evaluations,
    write_signal,
)
from .subband import (
    SubbandSet,
    analyze,
    reconstruction_error,
    subband_filters,
    synthesize,
)

app = typer.Typer(help="Wavelet filter kit: generate, realize, verify and apply N-band filters.")

ConfigOption = typer.Option(None, "--config", help="TOML configuration file.")
SeedOption = typer.Option(None, "--seed", envvar="WFK_SEED", min=0, help="Random seed.")


def _fail(message: str, code: int = 1) -> None:
    typer.echo(f"Error: {message}")
    raise SystemExit(code)


def _load_config(path: str | None) -> WaveletKitConfig:
    try:
        return WaveletKitConfig.load(path)
    except FileNotFoundError:
        _fail(f"config file '{path}' not found", FormatError.exit_code)
    except ValueError as exc:
        _fail(f"invalid config '{path}': {exc}", FormatError.exit_code)


@contextmanager
def _command(name: str, cfg: WaveletKitConfig, **fields) -> Iterator[dict]:
    record = dict(fields)
    try:
        yield record
    except WaveletKitError as exc:
        trace_command(cfg.logging.trace_path, name, "error", error=str(exc), **record)
        _fail(str(exc), exc.exit_code)
    except FileNotFoundError as exc:
        trace_command(cfg.logging.trace_path, name, "error", error=str(exc), **record)
        _fail(f"file not found: {exc.filename}", FormatError.exit_code)
    else:
        trace_command(cfg.logging.trace_path, name, record.pop("outcome", "ok"), **record)


def _load_any(path: str):
    kind = detect_kind(path)
    if kind == "parameters":
        params = load_params(path)
        return (lambda z: wavelet_eval(params, z)), kind
    realization = load_realization(path)
    return (lambda z: eval_realization(realization, z)), kind


def _parse_point(text: str) -> complex:
    try:
        re_part, im_part = (float(part) for part in text.split(","))
    except ValueError:
        _fail(f"--z expects 're,im', got '{text}'", DimensionError.exit_code)
    return complex(re_part, im_part)


@app.command("gen")
def gen(
    n: int = typer.Option(..., "--n", min=2, help="Number of bands N."),
    index: int = typer.Option(..., "--index", min=0, help="Number of unitary factors m."),
    rho: float = typer.Option(0.0, "--rho", min=0.0, max=1.0, help="Bound on |alpha|."),
    seed: int | None = SeedOption,
    box: str | None = typer.Option(None, "--box", help="JSON file with box coordinates."),
    out: str = typer.Option(..., "-o", "--out", help="Parameter file to write."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    seed = cfg.seed if seed is None else seed
    with _command("gen", cfg, n=n, index=index, rho=rho) as record:
        if box is None:
            point = sample_box(seed, n, index, rho, cfg.sampling.max_alpha)
            params = box_to_params(point, n, index, rho)
            record["seed"] = seed
        else:
            record["box"] = box
            try:
                point = load_box(box, n, index)
                params = box_to_params(point, n, index, rho)
            except (DimensionError, InvariantError) as exc:
                raise FormatError(f"--box {box}: {exc}") from exc
        save_params(out, params, box=point, seed=seed if box is None else None)
        record["out"] = out
    typer.echo(f"Wrote N={n}, m={index} parameters to {out}")


@app.command("realize")
def realize(
    params_path: str = typer.Argument(..., help="Parameter file."),
    out: str = typer.Option(..., "-o", "--out", help="Realization file to write."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    with _command("realize", cfg, source=params_path) as record:
        params = load_params(params_path)
        realization = realize_wavelet(params)
        save_realization(out, realization)
        record.update(state_dim=realization.state_dim, degree=mcmillan_degree(params), out=out)
    typer.echo(f"Wrote realization with state dimension {realization.state_dim} to {out}")


@app.command("verify")
def verify(
    path: str = typer.Argument(..., help="Parameter or realization file."),
    points: int | None = typer.Option(None, "--points", min=1, help="Circle samples per check."),
    tol: float | None = typer.Option(None, "--tol", min=0.0, help="Residual tolerance."),
    seed: int | None = SeedOption,
    out: str | None = typer.Option(None, "--out", help="JSON report path (Markdown beside it)."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    if points is not None:
        cfg.verification.points = points
    if tol is not None:
        cfg.verification.tolerance = tol
    seed = cfg.seed if seed is None else seed
    fields = {"source": path, "seed": seed, "points": cfg.verification.points}
    with _command("verify", cfg, **fields) as record:
        if detect_kind(path) == "parameters":
            report = verify_parameters(load_params(path), cfg, seed, source=path)
        else:
            report = verify_realization(load_realization(path), cfg, seed, source=path)
        if out is not None:
            write_report(out, report)
        record.update(
            outcome="pass" if report.passed else "fail",
            residuals={check.name: check.residual for check in report.checks},
        )
    for check in report.checks:
        verdict = "pass" if check.passed else "FAIL"
        typer.echo(
            f"{check.name}: {verdict} (residual {check.residual:.3e}, tol {check.tolerance:g})"
        )
    if not report.passed:
        _fail(f"failed checks: {', '.join(report.failed())}", VerificationError.exit_code)


@app.command("eval")
def eval_cmd(
    path: str = typer.Argument(..., help="Parameter or realization file."),
    z: str | None = typer.Option(None, "--z", help="Evaluation point as 're,im'."),
    circle: int | None = typer.Option(None, "--circle", min=1, help="Roots of unity to sample."),
    out: str | None = typer.Option(None, "-o", "--out", help="CSV file to write."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    if (z is None) == (circle is None):
        _fail("give exactly one of --z or --circle", DimensionError.exit_code)
    points = (
        [_parse_point(z)]
        if z is not None
        else [complex(np.exp(2j * math.pi * k / circle)) for k in range(circle)]
    )
    with _command("eval", cfg, source=path, points=len(points)) as record:
        eval_fn, kind = _load_any(path)
        rows = [(point, eval_fn(point)) for point in points]
        record["kind"] = kind
    if out is None:
        for point, value in rows:
            cells = [point.real, point.imag]
            for entry in value.ravel():
                cells.extend([entry.real, entry.imag])
            typer.echo(",".join(repr(float(cell)) for cell in cells))
    else:
        write_evaluations(out, rows)
        typer.echo(f"Wrote {len(rows)} evaluations to {out}")


@app.command("analyze")
def analyze_cmd(
    params_path: str = typer.Argument(..., help="FIR parameter file."),
    signal: str = typer.Option(..., "--signal", help="Signal CSV, one 're,im' per line."),
    out: str = typer.Option(..., "--out", help="Directory for band_k.csv files."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    with _command("analyze", cfg, source=params_path, signal=signal) as record:
        params = load_params(params_path)
        x = read_signal(signal)
        filters = subband_filters(params)
        bands = analyze(x, filters, params.n)
        root = Path(out)
        save_filters(root / "filters.json", filters)
        for k, band in enumerate(bands.bands):
            write_signal(root / f"band_{k}.csv", band)
        record.update(n=params.n, length=int(x.size), out=out)
    typer.echo(f"Wrote {bands.n} bands of length {bands.band_length} to {out}")


@app.command("synthesize")
def synthesize_cmd(
    params_path: str = typer.Argument(..., help="FIR parameter file."),
    bands: str = typer.Option(..., "--bands", help="Directory holding band_k.csv files."),
    out: str = typer.Option(..., "--out", help="Reconstructed signal CSV."),
    signal: str | None = typer.Option(None, "--signal", help="Reference signal CSV."),
    config_path: str | None = ConfigOption,
) -> None:
    cfg = _load_config(config_path)
    with _command("synthesize", cfg, source=params_path, bands=bands) as record:
        params = load_params(params_path)
        filters = subband_filters(params)
        band_set = SubbandSet(
            bands=tuple(read_signal(Path(bands) / f"band_{k}.csv") for k in range(params.n))
        )
        x_hat = synthesize(band_set, filters, params.n)
        write_signal(out, x_hat)
        sidecar = {"n": params.n, "delay": filters.delay, "length": int(x_hat.size), "error": None}
        if signal is not None:
            reference = read_signal(signal)
            if reference.size != x_hat.size:
                raise DimensionError(
                    f"reference has {reference.size} samples, reconstruction {x_hat.size}"
                )
            error = reconstruction_error(reference, x_hat, filters.delay)
            scale = float(np.linalg.norm(reference))
            sidecar["error"] = error
            sidecar["relative_error"] = error / scale if scale > 0 else error
        Path(out).with_suffix(".json").write_text(
            json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
        )
        record.update(delay=filters.delay, error=sidecar["error"], out=out)
    typer.echo(f"Wrote reconstruction (delay {filters.delay}) to {out}")


if __name__ == "__main__":
    app()
