"""Command-line front end: a thin client of the HTTP service.

Every command marshals its flags into a request model, posts it to the
service, and writes the response to stdout or files. By default the app is
driven in-process (no server needed); pass --server to target a running
instance. Exit codes: 0 ok, 1 usage error, 2 numerical failure, 3
validation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .model import ScenarioFormatError, load_scenario, scenario_from_mapping, scenario_to_mapping
from .quad import QuadratureError
from .schemas import ScenarioSpec
from .sweeps import FIGURE_IDS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3


class _ServiceError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)  # in-process ASGI transport


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    with _make_client(ctx.obj.get("server")) as client:
        response = client.post(path, json=payload)
    if response.status_code >= 400:
        try:
            detail = response.json()
        except ValueError:
            detail = {"detail": response.text}
        message = detail.get("detail", response.text)
        if response.status_code == 500 and detail.get("kind") == "numerical":
            raise _ServiceError(EXIT_NUMERICAL, f"numerical failure: {message}")
        raise _ServiceError(EXIT_USAGE, str(message))
    return response.json()


def _scenario_payload(
    scenario_path: str,
    protocol: str | None,
    mode: str | None,
    snr_db: str | None,
) -> dict:
    doc = scenario_to_mapping(load_scenario(scenario_path))
    if protocol:
        doc["protocol"] = protocol
    if mode:
        doc["mode"] = mode
    if snr_db:
        try:
            values = [float(v) for v in snr_db.split(",")]
        except ValueError:
            raise ScenarioFormatError(f"--snr-db expects comma-separated dB values, got {snr_db!r}")
        hop_count = len({k.split(".")[0] for k in doc if k.startswith("hop")})
        if len(values) != hop_count:
            raise ScenarioFormatError(f"--snr-db needs {hop_count} values, got {len(values)}")
        for i, v in enumerate(values, start=1):
            doc.pop(f"hop{i}.beta", None)
            doc[f"hop{i}.snr_db"] = v
    scenario = scenario_from_mapping(doc)
    return ScenarioSpec.from_scenario(scenario).model_dump()


def _emit(result: dict, out: str | None) -> None:
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; defaults to in-process execution.")
@click.pass_context
def cli(ctx: click.Context, server: str | None) -> None:
    """Relay-link performance limits under transceiver hardware impairments."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


_scenario_options = [
    click.option("--scenario", "scenario_path", required=True, metavar="FILE",
                 help="Scenario file (flat JSON key-value document)."),
    click.option("--protocol", type=click.Choice(["af", "df"]), default=None,
                 help="Override the scenario's protocol."),
    click.option("--mode", type=click.Choice(["fixed", "variable"]), default=None,
                 help="Override the AF gain mode."),
    click.option("--snr-db", default=None, metavar="A,B",
                 help="Override per-hop average SNRs in dB (rescales fading power)."),
]


def _with_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


@cli.command()
@_with_options(_scenario_options)
@click.option("--x-db", type=float, default=None, help="SNDR threshold in dB.")
@click.option("--x-lin", type=float, default=None, help="SNDR threshold, linear.")
@click.option("--evaluator", type=click.Choice(["closed", "quadrature", "mc"]), default="closed")
@click.option("--mc-samples", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, metavar="PATH", help="Write the JSON result to a file.")
@click.pass_context
def outage(ctx, scenario_path, protocol, mode, snr_db, x_db, x_lin, evaluator,
           mc_samples, seed, out):
    """Outage probability of the scenario at one SNDR threshold."""
    payload = {
        "scenario": _scenario_payload(scenario_path, protocol, mode, snr_db),
        "x_db": x_db,
        "x_lin": x_lin,
        "evaluator": evaluator,
        "mc_samples": mc_samples,
        "seed": seed,
    }
    _emit(_post(ctx, "/outage", payload), out)


@cli.command()
@_with_options(_scenario_options)
@click.option("--kind", type=click.Choice(["exact", "upper", "approx", "mc"]), default="exact",
              show_default=True)
@click.option("--prelog", type=float, default=0.5, show_default=True)
@click.option("--mc-samples", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, metavar="PATH")
@click.pass_context
def capacity(ctx, scenario_path, protocol, mode, snr_db, kind, prelog, mc_samples, seed, out):
    """Ergodic capacity (or its bounds) in bits per channel use."""
    payload = {
        "scenario": _scenario_payload(scenario_path, protocol, mode, snr_db),
        "kind": kind,
        "prelog": prelog,
        "mc_samples": mc_samples,
        "seed": seed,
    }
    _emit(_post(ctx, "/capacity", payload), out)


@cli.command()
@click.option("--protocol", type=click.Choice(["af", "df"]), required=True)
@click.option("--kappa1", type=float, required=True)
@click.option("--kappa2", type=float, required=True)
@click.option("--prelog", type=float, default=0.5, show_default=True)
@click.option("--out", default=None, metavar="PATH")
@click.pass_context
def ceilings(ctx, protocol, kappa1, kappa2, prelog, out):
    """High-SNR SNDR and capacity ceilings for given impairment levels."""
    payload = {"protocol": protocol, "kappa1": kappa1, "kappa2": kappa2, "prelog": prelog}
    _emit(_post(ctx, "/ceilings", payload), out)


@cli.command("kappa-necessary")
@click.option("--x-lin", type=float, default=None, help="SNDR threshold, linear.")
@click.option("--x-db", type=float, default=None, help="SNDR threshold in dB.")
@click.option("--rate", type=float, default=None, help="Target rate in bits/channel use.")
@click.option("--out", default=None, metavar="PATH")
@click.pass_context
def kappa_necessary_cmd(ctx, x_lin, x_db, rate, out):
    """Largest impairment level that can possibly support a threshold/rate.

    The condition is necessary only; sufficiency holds asymptotically in SNR.
    """
    if x_db is not None:
        if x_lin is not None or rate is not None:
            raise click.UsageError("give exactly one of --x-lin / --x-db / --rate")
        x_lin = 10.0 ** (x_db / 10.0)
    payload = {"x_lin": x_lin, "rate": rate}
    _emit(_post(ctx, "/design/necessary-kappa", payload), out)


@cli.command()
@click.option("--t-max", type=float, required=True, help="Total hardware cost budget.")
@click.option("--prelog", type=float, default=0.5, show_default=True)
@click.option("--out", default=None, metavar="PATH")
@click.pass_context
def allocation(ctx, t_max, prelog, out):
    """Cost-optimal equal-EVM allocation across the four transceiver chains."""
    _emit(_post(ctx, "/design/allocation", {"t_max": t_max, "prelog": prelog}), out)


@cli.command()
@_with_options(_scenario_options)
@click.option("--sweep", "sweep_def", required=True, metavar="AXIS:START:STOP:STEPS",
              help="Axis is one of snr_db, x_db, kappa, kappa_split.")
@click.option("--evaluators", default="closed", show_default=True, metavar="LIST",
              help="Comma-separated evaluator names.")
@click.option("--x-db", type=float, default=None)
@click.option("--x-lin", type=float, default=None)
@click.option("--kappa-total", type=float, default=None, help="For the kappa_split axis.")
@click.option("--snr-offsets-db", default=None, metavar="A,B",
              help="Per-hop offsets added to the snr_db axis value.")
@click.option("--mc-samples", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, metavar="PATH", help="CSV output path.")
@click.pass_context
def sweep(ctx, scenario_path, protocol, mode, snr_db, sweep_def, evaluators, x_db, x_lin,
          kappa_total, snr_offsets_db, mc_samples, seed, out):
    """Sweep one axis and write one CSV row per (point, evaluator)."""
    parts = sweep_def.split(":")
    if len(parts) != 4:
        raise click.UsageError("--sweep expects AXIS:START:STOP:STEPS")
    axis, start, stop, steps = parts
    try:
        spec = {
            "axis": axis,
            "start": float(start),
            "stop": float(stop),
            "steps": int(steps),
            "scenario": _scenario_payload(scenario_path, protocol, mode, snr_db),
            "evaluators": [e.strip() for e in evaluators.split(",") if e.strip()],
            "x_db": x_db,
            "x_lin": x_lin,
            "kappa_total": kappa_total,
            "snr_offsets_db": (
                [float(v) for v in snr_offsets_db.split(",")] if snr_offsets_db else None
            ),
            "mc_samples": mc_samples,
            "seed": seed,
        }
    except ValueError as exc:
        raise click.UsageError(str(exc))
    result = _post(ctx, "/sweep", spec)
    Path(out).write_bytes(result["csv"].encode("utf-8"))
    click.echo(f"{result['row_count']} rows -> {out}")


@cli.command()
@click.option("--figure", "figure_id", required=True, type=click.Choice(list(FIGURE_IDS)),
              metavar="figN", help="One of fig2..fig7.")
@click.option("--out", "out_dir", required=True, metavar="DIR", help="Output directory.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def figure(ctx, figure_id, out_dir, seed):
    """Produce a preset figure data set (CSV plus .meta sidecar)."""
    result = _post(ctx, f"/figures/{figure_id}", {"seed": seed})
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    for name, content in sorted(result["files"].items()):
        (directory / name).write_bytes(content.encode("utf-8"))
        click.echo(f"wrote {directory / name}")


@cli.command()
@click.option("--validate", "-n", "n_scenarios", type=int, default=200, show_default=True,
              help="Number of randomized scenarios.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mc-samples", type=int, default=1_000_000, show_default=True)
@click.pass_context
def validate(ctx, n_scenarios, seed, mc_samples):
    """Triple-oracle validation: closed forms vs quadrature vs Monte-Carlo."""
    report = _post(ctx, "/validate", {
        "n_scenarios": n_scenarios, "seed": seed, "mc_samples": mc_samples,
    })
    click.echo(f"cases: {report['n_cases']} (saturated: {report['n_saturated']})")
    click.echo(f"max |closed - quadrature|: {report['max_abs_closed_vs_quadrature']:.3e}")
    click.echo(f"max |closed - mc| / SE:    {report['max_mc_distance_se']:.2f}")
    for failure in report["failures"]:
        click.echo(f"FAIL {failure['description']}: closed={failure['closed']:.6g} "
                   f"quadrature={failure['quadrature']} mc={failure['mc']}")
    click.echo("PASS" if report["passed"] else "FAIL")
    if not report["passed"]:
        sys.exit(EXIT_VALIDATION)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return EXIT_OK
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except (ScenarioFormatError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except _ServiceError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except QuadratureError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    except SystemExit as exc:  # raised by the validate command on failure
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
