"""Command line front end.

Exit codes: 0 success, 1 data error (bad or missing flow data), 2 parameter
error (bad flags, config, or solver settings), 3 when --strict is set and
any run failed to converge.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import CurrencyConfig, config_from_mapping, load_config
from .dynamics import TcpState, TradeCoupling, seed_assignment, weight_vectors
from .ensemble import (
    EnsembleSpec,
    group_report,
    run_ensemble,
    score_histogram,
    ternary_coordinates,
)
from .errors import ParameterError, PowerIterationError, TradeDataError
from .flows import flow_statistics, load_trade_flows_csv, years_in_csv
from .reports import (
    build_manifest,
    file_digest,
    input_entry,
    load_manifest,
    summary_dict,
    write_flow_csv,
    write_fractions,
    write_groups,
    write_histogram,
    write_manifest,
    write_per_country_frequency,
    write_sweep_table,
    write_tcp_by_country,
    write_ternary_csv,
    write_trajectory,
)
from .synthetic import synthetic_wtn
from .ternary import render_ternary

EXIT_DATA = 1
EXIT_PARAM = 2
EXIT_NONCONVERGED = 3


def _mapped_exits(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (TradeDataError, FileNotFoundError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(EXIT_DATA)
        except (ParameterError, PowerIterationError) as exc:
            click.echo(f"parameter error: {exc}", err=True)
            sys.exit(EXIT_PARAM)

    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="wtncur")
def main() -> None:
    """Simulate currency-preference dynamics on a bilateral trade network."""


def _resolve_config(config_path: str | None) -> CurrencyConfig:
    if config_path is None:
        return CurrencyConfig()
    try:
        return load_config(config_path)
    except FileNotFoundError:
        raise ParameterError(f"config file not found: {config_path}") from None


def _resolve_year(path: Path, year: int | None) -> int:
    if year is not None:
        return year
    years = years_in_csv(path)
    if len(years) == 1:
        return years[0]
    raise ParameterError(
        f"{path} contains years {years[0]}..{years[-1]}; pass --year"
    )


def _echo_summary(summary: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
        return
    for key in ("n_countries", "n_runs", "master_seed", "convergence_rate", "mean_tau"):
        click.echo(f"{key}={summary[key]:.6g}" if isinstance(summary[key], float) else f"{key}={summary[key]}")
    cols = [
        "count_fraction",
        "count_stderr",
        "group_size",
        "volume_fraction",
        "seed_volume_fraction",
    ]
    click.echo("currency," + ",".join(cols))
    for cur in summary["currencies"]:
        vals = [
            f"{summary['count_fractions'][cur]:.6g}",
            f"{summary['count_stderr'][cur]:.6g}",
            str(summary["group_sizes"][cur]),
            f"{summary['volume_fractions'][cur]:.6g}",
            f"{summary['seed_volume_fractions'][cur]:.6g}",
        ]
        click.echo(f"{cur}," + ",".join(vals))


def _ensemble_pipeline(
    flow_file: Path,
    year: int,
    cfg: CurrencyConfig,
    workers: int,
    backend: str,
):
    """Shared run/ensemble/sweep computation for one year of data."""
    m = load_trade_flows_csv(flow_file, year)
    stats = flow_statistics(m)
    weights = weight_vectors(
        stats,
        mode=cfg.weight_mode,
        damping=cfg.damping,
        tol=cfg.pagerank_tol,
        max_iter=cfg.pagerank_max_iter,
    )
    result = run_ensemble(
        EnsembleSpec.from_config(cfg), cfg, stats, weights=weights,
        workers=workers, backend=backend,
    )
    _, frozen = seed_assignment(stats.index, cfg)
    modal_state = TcpState(
        prefs=result.modal_tcp.copy(), frozen=frozen, n_currencies=cfg.n_currencies
    )
    coupling = TradeCoupling.from_statistics(stats, weights)
    report = group_report(result.modal_tcp, stats, cfg)
    return m, stats, coupling, modal_state, result, report


_common = [
    click.option("--config", "config_path", type=str, default=None, help="TOML config file."),
    click.option("--seed", type=int, default=None, help="Override master_seed."),
    click.option("--runs", type=int, default=None, help="Override n_runs."),
    click.option(
        "--weight-mode",
        type=click.Choice(["direct", "centrality"]),
        default=None,
        help="Override weight_mode.",
    ),
    click.option("--workers", type=int, default=1, show_default=True, help="Worker processes."),
    click.option(
        "--backend",
        type=click.Choice(["auto", "compiled", "pure"]),
        default="auto",
        show_default=True,
        help="Sweep kernel backend.",
    ),
    click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        show_default=True,
        help="Stdout summary format.",
    ),
    click.option("--strict", is_flag=True, help="Exit 3 if any run fails to converge."),
]


def _with_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@main.command()
@click.argument("flow_file", type=click.Path(path_type=Path))
@click.option("--year", type=int, default=None, help="Restrict to one year (default: all).")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
@_mapped_exits
def validate(flow_file: Path, year: int | None, fmt: str) -> None:
    """Check a flow CSV: parse, aggregate, and report network shape."""
    years = [year] if year is not None else years_in_csv(flow_file)
    if not years:
        raise TradeDataError(f"{flow_file}: no data rows")
    entries = []
    for y in years:
        m = load_trade_flows_csv(flow_file, y)
        stats = flow_statistics(m)
        entries.append(
            {
                "year": y,
                "n_countries": m.n,
                "n_flows": int(np.count_nonzero(m.flows)),
                "self_loops_dropped": m.self_loops_dropped,
                "dangling_exporters": sorted(stats.dangling_exporters),
                "dangling_importers": sorted(stats.dangling_importers),
            }
        )
    if fmt == "json":
        click.echo(json.dumps({"file": str(flow_file), "years": entries}, indent=2, sort_keys=True))
    else:
        for e in entries:
            click.echo(
                f"year {e['year']}: N={e['n_countries']} countries, "
                f"M={e['n_flows']} directed flows, "
                f"self-loops dropped: {e['self_loops_dropped']}"
            )
            for label in ("dangling_exporters", "dangling_importers"):
                names = ", ".join(e[label]) if e[label] else "none"
                click.echo(f"  {label.replace('_', ' ')}: {names}")


@main.command()
@click.argument("flow_file", type=click.Path(path_type=Path))
@click.option("--year", type=int, default=None, help="Year to simulate.")
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=Path("wtncur_out"),
    show_default=True,
    help="Output directory.",
)
@click.option(
    "--from-manifest",
    "manifest_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Reproduce a previous run from its manifest (excludes --config).",
)
@_with_options(_common)
@_mapped_exits
def run(
    flow_file: Path,
    year: int | None,
    out_dir: Path,
    manifest_path: Path | None,
    config_path: str | None,
    seed: int | None,
    runs: int | None,
    weight_mode: str | None,
    workers: int,
    backend: str,
    fmt: str,
    strict: bool,
) -> None:
    """Run an ensemble for one year and write the full report file set."""
    if manifest_path is not None:
        if config_path is not None:
            raise ParameterError("pass either --config or --from-manifest, not both")
        manifest_in = load_manifest(manifest_path)
        cfg = config_from_mapping(manifest_in["config"])
        declared = manifest_in["inputs"][0]
        if year is None:
            year = declared.get("year")
        digest = file_digest(flow_file)
        if digest != declared["sha256"]:
            raise TradeDataError(
                f"{flow_file} does not match the manifest input "
                f"(sha256 {digest[:12]}… vs {declared['sha256'][:12]}…)"
            )
    else:
        cfg = _resolve_config(config_path)
    cfg = cfg.with_overrides(master_seed=seed, n_runs=runs, weight_mode=weight_mode)
    year = _resolve_year(flow_file, year)

    m, stats, coupling, modal_state, result, report = _ensemble_pipeline(
        flow_file, year, cfg, workers, backend
    )
    table = ternary_coordinates(coupling, modal_state, cfg.currencies)
    hist = score_histogram(table, cfg.bin_width)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_tcp_by_country(out_dir / "tcp_by_country.csv", table)
    write_fractions(out_dir / "fractions.csv", result, report)
    write_ternary_csv(out_dir / "ternary.csv", table)
    write_histogram(out_dir / "histogram.csv", hist)
    write_groups(out_dir / "groups.csv", report)
    write_trajectory(out_dir / "trajectory.csv", result)
    write_per_country_frequency(out_dir / "per_country_frequency.csv", result)
    outputs = [
        "tcp_by_country.csv",
        "fractions.csv",
        "ternary.csv",
        "histogram.csv",
        "groups.csv",
        "trajectory.csv",
        "per_country_frequency.csv",
    ]
    if cfg.n_currencies == 3:
        (out_dir / "ternary.svg").write_text(render_ternary(table), encoding="utf-8")
        outputs.append("ternary.svg")
    manifest = build_manifest(
        cfg,
        [input_entry(flow_file, year=year)],
        version=__version__,
        backend=backend,
        workers=workers,
        extra={"command": "run", "outputs": sorted(outputs)},
    )
    write_manifest(out_dir / "manifest.json", manifest)

    summary = summary_dict(result, report)
    _echo_summary(summary, fmt)
    click.echo(f"wrote {len(outputs) + 1} files to {out_dir}", err=True)
    if strict and result.converged_runs < result.n_runs:
        click.echo(
            f"{result.n_runs - result.converged_runs} of {result.n_runs} runs "
            f"did not converge within tau_max",
            err=True,
        )
        sys.exit(EXIT_NONCONVERGED)


@main.command()
@click.argument("flow_file", type=click.Path(path_type=Path))
@click.option("--year", type=int, default=None, help="Year to simulate.")
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Optional output directory for summary files.",
)
@_with_options(_common)
@_mapped_exits
def ensemble(
    flow_file: Path,
    year: int | None,
    out_dir: Path | None,
    config_path: str | None,
    seed: int | None,
    runs: int | None,
    weight_mode: str | None,
    workers: int,
    backend: str,
    fmt: str,
    strict: bool,
) -> None:
    """Run an ensemble and print summary statistics only."""
    cfg = _resolve_config(config_path).with_overrides(
        master_seed=seed, n_runs=runs, weight_mode=weight_mode
    )
    year = _resolve_year(flow_file, year)
    m, stats, coupling, modal_state, result, report = _ensemble_pipeline(
        flow_file, year, cfg, workers, backend
    )
    summary = summary_dict(result, report)
    _echo_summary(summary, fmt)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_fractions(out_dir / "fractions.csv", result, report)
        write_per_country_frequency(out_dir / "per_country_frequency.csv", result)
        manifest = build_manifest(
            cfg,
            [input_entry(flow_file, year=year)],
            version=__version__,
            backend=backend,
            workers=workers,
            extra={"command": "ensemble", "outputs": ["fractions.csv", "per_country_frequency.csv"]},
        )
        write_manifest(out_dir / "manifest.json", manifest)
    if strict and result.converged_runs < result.n_runs:
        sys.exit(EXIT_NONCONVERGED)


@main.command()
@click.argument("flow_files", type=click.Path(path_type=Path), nargs=-1, required=True)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=Path("wtncur_out"),
    show_default=True,
    help="Output directory.",
)
@_with_options(_common)
@_mapped_exits
def sweep(
    flow_files: tuple[Path, ...],
    out_dir: Path,
    config_path: str | None,
    seed: int | None,
    runs: int | None,
    weight_mode: str | None,
    workers: int,
    backend: str,
    fmt: str,
    strict: bool,
) -> None:
    """Simulate every year found across the given flow files."""
    cfg = _resolve_config(config_path).with_overrides(
        master_seed=seed, n_runs=runs, weight_mode=weight_mode
    )
    year_to_file: dict[int, Path] = {}
    present: list[Path] = []
    for path in flow_files:
        if not path.exists():
            click.echo(f"warning: {path} not found, skipped", err=True)
            continue
        present.append(path)
        for y in years_in_csv(path):
            if y in year_to_file and year_to_file[y] != path:
                raise ParameterError(
                    f"year {y} appears in both {year_to_file[y]} and {path}"
                )
            year_to_file[y] = path
    if not year_to_file:
        raise TradeDataError("no usable years found in the given files")

    rows = []
    all_converged = True
    for y in sorted(year_to_file):
        m, stats, coupling, modal_state, result, report = _ensemble_pipeline(
            year_to_file[y], y, cfg, workers, backend
        )
        all_converged = all_converged and result.converged_runs == result.n_runs
        rows.append(
            {
                "year": y,
                "count_fractions": list(result.mean_final_fractions),
                "volume_fractions": [
                    report.volume_fraction[cur] for cur in cfg.currencies
                ],
                "seed_volume_fractions": [
                    report.seed_volume_fraction[cur] for cur in cfg.currencies
                ],
                "convergence_rate": result.convergence_rate,
                "mean_tau": result.mean_tau,
            }
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_table(out_dir / "sweep.csv", rows, cfg.currencies)
    manifest = build_manifest(
        cfg,
        [input_entry(p, years=sorted(y for y, f in year_to_file.items() if f == p)) for p in present],
        version=__version__,
        backend=backend,
        workers=workers,
        extra={"command": "sweep", "outputs": ["sweep.csv"]},
    )
    write_manifest(out_dir / "manifest.json", manifest)

    if fmt == "json":
        click.echo(json.dumps({"currencies": list(cfg.currencies), "rows": rows}, indent=2, sort_keys=True))
    else:
        click.echo((out_dir / "sweep.csv").read_text(encoding="utf-8").rstrip("\n"))
    if strict and not all_converged:
        sys.exit(EXIT_NONCONVERGED)


@main.command()
@click.option("--countries", "n_countries", type=int, default=50, show_default=True)
@click.option(
    "--blocks",
    "blocks_spec",
    type=str,
    default="9,2;6,1;3,1",
    show_default=True,
    help="Per-block internal,external intensities, ';'-separated.",
)
@click.option("--seed", type=int, default=12345, show_default=True)
@click.option("--year", type=int, default=2019, show_default=True)
@click.option(
    "--out",
    "out_file",
    type=click.Path(path_type=Path),
    required=True,
    help="Output CSV path.",
)
@_mapped_exits
def synth(n_countries: int, blocks_spec: str, seed: int, year: int, out_file: Path) -> None:
    """Generate a synthetic block-structured flow CSV."""
    try:
        blocks = tuple(
            (float(part.split(",")[0]), float(part.split(",")[1]))
            for part in blocks_spec.split(";")
            if part.strip()
        )
    except (ValueError, IndexError):
        raise ParameterError(
            f"bad --blocks spec {blocks_spec!r}; want 'internal,external;…'"
        ) from None
    m = synthetic_wtn(n_countries, blocks, rng=seed, year=year)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    write_flow_csv(out_file, m)
    click.echo(
        f"wrote {int(np.count_nonzero(m.flows))} flows for {m.n} countries "
        f"({len(blocks)} blocks, year {year}) to {out_file}"
    )


if __name__ == "__main__":
    main()
