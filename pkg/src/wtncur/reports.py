"""CSV / JSON writers for every report file the CLI emits.

All writers are deterministic: fixed column order, index-order rows, and a
shortest-round-trip float format, so byte comparison is a valid regression
test. The manifest is the one file with a timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

from .config import CurrencyConfig
from .ensemble import EnsembleResult, GroupReport, ScoreHistogram, ScoreTable
from .flows import TradeMatrix

TOOL_NAME = "wtncur"


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    return f"{float(v):.12g}"


def write_tcp_by_country(path: Path, table: ScoreTable) -> None:
    """Choropleth-ready table: country, preferred currency, score columns."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["country", "tcp"] + [f"z_{cur}" for cur in table.currencies])
        for pos, code in enumerate(table.index.codes):
            row = [code, table.currencies[int(table.prefs[pos])]]
            row += [_fmt(table.scores.z[pos, k]) for k in range(len(table.currencies))]
            w.writerow(row)


def write_ternary_csv(path: Path, table: ScoreTable) -> None:
    """Raw score coordinates with the defined flag, any number of currencies."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["country", "defined"] + [f"z_{cur}" for cur in table.currencies])
        for pos, code in enumerate(table.index.codes):
            defined = bool(table.scores.defined[pos])
            row = [code, "true" if defined else "false"]
            row += [_fmt(table.scores.z[pos, k]) for k in range(len(table.currencies))]
            w.writerow(row)


def write_fractions(path: Path, result: EnsembleResult, report: GroupReport) -> None:
    """Per-currency summary: ensemble count fractions and volume shares."""
    means = result.mean_final_fractions
    errs = result.stderr_final_fractions
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "currency",
                "count_fraction",
                "count_stderr",
                "group_size",
                "volume_fraction",
                "seed_volume_fraction",
            ]
        )
        sizes = report.sizes()
        for k, cur in enumerate(result.currencies):
            w.writerow(
                [
                    cur,
                    _fmt(means[k]),
                    _fmt(errs[k]),
                    sizes[cur],
                    _fmt(report.volume_fraction[cur]),
                    _fmt(report.seed_volume_fraction[cur]),
                ]
            )


def write_groups(path: Path, report: GroupReport) -> None:
    """Group membership table, one row per country, ranked within its group."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["currency", "rank", "country", "import_ability", "export_ability"])
        for cur in report.currencies:
            for rank, member in enumerate(report.members[cur], start=1):
                w.writerow(
                    [
                        cur,
                        rank,
                        member.code,
                        _fmt(member.import_ability),
                        _fmt(member.export_ability),
                    ]
                )


def write_histogram(path: Path, hist: ScoreHistogram) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["currency", "bin_lo", "bin_hi", "fraction"])
        n_bins = hist.fractions.shape[1]
        for k, cur in enumerate(hist.currencies):
            for b in range(n_bins):
                w.writerow(
                    [cur, _fmt(hist.edges[b]), _fmt(hist.edges[b + 1]), _fmt(hist.fractions[k, b])]
                )


def write_trajectory(path: Path, result: EnsembleResult) -> None:
    """Ensemble-mean currency fractions per sweep (row 0 = initial states)."""
    traj = result.mean_trajectory
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep"] + [f"f_{cur}" for cur in result.currencies])
        for t in range(traj.shape[0]):
            w.writerow([t] + [_fmt(traj[t, k]) for k in range(traj.shape[1])])


def write_per_country_frequency(path: Path, result: EnsembleResult) -> None:
    freq = result.per_country_frequency
    modal = result.modal_tcp
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["country", "modal_tcp"] + [f"freq_{cur}" for cur in result.currencies]
        )
        for pos, code in enumerate(result.index.codes):
            row = [code, result.currencies[int(modal[pos])]]
            row += [_fmt(freq[pos, k]) for k in range(len(result.currencies))]
            w.writerow(row)


def write_sweep_table(
    path: Path,
    rows: Sequence[Mapping[str, Any]],
    currencies: Sequence[str],
) -> None:
    """Stacked per-year fractions: counts, volumes, and seed volumes."""
    header = (
        ["year"]
        + [f"count_{c}" for c in currencies]
        + [f"volume_{c}" for c in currencies]
        + [f"seed_volume_{c}" for c in currencies]
        + ["convergence_rate", "mean_tau"]
    )
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            out = [row["year"]]
            out += [_fmt(v) for v in row["count_fractions"]]
            out += [_fmt(v) for v in row["volume_fractions"]]
            out += [_fmt(v) for v in row["seed_volume_fractions"]]
            out += [_fmt(row["convergence_rate"]), _fmt(row["mean_tau"])]
            w.writerow(out)


def write_flow_csv(path: Path, m: TradeMatrix) -> None:
    """Flow matrix back to record form, positive entries only, sorted rows."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["year", "exporter", "importer", "value_usd"])
        codes = m.index.codes
        for j, exporter in enumerate(codes):
            for i, importer in enumerate(codes):
                v = m.flows[i, j]
                if v > 0:
                    w.writerow([m.year, exporter, importer, _fmt(v)])


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def config_snapshot(cfg: CurrencyConfig) -> dict[str, Any]:
    """Config as the flat mapping config_from_mapping accepts back."""
    snap = asdict(cfg)
    snap["currencies"] = list(cfg.currencies)
    snap["seed_groups"] = {cur: sorted(members) for cur, members in cfg.seed_groups.items()}
    if cfg.init_fractions is None:
        snap.pop("init_fractions")
    else:
        snap["init_fractions"] = list(cfg.init_fractions)
    return snap


def input_entry(path: Path, **fields: Any) -> dict[str, Any]:
    return {"path": str(path), "sha256": file_digest(path), **fields}


def build_manifest(
    cfg: CurrencyConfig,
    inputs: Sequence[Mapping[str, Any]],
    version: str,
    backend: str,
    workers: int,
    extra: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    manifest: dict[str, Any] = {
        "tool": TOOL_NAME,
        "version": version,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "inputs": [dict(entry) for entry in inputs],
        "config": config_snapshot(cfg),
        "execution": {"backend": backend, "workers": workers},
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(path: Path, manifest: Mapping[str, Any]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: Path) -> dict[str, Any]:
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def summary_dict(result: EnsembleResult, report: GroupReport) -> dict[str, Any]:
    """Machine-readable run summary used by the CLI's json output."""
    means = result.mean_final_fractions
    errs = result.stderr_final_fractions
    sizes = report.sizes()
    return {
        "n_countries": result.n_countries,
        "n_runs": result.n_runs,
        "master_seed": result.master_seed,
        "convergence_rate": result.convergence_rate,
        "mean_tau": result.mean_tau,
        "currencies": list(result.currencies),
        "count_fractions": {
            cur: float(means[k]) for k, cur in enumerate(result.currencies)
        },
        "count_stderr": {cur: float(errs[k]) for k, cur in enumerate(result.currencies)},
        "group_sizes": {cur: sizes[cur] for cur in result.currencies},
        "volume_fractions": {
            cur: report.volume_fraction[cur] for cur in result.currencies
        },
        "seed_volume_fractions": {
            cur: report.seed_volume_fraction[cur] for cur in result.currencies
        },
    }
