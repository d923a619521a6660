"""Bilateral flow ingestion, the money matrix, and derived share statistics.

Matrix orientation: ``flows[c, cp]`` is the money value exported by country
``cp`` to country ``c`` (row = importer, column = exporter). Row sums are
total imports, column sums total exports.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .countries import CountryIndex, check_code
from .errors import TradeDataError


class FlowRecord(NamedTuple):
    year: int
    exporter: str
    importer: str
    value: float
    line: int | None = None  # source line, for error messages

    @property
    def location(self) -> str:
        return f"line {self.line}" if self.line is not None else "record"


@dataclass(frozen=True)
class TradeMatrix:
    """One year of aggregated bilateral money flows over a country index."""

    year: int
    index: CountryIndex
    flows: np.ndarray
    self_loops_dropped: int = 0

    def __post_init__(self) -> None:
        n = len(self.index)
        if self.flows.shape != (n, n):
            raise TradeDataError(
                f"flow matrix shape {self.flows.shape} does not match index size {n}"
            )
        if np.any(self.flows < 0):
            raise TradeDataError("flow matrix has negative entries")
        if np.any(np.diagonal(self.flows) != 0):
            raise TradeDataError("flow matrix has nonzero diagonal entries")
        if not np.any(self.flows > 0):
            raise TradeDataError("flow matrix has no positive entries")
        self.flows.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.index)


@dataclass(frozen=True)
class FlowStatistics:
    """Share matrices and trade-ability vectors derived from one TradeMatrix.

    ``import_share[c, cp]`` is the fraction of cp's total exports that go to c;
    ``export_share[c, cp]`` is the fraction of cp's total imports that come
    from c. Both are column-stochastic except for all-zero (dangling) columns.
    ``import_ability`` and ``export_ability`` are the per-country shares of the
    total traded volume.
    """

    index: CountryIndex
    import_share: np.ndarray
    export_share: np.ndarray
    import_ability: np.ndarray
    export_ability: np.ndarray
    total_volume: float
    dangling_exporters: frozenset[str]
    dangling_importers: frozenset[str]

    def __post_init__(self) -> None:
        for arr in (
            self.import_share,
            self.export_share,
            self.import_ability,
            self.export_ability,
        ):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.index)


def read_flow_csv(path: str | Path) -> Iterator[FlowRecord]:
    """Yield validated flow records from a CSV file.

    Expected header: ``year,exporter,importer,value_usd``. Raises
    TradeDataError with the offending line number on malformed rows.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TradeDataError(f"{path}: empty file") from None
        expected = ["year", "exporter", "importer", "value_usd"]
        if [h.strip() for h in header] != expected:
            raise TradeDataError(
                f"{path}: line 1: expected header {','.join(expected)}, "
                f"got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise TradeDataError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            year_s, exporter, importer, value_s = (f.strip() for f in row)
            try:
                year = int(year_s)
            except ValueError:
                raise TradeDataError(f"{path}: line {lineno}: bad year {year_s!r}") from None
            try:
                value = float(value_s)
            except ValueError:
                raise TradeDataError(f"{path}: line {lineno}: bad value {value_s!r}") from None
            if not np.isfinite(value):
                raise TradeDataError(f"{path}: line {lineno}: non-finite value {value_s!r}")
            yield FlowRecord(year, exporter, importer, value, line=lineno)


def years_in_csv(path: str | Path) -> list[int]:
    """Distinct years present in a flow file, ascending."""
    return sorted({rec.year for rec in read_flow_csv(path)})


def load_trade_flows(records: Iterable[FlowRecord | tuple], year: int) -> TradeMatrix:
    """Aggregate a record stream into the money matrix for one year.

    Self-loops are dropped (counted), countries with zero total trade in the
    year are excluded from the index. Duplicate (exporter, importer) pairs
    accumulate; per-pair values are summed in sorted order so the result does
    not depend on row order in the source.
    """
    pair_values: dict[tuple[str, str], list[float]] = {}
    self_loops = 0
    seen_year = False
    for rec in records:
        if not isinstance(rec, FlowRecord):
            rec = FlowRecord(*rec)
        if rec.year != year:
            continue
        seen_year = True
        check_code(rec.exporter)
        check_code(rec.importer)
        if rec.value < 0:
            raise TradeDataError(
                f"{rec.location}: negative flow value {rec.value!r} "
                f"({rec.exporter}->{rec.importer}, {rec.year})"
            )
        if rec.exporter == rec.importer:
            self_loops += 1
            continue
        pair_values.setdefault((rec.exporter, rec.importer), []).append(rec.value)

    if not seen_year:
        raise TradeDataError(f"no data for year {year}")

    pair_sums = {
        pair: float(np.sum(np.sort(np.asarray(values, dtype=np.float64))))
        for pair, values in pair_values.items()
    }

    traded: dict[str, float] = {}
    for (exporter, importer), value in pair_sums.items():
        traded[exporter] = traded.get(exporter, 0.0) + value
        traded[importer] = traded.get(importer, 0.0) + value
    active = sorted(code for code, total in traded.items() if total > 0)
    if not active:
        raise TradeDataError(f"no positive flows for year {year}")

    index = CountryIndex(tuple(active))
    n = len(index)
    flows = np.zeros((n, n), dtype=np.float64)
    for exporter, importer in sorted(pair_sums):
        value = pair_sums[(exporter, importer)]
        if value > 0:
            flows[index.position(importer), index.position(exporter)] += value
    return TradeMatrix(year=year, index=index, flows=flows, self_loops_dropped=self_loops)


def load_trade_flows_csv(path: str | Path, year: int) -> TradeMatrix:
    return load_trade_flows(read_flow_csv(path), year)


def total_imports(m: TradeMatrix) -> np.ndarray:
    """Per-country total import volume (row sums)."""
    return m.flows.sum(axis=1)


def total_exports(m: TradeMatrix) -> np.ndarray:
    """Per-country total export volume (column sums)."""
    return m.flows.sum(axis=0)


def flow_statistics(m: TradeMatrix) -> FlowStatistics:
    """Derive share matrices and ability vectors from the money matrix.

    Columns of countries with zero exports (imports) are left all-zero in the
    import (export) share matrix and the country is recorded as dangling;
    replacement by uniform columns is the centrality module's concern.
    """
    imports = total_imports(m)
    exports = total_exports(m)
    total = float(imports.sum())

    import_share = np.divide(
        m.flows, exports[np.newaxis, :], out=np.zeros_like(m.flows), where=exports > 0
    )
    export_share = np.divide(
        np.ascontiguousarray(m.flows.T),
        imports[np.newaxis, :],
        out=np.zeros_like(m.flows),
        where=imports > 0,
    )

    codes = m.index.codes
    dangling_exporters = frozenset(codes[i] for i in np.flatnonzero(exports == 0))
    dangling_importers = frozenset(codes[i] for i in np.flatnonzero(imports == 0))

    return FlowStatistics(
        index=m.index,
        import_share=import_share,
        export_share=export_share,
        import_ability=imports / total,
        export_ability=exports / total,
        total_volume=total,
        dangling_exporters=dangling_exporters,
        dangling_importers=dangling_importers,
    )
