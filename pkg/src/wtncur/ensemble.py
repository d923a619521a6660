"""Monte Carlo ensembles over initial preference draws, plus report math.

Aggregation is done in integers (final counts, squared counts, per-country
tallies, tau tallies) and converted to floats once at the end, so the result
is bit-identical for any worker count or chunking of the run range. Run i
draws its generator from (master_seed, i) alone.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .backends import get_kernels
from .config import CurrencyConfig
from .countries import CountryIndex
from .dynamics import (
    ScoreVector,
    TcpState,
    TradeCoupling,
    WeightVectors,
    currency_scores,
    draw_initial_prefs,
    run_to_steady,
    seed_assignment,
    weight_vectors,
)
from .errors import ParameterError
from .flows import FlowStatistics


@dataclass(frozen=True)
class EnsembleSpec:
    """How many runs, from which master seed, with which initial-draw policy."""

    n_runs: int = 10_000
    master_seed: int = 12345
    init_policy: str = "dirichlet"

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ParameterError(f"n_runs must be at least 1, got {self.n_runs}")

    @classmethod
    def from_config(cls, cfg: CurrencyConfig) -> "EnsembleSpec":
        return cls(n_runs=cfg.n_runs, master_seed=cfg.master_seed, init_policy=cfg.init_policy)


@dataclass(frozen=True)
class EnsembleResult:
    """Aggregated steady-state statistics over an ensemble.

    The integer fields are the raw reduction; every float field is derived
    from them, which keeps results independent of parallel execution.
    """

    index: CountryIndex
    currencies: tuple[str, ...]
    n_runs: int
    master_seed: int
    final_counts_sum: np.ndarray  # (K,) int64
    final_counts_sq_sum: np.ndarray  # (K,) int64
    per_country_counts: np.ndarray  # (N, K) int64
    tau_counts: np.ndarray  # (tau_max+1,) int64, runs per tau value
    converged_runs: int
    trajectory_counts: np.ndarray  # (T, K) int64, padded with final counts

    @property
    def n_countries(self) -> int:
        return len(self.index)

    @property
    def mean_final_fractions(self) -> np.ndarray:
        return self.final_counts_sum / (self.n_runs * self.n_countries)

    @property
    def stderr_final_fractions(self) -> np.ndarray:
        """Standard error of the mean final fraction, per currency."""
        r = self.n_runs
        if r < 2:
            return np.zeros(len(self.currencies))
        mean_counts = self.final_counts_sum / r
        var_counts = (self.final_counts_sq_sum - r * mean_counts**2) / (r - 1)
        var_counts = np.maximum(var_counts, 0.0)  # guard rounding at zero variance
        return np.sqrt(var_counts / r) / self.n_countries

    @property
    def per_country_frequency(self) -> np.ndarray:
        return self.per_country_counts / self.n_runs

    @property
    def modal_tcp(self) -> np.ndarray:
        """Most frequent final currency per country; ties to the lowest id."""
        return np.argmax(self.per_country_counts, axis=1).astype(np.int8)

    @property
    def convergence_rate(self) -> float:
        return self.converged_runs / self.n_runs

    @property
    def mean_tau(self) -> float:
        taus = np.arange(self.tau_counts.shape[0])
        return float((taus * self.tau_counts).sum() / self.n_runs)

    @property
    def mean_trajectory(self) -> np.ndarray:
        """Mean currency fractions after each sweep, rows 0..max tau."""
        return self.trajectory_counts / (self.n_runs * self.n_countries)


class _ChunkTotals(NamedTuple):
    final_sum: np.ndarray
    final_sq_sum: np.ndarray
    per_country: np.ndarray
    tau_counts: np.ndarray
    converged: int
    traj_sum: np.ndarray
    max_tau: int


def _run_chunk(args: tuple) -> _ChunkTotals:
    (matrix_t, index, weight_mode, seed_prefs, frozen, cfg, lo, hi, backend) = args
    kern = get_kernels(backend)
    coupling = TradeCoupling(index=index, matrix_t=matrix_t, weight_mode=weight_mode)
    n = len(index)
    k = cfg.n_currencies
    rows = np.arange(n)

    final_sum = np.zeros(k, dtype=np.int64)
    final_sq_sum = np.zeros(k, dtype=np.int64)
    per_country = np.zeros((n, k), dtype=np.int64)
    tau_counts = np.zeros(cfg.tau_max + 1, dtype=np.int64)
    traj_sum = np.zeros((cfg.tau_max + 1, k), dtype=np.int64)
    converged = 0
    max_tau = 0

    for run in range(lo, hi):
        rng = np.random.default_rng([cfg.master_seed, run])
        state = draw_initial_prefs(seed_prefs, frozen, cfg, rng)
        res = run_to_steady(
            coupling, state, cfg.tau_max, rng=rng, record_trajectory=True, kernels=kern
        )
        counts = state.counts().astype(np.int64)
        final_sum += counts
        final_sq_sum += counts * counts
        per_country[rows, state.prefs] += 1
        tau_counts[res.tau] += 1
        converged += int(res.converged)
        max_tau = max(max_tau, res.tau)
        steps = np.asarray(res.counts_trajectory, dtype=np.int64)
        traj_sum[: res.tau + 1] += steps
        if res.tau < cfg.tau_max:
            traj_sum[res.tau + 1 :] += counts  # converged runs hold their state

    return _ChunkTotals(final_sum, final_sq_sum, per_country, tau_counts, converged, traj_sum, max_tau)


def _chunk_ranges(n_runs: int, n_chunks: int) -> list[tuple[int, int]]:
    n_chunks = max(1, min(n_chunks, n_runs))
    bounds = np.linspace(0, n_runs, n_chunks + 1).astype(int)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(n_chunks) if bounds[i] < bounds[i + 1]]


def run_ensemble(
    spec: EnsembleSpec,
    cfg: CurrencyConfig,
    stats: FlowStatistics,
    weights: WeightVectors | None = None,
    workers: int = 1,
    backend: str = "auto",
    chunks_per_worker: int = 4,
) -> EnsembleResult:
    """Run spec.n_runs independent trajectories and reduce their statistics.

    Non-converged runs are included and counted, not errors. workers > 1
    distributes chunks of the run range over processes; the reduction is a
    plain integer sum, so any chunking gives the same result.
    """
    cfg = cfg.with_overrides(
        n_runs=spec.n_runs, master_seed=spec.master_seed, init_policy=spec.init_policy
    )
    if weights is None:
        weights = weight_vectors(
            stats,
            mode=cfg.weight_mode,
            damping=cfg.damping,
            tol=cfg.pagerank_tol,
            max_iter=cfg.pagerank_max_iter,
        )
    coupling = TradeCoupling.from_statistics(stats, weights)
    seed_prefs, frozen = seed_assignment(stats.index, cfg)

    if workers < 1:
        raise ParameterError(f"workers must be at least 1, got {workers}")
    ranges = _chunk_ranges(cfg.n_runs, workers * chunks_per_worker if workers > 1 else 1)
    payloads = [
        (coupling.matrix_t, stats.index, weights.mode, seed_prefs, frozen, cfg, lo, hi, backend)
        for lo, hi in ranges
    ]

    if workers == 1:
        totals = [_run_chunk(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            totals = list(pool.map(_run_chunk, payloads))

    n = len(stats.index)
    k = cfg.n_currencies
    final_sum = np.zeros(k, dtype=np.int64)
    final_sq_sum = np.zeros(k, dtype=np.int64)
    per_country = np.zeros((n, k), dtype=np.int64)
    tau_counts = np.zeros(cfg.tau_max + 1, dtype=np.int64)
    traj_sum = np.zeros((cfg.tau_max + 1, k), dtype=np.int64)
    converged = 0
    max_tau = 0
    for t in totals:
        final_sum += t.final_sum
        final_sq_sum += t.final_sq_sum
        per_country += t.per_country
        tau_counts += t.tau_counts
        traj_sum += t.traj_sum
        converged += t.converged
        max_tau = max(max_tau, t.max_tau)

    return EnsembleResult(
        index=stats.index,
        currencies=cfg.currencies,
        n_runs=cfg.n_runs,
        master_seed=cfg.master_seed,
        final_counts_sum=final_sum,
        final_counts_sq_sum=final_sq_sum,
        per_country_counts=per_country,
        tau_counts=tau_counts,
        converged_runs=converged,
        trajectory_counts=traj_sum[: max_tau + 1],
    )


class GroupMember(NamedTuple):
    code: str
    import_ability: float
    export_ability: float


@dataclass(frozen=True)
class GroupReport:
    """Per-currency membership and volume shares for one preference vector."""

    currencies: tuple[str, ...]
    members: Mapping[str, tuple[GroupMember, ...]]
    volume_fraction: Mapping[str, float]
    seed_volume_fraction: Mapping[str, float]
    volume_share_mode: str

    def sizes(self) -> dict[str, int]:
        return {cur: len(self.members[cur]) for cur in self.currencies}


def _member_sort_key(m: GroupMember):
    return (-max(m.import_ability, m.export_ability), -m.export_ability, m.code)


def group_membership(
    prefs: np.ndarray, stats: FlowStatistics, currencies: Sequence[str]
) -> dict[str, tuple[GroupMember, ...]]:
    """Partition countries by preferred currency.

    Members are sorted by descending max(import, export) ability, ties by
    descending export ability, remaining ties by country code.
    """
    prefs = np.asarray(prefs)
    if prefs.shape != (len(stats.index),):
        raise ParameterError("preference vector does not match the country index")
    groups: dict[str, list[GroupMember]] = {cur: [] for cur in currencies}
    for pos, code in enumerate(stats.index.codes):
        member = GroupMember(
            code=code,
            import_ability=float(stats.import_ability[pos]),
            export_ability=float(stats.export_ability[pos]),
        )
        groups[currencies[int(prefs[pos])]].append(member)
    return {cur: tuple(sorted(groups[cur], key=_member_sort_key)) for cur in currencies}


def volume_share_vector(stats: FlowStatistics, mode: str = "symmetric") -> np.ndarray:
    """Per-country share of total traded volume under the chosen convention."""
    if mode == "symmetric":
        return (stats.import_ability + stats.export_ability) / 2.0
    if mode == "import":
        return stats.import_ability.copy()
    if mode == "export":
        return stats.export_ability.copy()
    raise ParameterError(f"unknown volume share mode {mode!r}")


def volume_fractions(
    prefs: np.ndarray,
    stats: FlowStatistics,
    currencies: Sequence[str],
    mode: str = "symmetric",
) -> np.ndarray:
    """Total-volume share captured by each currency group."""
    prefs = np.asarray(prefs, dtype=np.intp)
    shares = volume_share_vector(stats, mode)
    return np.bincount(prefs, weights=shares, minlength=len(currencies))


def seed_volume_fractions(
    cfg: CurrencyConfig, stats: FlowStatistics, mode: str = "symmetric"
) -> np.ndarray:
    """Volume share held by the seed countries of each currency."""
    shares = volume_share_vector(stats, mode)
    out = np.zeros(cfg.n_currencies)
    for ki, cur in enumerate(cfg.currencies):
        for code in cfg.seed_groups.get(cur, ()):
            if code in stats.index:
                out[ki] += shares[stats.index.position(code)]
    return out


def group_report(
    prefs: np.ndarray, stats: FlowStatistics, cfg: CurrencyConfig
) -> GroupReport:
    members = group_membership(prefs, stats, cfg.currencies)
    vol = volume_fractions(prefs, stats, cfg.currencies, cfg.volume_share_mode)
    seed_vol = seed_volume_fractions(cfg, stats, cfg.volume_share_mode)
    return GroupReport(
        currencies=cfg.currencies,
        members=members,
        volume_fraction={cur: float(vol[ki]) for ki, cur in enumerate(cfg.currencies)},
        seed_volume_fraction={
            cur: float(seed_vol[ki]) for ki, cur in enumerate(cfg.currencies)
        },
        volume_share_mode=cfg.volume_share_mode,
    )


@dataclass(frozen=True)
class ScoreTable:
    """Per-country normalized scores evaluated against one preference state."""

    index: CountryIndex
    currencies: tuple[str, ...]
    scores: ScoreVector
    prefs: np.ndarray

    def __post_init__(self) -> None:
        self.prefs.setflags(write=False)


def ternary_coordinates(
    coupling: TradeCoupling, state: TcpState, currencies: Sequence[str]
) -> ScoreTable:
    """Score table for every country against the given state.

    For K = 3 the rows are the barycentric coordinates of the ternary plot;
    the raw table is produced for any K.
    """
    if len(currencies) != state.n_currencies:
        raise ParameterError("currency labels do not match the state dimension")
    return ScoreTable(
        index=coupling.index,
        currencies=tuple(currencies),
        scores=currency_scores(coupling, state),
        prefs=state.prefs.copy(),
    )


@dataclass(frozen=True)
class ScoreHistogram:
    currencies: tuple[str, ...]
    edges: np.ndarray  # (n_bins+1,)
    fractions: np.ndarray  # (K, n_bins), each row sums to defined-score fraction

    def __post_init__(self) -> None:
        self.edges.setflags(write=False)
        self.fractions.setflags(write=False)


def score_histogram(table: ScoreTable, bin_width: float = 0.1) -> ScoreHistogram:
    """Fraction of countries per score bin, one histogram per currency.

    bin_width must divide 1. Undefined-score countries are excluded from the
    bins but kept in the denominator, so each row sums to the fraction of
    countries with defined scores.
    """
    if not 0.0 < bin_width <= 1.0:
        raise ParameterError(f"bin_width must be in (0, 1], got {bin_width}")
    n_bins = round(1.0 / bin_width)
    if abs(n_bins * bin_width - 1.0) > 1e-9:
        raise ParameterError(f"bin_width {bin_width} does not divide 1")
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    n = len(table.index)
    k = len(table.currencies)
    fractions = np.zeros((k, n_bins))
    defined = table.scores.defined
    if np.any(defined):
        z = table.scores.z[defined]
        for ki in range(k):
            counts, _ = np.histogram(z[:, ki], bins=edges)
            fractions[ki] = counts / n
    return ScoreHistogram(currencies=table.currencies, edges=edges, fractions=fractions)


@dataclass(frozen=True)
class SensitivityReport:
    """Mean final fractions across initial-condition policies."""

    policies: tuple[str, ...]
    mean_fractions: np.ndarray  # (V, K)
    stderr: np.ndarray  # (V, K)
    max_deviation: float
    max_deviation_sigma: float  # deviation over combined standard error


def initial_condition_sensitivity(
    cfg: CurrencyConfig,
    stats: FlowStatistics,
    policies: Sequence[str] = ("dirichlet", "uniform", "fixed"),
    workers: int = 1,
    backend: str = "auto",
) -> SensitivityReport:
    """Compare ensemble mean final fractions across initial-draw policies.

    Each policy runs its own ensemble from an offset master seed. Reports the
    largest pairwise deviation and that deviation in units of the combined
    standard error (inf when the deviation is nonzero but both errors are 0).
    """
    if len(policies) < 2:
        raise ParameterError("need at least two policies to compare")
    means = []
    errs = []
    for vi, policy in enumerate(policies):
        cfg_v = cfg.with_overrides(init_policy=policy, master_seed=cfg.master_seed + vi)
        res = run_ensemble(
            EnsembleSpec.from_config(cfg_v), cfg_v, stats, workers=workers, backend=backend
        )
        means.append(res.mean_final_fractions)
        errs.append(res.stderr_final_fractions)
    mean_arr = np.array(means)
    err_arr = np.array(errs)

    max_dev = 0.0
    max_sigma = 0.0
    for a in range(len(policies)):
        for b in range(a + 1, len(policies)):
            dev = np.abs(mean_arr[a] - mean_arr[b])
            comb = np.sqrt(err_arr[a] ** 2 + err_arr[b] ** 2)
            max_dev = max(max_dev, float(dev.max()))
            with np.errstate(divide="ignore", invalid="ignore"):
                sigma = np.where(dev == 0, 0.0, np.where(comb > 0, dev / comb, np.inf))
            max_sigma = max(max_sigma, float(sigma.max()))
    return SensitivityReport(
        policies=tuple(policies),
        mean_fractions=mean_arr,
        stderr=err_arr,
        max_deviation=max_dev,
        max_deviation_sigma=max_sigma,
    )
