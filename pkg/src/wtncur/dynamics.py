"""Asynchronous preference dynamics over the trade coupling matrix.

Each country carries a currency preference. On update it adopts the currency
whose adherents carry the largest combined trade coupling toward it, keeping
its current choice on ties. Seed countries are frozen and never update.

The per-country decision reads, for country c and currency k:

    bucket_k(c) = sum over partners cp with pref[cp] == k of
                  (import_share[cp, c] + export_share[cp, c]) * (w[cp] + w*[cp])

with w, w* either the trade-ability vectors or the network rankings. The
normalized score z_k(c) = bucket_k / sum_j bucket_j is what reports show;
decisions use the raw buckets (same argmax, exact tie preservation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .backends import Kernels, get_kernels
from .centrality import cheirank, pagerank
from .config import CurrencyConfig
from .countries import CountryIndex
from .errors import FrozenCountryError, ParameterError
from .flows import FlowStatistics


@dataclass(frozen=True)
class WeightVectors:
    """Partner-importance vectors entering the coupling."""

    w: np.ndarray  # import-side weight per country
    w_star: np.ndarray  # export-side weight per country
    mode: str

    def __post_init__(self) -> None:
        self.w.setflags(write=False)
        self.w_star.setflags(write=False)


def weight_vectors(
    stats: FlowStatistics,
    mode: str = "direct",
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> WeightVectors:
    """Build the weight pair for a coupling matrix.

    "direct" uses the trade-ability vectors; "centrality" replaces them with
    the forward and reverse network rankings.
    """
    if mode == "direct":
        return WeightVectors(
            w=stats.import_ability.copy(), w_star=stats.export_ability.copy(), mode=mode
        )
    if mode == "centrality":
        pr = pagerank(stats, damping=damping, tol=tol, max_iter=max_iter)
        cr = cheirank(stats, damping=damping, tol=tol, max_iter=max_iter)
        return WeightVectors(w=pr.values.copy(), w_star=cr.values.copy(), mode=mode)
    raise ParameterError(f"unknown weight mode {mode!r} (want direct or centrality)")


@dataclass(frozen=True)
class TradeCoupling:
    """State-independent pairwise coupling, stored row-contiguous per decider.

    matrix_t[c, cp] is the influence partner cp exerts on country c.
    """

    index: CountryIndex
    matrix_t: np.ndarray
    weight_mode: str

    def __post_init__(self) -> None:
        self.matrix_t.setflags(write=False)

    @classmethod
    def from_statistics(cls, stats: FlowStatistics, weights: WeightVectors) -> "TradeCoupling":
        a = (stats.import_share + stats.export_share) * (
            weights.w + weights.w_star
        )[:, np.newaxis]
        np.fill_diagonal(a, 0.0)
        return cls(
            index=stats.index,
            matrix_t=np.ascontiguousarray(a.T),
            weight_mode=weights.mode,
        )

    @property
    def n(self) -> int:
        return len(self.index)


@dataclass
class TcpState:
    """Mutable preference assignment: one currency index per country."""

    prefs: np.ndarray  # int8, values in [0, n_currencies)
    frozen: np.ndarray  # bool, True = seed country, never updates
    n_currencies: int

    def __post_init__(self) -> None:
        if self.prefs.dtype != np.int8:
            raise ParameterError(f"prefs must be int8, got {self.prefs.dtype}")
        if self.prefs.shape != self.frozen.shape:
            raise ParameterError("prefs and frozen must have the same shape")
        if self.n_currencies < 1:
            raise ParameterError("need at least one currency")
        if self.prefs.size and (self.prefs.min() < 0 or self.prefs.max() >= self.n_currencies):
            raise ParameterError("preference values out of range")

    @property
    def n(self) -> int:
        return self.prefs.shape[0]

    def free_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen)

    def counts(self) -> np.ndarray:
        return np.bincount(self.prefs, minlength=self.n_currencies)

    def fractions(self) -> np.ndarray:
        """Share of all countries (seeds included) holding each currency."""
        return self.counts() / self.n

    def copy(self) -> "TcpState":
        return TcpState(
            prefs=self.prefs.copy(), frozen=self.frozen.copy(), n_currencies=self.n_currencies
        )


@dataclass(frozen=True)
class ScoreVector:
    """Normalized per-country currency scores for one preference state."""

    z: np.ndarray  # (n, k); rows sum to 1 where defined, else all zero
    defined: np.ndarray  # bool; False when a country has zero total coupling

    def __post_init__(self) -> None:
        self.z.setflags(write=False)
        self.defined.setflags(write=False)


def seed_assignment(index: CountryIndex, cfg: CurrencyConfig) -> tuple[np.ndarray, np.ndarray]:
    """Base preference vector with seeds placed, plus the frozen mask.

    Seed countries absent from the index are skipped. Non-seed entries are
    zero placeholders, overwritten by the initial draw.
    """
    n = len(index)
    prefs = np.zeros(n, dtype=np.int8)
    frozen = np.zeros(n, dtype=bool)
    for ki, cur in enumerate(cfg.currencies):
        for code in sorted(cfg.seed_groups.get(cur, ())):
            if code in index:
                pos = index.position(code)
                prefs[pos] = ki
                frozen[pos] = True
    return prefs, frozen


def draw_initial_prefs(
    seed_prefs: np.ndarray,
    frozen: np.ndarray,
    cfg: CurrencyConfig,
    rng: np.random.Generator,
) -> TcpState:
    """Fill the free countries with independent draws from the initial
    fractions.

    Under init_policy "dirichlet" the fractions themselves are redrawn flat
    on the simplex first. Draw order (fractions, then one uniform per free
    country, inverted through the CDF) is part of the reproducibility
    contract.
    """
    k = cfg.n_currencies
    prefs = seed_prefs.copy()

    if cfg.init_policy == "dirichlet":
        f = rng.dirichlet(np.ones(k))
    elif cfg.init_policy == "uniform":
        f = np.full(k, 1.0 / k)
    else:  # fixed
        f = np.asarray(cfg.fractions(), dtype=np.float64)

    free = np.flatnonzero(~frozen)
    if free.size:
        cdf = np.cumsum(f)
        u = rng.random(free.size)
        draws = np.searchsorted(cdf, u, side="right")
        prefs[free] = np.minimum(draws, k - 1).astype(np.int8)

    return TcpState(prefs=prefs, frozen=frozen.copy(), n_currencies=k)


def init_state(
    index: CountryIndex, cfg: CurrencyConfig, rng: np.random.Generator
) -> TcpState:
    """Seeded countries get their group currency and are frozen; the rest
    draw from the initial fractions."""
    seed_prefs, frozen = seed_assignment(index, cfg)
    return draw_initial_prefs(seed_prefs, frozen, cfg, rng)


def currency_scores(coupling: TradeCoupling, state: TcpState) -> ScoreVector:
    """Normalized scores for every country under the current preferences."""
    n = coupling.n
    k = state.n_currencies
    onehot = np.zeros((n, k))
    onehot[np.arange(n), state.prefs] = 1.0
    buckets = coupling.matrix_t @ onehot
    totals = buckets.sum(axis=1)
    defined = totals > 0
    z = np.divide(buckets, totals[:, np.newaxis], out=np.zeros_like(buckets), where=defined[:, np.newaxis])
    return ScoreVector(z=z, defined=defined)


def update_country(coupling: TradeCoupling, state: TcpState, c: int) -> tuple[int, bool]:
    """Single asynchronous update of country c: (new currency, changed).

    A country whose buckets are all zero keeps its preference. Mirrors the
    kernel decision exactly (index-order accumulation, keep-current ties).
    """
    if state.frozen[c]:
        raise FrozenCountryError(f"country at index {c} is a frozen seed")
    k = state.n_currencies
    buckets = np.bincount(
        state.prefs.astype(np.intp), weights=coupling.matrix_t[c], minlength=k
    )
    cur = int(state.prefs[c])
    m = buckets[cur]
    best = cur
    for j in range(k):
        if buckets[j] > m:
            m = buckets[j]
            best = j
    if best != cur:
        state.prefs[c] = best
        return best, True
    return cur, False


def sweep(
    coupling: TradeCoupling,
    state: TcpState,
    rng: np.random.Generator | None = None,
    order: Sequence[int] | np.ndarray | None = None,
    kernels: Kernels | None = None,
) -> int:
    """One full pass over the free countries in random (or given) order."""
    kern = kernels if kernels is not None else get_kernels()
    if order is None:
        if rng is None:
            raise ParameterError("sweep needs either an rng or an explicit order")
        order = rng.permutation(state.free_indices())
    else:
        order = np.asarray(order, dtype=np.intp)
        if order.size and np.any(state.frozen[order]):
            raise FrozenCountryError("explicit order contains frozen countries")
    scratch = np.empty(state.n_currencies, dtype=np.float64)
    return kern.sweep(coupling.matrix_t, state.prefs, order, scratch)


def is_fixed_point(
    coupling: TradeCoupling, state: TcpState, kernels: Kernels | None = None
) -> bool:
    """True when no free country would flip, regardless of update order."""
    kern = kernels if kernels is not None else get_kernels()
    scratch = np.empty(state.n_currencies, dtype=np.float64)
    return kern.fixed_point(coupling.matrix_t, state.prefs, state.free_indices(), scratch)


@dataclass
class SteadyResult:
    state: TcpState
    tau: int  # sweeps executed; every executed sweep changed something
    converged: bool
    counts_trajectory: list[np.ndarray] = field(default_factory=list)  # int counts per step

    @property
    def trajectory(self) -> list[np.ndarray]:
        """Currency fractions after each sweep (entry 0 is the initial state)."""
        n = self.state.n
        return [c / n for c in self.counts_trajectory]


def run_to_steady(
    coupling: TradeCoupling,
    state: TcpState,
    tau_max: int,
    rng: np.random.Generator | None = None,
    order_stream: Iterator[np.ndarray] | None = None,
    record_trajectory: bool = False,
    kernels: Kernels | None = None,
) -> SteadyResult:
    """Sweep until a fixed point or tau_max sweeps, whichever comes first.

    The fixed-point check runs before each sweep, so a state that starts
    converged reports tau 0. order_stream, when given, supplies the update
    order per sweep instead of rng permutations (used by exactness tests).
    """
    if tau_max < 0:
        raise ParameterError(f"tau_max must be non-negative, got {tau_max}")
    kern = kernels if kernels is not None else get_kernels()
    counts_trajectory: list[np.ndarray] = []
    if record_trajectory:
        counts_trajectory.append(state.counts())
    tau = 0
    converged = False
    while True:
        if is_fixed_point(coupling, state, kernels=kern):
            converged = True
            break
        if tau >= tau_max:
            break
        if order_stream is not None:
            order = np.asarray(next(order_stream), dtype=np.intp)
        elif rng is not None:
            order = rng.permutation(state.free_indices())
        else:
            raise ParameterError("run_to_steady needs an rng or an order_stream")
        sweep(coupling, state, order=order, kernels=kern)
        tau += 1
        if record_trajectory:
            counts_trajectory.append(state.counts())
    return SteadyResult(
        state=state, tau=tau, converged=converged, counts_trajectory=counts_trajectory
    )
