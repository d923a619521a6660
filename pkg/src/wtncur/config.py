"""Run configuration: currencies, seed groups, dynamics and ensemble knobs.

Loaded from a flat TOML file; every key has a default so an empty mapping is
a valid configuration. Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .countries import check_code
from .errors import ParameterError, TradeDataError

DEFAULT_CURRENCIES = ("USD", "EUR", "BRI")

DEFAULT_SEED_GROUPS: dict[str, frozenset[str]] = {
    "USD": frozenset({"AU", "US", "GB", "CA", "NZ"}),
    "EUR": frozenset({"AT", "BE", "FR", "DE", "IT", "LU", "NL", "PT", "ES"}),
    "BRI": frozenset({"BR", "RU", "IN", "CN", "ZA"}),
}

_WEIGHT_MODES = ("direct", "centrality")
# dirichlet: redraw fractions per run; fixed: use init_fractions; uniform: 1/K each
_INIT_POLICIES = ("dirichlet", "fixed", "uniform")
_VOLUME_SHARE_MODES = ("symmetric", "import", "export")


@dataclass(frozen=True)
class CurrencyConfig:
    currencies: tuple[str, ...] = DEFAULT_CURRENCIES
    seed_groups: Mapping[str, frozenset[str]] = field(
        default_factory=lambda: dict(DEFAULT_SEED_GROUPS)
    )
    init_fractions: tuple[float, ...] | None = None  # None = uniform
    tau_max: int = 50
    weight_mode: str = "direct"
    n_runs: int = 10_000
    master_seed: int = 12345
    init_policy: str = "dirichlet"
    volume_share_mode: str = "symmetric"
    bin_width: float = 0.1
    damping: float = 0.85
    pagerank_tol: float = 1e-10
    pagerank_max_iter: int = 10_000

    def __post_init__(self) -> None:
        if len(self.currencies) < 2:
            raise ParameterError(
                f"need at least two currencies, got {list(self.currencies)}"
            )
        if len(set(self.currencies)) != len(self.currencies):
            raise ParameterError(f"duplicate currency codes in {self.currencies}")
        for cur in self.currencies:
            if not (cur.isalpha() and cur.isupper() and 2 <= len(cur) <= 5):
                raise ParameterError(f"bad currency code {cur!r} (want 2-5 uppercase letters)")

        seen: dict[str, str] = {}
        for cur, members in self.seed_groups.items():
            if cur not in self.currencies:
                raise ParameterError(f"seed group for unknown currency {cur!r}")
            for code in members:
                try:
                    check_code(code)
                except TradeDataError as exc:
                    raise ParameterError(f"seed group {cur}: {exc}") from None
                if code in seen:
                    raise ParameterError(
                        f"country {code} seeded for both {seen[code]} and {cur}"
                    )
                seen[code] = cur

        if self.init_fractions is not None:
            if len(self.init_fractions) != len(self.currencies):
                raise ParameterError(
                    f"init_fractions has {len(self.init_fractions)} entries "
                    f"for {len(self.currencies)} currencies"
                )
            if any(f < 0 for f in self.init_fractions):
                raise ParameterError(f"negative init_fractions {self.init_fractions}")
            total = sum(self.init_fractions)
            if abs(total - 1.0) > 1e-9:
                raise ParameterError(f"init_fractions sum to {total}, expected 1")

        if self.tau_max < 1:
            raise ParameterError(f"tau_max must be at least 1, got {self.tau_max}")
        if self.n_runs < 1:
            raise ParameterError(f"n_runs must be at least 1, got {self.n_runs}")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ParameterError(f"master_seed must be a non-negative integer, got {self.master_seed!r}")
        if self.weight_mode not in _WEIGHT_MODES:
            raise ParameterError(
                f"weight_mode must be one of {_WEIGHT_MODES}, got {self.weight_mode!r}"
            )
        if self.init_policy not in _INIT_POLICIES:
            raise ParameterError(
                f"init_policy must be one of {_INIT_POLICIES}, got {self.init_policy!r}"
            )
        if self.volume_share_mode not in _VOLUME_SHARE_MODES:
            raise ParameterError(
                f"volume_share_mode must be one of {_VOLUME_SHARE_MODES}, "
                f"got {self.volume_share_mode!r}"
            )
        if not 0.0 < self.bin_width <= 1.0:
            raise ParameterError(f"bin_width must be in (0, 1], got {self.bin_width}")
        if not 0.0 < self.damping < 1.0:
            raise ParameterError(f"damping must be in (0, 1), got {self.damping}")
        if self.pagerank_tol <= 0:
            raise ParameterError(f"pagerank_tol must be positive, got {self.pagerank_tol}")
        if self.pagerank_max_iter < 1:
            raise ParameterError(f"pagerank_max_iter must be at least 1, got {self.pagerank_max_iter}")

    @property
    def n_currencies(self) -> int:
        return len(self.currencies)

    def fractions(self) -> tuple[float, ...]:
        """Initial fractions, uniform when unset."""
        if self.init_fractions is not None:
            return self.init_fractions
        k = len(self.currencies)
        return tuple(1.0 / k for _ in range(k))

    def with_overrides(self, **kwargs: Any) -> "CurrencyConfig":
        """New config with the given fields replaced (None values skipped)."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self


_SCALAR_KEYS = {
    "currencies",
    "init_fractions",
    "tau_max",
    "weight_mode",
    "n_runs",
    "master_seed",
    "init_policy",
    "volume_share_mode",
    "bin_width",
    "damping",
    "pagerank_tol",
    "pagerank_max_iter",
}


def config_from_mapping(data: Mapping[str, Any]) -> CurrencyConfig:
    unknown = set(data) - _SCALAR_KEYS - {"seed_groups"}
    if unknown:
        raise ParameterError(f"unknown configuration keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    if "currencies" in data:
        raw = data["currencies"]
        if not isinstance(raw, (list, tuple)) or not all(isinstance(c, str) for c in raw):
            raise ParameterError(f"currencies must be a list of strings, got {raw!r}")
        kwargs["currencies"] = tuple(raw)
    if "seed_groups" in data:
        raw = data["seed_groups"]
        if not isinstance(raw, Mapping):
            raise ParameterError(f"seed_groups must be a table, got {raw!r}")
        groups: dict[str, frozenset[str]] = {}
        for cur, members in raw.items():
            if not isinstance(members, (list, tuple)) or not all(
                isinstance(m, str) for m in members
            ):
                raise ParameterError(
                    f"seed_groups.{cur} must be a list of country codes, got {members!r}"
                )
            groups[cur] = frozenset(members)
        kwargs["seed_groups"] = groups
    if "init_fractions" in data:
        raw = data["init_fractions"]
        if not isinstance(raw, (list, tuple)) or not all(
            isinstance(f, (int, float)) and not isinstance(f, bool) for f in raw
        ):
            raise ParameterError(f"init_fractions must be a list of numbers, got {raw!r}")
        kwargs["init_fractions"] = tuple(float(f) for f in raw)

    for key in ("tau_max", "n_runs", "master_seed", "pagerank_max_iter"):
        if key in data:
            raw = data[key]
            if not isinstance(raw, int) or isinstance(raw, bool):
                raise ParameterError(f"{key} must be an integer, got {raw!r}")
            kwargs[key] = raw
    for key in ("bin_width", "damping", "pagerank_tol"):
        if key in data:
            raw = data[key]
            if not isinstance(raw, (int, float)) or isinstance(raw, bool):
                raise ParameterError(f"{key} must be a number, got {raw!r}")
            kwargs[key] = float(raw)
    for key in ("weight_mode", "init_policy", "volume_share_mode"):
        if key in data:
            raw = data[key]
            if not isinstance(raw, str):
                raise ParameterError(f"{key} must be a string, got {raw!r}")
            kwargs[key] = raw

    return CurrencyConfig(**kwargs)


def load_config(path: str | Path) -> CurrencyConfig:
    """Read a flat TOML configuration file."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"{path}: invalid TOML: {exc}") from None
    return config_from_mapping(data)
