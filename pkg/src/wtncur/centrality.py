"""Google-matrix construction and power-iteration ranking of the flow network.

The forward ranking weights countries by where money flows to (who imports),
the reverse ranking by where it flows from (who exports). Both come from the
same construction applied to the two share matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .countries import CountryIndex
from .errors import ParameterError, PowerIterationError
from .flows import FlowStatistics

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class GoogleMatrix:
    index: CountryIndex
    matrix: np.ndarray  # column-stochastic, strictly positive
    damping: float

    def __post_init__(self) -> None:
        self.matrix.setflags(write=False)


@dataclass(frozen=True)
class RankVector:
    index: CountryIndex
    values: np.ndarray  # probability vector over index
    iterations: int
    residual: float

    def __post_init__(self) -> None:
        self.values.setflags(write=False)

    def by_rank(self) -> list[tuple[str, float]]:
        """(code, value) pairs, highest value first, ties by code."""
        order = sorted(
            range(len(self.index.codes)),
            key=lambda i: (-self.values[i], self.index.codes[i]),
        )
        return [(self.index.codes[i], float(self.values[i])) for i in order]


def _check_damping(damping: float) -> None:
    if not 0.0 < damping < 1.0:
        raise ParameterError(f"damping must be in (0, 1), got {damping}")


def google_matrix(
    share: np.ndarray, index: CountryIndex, damping: float = DEFAULT_DAMPING
) -> GoogleMatrix:
    """Damped, dangling-repaired transition matrix from a share matrix.

    All-zero columns become uniform 1/N, then every column is mixed with the
    uniform vector: G = damping * S + (1 - damping)/N.
    """
    _check_damping(damping)
    n = len(index)
    if share.shape != (n, n):
        raise ParameterError(f"share matrix shape {share.shape} does not match index size {n}")
    s = np.array(share, dtype=np.float64)
    col_sums = s.sum(axis=0)
    dangling = col_sums == 0
    if np.any(dangling):
        s[:, dangling] = 1.0 / n
    g = damping * s + (1.0 - damping) / n
    return GoogleMatrix(index=index, matrix=g, damping=damping)


def power_iteration(
    g: GoogleMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RankVector:
    """Leading eigenvector of a Google matrix by repeated multiplication.

    Starts from the uniform vector; stops when the L1 step residual drops to
    tol or below. Raises PowerIterationError if max_iter multiplications are
    not enough.
    """
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be at least 1, got {max_iter}")
    n = len(g.index)
    v = np.full(n, 1.0 / n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        nxt = g.matrix @ v
        nxt /= nxt.sum()  # guard against drift; G is stochastic up to rounding
        residual = float(np.abs(nxt - v).sum())
        v = nxt
        if residual <= tol:
            return RankVector(index=g.index, values=v, iterations=it, residual=residual)
    raise PowerIterationError(
        f"power iteration did not reach tol={tol} within {max_iter} iterations "
        f"(residual={residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def pagerank(
    stats: FlowStatistics,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RankVector:
    """Forward ranking: stationary weight concentrated on heavy importers."""
    g = google_matrix(stats.import_share, stats.index, damping)
    return power_iteration(g, tol=tol, max_iter=max_iter)


def cheirank(
    stats: FlowStatistics,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RankVector:
    """Reverse ranking: same construction on the export-share matrix."""
    g = google_matrix(stats.export_share, stats.index, damping)
    return power_iteration(g, tol=tol, max_iter=max_iter)
