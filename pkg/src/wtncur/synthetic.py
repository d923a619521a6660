"""Random block-structured trade networks for tests and demos.

Countries are split into contiguous blocks over a sorted slice of the code
registry. Flow values are integer draws scaled by a per-pair intensity:
within block b the block's internal intensity, across blocks the mean of the
two external intensities. Integer draws keep all derived shares exactly
scale-covariant, which the exactness tests rely on.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .countries import KNOWN_CODES, CountryIndex
from .errors import ParameterError
from .flows import TradeMatrix

DEFAULT_BLOCKS = ((9.0, 2.0), (6.0, 1.0), (3.0, 1.0))


def block_assignment(n_countries: int, n_blocks: int) -> np.ndarray:
    """Near-even contiguous partition of range(n_countries) into n_blocks."""
    sizes = [n_countries // n_blocks] * n_blocks
    for i in range(n_countries % n_blocks):
        sizes[i] += 1
    return np.repeat(np.arange(n_blocks), sizes)


def synthetic_wtn(
    n_countries: int,
    blocks: Sequence[tuple[float, float]] = DEFAULT_BLOCKS,
    rng: np.random.Generator | int | None = None,
    year: int = 2019,
) -> TradeMatrix:
    """Deterministic-for-seed random flow matrix with community structure.

    blocks: one (internal, external) intensity pair per block; intensities
    must be non-negative with at least one positive.
    """
    if n_countries < 2:
        raise ParameterError(f"need at least 2 countries, got {n_countries}")
    codes = sorted(KNOWN_CODES)
    if n_countries > len(codes):
        raise ParameterError(
            f"n_countries {n_countries} exceeds the {len(codes)}-code registry"
        )
    if not blocks:
        raise ParameterError("need at least one block")
    flat = [x for pair in blocks for x in pair]
    if any(x < 0 for x in flat):
        raise ParameterError(f"negative block intensity in {blocks}")
    if all(x == 0 for x in flat):
        raise ParameterError("all block intensities are zero")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)

    n = n_countries
    member = block_assignment(n, len(blocks))
    internal = np.asarray([b[0] for b in blocks], dtype=np.float64)
    external = np.asarray([b[1] for b in blocks], dtype=np.float64)

    same = member[:, np.newaxis] == member[np.newaxis, :]
    cross = (external[member][:, np.newaxis] + external[member][np.newaxis, :]) / 2.0
    intensity = np.where(same, internal[member][np.newaxis, :], cross)

    draws = rng.integers(1, 1000, size=(n, n)).astype(np.float64)
    flows = intensity * draws
    np.fill_diagonal(flows, 0.0)
    if not np.any(flows > 0):
        raise ParameterError("block spec produced an all-zero network")

    index = CountryIndex(tuple(codes[:n]))
    return TradeMatrix(year=year, index=index, flows=flows, self_loops_dropped=0)
