"""Finite-horizon stability maps over the (delta, epsilon) plane.

Each grid cell integrates the full oscillator from (u, u') = (1, 0) and
classifies the envelope as bounded or growing within the horizon.  The
verdict is a finite-window proxy: subresonant growth eventually saturates,
so "growing" means "growing up to t_end", and the envelope ratio is
reported alongside so callers can apply their own thresholds.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coefficient import CoefficientSpec, TruncationPolicy, truncation_order
from .errors import DomainError, NumericError
from .solver import (
    OscillatorParams,
    State,
    classify_growth,
    envelope_ratio,
    integrate,
    precompute_q_nodes,
)

__all__ = [
    "GridSpec",
    "StabilityMap",
    "stability_map",
    "resonance_band_edges",
    "map_rows",
]

# target sample count per cell; stride is derived from it
_TARGET_SAMPLES = 2000


@dataclass(frozen=True)
class GridSpec:
    delta_min: float
    delta_max: float
    delta_count: int
    epsilon_min: float
    epsilon_max: float
    epsilon_count: int
    t_end: float
    dt: float = 0.02
    growth_factor: float = 3.0

    def __post_init__(self) -> None:
        if self.delta_min > self.delta_max or self.epsilon_min > self.epsilon_max:
            raise DomainError("axis minimum must not exceed its maximum")
        if self.delta_count < 1 or self.epsilon_count < 1:
            raise DomainError("axis counts must be >= 1")
        if self.epsilon_min < 0.0:
            raise DomainError("epsilon must be >= 0")
        if self.t_end <= 0.0 or self.dt <= 0.0:
            raise DomainError("t_end and dt must be positive")
        if self.growth_factor <= 1.0:
            raise DomainError("growth_factor must exceed 1")

    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.delta_count)

    def epsilons(self) -> np.ndarray:
        return np.linspace(self.epsilon_min, self.epsilon_max, self.epsilon_count)


@dataclass(frozen=True)
class StabilityMap:
    grid: GridSpec
    verdicts: np.ndarray  # str matrix, indexed (delta index, epsilon index)
    envelope_ratios: np.ndarray

    def __post_init__(self) -> None:
        shape = (self.grid.delta_count, self.grid.epsilon_count)
        if self.verdicts.shape != shape or self.envelope_ratios.shape != shape:
            raise DomainError("matrix dimensions must equal the grid counts")


# Read-only inputs shared with forked sweep workers.  Set by stability_map
# before the pool is created; workers inherit it through fork, so the (large)
# coefficient grid is never pickled per task.
_SHARED: dict = {}


def _cell(args: tuple[int, int, float, float]) -> tuple[int, int, str, float]:
    i, j, delta, epsilon = args
    grid: GridSpec = _SHARED["grid"]
    spec: CoefficientSpec = _SHARED["spec"]
    n_terms: int = _SHARED["n_terms"]
    q_nodes: np.ndarray = _SHARED["q_nodes"]
    stride = max(1, int(round(grid.t_end / grid.dt)) // _TARGET_SAMPLES)
    try:
        params = OscillatorParams(delta=delta, epsilon=epsilon, spec=spec, n_terms=n_terms)
        traj = integrate(
            params,
            State(t=0.0, u=1.0, du=0.0),
            grid.t_end,
            grid.dt,
            output_stride=stride,
            q_nodes=q_nodes,
        )
        return i, j, classify_growth(traj, grid.growth_factor), envelope_ratio(traj)
    except NumericError:
        # in-cell failure (overflow before enough samples, horizon slip):
        # recorded as growing, never aborting the map
        return i, j, "growing", math.inf


def stability_map(
    grid: GridSpec,
    spec: CoefficientSpec,
    n_terms: int | None = None,
    workers: int = 1,
) -> StabilityMap:
    """Classify every (delta, epsilon) cell by direct simulation.

    All cells share one precomputed coefficient grid (q does not depend on
    delta or epsilon).  Results are gathered by cell index, so the map is
    identical for any worker count.
    """
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if n_terms is None:
        n_terms = truncation_order(spec, TruncationPolicy(t_max=grid.t_end))
    q_nodes = precompute_q_nodes(spec, n_terms, 0.0, grid.t_end, grid.dt)
    _SHARED.update(grid=grid, spec=spec, n_terms=n_terms, q_nodes=q_nodes)

    tasks = [
        (i, j, float(d), float(e))
        for i, d in enumerate(grid.deltas())
        for j, e in enumerate(grid.epsilons())
    ]
    verdicts = np.empty((grid.delta_count, grid.epsilon_count), dtype=object)
    ratios = np.empty((grid.delta_count, grid.epsilon_count), dtype=float)
    if workers == 1:
        results = map(_cell, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_cell, tasks)
    for i, j, verdict, ratio in results:
        verdicts[i, j] = verdict
        ratios[i, j] = ratio
    if workers > 1:
        pool.shutdown()
    return StabilityMap(grid=grid, verdicts=verdicts, envelope_ratios=ratios)


def resonance_band_edges(
    smap: StabilityMap, epsilon_index: int
) -> list[tuple[float, float]]:
    """Maximal contiguous growing delta-intervals at one epsilon column."""
    if not (0 <= epsilon_index < smap.grid.epsilon_count):
        raise DomainError("epsilon_index out of range")
    deltas = smap.grid.deltas()
    column = smap.verdicts[:, epsilon_index]
    bands: list[tuple[float, float]] = []
    start: int | None = None
    for i, verdict in enumerate(column):
        if verdict == "growing":
            if start is None:
                start = i
        elif start is not None:
            bands.append((float(deltas[start]), float(deltas[i - 1])))
            start = None
    if start is not None:
        bands.append((float(deltas[start]), float(deltas[-1])))
    return bands


def map_rows(smap: StabilityMap) -> list[tuple[float, float, str, float]]:
    """Row-major (delta, epsilon, verdict, envelope_ratio) tuples for CSV."""
    deltas = smap.grid.deltas()
    epsilons = smap.grid.epsilons()
    return [
        (float(deltas[i]), float(epsilons[j]), str(smap.verdicts[i, j]),
         float(smap.envelope_ratios[i, j]))
        for i in range(smap.grid.delta_count)
        for j in range(smap.grid.epsilon_count)
    ]
