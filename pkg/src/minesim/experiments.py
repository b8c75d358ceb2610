"""Repetition harness and sweep grids over power configurations.

A sweep point is defined by its lattice indices: with granularity ``g``
and ``N = 1/g`` lattice cells, selfish miner j gets ``i_j / N`` of the
power and the honest miner the remainder. Every point's base seed is a
pure function of (sweep base seed, selfish count, lattice indices), so
partial sweeps are resumable and grid points can run on any number of
workers without changing a single number. Repetition r of a point runs
with seed ``point_seed + r``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from .engine import CONCURRENT, CONVENTIONAL, PowerConfiguration, RunConfig, run
from .results_io import ResultsWriter, SweepStatistic, read_completed_keys, read_stats

DEFAULT_BASE_SEED = 0

_CI_FACTOR = 1.96  # normal 95% quantile; R is large enough to skip the t fix


class EmptyGrid(ValueError):
    """Grid specification produces no configurations."""


@dataclass(frozen=True)
class GridSpec:
    """Sweep lattice over k selfish miners plus one honest remainder."""

    selfish_count: int
    granularity: float = 0.01
    timesteps: int = 200_000
    repetitions: int = 100
    difficulty: float = 0.5
    model: str = CONCURRENT

    def __post_init__(self) -> None:
        if self.selfish_count < 1:
            raise ValueError("at least one selfish miner required")
        if self.model not in (CONCURRENT, CONVENTIONAL):
            raise ValueError(f"unknown model {self.model!r}")
        cells = round(1.0 / self.granularity)
        if cells < 2 or abs(cells * self.granularity - 1.0) > 1e-9:
            raise ValueError(
                f"granularity {self.granularity} does not divide [0, 1]")

    @property
    def lattice_cells(self) -> int:
        return round(1.0 / self.granularity)


def point_seed(base_seed: int, selfish_count: int,
               indices: tuple[int, ...]) -> int:
    """Stable 64-bit seed for one grid point."""
    ss = np.random.SeedSequence(base_seed,
                                spawn_key=(selfish_count,) + tuple(indices))
    return int(ss.generate_state(1, np.uint64)[0])


def _powers_for(spec: GridSpec, indices: tuple[int, ...]) -> PowerConfiguration:
    cells = spec.lattice_cells
    selfish = [i / cells for i in indices]
    honest = (cells - sum(indices)) / cells
    return PowerConfiguration(tuple(selfish) + (honest,), spec.difficulty,
                              spec.selfish_count)


def grid_indices(spec: GridSpec) -> Iterator[tuple[int, ...]]:
    """All k-tuples of positive lattice indices with a positive remainder."""
    cells = spec.lattice_cells
    k = spec.selfish_count
    rng = range(1, cells)
    for indices in itertools.product(rng, repeat=k):
        if sum(indices) <= cells - 1:
            yield indices


def equal_indices(spec: GridSpec) -> Iterator[tuple[int, ...]]:
    cells = spec.lattice_cells
    k = spec.selfish_count
    for i in range(1, cells):
        if k * i <= cells - 1:
            yield (i,) * k


def run_repetitions(powers: PowerConfiguration, config: RunConfig,
                    repetitions: int, base_seed: int,
                    seeds: Sequence[int] | None = None) -> SweepStatistic:
    """Average rewards over repeated runs seeded base_seed..base_seed+R-1.

    ``seeds`` overrides the derived sequence (same length as
    ``repetitions``); the ``seed`` field of ``config`` is ignored.
    """
    if repetitions < 2:
        raise ValueError("repetitions must be >= 2 for a confidence interval")
    if seeds is None:
        seeds = [base_seed + r for r in range(repetitions)]
    elif len(seeds) != repetitions:
        raise ValueError("explicit seeds must match the repetition count")
    rewards = np.empty((repetitions, powers.n))
    for r, seed in enumerate(seeds):
        outcome = run(replace(config, seed=seed), powers)
        rewards[r] = outcome.rewards
    means = rewards.mean(axis=0)
    half = _CI_FACTOR * rewards.std(axis=0, ddof=1) / np.sqrt(repetitions)
    return SweepStatistic(
        model=config.model, selfish_count=powers.selfish_count,
        powers=powers.powers, difficulty=powers.difficulty,
        timesteps=config.timesteps, repetitions=repetitions,
        base_seed=base_seed, means=tuple(means), ci_half_widths=tuple(half))


def _sweep_point(args: tuple) -> SweepStatistic:
    spec, indices, base_seed = args
    powers = _powers_for(spec, indices)
    config = RunConfig(model=spec.model, timesteps=spec.timesteps, seed=0)
    return run_repetitions(powers, config, spec.repetitions,
                           point_seed(base_seed, spec.selfish_count, indices))


def _run_sweep(spec: GridSpec, indices_list: list[tuple[int, ...]],
               base_seed: int, out_path: str | None, resume: bool,
               workers: int,
               progress: Callable[[int, int], None] | None) -> list[SweepStatistic]:
    if not indices_list:
        raise EmptyGrid(f"no lattice points for {spec}")

    done: list[SweepStatistic] = []
    todo = indices_list
    if out_path and resume:
        completed = read_completed_keys(out_path)
        if completed:
            existing = {s.key(): s for s in read_stats(out_path)}
            todo = []
            for indices in indices_list:
                probe = _placeholder_key(spec, indices)
                if probe in existing:
                    done.append(existing[probe])
                else:
                    todo.append(indices)

    writer = ResultsWriter(out_path, append=resume) if out_path else None
    jobs = [(spec, indices, base_seed) for indices in todo]
    total = len(indices_list)
    finished = len(done)
    try:
        if workers > 1 and jobs:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for stat in pool.map(_sweep_point, jobs, chunksize=4):
                    done.append(stat)
                    finished += 1
                    if writer:
                        writer.write(stat)
                    if progress:
                        progress(finished, total)
        else:
            for job in jobs:
                stat = _sweep_point(job)
                done.append(stat)
                finished += 1
                if writer:
                    writer.write(stat)
                if progress:
                    progress(finished, total)
    finally:
        if writer:
            writer.close()
    return done


def _placeholder_key(spec: GridSpec, indices: tuple[int, ...]) -> tuple:
    powers = _powers_for(spec, indices)
    return SweepStatistic(
        model=spec.model, selfish_count=spec.selfish_count,
        powers=powers.powers, difficulty=spec.difficulty,
        timesteps=spec.timesteps, repetitions=spec.repetitions,
        base_seed=0, means=(0.0,) * powers.n,
        ci_half_widths=(0.0,) * powers.n).key()


def sweep_grid(spec: GridSpec, base_seed: int = DEFAULT_BASE_SEED,
               out_path: str | None = None, resume: bool = False,
               workers: int = 1,
               progress: Callable[[int, int], None] | None = None,
               ) -> list[SweepStatistic]:
    """Sweep the full lattice for the spec, checkpointing if a path is given."""
    return _run_sweep(spec, list(grid_indices(spec)), base_seed, out_path,
                      resume, workers, progress)


def equal_power_scan(spec: GridSpec, base_seed: int = DEFAULT_BASE_SEED,
                     out_path: str | None = None, resume: bool = False,
                     workers: int = 1,
                     progress: Callable[[int, int], None] | None = None,
                     ) -> list[SweepStatistic]:
    """Sweep only configurations where all selfish miners hold equal power."""
    if spec.selfish_count < 2:
        raise ValueError("equal-power scan needs at least two selfish miners")
    return _run_sweep(spec, list(equal_indices(spec)), base_seed, out_path,
                      resume, workers, progress)
