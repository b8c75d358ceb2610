"""Results CSV format shared by the sweep harness, analysis, and plots.

One row per swept configuration. The header is fixed so third-party
tools can rely on it; power and statistics columns for miners beyond the
configuration's size stay empty. Floats carry six fractional digits,
which also defines the lattice resolution surviving a round trip.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

HEADER = ("model,k,m1,m2,m3,m4,d,T,R,seed,"
          "mean_1,mean_2,mean_3,mean_4,ci_1,ci_2,ci_3,ci_4")
MAX_MINERS = 4


class MalformedResults(ValueError):
    """Results CSV cannot be parsed; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class SweepStatistic:
    """Mean rewards and 95% CI half-widths of one swept configuration."""

    model: str
    selfish_count: int
    powers: tuple[float, ...]      # all miners, honest last
    difficulty: float
    timesteps: int
    repetitions: int
    base_seed: int
    means: tuple[float, ...]
    ci_half_widths: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.powers)

    def key(self) -> tuple:
        """Identity of the swept point, used to skip completed work."""
        return stat_key(self.model, self.selfish_count, self.powers,
                        self.difficulty, self.timesteps, self.repetitions)


def _f6(x: float) -> str:
    return f"{x:.6f}"


def stat_key(model: str, selfish_count: int, powers: Sequence[float],
             difficulty: float, timesteps: int, repetitions: int) -> tuple:
    return (model, selfish_count, tuple(_f6(m) for m in powers),
            _f6(difficulty), timesteps, repetitions)


def _pad(values: Sequence[float]) -> list[str]:
    cells = [_f6(v) for v in values]
    return cells + [""] * (MAX_MINERS - len(cells))


def format_row(stat: SweepStatistic) -> str:
    if stat.n > MAX_MINERS:
        raise ValueError(f"results CSV holds at most {MAX_MINERS} miners")
    cells = [stat.model, str(stat.selfish_count)]
    cells += _pad(stat.powers)
    cells += [_f6(stat.difficulty), str(stat.timesteps),
              str(stat.repetitions), str(stat.base_seed)]
    cells += _pad(stat.means)
    cells += _pad(stat.ci_half_widths)
    return ",".join(cells)


def _parse_row(line_no: int, cells: list[str]) -> SweepStatistic:
    if len(cells) != len(HEADER.split(",")):
        raise MalformedResults(line_no, f"expected {len(HEADER.split(','))} "
                                        f"columns, got {len(cells)}")
    try:
        model = cells[0]
        k = int(cells[1])
        powers = tuple(float(c) for c in cells[2:6] if c != "")
        d = float(cells[6])
        t = int(cells[7])
        r = int(cells[8])
        seed = int(cells[9])
        means = tuple(float(c) for c in cells[10:14] if c != "")
        cis = tuple(float(c) for c in cells[14:18] if c != "")
    except ValueError as exc:
        raise MalformedResults(line_no, str(exc)) from None
    if model not in ("concurrent", "conventional"):
        raise MalformedResults(line_no, f"unknown model {model!r}")
    if not powers or len(means) != len(powers) or len(cis) != len(powers):
        raise MalformedResults(
            line_no, "power/mean/ci columns disagree on miner count")
    if not 0 <= k < len(powers):
        raise MalformedResults(line_no, f"selfish count {k} out of range")
    return SweepStatistic(
        model=model, selfish_count=k, powers=powers, difficulty=d,
        timesteps=t, repetitions=r, base_seed=seed, means=means,
        ci_half_widths=cis)


def read_stats(path: str) -> list[SweepStatistic]:
    stats = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != HEADER:
            raise MalformedResults(1, "missing or wrong header")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            stats.append(_parse_row(line_no, line.split(",")))
    return stats


def read_completed_keys(path: str) -> set[tuple]:
    if not os.path.exists(path):
        return set()
    return {s.key() for s in read_stats(path)}


class ResultsWriter:
    """Append-mode writer that flushes after every row (checkpointing)."""

    def __init__(self, path: str, append: bool = False):
        fresh = not (append and os.path.exists(path) and
                     os.path.getsize(path) > 0)
        self._fh = open(path, "a" if not fresh else "w", encoding="utf-8")
        if fresh:
            self._fh.write(HEADER + "\n")
            self._fh.flush()

    def write(self, stat: SweepStatistic) -> None:
        self._fh.write(format_row(stat) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "ResultsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_stats(path: str, stats: Iterable[SweepStatistic]) -> None:
    with ResultsWriter(path) as writer:
        for stat in stats:
            writer.write(stat)
