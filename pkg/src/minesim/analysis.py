"""Headline quantities derived from sweep statistics.

Everything here is a pure function of the statistics handed in (usually
read back from a results CSV): power-threshold bounds, equal-power
equilibrium classification, honest-power safety levels, the minimal-power
witness table, threshold interpolation, and the closed-form revenue of
the classic single-attacker withholding strategy used as an independent
oracle for the conventional model.

"Profiting" always means a mean reward strictly above the miner's own
relative power; bounds are reported at lattice resolution from point
estimates. Equilibrium stability additionally asks the CI lower bound to
clear the power, which separates configurations whose rewards merely
average above power from those reliably above it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .results_io import SweepStatistic


class EmptyGrid(ValueError):
    """No statistics supplied, or none match the requested slice."""


class NoSignChange(ValueError):
    """Reward curve never crosses the fair-share line."""


class DomainError(ValueError):
    """Closed-form revenue is undefined for the requested parameters."""


def _round6(x: float) -> float:
    return round(x, 6)


def _check_uniform(stats: Sequence[SweepStatistic]) -> None:
    if not stats:
        raise EmptyGrid("no sweep statistics supplied")
    models = {s.model for s in stats}
    ks = {s.selfish_count for s in stats}
    if len(models) > 1 or len(ks) > 1:
        raise ValueError(f"mixed grids: models={models}, selfish counts={ks}")


def _profits(stat: SweepStatistic, miner: int) -> bool:
    return stat.means[miner] > stat.powers[miner]


# --------------------------------------------------------------------------
# Power thresholds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdReport:
    model: str
    selfish_count: int
    lower_bound: float
    upper_bound: float | None
    lower_witness: SweepStatistic
    upper_blocker: SweepStatistic | None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "selfish_count": self.selfish_count,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_witness_powers": list(self.lower_witness.powers),
            "lower_witness_mean": self.lower_witness.means[0],
            "upper_blocker_powers":
                list(self.upper_blocker.powers) if self.upper_blocker else None,
            "upper_blocker_mean":
                self.upper_blocker.means[0] if self.upper_blocker else None,
        }


def threshold_bounds(stats: Sequence[SweepStatistic]) -> ThresholdReport:
    """Least power at which miner 1 can profit (some / every configuration).

    The lower bound is the smallest lattice power m1 where at least one
    configuration pays miner 1 more than m1; the upper bound is the
    start of the top lattice range where every configuration does.
    """
    _check_uniform(stats)
    levels: dict[float, list[SweepStatistic]] = defaultdict(list)
    for s in stats:
        levels[_round6(s.powers[0])].append(s)
    sorted_levels = sorted(levels)

    lower = None
    lower_witness = None
    for level in sorted_levels:
        winners = [s for s in levels[level] if _profits(s, 0)]
        if winners:
            lower = level
            lower_witness = max(winners, key=lambda s: s.means[0])
            break
    if lower is None:
        raise EmptyGrid("no profitable configuration anywhere on the grid")

    upper = None
    upper_blocker = None
    for level in reversed(sorted_levels):
        losers = [s for s in levels[level] if not _profits(s, 0)]
        if losers:
            upper_blocker = max(losers, key=lambda s: s.powers[0])
            break
        upper = level
    return ThresholdReport(
        model=stats[0].model, selfish_count=stats[0].selfish_count,
        lower_bound=lower, upper_bound=upper,
        lower_witness=lower_witness, upper_blocker=upper_blocker)


# --------------------------------------------------------------------------
# Equal-power equilibria
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NashPoint:
    power: float
    classification: str  # "stable" | "unstable" | "none"
    means: tuple[float, ...]
    ci_half_widths: tuple[float, ...]


@dataclass(frozen=True)
class NashReport:
    model: str
    selfish_count: int
    points: tuple[NashPoint, ...]
    stable_range: tuple[float, float] | None
    unstable_range: tuple[float, float] | None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "selfish_count": self.selfish_count,
            "stable_range": list(self.stable_range) if self.stable_range else None,
            "unstable_range":
                list(self.unstable_range) if self.unstable_range else None,
            "points": [
                {"power": p.power, "classification": p.classification,
                 "means": list(p.means), "ci": list(p.ci_half_widths)}
                for p in self.points
            ],
        }


def nash_classify(scan: Sequence[SweepStatistic]) -> NashReport:
    """Classify equal-power points as stable/unstable equilibria.

    A point is an equilibrium when every selfish miner's mean reward
    beats the shared power; it is stable when every CI lower bound does
    too, unstable when only the means do.
    """
    _check_uniform(scan)
    k = scan[0].selfish_count
    points = []
    for s in sorted(scan, key=lambda s: s.powers[0]):
        m = _round6(s.powers[0])
        selfish_powers = {_round6(p) for p in s.powers[:k]}
        if selfish_powers != {m}:
            raise ValueError(f"not an equal-power configuration: {s.powers}")
        means = s.means[:k]
        lows = [mu - ci for mu, ci in zip(means, s.ci_half_widths[:k])]
        if all(mu > m for mu in means):
            cls = "stable" if all(lo > m for lo in lows) else "unstable"
        else:
            cls = "none"
        points.append(NashPoint(power=m, classification=cls,
                                means=s.means, ci_half_widths=s.ci_half_widths))

    def span(cls: str) -> tuple[float, float] | None:
        vals = [p.power for p in points if p.classification == cls]
        return (min(vals), max(vals)) if vals else None

    return NashReport(model=scan[0].model, selfish_count=k,
                      points=tuple(points), stable_range=span("stable"),
                      unstable_range=span("unstable"))


# --------------------------------------------------------------------------
# Safety levels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SafetyReport:
    model: str
    selfish_count: int
    lower_bound: float
    upper_bound: float | None
    lower_witness: SweepStatistic
    upper_blocker: SweepStatistic | None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "selfish_count": self.selfish_count,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_witness_powers": list(self.lower_witness.powers),
            "upper_blocker_powers":
                list(self.upper_blocker.powers) if self.upper_blocker else None,
        }


def _config_safe(stat: SweepStatistic) -> bool:
    return not any(_profits(stat, i) for i in range(stat.selfish_count))


def safety_bounds(stats: Sequence[SweepStatistic]) -> SafetyReport:
    """Honest power needed to deny selfish profit (some / every configuration).

    Grouping is by the honest miner's power: the lower bound is the
    least honest power with at least one configuration where no selfish
    miner profits, the upper bound the least honest power above which
    none ever does.
    """
    _check_uniform(stats)
    levels: dict[float, list[SweepStatistic]] = defaultdict(list)
    for s in stats:
        levels[_round6(s.powers[-1])].append(s)
    sorted_levels = sorted(levels)

    lower = None
    lower_witness = None
    for level in sorted_levels:
        safe = [s for s in levels[level] if _config_safe(s)]
        if safe:
            lower = level
            lower_witness = safe[0]
            break
    if lower is None:
        raise EmptyGrid("no safe configuration anywhere on the grid")

    upper = None
    upper_blocker = None
    for level in reversed(sorted_levels):
        unsafe = [s for s in levels[level] if not _config_safe(s)]
        if unsafe:
            upper_blocker = unsafe[0]
            break
        upper = level
    return SafetyReport(
        model=stats[0].model, selfish_count=stats[0].selfish_count,
        lower_bound=lower, upper_bound=upper,
        lower_witness=lower_witness, upper_blocker=upper_blocker)


# --------------------------------------------------------------------------
# Minimal-power witness table
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MinPowerRow:
    m2: float
    m3_lo: float
    m3_hi: float


@dataclass(frozen=True)
class MinPowerTable:
    model: str
    m1: float
    rows: tuple[MinPowerRow, ...]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "m1": self.m1,
            "rows": [{"m2": r.m2, "m3_lo": r.m3_lo, "m3_hi": r.m3_hi}
                     for r in self.rows],
        }


def min_power_table(stats: Sequence[SweepStatistic]) -> MinPowerTable:
    """Witness ranges at the minimal profiting miner-1 power (3 selfish).

    For the smallest m1 where miner 1 profits at all, lists per m2 the
    contiguous m3 lattice ranges in which it does.
    """
    _check_uniform(stats)
    if stats[0].selfish_count != 3:
        raise ValueError("minimal-power table is defined for 3 selfish miners")
    m1 = threshold_bounds(stats).lower_bound
    slice_stats = [s for s in stats if _round6(s.powers[0]) == m1]
    by_m2: dict[float, list[SweepStatistic]] = defaultdict(list)
    for s in slice_stats:
        by_m2[_round6(s.powers[1])].append(s)

    granularity = _grid_step(sorted({_round6(s.powers[1]) for s in slice_stats}))
    rows = []
    for m2 in sorted(by_m2):
        winning = sorted(_round6(s.powers[2]) for s in by_m2[m2]
                         if _profits(s, 0))
        for lo, hi in _contiguous_runs(winning, granularity):
            rows.append(MinPowerRow(m2=m2, m3_lo=lo, m3_hi=hi))
    return MinPowerTable(model=stats[0].model, m1=m1, rows=tuple(rows))


def _grid_step(values: Sequence[float]) -> float:
    diffs = {_round6(b - a) for a, b in zip(values, values[1:])}
    return min(diffs) if diffs else 0.01


def _contiguous_runs(values: Sequence[float],
                     step: float) -> Iterable[tuple[float, float]]:
    if not values:
        return
    start = prev = values[0]
    for v in values[1:]:
        if abs(v - prev - step) > 1e-9:
            yield (start, prev)
            start = v
        prev = v
    yield (start, prev)


# --------------------------------------------------------------------------
# Threshold interpolation
# --------------------------------------------------------------------------

def interpolate_threshold(powers: Sequence[float],
                          means: Sequence[float]) -> float:
    """Root of mean(m) - m via a shape-preserving piecewise cubic.

    Expects the single-selfish reward curve; the root is bracketed by
    the last lattice cell where the excess reward changes sign.
    """
    if len(powers) != len(means) or len(powers) < 2:
        raise ValueError("need at least two (power, mean) samples")
    order = sorted(range(len(powers)), key=lambda i: powers[i])
    xs = [powers[i] for i in order]
    fs = [means[i] - powers[i] for i in order]
    bracket = None
    for i in range(len(xs) - 1):
        if fs[i] <= 0.0 < fs[i + 1]:
            bracket = i
    if bracket is None:
        raise NoSignChange("reward excess never crosses zero")
    interp = PchipInterpolator(xs, fs)
    if fs[bracket] == 0.0:
        return xs[bracket]
    return float(brentq(interp, xs[bracket], xs[bracket + 1]))


def interpolate_threshold_stats(stats: Sequence[SweepStatistic]) -> float:
    _check_uniform(stats)
    pts = sorted(stats, key=lambda s: s.powers[0])
    return interpolate_threshold([s.powers[0] for s in pts],
                                 [s.means[0] for s in pts])


# --------------------------------------------------------------------------
# Conventional-model closed-form oracle
# --------------------------------------------------------------------------

def oracle_revenue(alpha: float, gamma: float) -> float:
    """Long-run relative revenue of a single withholding miner.

    ``alpha`` is the attacker's power, ``gamma`` the share of honest
    power that mines on the attacker's branch during a tie race.
    """
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"alpha must lie in [0, 0.5): {alpha}")
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1]: {gamma}")
    num = alpha * (1 - alpha) ** 2 * (4 * alpha + gamma * (1 - 2 * alpha)) \
        - alpha ** 3
    den = 1 - alpha * (1 + (2 - alpha) * alpha)
    return num / den


def analytic_threshold(gamma: float) -> float:
    """Power above which withholding beats honest mining, as a function
    of the tie-race split."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1]: {gamma}")
    return (1 - gamma) / (3 - 2 * gamma)
