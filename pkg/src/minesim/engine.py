"""Single-run simulation engine for both mining models.

Two interchangeable execution paths produce bit-identical outcomes for
the same seed:

* the kernel path (default): mining successes are extracted from a
  pre-drawn uniform matrix with numpy and the event loop runs in
  :mod:`minesim._kernel` (numba-compiled unless disabled);
* the reference path: an object-level engine built on
  :class:`~minesim.chain.BlockTree` and the strategy classes, kept
  deliberately close to the model description and used as the oracle in
  tests.

Random draw order per run (one PCG64 generator): first the whole mining
matrix, ``timesteps x miners`` uniforms for the concurrent model or
``timesteps x 1`` for the conventional one, then delivery-order uniforms
in event order (one per Fisher-Yates swap, recipients in index order,
single-message rounds draw nothing).

Timestep protocol, concurrent model: every miner runs an independent
Bernoulli trial with success probability ``power * difficulty`` on the
tip it held at the end of the previous step; all resulting publications
are broadcast in delivery rounds until quiescence, each recipient
receiving each round's messages in its own uniformly random order.
The conventional model instead samples exactly one winner per step with
probabilities equal to the powers (difficulty unused).

Miners ``1..k`` (the first ``selfish_count``) are selfish, the rest
honest; the last miner is always honest and its adopted tip after the
optional end-of-run flush defines the winning chain for rewards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _kernel
from .chain import BlockTree
from .strategies import HonestStrategy, PublishAction, SelfishStrategy

CONCURRENT = "concurrent"
CONVENTIONAL = "conventional"

Model = Literal["concurrent", "conventional"]

_POWER_TOL = 1e-9


class InvalidPowerConfiguration(ValueError):
    """Powers, difficulty, or selfish count violate the model contract."""


@dataclass(frozen=True)
class PowerConfiguration:
    """Relative powers of all miners plus the per-step difficulty scale.

    ``powers[i] * difficulty`` is miner i's per-step success probability
    in the concurrent model. The first ``selfish_count`` miners run the
    selfish strategy (default: all but the last).
    """

    powers: tuple[float, ...]
    difficulty: float = 0.5
    selfish_count: int | None = None

    def __post_init__(self) -> None:
        powers = tuple(float(m) for m in self.powers)
        object.__setattr__(self, "powers", powers)
        if not powers:
            raise InvalidPowerConfiguration("at least one miner required")
        if any(m < 0.0 or m > 1.0 for m in powers):
            raise InvalidPowerConfiguration(f"powers must lie in [0,1]: {powers}")
        total = sum(powers)
        if abs(total - 1.0) > _POWER_TOL:
            raise InvalidPowerConfiguration(
                f"powers must sum to 1 (got {total!r})")
        if not 0.0 <= self.difficulty <= 1.0:
            raise InvalidPowerConfiguration(
                f"difficulty must lie in [0,1]: {self.difficulty}")
        if self.selfish_count is None:
            object.__setattr__(self, "selfish_count", len(powers) - 1)
        if not 0 <= self.selfish_count <= len(powers) - 1:
            raise InvalidPowerConfiguration(
                "selfish_count must leave at least one honest miner")

    @property
    def n(self) -> int:
        return len(self.powers)

    def success_probs(self) -> np.ndarray:
        return np.asarray(self.powers, dtype=np.float64) * self.difficulty

    def cumulative_powers(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.powers, dtype=np.float64))


@dataclass(frozen=True)
class RunConfig:
    model: Model = CONCURRENT
    timesteps: int = 200_000
    seed: int = 0
    flush_at_end: bool = True

    def __post_init__(self) -> None:
        if self.model not in (CONCURRENT, CONVENTIONAL):
            raise ValueError(f"unknown model {self.model!r}")
        if self.timesteps < 1:
            raise ValueError("timesteps must be >= 1")


@dataclass(frozen=True)
class RunOutcome:
    """Winning-chain accounting for one seeded run."""

    model: str
    winning_tip: int
    chain_length: int
    blocks_per_miner: tuple[int, ...]
    rewards: tuple[float, ...]
    blocks_mined: int


def _outcome(model: str, win: int, chain_len: int, counts, mined: int) -> RunOutcome:
    counts = tuple(int(c) for c in counts)
    if chain_len > 0:
        rewards = tuple(c / chain_len for c in counts)
    else:
        rewards = tuple(0.0 for _ in counts)
    return RunOutcome(
        model=model, winning_tip=int(win), chain_length=int(chain_len),
        blocks_per_miner=counts, rewards=rewards, blocks_mined=int(mined))


# --------------------------------------------------------------------------
# Kernel path
# --------------------------------------------------------------------------

def _mining_events(config: RunConfig, powers: PowerConfiguration,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw the mining matrix and flatten it into (step, miner) events."""
    t = config.timesteps
    if config.model == CONCURRENT:
        u = rng.random((t, powers.n))
        flat = np.flatnonzero(u < powers.success_probs())
        step = flat // powers.n
        return step.astype(np.int64), (flat - step * powers.n).astype(np.int64)
    u = rng.random((t, 1))[:, 0]
    cum = powers.cumulative_powers()
    winners = np.minimum(np.searchsorted(cum, u, side="right"), powers.n - 1)
    return np.arange(t, dtype=np.int64), winners.astype(np.int64)


def run_kernel(config: RunConfig, powers: PowerConfiguration) -> RunOutcome:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    ev_step, ev_miner = _mining_events(config, powers, rng)
    counts, chain_len, win, mined = _kernel._simulate(
        rng, powers.n, powers.selfish_count, ev_step, ev_miner,
        config.flush_at_end, ev_step.size + 1)
    return _outcome(config.model, win, chain_len, counts, mined)


# --------------------------------------------------------------------------
# Reference path (object engine; oracle for the kernel)
# --------------------------------------------------------------------------

@dataclass
class RunState:
    """Mutable world state of one reference-engine run."""

    powers: PowerConfiguration
    tree: BlockTree
    strategies: list[HonestStrategy | SelfishStrategy]
    known: list[set[int]]
    mining_base: list[int]
    next_id: int = 1
    published: set[int] = field(default_factory=set)


def new_run_state(powers: PowerConfiguration) -> RunState:
    tree = BlockTree()
    tree.add_genesis(0)
    k = powers.selfish_count
    strategies: list[HonestStrategy | SelfishStrategy] = []
    for i in range(powers.n):
        if i < k:
            strategies.append(SelfishStrategy(
                public_tip=0, public_height=0, private_tip=0, private_height=0))
        else:
            strategies.append(HonestStrategy(adopted_tip=0, adopted_height=0))
    return RunState(
        powers=powers, tree=tree, strategies=strategies,
        known=[{0} for _ in range(powers.n)],
        mining_base=[0] * powers.n)


def _publish(state: RunState, action: PublishAction,
             queue: list[tuple[int, ...]]) -> None:
    if not action:
        return
    for bid in action.blocks:
        if bid in state.published:
            raise AssertionError(f"block {bid} published twice")
        state.published.add(bid)
    queue.append(tuple(action.blocks))


def _mine(state: RunState, successes: list[int]) -> list[tuple[int, ...]]:
    """Create one block per successful miner; collect their publications."""
    messages: list[tuple[int, ...]] = []
    for m in successes:
        block = state.tree.insert(state.next_id, state.mining_base[m], m)
        state.next_id += 1
        state.known[m].add(block.id)
        _publish(state, state.strategies[m].on_self_mined(block), messages)
    return messages


def _permuted(messages: list[tuple[int, ...]],
              rng: np.random.Generator) -> list[tuple[int, ...]]:
    order = list(messages)
    for j in range(len(order) - 1, 0, -1):
        sw = int(rng.random() * (j + 1))
        order[j], order[sw] = order[sw], order[j]
    return order


def _deliver(state: RunState, rng: np.random.Generator,
             messages: list[tuple[int, ...]]) -> None:
    """Run broadcast rounds until quiescence (see module docstring)."""
    current = messages
    while current:
        reactions: list[tuple[int, ...]] = []
        for r in range(state.powers.n):
            order = _permuted(current, rng) if len(current) > 1 else current
            for msg in order:
                for bid in msg:
                    if bid in state.known[r]:
                        continue
                    state.known[r].add(bid)
                    action = state.strategies[r].on_received(state.tree.get(bid))
                    _publish(state, action, reactions)
        current = reactions


def _update_bases(state: RunState) -> None:
    for i, strat in enumerate(state.strategies):
        state.mining_base[i] = strat.mining_base


def _step_with_successes(state: RunState, successes: list[int],
                         rng: np.random.Generator) -> None:
    _deliver(state, rng, _mine(state, successes))
    _update_bases(state)


def step_concurrent(state: RunState, rng: np.random.Generator) -> RunState:
    """Advance one timestep of the concurrent model (mutates ``state``)."""
    row = rng.random(state.powers.n)
    probs = state.powers.success_probs()
    successes = [i for i in range(state.powers.n) if row[i] < probs[i]]
    _step_with_successes(state, successes, rng)
    return state


def step_conventional(state: RunState, rng: np.random.Generator) -> RunState:
    """Advance one timestep of the conventional model (mutates ``state``)."""
    u = rng.random()
    cum = state.powers.cumulative_powers()
    winner = int(np.searchsorted(cum, u, side="right"))
    winner = min(winner, state.powers.n - 1)
    _step_with_successes(state, [winner], rng)
    return state


def flush_private_branches(state: RunState, rng: np.random.Generator) -> None:
    """Publish all remaining private branches in one final round."""
    messages: list[tuple[int, ...]] = []
    for i in range(state.powers.selfish_count):
        _publish(state, state.strategies[i].flush(), messages)
    _deliver(state, rng, messages)


def run_reference(config: RunConfig, powers: PowerConfiguration) -> RunOutcome:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    state = new_run_state(powers)
    t = config.timesteps
    if config.model == CONCURRENT:
        mine_u = rng.random((t, powers.n))
        probs = powers.success_probs()
        for step in range(t):
            row = mine_u[step]
            successes = [i for i in range(powers.n) if row[i] < probs[i]]
            if successes:
                _step_with_successes(state, successes, rng)
    else:
        mine_u = rng.random((t, 1))[:, 0]
        cum = powers.cumulative_powers()
        winners = np.minimum(
            np.searchsorted(cum, mine_u, side="right"), powers.n - 1)
        for step in range(t):
            _step_with_successes(state, [int(winners[step])], rng)
    if config.flush_at_end:
        flush_private_branches(state, rng)
    honest_tip = state.strategies[-1].adopted_tip
    chain_len = state.tree.height(honest_tip)
    owner_counts = state.tree.owner_counts(honest_tip)
    counts = [owner_counts.get(i, 0) for i in range(powers.n)]
    return _outcome(config.model, honest_tip, chain_len, counts,
                    state.next_id - 1)


def run(config: RunConfig, powers: PowerConfiguration,
        backend: str = "kernel") -> RunOutcome:
    """Execute one seeded run and return its winning-chain accounting.

    Identical (config, powers) pairs give identical outcomes on both
    backends; "reference" is the slow object engine used for testing.
    """
    if backend == "kernel":
        return run_kernel(config, powers)
    if backend == "reference":
        return run_reference(config, powers)
    raise ValueError(f"unknown backend {backend!r}")
