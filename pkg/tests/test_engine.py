import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from minesim.engine import (CONCURRENT, CONVENTIONAL, InvalidPowerConfiguration,
                            PowerConfiguration, RunConfig, RunState,
                            _step_with_successes, flush_private_branches,
                            new_run_state, run, run_kernel, run_reference,
                            step_concurrent, step_conventional)

CONFIGS = [
    ((1.0,), 0),
    ((0.35, 0.65), 1),
    ((0.38, 0.62), 1),
    ((0.4, 0.3, 0.3), 0),
    ((0.29, 0.29, 0.42), 2),
    ((0.45, 0.45, 0.10), 2),
    ((0.23, 0.2, 0.2, 0.37), 3),
]


def test_power_configuration_validation():
    with pytest.raises(InvalidPowerConfiguration):
        PowerConfiguration((0.5, 0.6))
    with pytest.raises(InvalidPowerConfiguration):
        PowerConfiguration((0.5, 0.5), difficulty=1.5)
    with pytest.raises(InvalidPowerConfiguration):
        PowerConfiguration((-0.1, 1.1))
    with pytest.raises(InvalidPowerConfiguration):
        PowerConfiguration((0.5, 0.5), selfish_count=2)
    with pytest.raises(InvalidPowerConfiguration):
        PowerConfiguration(())
    pc = PowerConfiguration((0.4, 0.6))
    assert pc.selfish_count == 1


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(model="both")
    with pytest.raises(ValueError):
        RunConfig(timesteps=0)


@pytest.mark.parametrize("model", [CONCURRENT, CONVENTIONAL])
def test_determinism(model):
    cfg = RunConfig(model=model, timesteps=5000, seed=42)
    pc = PowerConfiguration((0.35, 0.65))
    assert run(cfg, pc) == run(cfg, pc)
    assert run(cfg, pc) != run(RunConfig(model=model, timesteps=5000, seed=43), pc)


@pytest.mark.parametrize("model", [CONCURRENT, CONVENTIONAL])
@pytest.mark.parametrize("powers,k", CONFIGS)
def test_kernel_matches_reference(model, powers, k):
    for seed in (0, 1, 2024):
        cfg = RunConfig(model=model, timesteps=1200, seed=seed)
        pc = PowerConfiguration(powers, 0.5, k)
        assert run_kernel(cfg, pc) == run_reference(cfg, pc)


def test_rewards_partition_the_chain():
    for seed in range(5):
        cfg = RunConfig(timesteps=3000, seed=seed)
        pc = PowerConfiguration((0.3, 0.3, 0.4), selfish_count=2)
        out = run(cfg, pc)
        assert out.chain_length > 0
        assert sum(out.blocks_per_miner) == out.chain_length
        assert math.isclose(sum(out.rewards), 1.0, abs_tol=1e-12)
        assert all(0.0 <= r <= 1.0 for r in out.rewards)


def test_zero_difficulty_concurrent_mines_nothing():
    cfg = RunConfig(timesteps=500, seed=1)
    out = run(cfg, PowerConfiguration((0.5, 0.5), difficulty=0.0))
    assert out.blocks_mined == 0
    assert out.chain_length == 0
    assert out.rewards == (0.0, 0.0)


def test_conventional_ignores_difficulty():
    cfg = RunConfig(model=CONVENTIONAL, timesteps=400, seed=3)
    pc = PowerConfiguration((0.5, 0.5), difficulty=0.0, selfish_count=0)
    out = run(cfg, pc)
    assert out.blocks_mined == 400
    assert out.chain_length == 400


def test_single_honest_miner_owns_everything():
    cfg = RunConfig(timesteps=1000, seed=11)
    out = run(cfg, PowerConfiguration((1.0,), difficulty=0.5, selfish_count=0))
    assert out.rewards == (1.0,)
    assert out.chain_length == out.blocks_mined
    # Bernoulli(0.5) over 1000 steps: comfortably within 6 sigma.
    assert 400 < out.chain_length < 600


def test_all_honest_conventional_chain_is_exact():
    cfg = RunConfig(model=CONVENTIONAL, timesteps=2000, seed=5)
    pc = PowerConfiguration((0.6, 0.4), selfish_count=0)
    out = run(cfg, pc)
    assert out.chain_length == 2000
    assert out.blocks_mined == 2000
    # No forks: every block lands on the chain, rewards ~ powers.
    assert abs(out.rewards[0] - 0.6) < 0.05


def test_all_honest_concurrent_growth_bounds():
    pc = PowerConfiguration((0.4, 0.3, 0.3), selfish_count=0)
    probs = pc.success_probs()
    t = 20_000
    rates = []
    for seed in range(3):
        out = run(RunConfig(timesteps=t, seed=seed), pc)
        assert out.chain_length <= out.blocks_mined
        rates.append(out.chain_length / t)
    mean_rate = sum(rates) / len(rates)
    assert max(probs) - 0.02 <= mean_rate <= sum(probs)


def test_flush_flag_controls_final_branch():
    # A dominant selfish miner ends with a long private branch; without
    # the flush it is never published and the honest chain wins.
    pc = PowerConfiguration((0.9, 0.1), selfish_count=1)
    cfg = RunConfig(timesteps=300, seed=9, flush_at_end=True)
    flushed = run(cfg, pc)
    bare = run(RunConfig(timesteps=300, seed=9, flush_at_end=False), pc)
    assert flushed.rewards[0] > bare.rewards[0]
    assert flushed.chain_length > bare.chain_length


def test_step_functions_are_usable_directly():
    pc = PowerConfiguration((0.5, 0.5), difficulty=1.0)
    rng = np.random.Generator(np.random.PCG64(0))
    state = new_run_state(pc)
    for _ in range(50):
        step_concurrent(state, rng)
    # Per-miner success probability is 0.5 here, so ~50 blocks total.
    assert 20 < len(state.tree) <= 101
    state = new_run_state(pc)
    for _ in range(50):
        step_conventional(state, rng)
    assert len(state.tree) == 51  # exactly one block per step
    assert state.strategies[1].adopted_height <= 50


# --------------------------------------------------------------------------
# Hand-traced protocol scenarios (scripted successes, reference engine)
# --------------------------------------------------------------------------

def scripted_state(powers, k):
    pc = PowerConfiguration(powers, 0.5, k)
    return new_run_state(pc), np.random.Generator(np.random.PCG64(0))


def test_trace_lead_two_reveal_orphans_honest_block():
    # Selfish builds a hidden lead of two, honest finds one block: the
    # reveal wins by one and the honest block is orphaned.
    state, rng = scripted_state((0.5, 0.5), 1)
    _step_with_successes(state, [0], rng)      # s1 hidden
    _step_with_successes(state, [0], rng)      # s2 hidden
    _step_with_successes(state, [1], rng)      # honest c1 triggers reveal
    honest = state.strategies[1]
    chain = state.tree.chain_to_genesis(honest.adopted_tip)
    assert [b.owner for b in chain] == [0, 0]
    assert honest.adopted_height == 2


def test_trace_simultaneous_blocks_keep_first_received():
    # Honest miner and a lead-1 selfish miner mine in the same timestep:
    # the selfish tie block arrives a round after the honest miner
    # adopted its own block, so the honest tip does not move.
    state, rng = scripted_state((0.5, 0.5), 1)
    _step_with_successes(state, [0], rng)      # selfish hides s1
    _step_with_successes(state, [0, 1], rng)   # both mine simultaneously
    honest = state.strategies[1]
    selfish = state.strategies[0]
    # Selfish extended to lead 2 in phase A, then the honest block
    # triggered the full reveal: honest adopts the selfish chain tip.
    assert honest.adopted_height == 2
    assert state.tree.get(honest.adopted_tip).owner == 0
    assert selfish.private_branch == []


def test_trace_tie_race_honest_keeps_own_block():
    # Pure tie: selfish at lead 1, only honest mines. Honest keeps its
    # own block; both competing blocks are public afterwards.
    state, rng = scripted_state((0.5, 0.5), 1)
    _step_with_successes(state, [0], rng)
    _step_with_successes(state, [1], rng)
    honest = state.strategies[1]
    assert state.tree.get(honest.adopted_tip).owner == 1
    assert honest.adopted_height == 1
    assert state.published == {1, 2}


def test_trace_deep_race_resolution():
    # After the selfish miner wins a tie while the honest miner mines
    # simultaneously, both chains stand at equal height. Whoever mines
    # next settles it; here the selfish miner does and publishes at once.
    state, rng = scripted_state((0.5, 0.5), 1)
    _step_with_successes(state, [0], rng)        # s1 hidden
    _step_with_successes(state, [1], rng)        # tie race s1 vs c1
    _step_with_successes(state, [0, 1], rng)     # s2 published, c2 mined
    honest = state.strategies[1]
    assert state.tree.get(honest.adopted_tip).owner == 1   # first received
    _step_with_successes(state, [0], rng)        # s3 resolves the race
    assert state.tree.get(honest.adopted_tip).owner == 0
    chain = state.tree.chain_to_genesis(honest.adopted_tip)
    assert [b.owner for b in chain] == [0, 0, 0]


def test_no_block_published_twice_in_long_runs():
    # The reference engine asserts on double publication internally;
    # drive it through racy regimes to exercise the claim.
    for seed in (0, 7):
        cfg = RunConfig(timesteps=800, seed=seed)
        run_reference(cfg, PowerConfiguration((0.45, 0.45, 0.1), 0.5, 2))


def test_numpy_fallback_matches_numba_backend():
    code = (
        "import json\n"
        "from minesim.engine import PowerConfiguration, RunConfig, run\n"
        "out = run(RunConfig(timesteps=1500, seed=5),"
        " PowerConfiguration((0.38, 0.62)))\n"
        "print(json.dumps([out.winning_tip, out.chain_length,"
        " list(out.blocks_per_miner), out.blocks_mined]))\n"
    )
    env = dict(os.environ)
    results = {}
    for backend, flag in (("numba", "0"), ("numpy", "1")):
        env["MINESIM_NO_NUMBA"] = flag
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True, check=True)
        results[backend] = proc.stdout.strip()
    assert results["numba"] == results["numpy"]


def test_kernel_matches_reference_randomized():
    # Random configurations over 1..5 miners, both models, random
    # difficulty, selfish count, horizon, and flush flag.
    import random
    rnd = random.Random(3)
    for _ in range(25):
        n = rnd.randint(1, 5)
        cuts = sorted(rnd.sample(range(1, 100), n - 1)) if n > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [100])]
        powers = tuple(p / 100 for p in parts)
        cfg = RunConfig(model=rnd.choice((CONCURRENT, CONVENTIONAL)),
                        timesteps=rnd.randint(1, 600),
                        seed=rnd.getrandbits(63),
                        flush_at_end=rnd.random() < 0.8)
        pc = PowerConfiguration(powers, rnd.choice((0.1, 0.5, 1.0)),
                                rnd.randint(0, n - 1))
        assert run_kernel(cfg, pc) == run_reference(cfg, pc)
