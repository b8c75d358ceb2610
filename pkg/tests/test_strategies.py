"""Strategy state machines, including the exhaustive transition oracle.

The oracle is a deliberately naive restatement of the classic
withholding algorithm over whole chains: it tracks the public and
private chains as block-id lists and recomputes every decision from
their lengths. Replaying every mining-outcome sequence of bounded
length through the real engine must reproduce the oracle's chains and
its published set exactly.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minesim.chain import Block
from minesim.engine import (PowerConfiguration, _step_with_successes,
                            flush_private_branches, new_run_state)
from minesim.strategies import (EMPTY, HonestStrategy, ParentMismatch,
                                PublishAction, SelfishStrategy)
from oracles import ChainOracle


def blk(bid, parent, owner, height):
    return Block(id=bid, parent=parent, owner=owner, height=height)


# --------------------------------------------------------------------------
# Honest strategy
# --------------------------------------------------------------------------

def test_honest_publishes_own_block():
    h = HonestStrategy(adopted_tip=0, adopted_height=0)
    action = h.on_self_mined(blk(1, 0, 1, 1))
    assert action.blocks == (1,)
    assert h.adopted_tip == 1
    action = h.on_self_mined(blk(2, 1, 1, 2))
    assert action.blocks == (2,)
    assert h.adopted_tip == 2


def test_honest_parent_mismatch():
    h = HonestStrategy(adopted_tip=0, adopted_height=0)
    with pytest.raises(ParentMismatch):
        h.on_self_mined(blk(5, 3, 1, 4))


def test_honest_adopts_strictly_higher_only():
    h = HonestStrategy(adopted_tip=10, adopted_height=5)
    assert h.on_received(blk(11, 10, 2, 6)) == EMPTY
    assert h.adopted_tip == 11
    # Equal height: first received stays.
    h.on_received(blk(12, 10, 2, 6))
    assert h.adopted_tip == 11
    # Stale block: ignored.
    h.on_received(blk(13, 0, 2, 3))
    assert h.adopted_tip == 11


def test_honest_never_withholds():
    h = HonestStrategy(adopted_tip=0, adopted_height=0)
    for i in range(1, 6):
        assert len(h.on_self_mined(blk(i, i - 1, 1, i)).blocks) == 1
    assert h.flush() == EMPTY


# --------------------------------------------------------------------------
# Selfish strategy: pointwise transitions
# --------------------------------------------------------------------------

def fresh_selfish():
    return SelfishStrategy(public_tip=0, public_height=0,
                           private_tip=0, private_height=0)


def test_selfish_withholds_first_block():
    s = fresh_selfish()
    assert s.on_self_mined(blk(1, 0, 0, 1)) == EMPTY
    assert s.lead == 1
    assert s.private_branch == [1]


def test_selfish_extends_hidden_lead_silently():
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    s.on_self_mined(blk(2, 1, 0, 2))
    assert s.on_self_mined(blk(3, 2, 0, 3)) == EMPTY
    assert s.lead == 3
    assert s.private_branch_len == 3


def test_selfish_parent_mismatch():
    s = fresh_selfish()
    with pytest.raises(ParentMismatch):
        s.on_self_mined(blk(1, 42, 0, 1))


def test_selfish_abandons_on_lead_zero():
    s = fresh_selfish()
    assert s.on_received(blk(1, 0, 1, 1)) == EMPTY
    assert s.private_tip == 1
    assert s.public_tip == 1
    assert s.private_branch == []


def test_selfish_ignores_stale_and_equal_foreign_blocks():
    s = fresh_selfish()
    s.on_received(blk(1, 0, 1, 1))       # adopt height 1
    s.on_self_mined(blk(2, 1, 0, 2))     # hidden lead 1
    assert s.on_received(blk(3, 0, 2, 1)) == EMPTY   # equal to public tip
    assert s.public_tip == 1
    assert s.lead == 1


def test_selfish_publishes_tie_block_at_lead_one():
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    action = s.on_received(blk(2, 0, 1, 1))
    assert action.blocks == (1,)
    assert s.private_tip == 1          # keeps mining its own branch
    assert s.public_tip == 2
    assert s.private_branch_len == 1   # branch unchanged, now published


def test_selfish_wins_tie_race_by_mining():
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    s.on_received(blk(2, 0, 1, 1))          # tie race begins
    action = s.on_self_mined(blk(3, 1, 0, 2))
    # Only the new block goes out; the tie block is already public.
    assert action.blocks == (3,)
    assert s.private_branch == []
    assert s.public_tip == 3


def test_selfish_cashes_in_at_lead_two():
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    s.on_self_mined(blk(2, 1, 0, 2))
    action = s.on_received(blk(3, 0, 1, 1))
    assert action.blocks == (1, 2)
    assert s.private_branch == []
    assert s.public_tip == 2
    assert s.lead == 0


def test_selfish_drips_oldest_block_when_far_ahead():
    s = fresh_selfish()
    for i in range(1, 5):
        s.on_self_mined(blk(i, i - 1, 0, i))
    action = s.on_received(blk(10, 0, 1, 1))
    assert action.blocks == (1,)
    assert s.private_branch_len == 4
    action = s.on_received(blk(11, 10, 1, 2))
    assert action.blocks == (2,)
    # Lead dropped to 2: next public block flushes the rest.
    action = s.on_received(blk(12, 11, 1, 3))
    assert action.blocks == (3, 4)
    assert s.private_branch == []


def test_contested_own_tip_publishes_next_block():
    # The miner revealed its branch and mines openly on its own tip; a
    # concurrent rival of equal height arrives and loses first-received.
    # Winning the next block must settle the race in public immediately.
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    s.on_received(blk(2, 0, 1, 1))       # tie race
    s.on_self_mined(blk(3, 1, 0, 2))     # race won, mining openly on 3
    assert s.on_received(blk(4, 2, 1, 2)) == EMPTY   # rival at equal height
    action = s.on_self_mined(blk(5, 3, 0, 3))
    assert action.blocks == (5,)         # published, not withheld
    assert s.public_tip == 5
    assert s.private_branch == []


def test_foreign_tip_tie_does_not_trigger_publication():
    # Equal-height rival to a tip the miner merely adopted: state 0
    # withholding applies, the race is somebody else's.
    s = fresh_selfish()
    s.on_received(blk(1, 0, 1, 1))       # adopt foreign tip
    assert s.on_received(blk(2, 0, 2, 1)) == EMPTY
    action = s.on_self_mined(blk(3, 1, 0, 2))
    assert action == EMPTY               # withheld as usual
    assert s.lead == 1


def test_flush_publishes_remainder_once():
    s = fresh_selfish()
    for i in range(1, 4):
        s.on_self_mined(blk(i, i - 1, 0, i))
    action = s.flush()
    assert action.blocks == (1, 2, 3)
    assert s.flush() == EMPTY
    assert s.private_branch == []


def test_flush_skips_already_published_tie_block():
    s = fresh_selfish()
    s.on_self_mined(blk(1, 0, 0, 1))
    s.on_received(blk(2, 0, 1, 1))       # tie block 1 published
    assert s.flush() == EMPTY


# --------------------------------------------------------------------------
# Exhaustive oracle comparison
# --------------------------------------------------------------------------

@pytest.mark.parametrize("length", range(1, 7))
def test_selfish_machine_matches_chain_oracle(length):
    powers = PowerConfiguration((0.5, 0.5), 0.5, 1)
    rng = np.random.Generator(np.random.PCG64(0))
    for outcome in itertools.product((0, 1), repeat=length):
        state = new_run_state(powers)
        oracle = ChainOracle()
        for miner in outcome:
            _step_with_successes(state, [miner], rng)
            if miner == 0:
                oracle.selfish_mines()
            else:
                oracle.honest_mines()
            assert state.published | {0} == oracle.public_ids, (
                f"published sets diverge after {outcome}")
            honest_chain = [0] + [
                b.id for b in state.tree.chain_to_genesis(
                    state.strategies[1].adopted_tip)]
            assert honest_chain == oracle.public, (
                f"public chain diverges after {outcome}")
            selfish = state.strategies[0]
            private_chain = [0] + [
                b.id for b in state.tree.chain_to_genesis(selfish.private_tip)]
            assert private_chain == oracle.private, (
                f"private chain diverges after {outcome}")
            assert selfish.private_branch_len == oracle.branch_len
        flush_private_branches(state, rng)
        oracle.flush()
        final_chain = [0] + [
            b.id for b in state.tree.chain_to_genesis(
                state.strategies[1].adopted_tip)]
        assert final_chain == oracle.public


@given(st.lists(st.sampled_from([0, 1]), min_size=1, max_size=40))
@settings(max_examples=60, deadline=None)
def test_long_random_sequences_match_chain_oracle(outcome):
    powers = PowerConfiguration((0.5, 0.5), 0.5, 1)
    rng = np.random.Generator(np.random.PCG64(1))
    state = new_run_state(powers)
    oracle = ChainOracle()
    for miner in outcome:
        _step_with_successes(state, [miner], rng)
        oracle.selfish_mines() if miner == 0 else oracle.honest_mines()
    flush_private_branches(state, rng)
    oracle.flush()
    honest_chain = [0] + [b.id for b in state.tree.chain_to_genesis(
        state.strategies[1].adopted_tip)]
    assert honest_chain == oracle.public
    assert state.published | {0} == oracle.public_ids
