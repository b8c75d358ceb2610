"""Hot per-run simulation loop over flat arrays.

The whole event loop lives in one function, written as plain index
arithmetic so numba can compile it; with ``MINESIM_NO_NUMBA=1`` (or
numba missing) the exact same function runs as ordinary Python over
numpy arrays. Both paths consume the random stream identically, so a
run's outcome does not depend on the backend, only its speed does
(``benchmarks/bench_backends.py`` compares the two). The function is
deliberately monolithic: splitting the per-block reaction logic into
helpers costs roughly an order of magnitude here.

The engine driver extracts mining successes from a pre-drawn uniform
matrix and hands the kernel an event list: ``ev_step[i]``/``ev_miner[i]``
is the i-th block-creation event, sorted by timestep then miner index.
Steps without events change nothing and are skipped. Delivery-order
randomness is drawn lazily from the generator, one uniform per
Fisher-Yates swap, recipients in index order; rounds with a single
message draw nothing.

Miners ``0..k-1`` run the selfish strategy, the rest are honest; the
block store is append-only arrays (parent/owner/height) with block 0 as
genesis. ``known[b, r]`` marks block ``b`` as seen by miner ``r``;
re-delivery of a known block is a no-op. Messages are ranges of the
``msg_blocks`` log; a round is the slice of messages queued before it
started, and anything queued while it runs belongs to the next round.

The state arrays mirror :class:`minesim.strategies.SelfishStrategy`
field for field (including the tie flag concurrency adds); the
equivalence of this loop with the object engine is asserted in tests.
"""

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("MINESIM_NO_NUMBA", "").lower() in ("1", "true", "yes")


if _numba_disabled():
    BACKEND = "numpy"

    def _jit(fn):
        return fn
else:
    try:
        import numba

        BACKEND = "numba"

        def _jit(fn):
            return numba.njit(cache=True)(fn)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        BACKEND = "numpy"

        def _jit(fn):
            return fn


@_jit
def _simulate(g, n, k, ev_step, ev_miner, flush, nb):
    """Run the event loop and account the winning chain.

    ``nb`` is the block-store capacity (event count + genesis). Returns
    (per-miner counts on the winning chain, chain length, winning tip id,
    total blocks mined).
    """
    parent = np.empty(nb, np.int64)
    owner = np.empty(nb, np.int64)
    height = np.empty(nb, np.int64)
    parent[0] = -1
    owner[0] = -1
    height[0] = 0
    nblocks = 1

    known = np.zeros((nb, n), np.uint8)
    for r in range(n):
        known[0, r] = 1

    base = np.zeros(n, np.int64)      # mining base, frozen during a step
    adopted = np.zeros(n, np.int64)   # honest miners' tips
    pub_tip = np.zeros(n, np.int64)   # selfish miners' view of the public tip
    priv_tip = np.zeros(n, np.int64)
    tied = np.zeros(n, np.uint8)      # own published tip has an equal rival
    kk = k if k > 0 else 1
    branch = np.empty((kk, nb), np.int64)   # private branches, parent order
    br_len = np.zeros(n, np.int64)
    br_pub = np.zeros(n, np.int64)    # published prefix of the branch

    msg_blocks = np.empty(nb, np.int64)
    msg_start = np.empty(nb + 2, np.int64)
    msg_end = np.empty(nb + 2, np.int64)
    perm = np.empty(nb + 2, np.int64)
    msg_count = 0
    mb_ptr = 0

    ne = ev_step.shape[0]
    i = 0
    while i < ne:
        t = ev_step[i]
        round_begin = msg_count

        # Mining phase: one block per successful miner, built on the tip
        # held at the end of the previous step. Honest miners adopt and
        # broadcast; selfish miners extend their private branch, only
        # revealing it when this block wins a tie race (was tied, branch
        # now two long; the tie block itself is already public).
        while i < ne and ev_step[i] == t:
            m = ev_miner[i]
            i += 1
            b = nblocks
            nblocks += 1
            pb = base[m]
            parent[b] = pb
            owner[b] = m
            height[b] = height[pb] + 1
            known[b, m] = 1
            if m >= k:
                adopted[m] = b
                msg_start[msg_count] = mb_ptr
                msg_blocks[mb_ptr] = b
                mb_ptr += 1
                msg_end[msg_count] = mb_ptr
                msg_count += 1
            else:
                lead_before = height[priv_tip[m]] - height[pub_tip[m]]
                branch[m, br_len[m]] = b
                br_len[m] += 1
                priv_tip[m] = b
                if lead_before == 0 and (
                        br_len[m] == 2 or (tied[m] == 1 and br_len[m] == 1)):
                    # Mining while tied wins the race: reveal the branch
                    # remainder (the tie block itself is already public).
                    msg_start[msg_count] = mb_ptr
                    for s in range(br_pub[m], br_len[m]):
                        msg_blocks[mb_ptr] = branch[m, s]
                        mb_ptr += 1
                    msg_end[msg_count] = mb_ptr
                    msg_count += 1
                    pub_tip[m] = b
                    br_len[m] = 0
                    br_pub[m] = 0
                    tied[m] = 0

        # Delivery rounds until quiescence. Each recipient sees each
        # round's messages in its own uniformly random order; blocks
        # inside a message arrive in parent order. A newly learned block
        # either moves an honest tip (strictly higher wins, first
        # received keeps ties) or drives the selfish reaction rules.
        while round_begin < msg_count:
            round_end = msg_count
            km = round_end - round_begin
            for r in range(n):
                if km > 1:
                    for j in range(km):
                        perm[j] = round_begin + j
                    for j in range(km - 1, 0, -1):
                        sw = int(g.random() * (j + 1))
                        tmp = perm[j]
                        perm[j] = perm[sw]
                        perm[sw] = tmp
                for j in range(km):
                    msg = perm[j] if km > 1 else round_begin
                    for q in range(msg_start[msg], msg_end[msg]):
                        b = msg_blocks[q]
                        if known[b, r]:
                            continue
                        known[b, r] = 1
                        if r >= k:
                            if height[b] > height[adopted[r]]:
                                adopted[r] = b
                            continue
                        if height[b] == height[pub_tip[r]]:
                            # Equal-height rival to a tip of our own that
                            # we mine on openly: remember the tie race.
                            if br_len[r] == 0 and owner[pub_tip[r]] == r:
                                tied[r] = 1
                            continue
                        if height[b] < height[pub_tip[r]]:
                            continue
                        lead_before = height[priv_tip[r]] - height[pub_tip[r]]
                        pub_tip[r] = b
                        tied[r] = 0
                        if lead_before <= 0:
                            # Branch is worthless, mine on the public tip.
                            priv_tip[r] = b
                            br_len[r] = 0
                            br_pub[r] = 0
                        elif lead_before == 1:
                            # Publish the competing block: tie race.
                            msg_start[msg_count] = mb_ptr
                            msg_blocks[mb_ptr] = branch[r, br_len[r] - 1]
                            mb_ptr += 1
                            msg_end[msg_count] = mb_ptr
                            msg_count += 1
                            br_pub[r] = br_len[r]
                        elif lead_before == 2:
                            # Reveal everything, winning the race by one.
                            msg_start[msg_count] = mb_ptr
                            for s in range(br_pub[r], br_len[r]):
                                msg_blocks[mb_ptr] = branch[r, s]
                                mb_ptr += 1
                            msg_end[msg_count] = mb_ptr
                            msg_count += 1
                            pub_tip[r] = priv_tip[r]
                            br_len[r] = 0
                            br_pub[r] = 0
                        else:
                            # Comfortably ahead: feed out the oldest
                            # unpublished block.
                            msg_start[msg_count] = mb_ptr
                            msg_blocks[mb_ptr] = branch[r, br_pub[r]]
                            mb_ptr += 1
                            msg_end[msg_count] = mb_ptr
                            msg_count += 1
                            br_pub[r] += 1
            round_begin = round_end

        for mm in range(n):
            if mm < k:
                base[mm] = priv_tip[mm]
            else:
                base[mm] = adopted[mm]

    # End-of-run flush: remaining private branches go out in one final
    # round so reward accounting sees the longest chain anyone can show.
    if flush:
        round_begin = msg_count
        for m in range(k):
            if br_pub[m] < br_len[m]:
                msg_start[msg_count] = mb_ptr
                for s in range(br_pub[m], br_len[m]):
                    msg_blocks[mb_ptr] = branch[m, s]
                    mb_ptr += 1
                msg_end[msg_count] = mb_ptr
                msg_count += 1
            br_len[m] = 0
            br_pub[m] = 0
            priv_tip[m] = pub_tip[m]
        while round_begin < msg_count:
            round_end = msg_count
            km = round_end - round_begin
            for r in range(n):
                if km > 1:
                    for j in range(km):
                        perm[j] = round_begin + j
                    for j in range(km - 1, 0, -1):
                        sw = int(g.random() * (j + 1))
                        tmp = perm[j]
                        perm[j] = perm[sw]
                        perm[sw] = tmp
                for j in range(km):
                    msg = perm[j] if km > 1 else round_begin
                    for q in range(msg_start[msg], msg_end[msg]):
                        b = msg_blocks[q]
                        if known[b, r]:
                            continue
                        known[b, r] = 1
                        if r >= k:
                            if height[b] > height[adopted[r]]:
                                adopted[r] = b
                        elif height[b] > height[pub_tip[r]]:
                            # Branches were just flushed; adopt.
                            pub_tip[r] = b
                            priv_tip[r] = b
            round_begin = round_end

    win = adopted[n - 1]
    counts = np.zeros(n, np.int64)
    b = win
    while parent[b] >= 0:
        counts[owner[b]] += 1
        b = parent[b]
    return counts, height[win], win, nblocks - 1
