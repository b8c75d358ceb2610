"""Honest and selfish mining strategies as per-miner state machines.

Each strategy consumes two kinds of events, "I mined a block" and
"a published block arrived", and answers with a :class:`PublishAction`
naming the block ids to broadcast. Strategies never look at the global
tree; they only track tip ids and heights handed to them by the engine.

The selfish strategy keeps a private branch and reacts to growth of the
public chain based on its lead (private height minus public height):

* lead <= 0 before the event: the branch is worthless, abandon it and
  mine on the public tip;
* lead 1: publish the private block to force a tie race;
* lead 2: publish the whole branch, winning the race by one block;
* lead > 2: publish the oldest unpublished block, staying ahead.

Mining while tied resolves the race: the new block is published
immediately. The tied state is entered two ways. Either the miner
published its lead-1 block to answer a public block of equal height (the
branch then still holds that block, so the freshly mined winner makes it
two long), or concurrent mining produced an equal-height rival to a tip
the miner had already published and was mining on (the branch is empty
then, so the tie is remembered in a flag). The second form cannot occur
when at most one block appears per timestep; it is what concurrency adds
to the classic withholding machine.

A block is published at most once; the branch remembers how many of its
blocks already went out so a tie block is not re-broadcast when the race
is later won.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import Block


class ParentMismatch(Exception):
    """Self-mined block does not extend the miner's current mining base."""


@dataclass(frozen=True)
class PublishAction:
    """Ordered block ids to broadcast as one message (parent order)."""

    blocks: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


EMPTY = PublishAction()


@dataclass
class HonestStrategy:
    """Longest-chain miner: adopt the highest tip, first received wins ties."""

    adopted_tip: int
    adopted_height: int

    @property
    def mining_base(self) -> int:
        return self.adopted_tip

    def on_self_mined(self, block: Block) -> PublishAction:
        if block.parent != self.adopted_tip:
            raise ParentMismatch(
                f"mined on {block.parent}, expected tip {self.adopted_tip}"
            )
        self.adopted_tip = block.id
        self.adopted_height = block.height
        return PublishAction((block.id,))

    def on_received(self, block: Block) -> PublishAction:
        # Strictly higher adopts; an equal-height block loses to the one
        # received first. Stale blocks are ignored.
        if block.height > self.adopted_height:
            self.adopted_tip = block.id
            self.adopted_height = block.height
        return EMPTY

    def flush(self) -> PublishAction:
        return EMPTY


@dataclass
class SelfishStrategy:
    """Block-withholding miner racing the public chain with a private branch."""

    public_tip: int
    public_height: int
    private_tip: int
    private_height: int
    private_branch: list[int] = field(default_factory=list)
    _published: int = 0        # branch blocks already broadcast (prefix length)
    _own_public_tip: bool = False  # public_tip is a block this miner mined
    _tied: bool = False        # own published tip has an equal-height rival

    @property
    def lead(self) -> int:
        return self.private_height - self.public_height

    @property
    def private_branch_len(self) -> int:
        return len(self.private_branch)

    @property
    def mining_base(self) -> int:
        # Even during a tie race the miner keeps digging on its own branch.
        return self.private_tip

    def _unpublished(self) -> tuple[int, ...]:
        return tuple(self.private_branch[self._published:])

    def _reveal(self) -> PublishAction:
        """Publish the branch remainder and mine openly on its tip."""
        action = PublishAction(self._unpublished())
        self.public_tip = self.private_tip
        self.public_height = self.private_height
        self.private_branch.clear()
        self._published = 0
        self._own_public_tip = True
        self._tied = False
        return action

    def on_self_mined(self, block: Block) -> PublishAction:
        if block.parent != self.private_tip:
            raise ParentMismatch(
                f"mined on {block.parent}, expected tip {self.private_tip}"
            )
        lead_before = self.lead
        self.private_branch.append(block.id)
        self.private_tip = block.id
        self.private_height = block.height
        if lead_before == 0 and (
            len(self.private_branch) == 2
            or (self._tied and len(self.private_branch) == 1)
        ):
            # Won a tie race: reveal. Only blocks not already out are
            # broadcast (the tie block itself is already public).
            return self._reveal()
        return EMPTY

    def on_received(self, block: Block) -> PublishAction:
        if block.height == self.public_height:
            # Lost the first-received race, but remember a rival to a tip
            # of our own that we are openly mining on: winning the next
            # block then settles the race in public.
            if not self.private_branch and self._own_public_tip:
                self._tied = True
            return EMPTY
        if block.height < self.public_height:
            return EMPTY
        lead_before = self.lead
        self.public_tip = block.id
        self.public_height = block.height
        self._own_public_tip = False
        self._tied = False
        if lead_before <= 0:
            # Nothing worth defending: mine on the public chain.
            self.private_tip = self.public_tip
            self.private_height = self.public_height
            self.private_branch.clear()
            self._published = 0
            return EMPTY
        if lead_before == 1:
            # Tie race: reveal the competing block but keep mining on it.
            action = PublishAction((self.private_branch[-1],))
            self._published = len(self.private_branch)
            return action
        if lead_before == 2:
            # Public chain caught up to one behind: cash in the whole branch.
            return self._reveal()
        # Comfortably ahead: feed out the oldest unpublished block.
        action = PublishAction((self.private_branch[self._published],))
        self._published += 1
        return action

    def flush(self) -> PublishAction:
        """Publish whatever is still hidden; used for end-of-run accounting."""
        action = PublishAction(self._unpublished())
        self.private_tip = self.public_tip
        self.private_height = self.public_height
        self.private_branch.clear()
        self._published = 0
        return action
