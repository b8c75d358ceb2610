"""Append-only block tree with longest-chain queries.

Blocks carry no payload: rewards in this model depend only on who owns
the blocks along the winning chain, so a block is just (id, parent,
owner, height). Miner indices are 0-based internally; the genesis block
has owner ``GENESIS``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

GENESIS = -1


class ChainError(Exception):
    """Base class for block tree errors."""


class UnknownParent(ChainError):
    """Inserted block references a parent id that is not in the tree."""


class DuplicateId(ChainError):
    """Inserted block reuses an existing block id."""


class UnknownBlock(ChainError):
    """Queried block id is not in the tree."""


@dataclass(frozen=True)
class Block:
    id: int
    parent: int | None
    owner: int
    height: int


class BlockTree:
    """Append-only tree of blocks reachable from a single genesis.

    Heights are assigned at insertion time (parent height + 1), never
    recomputed, so previously returned blocks stay valid forever.
    """

    def __init__(self) -> None:
        self._blocks: dict[int, Block] = {}
        self.genesis: int | None = None

    def __len__(self) -> int:
        return len(self._blocks)

    def __contains__(self, block_id: int) -> bool:
        return block_id in self._blocks

    def get(self, block_id: int) -> Block:
        try:
            return self._blocks[block_id]
        except KeyError:
            raise UnknownBlock(f"block {block_id} not in tree") from None

    def height(self, block_id: int) -> int:
        return self.get(block_id).height

    def add_genesis(self, block_id: int = 0) -> Block:
        if self.genesis is not None:
            raise DuplicateId("tree already has a genesis block")
        block = Block(id=block_id, parent=None, owner=GENESIS, height=0)
        self._blocks[block_id] = block
        self.genesis = block_id
        return block

    def insert(self, block_id: int, parent: int, owner: int) -> Block:
        """Insert a new block under an existing parent and return it."""
        if block_id in self._blocks:
            raise DuplicateId(f"block id {block_id} already present")
        if parent not in self._blocks:
            raise UnknownParent(f"parent {parent} of block {block_id} not in tree")
        block = Block(
            id=block_id, parent=parent, owner=owner,
            height=self._blocks[parent].height + 1,
        )
        self._blocks[block_id] = block
        return block

    def tips(self) -> set[int]:
        """Ids of blocks that currently have no children."""
        with_children = {b.parent for b in self._blocks.values() if b.parent is not None}
        return set(self._blocks) - with_children

    def chain_to_genesis(self, tip: int) -> list[Block]:
        """Blocks from genesis (exclusive) to ``tip`` (inclusive), in order.

        The returned list has exactly ``height(tip)`` entries.
        """
        chain: list[Block] = []
        block = self.get(tip)
        while block.parent is not None:
            chain.append(block)
            block = self._blocks[block.parent]
        chain.reverse()
        return chain

    def owner_counts(self, tip: int) -> Counter[int]:
        """Per-owner block counts along the chain ending at ``tip``.

        Genesis is excluded, so the counts sum to ``height(tip)``.
        """
        return Counter(b.owner for b in self.chain_to_genesis(tip))
