"""Chunk trees: shallow phrase structure over a tagged token sequence.

A ChunkTree holds the top-level items of one sentence (or of one
isolated chunk): phrase nodes and out-of-chunk tokens, in surface
order, below an implicit virtual root. The virtual root itself is
never represented as a node and never counted by any measure.

Contiguity and sibling order are inherent in the representation:
children are an ordered tuple and spans are derived, never stored.
An optional ``edge`` annotation (grammatical function) is preserved
verbatim by the corpus formats and ignored by everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .tags import RESERVED_SYMBOLS

# Maximum number of edges between a leaf and the virtual root. Two
# levels may be opened or closed per token, and a close must land on a
# real node, so this bound keeps every structural relation expressible.
DEPTH_BOUND = 4


@dataclass(frozen=True)
class Leaf:
    """A token: part-of-speech tag plus an optional word form."""

    pos: str
    word: str | None = None
    edge: str | None = None


@dataclass(frozen=True)
class Node:
    """A phrase node with at least one child."""

    label: str
    children: tuple["Item", ...]
    edge: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))


Item = Union[Node, Leaf]


@dataclass(frozen=True)
class ChunkTree:
    """Top-level items of one sentence below the virtual root."""

    items: tuple[Item, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)


def tree_leaves(tree: ChunkTree) -> list[Leaf]:
    """All leaves in surface order."""
    out: list[Leaf] = []

    def walk(item: Item) -> None:
        if isinstance(item, Leaf):
            out.append(item)
        else:
            for child in item.children:
                walk(child)

    for item in tree.items:
        walk(item)
    return out


def leaf_paths(tree: ChunkTree) -> list[tuple[int, ...]]:
    """Per leaf, its path of child indices from the virtual root.

    The path length is the leaf's depth; path prefixes identify its
    ancestors by position, which keeps ancestor comparisons correct
    even when equal subtrees occur more than once.
    """
    out: list[tuple[int, ...]] = []

    def walk(item: Item, path: tuple[int, ...]) -> None:
        if isinstance(item, Leaf):
            out.append(path)
        else:
            for k, child in enumerate(item.children):
                walk(child, path + (k,))

    for k, item in enumerate(tree.items):
        walk(item, (k,))
    return out


def node_at(tree: ChunkTree, path: tuple[int, ...]) -> Item:
    item: Item = tree.items[path[0]]
    for k in path[1:]:
        item = item.children[k]
    return item


def node_spans(tree: ChunkTree) -> list[tuple[Node, int, int]]:
    """All phrase nodes with their leaf spans, preorder.

    Spans are half-open [start, end) over leaf positions. The virtual
    root is not included.
    """
    out: list[tuple[Node, int, int]] = []

    def walk(item: Item, start: int) -> int:
        if isinstance(item, Leaf):
            return start + 1
        slot = len(out)
        out.append((item, start, start))  # end patched below
        end = start
        for child in item.children:
            end = walk(child, end)
        out[slot] = (item, start, end)
        return end

    pos = 0
    for item in tree.items:
        pos = walk(item, pos)
    return out


def top_level_spans(tree: ChunkTree) -> list[tuple[Node, int, int]]:
    """Spans of the top-level phrase nodes only (the chunks)."""
    out: list[tuple[Node, int, int]] = []
    pos = 0
    for item in tree.items:
        if isinstance(item, Leaf):
            pos += 1
            continue
        width = len(tree_leaves(ChunkTree((item,))))
        out.append((item, pos, pos + width))
        pos += width
    return out


def validate_tree(
    tree: ChunkTree,
    tagset: Iterable[str] | None = None,
    labelset: Iterable[str] | None = None,
    depth_bound: int = DEPTH_BOUND,
) -> list[str]:
    """Collect violations; an empty list means the tree is well formed.

    Checks node arity, reserved symbols, the depth bound, and (when a
    vocabulary is supplied) tagset/labelset membership.
    """
    tags = None if tagset is None else set(tagset)
    labels = None if labelset is None else set(labelset)
    problems: list[str] = []

    def walk(item: Item, path: tuple[int, ...]) -> None:
        where = ".".join(map(str, path))
        if isinstance(item, Leaf):
            if not item.pos:
                problems.append(f"leaf {where}: empty pos tag")
            elif item.pos in RESERVED_SYMBOLS:
                problems.append(f"leaf {where}: reserved symbol {item.pos!r} as pos tag")
            elif tags is not None and item.pos not in tags:
                problems.append(f"leaf {where}: pos tag {item.pos!r} not in tagset")
            if len(path) > depth_bound:
                problems.append(
                    f"leaf {where}: depth {len(path)} exceeds bound {depth_bound}"
                )
            return
        if not item.label:
            problems.append(f"node {where}: empty label")
        elif item.label in RESERVED_SYMBOLS:
            problems.append(f"node {where}: reserved symbol {item.label!r} as label")
        elif labels is not None and item.label not in labels:
            problems.append(f"node {where}: label {item.label!r} not in labelset")
        if not item.children:
            problems.append(f"node {where}: no children")
        for k, child in enumerate(item.children):
            walk(child, path + (k,))

    for k, item in enumerate(tree.items):
        walk(item, (k,))
    return problems
