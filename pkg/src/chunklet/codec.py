"""Codec between chunk trees and structural tag sequences.

Encoding inspects, per token, the ancestor chains of the token and of
its predecessor and emits the first relation in precedence order
whose condition holds; any condition whose chain would land on or
pass through the virtual root fails, so chunk-initial tokens and
tokens outside any chunk come out as rel 1. The cat field names the
token's parent node, or NONE below the virtual root.

Decoding is total over syntactically valid tags. It rebuilds exactly
the structure the sequence reveals, extending the current chunk
upward (wrapping the top in a new parent) when a close or sibling
open refers to an ancestor the sequence has not shown yet. A token
whose relation cannot be realised at the current state within the
depth bound is treated as rel 1 and reported as a repair, never
dropped. Node labels are put to a majority vote over the cat fields
of directly attached leaves, ties broken by the leftmost such leaf; a
node that never received a direct leaf (ill-formed input only) falls
back to a vote over all descendant leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DepthBoundError
from .tags import NO_CAT, REL_SET, StructuralTag, TagSequence
from .trees import DEPTH_BOUND, ChunkTree, Item, Leaf, Node


def encode_tree(tree: ChunkTree) -> TagSequence:
    """Encode a well-formed ChunkTree as one structural tag per token.

    Raises DepthBoundError if any leaf sits deeper than DEPTH_BOUND.
    """
    rows: list[tuple[Leaf, tuple[int, ...], str]] = []

    def walk(item: Item, path: tuple[int, ...], parent_label: str) -> None:
        if isinstance(item, Leaf):
            rows.append((item, path, parent_label))
        else:
            for k, child in enumerate(item.children):
                walk(child, path + (k,), item.label)

    for k, item in enumerate(tree.items):
        walk(item, (k,), NO_CAT)

    tags: list[StructuralTag] = []
    words: list[str | None] = []
    prev_path: tuple[int, ...] | None = None
    for i, (leaf, path, parent_label) in enumerate(rows):
        if len(path) > DEPTH_BOUND:
            raise DepthBoundError(i, len(path), DEPTH_BOUND)
        rel = "1" if prev_path is None else _relation(path, prev_path)
        tags.append(StructuralTag(leaf.pos, rel, parent_label))
        words.append(leaf.word)
        prev_path = path

    kept = None if all(w is None for w in words) else tuple(words)
    return TagSequence(tuple(tags), kept)


def _ancestor(path: tuple[int, ...], k: int) -> tuple[int, ...] | None:
    """Path of the k-th ancestor, or None when it is the virtual root."""
    if len(path) - k < 1:
        return None
    return path[:-k]


# Checked in precedence order; the first condition that holds wins.
_CONDITIONS: tuple[tuple[str, int, int], ...] = (
    ("0", 1, 1),
    ("+", 1, 2),
    ("++", 1, 3),
    ("-", 2, 1),
    ("--", 3, 1),
    ("=", 2, 2),
)


def _relation(path: tuple[int, ...], prev: tuple[int, ...]) -> str:
    for rel, k_cur, k_prev in _CONDITIONS:
        a = _ancestor(path, k_cur)
        b = _ancestor(prev, k_prev)
        if a is not None and a == b:
            return rel
    return "1"


@dataclass(frozen=True)
class Repair:
    """One decoding repair: the token at ``index`` was treated as rel 1."""

    index: int
    tag: StructuralTag
    reason: str


@dataclass(frozen=True)
class DecodeResult:
    tree: ChunkTree
    repairs: tuple[Repair, ...]


class _Open:
    """A node under construction."""

    __slots__ = ("children", "votes")

    def __init__(self) -> None:
        self.children: list[object] = []
        self.votes: list[tuple[int, str]] = []


class _LeafRec:
    __slots__ = ("index", "pos", "word", "cat")

    def __init__(self, index: int, pos: str, word: str | None, cat: str) -> None:
        self.index = index
        self.pos = pos
        self.word = word
        self.cat = cat


def decode_tags(
    tags: Sequence[StructuralTag] | TagSequence,
    words: Sequence[str | None] | None = None,
) -> DecodeResult:
    """Rebuild a ChunkTree from structural tags.

    Total for any sequence whose rel symbols are legal; deviations
    from a realisable structure are repaired and reported.
    """
    if isinstance(tags, TagSequence):
        if words is None:
            words = tags.words
        tags = tags.tags
    if words is not None and len(words) != len(tags):
        raise ValueError(f"{len(words)} words for {len(tags)} tags")

    finished: list[object] = []
    spine: list[_Open] = []
    max_depth = 0  # deepest leaf of the current chunk, top node at depth 1
    repairs: list[Repair] = []

    def close_chunk() -> None:
        nonlocal max_depth
        spine.clear()
        max_depth = 0

    def open_chunk(rec: _LeafRec) -> None:
        nonlocal max_depth
        close_chunk()
        top = _Open()
        top.children.append(rec)
        top.votes.append((rec.index, rec.cat))
        finished.append(top)
        spine.append(top)
        max_depth = 2

    def wrap() -> None:
        """Put a new node above the current chunk top."""
        nonlocal max_depth
        parent = _Open()
        parent.children.append(spine[0])
        finished[-1] = parent
        spine.insert(0, parent)
        max_depth += 1

    def attach(rec: _LeafRec) -> None:
        nonlocal max_depth
        spine[-1].children.append(rec)
        spine[-1].votes.append((rec.index, rec.cat))
        max_depth = max(max_depth, len(spine) + 1)

    for i, tag in enumerate(tags):
        if tag.rel not in REL_SET:
            raise ValueError(f"token {i}: unknown rel symbol {tag.rel!r}")
        rec = _LeafRec(i, tag.pos, None if words is None else words[i], tag.cat)

        def as_initial(reason: str | None) -> None:
            if reason is not None:
                repairs.append(Repair(i, tag, reason))
            if tag.cat == NO_CAT:
                close_chunk()
                finished.append(rec)
            else:
                open_chunk(rec)

        rel = tag.rel
        if rel == "1":
            as_initial(None)
        elif tag.cat == NO_CAT:
            # No relation other than 1 can hold for a token below the
            # virtual root, whatever the state.
            as_initial("category-none")
        elif rel == "0":
            if not spine:
                as_initial("sibling-without-chunk")
            else:
                attach(rec)
        elif rel in ("+", "++"):
            closes = 1 if rel == "+" else 2
            if not spine:
                as_initial("close-without-chunk")
            elif len(spine) > closes:
                del spine[-closes:]
                attach(rec)
            else:
                # The target is above everything built so far.
                wraps = closes - len(spine) + 1
                if max_depth + wraps > DEPTH_BOUND:
                    as_initial("close-beyond-depth")
                else:
                    for _ in range(wraps):
                        wrap()
                    del spine[1:]  # everything below the new top is closed
                    attach(rec)
        elif rel == "=":
            if not spine:
                as_initial("close-without-chunk")
            else:
                if len(spine) == 1:
                    if max_depth + 1 > DEPTH_BOUND:
                        as_initial("close-beyond-depth")
                        continue
                    wrap()
                sibling = _Open()
                spine[-2].children.append(sibling)
                spine[-1] = sibling
                attach(rec)
        elif rel in ("-", "--"):
            opens = 1 if rel == "-" else 2
            if not spine:
                as_initial("open-without-chunk")
            elif len(spine) + opens + 1 > DEPTH_BOUND:
                as_initial("open-beyond-depth")
            else:
                for _ in range(opens):
                    child = _Open()
                    spine[-1].children.append(child)
                    spine.append(child)
                attach(rec)

    items = tuple(_resolve(entry) for entry in finished)
    return DecodeResult(ChunkTree(items), tuple(repairs))


def _resolve(entry: object) -> Item:
    if isinstance(entry, _LeafRec):
        return Leaf(entry.pos, entry.word)
    assert isinstance(entry, _Open)
    votes = entry.votes or _descendant_votes(entry)
    label = _majority(votes)
    children = tuple(_resolve(child) for child in entry.children)
    return Node(label, children)


def _descendant_votes(node: _Open) -> list[tuple[int, str]]:
    votes: list[tuple[int, str]] = []
    for child in node.children:
        if isinstance(child, _LeafRec):
            votes.append((child.index, child.cat))
        else:
            votes.extend(_descendant_votes(child))
    votes.sort()
    return votes


def _majority(votes: list[tuple[int, str]]) -> str:
    counts: dict[str, int] = {}
    for _, cat in votes:
        counts[cat] = counts.get(cat, 0) + 1
    best = max(counts.values())
    for _, cat in votes:  # leftmost vote among the tied categories
        if counts[cat] == best:
            return cat
    raise AssertionError("unlabelled node with no leaf votes")
