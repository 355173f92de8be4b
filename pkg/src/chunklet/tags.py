"""Structural tags: the per-token encoding of phrase-internal structure.

A token is tagged with a triple <pos, rel, cat>:

* pos: the part-of-speech tag, taken as given (never predicted here);
* rel: the structural relation between this token's attachment point and
  the previous token's, one of seven symbols;
* cat: the phrase category of the token's parent node, or NONE for a
  token attached directly to the virtual root.

The seven rel values, in precedence order (when several hold, the first
one wins):

==========  =====================================================
``0``       same parent as the previous token (sibling)
``+``       attaches one level above the previous token (close 1)
``++``      attaches two levels above (close 2)
``-``       opens one new node below the previous token's parent
``--``      opens two new nodes
``=``       closes one node and opens a sibling node
``1``       none of the above (chunk-initial or outside any chunk)
==========  =====================================================

The first token of a sequence is always ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

# Precedence order matters: encoding picks the first condition that holds.
REL_VALUES: tuple[str, ...] = ("0", "+", "++", "-", "--", "=", "1")
REL_SET = frozenset(REL_VALUES)

# Reserved symbols. NONE marks "no parent category" (token outside any
# chunk); <B> is the boundary sentinel padding sequence starts. Neither
# may occur as a corpus tag or label.
NO_CAT = "NONE"
BOUNDARY_SYMBOL = "<B>"
RESERVED_SYMBOLS = frozenset({NO_CAT, BOUNDARY_SYMBOL})


class StructuralTag(NamedTuple):
    pos: str
    rel: str
    cat: str

    def __str__(self) -> str:
        return f"<{self.pos},{self.rel},{self.cat}>"


# Sentinel used as history padding before the first token. All its
# attributes are the boundary symbol so that it matches only feature
# constraints that were themselves extracted from a boundary context.
BOUNDARY = StructuralTag(BOUNDARY_SYMBOL, BOUNDARY_SYMBOL, BOUNDARY_SYMBOL)


def is_valid_tag(tag: StructuralTag) -> bool:
    """True for a well-formed non-boundary structural tag."""
    return (
        isinstance(tag, StructuralTag)
        and tag.rel in REL_SET
        and bool(tag.pos)
        and bool(tag.cat)
        and tag.pos not in RESERVED_SYMBOLS
        and tag.cat != BOUNDARY_SYMBOL
    )


@dataclass(frozen=True)
class TagSequence:
    """A tagged token sequence; word forms are carried but never consulted.

    ``words`` is either None (no word forms known) or a tuple aligned
    with ``tags`` whose entries may individually be None.
    """

    tags: tuple[StructuralTag, ...]
    words: tuple[str | None, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.words is not None and len(self.words) != len(self.tags):
            raise ValueError(
                f"{len(self.words)} words for {len(self.tags)} tags"
            )

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self) -> Iterator[StructuralTag]:
        return iter(self.tags)

    def __getitem__(self, i: int) -> StructuralTag:
        return self.tags[i]

    @property
    def pos(self) -> tuple[str, ...]:
        return tuple(t.pos for t in self.tags)

    @property
    def rels(self) -> tuple[str, ...]:
        return tuple(t.rel for t in self.tags)

    @property
    def cats(self) -> tuple[str, ...]:
        return tuple(t.cat for t in self.tags)

    def word_at(self, i: int) -> str | None:
        return None if self.words is None else self.words[i]
