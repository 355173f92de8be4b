"""Feature patterns over tagging contexts.

A context is the triple (second history tag, first history tag,
future tag). A pattern constrains a subset of the three positions,
each with a subset of the attributes

* ``r``  the structural relation,
* ``t``  the pos tag,
* ``c``  the parent category,
* ``r~sibl`` a binary abstraction of r ("1" iff r is "0"), which
  replaces r wherever it appears: the two never combine in one
  position.

A feature instance is a pattern plus concrete values for every
constrained attribute; it is active on a context when all values
unify with the context's attributes. The boundary sentinel carries
the boundary symbol in every attribute, so it matches only values
that were themselves read off a boundary context. Instances are
harvested from training contexts and kept when seen at least
``cutoff`` times; per pattern and context at most one instance can
be active, which keeps activation a handful of dictionary lookups.

The pattern file format is one pattern per line: up to three
positions separated by ``|`` (future last, right-aligned), attributes
comma-separated, ``-`` for an unused position, ``#`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import FormatError
from .tags import BOUNDARY_SYMBOL, StructuralTag, TagSequence

ATTRIBUTE_TOKENS = {"r": "rel", "t": "tag", "c": "cat", "r~sibl": "relsibl"}
TOKEN_OF = {name: token for token, name in ATTRIBUTE_TOKENS.items()}
ATTRIBUTE_ORDER = ("rel", "relsibl", "tag", "cat")

Context = tuple[StructuralTag, StructuralTag, StructuralTag]


def rel_sibl(tag: StructuralTag) -> str:
    """Sibling indicator: "1" iff the relation is "0".

    The boundary sentinel keeps its boundary value here as in every
    other attribute.
    """
    if tag.rel == BOUNDARY_SYMBOL:
        return BOUNDARY_SYMBOL
    return "1" if tag.rel == "0" else "0"


def tag_attribute(tag: StructuralTag, name: str) -> str:
    if name == "rel":
        return tag.rel
    if name == "tag":
        return tag.pos
    if name == "cat":
        return tag.cat
    if name == "relsibl":
        return rel_sibl(tag)
    raise ValueError(f"unknown attribute {name!r}")


@dataclass(frozen=True)
class AttributeMask:
    """The attributes one pattern position constrains, in fixed order."""

    attrs: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.attrs:
            raise ValueError("empty attribute mask")
        bad = [a for a in self.attrs if a not in ATTRIBUTE_ORDER]
        if bad:
            raise ValueError(f"unknown attributes {bad}")
        if len(set(self.attrs)) != len(self.attrs):
            raise ValueError(f"repeated attribute in {self.attrs}")
        if "rel" in self.attrs and "relsibl" in self.attrs:
            raise ValueError("rel and r~sibl cannot constrain the same position")
        ordered = tuple(a for a in ATTRIBUTE_ORDER if a in self.attrs)
        object.__setattr__(self, "attrs", ordered)

    def project(self, tag: StructuralTag) -> tuple[str, ...]:
        return tuple(tag_attribute(tag, a) for a in self.attrs)


@dataclass(frozen=True)
class FeaturePattern:
    """Masks for the three context positions; the future is required."""

    slots: tuple[AttributeMask | None, AttributeMask | None, AttributeMask]

    def __post_init__(self) -> None:
        if len(self.slots) != 3 or self.slots[2] is None:
            raise ValueError("a pattern needs 3 slots with the future present")

    @property
    def present(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.slots) if m is not None)

    def project(self, context: Context) -> tuple[tuple[str, ...], ...]:
        """Concrete values of the constrained attributes, per position."""
        return tuple(
            self.slots[i].project(context[i]) for i in self.present
        )

    def __str__(self) -> str:
        return format_pattern(self)


class FeatureInstance(NamedTuple):
    """A pattern with concrete values; identity of one model feature."""

    pattern: int
    values: tuple[tuple[str, ...], ...]


def parse_pattern(line: str) -> FeaturePattern:
    fields = [f.strip() for f in line.split("|")]
    if not 1 <= len(fields) <= 3:
        raise ValueError(f"expected 1 to 3 positions, got {len(fields)}: {line!r}")
    fields = ["-"] * (3 - len(fields)) + fields
    slots: list[AttributeMask | None] = []
    for f in fields:
        if f == "-":
            slots.append(None)
            continue
        tokens = [t.strip() for t in f.split(",")]
        names = []
        for t in tokens:
            if t not in ATTRIBUTE_TOKENS:
                raise ValueError(f"unknown attribute token {t!r} in {line!r}")
            names.append(ATTRIBUTE_TOKENS[t])
        slots.append(AttributeMask(tuple(names)))
    if slots[2] is None:
        raise ValueError(f"the future position cannot be '-': {line!r}")
    return FeaturePattern((slots[0], slots[1], slots[2]))


def format_pattern(pattern: FeaturePattern) -> str:
    fields = []
    for mask in pattern.slots:
        if mask is None:
            fields.append("-")
        else:
            fields.append(",".join(TOKEN_OF[a] for a in mask.attrs))
    return " | ".join(fields)


def parse_patterns(lines: Iterable[str], path: str = "<string>") -> tuple[FeaturePattern, ...]:
    out = []
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(parse_pattern(line))
        except ValueError as err:
            raise FormatError(str(err), path, n) from err
    if not out:
        raise FormatError("no patterns found", path)
    return tuple(out)


def load_patterns(path: str | Path) -> tuple[FeaturePattern, ...]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_patterns(text.splitlines(), str(path))


def default_patterns() -> tuple[FeaturePattern, ...]:
    """The 22 built-in patterns: 11 trigram, 8 bigram, 3 unigram."""
    text = resources.files("chunklet").joinpath("data/patterns.txt").read_text("utf-8")
    return parse_patterns(text.splitlines(), "chunklet/data/patterns.txt")


# -------------------------------------------------------------- extraction

@dataclass
class FeatureSet:
    """Extracted feature instances with their training counts.

    Instance order is deterministic: sorted by pattern then values.
    """

    patterns: tuple[FeaturePattern, ...]
    instances: tuple[FeatureInstance, ...]
    counts: tuple[int, ...]
    cutoff: int = 1
    _index: dict[FeatureInstance, int] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[FeatureInstance]:
        return iter(self.instances)

    @property
    def index(self) -> dict[FeatureInstance, int]:
        if self._index is None:
            self._index = {inst: i for i, inst in enumerate(self.instances)}
        return self._index

    def active_set(self, context: Context) -> list[int]:
        """Ids of all instances active on the context.

        At most one per pattern: the one matching the context's own
        projection under that pattern.
        """
        index = self.index
        out = []
        for p, pattern in enumerate(self.patterns):
            key = FeatureInstance(p, pattern.project(context))
            i = index.get(key)
            if i is not None:
                out.append(i)
        return out


def is_active(
    feature: FeatureInstance,
    patterns: Sequence[FeaturePattern],
    context: Context,
) -> bool:
    """True when every constrained attribute equals the context value."""
    return patterns[feature.pattern].project(context) == feature.values


def iter_contexts(sequence: TagSequence | Sequence[StructuralTag]) -> Iterator[Context]:
    """All (history2, history1, future) triples, boundary padded."""
    from .tags import BOUNDARY

    tags = sequence.tags if isinstance(sequence, TagSequence) else tuple(sequence)
    s2, s1 = BOUNDARY, BOUNDARY
    for tag in tags:
        yield (s2, s1, tag)
        s2, s1 = s1, tag


def extract_features(
    sequences: Iterable[TagSequence | Sequence[StructuralTag]],
    patterns: Sequence[FeaturePattern],
    cutoff: int = 1,
) -> FeatureSet:
    """Harvest instances from every training context, then apply the cutoff."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be at least 1, got {cutoff}")
    counts: dict[FeatureInstance, int] = {}
    for sequence in sequences:
        for context in iter_contexts(sequence):
            for p, pattern in enumerate(patterns):
                key = FeatureInstance(p, pattern.project(context))
                counts[key] = counts.get(key, 0) + 1
    kept = sorted(inst for inst, c in counts.items() if c >= cutoff)
    return FeatureSet(
        patterns=tuple(patterns),
        instances=tuple(kept),
        counts=tuple(counts[i] for i in kept),
        cutoff=cutoff,
    )
