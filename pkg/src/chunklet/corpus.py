"""Corpus input and output.

Two file formats, both UTF-8 with LF line endings:

* bracketed: one sentence per line as a sequence of s-expressions.
  ``(SYM word)`` is a token, ``(SYM child ...)`` with parenthesised
  children is a phrase node, so a node never contains a bare word.
  A symbol may carry an opaque grammatical-function suffix after a
  dash (``NP-SB``); it is preserved on the item's ``edge`` field and
  ignored by everything else. A missing word form is written ``_``.

* columnar: a fixed header line ``word<TAB>pos<TAB>rel<TAB>cat``,
  one token per line, a blank line between sequences. Reading a
  columnar corpus decodes the tag stream back into trees.

Words never contain whitespace or parentheses in these formats;
writers refuse them rather than emit files that cannot be re-read.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .codec import decode_tags, encode_tree
from .errors import FormatError, VocabularyError
from .tags import NO_CAT, REL_SET, StructuralTag, TagSequence
from .trees import ChunkTree, Item, Leaf, Node, validate_tree

COLUMNAR_HEADER = "word\tpos\trel\tcat"
MISSING_WORD = "_"

# Chunk categories harvested from treebank trees by default: noun,
# prepositional and adjectival phrases plus number names, the usual
# core of complex adverbials.
DEFAULT_CHUNK_CATEGORIES = frozenset({"NP", "PP", "AP", "NM"})


@dataclass
class Corpus:
    """A list of sentences, each a ChunkTree, plus load diagnostics."""

    sentences: tuple[ChunkTree, ...]
    diagnostics: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[ChunkTree]:
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]


# ---------------------------------------------------------------- bracketed

_TOKEN_RX = re.compile(r"\(|\)|[^()\s]+")


def _split_symbol(symbol: str, path: str, line: int) -> tuple[str, str | None]:
    if "-" not in symbol:
        return symbol, None
    head, edge = symbol.split("-", 1)
    if not head or not edge:
        raise FormatError(f"malformed symbol {symbol!r}", path, line)
    return head, edge


def parse_bracketed(text: str, path: str = "<string>", line: int = 1) -> ChunkTree:
    """Parse one sentence line of bracketed items."""
    toks = _TOKEN_RX.findall(text)
    pos = 0

    def peek() -> str | None:
        return toks[pos] if pos < len(toks) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(toks):
            raise FormatError("unexpected end of line", path, line)
        pos += 1
        return toks[pos - 1]

    def expr() -> Item:
        opener = take()
        if opener != "(":
            raise FormatError(f"expected '(', found {opener!r}", path, line)
        symbol = take()
        if symbol in ("(", ")"):
            raise FormatError("missing symbol after '('", path, line)
        head, edge = _split_symbol(symbol, path, line)
        if peek() == "(":
            children = []
            while peek() == "(":
                children.append(expr())
            if take() != ")":
                raise FormatError("bare word inside a phrase node", path, line)
            return Node(head, tuple(children), edge)
        word = take()
        if word == ")":
            raise FormatError(f"({symbol}) has neither word nor children", path, line)
        if take() != ")":
            raise FormatError(f"extra material after word {word!r}", path, line)
        return Leaf(head, None if word == MISSING_WORD else word, edge)

    items = []
    while peek() is not None:
        items.append(expr())
    return ChunkTree(tuple(items))


def format_item(item: Item) -> str:
    if isinstance(item, Leaf):
        sym = item.pos if item.edge is None else f"{item.pos}-{item.edge}"
        word = item.word if item.word is not None else MISSING_WORD
        _check_atom(sym)
        _check_atom(word)
        return f"({sym} {word})"
    sym = item.label if item.edge is None else f"{item.label}-{item.edge}"
    _check_atom(sym)
    inner = " ".join(format_item(c) for c in item.children)
    return f"({sym} {inner})"


def format_tree(tree: ChunkTree) -> str:
    return " ".join(format_item(item) for item in tree.items)


def _check_atom(atom: str) -> None:
    if not atom or re.search(r"[()\s]", atom):
        raise FormatError(f"symbol or word not writable in bracketed format: {atom!r}")


# ----------------------------------------------------------------- columnar

def format_tagged(sequences: Iterable[TagSequence]) -> str:
    """Render tag sequences as a columnar document (lossless round trip)."""
    lines = [COLUMNAR_HEADER]
    first = True
    for seq in sequences:
        if not first:
            lines.append("")
        first = False
        for i, tag in enumerate(seq.tags):
            word = seq.word_at(i)
            word = MISSING_WORD if word is None else word
            for cell in (word, tag.pos, tag.rel, tag.cat):
                if not cell or "\t" in cell or "\n" in cell:
                    raise FormatError(f"cell not writable in columnar format: {cell!r}")
            lines.append(f"{word}\t{tag.pos}\t{tag.rel}\t{tag.cat}")
    return "\n".join(lines) + "\n"


def write_tagged(
    sequences: Iterable[TagSequence],
    path: str | Path,
) -> None:
    """Write tag sequences in columnar format (lossless round trip)."""
    Path(path).write_text(format_tagged(sequences), encoding="utf-8")


def read_tagged(path: str | Path) -> list[TagSequence]:
    path = str(path)
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().split("\n")
    if not lines or lines[0] != COLUMNAR_HEADER:
        raise FormatError(f"missing header line {COLUMNAR_HEADER!r}", path, 1)

    sequences: list[TagSequence] = []
    tags: list[StructuralTag] = []
    words: list[str | None] = []

    def flush() -> None:
        if tags:
            kept = None if all(w is None for w in words) else tuple(words)
            sequences.append(TagSequence(tuple(tags), kept))
            tags.clear()
            words.clear()

    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            flush()
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise FormatError(f"expected 4 columns, found {len(cells)}", path, n)
        word, pos, rel, cat = cells
        if rel not in REL_SET:
            raise FormatError(f"unknown rel symbol {rel!r}", path, n)
        tags.append(StructuralTag(pos, rel, cat))
        words.append(None if word == MISSING_WORD else word)
    flush()
    return sequences


# ------------------------------------------------------------------- corpus

def load_corpus(
    path: str | Path,
    format: str = "bracketed",
    tagset: Iterable[str] | None = None,
    labelset: Iterable[str] | None = None,
) -> Corpus:
    """Load a corpus, validating structure and (optionally) vocabulary.

    Unknown pos tags or phrase labels raise VocabularyError naming the
    sentence; structural problems raise FormatError. Columnar repairs
    are collected as diagnostics, not errors.
    """
    path = str(path)
    trees: list[ChunkTree] = []
    notes: list[str] = []
    if format == "bracketed":
        with open(path, encoding="utf-8") as handle:
            for n, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                tree = parse_bracketed(line, path, n)
                _validate_loaded(tree, tagset, labelset, path, n)
                trees.append(tree)
    elif format == "columnar":
        for k, seq in enumerate(read_tagged(path)):
            out = decode_tags(seq)
            for repair in out.repairs:
                notes.append(
                    f"sentence {k}: token {repair.index} {repair.tag} "
                    f"treated as rel 1 ({repair.reason})"
                )
            _validate_loaded(out.tree, tagset, labelset, path, k + 1)
            trees.append(out.tree)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return Corpus(tuple(trees), tuple(notes))


def _validate_loaded(tree, tagset, labelset, path, line) -> None:
    structural = validate_tree(tree)
    if structural:
        raise FormatError("; ".join(structural), path, line)
    if tagset is None and labelset is None:
        return
    vocab = validate_tree(tree, tagset, labelset)
    if vocab:
        raise VocabularyError(f"{path}:{line}: " + "; ".join(vocab))


def save_corpus(corpus: Corpus, path: str | Path, format: str = "bracketed") -> None:
    path = Path(path)
    if format == "bracketed":
        lines = [format_tree(tree) for tree in corpus]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    elif format == "columnar":
        write_tagged((encode_tree(tree) for tree in corpus), path)
    else:
        raise ValueError(f"unknown corpus format {format!r}")


def read_symbols(path: str | Path) -> tuple[str, ...]:
    """Read one symbol per line; blank lines and # comments skipped."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return tuple(out)


# ------------------------------------------------------------------- chunks

def extract_chunks(
    corpus: Corpus,
    categories: Iterable[str] = DEFAULT_CHUNK_CATEGORIES,
) -> Corpus:
    """Harvest maximal chunk nodes as one-chunk sentences.

    Walks each tree top-down and takes every highest node whose label
    is in ``categories`` without descending into it; material outside
    such nodes is dropped.
    """
    wanted = set(categories)
    chunks: list[ChunkTree] = []

    def walk(item: Item) -> None:
        if isinstance(item, Leaf):
            return
        if item.label in wanted:
            chunks.append(ChunkTree((item,)))
            return
        for child in item.children:
            walk(child)

    for tree in corpus:
        for item in tree.items:
            walk(item)
    return Corpus(tuple(chunks))


# -------------------------------------------------------------------- folds

@dataclass(frozen=True)
class FoldPlan:
    """Deterministic k-fold split of sentence indices."""

    n: int
    k: int
    seed: int
    assignment: tuple[int, ...]

    def fold(self, f: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(train indices, test indices) for fold f, in corpus order."""
        train = tuple(i for i, a in enumerate(self.assignment) if a != f)
        test = tuple(i for i, a in enumerate(self.assignment) if a == f)
        return train, test


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Shuffle indices with the seed and deal them round-robin.

    Fold sizes differ by at most one.
    """
    if not 2 <= k <= max(n, 2):
        raise ValueError(f"cannot split {n} sentences into {k} folds")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    assignment = [0] * n
    for position, index in enumerate(order):
        assignment[index] = position % k
    return FoldPlan(n, k, seed, tuple(assignment))
