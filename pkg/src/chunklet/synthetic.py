"""Seeded demo treebank over a small NP/PP/AP grammar.

The grammar builds German-style chunk trees with two ambiguities on
identical POS surfaces: a PP behind a noun phrase is a modifier inside
it or a separate chunk (the choice correlates with an adjective
standing directly before the head noun), and a second noun phrase is a
postnominal attribute or an independent chunk.  POS identity varies
freely within each structural role (several determiner, head and
preposition tags), so sparse-data estimators see fragmented evidence
while the structural signal itself stays stable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List

from .trees import ChunkTree, Item, Leaf, Node

DEFAULT_SEED = 94023

_DETERMINERS = (
    ("ART", 0.52),
    ("PIDAT", 0.12),
    ("PPOSAT", 0.11),
    ("CARD", 0.1),
    ("PDAT", 0.09),
    ("PIAT", 0.06),
)
_HEADS = (
    ("NN", 0.6),
    ("NE", 0.16),
    ("FM", 0.08),
    ("PIS", 0.06),
    ("XY", 0.04),
    ("TRUNC", 0.03),
    ("PDS", 0.03),
)
_PREPOSITIONS = (("APPR", 0.75), ("APPRART", 0.25))
_OUT_TOKENS = (
    ("VVFIN", 0.25),
    ("VAFIN", 0.1),
    ("VMFIN", 0.06),
    ("ADV", 0.18),
    ("KON", 0.1),
    ("PTKNEG", 0.07),
    ("PROAV", 0.06),
    ("PWAV", 0.05),
    ("PTKVZ", 0.05),
    ("PPER", 0.05),
    ("ITJ", 0.03),
)
_DEGREE = (("ADV", 0.55), ("ADJD", 0.45))


def _pick(rng: random.Random, table) -> str:
    r = rng.random()
    acc = 0.0
    for symbol, mass in table:
        acc += mass
        if r < acc:
            return symbol
    return table[-1][0]


@dataclass(frozen=True)
class GrammarConfig:
    """Branching probabilities; defaults keep all shapes well inside the
    depth bound."""

    determiner: float = 0.68
    one_adjective: float = 0.38
    two_adjectives: float = 0.12
    adjective_phrase: float = 0.25
    inner_adjective: float = 0.3
    pp_follows: float = 0.5
    attach_with_adjective: float = 0.85
    attach_without_adjective: float = 0.12
    genitive: float = 0.2
    chunk_np: float = 0.52
    chunk_pp: float = 0.15
    chunk_ap: float = 0.08
    max_items: int = 3


DEFAULT_CONFIG = GrammarConfig()


def _nominal(
    rng: random.Random, cfg: GrammarConfig, rich: bool, determiner: bool = True
) -> tuple[List[Item], bool]:
    """Children of an NP core; flags an adjective adjacent to the head."""
    children: List[Item] = []
    if determiner and rng.random() < cfg.determiner:
        children.append(Leaf(_pick(rng, _DETERMINERS), None))
    head = _pick(rng, _HEADS)
    n_adj = 0
    if head == "NN":
        if rich:
            r = rng.random()
            if r < cfg.two_adjectives:
                n_adj = 2
            elif r < cfg.two_adjectives + cfg.one_adjective:
                n_adj = 1
        elif rng.random() < cfg.inner_adjective:
            n_adj = 1
    for k in range(n_adj):
        final = k == n_adj - 1
        if rich and not final and rng.random() < cfg.adjective_phrase:
            children.append(
                Node("AP", (Leaf(_pick(rng, _DEGREE), None), Leaf("ADJA", None)))
            )
        else:
            children.append(Leaf("ADJA", None))
    children.append(Leaf(head, None))
    return children, n_adj > 0


def _pp(rng: random.Random, cfg: GrammarConfig, rich: bool = False) -> Node:
    prep = _pick(rng, _PREPOSITIONS)
    # A fused preposition-article leaves no room for a determiner.
    inner, _ = _nominal(rng, cfg, rich=rich, determiner=prep == "APPR")
    return Node("PP", (Leaf(prep, None), Node("NP", tuple(inner))))


def _ap(rng: random.Random, cfg: GrammarConfig) -> Node:
    children: List[Item] = []
    if rng.random() < 0.5:
        children.append(Leaf(_pick(rng, _DEGREE), None))
    children.append(Leaf("ADJA", None))
    return Node("AP", tuple(children))


def _np_group(rng: random.Random, cfg: GrammarConfig) -> List[Item]:
    """An NP, possibly with a PP or NP attached inside it or trailing."""
    children, adjacent = _nominal(rng, cfg, rich=True)
    r = rng.random()
    if r < cfg.pp_follows:
        inside = (
            cfg.attach_with_adjective
            if adjacent
            else cfg.attach_without_adjective
        )
        pp = _pp(rng, cfg)
        if rng.random() < inside:
            return [Node("NP", tuple(children) + (pp,))]
        return [Node("NP", tuple(children)), pp]
    if r < cfg.pp_follows + cfg.genitive:
        inner, _ = _nominal(rng, cfg, rich=False)
        attribute = Node("NP", tuple(inner))
        inside = (
            cfg.attach_with_adjective
            if adjacent
            else cfg.attach_without_adjective
        )
        if rng.random() < inside:
            return [Node("NP", tuple(children) + (attribute,))]
        return [Node("NP", tuple(children)), attribute]
    return [Node("NP", tuple(children))]


def generate_tree(
    rng: random.Random, cfg: GrammarConfig = DEFAULT_CONFIG
) -> ChunkTree:
    items: List[Item] = []
    count = 1 + int(rng.random() * cfg.max_items)
    for _ in range(count):
        r = rng.random()
        if r < cfg.chunk_np:
            items.extend(_np_group(rng, cfg))
        elif r < cfg.chunk_np + cfg.chunk_pp:
            items.append(_pp(rng, cfg, rich=True))
        elif r < cfg.chunk_np + cfg.chunk_pp + cfg.chunk_ap:
            items.append(_ap(rng, cfg))
        else:
            items.append(Leaf(_pick(rng, _OUT_TOKENS), None))
    return ChunkTree(tuple(items))


def generate_corpus(
    size: int, seed: int = DEFAULT_SEED, cfg: GrammarConfig = DEFAULT_CONFIG
) -> List[ChunkTree]:
    if size < 0:
        raise ValueError("corpus size must be non-negative")
    rng = random.Random(seed)
    return [generate_tree(rng, cfg) for _ in range(size)]
