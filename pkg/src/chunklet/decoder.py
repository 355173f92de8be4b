"""Second-order Viterbi decoding of structural tag sequences.

A sentence is decoded by maximizing the sum of contextual log
probabilities log p(s_i | s_{i-2}, s_{i-1}) over tag sequences whose
part of speech matches the input at every position (emission
probabilities are 0/1, realized by candidate filtering).  Histories at
the sentence start are padded with boundary tags.

Ties between optimal sequences are broken toward the lexicographically
smallest sequence of (rel, cat) pairs.  The dynamic program runs
backward, so suffix scores associate right to left; the forward pass
then greedily picks the smallest candidate whose step score exactly
reproduces the stored optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .maxent import MaxentModel
from .ngram import InterpolatedTrigramModel
from .tags import BOUNDARY, NO_CAT, StructuralTag, TagSequence


class TransitionScorer(Protocol):
    def log_prob(
        self, w: StructuralTag, u: StructuralTag, v: StructuralTag
    ) -> float: ...


@dataclass(frozen=True)
class StateInventory:
    """Candidate structural tags per part of speech.

    A part of speech never seen in training falls back to the single
    out-of-chunk tag (rel "1", no category).
    """

    by_pos: dict
    futures: tuple[StructuralTag, ...]

    @classmethod
    def from_sequences(
        cls, sequences: Iterable[Sequence[StructuralTag]]
    ) -> "StateInventory":
        seen: dict[str, set[StructuralTag]] = {}
        futures: set[StructuralTag] = set()
        for seq in sequences:
            for tag in seq:
                seen.setdefault(tag.pos, set()).add(tag)
                futures.add(tag)
        by_pos = {pos: tuple(sorted(tags)) for pos, tags in sorted(seen.items())}
        return cls(by_pos, tuple(sorted(futures)))

    def candidates(self, pos: str) -> tuple[StructuralTag, ...]:
        found = self.by_pos.get(pos)
        if found:
            return found
        return (StructuralTag(pos, "1", NO_CAT),)

    def to_dict(self) -> dict:
        return {
            "futures": [list(t) for t in self.futures],
            "by_pos": {
                pos: [[t.rel, t.cat] for t in tags]
                for pos, tags in self.by_pos.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StateInventory":
        by_pos = {
            pos: tuple(StructuralTag(pos, rel, cat) for rel, cat in rows)
            for pos, rows in data["by_pos"].items()
        }
        futures = tuple(StructuralTag(*row) for row in data["futures"])
        return cls(by_pos, futures)


class MaxentScorer:
    """Transition scores from a trained conditional model.

    Distributions are memoized per history; candidates outside the
    trained future inventory score the constant log(1 / |Y|).
    """

    def __init__(self, model: MaxentModel) -> None:
        self.model = model
        self._index = {y: i for i, y in enumerate(model.futures)}
        self._fallback = -math.log(len(model.futures))
        self._cache: dict = {}

    def log_prob(
        self, w: StructuralTag, u: StructuralTag, v: StructuralTag
    ) -> float:
        yi = self._index.get(w)
        if yi is None:
            return self._fallback
        vec = self._cache.get((u, v))
        if vec is None:
            vec = self.model.log_prob_vector(u, v)
            self._cache[u, v] = vec
        return float(vec[yi])


class InterpolationScorer:
    """Transition scores from the interpolated trigram baseline."""

    def __init__(self, model: InterpolatedTrigramModel) -> None:
        self.model = model
        self._fallback = -math.log(len(model.unigrams))

    def log_prob(
        self, w: StructuralTag, u: StructuralTag, v: StructuralTag
    ) -> float:
        if w not in self.model.unigrams:
            return self._fallback
        return self.model.logprob(w, u, v)


def viterbi_decode(
    candidates: Sequence[Sequence[StructuralTag]], scorer: TransitionScorer
) -> tuple[list[StructuralTag], float]:
    """Best tag sequence over per-position candidates, with its score.

    Returns the lexicographically smallest optimum under (rel, cat)
    keys.  The score is the right-to-left sum of step log probabilities.
    """
    n = len(candidates)
    if n == 0:
        return [], 0.0
    memo: dict = {}

    def step(w: StructuralTag, u: StructuralTag, v: StructuralTag) -> float:
        key = (u, v)
        per = memo.get(key)
        if per is None:
            per = memo[key] = {}
        s = per.get(w)
        if s is None:
            s = per[w] = scorer.log_prob(w, u, v)
        return s

    # suffix[i] maps history (s_{i-2}, s_{i-1}) to the best achievable
    # score of positions i..n-1
    suffix: list[dict] = [dict() for _ in range(n)]
    boundary = (BOUNDARY,)
    for i in range(n - 1, -1, -1):
        us = candidates[i - 2] if i >= 2 else boundary
        vs = candidates[i - 1] if i >= 1 else boundary
        nxt = suffix[i + 1] if i + 1 < n else None
        for u in us:
            for v in vs:
                best = -math.inf
                for w in candidates[i]:
                    s = step(w, u, v)
                    if nxt is not None:
                        s = s + nxt[v, w]
                    if s > best:
                        best = s
                suffix[i][u, v] = best

    total = suffix[0][BOUNDARY, BOUNDARY]
    if total == -math.inf:
        # every sequence is blocked and they all tie; the smallest one
        # is the pointwise smallest choice
        out = [min(c, key=lambda t: (t.rel, t.cat)) for c in candidates]
        return out, total

    out: list[StructuralTag] = []
    u, v = BOUNDARY, BOUNDARY
    for i in range(n):
        target = suffix[i][u, v]
        nxt = suffix[i + 1] if i + 1 < n else None
        chosen = None
        for w in sorted(candidates[i], key=lambda t: (t.rel, t.cat)):
            s = step(w, u, v)
            if nxt is not None:
                s = s + nxt[v, w]
            if s == target:
                chosen = w
                break
        # an exact match always exists: target was computed from these sums
        out.append(chosen)
        u, v = v, chosen
    return out, total


def decode_sequence(
    pos_tags: Sequence[str],
    inventory: StateInventory,
    scorer: TransitionScorer,
    words: Sequence[str] | None = None,
) -> tuple[TagSequence, float]:
    """Decode a full sentence of part-of-speech tags."""
    candidates = [inventory.candidates(p) for p in pos_tags]
    tags, score = viterbi_decode(candidates, scorer)
    return TagSequence(tuple(tags), tuple(words) if words else None), score


def span_candidates(
    pos_tags: Sequence[str], inventory: StateInventory
) -> list[tuple[StructuralTag, ...]]:
    """Candidates constrained so the span decodes as one chunk.

    The first token must open a chunk (rel "1" with a category), later
    tokens must not.  Positions whose filter comes up empty fall back
    to the unconstrained candidate set.
    """
    out = []
    for i, pos in enumerate(pos_tags):
        cands = inventory.candidates(pos)
        if i == 0:
            kept = tuple(t for t in cands if t.rel == "1" and t.cat != NO_CAT)
        else:
            kept = tuple(t for t in cands if t.rel != "1")
        out.append(kept if kept else cands)
    return out


def decode_span(
    pos_tags: Sequence[str],
    inventory: StateInventory,
    scorer: TransitionScorer,
    words: Sequence[str] | None = None,
) -> tuple[TagSequence, float]:
    """Decode a marked span as a single chunk with internal structure."""
    candidates = span_candidates(pos_tags, inventory)
    tags, score = viterbi_decode(candidates, scorer)
    return TagSequence(tuple(tags), tuple(words) if words else None), score
