"""Linear-interpolation trigram model over structural tags."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .tags import BOUNDARY, StructuralTag


def count_ngrams(
    sequences: Iterable[Sequence[StructuralTag]],
) -> tuple[Counter, Counter, Counter]:
    """Count unigrams, bigrams and trigrams of structural tags.

    Each sequence is padded with two boundary tags at the start and
    windows are indexed by their final position, so a sequence of n
    tags contributes exactly n windows of every order.  There is no
    end padding.
    """
    uni: Counter = Counter()
    bi: Counter = Counter()
    tri: Counter = Counter()
    for seq in sequences:
        padded = [BOUNDARY, BOUNDARY, *seq]
        for k in range(2, len(padded)):
            uni[padded[k]] += 1
            bi[padded[k - 1], padded[k]] += 1
            tri[padded[k - 2], padded[k - 1], padded[k]] += 1
    return uni, bi, tri


def _marginal_bi(bi: Counter) -> Counter:
    den: Counter = Counter()
    for (v, _), c in bi.items():
        den[v] += c
    return den


def _marginal_tri(tri: Counter) -> Counter:
    den: Counter = Counter()
    for (u, v, _), c in tri.items():
        den[u, v] += c
    return den


def _ratio(num: int, den: int) -> float:
    # deleted-estimation ratio; 0/0 counts as 0
    return num / den if den > 0 else 0.0


def deleted_interpolation(
    uni: Counter, bi: Counter, tri: Counter
) -> tuple[float, float, float]:
    """Compute interpolation weights (l1, l2, l3) by deleted estimation.

    Every trigram type votes with its count for the order whose
    leave-one-out relative frequency of the final tag is largest.
    Ties go to the lower order.  The weights are normalized to sum
    to one.
    """
    n = sum(uni.values())
    den3 = _marginal_tri(tri)
    den2 = _marginal_bi(bi)
    votes = [0, 0, 0]
    for (u, v, w), f in tri.items():
        d3 = _ratio(tri[u, v, w] - 1, den3[u, v] - 1)
        d2 = _ratio(bi[v, w] - 1, den2[v] - 1)
        d1 = _ratio(uni[w] - 1, n - 1)
        best = max(d1, d2, d3)
        if d1 == best:
            votes[0] += f
        elif d2 == best:
            votes[1] += f
        else:
            votes[2] += f
    total = sum(votes)
    if total == 0:
        return (1.0, 0.0, 0.0)
    l1, l2, l3 = (v / total for v in votes)
    return (l1, l2, l3)


@dataclass
class InterpolatedTrigramModel:
    """Trigram tag model smoothed by linear interpolation.

    Conditional probabilities of each order divide by the marginal
    count of the history, so every order is a proper distribution
    over continuations of a seen history.  Orders whose history was
    never seen contribute nothing, which leaves some mass unassigned
    for novel histories.
    """

    unigrams: dict
    bigrams: dict
    trigrams: dict
    lambdas: tuple[float, float, float]
    _n: int = field(init=False, repr=False)
    _den2: Counter = field(init=False, repr=False)
    _den3: Counter = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._n = sum(self.unigrams.values())
        self._den2 = _marginal_bi(Counter(self.bigrams))
        self._den3 = _marginal_tri(Counter(self.trigrams))

    @classmethod
    def fit(cls, sequences: Iterable[Sequence[StructuralTag]]) -> "InterpolatedTrigramModel":
        uni, bi, tri = count_ngrams(sequences)
        if not uni:
            raise ValueError("cannot fit an interpolation model on an empty corpus")
        lambdas = deleted_interpolation(uni, bi, tri)
        return cls(dict(uni), dict(bi), dict(tri), lambdas)

    def prob(self, w: StructuralTag, u: StructuralTag, v: StructuralTag) -> float:
        l1, l2, l3 = self.lambdas
        p = l1 * self.unigrams.get(w, 0) / self._n if self._n else 0.0
        d2 = self._den2.get(v, 0)
        if d2:
            p += l2 * self.bigrams.get((v, w), 0) / d2
        d3 = self._den3.get((u, v), 0)
        if d3:
            p += l3 * self.trigrams.get((u, v, w), 0) / d3
        return p

    def logprob(self, w: StructuralTag, u: StructuralTag, v: StructuralTag) -> float:
        p = self.prob(w, u, v)
        return math.log(p) if p > 0.0 else -math.inf

    def futures(self) -> list[StructuralTag]:
        return sorted(self.unigrams)

    def to_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "unigrams": [[*k, c] for k, c in sorted(self.unigrams.items())],
            "bigrams": [[*k[0], *k[1], c] for k, c in sorted(self.bigrams.items())],
            "trigrams": [
                [*k[0], *k[1], *k[2], c] for k, c in sorted(self.trigrams.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InterpolatedTrigramModel":
        tag = StructuralTag
        uni = {tag(*row[:3]): row[3] for row in data["unigrams"]}
        bi = {(tag(*row[:3]), tag(*row[3:6])): row[6] for row in data["bigrams"]}
        tri = {
            (tag(*row[:3]), tag(*row[3:6]), tag(*row[6:9])): row[9]
            for row in data["trigrams"]
        }
        l1, l2, l3 = data["lambdas"]
        return cls(uni, bi, tri, (l1, l2, l3))
