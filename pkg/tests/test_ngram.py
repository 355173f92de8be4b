"""Trigram interpolation model tests.

The lambda fixtures were worked out by hand from the deleted
estimation rule before the implementation existed.
"""

import json
import math
import random
from collections import Counter

import pytest

from chunklet.ngram import (
    InterpolatedTrigramModel,
    count_ngrams,
    deleted_interpolation,
)
from chunklet.tags import BOUNDARY, StructuralTag


def T(pos, rel="0", cat="NP"):
    return StructuralTag(pos, rel, cat)


A, B, C, D, E = (T(x) for x in "abcde")


def test_counts_three_windows_per_token():
    uni, bi, tri = count_ngrams([[A, A, A]])
    assert uni == {A: 3}
    assert bi == {(BOUNDARY, A): 1, (A, A): 2}
    assert tri == {(BOUNDARY, BOUNDARY, A): 1, (BOUNDARY, A, A): 1, (A, A, A): 1}


def test_counts_match_brute_force():
    rng = random.Random(7)
    tags = [A, B, C, D, E]
    seqs = [
        [rng.choice(tags) for _ in range(rng.randint(1, 9))] for _ in range(50)
    ]
    uni, bi, tri = count_ngrams(seqs)
    # independent recount via explicit window slicing
    xu, xb, xt = Counter(), Counter(), Counter()
    for seq in seqs:
        padded = [BOUNDARY, BOUNDARY] + list(seq)
        for i in range(len(seq)):
            xu[padded[i + 2]] += 1
            xb[tuple(padded[i + 1 : i + 3])] += 1
            xt[tuple(padded[i : i + 3])] += 1
    assert uni == xu and bi == xb and tri == xt
    assert sum(uni.values()) == sum(len(s) for s in seqs)


def test_single_tag_corpus_puts_all_mass_on_unigram():
    model = InterpolatedTrigramModel.fit([[A, A, A]])
    assert model.lambdas == (1.0, 0.0, 0.0)


def test_alternating_corpus_prefers_bigram():
    # [a b a b a b]: trigram and bigram leave-one-out ratios tie at 1
    # inside the repetition and ties fall to the lower order.
    model = InterpolatedTrigramModel.fit([[A, B, A, B, A, B]])
    l1, l2, l3 = model.lambdas
    assert l1 == 1 / 6 and l2 == 5 / 6 and l3 == 0.0


def test_hand_worked_lambda_votes():
    # [a b c] twice and [d b e] once: the repeated trigram (a b c)
    # votes for order 3 (weight 2), the boundary trigrams vote for
    # order 2 (weight 4), everything in the singleton sentence votes
    # for order 1 (weight 3).
    model = InterpolatedTrigramModel.fit([[A, B, C], [A, B, C], [D, B, E]])
    l1, l2, l3 = model.lambdas
    assert l1 == 3 / 9 and l2 == 4 / 9 and l3 == 2 / 9


def test_lambda_simplex_property():
    rng = random.Random(13)
    tags = [A, B, C, D, E]
    for _ in range(20):
        seqs = [
            [rng.choice(tags) for _ in range(rng.randint(1, 8))]
            for _ in range(rng.randint(1, 30))
        ]
        lambdas = deleted_interpolation(*count_ngrams(seqs))
        assert all(l >= 0.0 for l in lambdas)
        assert abs(sum(lambdas) - 1.0) <= 1e-12


def test_proper_distribution_over_seen_histories():
    rng = random.Random(29)
    tags = [A, B, C, D]
    seqs = [
        [rng.choice(tags) for _ in range(rng.randint(1, 7))] for _ in range(40)
    ]
    model = InterpolatedTrigramModel.fit(seqs)
    vocab = model.futures()
    histories = {(u, v) for (u, v, _) in model.trigrams}
    for u, v in histories:
        total = sum(model.prob(w, u, v) for w in vocab)
        assert abs(total - 1.0) <= 1e-9


def test_unseen_history_mass_is_deficient():
    model = InterpolatedTrigramModel.fit([[A, B, C], [A, B, C], [D, B, E]])
    novel = T("zz")
    total = sum(model.prob(w, novel, novel) for w in model.futures())
    l1 = model.lambdas[0]
    assert abs(total - l1) <= 1e-12
    assert model.prob(novel, BOUNDARY, BOUNDARY) == 0.0


def test_logprob_of_impossible_event():
    model = InterpolatedTrigramModel.fit([[A, A]])
    assert model.logprob(B, BOUNDARY, A) == -math.inf
    assert model.logprob(A, BOUNDARY, A) == pytest.approx(0.0)


def test_serialization_round_trip_is_exact():
    rng = random.Random(41)
    tags = [A, B, C, D, E]
    seqs = [
        [rng.choice(tags) for _ in range(rng.randint(1, 8))] for _ in range(25)
    ]
    model = InterpolatedTrigramModel.fit(seqs)
    data = json.loads(json.dumps(model.to_dict()))
    back = InterpolatedTrigramModel.from_dict(data)
    assert back.lambdas == model.lambdas
    assert back.unigrams == model.unigrams
    assert back.bigrams == model.bigrams
    assert back.trigrams == model.trigrams
    for _ in range(50):
        u, v, w = (rng.choice(tags) for _ in range(3))
        assert back.prob(w, u, v) == model.prob(w, u, v)


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        InterpolatedTrigramModel.fit([])
