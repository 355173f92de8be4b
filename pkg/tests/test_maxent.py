"""Conditional maxent training tests.

The analytic fixture (three positive events out of four with a single
indicator feature) has the closed-form solution p = 3/4, weight ln 3.
"""

import json
import math
import random

import numpy as np
import pytest

from chunklet.errors import UnknownFutureError
from chunklet.features import (
    FeatureInstance,
    FeatureSet,
    default_patterns,
    extract_features,
    is_active,
    parse_pattern,
    parse_patterns,
)
from chunklet.maxent import (
    MaxentModel,
    build_activation_grid,
    collect_events,
    fit_maxent,
)
from chunklet.tags import BOUNDARY, StructuralTag


def _random_tag(rng):
    return StructuralTag(
        rng.choice(("ART", "NN", "APPR")),
        rng.choice(("0", "1", "+")),
        rng.choice(("NP", "PP", "NONE")),
    )


def _random_corpus(rng, n, max_len=6):
    return [
        [_random_tag(rng) for _ in range(rng.randint(1, max_len))]
        for _ in range(n)
    ]


def test_zero_weights_give_uniform_distribution():
    rng = random.Random(3)
    corpus = _random_corpus(rng, 10)
    result = fit_maxent(corpus, iterations=0, tolerance=0.0)
    model = result.model
    probs = model.prob_vector(BOUNDARY, BOUNDARY)
    assert np.allclose(probs, 1.0 / len(model.futures), atol=1e-12)


def test_single_feature_analytic_solution():
    y1 = StructuralTag("Y1", "1", "NONE")
    y0 = StructuralTag("Y0", "1", "NONE")
    corpus = [[y1], [y1], [y1], [y0]]
    fs = FeatureSet(
        patterns=(parse_pattern("- | - | t"),),
        instances=(FeatureInstance(0, (("Y1",),)),),
        counts=(3,),
        cutoff=1,
    )
    result = fit_maxent(corpus, feature_set=fs, iterations=50, tolerance=1e-4)
    assert result.converged
    p = result.model.conditional_prob(y1, BOUNDARY, BOUNDARY)
    assert abs(p - 0.75) <= 1e-4
    assert result.model.weights[0] == pytest.approx(math.log(3.0), abs=1e-3)


def test_grid_matches_brute_force_activation():
    rng = random.Random(17)
    corpus = _random_corpus(rng, 15)
    patterns = default_patterns()
    fs = extract_features(corpus, patterns)
    histories, futures, _ = collect_events(corpus)
    grid = build_activation_grid(fs, histories, futures)
    got = set(zip(grid.rows.tolist(), grid.cols.tolist(), grid.feats.tolist()))
    expected = set()
    for hi, (u, v) in enumerate(histories):
        for yi, y in enumerate(futures):
            for fi, inst in enumerate(fs.instances):
                if is_active(inst, patterns, (u, v, y)):
                    expected.add((hi, yi, fi))
    assert got == expected


def test_empirical_expectations_equal_extraction_counts():
    rng = random.Random(23)
    corpus = _random_corpus(rng, 20)
    fs = extract_features(corpus, default_patterns())
    histories, futures, emp = collect_events(corpus)
    grid = build_activation_grid(fs, histories, futures)
    emp_feats = grid.feature_expectation(emp.ravel(), len(fs.instances))
    assert emp_feats.tolist() == list(fs.counts)


def test_probabilities_match_brute_force():
    rng = random.Random(31)
    corpus = _random_corpus(rng, 12)
    result = fit_maxent(corpus, iterations=3)
    model = result.model
    for _ in range(10):
        u, v = _random_tag(rng), _random_tag(rng)
        probs = model.prob_vector(u, v)
        scores = []
        for y in model.futures:
            s = 0.0
            for fi, inst in enumerate(model.feature_set.instances):
                if is_active(inst, model.feature_set.patterns, (u, v, y)):
                    s += model.weights[fi]
            scores.append(s)
        exps = [math.exp(s) for s in scores]
        z = sum(exps)
        assert np.allclose(probs, [e / z for e in exps], rtol=1e-12)
        assert abs(probs.sum() - 1.0) <= 1e-9


def test_log_likelihood_never_decreases():
    rng = random.Random(37)
    corpus = _random_corpus(rng, 25)
    result = fit_maxent(corpus, iterations=10, tolerance=0.0)
    lls = result.log_likelihoods
    assert len(lls) >= 2
    for a, b in zip(lls, lls[1:]):
        assert b >= a - 1e-9 * (1.0 + abs(a))


def test_residual_convergence_on_small_corpus():
    rng = random.Random(41)
    corpus = _random_corpus(rng, 8, max_len=4)
    patterns = parse_patterns(["- | - | r,t", "- | r | r", "- | - | c"])
    result = fit_maxent(
        corpus, patterns=patterns, iterations=3000, tolerance=1e-4
    )
    assert result.converged
    assert result.residuals[-1] <= 1e-4
    # residuals settle monotonically once past the first few updates
    assert result.residuals[-1] <= result.residuals[0]


def test_unknown_future_raises():
    rng = random.Random(43)
    corpus = _random_corpus(rng, 5)
    model = fit_maxent(corpus, iterations=1).model
    with pytest.raises(UnknownFutureError):
        model.conditional_prob(
            StructuralTag("XX", "1", "NONE"), BOUNDARY, BOUNDARY
        )


def test_serialization_round_trip_is_bit_identical():
    rng = random.Random(47)
    corpus = _random_corpus(rng, 15)
    model = fit_maxent(corpus, iterations=3).model
    data = json.loads(json.dumps(model.to_dict()))
    back = MaxentModel.from_dict(data)
    assert back.to_dict() == model.to_dict()
    assert back.weights.tolist() == model.weights.tolist()
    assert back.futures == model.futures
    for _ in range(20):
        u, v = _random_tag(rng), _random_tag(rng)
        assert back.prob_vector(u, v).tolist() == model.prob_vector(u, v).tolist()
