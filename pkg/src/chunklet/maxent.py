"""Conditional maximum entropy model trained by improved iterative scaling.

The model estimates p(y | x) where x is a pair of preceding structural
tags and y is the tag being predicted.  Binary features over (x, y) are
instances of the configured patterns; the distribution is the exponential
form exp(sum of active weights) normalized per history.

Feature expectations are taken under the normalized empirical
distribution (event counts divided by the number of contexts), so
residuals are on a probability scale.  Training solves, for every
feature i, the scaling equation

    sum_m a[i, m] * exp(delta_i * m) = empirical_expectation[i]

where m is the number of features active at an event and a[i, m] collects
the current model mass of events with activation count m.  The left side
is monotone in delta_i, so a Newton iteration bracketed on [-20, 20]
finds the root; the bracket doubles as a step clamp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UnknownFutureError
from .features import (
    FeatureSet,
    default_patterns,
    extract_features,
    format_pattern,
    iter_contexts,
    parse_pattern,
)
from .tags import StructuralTag

History = tuple[StructuralTag, StructuralTag]

_EXP_CLIP = 500.0


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    mx = scores.max(axis=1, keepdims=True)
    logz = mx + np.log(np.exp(scores - mx).sum(axis=1, keepdims=True))
    return scores - logz


@dataclass
class ActivationGrid:
    """Sparse activation structure over histories x futures.

    Triples (row, col, feature) list every active feature instance on
    the grid; `cell` is the flattened cell index of each triple and
    `m_of_triple` the total activation count at that cell.
    """

    n_histories: int
    n_futures: int
    rows: np.ndarray
    cols: np.ndarray
    feats: np.ndarray
    cell: np.ndarray = field(init=False)
    m_of_triple: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.cell = self.rows.astype(np.int64) * self.n_futures + self.cols
        counts = np.bincount(
            self.cell, minlength=self.n_histories * self.n_futures
        )
        self.m_of_triple = counts[self.cell]

    def scores(self, weights: np.ndarray) -> np.ndarray:
        flat = np.bincount(
            self.cell,
            weights=weights[self.feats],
            minlength=self.n_histories * self.n_futures,
        )
        return flat.reshape(self.n_histories, self.n_futures)

    def feature_expectation(
        self, cell_weights: np.ndarray, n_features: int
    ) -> np.ndarray:
        return np.bincount(
            self.feats, weights=cell_weights[self.cell], minlength=n_features
        )


def build_activation_grid(
    feature_set: FeatureSet,
    histories: Sequence[History],
    futures: Sequence[StructuralTag],
) -> ActivationGrid:
    """Locate every active feature instance on the history/future grid.

    Works one pattern at a time: histories and futures are projected
    through the pattern's masks and interned to integer codes, the
    pattern's instances become codes in the same space, and a sorted
    membership probe finds the matching cells.
    """
    n_h, n_y = len(histories), len(futures)
    grouped: dict[int, list[tuple[int, tuple]]] = {}
    for feat_id, inst in enumerate(feature_set.instances):
        grouped.setdefault(inst.pattern, []).append((feat_id, inst.values))

    row_parts: list[np.ndarray] = []
    col_parts: list[np.ndarray] = []
    feat_parts: list[np.ndarray] = []
    for pid, insts in grouped.items():
        pattern = feature_set.patterns[pid]
        hist_slots = [s for s in pattern.present if s < 2]

        hist_codes = np.empty(n_h, dtype=np.int64)
        hist_intern: dict[tuple, int] = {}
        for hi, pair in enumerate(histories):
            key = tuple(pattern.slots[s].project(pair[s]) for s in hist_slots)
            hist_codes[hi] = hist_intern.setdefault(key, len(hist_intern))

        fut_codes = np.empty(n_y, dtype=np.int64)
        fut_intern: dict[tuple, int] = {}
        for yi, y in enumerate(futures):
            key = pattern.slots[2].project(y)
            fut_codes[yi] = fut_intern.setdefault(key, len(fut_intern))
        n_fut_codes = len(fut_intern)

        inst_codes: list[int] = []
        inst_feats: list[int] = []
        for feat_id, values in insts:
            hc = hist_intern.get(tuple(values[: len(hist_slots)]))
            fc = fut_intern.get(values[-1])
            if hc is None or fc is None:
                continue
            inst_codes.append(hc * n_fut_codes + fc)
            inst_feats.append(feat_id)
        if not inst_codes:
            continue

        codes = np.asarray(inst_codes, dtype=np.int64)
        feats = np.asarray(inst_feats, dtype=np.int64)
        order = np.argsort(codes)
        codes, feats = codes[order], feats[order]

        flat = (hist_codes[:, None] * n_fut_codes + fut_codes[None, :]).ravel()
        pos = np.searchsorted(codes, flat)
        pos_safe = np.minimum(pos, len(codes) - 1)
        hit = np.nonzero(codes[pos_safe] == flat)[0]
        row_parts.append((hit // n_y).astype(np.int64))
        col_parts.append((hit % n_y).astype(np.int64))
        feat_parts.append(feats[pos_safe[hit]])

    if row_parts:
        rows = np.concatenate(row_parts)
        cols = np.concatenate(col_parts)
        feats = np.concatenate(feat_parts)
    else:
        rows = cols = feats = np.zeros(0, dtype=np.int64)
    return ActivationGrid(n_h, n_y, rows, cols, feats)


def _solve_scaling(a: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Solve sum_m a[i, m] exp(delta * m) = target[i] per feature.

    The left side is increasing and convex in delta, so after a short
    bisection localizes the root, Newton started from the right bracket
    end stays right of the root and converges monotonically.  Roots
    outside [-20, 20] are clamped to the bracket ends; features with no
    model mass keep a zero step.
    """
    n_feats, n_m = a.shape
    ms = np.arange(n_m, dtype=float)

    def evaluate(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        expo = np.clip(delta[:, None] * ms[None, :], None, _EXP_CLIP)
        terms = a * np.exp(expo)
        return terms.sum(axis=1) - target, (terms * ms).sum(axis=1)

    lo = np.full(n_feats, -20.0)
    hi = np.full(n_feats, 20.0)
    inert = a.sum(axis=1) == 0.0
    clamp_hi = evaluate(hi)[0] <= 0.0
    clamp_lo = evaluate(lo)[0] >= 0.0
    solvable = ~(inert | clamp_hi | clamp_lo)
    for _ in range(6):
        mid = 0.5 * (lo + hi)
        positive = evaluate(mid)[0] > 0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    delta = hi
    for _ in range(40):
        val, slope = evaluate(delta)
        step = np.where(solvable, val / np.maximum(slope, 1e-300), 0.0)
        if np.abs(step).max() <= 1e-15:
            break
        delta = delta - step
    delta = np.where(clamp_hi, 20.0, delta)
    delta = np.where(clamp_lo, -20.0, delta)
    return np.where(inert, 0.0, delta)


@dataclass
class MaxentModel:
    """Trained conditional model: feature instances plus their weights."""

    futures: tuple[StructuralTag, ...]
    feature_set: FeatureSet
    weights: np.ndarray

    def __post_init__(self) -> None:
        self._future_index = {y: i for i, y in enumerate(self.futures)}

    def score_vector(self, u: StructuralTag, v: StructuralTag) -> np.ndarray:
        scores = np.zeros(len(self.futures))
        for yi, y in enumerate(self.futures):
            for fi in self.feature_set.active_set((u, v, y)):
                scores[yi] += self.weights[fi]
        return scores

    def log_prob_vector(self, u: StructuralTag, v: StructuralTag) -> np.ndarray:
        scores = self.score_vector(u, v)
        mx = scores.max()
        return scores - (mx + np.log(np.exp(scores - mx).sum()))

    def prob_vector(self, u: StructuralTag, v: StructuralTag) -> np.ndarray:
        return np.exp(self.log_prob_vector(u, v))

    def conditional_prob(
        self, y: StructuralTag, u: StructuralTag, v: StructuralTag
    ) -> float:
        yi = self._future_index.get(y)
        if yi is None:
            raise UnknownFutureError(f"tag {y} is outside the trained inventory")
        return float(self.prob_vector(u, v)[yi])

    def to_dict(self) -> dict:
        fs = self.feature_set
        return {
            "futures": [list(y) for y in self.futures],
            "patterns": [format_pattern(p) for p in fs.patterns],
            "instances": [
                [inst.pattern, [list(part) for part in inst.values]]
                for inst in fs.instances
            ],
            "instance_counts": list(fs.counts),
            "cutoff": fs.cutoff,
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MaxentModel":
        from .features import FeatureInstance

        patterns = tuple(parse_pattern(s) for s in data["patterns"])
        instances = tuple(
            FeatureInstance(pid, tuple(tuple(part) for part in values))
            for pid, values in data["instances"]
        )
        fs = FeatureSet(
            patterns=patterns,
            instances=instances,
            counts=tuple(data["instance_counts"]),
            cutoff=data["cutoff"],
        )
        futures = tuple(StructuralTag(*row) for row in data["futures"])
        weights = np.asarray(data["weights"], dtype=float)
        return cls(futures, fs, weights)


@dataclass
class TrainResult:
    """Trained model plus the per-iteration training diagnostics.

    `log_likelihoods` holds the per-event average conditional
    log-likelihood before each update and after the last one;
    `residuals` the matching gaps between empirical and model feature
    expectations (probability scale).
    """

    model: MaxentModel
    log_likelihoods: list[float]
    residuals: list[float]
    updates: int
    converged: bool


def collect_events(
    sequences: Iterable[Sequence[StructuralTag]],
) -> tuple[list[History], list[StructuralTag], np.ndarray]:
    """Histories, future inventory and the empirical count matrix."""
    counts: dict[History, dict[StructuralTag, int]] = {}
    futures: set[StructuralTag] = set()
    for seq in sequences:
        for u, v, y in iter_contexts(seq):
            per = counts.setdefault((u, v), {})
            per[y] = per.get(y, 0) + 1
            futures.add(y)
    histories = sorted(counts)
    inventory = sorted(futures)
    index = {y: i for i, y in enumerate(inventory)}
    emp = np.zeros((len(histories), len(inventory)))
    for hi, h in enumerate(histories):
        for y, c in counts[h].items():
            emp[hi, index[y]] = c
    return histories, inventory, emp


def fit_maxent(
    sequences: Sequence[Sequence[StructuralTag]],
    patterns=None,
    cutoff: int = 1,
    iterations: int = 3,
    tolerance: float = 1e-4,
    feature_set: FeatureSet | None = None,
) -> TrainResult:
    """Train a conditional model by improved iterative scaling.

    Weights start at zero (the uniform distribution).  Each pass solves
    the per-feature scaling equation and applies the update; training
    stops once the largest gap between empirical and model feature
    expectations (probability scale) falls under `tolerance`, or after
    `iterations` updates.
    """
    if feature_set is None:
        if patterns is None:
            patterns = default_patterns()
        feature_set = extract_features(sequences, patterns, cutoff=cutoff)

    histories, inventory, emp_matrix = collect_events(sequences)
    if not histories:
        raise ValueError("cannot fit a conditional model on an empty corpus")
    futures = tuple(inventory)
    grid = build_activation_grid(feature_set, histories, futures)
    n_feats = len(feature_set.instances)
    emp_dist = emp_matrix / emp_matrix.sum()
    hist_dist = emp_dist.sum(axis=1)

    emp_feats = grid.feature_expectation(emp_dist.ravel(), n_feats)
    n_m = int(grid.m_of_triple.max()) + 1 if len(grid.m_of_triple) else 1

    weights = np.zeros(n_feats)
    ll_trace: list[float] = []
    residuals: list[float] = []
    updates = 0
    converged = False
    while True:
        logp = _log_softmax(grid.scores(weights))
        ll_trace.append(float((emp_dist * logp).sum()))
        mass = hist_dist[:, None] * np.exp(logp)
        model_feats = grid.feature_expectation(mass.ravel(), n_feats)
        residual = (
            float(np.abs(model_feats - emp_feats).max()) if n_feats else 0.0
        )
        residuals.append(residual)
        if residual <= tolerance:
            converged = True
            break
        if updates >= iterations:
            break
        cell_mass = mass.ravel()[grid.cell]
        keys = grid.feats * n_m + grid.m_of_triple
        a = np.bincount(
            keys, weights=cell_mass, minlength=n_feats * n_m
        ).reshape(n_feats, n_m)
        weights = weights + _solve_scaling(a, emp_feats)
        updates += 1

    model = MaxentModel(futures, feature_set, weights)
    return TrainResult(model, ll_trace, residuals, updates, converged)
