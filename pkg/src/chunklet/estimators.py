"""Scikit-learn style estimators wrapping training and decoding.

Both parsers fit on a treebank (a sequence of chunk trees) and predict
structural-tag sequences for raw POS input.  `mode="treebank"` trains
on extracted chunks, `mode="chunking"` on whole sentences; the decoder
itself is identical.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

from sklearn.base import BaseEstimator

from .codec import decode_tags, encode_tree
from .corpus import extract_chunks
from .decoder import (
    InterpolationScorer,
    MaxentScorer,
    StateInventory,
    decode_sequence,
    decode_span,
)
from .errors import NotTrainedError
from .evaluation import EvalReport, evaluate_predictor
from .maxent import fit_maxent
from .model_io import ParserModel, load_model, save_model
from .ngram import InterpolatedTrigramModel
from .tags import StructuralTag, TagSequence
from .trees import ChunkTree

MODES = ("chunking", "treebank")


class _PartialParser(BaseEstimator):
    """Shared decoding surface; subclasses provide fit and a scorer."""

    def __init__(self, mode: str = "chunking"):
        self.mode = mode

    # -- fitting helpers -------------------------------------------------

    def _training_sequences(
        self, trees: Iterable[ChunkTree]
    ) -> List[tuple[StructuralTag, ...]]:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode: {self.mode!r}")
        corpus = list(trees)
        if self.mode == "treebank":
            corpus = extract_chunks(corpus)
        if not corpus:
            raise ValueError("training corpus is empty")
        return [encode_tree(t).tags for t in corpus]

    def _check_fitted(self) -> None:
        if not hasattr(self, "inventory_"):
            raise NotTrainedError("estimator has not been fitted")

    # -- decoding surface ------------------------------------------------

    def predict_one(
        self, pos_tags: Sequence[str], words: Sequence[str] | None = None
    ) -> TagSequence:
        self._check_fitted()
        return decode_sequence(pos_tags, self.inventory_, self.scorer_, words)[0]

    def predict(
        self, X: Iterable[Sequence[str]]
    ) -> List[TagSequence]:
        return [self.predict_one(pos) for pos in X]

    def transform(self, X: Iterable[Sequence[str]]) -> List[TagSequence]:
        return self.predict(X)

    def predict_trees(self, X: Iterable[Sequence[str]]) -> List[ChunkTree]:
        return [decode_tags(seq.tags).tree for seq in self.predict(X)]

    def parse_span(
        self, pos_tags: Sequence[str], words: Sequence[str] | None = None
    ) -> TagSequence:
        """Decode a marked span as one chunk with internal structure."""
        self._check_fitted()
        return decode_span(pos_tags, self.inventory_, self.scorer_, words)[0]

    # -- evaluation ------------------------------------------------------

    def evaluate(self, trees: Sequence[ChunkTree]) -> EvalReport:
        self._check_fitted()
        return evaluate_predictor(self.predict_one, trees, mode=self.mode)

    def score(self, X: Sequence[ChunkTree], y=None) -> float:
        """Tags accuracy on gold trees, as a ratio in [0, 1]."""
        report = self.evaluate(X)
        row = report.row("tags")
        return row.matched / row.gold if row.gold else 0.0

    # -- persistence -----------------------------------------------------

    def as_model(self) -> ParserModel:
        raise NotImplementedError

    def save(self, path: str) -> None:
        save_model(self.as_model(), path)


class MaxentPartialParser(_PartialParser):
    """Viterbi decoder over maximum-entropy contextual probabilities."""

    def __init__(
        self,
        iterations: int = 3,
        cutoff: int = 1,
        tolerance: float = 1e-4,
        patterns=None,
        mode: str = "chunking",
    ):
        super().__init__(mode=mode)
        self.iterations = iterations
        self.cutoff = cutoff
        self.tolerance = tolerance
        self.patterns = patterns

    def fit(self, X: Iterable[ChunkTree], y=None) -> "MaxentPartialParser":
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        sequences = self._training_sequences(X)
        result = fit_maxent(
            sequences,
            patterns=self.patterns,
            cutoff=self.cutoff,
            iterations=self.iterations,
            tolerance=self.tolerance,
        )
        self.inventory_ = StateInventory.from_sequences(sequences)
        self.model_ = result.model
        self.train_result_ = result
        self.scorer_ = MaxentScorer(result.model)
        return self

    @property
    def feature_count_(self) -> int:
        self._check_fitted()
        return len(self.model_.feature_set.instances)

    def as_model(self) -> ParserModel:
        self._check_fitted()
        return ParserModel(
            inventory=self.inventory_,
            maxent=self.model_,
            metadata={
                "source": "maxent",
                "mode": self.mode,
                "iterations": self.iterations,
                "cutoff": self.cutoff,
                "updates": self.train_result_.updates,
                "converged": self.train_result_.converged,
            },
        )

    @classmethod
    def from_model(cls, model: ParserModel) -> "MaxentPartialParser":
        if model.maxent is None:
            raise ValueError("model file carries no maxent source")
        meta = model.metadata
        est = cls(
            iterations=int(meta.get("iterations", 1)),
            cutoff=int(meta.get("cutoff", 1)),
            mode=meta.get("mode", "chunking"),
        )
        est.inventory_ = model.inventory
        est.model_ = model.maxent
        est.scorer_ = MaxentScorer(model.maxent)
        return est

    @classmethod
    def load(cls, path: str) -> "MaxentPartialParser":
        return cls.from_model(load_model(path))


class InterpolatedPartialParser(_PartialParser):
    """Viterbi decoder over an interpolated trigram baseline."""

    def __init__(self, mode: str = "chunking"):
        super().__init__(mode=mode)

    def fit(self, X: Iterable[ChunkTree], y=None) -> "InterpolatedPartialParser":
        sequences = self._training_sequences(X)
        self.inventory_ = StateInventory.from_sequences(sequences)
        self.model_ = InterpolatedTrigramModel.fit(sequences)
        self.scorer_ = InterpolationScorer(self.model_)
        return self

    @property
    def lambdas_(self) -> tuple[float, float, float]:
        self._check_fitted()
        return self.model_.lambdas

    def as_model(self) -> ParserModel:
        self._check_fitted()
        return ParserModel(
            inventory=self.inventory_,
            interpolation=self.model_,
            metadata={"source": "interpolation", "mode": self.mode},
        )

    @classmethod
    def from_model(cls, model: ParserModel) -> "InterpolatedPartialParser":
        if model.interpolation is None:
            raise ValueError("model file carries no interpolation source")
        est = cls(mode=model.metadata.get("mode", "chunking"))
        est.inventory_ = model.inventory
        est.model_ = model.interpolation
        est.scorer_ = InterpolationScorer(model.interpolation)
        return est

    @classmethod
    def load(cls, path: str) -> "InterpolatedPartialParser":
        return cls.from_model(load_model(path))
