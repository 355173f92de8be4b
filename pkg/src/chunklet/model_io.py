"""Model bundle persistence.

A model file is one JSON document: format name, format version, a
payload holding the candidate inventory, the trained probability
sources and free-form metadata, and a sha256 over the canonical payload
rendering.  Floats serialize via repr, which round-trips exactly, so a
saved model reloads bit-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from .decoder import (
    InterpolationScorer,
    MaxentScorer,
    StateInventory,
    TransitionScorer,
)
from .errors import FormatError
from .maxent import MaxentModel
from .ngram import InterpolatedTrigramModel

FORMAT_NAME = "chunklet-model"
FORMAT_VERSION = 1

SOURCES = ("maxent", "interpolation")


@dataclass
class ParserModel:
    """Everything a decoder needs, as trained by one `train` run."""

    inventory: StateInventory
    maxent: Optional[MaxentModel] = None
    interpolation: Optional[InterpolatedTrigramModel] = None
    metadata: dict = field(default_factory=dict)

    @property
    def feature_count(self) -> int:
        if self.maxent is None:
            return 0
        return len(self.maxent.feature_set.instances)

    @property
    def default_source(self) -> str:
        source = self.metadata.get("source")
        if source in SOURCES:
            return source
        return "maxent" if self.maxent is not None else "interpolation"

    def scorer(self, source: str | None = None) -> TransitionScorer:
        chosen = source or self.default_source
        if chosen == "maxent":
            if self.maxent is None:
                raise ValueError("model file carries no maxent source")
            return MaxentScorer(self.maxent)
        if chosen == "interpolation":
            if self.interpolation is None:
                raise ValueError("model file carries no interpolation source")
            return InterpolationScorer(self.interpolation)
        raise ValueError(f"unknown probability source: {chosen!r}")

    def to_payload(self) -> dict:
        payload: dict = {
            "inventory": self.inventory.to_dict(),
            "metadata": self.metadata,
        }
        if self.maxent is not None:
            payload["maxent"] = self.maxent.to_dict()
        if self.interpolation is not None:
            payload["interpolation"] = self.interpolation.to_dict()
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "ParserModel":
        return cls(
            inventory=StateInventory.from_dict(payload["inventory"]),
            maxent=(
                MaxentModel.from_dict(payload["maxent"])
                if "maxent" in payload
                else None
            ),
            interpolation=(
                InterpolatedTrigramModel.from_dict(payload["interpolation"])
                if "interpolation" in payload
                else None
            ),
            metadata=dict(payload.get("metadata", {})),
        )


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def save_model(model: ParserModel, path: str) -> None:
    payload = model.to_payload()
    canonical = _canonical(payload)
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    document = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "sha256": digest,
        "payload": payload,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_model(path: str) -> ParserModel:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(f"not a model file: {exc}", path) from exc
    if not isinstance(document, dict) or document.get("format") != FORMAT_NAME:
        raise FormatError("not a model file (format marker missing)", path)
    if document.get("version") != FORMAT_VERSION:
        raise FormatError(
            f"unsupported model version {document.get('version')!r}", path
        )
    payload = document.get("payload")
    if not isinstance(payload, dict):
        raise FormatError("model payload missing", path)
    digest = hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()
    if digest != document.get("sha256"):
        raise FormatError("model checksum mismatch", path)
    try:
        return ParserModel.from_payload(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model payload: {exc}", path) from exc
