"""Scoring entailed associations against ground-truth knowledge cards.

Matching is case-insensitive, whitespace-normalized exact surface match;
the two overlap ratios are exposed under neutral names because published
precision/recall labels for them conflict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .embedding import AssociationResult


def normalize_surface(surface: str) -> str:
    """Fusion glue to spaces, whitespace collapsed, case folded."""
    return " ".join(surface.replace("#", " ").split()).casefold()


@dataclass(frozen=True)
class GroundTruthCard:
    entity_surface: str
    card_entities: frozenset[str]

    @classmethod
    def create(cls, entity_surface: str, card_entities: Sequence[str]) -> "GroundTruthCard":
        normalized = frozenset(normalize_surface(e) for e in card_entities if e.strip())
        return cls(entity_surface=entity_surface, card_entities=normalized)

    def __post_init__(self):
        if not self.card_entities:
            raise ValueError(f"ground-truth card for {self.entity_surface!r} is empty")


@dataclass(frozen=True)
class EvalReport:
    overlap: int
    retrieved_k: int
    card_size: int
    ratio_over_k: float
    ratio_over_card: float
    f1: float


@dataclass(frozen=True)
class MeanReport:
    overlap: float
    retrieved_k: float
    card_size: float
    ratio_over_k: float
    ratio_over_card: float
    f1: float
    count: int

    def rounded(self) -> dict[str, float]:
        """2-decimal values for display; the stored fields keep full precision."""
        return {
            "overlap": round(self.overlap, 2),
            "retrieved_k": round(self.retrieved_k, 2),
            "card_size": round(self.card_size, 2),
            "ratio_over_k": round(self.ratio_over_k, 2),
            "ratio_over_card": round(self.ratio_over_card, 2),
            "f1": round(self.f1, 2),
        }


def _harmonic(a: float, b: float) -> float:
    return 2 * a * b / (a + b) if a + b > 0 else 0.0


def evaluate(
    entailed: Sequence[Union[AssociationResult, str]],
    truth: GroundTruthCard,
    k: Optional[int] = None,
) -> EvalReport:
    """Overlap of the entailed top-k list with the card, as a ratio over k
    and over the card size.  ``k`` defaults to the list length."""
    if k is None:
        k = len(entailed)
    if k < 1:
        raise ValueError("k must be >= 1")
    surfaces = {
        normalize_surface(e.entity if isinstance(e, AssociationResult) else e) for e in entailed
    }
    overlap = len(surfaces & truth.card_entities)
    card_size = len(truth.card_entities)
    ratio_over_k = overlap / k
    ratio_over_card = overlap / card_size
    return EvalReport(
        overlap=overlap,
        retrieved_k=k,
        card_size=card_size,
        ratio_over_k=ratio_over_k,
        ratio_over_card=ratio_over_card,
        f1=_harmonic(ratio_over_k, ratio_over_card),
    )


def aggregate(reports: Sequence[EvalReport]) -> MeanReport:
    """Arithmetic mean of every field."""
    if not reports:
        raise ValueError("need at least one report")
    n = len(reports)
    return MeanReport(
        overlap=sum(r.overlap for r in reports) / n,
        retrieved_k=sum(r.retrieved_k for r in reports) / n,
        card_size=sum(r.card_size for r in reports) / n,
        ratio_over_k=sum(r.ratio_over_k for r in reports) / n,
        ratio_over_card=sum(r.ratio_over_card for r in reports) / n,
        f1=sum(r.f1 for r in reports) / n,
        count=n,
    )
