"""Training example types, JSONL serialization, and hard negatives."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ..errors import EmptyPool, PoolOnlyContainsOriginal
from ..facts import FactTriple

logger = logging.getLogger(__name__)

KIND_SD = "sd"
KIND_CLEC = "clec"
KIND_BCE = "bce"


@dataclass(frozen=True)
class TripletExample:
    """(anchor, positive, negative) texts for one of the hinge objectives."""

    anchor: str
    positive: str
    negative: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in (KIND_SD, KIND_CLEC):
            raise ValueError(f"triplet kind must be 'sd' or 'clec', got {self.kind!r}")


@dataclass(frozen=True)
class BcePair:
    """An English question paired with the statement of the edit answering it."""

    question: str
    edit_statement: str


@dataclass
class TrainingData:
    triplets: list[TripletExample] = field(default_factory=list)
    pairs: list[BcePair] = field(default_factory=list)

    def by_kind(self, kind: str) -> list[TripletExample]:
        return [t for t in self.triplets if t.kind == kind]

    def __len__(self) -> int:
        return len(self.triplets) + len(self.pairs)


def load_training_jsonl(path: str | Path) -> TrainingData:
    """Read mixed triplet/pair records, one JSON object per line."""
    data = TrainingData()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            kind = record.get("kind")
            if kind in (KIND_SD, KIND_CLEC):
                data.triplets.append(
                    TripletExample(
                        anchor=record["anchor"],
                        positive=record["positive"],
                        negative=record["negative"],
                        kind=kind,
                    )
                )
            elif kind == KIND_BCE:
                data.pairs.append(
                    BcePair(question=record["question"], edit_statement=record["edit"])
                )
            else:
                raise ValueError(f"{path}:{lineno}: unknown training kind {kind!r}")
    return data


def save_training_jsonl(path: str | Path, data: TrainingData) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in data.triplets:
            record = {"kind": t.kind, "anchor": t.anchor, "positive": t.positive,
                      "negative": t.negative}
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
        for p in data.pairs:
            record = {"kind": KIND_BCE, "question": p.question, "edit": p.edit_statement}
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


class EntityPool:
    """Per-relation candidate entities for corrupting facts.

    ``heads`` are plausible subjects for a relation, ``tails`` plausible
    objects. Candidate lists keep their given order so sampling stays
    reproducible.
    """

    def __init__(self, by_relation: dict[str, dict[str, list[str]]]) -> None:
        self._by_relation: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {}
        for relation, slots in by_relation.items():
            heads = tuple(slots.get("heads", ()))
            tails = tuple(slots.get("tails", ()))
            self._by_relation[relation] = (heads, tails)

    @classmethod
    def from_file(cls, path: str | Path) -> "EntityPool":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def to_dict(self) -> dict[str, dict[str, list[str]]]:
        return {
            relation: {"heads": list(heads), "tails": list(tails)}
            for relation, (heads, tails) in sorted(self._by_relation.items())
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, ensure_ascii=False, indent=2)
            fh.write("\n")

    def candidates(self, relation: str, slot: str) -> tuple[str, ...]:
        if relation not in self._by_relation:
            raise EmptyPool(relation, slot)
        heads, tails = self._by_relation[relation]
        out = heads if slot == "subject" else tails
        if not out:
            raise EmptyPool(relation, slot)
        return out

    def relations(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_relation))


def _draw_replacement(
    pool: EntityPool, relation: str, slot: str, original: str, rng: np.random.Generator
) -> str:
    candidates = [c for c in pool.candidates(relation, slot) if c != original]
    if not candidates:
        raise PoolOnlyContainsOriginal(relation, slot, original)
    return candidates[int(rng.integers(len(candidates)))]


def generate_hard_negative(
    triple: FactTriple, pool: EntityPool, rng: np.random.Generator
) -> FactTriple:
    """Corrupt a fact by swapping its subject, object, or both.

    Each branch fires with probability exactly 1/3. Replacements are drawn
    uniformly from the relation's pool excluding the original entity, so
    the result always differs from the input in every swapped slot.
    """
    branch = int(rng.integers(3))
    subject, obj = triple.subject, triple.object
    if branch in (0, 2):
        subject = _draw_replacement(pool, triple.relation, "subject", triple.subject, rng)
    if branch in (1, 2):
        obj = _draw_replacement(pool, triple.relation, "object", triple.object, rng)
    return FactTriple(subject=subject, relation=triple.relation, object=obj)
