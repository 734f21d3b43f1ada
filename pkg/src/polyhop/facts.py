"""Fact triples, rendered edit statements, and the embedded edit memory.

An edit is a (subject, relation, object) triple whose object carries the
new value, rendered into a natural-language statement through a
per-language template table. A batch of edits embeds into an immutable
:class:`EditMemory` that retrieval searches exhaustively.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import DuplicateEditId, MissingTemplate
from .hashutil import hexdigest

logger = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\{subject\}|\{object\}")
_ROW_NORM_TOL = 1e-6


class Encoder(Protocol):
    """Anything that maps text to a unit vector and identifies itself."""

    @property
    def dim(self) -> int: ...

    @property
    def fingerprint(self) -> str: ...

    def embed(self, text: str) -> np.ndarray: ...


@dataclass(frozen=True)
class FactTriple:
    """A (subject, relation, object) unit of world knowledge."""

    subject: str
    relation: str
    object: str

    def __post_init__(self) -> None:
        for name in ("subject", "relation", "object"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"FactTriple.{name} must be a non-empty string")


@dataclass(frozen=True)
class FactEdit:
    """A fact edit: the triple holds the new object, ``statement`` its rendering.

    Build edits through :func:`render_edit` (or the JSONL loader) so the
    statement always agrees with the active template table.
    """

    triple: FactTriple
    language: str
    statement: str
    edit_id: str

    def __post_init__(self) -> None:
        if not self.language.strip():
            raise ValueError("FactEdit.language must be non-empty")
        if not self.edit_id.strip():
            raise ValueError("FactEdit.edit_id must be non-empty")


class TemplateTable:
    """Statement templates keyed by (relation, language).

    Every template contains exactly one ``{subject}`` and one ``{object}``
    placeholder. Lookups never fall back to another language; a missing
    pair raises :class:`MissingTemplate`.
    """

    def __init__(self, entries: dict[str, dict[str, str]]) -> None:
        table: dict[tuple[str, str], str] = {}
        for relation, per_language in entries.items():
            for language, template in per_language.items():
                _check_template(template, relation, language)
                table[(relation, language)] = template
        self._table = table

    @classmethod
    def from_file(cls, path: str | Path) -> "TemplateTable":
        with open(path, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
        if not isinstance(entries, dict):
            raise ValueError(f"template file {path} must hold a JSON object")
        return cls(entries)

    def to_dict(self) -> dict[str, dict[str, str]]:
        out: dict[str, dict[str, str]] = {}
        for (relation, language), template in sorted(self._table.items()):
            out.setdefault(relation, {})[language] = template
        return out

    def lookup(self, relation: str, language: str) -> str:
        try:
            return self._table[(relation, language)]
        except KeyError:
            raise MissingTemplate(relation, language) from None

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._table

    def __len__(self) -> int:
        return len(self._table)


def _check_template(template: str, relation: str, language: str) -> None:
    if template.count("{subject}") != 1 or template.count("{object}") != 1:
        raise ValueError(
            f"template for ({relation!r}, {language!r}) must contain exactly one "
            "{subject} and one {object} placeholder"
        )


def render_statement(triple: FactTriple, language: str, templates: TemplateTable) -> str:
    """Render ``triple`` through its (relation, language) template.

    Substitution happens in a single pass, so entity text that happens to
    contain a placeholder spelling is never re-expanded.
    """
    template = templates.lookup(triple.relation, language)
    fills = {"{subject}": triple.subject, "{object}": triple.object}
    return _PLACEHOLDER.sub(lambda m: fills[m.group(0)], template)


def render_edit(
    triple: FactTriple, language: str, templates: TemplateTable, edit_id: str
) -> FactEdit:
    """Build a :class:`FactEdit` whose statement matches the template table."""
    statement = render_statement(triple, language, templates)
    return FactEdit(triple=triple, language=language, statement=statement, edit_id=edit_id)


@dataclass(frozen=True)
class EditMemory:
    """Immutable store of edits plus their unit-norm embedding matrix.

    Row ``i`` of ``embeddings`` is the embedding of ``edits[i].statement``
    under the encoder identified by ``encoder_fingerprint``.
    """

    edits: tuple[FactEdit, ...]
    embeddings: np.ndarray
    encoder_fingerprint: str

    def __post_init__(self) -> None:
        if self.embeddings.ndim != 2 or self.embeddings.shape[0] != len(self.edits):
            raise ValueError("embedding matrix must have one row per edit")
        if len(self.edits):
            norms = np.linalg.norm(self.embeddings, axis=1)
            if not np.all(np.abs(norms - 1.0) <= _ROW_NORM_TOL):
                raise ValueError("memory rows must be unit-norm")
        self.embeddings.setflags(write=False)

    def __len__(self) -> int:
        return len(self.edits)


def build_memory(edits: Sequence[FactEdit], encoder: Encoder) -> EditMemory:
    """Embed every edit statement into an :class:`EditMemory`.

    Edit ids must be unique; edit order is preserved. An empty edit list
    yields a valid empty memory.
    """
    seen: set[str] = set()
    for edit in edits:
        if edit.edit_id in seen:
            raise DuplicateEditId(edit.edit_id)
        seen.add(edit.edit_id)
    if not edits:
        matrix = np.zeros((0, encoder.dim), dtype=np.float64)
    else:
        matrix = np.stack([encoder.embed(edit.statement) for edit in edits])
    logger.debug("built edit memory with %d rows (dim %d)", len(edits), encoder.dim)
    return EditMemory(
        edits=tuple(edits), embeddings=matrix, encoder_fingerprint=encoder.fingerprint
    )


def load_edits_jsonl(path: str | Path, templates: TemplateTable) -> list[FactEdit]:
    """Load edits from JSONL records and render their statements.

    Each line holds ``{"edit_id", "subject", "relation", "object_new",
    "language"}``. Rendering fails loudly if a template is missing.
    """
    edits: list[FactEdit] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            missing = {"edit_id", "subject", "relation", "object_new", "language"} - set(record)
            if missing:
                raise ValueError(f"{path}:{lineno}: missing keys {sorted(missing)}")
            if record["edit_id"] in seen:
                raise DuplicateEditId(record["edit_id"])
            seen.add(record["edit_id"])
            triple = FactTriple(
                subject=record["subject"],
                relation=record["relation"],
                object=record["object_new"],
            )
            edits.append(render_edit(triple, record["language"], templates, record["edit_id"]))
    return edits


def save_edits_jsonl(path: str | Path, edits: Iterable[FactEdit]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for edit in edits:
            record = {
                "edit_id": edit.edit_id,
                "subject": edit.triple.subject,
                "relation": edit.triple.relation,
                "object_new": edit.triple.object,
                "language": edit.language,
            }
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def memory_fingerprint(memory: EditMemory) -> str:
    """Content hash of a memory, useful for cache keys in callers."""
    ids = "\x1f".join(edit.edit_id for edit in memory.edits).encode("utf-8")
    return hexdigest(ids, memory.encoder_fingerprint.encode("utf-8"), memory.embeddings.tobytes())
