"""Tests for fact triples, statement rendering, and the edit memory."""

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyhop.encoder import HashedNgramEncoder
from polyhop.errors import DuplicateEditId, MissingTemplate
from polyhop.facts import (
    EditMemory,
    FactEdit,
    FactTriple,
    TemplateTable,
    build_memory,
    load_edits_jsonl,
    memory_fingerprint,
    render_edit,
    render_statement,
    save_edits_jsonl,
)

TEMPLATES = TemplateTable(
    {
        "author-of": {
            "en": "{subject} is the author of {object}",
            "de": "{subject} ist der Autor von {object}",
        },
        "pipe": {"en": "{subject}|{object}"},
    }
)


def small_encoder() -> HashedNgramEncoder:
    return HashedNgramEncoder.create(dim=16, vocab_size=1 << 10, seed=0)


def make_edit(n: int, subject: str = "Shakespeare", obj: str = "Lolita") -> FactEdit:
    triple = FactTriple(subject=subject, relation="author-of", object=obj)
    return render_edit(triple, "en", TEMPLATES, f"e{n}")


# ---------------------------------------------------------------- rendering


def test_render_statement_english():
    triple = FactTriple("Shakespeare", "author-of", "Lolita")
    got = render_statement(triple, "en", TEMPLATES)
    assert got == "Shakespeare is the author of Lolita"


def test_render_statement_german():
    triple = FactTriple("Shakespeare", "author-of", "Lolita")
    got = render_statement(triple, "de", TEMPLATES)
    assert got == "Shakespeare ist der Autor von Lolita"


def test_render_statement_identity_template():
    triple = FactTriple("X", "pipe", "X")
    assert render_statement(triple, "en", TEMPLATES) == "X|X"


def test_render_statement_missing_language():
    triple = FactTriple("X", "pipe", "Y")
    with pytest.raises(MissingTemplate):
        render_statement(triple, "de", TEMPLATES)


def test_render_statement_missing_relation():
    triple = FactTriple("X", "born-in", "Y")
    with pytest.raises(MissingTemplate):
        render_statement(triple, "en", TEMPLATES)


def test_render_is_single_pass():
    # entity text spelling out a placeholder must not be re-expanded
    triple = FactTriple("{object}", "pipe", "end")
    assert render_statement(triple, "en", TEMPLATES) == "{object}|end"


def test_triple_rejects_blank_fields():
    with pytest.raises(ValueError):
        FactTriple("", "r", "o")
    with pytest.raises(ValueError):
        FactTriple("s", "  ", "o")
    with pytest.raises(ValueError):
        FactTriple("s", "r", "\t")


def test_template_placeholder_count_enforced():
    with pytest.raises(ValueError):
        TemplateTable({"r": {"en": "{subject} and {subject} like {object}"}})
    with pytest.raises(ValueError):
        TemplateTable({"r": {"en": "no placeholders here"}})


def test_template_table_roundtrip(tmp_path):
    path = tmp_path / "templates.json"
    path.write_text(json.dumps(TEMPLATES.to_dict()), encoding="utf-8")
    loaded = TemplateTable.from_file(path)
    assert loaded.to_dict() == TEMPLATES.to_dict()
    assert ("author-of", "de") in loaded
    assert ("author-of", "fr") not in loaded
    assert len(loaded) == 3


@given(
    subject=st.text(
        alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd")), min_size=1, max_size=12
    ),
    obj=st.text(
        alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd")), min_size=1, max_size=12
    ),
)
@settings(max_examples=120)
def test_render_injective_for_separator_free_entities(subject, obj):
    # with entities that cannot contain the template's separator text the
    # rendering determines (subject, object) uniquely
    triple = FactTriple(subject, "author-of", obj)
    statement = render_statement(triple, "en", TEMPLATES)
    left, _, right = statement.partition(" is the author of ")
    assert left == subject
    assert right == obj


# ---------------------------------------------------------------- memory


def test_build_memory_empty():
    memory = build_memory([], small_encoder())
    assert len(memory) == 0
    assert memory.embeddings.shape == (0, 16)


def test_build_memory_three_edits_unit_rows():
    encoder = small_encoder()
    edits = [make_edit(0), make_edit(1, obj="Hamlet"), make_edit(2, subject="Nabokov")]
    memory = build_memory(edits, encoder)
    assert len(memory) == 3
    norms = np.linalg.norm(memory.embeddings, axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-6)
    assert memory.encoder_fingerprint == encoder.fingerprint


def test_build_memory_deterministic():
    encoder = small_encoder()
    edits = [make_edit(0), make_edit(1, obj="Hamlet"), make_edit(2, subject="Nabokov")]
    first = build_memory(edits, encoder)
    second = build_memory(edits, encoder)
    assert first.embeddings.tobytes() == second.embeddings.tobytes()
    assert memory_fingerprint(first) == memory_fingerprint(second)


def test_build_memory_rejects_duplicate_ids():
    encoder = small_encoder()
    with pytest.raises(DuplicateEditId):
        build_memory([make_edit(0), make_edit(0)], encoder)


def test_memory_rows_match_statements():
    encoder = small_encoder()
    edits = [make_edit(n, obj=f"Book{n}") for n in range(5)]
    memory = build_memory(edits, encoder)
    for row in (0, 2, 4):
        again = encoder.embed(edits[row].statement)
        assert np.array_equal(memory.embeddings[row], again)


def test_memory_is_immutable():
    memory = build_memory([make_edit(0)], small_encoder())
    with pytest.raises((ValueError, RuntimeError)):
        memory.embeddings[0, 0] = 0.5


def test_memory_validates_row_count_and_norms():
    encoder = small_encoder()
    edit = make_edit(0)
    with pytest.raises(ValueError):
        EditMemory(
            edits=(edit,),
            embeddings=np.zeros((2, encoder.dim)),
            encoder_fingerprint=encoder.fingerprint,
        )
    with pytest.raises(ValueError):
        EditMemory(
            edits=(edit,),
            embeddings=np.full((1, encoder.dim), 2.0),
            encoder_fingerprint=encoder.fingerprint,
        )


# ---------------------------------------------------------------- jsonl io


def test_edits_jsonl_roundtrip(tmp_path):
    path = tmp_path / "edits.jsonl"
    edits = [make_edit(0), make_edit(1, obj="Hamlet")]
    save_edits_jsonl(path, edits)
    loaded = load_edits_jsonl(path, TEMPLATES)
    assert loaded == edits


def test_load_edits_jsonl_missing_key(tmp_path):
    path = tmp_path / "edits.jsonl"
    path.write_text(
        json.dumps({"edit_id": "e0", "subject": "s", "relation": "author-of", "language": "en"})
        + "\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError, match="object_new"):
        load_edits_jsonl(path, TEMPLATES)


def test_load_edits_jsonl_duplicate_id(tmp_path):
    path = tmp_path / "edits.jsonl"
    record = {
        "edit_id": "e0",
        "subject": "s",
        "relation": "author-of",
        "object_new": "o",
        "language": "en",
    }
    path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n", encoding="utf-8")
    with pytest.raises(DuplicateEditId):
        load_edits_jsonl(path, TEMPLATES)


def test_load_edits_jsonl_renders_through_templates(tmp_path):
    path = tmp_path / "edits.jsonl"
    record = {
        "edit_id": "e0",
        "subject": "Shakespeare",
        "relation": "author-of",
        "object_new": "Lolita",
        "language": "de",
    }
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    (edit,) = load_edits_jsonl(path, TEMPLATES)
    assert edit.statement == "Shakespeare ist der Autor von Lolita"
