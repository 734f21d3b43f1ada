"""Tests for the hashed n-gram encoder, cosine, and checkpoints."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyhop.encoder import (
    CHECKPOINT_FORMAT_VERSION,
    BuiltinEncoderParams,
    HashedNgramEncoder,
    char_ngrams,
    cosine,
    embed_with_params,
    featurize,
    load_checkpoint,
    save_checkpoint,
)
from polyhop.errors import DimensionMismatch, EmptyText, EncoderFailure


def make_params(dim: int = 24, vocab: int = 1 << 9, seed: int = 3) -> BuiltinEncoderParams:
    return BuiltinEncoderParams.initialize(dim=dim, vocab_size=vocab, seed=seed)


# ---------------------------------------------------------------- featurization


def test_char_ngrams_boundaries_and_lengths():
    grams = char_ngrams("Ab", (2, 3))
    # lowercased "<ab>" has three 2-grams and two 3-grams
    assert grams == ["<a", "ab", "b>", "<ab", "ab>"]


def test_featurize_weights_sum_to_one():
    params = make_params()
    ids, weights = featurize("the capital of France", params)
    assert ids.dtype == np.int64
    assert np.all(np.diff(ids) > 0)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(ids >= 0) and np.all(ids < params.vocab_size)


def test_featurize_rejects_blank():
    params = make_params()
    with pytest.raises(EmptyText):
        featurize("   ", params)


def test_hash_is_seed_keyed():
    a = featurize("hello world", make_params(seed=1))[0]
    b = featurize("hello world", make_params(seed=2))[0]
    assert not np.array_equal(a, b)


# ---------------------------------------------------------------- embedding


def test_embed_deterministic():
    params = make_params()
    one = embed_with_params("nine bright lanterns", params)
    two = embed_with_params("nine bright lanterns", params)
    assert np.array_equal(one, two)


def test_embed_unit_norm():
    params = make_params()
    for text in ("a", "hello", "the capital of France is Paris", "数学は美しい"):
        vec = embed_with_params(text, params)
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-6)


def test_all_ones_token_table_collapses_texts():
    # with identical rows the bucket average is the same row for any text,
    # so any two texts embed identically (up to last-ulp rounding of the
    # weight sum)
    params = make_params()
    params.token_table = np.ones_like(params.token_table)
    one = embed_with_params("completely different", params)
    two = embed_with_params("texts and scripts 三", params)
    assert np.max(np.abs(one - two)) < 1e-12
    assert cosine(one, two) == pytest.approx(1.0, abs=1e-12)


def test_identical_ngram_multisets_embed_identically():
    # swapping the rare letters keeps every n-gram window intact because each
    # sits more than one window length away from the other and the boundary
    a = "zzzzzazzzzzzzzzzbzzzzz"
    b = "zzzzzbzzzzzzzzzzazzzzz"
    params = make_params()
    from collections import Counter

    assert Counter(char_ngrams(a, params.ngram_range)) == Counter(
        char_ngrams(b, params.ngram_range)
    )
    assert np.array_equal(embed_with_params(a, params), embed_with_params(b, params))


def test_case_insensitive():
    params = make_params()
    assert np.array_equal(
        embed_with_params("Paris France", params), embed_with_params("paris france", params)
    )


def test_encoder_wrapper_dim_and_fingerprint():
    enc = HashedNgramEncoder(make_params())
    assert enc.dim == 24
    assert enc.fingerprint == HashedNgramEncoder(make_params()).fingerprint
    other = HashedNgramEncoder(make_params(seed=9))
    assert enc.fingerprint != other.fingerprint


def test_embed_batch_shape():
    enc = HashedNgramEncoder(make_params())
    batch = enc.embed_batch(["one", "two", "three"])
    assert batch.shape == (3, enc.dim)
    assert np.array_equal(batch[1], enc.embed("two"))
    assert enc.embed_batch([]).shape == (0, enc.dim)


def test_degenerate_projection_raises():
    params = make_params()
    params.projection = np.zeros_like(params.projection)
    with pytest.raises(EncoderFailure):
        embed_with_params("anything", params)


@given(
    text=st.text(min_size=1, max_size=400).filter(lambda s: s.strip()),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
@settings(max_examples=80, deadline=None)
def test_embed_finite_and_unit_on_adversarial_text(text, seed):
    params = make_params(seed=seed % 7)
    vec = embed_with_params(text, params)
    assert np.all(np.isfinite(vec))
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-6)


def test_embed_non_latin_scripts():
    params = make_params()
    for text in ("это тест", "यह एक परीक्षण है", "これはテストです", "😀😀😀"):
        vec = embed_with_params(text, params)
        assert np.all(np.isfinite(vec))


# ---------------------------------------------------------------- cosine


def test_cosine_self_is_one():
    vec = embed_with_params("self similarity", make_params())
    assert cosine(vec, vec) == pytest.approx(1.0, abs=1e-9)


def test_cosine_orthogonal_is_zero():
    u = np.array([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    assert cosine(u, v) == 0.0


def test_cosine_hand_value():
    assert cosine(np.array([0.6, 0.8]), np.array([1.0, 0.0])) == pytest.approx(0.6, abs=1e-12)


def test_cosine_symmetric():
    rng = np.random.default_rng(0)
    u = rng.normal(size=24)
    v = rng.normal(size=24)
    assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine(np.ones(3), np.ones(4))


def test_cosine_zero_vector_rejected():
    with pytest.raises(ValueError):
        cosine(np.zeros(3), np.ones(3))


def test_cosine_clipped_to_range():
    # rounding in dot/norm must never push the result outside [-1, 1]
    rng = np.random.default_rng(5)
    for _ in range(50):
        u = rng.normal(size=16)
        u /= np.linalg.norm(u)
        assert -1.0 <= cosine(u, u) <= 1.0
        assert -1.0 <= cosine(u, -u) <= 1.0


# ---------------------------------------------------------------- checkpoints


def test_checkpoint_roundtrip(tmp_path):
    params = make_params()
    path = tmp_path / "encoder.ckpt"
    save_checkpoint(path, params, meta={"note": "roundtrip"})
    bundle = load_checkpoint(path)
    assert bundle.params.dim == params.dim
    assert bundle.params.vocab_size == params.vocab_size
    assert bundle.params.ngram_range == params.ngram_range
    assert bundle.params.seed == params.seed
    assert np.array_equal(bundle.params.token_table, params.token_table)
    assert np.array_equal(bundle.params.projection, params.projection)
    assert bundle.meta == {"note": "roundtrip"}


def test_checkpoint_bytes_stable(tmp_path):
    params = make_params()
    a = tmp_path / "a.ckpt"
    b = tmp_path / "b.ckpt"
    save_checkpoint(a, params)
    save_checkpoint(b, params)
    assert a.read_bytes() == b.read_bytes()


def test_checkpoint_extra_arrays_roundtrip(tmp_path):
    params = make_params()
    extras = {"adam_step": np.array([7.0]), "adam_m_proj": np.zeros((24, 24))}
    path = tmp_path / "encoder.ckpt"
    save_checkpoint(path, params, extra_arrays=extras)
    bundle = load_checkpoint(path)
    assert set(bundle.extra_arrays) == set(extras)
    assert np.array_equal(bundle.extra_arrays["adam_step"], extras["adam_step"])


def test_checkpoint_rejects_unknown_version(tmp_path):
    params = make_params(dim=4, vocab=8)
    path = tmp_path / "encoder.ckpt"
    save_checkpoint(path, params)
    data = path.read_bytes()
    mutated = data.replace(
        f'"format_version": {CHECKPOINT_FORMAT_VERSION}'.encode(),
        b'"format_version": 999',
    )
    # header keys are sorted, so the replaced substring must exist
    assert mutated != data
    path.write_bytes(mutated)
    with pytest.raises(ValueError, match="format_version"):
        load_checkpoint(path)


def test_checkpoint_detects_truncation(tmp_path):
    params = make_params(dim=4, vocab=8)
    path = tmp_path / "encoder.ckpt"
    save_checkpoint(path, params)
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(ValueError, match="truncated"):
        load_checkpoint(path)


def test_params_shape_validation():
    with pytest.raises(DimensionMismatch):
        BuiltinEncoderParams(
            dim=4,
            vocab_size=8,
            ngram_range=(3, 5),
            seed=0,
            token_table=np.zeros((8, 5)),
            projection=np.eye(4),
        )
    with pytest.raises(ValueError):
        BuiltinEncoderParams(
            dim=4,
            vocab_size=8,
            ngram_range=(5, 3),
            seed=0,
            token_table=np.zeros((8, 4)),
            projection=np.eye(4),
        )
