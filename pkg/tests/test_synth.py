"""Tests for the deterministic synthetic corpus generator."""

from __future__ import annotations

import json

import pytest

from polyhop.errors import UnknownWord
from polyhop.evaluation import load_dataset, save_dataset
from polyhop.facts import render_statement
from polyhop.orchestrator import demo_hop_counts
from polyhop.synth import (
    DEFAULT_DEMOS,
    SCAFFOLD_WORDS,
    SynthCorpus,
    build_entity_pool,
    build_languages,
    build_templates,
    gen_instances,
    gen_world,
    hop_mix_counts,
    invert_translation,
    make_pseudo_language,
    question_for,
    statement_template,
    template_vocabulary,
    translate,
)


def small_world(seed: int = 1, n_chains: int = 12):
    return gen_world(seed=seed, n_entities=60, n_chains=n_chains)


def small_corpus(seed: int = 1, **overrides) -> SynthCorpus:
    world = small_world(seed=seed)
    languages = build_languages(world, ["xx1", "xx2"], seed)
    return gen_instances(world, languages, seed=seed, **overrides)


# ---------------------------------------------------------------- world


def test_hop_mix_counts_even_split():
    assert hop_mix_counts(9, (1 / 3, 1 / 3, 1 / 3)) == {2: 3, 3: 3, 4: 3}


def test_hop_mix_counts_zero_chains():
    assert hop_mix_counts(0, (1 / 3, 1 / 3, 1 / 3)) == {2: 0, 3: 0, 4: 0}


def test_hop_mix_counts_validation():
    with pytest.raises(ValueError):
        hop_mix_counts(10, (0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        hop_mix_counts(10, (-0.2, 0.6, 0.6))


def test_gen_world_deterministic():
    assert gen_world(7, 60, 12) == gen_world(7, 60, 12)
    assert gen_world(7, 60, 12) != gen_world(8, 60, 12)


def test_gen_world_chain_shapes():
    world = small_world()
    assert len(world.chains) == 12
    for chain in world.chains:
        assert len(chain.entities) == chain.hop_class + 1
        assert len(chain.relations) == chain.hop_class
        assert list(chain.relations) == [
            f"r{chain.hop_class}h{k + 1}" for k in range(chain.hop_class)
        ]
    # chains never share entities; leftovers land in extras
    spans = [e for chain in world.chains for e in chain.entities]
    assert len(spans) == len(set(spans))
    assert set(world.extras) == set(world.entities) - set(spans)


def test_gen_world_rejects_entity_shortage():
    with pytest.raises(ValueError):
        gen_world(seed=0, n_entities=10, n_chains=12)


def test_gen_world_empty_is_valid():
    world = gen_world(seed=0, n_entities=0, n_chains=0)
    assert world.chains == ()
    assert world.facts() == []


def test_fact_map_covers_every_hop():
    world = small_world()
    fact_map = world.fact_map()
    for chain in world.chains:
        for k, relation in enumerate(chain.relations):
            assert fact_map[(chain.entities[k], relation)] == chain.entities[k + 1]


def test_templates_and_questions_share_phrases():
    world = small_world()
    for relation_id, info in world.relations.items():
        template = statement_template(world, relation_id)
        assert template == f"the {info.phrase} of {{subject}} is {{object}}"
        question = question_for(world, relation_id, "someone")
        assert question == f"what is the {info.phrase} of someone"


# ---------------------------------------------------------------- ciphers


def test_cipher_is_deterministic_and_tag_keyed():
    vocab = ["the", "of", "is", "color", "what"]
    one = make_pseudo_language(5, "xx1", vocab)
    two = make_pseudo_language(5, "xx1", vocab)
    other = make_pseudo_language(5, "xx2", vocab)
    assert one == two
    assert one.lexicon != other.lexicon


def test_cipher_words_disjoint_from_sources_and_forbidden():
    vocab = ["the", "of", "is", "color", "what"]
    language = make_pseudo_language(3, "xx1", vocab, forbidden=["milo", "arden"])
    cipher_words = set(language.lexicon.values())
    assert len(cipher_words) == len(vocab)  # bijection
    assert cipher_words.isdisjoint(vocab)
    assert cipher_words.isdisjoint({"milo", "arden"})


def test_translate_round_trip():
    world = small_world()
    language = build_languages(world, ["xx1"], 1)["xx1"]
    text = " ".join(template_vocabulary(world))
    assert invert_translation(translate(text, language), language) == text


def test_translate_unknown_word():
    language = make_pseudo_language(0, "xx1", ["the", "of"])
    with pytest.raises(UnknownWord) as err:
        translate("the missing word", language)
    assert err.value.word == "missing"
    assert err.value.tag == "xx1"
    with pytest.raises(UnknownWord):
        invert_translation("neverseen", language)


def test_parallel_statements_cipher_word_by_word():
    # a statement in a pseudo-language is the English statement with every
    # scaffold word ciphered and entity names passed through untouched
    world = small_world()
    languages = build_languages(world, ["xx1"], 1)
    templates = build_templates(world, languages)
    lexicon = languages["xx1"].lexicon
    for fact in world.facts()[:10]:
        en = render_statement(fact, "en", templates)
        xx = render_statement(fact, "xx1", templates)
        expected = " ".join(lexicon.get(token, token) for token in en.split())
        assert xx == expected
        assert fact.subject in xx and fact.object in xx


def test_entity_pool_matches_chain_slots():
    world = small_world()
    pool = build_entity_pool(world)
    for relation_id, info in world.relations.items():
        heads = pool.candidates(relation_id, "subject")
        for chain in world.chains:
            if chain.hop_class == info.hop_class:
                assert chain.entities[info.position] in heads


# ---------------------------------------------------------------- instances


def test_corpus_cases_pass_dataset_schema(tmp_path):
    corpus = small_corpus()
    path = tmp_path / "dataset.json"
    save_dataset(path, corpus.cases)
    instances = load_dataset(path, corpus.templates)
    assert len(instances) == 12
    by_id = {inst.instance_id: inst for inst in instances}
    assert len(by_id) == 12
    for inst in instances:
        assert 2 <= inst.hop_count <= 4
        assert len(inst.questions) == 2


def test_edited_chain_ripples_through_partner_facts():
    # brute-force oracle: apply the requested rewrite to the world's fact
    # map, walk the chain, and compare with the case's gold hops
    corpus = small_corpus()
    fact_map = corpus.world.fact_map()
    for case, chain in zip(corpus.cases, corpus.world.chains):
        rewrite = case["requested_rewrite"][0]
        edited = dict(fact_map)
        edited[(rewrite["subject"], rewrite["relation_id"])] = rewrite["target_new"]
        entity = chain.entities[0]
        walked = []
        for relation in chain.relations:
            entity = edited[(entity, relation)]
            walked.append(entity)
        assert walked == [hop["answer"] for hop in case["new_single_hops"]]
        assert walked[-1] == case["new_answer"]


def test_gold_edit_ids_unique_and_mapped():
    corpus = small_corpus()
    ids = [e.edit_id for e in corpus.gold_edits + corpus.distractor_edits]
    assert len(ids) == len(set(ids))
    assert set(corpus.edit_chain) == set(ids)
    for chain_index, question, edit_id in corpus.retrieval_queries:
        assert corpus.edit_chain[edit_id] == chain_index
        assert question.startswith("what is the ")


def test_distractors_come_in_documented_kinds():
    corpus = small_corpus()
    gold_by_chain = {corpus.edit_chain[e.edit_id]: e for e in corpus.gold_edits}
    assert corpus.distractor_edits
    for distractor in corpus.distractor_edits:
        gold = gold_by_chain[corpus.edit_chain[distractor.edit_id]]
        g, d = gold.triple, distractor.triple
        object_swap = d.relation == g.relation and d.subject == g.subject and d.object != g.object
        subject_swap = d.relation == g.relation and d.subject != g.subject
        relation_swap = d.relation != g.relation
        assert object_swap or subject_swap or relation_swap
        # no distractor duplicates a stored gold fact
        assert (d.subject, d.relation, d.object) != (g.subject, g.relation, g.object)


def test_distractor_language_override():
    corpus = small_corpus(distractor_languages=["en"])
    assert corpus.distractor_edits
    assert all(d.language == "en" for d in corpus.distractor_edits)
    with pytest.raises(ValueError):
        small_corpus(distractor_languages=["zz"])


def test_language_policies():
    fixed = small_corpus(edit_language_policy="fixed:xx2")
    assert all(e.language == "xx2" for e in fixed.gold_edits)
    round_robin = small_corpus(edit_language_policy="round_robin")
    assert {e.language for e in round_robin.gold_edits} == {"xx1", "xx2"}
    with pytest.raises(ValueError):
        small_corpus(edit_language_policy="banana")
    with pytest.raises(ValueError):
        small_corpus(edit_language_policy="fixed:zz")


def test_split_policy_assigns_languages_by_chain_role():
    corpus = small_corpus(
        edit_language_policy="split:xx1:xx2", encoder_train_fraction=0.5
    )
    train = set(corpus.encoder_train_chains)
    heldout = set(corpus.heldout_chains)
    assert train and heldout
    assert train.isdisjoint(heldout)
    assert train | heldout == {c.index for c in corpus.world.chains}
    for edit in corpus.gold_edits:
        chain = corpus.edit_chain[edit.edit_id]
        assert edit.language == ("xx1" if chain in train else "xx2")


def test_split_policy_validation():
    with pytest.raises(ValueError):
        small_corpus(edit_language_policy="split:xx1")
    with pytest.raises(ValueError):
        small_corpus(edit_language_policy="split:xx1:zz")


def test_full_train_fraction_holds_out_nothing():
    corpus = small_corpus(encoder_train_fraction=1.0)
    assert corpus.heldout_chains == ()
    assert len(corpus.encoder_train_chains) == 12
    with pytest.raises(ValueError):
        small_corpus(encoder_train_fraction=0.0)


def test_edits_for_chains_filters():
    corpus = small_corpus(encoder_train_fraction=0.5)
    subset = corpus.edits_for_chains(corpus.heldout_chains)
    wanted = set(corpus.heldout_chains)
    assert subset
    assert all(corpus.edit_chain[e.edit_id] in wanted for e in subset)
    everything = corpus.edits_for_chains(corpus.edit_chain.values())
    assert len(everything) == len(corpus.gold_edits) + len(corpus.distractor_edits)


def test_chain_scope_stores_every_hop():
    corpus = small_corpus(edit_scope="chain")
    for case, chain in zip(corpus.cases, corpus.world.chains):
        assert len(case["requested_rewrite"]) == chain.hop_class
    with pytest.raises(ValueError):
        small_corpus(edit_scope="middle")


def test_paraphrase_bounds():
    corpus = small_corpus(paraphrases=4)
    assert all(len(case["questions"]) == 4 for case in corpus.cases)
    with pytest.raises(ValueError):
        small_corpus(paraphrases=5)
    with pytest.raises(ValueError):
        small_corpus(paraphrases=0)


def test_single_chain_class_rejected():
    world = gen_world(seed=2, n_entities=12, n_chains=3)  # one chain per class
    languages = build_languages(world, ["xx1"], 2)
    with pytest.raises(ValueError):
        gen_instances(world, languages, seed=2)


def test_generation_is_deterministic():
    a = small_corpus(seed=4)
    b = small_corpus(seed=4)
    assert a.cases == b.cases
    assert a.gold_edits == b.gold_edits
    assert a.distractor_edits == b.distractor_edits
    assert a.transcript_entries == b.transcript_entries
    assert a.training.triplets == b.training.triplets
    assert a.training.pairs == b.training.pairs
    c = small_corpus(seed=5)
    assert a.cases != c.cases


def test_transcript_covers_every_question_and_edit():
    corpus = small_corpus()
    suffixes = {s for s, _ in corpus.transcript_entries}
    for case in corpus.cases:
        for question in case["questions"]:
            assert f"Question: {question}\nSubquestion:" in suffixes
    for edit in corpus.gold_edits:
        assert f"Generated answer: {edit.statement}\n" in suffixes


def test_training_data_uses_stored_language_pairs():
    corpus = small_corpus(edit_language_policy="fixed:xx1")
    # bce pairs pair the English question with the stored rendering
    statements = {e.statement for e in corpus.gold_edits}
    assert corpus.training.pairs
    for pair in corpus.training.pairs:
        assert pair.question.startswith("what is the ")
        assert pair.edit_statement in statements


def test_default_demos_cover_hop_mix():
    counts = set(demo_hop_counts(DEFAULT_DEMOS))
    assert {2, 3, 4} <= counts


def test_scaffold_words_stay_english():
    # cipher vocabularies always include the scaffold so questions translate
    world = small_world()
    assert set(SCAFFOLD_WORDS) <= set(template_vocabulary(world))


def test_cases_serialize_deterministically(tmp_path):
    corpus = small_corpus()
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_dataset(a, corpus.cases)
    save_dataset(b, small_corpus().cases)
    assert a.read_bytes() == b.read_bytes()
    # and the payload is plain JSON all the way down
    json.loads(a.read_text(encoding="utf-8"))
