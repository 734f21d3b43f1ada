"""Deterministic synthetic worlds for desk-scale experiments.

A world is a set of entity-disjoint fact chains (2 to 4 hops). Pseudo-
languages are seeded word-substitution ciphers over the template
vocabulary; entity names keep their surface form across languages, the
scaffolding words do not. Each chain yields one instance: its first
fact's object is perturbed to another chain's object, the gold chain
ripples through that chain's remaining facts, and word-overlap
distractor edits are generated alongside. A scripted mock-LLM
transcript decomposes every question correctly and answers each hop
from whatever fact line the orchestrator injects, so end-to-end
accuracy isolates retrieval quality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UnknownWord
from .facts import FactEdit, FactTriple, TemplateTable, render_edit, render_statement
from .hashutil import blake_u64
from .orchestrator import ENTITY_LINE_PREFIX, GENERATED_ANSWER_STUB, RETRIEVED_FACT_PREFIX
from .orchestrator import DEFAULT_CONTRADICTION_MARKER, QUESTION_PREFIX, SUBQUESTION_STUB
from .training.data import BcePair, EntityPool, TrainingData, TripletExample, generate_hard_negative

logger = logging.getLogger(__name__)

SCAFFOLD_WORDS = ("the", "of", "is", "what", "find", "name", "state")
_QUESTION_PREFIXES = ("what is", "find", "name", "state")

_VOWELS = "aeiou"
_CONSONANTS = "bdfgklmnprstvz"

HOP_CLASSES = (2, 3, 4)


# ---------------------------------------------------------------- words


def _pseudo_word(rng: np.random.Generator, syllables: int) -> str:
    parts = []
    for _ in range(syllables):
        parts.append(_CONSONANTS[int(rng.integers(len(_CONSONANTS)))])
        parts.append(_VOWELS[int(rng.integers(len(_VOWELS)))])
    if rng.integers(2):
        parts.append(_CONSONANTS[int(rng.integers(len(_CONSONANTS)))])
    return "".join(parts)


def _fresh_word(rng: np.random.Generator, used: set[str], syllables: int) -> str:
    for _ in range(10_000):
        word = _pseudo_word(rng, syllables)
        if word not in used:
            used.add(word)
            return word
    raise RuntimeError("could not generate a fresh pseudo-word")


# ------------------------------------------------------ pseudo-languages


@dataclass(frozen=True)
class PseudoLanguage:
    """A bijective word-substitution cipher over a fixed English vocabulary."""

    tag: str
    lexicon: dict[str, str]

    def inverse(self) -> dict[str, str]:
        return {cipher: word for word, cipher in self.lexicon.items()}


def make_pseudo_language(
    seed: int, tag: str, vocabulary: Iterable[str], forbidden: Iterable[str] = ()
) -> PseudoLanguage:
    """Derive a cipher deterministically from (seed, tag).

    Cipher words never collide with any source word, with each other, or
    with the ``forbidden`` set (entity names, so statements stay
    unambiguous).
    """
    rng = np.random.default_rng([seed & 0xFFFFFFFF, blake_u64(tag)])
    vocab = sorted(set(vocabulary))
    used = set(vocab) | set(forbidden)
    lexicon = {word: _fresh_word(rng, used, syllables=2) for word in vocab}
    return PseudoLanguage(tag=tag, lexicon=lexicon)


def translate(text: str, language: PseudoLanguage) -> str:
    """Word-by-word lexicon substitution; unknown words fail loudly."""
    out = []
    for word in text.split():
        if word not in language.lexicon:
            raise UnknownWord(word, language.tag)
        out.append(language.lexicon[word])
    return " ".join(out)


def invert_translation(text: str, language: PseudoLanguage) -> str:
    inverse = language.inverse()
    out = []
    for word in text.split():
        if word not in inverse:
            raise UnknownWord(word, language.tag)
        out.append(inverse[word])
    return " ".join(out)


def _cipher_template(template: str, language: PseudoLanguage) -> str:
    """Translate template words, passing {subject}/{object} slots through."""
    out = []
    for token in template.split():
        if token in ("{subject}", "{object}"):
            out.append(token)
        else:
            out.append(translate(token, language))
    return " ".join(out)


# ----------------------------------------------------------------- world


@dataclass(frozen=True)
class RelationInfo:
    relation_id: str
    phrase: str
    hop_class: int
    position: int  # 0-based position within the class's relation sequence


@dataclass(frozen=True)
class Chain:
    index: int
    hop_class: int
    entities: tuple[str, ...]
    relations: tuple[str, ...]


@dataclass
class SynthWorld:
    seed: int
    entities: tuple[str, ...]
    extras: tuple[str, ...]
    relations: dict[str, RelationInfo]
    chains: tuple[Chain, ...]

    def facts(self) -> list[FactTriple]:
        out = []
        for chain in self.chains:
            for k, relation in enumerate(chain.relations):
                out.append(
                    FactTriple(
                        subject=chain.entities[k],
                        relation=relation,
                        object=chain.entities[k + 1],
                    )
                )
        return out

    def fact_map(self) -> dict[tuple[str, str], str]:
        return {(f.subject, f.relation): f.object for f in self.facts()}


def hop_mix_counts(n_chains: int, hop_mix: tuple[float, float, float]) -> dict[int, int]:
    """Exact chain counts per hop class: 3/4-hop round to nearest, 2-hop takes the remainder."""
    if len(hop_mix) != 3 or any(p < 0 for p in hop_mix):
        raise ValueError("hop_mix must be three non-negative proportions")
    if abs(sum(hop_mix) - 1.0) > 1e-9:
        raise ValueError("hop_mix proportions must sum to 1")
    c3 = round(hop_mix[1] * n_chains)
    c4 = round(hop_mix[2] * n_chains)
    c2 = n_chains - c3 - c4
    if c2 < 0:
        raise ValueError(f"hop_mix {hop_mix} rounds to more than {n_chains} chains")
    return {2: c2, 3: c3, 4: c4}


def gen_world(
    seed: int,
    n_entities: int,
    n_chains: int,
    hop_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3),
    phrase_words: tuple[int, int] = (1, 2),
) -> SynthWorld:
    """Generate entity-disjoint chains; leftover entities become pool spares.

    Chains of the same hop count share one relation sequence, so an
    edited first hop can ripple through another chain of the same class.
    Longer relation phrases (``phrase_words``) dilute the entity share of
    each statement, which makes entity-swapped distractors harder.
    """
    counts = hop_mix_counts(n_chains, hop_mix)
    required = sum((h + 1) * c for h, c in counts.items())
    if n_entities < required:
        raise ValueError(f"need at least {required} entities for {n_chains} chains")
    lo_words, hi_words = phrase_words
    if lo_words < 1 or hi_words < lo_words:
        raise ValueError("phrase_words must satisfy 1 <= lo <= hi")
    rng = np.random.default_rng([seed & 0xFFFFFFFF, 11])
    used: set[str] = set(SCAFFOLD_WORDS)

    relations: dict[str, RelationInfo] = {}
    for hop_class in HOP_CLASSES:
        if counts[hop_class] == 0:
            continue
        for position in range(hop_class):
            n_words = lo_words + int(rng.integers(hi_words - lo_words + 1))
            phrase = " ".join(_fresh_word(rng, used, syllables=2) for _ in range(n_words))
            relation_id = f"r{hop_class}h{position + 1}"
            relations[relation_id] = RelationInfo(
                relation_id=relation_id,
                phrase=phrase,
                hop_class=hop_class,
                position=position,
            )

    entities = tuple(_fresh_word(rng, used, syllables=3) for _ in range(n_entities))
    chains: list[Chain] = []
    cursor = 0
    for hop_class in HOP_CLASSES:
        for _ in range(counts[hop_class]):
            span = entities[cursor : cursor + hop_class + 1]
            cursor += hop_class + 1
            chains.append(
                Chain(
                    index=len(chains),
                    hop_class=hop_class,
                    entities=span,
                    relations=tuple(f"r{hop_class}h{k + 1}" for k in range(hop_class)),
                )
            )
    return SynthWorld(
        seed=seed,
        entities=entities,
        extras=entities[cursor:],
        relations=relations,
        chains=tuple(chains),
    )


def statement_template(world: SynthWorld, relation_id: str) -> str:
    phrase = world.relations[relation_id].phrase
    return f"the {phrase} of {{subject}} is {{object}}"


def question_for(world: SynthWorld, relation_id: str, subject: str) -> str:
    phrase = world.relations[relation_id].phrase
    return f"what is the {phrase} of {subject}"


def template_vocabulary(world: SynthWorld) -> list[str]:
    words = set(SCAFFOLD_WORDS)
    for info in world.relations.values():
        words.update(info.phrase.split())
    return sorted(words)


def build_languages(world: SynthWorld, tags: Sequence[str], seed: int) -> dict[str, PseudoLanguage]:
    vocab = template_vocabulary(world)
    return {
        tag: make_pseudo_language(seed, tag, vocab, forbidden=world.entities) for tag in tags
    }


def build_templates(world: SynthWorld, languages: dict[str, PseudoLanguage]) -> TemplateTable:
    entries: dict[str, dict[str, str]] = {}
    for relation_id in world.relations:
        base = statement_template(world, relation_id)
        entries[relation_id] = {"en": base}
        for tag, language in languages.items():
            entries[relation_id][tag] = _cipher_template(base, language)
    return TemplateTable(entries)


def build_entity_pool(world: SynthWorld) -> EntityPool:
    by_relation: dict[str, dict[str, list[str]]] = {}
    for relation_id, info in world.relations.items():
        heads = [
            chain.entities[info.position]
            for chain in world.chains
            if chain.hop_class == info.hop_class
        ]
        tails = [
            chain.entities[info.position + 1]
            for chain in world.chains
            if chain.hop_class == info.hop_class
        ]
        by_relation[relation_id] = {
            "heads": heads + list(world.extras),
            "tails": tails + list(world.extras),
        }
    return EntityPool(by_relation)


# ------------------------------------------------------------- instances


DEFAULT_DEMOS = (
    "Question: what is the anthem of the homeland of tovar\n"
    "Subquestion: what is the homeland of tovar\n"
    "Generated answer: the homeland of tovar is selvane\n"
    "According to Generated answer, the entity of Subquestion in English is: selvane\n"
    "Subquestion: what is the anthem of selvane\n"
    "Generated answer: the anthem of selvane is dawnsong\n"
    "According to Generated answer, the entity of Subquestion in English is: dawnsong\n"
    "Final answer: dawnsong",
    "Question: what is the emblem of the capital of the homeland of miro\n"
    "Subquestion: what is the homeland of miro\n"
    "Generated answer: the homeland of miro is ostrev\n"
    "According to Generated answer, the entity of Subquestion in English is: ostrev\n"
    "Subquestion: what is the capital of ostrev\n"
    "Generated answer: the capital of ostrev is brivane\n"
    "According to Generated answer, the entity of Subquestion in English is: brivane\n"
    "Subquestion: what is the emblem of brivane\n"
    "Generated answer: the emblem of brivane is the silver elk\n"
    "According to Generated answer, the entity of Subquestion in English is: the silver elk\n"
    "Final answer: the silver elk",
    "Question: what is the color of the emblem of the capital of the homeland of vessa\n"
    "Subquestion: what is the homeland of vessa\n"
    "Generated answer: the homeland of vessa is kelrim\n"
    "According to Generated answer, the entity of Subquestion in English is: kelrim\n"
    "Subquestion: what is the capital of kelrim\n"
    "Generated answer: the capital of kelrim is tarnview\n"
    "According to Generated answer, the entity of Subquestion in English is: tarnview\n"
    "Subquestion: what is the emblem of tarnview\n"
    "Generated answer: the emblem of tarnview is the river crane\n"
    "According to Generated answer, the entity of Subquestion in English is: the river crane\n"
    "Subquestion: what is the color of the river crane\n"
    "Generated answer: the color of the river crane is white\n"
    "According to Generated answer, the entity of Subquestion in English is: white\n"
    "Final answer: white",
    "Question: what is the motto of the guild of parn\n"
    "Subquestion: what is the guild of parn\n"
    "Generated answer: the guild of parn is the lantern order\n"
    "According to Generated answer, the entity of Subquestion in English is: the lantern order\n"
    "Subquestion: what is the motto of the lantern order\n"
    "Generated answer: the motto of the lantern order is carry light\n"
    "According to Generated answer, the entity of Subquestion in English is: carry light\n"
    "Final answer: carry light",
)


@dataclass
class SynthCorpus:
    """Everything one generation run produces, ready to serialize."""

    world: SynthWorld
    languages: dict[str, PseudoLanguage]
    templates: TemplateTable
    cases: list[dict]
    gold_edits: list[FactEdit]
    distractor_edits: list[FactEdit]
    entity_pool: EntityPool
    training: TrainingData
    transcript_entries: list[tuple[str, str]]
    demos: tuple[str, ...] = DEFAULT_DEMOS
    # (chain index, hop-1 question, gold edit id) per chain
    retrieval_queries: list[tuple[int, str, str]] = field(default_factory=list)
    edit_chain: dict[str, int] = field(default_factory=dict)
    encoder_train_chains: tuple[int, ...] = ()
    heldout_chains: tuple[int, ...] = ()

    def edits_for_chains(self, chains: Iterable[int]) -> list[FactEdit]:
        """Gold and distractor edits belonging to the given chains, in order."""
        wanted = set(chains)
        return [
            e
            for e in list(self.gold_edits) + list(self.distractor_edits)
            if self.edit_chain[e.edit_id] in wanted
        ]


class _LanguagePolicy:
    """Assigns a language tag to each emitted edit."""

    def __init__(self, policy: str, tags: Sequence[str], rng: np.random.Generator) -> None:
        if not tags:
            raise ValueError("at least one language tag required")
        self._tags = list(tags)
        self._rng = rng
        self._counter = 0
        if policy.startswith("fixed:"):
            fixed = policy.split(":", 1)[1]
            if fixed not in self._tags:
                raise ValueError(f"fixed language {fixed!r} not among tags {self._tags}")
            self._fixed: str | None = fixed
            self._random = False
        elif policy == "round_robin":
            self._fixed = None
            self._random = False
        elif policy == "random":
            self._fixed = None
            self._random = True
        else:
            raise ValueError(f"unknown edit_language_policy {policy!r}")

    def next(self) -> str:
        if self._fixed is not None:
            return self._fixed
        if self._random:
            return self._tags[int(self._rng.integers(len(self._tags)))]
        tag = self._tags[self._counter % len(self._tags)]
        self._counter += 1
        return tag


def _nested_question(world: SynthWorld, chain: Chain, prefix: str) -> str:
    middle = ""
    for relation_id in reversed(chain.relations):
        middle += f"the {world.relations[relation_id].phrase} of "
    return f"{prefix} {middle}{chain.entities[0]}"


def gen_instances(
    world: SynthWorld,
    languages: dict[str, PseudoLanguage],
    seed: int = 0,
    edit_language_policy: str = "round_robin",
    edit_scope: str = "first",
    paraphrases: int = 2,
    object_swap_distractors: int = 2,
    subject_swap_distractors: int = 1,
    relation_swap_distractors: int = 1,
    encoder_train_fraction: float = 1.0,
    distractor_languages: Sequence[str] | None = None,
) -> SynthCorpus:
    """Create instances, edits, distractors, training data, and the mock script.

    Each chain's first-hop object is rewritten to the first-hop object of
    a partner chain in the same class; the gold chain then follows the
    partner's remaining facts. ``edit_scope`` controls whether only that
    first fact is stored as an edit or the whole edited chain is.

    ``encoder_train_fraction`` < 1 reserves a seeded share of chains for
    encoder training; the rest are held out so retrieval can be measured
    on chains whose edits were never seen during training.

    ``distractor_languages`` overrides the rendering languages of
    distractor edits (round-robin). Including "en" plants distractors
    that share surface words with English questions, the superficial
    word-matching trap a bag-of-words retriever falls into.

    ``edit_language_policy`` may also be ``"split:<train>:<heldout>"``:
    gold edits of encoder-training chains are stored in the first
    language, those of held-out chains in the second. A retriever then
    only resolves held-out queries if its cross-lingual alignment
    transfers to a storage language never seen in its question-edit
    pairs.
    """
    if edit_scope not in ("first", "chain"):
        raise ValueError(f"edit_scope must be 'first' or 'chain', got {edit_scope!r}")
    if not 1 <= paraphrases <= len(_QUESTION_PREFIXES):
        raise ValueError(f"paraphrases must be in 1..{len(_QUESTION_PREFIXES)}")
    if not 0.0 < encoder_train_fraction <= 1.0:
        raise ValueError("encoder_train_fraction must be in (0, 1]")
    for hop_class in HOP_CLASSES:
        group = [c for c in world.chains if c.hop_class == hop_class]
        if len(group) == 1:
            raise ValueError(f"{hop_class}-hop class needs at least two chains to draw edits")

    rng = np.random.default_rng([world.seed & 0xFFFFFFFF, seed & 0xFFFFFFFF, 23])
    templates = build_templates(world, languages)
    known = set(languages) | {"en"}
    split_languages: tuple[str, str] | None = None
    policy: _LanguagePolicy | None = None
    if edit_language_policy.startswith("split:"):
        parts = edit_language_policy.split(":")
        if len(parts) != 3 or not all(parts[1:]):
            raise ValueError("split policy must look like 'split:<train>:<heldout>'")
        bad = sorted({parts[1], parts[2]} - known)
        if bad:
            raise ValueError(f"unknown split languages {bad}")
        split_languages = (parts[1], parts[2])
    else:
        policy = _LanguagePolicy(edit_language_policy, list(languages), rng)
    if distractor_languages is None:
        if split_languages is not None:
            distractor_policy = _LanguagePolicy("round_robin", list(split_languages), rng)
        else:
            assert policy is not None
            distractor_policy = policy
    else:
        bad = sorted(set(distractor_languages) - known)
        if bad:
            raise ValueError(f"unknown distractor languages {bad}")
        distractor_policy = _LanguagePolicy("round_robin", list(distractor_languages), rng)
    pool = build_entity_pool(world)
    by_class: dict[int, list[Chain]] = {}
    for chain in world.chains:
        by_class.setdefault(chain.hop_class, []).append(chain)

    # seeded chain split for encoder training vs held-out retrieval; drawn
    # from its own stream so reordering other draws never moves the split
    split_rng = np.random.default_rng([world.seed & 0xFFFFFFFF, seed & 0xFFFFFFFF, 29])
    order = [int(i) for i in split_rng.permutation(len(world.chains))]
    n_train = max(1, round(encoder_train_fraction * len(world.chains)))
    train_chains = tuple(sorted(order[:n_train]))
    heldout_chains = tuple(sorted(order[n_train:]))
    train_set = set(train_chains)

    cases: list[dict] = []
    gold_edits: list[FactEdit] = []
    distractor_edits: list[FactEdit] = []
    retrieval_queries: list[tuple[int, str, str]] = []
    edit_chain: dict[str, int] = {}
    # (triple, hop-1 question, stored language) per chain
    edited_triples: list[tuple[FactTriple, str, str]] = []
    transcript: dict[str, str] = {}

    def script(suffix: str, response: str) -> None:
        existing = transcript.get(suffix)
        if existing is not None and existing != response:
            raise ValueError(f"mock transcript collision on suffix {suffix!r}")
        transcript[suffix] = response

    # --- chain walking entries shared by every instance -------------------
    for chain in world.chains:
        for position in range(1, chain.hop_class + 1):
            entity = chain.entities[position]
            suffix = f"{ENTITY_LINE_PREFIX} {entity}\n{SUBQUESTION_STUB}"
            if position < chain.hop_class:
                next_q = question_for(world, chain.relations[position], entity)
                script(suffix, f"{SUBQUESTION_STUB} {next_q}")
            else:
                script(suffix, f"Final answer: {entity}")
    for extra in world.extras:
        script(f"{ENTITY_LINE_PREFIX} {extra}\n{SUBQUESTION_STUB}", f"Final answer: {extra}")

    def script_statement(statement: str, obj: str) -> None:
        script(
            f"{GENERATED_ANSWER_STUB} {statement}\n",
            f"{ENTITY_LINE_PREFIX} {obj}",
        )
        script(f"{RETRIEVED_FACT_PREFIX} {statement}\n", f"{DEFAULT_CONTRADICTION_MARKER}.")

    # the model's internal knowledge is the unedited world
    for fact in world.facts():
        subq = question_for(world, fact.relation, fact.subject)
        statement = render_statement(fact, "en", templates)
        script(f"{SUBQUESTION_STUB} {subq}\n{GENERATED_ANSWER_STUB}", f" {statement}")
        script_statement(statement, fact.object)

    # --- per-chain instances ----------------------------------------------
    used_triples: set[tuple[str, str, str]] = set()

    def emit_edit(
        triple: FactTriple,
        edit_id: str,
        bucket: list[FactEdit],
        chain_index: int,
        lang_policy: _LanguagePolicy | None = None,
    ) -> FactEdit:
        chooser = lang_policy or policy
        if chooser is not None:
            language = chooser.next()
        else:
            assert split_languages is not None
            language = split_languages[0] if chain_index in train_set else split_languages[1]
        edit = render_edit(triple, language, templates, edit_id)
        bucket.append(edit)
        edit_chain[edit_id] = chain_index
        script_statement(edit.statement, triple.object)
        used_triples.add((triple.subject, triple.relation, triple.object))
        return edit

    for chain in world.chains:
        group = by_class[chain.hop_class]
        partner = group[(group.index(chain) + 1 + int(rng.integers(len(group) - 1))) % len(group)]
        edit_triple = FactTriple(
            subject=chain.entities[0],
            relation=chain.relations[0],
            object=partner.entities[1],
        )
        hop1_question = question_for(world, chain.relations[0], chain.entities[0])
        edit = emit_edit(edit_triple, f"edit-{chain.index:04d}", gold_edits, chain.index)
        rewrites = [edit]
        if edit_scope == "chain":
            for k in range(1, chain.hop_class):
                hop_triple = FactTriple(
                    subject=partner.entities[k],
                    relation=chain.relations[k],
                    object=partner.entities[k + 1],
                )
                rewrites.append(
                    emit_edit(
                        hop_triple, f"edit-{chain.index:04d}-h{k + 1}", gold_edits, chain.index
                    )
                )
        retrieval_queries.append((chain.index, hop1_question, edit.edit_id))
        edited_triples.append((edit_triple, hop1_question, edit.language))

        gold_hops = [{"question": hop1_question, "answer": partner.entities[1]}]
        for k in range(1, chain.hop_class):
            gold_hops.append(
                {
                    "question": question_for(world, chain.relations[k], partner.entities[k]),
                    "answer": partner.entities[k + 1],
                }
            )
        questions = [
            _nested_question(world, chain, prefix) for prefix in _QUESTION_PREFIXES[:paraphrases]
        ]
        for question in questions:
            script(
                f"{QUESTION_PREFIX}{question}\n{SUBQUESTION_STUB}",
                f"{SUBQUESTION_STUB} {hop1_question}",
            )
        cases.append(
            {
                "case_id": f"case-{chain.index:04d}",
                "questions": questions,
                "requested_rewrite": [
                    {
                        "subject": e.triple.subject,
                        "relation_id": e.triple.relation,
                        "target_new": e.triple.object,
                        "language": e.language,
                        "edit_id": e.edit_id,
                    }
                    for e in rewrites
                ],
                "new_answer": partner.entities[chain.hop_class],
                "new_answer_alias": [],
                "new_single_hops": gold_hops,
            }
        )

        # --- word-overlap distractors around this chain's edit ------------
        def fresh_triple(make) -> FactTriple | None:
            for _ in range(50):
                candidate: FactTriple = make()
                if (candidate.subject, candidate.relation, candidate.object) not in used_triples:
                    return candidate
            return None

        counter = 0

        def add_distractor(candidate: FactTriple | None) -> None:
            nonlocal counter
            if candidate is None:
                return
            emit_edit(
                candidate,
                f"dist-{chain.index:04d}-{counter}",
                distractor_edits,
                chain.index,
                lang_policy=distractor_policy,
            )
            counter += 1

        tails = pool.candidates(edit_triple.relation, "object")
        for _ in range(object_swap_distractors):
            add_distractor(
                fresh_triple(
                    lambda: FactTriple(
                        subject=edit_triple.subject,
                        relation=edit_triple.relation,
                        object=_pick(rng, tails, exclude=edit_triple.object),
                    )
                )
            )
        subject_candidates = world.extras or pool.candidates(edit_triple.relation, "subject")
        for _ in range(subject_swap_distractors):
            add_distractor(
                fresh_triple(
                    lambda: FactTriple(
                        subject=_pick(rng, subject_candidates, exclude=edit_triple.subject),
                        relation=edit_triple.relation,
                        object=_pick(rng, tails, exclude=edit_triple.object),
                    )
                )
            )
        other_relations = [r for r in sorted(world.relations) if r != edit_triple.relation]
        for _ in range(relation_swap_distractors):
            if not other_relations:
                break
            relation_id = other_relations[int(rng.integers(len(other_relations)))]
            add_distractor(
                fresh_triple(
                    lambda: FactTriple(
                        subject=edit_triple.subject,
                        relation=relation_id,
                        object=_pick(rng, pool.candidates(relation_id, "object")),
                    )
                )
            )

    train_triples = [edited_triples[i] for i in train_chains]

    training = _build_training_data(
        world, templates, list(languages), train_triples, pool, rng
    )
    logger.info(
        "generated %d cases, %d gold edits, %d distractors, %d training examples (%d train chains)",
        len(cases), len(gold_edits), len(distractor_edits), len(training), len(train_chains),
    )
    return SynthCorpus(
        world=world,
        languages=languages,
        templates=templates,
        cases=cases,
        gold_edits=gold_edits,
        distractor_edits=distractor_edits,
        entity_pool=pool,
        training=training,
        transcript_entries=sorted(transcript.items()),
        retrieval_queries=retrieval_queries,
        edit_chain=edit_chain,
        encoder_train_chains=train_chains,
        heldout_chains=heldout_chains,
    )


def _pick(rng: np.random.Generator, candidates: Sequence[str], exclude: str | None = None) -> str:
    filtered = [c for c in candidates if c != exclude]
    if not filtered:
        raise ValueError("no candidates to pick from")
    return filtered[int(rng.integers(len(filtered)))]


def _build_training_data(
    world: SynthWorld,
    templates: TemplateTable,
    tags: list[str],
    edited_triples: list[tuple[FactTriple, str, str]],
    pool: EntityPool,
    rng: np.random.Generator,
) -> TrainingData:
    """Contrastive data per edited fact.

    The margin triplets span every ordered rendering-language pair
    (translation alignment needs parallel surface forms); the
    cross-entropy pairs bind each question to the edit's single stored
    rendering only, matching what the memory would actually hold.
    """
    rendering_languages = ["en"] + tags
    data = TrainingData()
    for index, (triple, question, stored_language) in enumerate(edited_triples):
        for lang_a in rendering_languages:
            for lang_b in rendering_languages:
                if lang_a == lang_b:
                    continue
                negative = generate_hard_negative(triple, pool, rng)
                data.triplets.append(
                    TripletExample(
                        anchor=render_statement(triple, lang_a, templates),
                        positive=render_statement(triple, lang_b, templates),
                        negative=render_statement(negative, lang_a, templates),
                        kind="sd",
                    )
                )
        for lang_a in rendering_languages:
            other = edited_triples[_other_index(rng, len(edited_triples), index)][0]
            lang_b = rendering_languages[int(rng.integers(len(rendering_languages)))]
            data.triplets.append(
                TripletExample(
                    anchor=question,
                    positive=render_statement(triple, lang_a, templates),
                    negative=render_statement(other, lang_b, templates),
                    kind="clec",
                )
            )
        data.pairs.append(
            BcePair(
                question=question,
                edit_statement=render_statement(triple, stored_language, templates),
            )
        )
    return data


def _other_index(rng: np.random.Generator, n: int, current: int) -> int:
    if n < 2:
        raise ValueError("need at least two edits for contrastive negatives")
    return (current + 1 + int(rng.integers(n - 1))) % n
