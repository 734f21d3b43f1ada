"""Benchmark loading, answer matching, and accuracy reporting.

Datasets follow the MQuAKE JSON layout (an array of cases with
``questions``, ``requested_rewrite``, ``new_answer``, aliases, and the
gold per-hop chain), extended with a ``language`` tag on each rewrite.
Two metrics are reported: multi-hop accuracy (any paraphrase reaches
the gold final answer) and the stricter hop-wise accuracy (some
paraphrase also walks the gold edited chain hop by hop).
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from jsonschema import Draft202012Validator

from .errors import DuplicateEditId, SchemaError
from .facts import EditMemory, Encoder, FactEdit, FactTriple, TemplateTable, build_memory, render_edit
from .llm import LlmClient
from .orchestrator import HopTrace, MultiHopResult, OrchestratorConfig, answer_multihop

logger = logging.getLogger(__name__)

MEMORY_POLICY_SAMPLE = "100"
MEMORY_POLICY_ALL = "all"
SAMPLE_SIZE = 100

_REWRITE_SCHEMA = {
    "type": "object",
    "required": ["subject", "relation_id", "target_new", "language"],
    "properties": {
        "subject": {"type": "string", "minLength": 1},
        "relation_id": {"type": "string", "minLength": 1},
        "target_new": {"type": "string", "minLength": 1},
        "language": {"type": "string", "minLength": 1},
        "edit_id": {"type": "string", "minLength": 1},
    },
}

_CASE_SCHEMA = {
    "type": "object",
    "required": [
        "case_id",
        "questions",
        "requested_rewrite",
        "new_answer",
        "new_answer_alias",
        "new_single_hops",
    ],
    "properties": {
        "case_id": {"type": ["string", "integer"]},
        "questions": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1},
        "requested_rewrite": {"type": "array", "items": _REWRITE_SCHEMA, "minItems": 1},
        "new_answer": {"type": "string", "minLength": 1},
        "new_answer_alias": {"type": "array", "items": {"type": "string"}},
        "new_single_hops": {
            "type": "array",
            "minItems": 2,
            "maxItems": 4,
            "items": {
                "type": "object",
                "required": ["question", "answer"],
                "properties": {
                    "question": {"type": "string", "minLength": 1},
                    "answer": {"type": "string", "minLength": 1},
                },
            },
        },
    },
}

_DATASET_SCHEMA = {"type": "array", "items": _CASE_SCHEMA}
_VALIDATOR = Draft202012Validator(_DATASET_SCHEMA)


@dataclass(frozen=True)
class GoldHop:
    question: str
    answer: str


@dataclass
class MultiHopInstance:
    """One benchmark case: paraphrases, its edits, and the gold chain."""

    instance_id: str
    questions: list[str]
    edits: list[FactEdit]
    gold_hops: list[GoldHop]
    new_answer: str
    answer_aliases: list[str]
    raw: dict = field(default_factory=dict)

    @property
    def hop_count(self) -> int:
        return len(self.gold_hops)

    @property
    def language(self) -> str:
        return self.edits[0].language if self.edits else "en"


def _schema_check(payload) -> None:
    error = next(iter(sorted(_VALIDATOR.iter_errors(payload), key=lambda e: list(e.absolute_path))), None)
    if error is not None:
        pointer = "/" + "/".join(str(p) for p in error.absolute_path)
        raise SchemaError(pointer, error.message)


def load_dataset(path: str | Path, templates: TemplateTable) -> list[MultiHopInstance]:
    """Load and validate a dataset file, rendering each rewrite's statement."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    _schema_check(payload)
    instances = []
    for case in payload:
        case_id = str(case["case_id"])
        edits = []
        for i, rewrite in enumerate(case["requested_rewrite"]):
            triple = FactTriple(
                subject=rewrite["subject"],
                relation=rewrite["relation_id"],
                object=rewrite["target_new"],
            )
            edit_id = rewrite.get("edit_id", f"{case_id}-e{i}")
            edits.append(render_edit(triple, rewrite["language"], templates, edit_id))
        instances.append(
            MultiHopInstance(
                instance_id=case_id,
                questions=list(case["questions"]),
                edits=edits,
                gold_hops=[GoldHop(h["question"], h["answer"]) for h in case["new_single_hops"]],
                new_answer=case["new_answer"],
                answer_aliases=list(case["new_answer_alias"]),
                raw=case,
            )
        )
    return instances


def save_dataset(path: str | Path, cases: Sequence[dict]) -> None:
    """Write dataset cases canonically so save/load/save is byte-stable."""
    _schema_check(list(cases))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(list(cases), fh, sort_keys=True, ensure_ascii=False, indent=1)
        fh.write("\n")


def normalize_answer(text: str) -> str:
    return text.strip().casefold()


def _answer_matches(final_answer: str | None, instance: MultiHopInstance) -> bool:
    if final_answer is None:
        return False
    got = normalize_answer(final_answer)
    targets = {normalize_answer(instance.new_answer)}
    targets.update(normalize_answer(a) for a in instance.answer_aliases)
    return got in targets


def _chain_matches(hops: Sequence[HopTrace], gold: Sequence[GoldHop]) -> bool:
    if len(hops) != len(gold):
        return False
    return all(
        normalize_answer(hop.extracted_entity) == normalize_answer(g.answer)
        for hop, g in zip(hops, gold)
    )


@dataclass
class InstanceResult:
    instance_id: str
    language: str
    runs: list[MultiHopResult]
    correct: bool
    hopwise_correct: bool
    outcome: str


@dataclass(frozen=True)
class MetricBlock:
    instances: int
    correct: int
    hopwise_correct: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.instances if self.instances else 0.0

    @property
    def hopwise_accuracy(self) -> float:
        return self.hopwise_correct / self.instances if self.instances else 0.0


@dataclass
class EvalReport:
    memory_policy: str
    memory_size: int
    mode: str
    threshold: float
    overall: MetricBlock
    per_language: dict[str, MetricBlock]
    outcome_counts: dict[str, int]

    def __post_init__(self) -> None:
        # hop-wise correctness implies answer correctness, so this can
        # only trip on a bookkeeping bug
        assert self.overall.hopwise_correct <= self.overall.correct
        assert sum(b.instances for b in self.per_language.values()) == self.overall.instances
        assert sum(self.outcome_counts.values()) == self.overall.instances

    def to_dict(self) -> dict:
        def block(b: MetricBlock) -> dict:
            return {
                "instances": b.instances,
                "correct": b.correct,
                "hopwise_correct": b.hopwise_correct,
                "accuracy": b.accuracy,
                "hopwise_accuracy": b.hopwise_accuracy,
            }

        return {
            "memory_policy": self.memory_policy,
            "memory_size": self.memory_size,
            "mode": self.mode,
            "threshold": self.threshold,
            "overall": block(self.overall),
            "per_language": {lang: block(b) for lang, b in sorted(self.per_language.items())},
            "outcomes": dict(sorted(self.outcome_counts.items())),
        }

    def table(self) -> str:
        lines = [
            f"memory={self.memory_policy} (n={self.memory_size} edits), "
            f"mode={self.mode}, threshold={self.threshold}",
            f"{'language':<12}{'instances':>10}{'accuracy':>12}{'hop-acc':>12}",
        ]
        rows = sorted(self.per_language.items()) + [("overall", self.overall)]
        for name, b in rows:
            lines.append(
                f"{name:<12}{b.instances:>10}{b.accuracy:>12.4f}{b.hopwise_accuracy:>12.4f}"
            )
        return "\n".join(lines)


def score_instance(instance: MultiHopInstance, runs: Sequence[MultiHopResult]) -> InstanceResult:
    """Judge an instance from its paraphrase runs.

    The instance is correct if any paraphrase lands the gold answer;
    hop-wise correct if some paraphrase both walks the gold chain and
    lands the gold answer. The reported outcome comes from the first
    correct run, falling back to the first run.
    """
    correct_runs = [r for r in runs if _answer_matches(r.final_answer, instance)]
    hopwise = any(
        _chain_matches(r.hops, instance.gold_hops)
        for r in correct_runs
    )
    outcome = (correct_runs[0] if correct_runs else runs[0]).outcome
    return InstanceResult(
        instance_id=instance.instance_id,
        language=instance.language,
        runs=list(runs),
        correct=bool(correct_runs),
        hopwise_correct=hopwise,
        outcome=outcome,
    )


def _aggregate(
    results: Sequence[InstanceResult],
    memory_policy: str,
    memory_size: int,
    config: OrchestratorConfig,
) -> EvalReport:
    per_language: dict[str, list[InstanceResult]] = {}
    for result in results:
        per_language.setdefault(result.language, []).append(result)

    def block(group: Sequence[InstanceResult]) -> MetricBlock:
        return MetricBlock(
            instances=len(group),
            correct=sum(r.correct for r in group),
            hopwise_correct=sum(r.hopwise_correct for r in group),
        )

    outcomes: dict[str, int] = {}
    for result in results:
        outcomes[result.outcome] = outcomes.get(result.outcome, 0) + 1
    return EvalReport(
        memory_policy=memory_policy,
        memory_size=memory_size,
        mode=config.mode,
        threshold=config.threshold,
        overall=block(results),
        per_language={lang: block(group) for lang, group in per_language.items()},
        outcome_counts=outcomes,
    )


def build_eval_memory(
    instances: Sequence[MultiHopInstance],
    encoder: Encoder,
    extra_edits: Sequence[FactEdit] = (),
) -> EditMemory:
    """Collect instance edits (plus optional distractors) into one memory."""
    edits: list[FactEdit] = []
    seen: dict[str, FactEdit] = {}
    for edit in [e for inst in instances for e in inst.edits] + list(extra_edits):
        known = seen.get(edit.edit_id)
        if known is None:
            seen[edit.edit_id] = edit
            edits.append(edit)
        elif known != edit:
            raise DuplicateEditId(edit.edit_id)
    return build_memory(edits, encoder)


def run_eval(
    instances: Sequence[MultiHopInstance],
    encoder: Encoder,
    llm: LlmClient,
    config: OrchestratorConfig,
    memory_policy: str = MEMORY_POLICY_ALL,
    seed: int = 0,
    extra_edits: Sequence[FactEdit] = (),
    jobs: int = 1,
) -> tuple[EvalReport, list[InstanceResult]]:
    """Evaluate instances against a memory chosen by the policy.

    Policy ``"all"`` loads every edit and evaluates every instance;
    policy ``"100"`` samples 100 instances (seeded), loads only their
    edits, and evaluates exactly those instances. ``jobs`` bounds worker
    threads; results are merged in instance order so the report does not
    depend on scheduling.
    """
    if memory_policy == MEMORY_POLICY_SAMPLE:
        rng = np.random.default_rng([seed, SAMPLE_SIZE])
        size = min(SAMPLE_SIZE, len(instances))
        chosen = sorted(int(i) for i in rng.choice(len(instances), size=size, replace=False))
        subset = [instances[i] for i in chosen]
    elif memory_policy == MEMORY_POLICY_ALL:
        subset = list(instances)
    else:
        raise ValueError(f"unknown memory policy {memory_policy!r}")
    memory = build_eval_memory(subset, encoder, extra_edits)
    logger.info(
        "evaluating %d instances against %d memorized edits", len(subset), len(memory)
    )

    def evaluate(instance: MultiHopInstance) -> InstanceResult:
        runs = [
            answer_multihop(question, memory, encoder, llm, config)
            for question in instance.questions
        ]
        return score_instance(instance, runs)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, subset))
    else:
        results = [evaluate(instance) for instance in subset]
    report = _aggregate(results, memory_policy, len(memory), config)
    return report, results


def results_to_jsonl(results: Sequence[InstanceResult]) -> list[str]:
    """Serialize per-run traces, one JSON line per orchestrated question."""
    lines = []
    for result in results:
        for run in result.runs:
            record = {
                "instance_id": result.instance_id,
                "language": result.language,
                "question": run.question,
                "final_answer": run.final_answer,
                "outcome": run.outcome,
                "hops": [
                    {
                        "hop_index": hop.hop_index,
                        "subquestion": hop.subquestion,
                        "retrieved_edit_id": hop.retrieval.edit.edit_id if hop.retrieval else None,
                        "retrieval_score": hop.retrieval.score if hop.retrieval else None,
                        "injected": hop.injected,
                        "generated_answer": hop.generated_answer,
                        "extracted_entity": hop.extracted_entity,
                    }
                    for hop in run.hops
                ],
            }
            lines.append(json.dumps(record, sort_keys=True, ensure_ascii=False))
    return lines
