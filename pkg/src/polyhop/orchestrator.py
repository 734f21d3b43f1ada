"""Multi-hop orchestration: decompose, retrieve, verify, inject, extract.

The LLM sees few-shot demonstrations, then the question, then a growing
transcript of completed hops. Each hop follows a fixed line grammar:

    Subquestion: <text>
    Generated answer: <statement>
    According to Generated answer, the entity of Subquestion in English is: <entity>

and the run ends with ``Final answer: <text>``. In ``clever`` mode the
edit memory decides injection: a retrieval scoring at or above the
threshold replaces the generated answer with the stored edit statement,
otherwise the model answers from its own knowledge. In ``mello`` mode
the retrieved fact is always shown and the model says whether it
contradicts its tentative answer; the demo fixtures fix the exact
marker wording.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .errors import PolyhopError
from .facts import EditMemory, Encoder
from .llm import LlmClient
from .retrieval import RetrievalResult, retrieve_top1

logger = logging.getLogger(__name__)

QUESTION_PREFIX = "Question: "
SUBQUESTION_STUB = "Subquestion:"
GENERATED_ANSWER_STUB = "Generated answer:"
ENTITY_MARKER = "the entity of Subquestion in English is:"
ENTITY_LINE_PREFIX = f"According to Generated answer, {ENTITY_MARKER}"
FINAL_ANSWER_MARKER = "Final answer:"
RETRIEVED_FACT_PREFIX = "Retrieved fact:"

MODE_CLEVER = "clever"
MODE_MELLO = "mello"

OUTCOME_ANSWERED = "answered"
OUTCOME_MALFORMED = "malformed_llm_output"
OUTCOME_HOP_LIMIT = "hop_limit"

STEP_SUBQUESTION = "subquestion"
STEP_ENTITY = "entity"
STEP_FINAL = "final_answer"
STEP_MALFORMED = "malformed"

DEFAULT_CONTRADICTION_MARKER = "Retrieved fact contradicts the generated answer"
DEFAULT_STOP_SEQUENCES = ("\n\n", "\nQuestion:")


@dataclass
class OrchestratorConfig:
    demos: tuple[str, ...]
    mode: str = MODE_CLEVER
    threshold: float = 0.7
    max_hops: int = 5
    stop_sequences: tuple[str, ...] = DEFAULT_STOP_SEQUENCES
    question_language: str = "en"  # sub-questions and answers stay English
    contradiction_marker: str = DEFAULT_CONTRADICTION_MARKER

    def __post_init__(self) -> None:
        self.demos = tuple(self.demos)
        if not self.demos:
            raise ValueError("demo set must be non-empty")
        if self.mode not in (MODE_CLEVER, MODE_MELLO):
            raise ValueError(f"mode must be 'clever' or 'mello', got {self.mode!r}")
        if self.max_hops < 1:
            raise ValueError("max_hops must be at least 1")
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [-1, 1]")


@dataclass(frozen=True)
class StepParse:
    kind: str
    text: str
    raw: str


@dataclass
class HopTrace:
    hop_index: int
    subquestion: str
    retrieval: RetrievalResult | None
    injected: bool
    generated_answer: str
    extracted_entity: str


@dataclass
class MultiHopResult:
    question: str
    final_answer: str | None
    outcome: str
    hops: list[HopTrace] = field(default_factory=list)


def demo_hop_counts(demos: Sequence[str]) -> list[int]:
    return [demo.count(f"{SUBQUESTION_STUB} ") for demo in demos]


def build_prompt(demos: Sequence[str], question: str, hops: Sequence[HopTrace]) -> str:
    """Assemble demos, the question, completed hops, and the next-hop stub.

    Completed hops are re-rendered from their traces, so the replayed
    transcript is always in canonical line format regardless of what raw
    text the model produced.
    """
    counts = set(demo_hop_counts(demos))
    if not {2, 3, 4} <= counts:
        raise ValueError("demos must include 2-hop, 3-hop, and 4-hop examples")
    parts = ["\n\n".join(demos), "\n\n", QUESTION_PREFIX, question, "\n"]
    for hop in hops:
        parts.append(f"{SUBQUESTION_STUB} {hop.subquestion}\n")
        parts.append(f"{GENERATED_ANSWER_STUB} {hop.generated_answer}\n")
        parts.append(f"{ENTITY_LINE_PREFIX} {hop.extracted_entity}\n")
    parts.append(SUBQUESTION_STUB)
    return "".join(parts)


def parse_step(output: str) -> StepParse:
    """Classify raw LLM output by marker, final answer taking precedence.

    The first marker in precedence order decides the step kind; a marker
    followed by no content on its line counts as malformed.
    """
    for kind, marker in (
        (STEP_FINAL, FINAL_ANSWER_MARKER),
        (STEP_ENTITY, ENTITY_MARKER),
        (STEP_SUBQUESTION, SUBQUESTION_STUB),
    ):
        index = output.find(marker)
        if index >= 0:
            rest = output[index + len(marker) :]
            text = rest.split("\n", 1)[0].strip()
            if not text:
                break
            return StepParse(kind=kind, text=text, raw=output)
    return StepParse(kind=STEP_MALFORMED, text="", raw=output)


def _current_hop_block(subquestion: str, answer: str | None = None) -> str:
    block = f" {subquestion}\n{GENERATED_ANSWER_STUB}"
    if answer is not None:
        block += f" {answer}\n"
    return block


def answer_multihop(
    question: str,
    memory: EditMemory,
    encoder: Encoder,
    llm: LlmClient,
    config: OrchestratorConfig,
) -> MultiHopResult:
    """Answer one multi-hop question, tracing every hop.

    The loop is stateless between calls (safe to run questions
    concurrently) and terminates on a final answer, a malformed model
    step, or the hop limit.
    """
    result = MultiHopResult(question=question, final_answer=None, outcome=OUTCOME_HOP_LIMIT)
    for hop_index in range(1, config.max_hops + 1):
        base = build_prompt(config.demos, question, result.hops)
        step = parse_step(llm.complete(base, config.stop_sequences))
        if step.kind == STEP_FINAL:
            result.final_answer = step.text
            result.outcome = OUTCOME_ANSWERED
            return result
        if step.kind != STEP_SUBQUESTION:
            logger.debug("malformed decomposition at hop %d: %r", hop_index, step.raw[:80])
            result.outcome = OUTCOME_MALFORMED
            return result
        subquestion = step.text

        retrieval = retrieve_top1(subquestion, memory, encoder, config.threshold)
        injected = False
        if config.mode == MODE_CLEVER:
            if retrieval is not None and retrieval.verified:
                # verified edit replaces the model's own answer line
                injected = True
                answer_line = retrieval.edit.statement
            else:
                # unverified retrievals never reach the prompt; the model
                # answers from its internal knowledge alone
                raw = llm.complete(base + _current_hop_block(subquestion), config.stop_sequences)
                answer_line = raw.strip().split("\n", 1)[0].strip()
        else:
            raw = llm.complete(base + _current_hop_block(subquestion), config.stop_sequences)
            answer_line = raw.strip().split("\n", 1)[0].strip()
            if retrieval is not None:
                # always show the fact; the model arbitrates the contradiction
                contradiction_prompt = (
                    base
                    + _current_hop_block(subquestion, answer_line)
                    + f"{RETRIEVED_FACT_PREFIX} {retrieval.edit.statement}\n"
                )
                verdict = llm.complete(contradiction_prompt, config.stop_sequences)
                if verdict.strip().startswith(config.contradiction_marker):
                    injected = True
                    answer_line = retrieval.edit.statement
        if not answer_line:
            result.outcome = OUTCOME_MALFORMED
            return result

        entity_prompt = base + _current_hop_block(subquestion, answer_line)
        entity_step = parse_step(llm.complete(entity_prompt, config.stop_sequences))
        hop = HopTrace(
            hop_index=hop_index,
            subquestion=subquestion,
            retrieval=retrieval,
            injected=injected,
            generated_answer=answer_line,
            extracted_entity="",
        )
        if entity_step.kind == STEP_FINAL:
            # the model skipped entity extraction and answered outright
            result.hops.append(hop)
            result.final_answer = entity_step.text
            result.outcome = OUTCOME_ANSWERED
            return result
        if entity_step.kind != STEP_ENTITY:
            result.hops.append(hop)
            result.outcome = OUTCOME_MALFORMED
            return result
        hop.extracted_entity = entity_step.text
        result.hops.append(hop)
    result.outcome = OUTCOME_HOP_LIMIT
    return result
