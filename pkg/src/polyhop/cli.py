"""Command-line entry points.

Subcommands: ``gen-synth`` (build a synthetic corpus on disk), ``train``
(fit encoder weights), ``eval`` (orchestrated multi-hop evaluation), and
``answer`` (one question). Options may come from a JSON config file
(``--config``); explicitly passed flags win over config values, unknown
config keys are rejected.

Exit codes: 0 success, 2 usage or configuration error, 3 data or schema
error, 4 numeric failure during training, 5 LLM transport failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .encoder import (
    DEFAULT_DIM,
    DEFAULT_NGRAM_RANGE,
    DEFAULT_VOCAB_SIZE,
    BuiltinEncoderParams,
    HashedNgramEncoder,
    load_checkpoint,
    save_checkpoint,
)
from .errors import (
    ConfigError,
    DuplicateEditId,
    EmptyPool,
    EmptyText,
    EncoderFailure,
    FingerprintMismatch,
    InvalidRemoteVector,
    LlmTransportError,
    MissingTemplate,
    NonFiniteLoss,
    PoolOnlyContainsOriginal,
    ProtocolError,
    RemoteTimeout,
    SchemaError,
    UnknownWord,
)
from .facts import TemplateTable, build_memory, load_edits_jsonl, save_edits_jsonl
from .hashutil import file_sha256
from .llm import HttpLlmClient, LlmClientConfig, MockLlm, save_transcript
from .orchestrator import (
    DEFAULT_CONTRADICTION_MARKER,
    MODE_CLEVER,
    MODE_MELLO,
    OrchestratorConfig,
    answer_multihop,
    build_prompt,
)
from .retrieval import DEFAULT_THRESHOLD
from .evaluation import (
    MEMORY_POLICY_ALL,
    MEMORY_POLICY_SAMPLE,
    load_dataset,
    results_to_jsonl,
    run_eval,
    save_dataset,
)
from .synth import build_languages, gen_instances, gen_world
from .training import TrainConfig, load_training_jsonl, save_training_jsonl, train, write_curve_csv
from .training.trainer import AdamState

logger = logging.getLogger(__name__)

_DATA_ERRORS = (
    SchemaError,
    DuplicateEditId,
    MissingTemplate,
    EmptyText,
    UnknownWord,
    FingerprintMismatch,
    EmptyPool,
    PoolOnlyContainsOriginal,
    EncoderFailure,
    InvalidRemoteVector,
)
_TRANSPORT_ERRORS = (LlmTransportError, RemoteTimeout, ProtocolError)


# ------------------------------------------------------------- config I/O


def _load_config(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}; allowed: {sorted(allowed)}")
    return raw


class _Options:
    """Merged view over CLI flags and a config file; flags win."""

    def __init__(self, args: argparse.Namespace, allowed: set[str]) -> None:
        self._args = vars(args)
        self._config = _load_config(self._args.get("config"), allowed)

    def get(self, name: str, default=None):
        flag = self._args.get(name)
        if flag is not None:
            return flag
        if name in self._config:
            return self._config[name]
        return default


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _comma_names(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(p) for p in text]
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"expected a comma-separated list, got {text!r}")
    return parts


# --------------------------------------------------------------- gen-synth

_GEN_KEYS = {
    "out", "seed", "chains", "entities", "languages", "hop_mix", "edit_scope",
    "edit_language_policy", "paraphrases", "object_swaps", "subject_swaps",
    "relation_swaps", "encoder_train_fraction", "phrase_words",
    "distractor_languages",
}


def cmd_gen_synth(args: argparse.Namespace) -> int:
    opts = _Options(args, _GEN_KEYS)
    out_dir = Path(opts.get("out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = int(opts.get("seed", 0))
    n_chains = int(opts.get("chains", 24))
    hop_mix = opts.get("hop_mix", (1 / 3, 1 / 3, 1 / 3))
    if isinstance(hop_mix, str):
        hop_mix = _comma_floats(hop_mix)
    hop_mix = tuple(float(p) for p in hop_mix)
    if len(hop_mix) != 3:
        raise ConfigError("hop_mix needs exactly three proportions")
    tags = _comma_names(opts.get("languages", ["xx1", "xx2"]))
    # default entity budget: chains plus a one-third spare pool
    default_entities = int(sum((h + 1) * c for h, c in _mix_counts(n_chains, hop_mix).items()) * 4 / 3) + 4
    n_entities = int(opts.get("entities", default_entities))

    phrase_words = opts.get("phrase_words", (1, 2))
    if isinstance(phrase_words, str):
        phrase_words = tuple(int(p) for p in phrase_words.split(","))
    world = gen_world(
        seed, n_entities, n_chains, hop_mix, phrase_words=tuple(int(p) for p in phrase_words)
    )
    languages = build_languages(world, tags, seed)
    corpus = gen_instances(
        world,
        languages,
        seed=seed,
        edit_language_policy=str(opts.get("edit_language_policy", "round_robin")),
        edit_scope=str(opts.get("edit_scope", "first")),
        paraphrases=int(opts.get("paraphrases", 2)),
        object_swap_distractors=int(opts.get("object_swaps", 2)),
        subject_swap_distractors=int(opts.get("subject_swaps", 1)),
        relation_swap_distractors=int(opts.get("relation_swaps", 1)),
        encoder_train_fraction=float(opts.get("encoder_train_fraction", 1.0)),
        distractor_languages=(
            _comma_names(opts.get("distractor_languages"))
            if opts.get("distractor_languages")
            else None
        ),
    )

    files = {
        "world.json": lambda p: _dump_json(p, _world_dict(world, languages)),
        "templates.json": lambda p: _dump_json(p, corpus.templates.to_dict()),
        "edits.jsonl": lambda p: save_edits_jsonl(p, corpus.gold_edits),
        "distractors.jsonl": lambda p: save_edits_jsonl(p, corpus.distractor_edits),
        "dataset.json": lambda p: save_dataset(p, corpus.cases),
        "pool.json": lambda p: corpus.entity_pool.save(p),
        "training.jsonl": lambda p: save_training_jsonl(p, corpus.training),
        "transcript.json": lambda p: save_transcript(p, corpus.transcript_entries),
        "demos.json": lambda p: _dump_json(p, {"demos": list(corpus.demos)}),
        "queries.json": lambda p: _dump_json(
            p,
            [
                {"chain": c, "question": q, "edit_id": e}
                for c, q, e in corpus.retrieval_queries
            ],
        ),
        "split.json": lambda p: _dump_json(
            p,
            {
                "encoder_train_chains": list(corpus.encoder_train_chains),
                "heldout_chains": list(corpus.heldout_chains),
                "edit_chain": dict(sorted(corpus.edit_chain.items())),
            },
        ),
    }
    for name, writer in files.items():
        writer(out_dir / name)
    manifest = {
        "config": {
            "seed": seed,
            "chains": n_chains,
            "entities": n_entities,
            "hop_mix": list(hop_mix),
            "languages": tags,
            "edit_scope": opts.get("edit_scope", "first"),
            "edit_language_policy": opts.get("edit_language_policy", "round_robin"),
        },
        "counts": {
            "cases": len(corpus.cases),
            "gold_edits": len(corpus.gold_edits),
            "distractors": len(corpus.distractor_edits),
            "training_examples": len(corpus.training),
        },
        "files": {name: f"sha256:{file_sha256(out_dir / name)}" for name in sorted(files)},
    }
    _dump_json(out_dir / "manifest.json", manifest)
    print(f"wrote synthetic corpus to {out_dir} ({len(corpus.cases)} cases)")
    return 0


def _mix_counts(n_chains: int, hop_mix: tuple[float, ...]) -> dict[int, int]:
    from .synth import hop_mix_counts

    return hop_mix_counts(n_chains, tuple(hop_mix))


def _world_dict(world, languages) -> dict:
    return {
        "seed": world.seed,
        "entities": list(world.entities),
        "extras": list(world.extras),
        "relations": {
            rid: {"phrase": info.phrase, "hop_class": info.hop_class, "position": info.position}
            for rid, info in world.relations.items()
        },
        "chains": [
            {
                "index": c.index,
                "hop_class": c.hop_class,
                "entities": list(c.entities),
                "relations": list(c.relations),
            }
            for c in world.chains
        ],
        "languages": {tag: dict(lang.lexicon) for tag, lang in languages.items()},
    }


def _dump_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1, ensure_ascii=False)
        fh.write("\n")


# ------------------------------------------------------------------- train

_TRAIN_KEYS = {
    "data", "out", "curve", "losses", "learning_rate", "batch_size", "epochs",
    "margin", "negatives", "distance", "seed", "dim", "vocab_size", "resume",
}
_LOSS_ORDER = ("sd", "clec", "bce")


def cmd_train(args: argparse.Namespace) -> int:
    opts = _Options(args, _TRAIN_KEYS)
    data_path = opts.get("data")
    out_path = opts.get("out")
    if not data_path or not out_path:
        raise ConfigError("train requires --data and --out")
    data = load_training_jsonl(data_path)

    losses = _comma_names(opts.get("losses", list(_LOSS_ORDER)))
    bad = sorted(set(losses) - set(_LOSS_ORDER))
    if bad:
        raise ConfigError(f"unknown loss names {bad}; choose from {list(_LOSS_ORDER)}")
    weights = tuple(1.0 if name in losses else 0.0 for name in _LOSS_ORDER)

    config = TrainConfig(
        learning_rate=float(opts.get("learning_rate", 5e-5)),
        batch_size=int(opts.get("batch_size", 1024)),
        epochs=int(opts.get("epochs", 200)),
        margin=float(opts.get("margin", 1.0)),
        negatives_per_positive=int(opts.get("negatives", 20)),
        distance=str(opts.get("distance", "l2")),
        seed=int(opts.get("seed", 0)),
        loss_weights=weights,
    )

    resume_path = opts.get("resume")
    if resume_path:
        bundle = load_checkpoint(resume_path)
        recorded = bundle.meta.get("train_config", {})
        current = _train_config_meta(config)
        if recorded != current:
            raise ConfigError(
                f"resume config mismatch: checkpoint trained with {recorded}, got {current}"
            )
        start_epoch = int(bundle.meta.get("epochs_done", 0))
        if start_epoch >= config.epochs:
            raise ConfigError(
                f"checkpoint already covers {start_epoch} epochs; raise --epochs to continue"
            )
        init_params = bundle.params
        adam = AdamState(
            m_token=bundle.extra_arrays["adam_m_token"],
            v_token=bundle.extra_arrays["adam_v_token"],
            m_proj=bundle.extra_arrays["adam_m_proj"],
            v_proj=bundle.extra_arrays["adam_v_proj"],
            step=int(bundle.extra_arrays["adam_step"][0]),
        )
    else:
        start_epoch = 0
        adam = None
        init_params = BuiltinEncoderParams.initialize(
            dim=int(opts.get("dim", DEFAULT_DIM)),
            vocab_size=int(opts.get("vocab_size", DEFAULT_VOCAB_SIZE)),
            ngram_range=DEFAULT_NGRAM_RANGE,
            seed=config.seed,
        )

    result = train(data, config, init_params, start_epoch=start_epoch, adam_state=adam)
    save_checkpoint(
        out_path,
        result.params,
        extra_arrays={
            "adam_m_token": result.adam.m_token,
            "adam_v_token": result.adam.v_token,
            "adam_m_proj": result.adam.m_proj,
            "adam_v_proj": result.adam.v_proj,
            "adam_step": np.array([float(result.adam.step)], dtype=np.float64),
        },
        meta={
            "epochs_done": result.epochs_run,
            "train_config": _train_config_meta(config),
            "bce_clamped": result.clamp_stats.clamped,
        },
    )
    curve_path = opts.get("curve")
    if curve_path:
        write_curve_csv(curve_path, result.curve, config.loss_weights)
    final_train = [r for r in result.curve if r.split == "train"]
    tail = f", final train loss {final_train[-1].total:.6f}" if final_train else ""
    print(f"checkpoint written to {out_path} (epochs {result.epochs_run}{tail})")
    return 0


def _train_config_meta(config: TrainConfig) -> dict:
    # everything that must match for a resumed run to be a true continuation
    return {
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "margin": config.margin,
        "negatives_per_positive": config.negatives_per_positive,
        "distance": config.distance,
        "seed": config.seed,
        "loss_weights": list(config.loss_weights),
    }


# -------------------------------------------------------------------- eval


_EVAL_KEYS = {
    "dataset", "templates", "checkpoint", "encoder_seed", "dim", "vocab_size",
    "transcript", "llm_endpoint", "llm_model", "demos", "mode", "threshold",
    "memory", "extra_edits", "jobs", "report", "traces", "seed", "max_hops",
}


def _build_encoder(opts: _Options) -> HashedNgramEncoder:
    checkpoint = opts.get("checkpoint")
    if checkpoint:
        return HashedNgramEncoder(load_checkpoint(checkpoint).params)
    return HashedNgramEncoder.create(
        dim=int(opts.get("dim", DEFAULT_DIM)),
        vocab_size=int(opts.get("vocab_size", DEFAULT_VOCAB_SIZE)),
        seed=int(opts.get("encoder_seed", 0)),
    )


def _build_llm(opts: _Options):
    transcript = opts.get("transcript")
    endpoint = opts.get("llm_endpoint")
    if transcript and endpoint:
        raise ConfigError("choose either --transcript or --llm-endpoint, not both")
    if transcript:
        return MockLlm.from_file(transcript)
    if endpoint:
        model = opts.get("llm_model")
        if not model:
            raise ConfigError("--llm-endpoint requires --llm-model")
        return HttpLlmClient(LlmClientConfig(endpoint=str(endpoint), model=str(model)))
    raise ConfigError("an LLM is required: pass --transcript or --llm-endpoint")


def _load_demos(opts: _Options) -> tuple[str, ...]:
    path = opts.get("demos")
    if not path:
        raise ConfigError("--demos is required (JSON file with a 'demos' list)")
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    demos = payload.get("demos") if isinstance(payload, dict) else None
    if not isinstance(demos, list) or not all(isinstance(d, str) for d in demos) or not demos:
        raise SchemaError("/demos", "expected a non-empty list of demo strings")
    return tuple(demos)


def _orchestrator_config(opts: _Options, demos: tuple[str, ...]) -> OrchestratorConfig:
    mode = str(opts.get("mode", MODE_CLEVER))
    if mode not in (MODE_CLEVER, MODE_MELLO):
        raise ConfigError(f"mode must be {MODE_CLEVER!r} or {MODE_MELLO!r}, got {mode!r}")
    return OrchestratorConfig(
        demos=demos,
        mode=mode,
        threshold=float(opts.get("threshold", DEFAULT_THRESHOLD)),
        max_hops=int(opts.get("max_hops", 5)),
        contradiction_marker=DEFAULT_CONTRADICTION_MARKER,
    )


def cmd_eval(args: argparse.Namespace) -> int:
    opts = _Options(args, _EVAL_KEYS)
    dataset_path = opts.get("dataset")
    templates_path = opts.get("templates")
    if not dataset_path or not templates_path:
        raise ConfigError("eval requires --dataset and --templates")
    memory_policy = str(opts.get("memory", MEMORY_POLICY_ALL))
    if memory_policy not in (MEMORY_POLICY_ALL, MEMORY_POLICY_SAMPLE):
        raise ConfigError(
            f"memory policy must be '{MEMORY_POLICY_ALL}' or '{MEMORY_POLICY_SAMPLE}'"
        )
    templates = TemplateTable.from_file(templates_path)
    instances = load_dataset(dataset_path, templates)
    encoder = _build_encoder(opts)
    llm = _build_llm(opts)
    config = _orchestrator_config(opts, _load_demos(opts))
    extra = opts.get("extra_edits")
    extra_edits = load_edits_jsonl(extra, templates) if extra else []

    report, results = run_eval(
        instances,
        encoder,
        llm,
        config,
        memory_policy=memory_policy,
        seed=int(opts.get("seed", 0)),
        extra_edits=extra_edits,
        jobs=int(opts.get("jobs", 1)),
    )
    report_path = opts.get("report")
    if report_path:
        _dump_json(Path(report_path), report.to_dict())
    traces_path = opts.get("traces")
    if traces_path:
        with open(traces_path, "w", encoding="utf-8") as fh:
            for line in results_to_jsonl(results):
                fh.write(line + "\n")
    print(report.table())
    return 0


# ------------------------------------------------------------------ answer

_ANSWER_KEYS = _EVAL_KEYS - {"dataset", "memory", "report", "traces", "jobs"} | {
    "question", "edits", "dry_run",
}


def cmd_answer(args: argparse.Namespace) -> int:
    opts = _Options(args, _ANSWER_KEYS)
    question = opts.get("question")
    if not question:
        raise ConfigError("answer requires --question")
    demos = _load_demos(opts)
    if opts.get("dry_run"):
        print(build_prompt(demos, str(question), hops=[]))
        return 0
    templates_path = opts.get("templates")
    edits_path = opts.get("edits")
    if not templates_path or not edits_path:
        raise ConfigError("answer requires --templates and --edits")
    templates = TemplateTable.from_file(templates_path)
    encoder = _build_encoder(opts)
    edits = load_edits_jsonl(edits_path, templates)
    memory = build_memory(edits, encoder)
    llm = _build_llm(opts)
    config = _orchestrator_config(opts, demos)

    result = answer_multihop(str(question), memory, encoder, llm, config)
    for hop in result.hops:
        mark = "injected" if hop.injected else "internal"
        print(f"hop {hop.hop_index}: {hop.subquestion!r} -> {hop.extracted_entity!r} ({mark})")
    print(f"outcome: {result.outcome}")
    print(f"final answer: {result.final_answer if result.final_answer is not None else '(none)'}")
    return 0


# -------------------------------------------------------------------- main


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file holding option values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyhop",
        description="multilingual edit memory with retrieve-and-verify multi-hop answering",
    )
    parser.add_argument("--log-level", default="WARNING", help="python logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-synth", help="generate a synthetic corpus directory")
    _add_common(gen)
    gen.add_argument("--out", help="output directory")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--chains", type=int)
    gen.add_argument("--entities", type=int)
    gen.add_argument("--languages", help="comma-separated pseudo-language tags")
    gen.add_argument("--hop-mix", dest="hop_mix", help="three comma-separated proportions")
    gen.add_argument("--edit-scope", dest="edit_scope", choices=["first", "chain"])
    gen.add_argument("--edit-language-policy", dest="edit_language_policy")
    gen.add_argument("--paraphrases", type=int)
    gen.add_argument("--object-swaps", dest="object_swaps", type=int)
    gen.add_argument("--subject-swaps", dest="subject_swaps", type=int)
    gen.add_argument("--relation-swaps", dest="relation_swaps", type=int)
    gen.add_argument(
        "--encoder-train-fraction", dest="encoder_train_fraction", type=float,
        help="share of chains whose edits feed encoder training; the rest are held out",
    )
    gen.add_argument("--phrase-words", dest="phrase_words", help="min,max words per relation phrase")
    gen.add_argument(
        "--distractor-languages", dest="distractor_languages",
        help="comma-separated rendering languages for distractor edits",
    )
    gen.set_defaults(func=cmd_gen_synth)

    tr = sub.add_parser("train", help="train encoder weights on contrastive data")
    _add_common(tr)
    tr.add_argument("--data", help="training JSONL")
    tr.add_argument("--out", help="checkpoint path to write")
    tr.add_argument("--curve", help="loss-curve CSV path")
    tr.add_argument("--losses", help="comma-separated subset of sd,clec,bce")
    tr.add_argument("--learning-rate", dest="learning_rate", type=float)
    tr.add_argument("--batch-size", dest="batch_size", type=int)
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--margin", type=float)
    tr.add_argument("--negatives", type=int)
    tr.add_argument("--distance", choices=["l2", "cosine"])
    tr.add_argument("--seed", type=int)
    tr.add_argument("--dim", type=int)
    tr.add_argument("--vocab-size", dest="vocab_size", type=int)
    tr.add_argument("--resume", help="checkpoint to continue from")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="run orchestrated evaluation over a dataset")
    _add_common(ev)
    ev.add_argument("--dataset")
    ev.add_argument("--templates")
    ev.add_argument("--checkpoint")
    ev.add_argument("--encoder-seed", dest="encoder_seed", type=int)
    ev.add_argument("--dim", type=int)
    ev.add_argument("--vocab-size", dest="vocab_size", type=int)
    ev.add_argument("--transcript", help="mock LLM transcript JSON")
    ev.add_argument("--llm-endpoint", dest="llm_endpoint")
    ev.add_argument("--llm-model", dest="llm_model")
    ev.add_argument("--demos", help="JSON file with a 'demos' list")
    ev.add_argument("--mode", choices=[MODE_CLEVER, MODE_MELLO])
    ev.add_argument("--threshold", type=float)
    ev.add_argument("--max-hops", dest="max_hops", type=int)
    ev.add_argument("--memory", choices=[MEMORY_POLICY_ALL, MEMORY_POLICY_SAMPLE])
    ev.add_argument("--extra-edits", dest="extra_edits", help="distractor edits JSONL")
    ev.add_argument("--jobs", type=int)
    ev.add_argument("--report", help="write the report JSON here")
    ev.add_argument("--traces", help="write per-run traces JSONL here")
    ev.add_argument("--seed", type=int)
    ev.set_defaults(func=cmd_eval)

    ans = sub.add_parser("answer", help="answer a single multi-hop question")
    _add_common(ans)
    ans.add_argument("--question")
    ans.add_argument("--edits", help="edit memory JSONL")
    ans.add_argument("--templates")
    ans.add_argument("--checkpoint")
    ans.add_argument("--encoder-seed", dest="encoder_seed", type=int)
    ans.add_argument("--dim", type=int)
    ans.add_argument("--vocab-size", dest="vocab_size", type=int)
    ans.add_argument("--transcript")
    ans.add_argument("--llm-endpoint", dest="llm_endpoint")
    ans.add_argument("--llm-model", dest="llm_model")
    ans.add_argument("--demos")
    ans.add_argument("--mode", choices=[MODE_CLEVER, MODE_MELLO])
    ans.add_argument("--threshold", type=float)
    ans.add_argument("--max-hops", dest="max_hops", type=int)
    ans.add_argument("--dry-run", dest="dry_run", action="store_true", default=False)
    ans.set_defaults(func=cmd_answer)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        return int(args.func(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteLoss as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _TRANSPORT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
