"""Command-line entry point for the whole pipeline.

Subcommands: tokenize, graph, gen-data, train, repair, eval, search-sim,
stats, plus make-corpus / make-tasks helpers for hermetic end-to-end runs.
Exit codes: 0 success, 1 task failure, 2 usage or config error,
3 evaluator unavailable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .corpus import make_corpus
from .datagen import (DATASET_FORMAT_VERSION, DatasetFormatError,
                      DatasetManifest, filter_corpus, generate_for_program,
                      read_dataset, write_dataset)
from .diagnostics import category_stats
from .driver import (IdentityPolicy, ModelPolicy, OracleGoldPolicy,
                     eval_by_category, eval_full, eval_single, iterative_repair)
from .evaluator import EvaluatorSpec, EvaluatorUnavailable, evaluate
from .graph import GRAPH_FORMAT_VERSION, build_graph, serialize_graph
from .lang import program_from_lines, tokenize_program
from .model import ModelConfig, RepairNetwork, TrainConfig, train
from .numcore import CHECKPOINT_FORMAT_VERSION, CheckpointFormatError
from .perturb import rng_from
from .search import (Candidate, best_first_search, make_synthetic_pools,
                     repair_augmented_search)

EXIT_OK = 0
EXIT_TASK_FAILURE = 1
EXIT_USAGE = 2
EXIT_EVALUATOR = 3

EVALUATOR_CMD_ENV = "LINEFIX_EVALUATOR_CMD"


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    return data


def _setting(args, config: dict, name: str, default):
    """Flag > config file > environment-derived default."""
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _evaluator_spec(args, config: dict) -> EvaluatorSpec:
    cmd = _setting(args, config, "evaluator-cmd",
                   os.environ.get(EVALUATOR_CMD_ENV) or None)
    timeout = int(_setting(args, config, "timeout-ms", 10_000))
    if cmd:
        return EvaluatorSpec(kind="external", command_template=cmd,
                             timeout_ms=timeout)
    return EvaluatorSpec(kind="minicheck", timeout_ms=timeout)


def _effective_config(args, config: dict, spec: EvaluatorSpec) -> dict:
    return {
        "seed": int(_setting(args, config, "seed", 0)),
        "evaluator": {"kind": spec.kind,
                      "command_template": spec.command_template,
                      "timeout_ms": spec.timeout_ms},
        "config_file": getattr(args, "config", None),
    }


def _read_program(path: str):
    try:
        return tokenize_program(Path(path).read_text().rstrip("\n"))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _read_corpus_dir(path: str):
    root = Path(path)
    if not root.is_dir():
        raise CliError(f"corpus directory {path} does not exist")
    files = sorted(p for p in root.iterdir() if p.is_file())
    if not files:
        raise CliError(f"corpus directory {path} is empty")
    return [tokenize_program(p.read_text().rstrip("\n")) for p in files]


def _load_network(path: str) -> RepairNetwork:
    try:
        return RepairNetwork.load(path)
    except CheckpointFormatError as exc:
        raise CliError(f"bad checkpoint {path}: {exc}") from exc
    except OSError as exc:
        raise CliError(f"cannot read checkpoint {path}: {exc}") from exc


# --- subcommands -------------------------------------------------------------

def cmd_tokenize(args, config):
    program = _read_program(args.input)
    for i, line in enumerate(program.lines, start=1):
        parts = " ".join(f"{t.text}/{t.kind.value}" for t in line)
        print(f"{i}: {parts}")
    return EXIT_OK


def cmd_graph(args, config):
    program = _read_program(args.input)
    spec = _evaluator_spec(args, config)
    feedback = None
    if not args.no_feedback:
        verdict = evaluate(program, spec)
        if verdict.compiles:
            raise CliError("input compiles; use --no-feedback for a code-only graph")
        feedback = verdict.feedback
    g = build_graph(program, feedback)
    print(serialize_graph(g).decode())
    by_symbol: dict[str, int] = {}
    for node in g.nodes:
        by_symbol[node.symbol] = by_symbol.get(node.symbol, 0) + 1
    summary = {s: n for s, n in sorted(by_symbol.items()) if n >= 1}
    print(f"# nodes={len(g.nodes)} edges={g.edge_count()} "
          f"cliques={len(summary)}", file=sys.stderr)
    for symbol, n in sorted(summary.items(), key=lambda kv: -kv[1]):
        print(f"#   {symbol!r}: {n} node(s), {n * (n - 1) // 2} edge(s)",
              file=sys.stderr)
    return EXIT_OK


def cmd_make_corpus(args, config):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = int(_setting(args, config, "seed", 0))
    programs = make_corpus(args.count, seed=seed)
    for i, program in enumerate(programs):
        (out / f"prog{i:05d}.c").write_text(program.to_text() + "\n")
    print(f"wrote {len(programs)} programs to {out}")
    return EXIT_OK


def _gen_worker(payload):
    lines, spec_kind, cmd, timeout, target, seed, idx = payload
    spec = EvaluatorSpec(kind=spec_kind, command_template=cmd, timeout_ms=timeout)
    program = program_from_lines(lines)
    examples = generate_for_program(program, spec, target, seed, idx,
                                    source_id=f"src{idx:05d}")
    return [ex.to_record() for ex in examples]


def cmd_gen_data(args, config):
    spec = _evaluator_spec(args, config)
    seed = int(_setting(args, config, "seed", 0))
    corpus = _read_corpus_dir(args.corpus)
    kept = list(filter_corpus(corpus, spec))
    if not kept:
        raise CliError("no usable programs in corpus (all too long or failing)")
    jobs = max(1, args.jobs)
    from .datagen import RepairExample
    if jobs == 1:
        examples = []
        for idx, program in enumerate(kept):
            examples.extend(generate_for_program(
                program, spec, args.per_program, seed, idx,
                source_id=f"src{idx:05d}"))
    else:
        payloads = [
            ([" ".join(t.text for t in line) for line in program.lines],
             spec.kind, spec.command_template, spec.timeout_ms,
             args.per_program, seed, idx)
            for idx, program in enumerate(kept)]
        examples = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for records in pool.map(_gen_worker, payloads):
                examples.extend(RepairExample.from_record(r) for r in records)
    count = write_dataset(examples, args.out)
    manifest = DatasetManifest(
        source_corpus_id=str(args.corpus), evaluator_kind=spec.kind,
        seed=seed, per_program_target=args.per_program,
        counts={"examples": count, "source_programs": len(kept)},
        config=_effective_config(args, config, spec))
    manifest.write(str(args.out) + ".manifest.json")
    stats = category_stats(ex.feedback for ex in examples)
    print(f"wrote {count} examples from {len(kept)} programs to {args.out}")
    for category, frac in stats.fractions.items():
        print(f"  {category.value:24s} {stats.counts[category]:6d}  {frac:.3f}")
    return EXIT_OK


def cmd_train(args, config):
    spec = _evaluator_spec(args, config)
    seed = int(_setting(args, config, "seed", 0))
    try:
        train_set = read_dataset(args.train)
        dev_set = read_dataset(args.dev) if args.dev else []
    except DatasetFormatError as exc:
        raise CliError(str(exc)) from exc
    model_config = ModelConfig(
        use_graph=not args.no_graph, use_feedback=not args.no_feedback,
        dropout=args.dropout)
    train_config = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
        clip_norm=args.clip_norm, seed=seed,
        log_path=str(args.out) + ".log.jsonl")
    try:
        net, logs = train(train_set, dev_set, model_config, train_config,
                          init_checkpoint=args.init)
    except CheckpointFormatError as exc:
        raise CliError(f"--init checkpoint rejected: {exc}") from exc
    net.save(args.out)
    echo = _effective_config(args, config, spec)
    echo["train"] = train_config.to_dict()
    echo["model"] = net.config.to_dict()
    Path(str(args.out) + ".config.json").write_text(
        json.dumps(echo, indent=1, sort_keys=True))
    if logs:
        last = logs[-1]
        print(f"trained {len(logs)} epochs; final loss {last.train_loss:.4f} "
              f"dev localize {last.dev_localize:.3f} repair {last.dev_repair:.3f}")
    print(f"checkpoint written to {args.out}")
    return EXIT_OK


def _policy_for(args, oracle_source=None):
    if getattr(args, "oracle_gold", None):
        return OracleGoldPolicy(_read_program(args.oracle_gold))
    if getattr(args, "identity", False):
        return IdentityPolicy()
    if not args.ckpt:
        raise CliError("need --ckpt (or --oracle-gold / --identity)")
    return ModelPolicy(_load_network(args.ckpt), beam=getattr(args, "beam", 1))


def cmd_repair(args, config):
    spec = _evaluator_spec(args, config)
    program = _read_program(args.input)
    policy = _policy_for(args)
    outcome = iterative_repair(program, spec, policy,
                               max_attempts=args.max_attempts)
    for i, step in enumerate(outcome.trace, start=1):
        print(f"attempt {i}: line {step.feedback_line}: {step.feedback_message}")
        print(f"  edit line {step.k_hat}: {step.old_line!r} -> {step.new_line!r}")
    print(f"success={outcome.success} attempts={outcome.attempts_used}")
    print(outcome.final_program.to_text())
    return EXIT_OK if outcome.success else EXIT_TASK_FAILURE


def cmd_eval(args, config):
    spec = _evaluator_spec(args, config)
    try:
        dataset = read_dataset(args.dataset)
    except DatasetFormatError as exc:
        raise CliError(str(exc)) from exc
    if args.identity:
        policy = IdentityPolicy()
    else:
        policy = ModelPolicy(_load_network(args.ckpt)) if args.ckpt else None
        if policy is None:
            raise CliError("need --ckpt or --identity")
    report = {"single": eval_single(dataset, policy),
              "by_category": {c.value: m for c, m in
                              eval_by_category(dataset, policy).items()},
              "count": len(dataset)}
    if args.full:
        brokens = [ex.broken for ex in dataset]
        full = eval_full(brokens, spec, policy, max_attempts=args.max_attempts)
        report["full_repair_rate"] = full["full_repair_rate"]
        report["mean_attempts"] = full["mean_attempts"]
    report["effective_config"] = _effective_config(args, config, spec)
    print(json.dumps(report, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_make_tasks(args, config):
    spec = _evaluator_spec(args, config)
    seed = int(_setting(args, config, "seed", 0))
    corpus = _read_corpus_dir(args.corpus)
    records = []
    for idx, gold in enumerate(corpus[:args.count]):
        rng = rng_from(seed, 500, idx)
        pools, _ = make_synthetic_pools(
            gold, args.pool_size, rng, demote_prob=args.demote_prob,
            drop_gold=(idx % 2 == 0) if args.drop_alternate else args.drop_gold,
            spec=spec)
        records.append({
            "gold": gold.line_texts(),
            "pools": [[{"line": " ".join(c.texts), "p": c.p} for c in pool]
                      for pool in pools],
            "seed": seed,
        })
    with open(args.out, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(f"wrote {len(records)} tasks to {args.out}")
    return EXIT_OK


def cmd_search_sim(args, config):
    spec = _evaluator_spec(args, config)
    tasks = []
    try:
        with open(args.tasks) as fh:
            for line in fh:
                if line.strip():
                    tasks.append(json.loads(line))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read tasks {args.tasks}: {exc}") from exc
    if not tasks:
        raise CliError("no tasks found")
    network = _load_network(args.ckpt) if args.ckpt else None
    results = []
    successes = 0
    for task in tasks:
        gold = program_from_lines(task["gold"])
        pools = [[Candidate(tuple(c["line"].split()), float(c["p"]))
                  for c in pool] for pool in task["pools"]]
        if args.mode == "plain":
            out = best_first_search(pools, spec, args.budget, gold=gold)
        else:
            policy = (ModelPolicy(network) if network
                      else OracleGoldPolicy(gold))
            out = repair_augmented_search(pools, spec, policy, args.budget,
                                          gold=gold)
        successes += out.success
        results.append({"success": out.success,
                        "iterations_used": out.iterations_used,
                        "repairs_added": out.repairs_added})
    report = {
        "mode": args.mode, "budget": args.budget, "tasks": len(tasks),
        "success_rate": successes / len(tasks),
        "results": results,
        "effective_config": _effective_config(args, config, spec),
    }
    print(json.dumps(report, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_stats(args, config):
    try:
        dataset = read_dataset(args.dataset)
    except DatasetFormatError as exc:
        raise CliError(str(exc)) from exc
    stats = category_stats(ex.feedback for ex in dataset)
    print(f"{'category':24s} {'count':>8s} {'fraction':>9s}")
    for category, count in stats.counts.items():
        print(f"{category.value:24s} {count:8d} {stats.fractions[category]:9.4f}")
    print(f"{'total':24s} {stats.total:8d} {sum(stats.fractions.values()):9.4f}")
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linefix",
        description="Learned single-line repair of C-like programs from "
                    "compiler diagnostics")
    parser.add_argument(
        "--version", action="version",
        version=(f"linefix {__version__} (dataset format "
                 f"{DATASET_FORMAT_VERSION}, checkpoint format "
                 f"{CHECKPOINT_FORMAT_VERSION}, graph format "
                 f"{GRAPH_FORMAT_VERSION})"))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--evaluator-cmd", default=None,
                       help="external compiler command with one {path} "
                            f"placeholder (default: ${EVALUATOR_CMD_ENV} "
                            "or the built-in checker)")
        p.add_argument("--timeout-ms", type=int, default=None)

    p = sub.add_parser("tokenize", help="dump per-line tokens with kinds")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("graph", help="dump the program-feedback graph")
    p.add_argument("--input", required=True)
    p.add_argument("--no-feedback", action="store_true",
                   help="build a code-only graph without running the evaluator")
    common(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("make-corpus", help="synthesize a compiling mini-corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_make_corpus)

    p = sub.add_parser("gen-data", help="corrupt a corpus into a repair dataset")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-program", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train or fine-tune a repair model")
    p.add_argument("--train", required=True)
    p.add_argument("--dev")
    p.add_argument("--init", help="checkpoint to fine-tune from")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=25)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--clip-norm", type=float, default=1.0)
    p.add_argument("--dropout", type=float, default=0.3)
    p.add_argument("--no-graph", action="store_true",
                   help="replace graph attention with per-token layers")
    p.add_argument("--no-feedback", action="store_true",
                   help="zero the compiler-message inputs")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("repair", help="iteratively repair one program")
    p.add_argument("--input", required=True)
    p.add_argument("--ckpt")
    p.add_argument("--oracle-gold", help="original program file (oracle policy)")
    p.add_argument("--identity", action="store_true")
    p.add_argument("--max-attempts", type=int, default=5)
    p.add_argument("--beam", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("eval", help="evaluate a policy on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--ckpt")
    p.add_argument("--identity", action="store_true")
    p.add_argument("--full", action="store_true",
                   help="also run iterative full repair over the dataset")
    p.add_argument("--max-attempts", type=int, default=5)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("make-tasks", help="build synthesis-search task records")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--pool-size", type=int, default=4)
    p.add_argument("--demote-prob", type=float, default=0.5)
    p.add_argument("--drop-gold", action="store_true")
    p.add_argument("--drop-alternate", action="store_true",
                   help="drop the gold piece on every other task")
    common(p)
    p.set_defaults(func=cmd_make_tasks)

    p = sub.add_parser("search-sim", help="run synthesis search over tasks")
    p.add_argument("--tasks", required=True)
    p.add_argument("--ckpt", help="repair model (default: gold oracle)")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--mode", choices=("plain", "repair"), required=True)
    common(p)
    p.set_defaults(func=cmd_search_sim)

    p = sub.add_parser("stats", help="error-category breakdown of a dataset")
    p.add_argument("--dataset", required=True)
    common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(getattr(args, "config", None))
        return args.func(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except EvaluatorUnavailable as exc:
        print(f"error: evaluator unavailable: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR


if __name__ == "__main__":
    sys.exit(main())
