"""Command line surface.

Subcommands: train, parse, chunk, evaluate, crossval, extract-chunks,
serve.  Every flag can also come from a JSON config file (--config, a
flat object keyed by flag name with dashes as underscores); explicitly
passed flags win over config-file values.

Input for parse/chunk is one item per line, tokens separated by
whitespace; a token is either a bare POS tag or word/POS (split at the
last slash).  parse treats each line as one marked span, chunk treats
each line as a whole sentence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from .codec import decode_tags, encode_tree
from .corpus import (
    extract_chunks,
    format_tagged,
    format_tree,
    load_corpus,
    make_folds,
    read_tagged,
    save_corpus,
)
from .decoder import StateInventory, decode_sequence, decode_span
from .errors import ChunkletError
from .estimators import InterpolatedPartialParser, MaxentPartialParser
from .evaluation import (
    evaluate_corpus,
    evaluate_predictor,
    format_percent,
    learning_curve,
    mean_of_reports,
)
from .features import load_patterns
from .model_io import ParserModel, load_model, save_model
from .trees import validate_tree

PROG = "chunklet"


@dataclass
class RunConfig:
    """One resolved command invocation."""

    command: str
    corpus: Optional[str] = None
    gold: Optional[str] = None
    pred: Optional[str] = None
    input: str = "-"
    output: str = "-"
    model: Optional[str] = None
    format: str = "bracketed"
    out_format: str = "trees"
    source: Optional[str] = None
    mode: str = "chunking"
    iterations: int = 3
    cutoff: int = 1
    tolerance: float = 1e-4
    patterns: Optional[str] = None
    folds: int = 10
    seed: int = 0
    curve: Optional[str] = None
    curve_out: Optional[str] = None
    port: int = 8311
    allow_write: Optional[str] = None

    def require_files(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if value in (None, "-"):
                continue
            if not Path(value).exists():
                raise ChunkletError(f"{name} file not found: {value}")


_FIELDS = {f.name for f in RunConfig.__dataclass_fields__.values()}


def _read_config_file(path: str, command: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ChunkletError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ChunkletError(f"config file {path} must hold a JSON object")
    out = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name == "command":
            raise ChunkletError("config file cannot choose the command")
        if name not in _FIELDS:
            raise ChunkletError(f"config file {path}: unknown option {key!r}")
        out[name] = value
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Partial parser over structural tags: train, decode, evaluate.",
    )
    parser.add_argument(
        "--config",
        help="JSON file with default option values; explicit flags win",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        return p

    p = add("train", "fit a model on a treebank and write a model file")
    p.add_argument("--corpus", required=True, help="training treebank")
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--format", choices=("bracketed", "columnar"), help="corpus format (default bracketed)")
    p.add_argument("--source", choices=("maxent", "interpolation"), help="probability source to train (default maxent)")
    p.add_argument("--iterations", type=int, help="scaling updates (default 3)")
    p.add_argument("--cutoff", type=int, help="minimum feature count (default 1)")
    p.add_argument("--tolerance", type=float, help="residual convergence threshold (default 1e-4)")
    p.add_argument("--patterns", help="feature pattern file (default: built-in 22)")
    p.add_argument("--mode", choices=("chunking", "treebank"), help="train on sentences or extracted chunks (default chunking)")

    for name, help_text in (
        ("parse", "decode spans, one per line, with internal structure"),
        ("chunk", "decode sentences, one per line, into chunks"),
    ):
        p = add(name, help_text)
        p.add_argument("--model", required=True, help="model file")
        p.add_argument("--input", help="input file, '-' for stdin (default)")
        p.add_argument("--output", help="output file, '-' for stdout (default)")
        p.add_argument("--source", choices=("maxent", "interpolation"), help="probability source (default: as trained)")
        p.add_argument("--out-format", dest="out_format", choices=("trees", "tags"), help="bracketed trees or columnar tags (default trees)")

    p = add("evaluate", "compare a prediction corpus against gold")
    p.add_argument("--gold", required=True, help="gold corpus")
    p.add_argument("--pred", required=True, help="prediction corpus")
    p.add_argument("--format", choices=("bracketed", "columnar"), help="corpus format (default bracketed)")
    p.add_argument("--mode", choices=("chunking", "treebank"), help="report layout (default chunking)")

    p = add("crossval", "k-fold cross-validation, optional learning curve")
    p.add_argument("--corpus", required=True, help="treebank")
    p.add_argument("--format", choices=("bracketed", "columnar"), help="corpus format (default bracketed)")
    p.add_argument("--folds", type=int, help="fold count (default 10)")
    p.add_argument("--seed", type=int, help="shuffle seed (default 0)")
    p.add_argument("--source", choices=("maxent", "interpolation"), help="probability source (default maxent)")
    p.add_argument("--iterations", type=int, help="scaling updates (default 3)")
    p.add_argument("--cutoff", type=int, help="minimum feature count (default 1)")
    p.add_argument("--tolerance", type=float, help="residual convergence threshold (default 1e-4)")
    p.add_argument("--patterns", help="feature pattern file")
    p.add_argument("--mode", choices=("chunking", "treebank"), help="evaluation mode (default chunking)")
    p.add_argument("--curve", help="comma-separated training sizes for a learning-curve sweep")
    p.add_argument("--curve-out", dest="curve_out", help="file for the two-column curve table (default stdout)")

    p = add("extract-chunks", "harvest chunk subtrees from a treebank")
    p.add_argument("--input", required=True, help="treebank file")
    p.add_argument("--output", required=True, help="chunk corpus file")
    p.add_argument("--format", choices=("bracketed", "columnar"), help="input format (default bracketed)")
    p.add_argument("--out-format", dest="out_format", choices=("bracketed", "columnar"), help="output format (default columnar)")

    p = add("serve", "start the annotation HTTP server")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--port", type=int, help="TCP port (default 8311)")
    p.add_argument("--allow-write", dest="allow_write", help="enable POST /v1/save appending to this columnar file")

    return parser


def _resolve(argv: Sequence[str] | None) -> RunConfig:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    values = {k: v for k, v in vars(namespace).items() if k not in ("config", "command")}
    command = namespace.command
    merged: dict = {}
    if getattr(namespace, "config", None):
        merged.update(_read_config_file(namespace.config, command))
    merged.update(values)
    if command == "extract-chunks" and "out_format" not in merged:
        merged["out_format"] = "columnar"
    try:
        return RunConfig(command=command, **merged)
    except TypeError as exc:
        raise ChunkletError(f"bad option for {command}: {exc}") from exc


# ----------------------------------------------------------------- commands

def _load_trees(path: str, format: str) -> list:
    corpus = load_corpus(path, format=format)
    return list(corpus)


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def cmd_train(cfg: RunConfig) -> int:
    cfg.require_files("corpus", "patterns")
    trees = _load_trees(cfg.corpus, cfg.format)
    source = cfg.source or "maxent"
    patterns = load_patterns(cfg.patterns) if cfg.patterns else None

    interp = InterpolatedPartialParser(mode=cfg.mode).fit(trees)
    maxent = None
    if source == "maxent":
        maxent = MaxentPartialParser(
            iterations=cfg.iterations,
            cutoff=cfg.cutoff,
            tolerance=cfg.tolerance,
            patterns=patterns,
            mode=cfg.mode,
        ).fit(trees)

    feature_count = maxent.feature_count_ if maxent else 0
    print(f"features: {feature_count}")
    if maxent:
        lls = maxent.train_result_.log_likelihoods
        print(f"initial log-likelihood {lls[0]:.6f}")
        for i, ll in enumerate(lls[1:], start=1):
            print(f"iteration {i}: log-likelihood {ll:.6f}")
        if feature_count == 0:
            print(
                f"warning: cutoff {cfg.cutoff} removed every feature; "
                "the model is uniform",
                file=sys.stderr,
            )
    lam = interp.lambdas_
    print(f"lambdas: {lam[0]:.6f} {lam[1]:.6f} {lam[2]:.6f}")

    bundle = ParserModel(
        inventory=interp.inventory_,
        maxent=maxent.model_ if maxent else None,
        interpolation=interp.model_,
        metadata={
            "source": source,
            "mode": cfg.mode,
            "iterations": cfg.iterations if maxent else 0,
            "cutoff": cfg.cutoff,
            "updates": maxent.train_result_.updates if maxent else 0,
            "converged": maxent.train_result_.converged if maxent else True,
        },
    )
    save_model(bundle, cfg.model)
    print(f"model written to {cfg.model}")
    return 0


def _parse_token(token: str) -> tuple[str, Optional[str]]:
    if "/" in token:
        word, _, pos = token.rpartition("/")
        if word and pos:
            return pos, word
    return token, None


def _read_items(path: str) -> list[tuple[list[str], Optional[list[str]]]]:
    if path == "-":
        text = sys.stdin.read()
    else:
        text = Path(path).read_text(encoding="utf-8")
    items = []
    for line in text.splitlines():
        if not line.strip():
            continue
        pos_tags: list[str] = []
        words: list[Optional[str]] = []
        for token in line.split():
            pos, word = _parse_token(token)
            pos_tags.append(pos)
            words.append(word)
        kept = None if all(w is None for w in words) else [w or "_" for w in words]
        items.append((pos_tags, kept))
    return items


def _cmd_decode(cfg: RunConfig, spans: bool) -> int:
    cfg.require_files("model", "input")
    model = load_model(cfg.model)
    scorer = model.scorer(cfg.source)
    decode = decode_span if spans else decode_sequence
    sequences = []
    for pos_tags, words in _read_items(cfg.input):
        seq, _ = decode(pos_tags, model.inventory, scorer, words)
        sequences.append(seq)
    if cfg.out_format == "tags":
        text = format_tagged(sequences)
    else:
        lines = []
        for seq in sequences:
            tree = decode_tags(seq.tags, seq.words).tree
            validate_tree(tree)
            lines.append(format_tree(tree))
        text = "".join(line + "\n" for line in lines)
    _emit(text, cfg.output)
    return 0


def cmd_parse(cfg: RunConfig) -> int:
    return _cmd_decode(cfg, spans=True)


def cmd_chunk(cfg: RunConfig) -> int:
    return _cmd_decode(cfg, spans=False)


def _load_aligned(path: str, format: str):
    """Trees plus tag sequences for one side of an evaluation."""
    if format == "columnar":
        sequences = read_tagged(path)
        trees = [decode_tags(seq.tags, seq.words).tree for seq in sequences]
        return trees, [seq.tags for seq in sequences]
    trees = _load_trees(path, format)
    return trees, [encode_tree(t).tags for t in trees]


def cmd_evaluate(cfg: RunConfig) -> int:
    cfg.require_files("gold", "pred")
    gold_trees, gold_tags = _load_aligned(cfg.gold, cfg.format)
    pred_trees, pred_tags = _load_aligned(cfg.pred, cfg.format)
    report = evaluate_corpus(
        gold_trees, pred_trees, gold_tags, pred_tags, mode=cfg.mode
    )
    print(report.render_table())
    print()
    print(report.render_keyvalues())
    return 0


def _build_predictor_factory(cfg: RunConfig) -> Callable:
    source = cfg.source or "maxent"
    patterns = load_patterns(cfg.patterns) if cfg.patterns else None

    def build(train_trees):
        if source == "maxent":
            est = MaxentPartialParser(
                iterations=cfg.iterations,
                cutoff=cfg.cutoff,
                tolerance=cfg.tolerance,
                patterns=patterns,
                mode=cfg.mode,
            ).fit(train_trees)
        else:
            est = InterpolatedPartialParser(mode=cfg.mode).fit(train_trees)
        return est.predict_one

    return build


def cmd_crossval(cfg: RunConfig) -> int:
    cfg.require_files("corpus", "patterns")
    if cfg.folds < 2:
        raise ChunkletError("crossval needs at least 2 folds")
    trees = _load_trees(cfg.corpus, cfg.format)
    source = cfg.source or "maxent"
    build = _build_predictor_factory(cfg)
    print(
        f"crossval: folds={cfg.folds} seed={cfg.seed} source={source} "
        f"mode={cfg.mode} sentences={len(trees)}"
    )
    plan = make_folds(len(trees), cfg.folds, cfg.seed)
    reports = []
    for f in range(cfg.folds):
        train_idx, test_idx = plan.fold(f)
        predictor = build([trees[i] for i in train_idx])
        report = evaluate_predictor(
            predictor, [trees[i] for i in test_idx], mode=cfg.mode
        )
        reports.append(report)
        print()
        print(f"fold {f + 1}/{cfg.folds}")
        print(report.render_table())
    print()
    print(mean_of_reports(reports).render_table())

    if cfg.curve:
        try:
            sizes = [int(s) for s in cfg.curve.split(",") if s.strip()]
        except ValueError as exc:
            raise ChunkletError(f"bad --curve value {cfg.curve!r}") from exc
        train_idx, test_idx = plan.fold(0)
        rows = learning_curve(
            [trees[i] for i in train_idx],
            [trees[i] for i in test_idx],
            build,
            sizes,
            mode=cfg.mode,
        )
        table = "".join(f"{size}\t{format_percent(acc)}\n" for size, acc in rows)
        if cfg.curve_out:
            Path(cfg.curve_out).write_text(table, encoding="utf-8")
            print(f"\nlearning curve written to {cfg.curve_out}")
        else:
            print("\nsize\ttags-accuracy")
            print(table, end="")
    return 0


def cmd_extract_chunks(cfg: RunConfig) -> int:
    cfg.require_files("input")
    corpus = load_corpus(cfg.input, format=cfg.format)
    chunks = extract_chunks(corpus)
    save_corpus(chunks, cfg.output, format=cfg.out_format)
    print(f"{len(chunks)} chunks written to {cfg.output}")
    return 0


def cmd_serve(cfg: RunConfig) -> int:
    from . import server

    cfg.require_files("model")
    return server.run(cfg.model, port=cfg.port, allow_write=cfg.allow_write)


_COMMANDS = {
    "train": cmd_train,
    "parse": cmd_parse,
    "chunk": cmd_chunk,
    "evaluate": cmd_evaluate,
    "crossval": cmd_crossval,
    "extract-chunks": cmd_extract_chunks,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = _resolve(argv)
        return _COMMANDS[cfg.command](cfg)
    except ChunkletError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
