"""Command-line entry point.

Subcommands: tokenizer train, model train, eval, experiment design-compare,
experiment position-sweep, report, serve.  Exit statuses: 0 success,
1 usage error, 2 data error, 3 runtime failure.  Diagnostics go to stderr;
results go to stdout or --out files.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import corpus as corpus_mod
from . import experiments as exp_mod
from . import predictor as pred_mod
from . import tokenizer as tok_mod
from .corpus import MODE_BACKWARD, MODE_FORWARD, MODE_MIXED
from .engine import TraversalPlan, UiDesign, aggregate, evaluate
from .errors import AekitError, DataError
from .experiments import ExperimentRow, StartPosition, position_index

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_model_flags(p: argparse.ArgumentParser, engine_flags: bool = True) -> None:
    p.add_argument(
        "--model",
        action="append",
        required=True,
        help="predictor bundle file; repeat to combine forward+backward bundles",
    )
    p.add_argument("--vocab", required=True, help="vocabulary file")
    p.add_argument("--top-k", type=int, default=10, help="candidate list size")
    p.add_argument("--max-context", type=int, default=1024)
    if engine_flags:
        p.add_argument(
            "--skip-empty-tokens", action="store_true",
            help="do not count steps whose token strips to nothing",
        )
        p.add_argument(
            "--legacy-cap-to-manual", action="store_true",
            help="cap the arrow+tab selection cost at the manual typing cost",
        )


def build_parser() -> _Parser:
    parser = _Parser(prog="ae", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_tok = sub.add_parser("tokenizer", help="tokenizer commands")
    tok_sub = p_tok.add_subparsers(dest="tokenizer_command", parser_class=_Parser)
    p_tok_train = tok_sub.add_parser("train", help="learn a vocabulary")
    p_tok_train.add_argument("--input", required=True, help="claims JSONL")
    p_tok_train.add_argument("--out", required=True, help="vocabulary file to write")
    p_tok_train.add_argument("--vocab-size", type=int, default=8192)
    p_tok_train.add_argument(
        "--scheme", choices=[tok_mod.SCHEME_BPE, tok_mod.SCHEME_WHITESPACE],
        default=tok_mod.SCHEME_BPE,
    )

    p_model = sub.add_parser("model", help="predictor commands")
    model_sub = p_model.add_subparsers(dest="model_command", parser_class=_Parser)
    p_model_train = model_sub.add_parser("train", help="train an n-gram predictor")
    p_model_train.add_argument("--input", required=True, help="claims JSONL")
    p_model_train.add_argument("--vocab", required=True)
    p_model_train.add_argument("--out", required=True, help="predictor bundle to write")
    p_model_train.add_argument("--order", type=int, default=4)
    p_model_train.add_argument("--discount", type=float, default=0.4)
    p_model_train.add_argument(
        "--direction-mode", choices=["forward", "backward", "mixed"],
        default="forward",
    )
    p_model_train.add_argument("--seed", type=int, default=0)
    p_model_train.add_argument(
        "--eval-fraction", type=float, default=None,
        help="hold out this fraction of records (writes --eval-out)",
    )
    p_model_train.add_argument(
        "--year-cutoff", type=int, default=None,
        help="train on records dated before this year (writes the rest to --eval-out)",
    )
    p_model_train.add_argument("--eval-out", default=None)

    p_eval = sub.add_parser("eval", help="AE evaluation over a claim file")
    p_eval.add_argument("--input", "--data", dest="input", required=True)
    _add_model_flags(p_eval)
    p_eval.add_argument("--design", choices=["legacy", "digit"], default="digit")
    p_eval.add_argument("--direction", choices=["forward", "backward"],
                        default="forward")
    p_eval.add_argument("--start", default=None,
                        help="begin|end|q1|q2|q3|frac:<r> (default: per direction)")
    p_eval.add_argument("--first-leg", choices=["forward", "backward"], default=None)
    p_eval.add_argument("--pooling", choices=["micro", "macro"], default="micro")
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", default=None)
    p_eval.add_argument("--model-tag", default=None)

    p_exp = sub.add_parser("experiment", help="experiment runners")
    exp_sub = p_exp.add_subparsers(dest="experiment_command", parser_class=_Parser)

    p_cmp = exp_sub.add_parser("design-compare", help="legacy vs digit designs")
    p_cmp.add_argument("--input", required=True)
    _add_model_flags(p_cmp)
    p_cmp.add_argument("--direction", action="append", default=None,
                       choices=["forward", "backward"],
                       help="repeatable; default: every supported direction")
    p_cmp.add_argument("--pooling", choices=["micro", "macro"], default="micro")
    p_cmp.add_argument("--jobs", type=int, default=1)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p_cmp.add_argument("--out", default=None)
    p_cmp.add_argument("--model-tag", default=None)

    p_sweep = exp_sub.add_parser("position-sweep", help="Q1/Q2/Q3 starting positions")
    p_sweep.add_argument("--input", required=True)
    _add_model_flags(p_sweep)
    p_sweep.add_argument("--design", choices=["legacy", "digit"], default="digit")
    p_sweep.add_argument("--start", action="append", default=None,
                         help="repeatable; default q1 q2 q3")
    p_sweep.add_argument("--first-leg", action="append", default=None,
                         choices=["forward", "backward"],
                         help="repeatable; default both")
    p_sweep.add_argument("--pooling", choices=["micro", "macro"], default="micro")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--model-tag", default=None)

    p_report = sub.add_parser("report", help="re-render an experiment CSV")
    p_report.add_argument("--input", required=True, help="CSV written by this tool")
    p_report.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    p_report.add_argument("--out", default=None)

    p_serve = sub.add_parser("serve", help="run the autocomplete session server")
    _add_model_flags(p_serve, engine_flags=False)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--model-tag", default="default")

    return parser


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_bundle(args) -> pred_mod.BidirectionalPredictor:
    return pred_mod.merge_predictors([pred_mod.load_predictor(p) for p in args.model])


def _model_tag(args) -> str:
    if getattr(args, "model_tag", None):
        return args.model_tag
    return "+".join(args.model)


def _cmd_tokenizer_train(args) -> int:
    corpus = corpus_mod.read_jsonl(args.input)
    vocab = tok_mod.train_tokenizer(
        corpus_mod.expanded_texts(corpus), args.vocab_size, args.scheme
    )
    tok_mod.save_vocabulary(vocab, args.out)
    print(f"wrote {vocab.scheme} vocabulary ({vocab.size} entries) to {args.out}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_model_train(args) -> int:
    if args.eval_fraction is not None and args.year_cutoff is not None:
        raise UsageError("--eval-fraction and --year-cutoff are mutually exclusive")
    if (args.eval_fraction is not None or args.year_cutoff is not None) and not args.eval_out:
        raise UsageError("held-out evaluation output requires --eval-out")
    corpus = corpus_mod.read_jsonl(args.input)
    vocab = tok_mod.load_vocabulary(args.vocab)
    if args.eval_fraction is not None:
        train_corpus, eval_corpus = corpus_mod.split(
            corpus, args.eval_fraction, args.seed
        )
        # expanded so the held-out file stands alone even when a parent
        # claim landed in the training half
        corpus_mod.write_jsonl(corpus_mod.expand_records(eval_corpus), args.eval_out)
    elif args.year_cutoff is not None:
        train_corpus, eval_corpus = corpus_mod.filter_by_year(corpus, args.year_cutoff)
        corpus_mod.write_jsonl(corpus_mod.expand_records(eval_corpus), args.eval_out)
    else:
        train_corpus = corpus

    mode_map = {
        "forward": MODE_FORWARD,
        "backward": MODE_BACKWARD,
        "mixed": MODE_MIXED,
    }
    sequences = corpus_mod.build_sequences(
        train_corpus, vocab, mode_map[args.direction_mode]
    )
    model = pred_mod.train_ngram(
        sequences, args.order, args.discount, vocab_size=vocab.size
    )
    if args.direction_mode == "forward":
        bundle = pred_mod.BidirectionalPredictor(mode="dual", forward=model)
    elif args.direction_mode == "backward":
        bundle = pred_mod.BidirectionalPredictor(mode="dual", backward=model)
    else:
        bundle = pred_mod.BidirectionalPredictor(mode="mixed", forward=model)
    pred_mod.save_predictor(bundle, args.out)
    print(
        f"trained order-{args.order} {args.direction_mode} predictor on "
        f"{len(train_corpus.records)} claims -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def _eval_plan(start: StartPosition, first_leg: str, token_count: int) -> TraversalPlan:
    return TraversalPlan(position_index(start, token_count), first_leg)


def _cmd_eval(args) -> int:
    corpus = corpus_mod.read_jsonl(args.input)
    vocab = tok_mod.load_vocabulary(args.vocab)
    bp = _load_bundle(args)
    start = StartPosition.parse(
        args.start if args.start else ("begin" if args.direction == "forward" else "end")
    )
    first_leg = args.first_leg or args.direction
    min_tokens = 2 if start.kind in ("begin", "end") else exp_mod.MIN_SWEEP_TOKENS
    design = UiDesign.from_label(args.design)

    claims = [vocab.encode(t) for t in corpus_mod.expanded_texts(corpus)]
    usable = [t for t in claims if len(t) >= min_tokens]
    skipped = len(claims) - len(usable)
    if not usable:
        raise DataError("no claim in the input is long enough to evaluate")

    def _one(tokens):
        plan = _eval_plan(start, first_leg, len(tokens))
        return evaluate(bp, vocab, tokens, plan, design, args.top_k,
                        max_context=args.max_context,
                        skip_empty_tokens=args.skip_empty_tokens,
                        legacy_cap_to_manual=args.legacy_cap_to_manual)

    results = exp_mod._map_ordered(_one, usable, args.jobs)
    agg = aggregate(results, args.pooling)
    row = ExperimentRow(
        model_tag=_model_tag(args),
        direction=args.direction,
        design=design.value,
        start=start.label,
        previous_ratio=None,
        new_ratio=agg.ae_ratio,
        increase=None,
        keys_manual=agg.ledger.keys_manual,
        keys_auto=agg.ledger.keys_auto,
        n_claims=agg.n_results,
        skipped=skipped,
    )
    _write_output(exp_mod.emit_report([row], "csv"), args.out)
    return EXIT_OK


def _cmd_design_compare(args) -> int:
    corpus = corpus_mod.read_jsonl(args.input)
    vocab = tok_mod.load_vocabulary(args.vocab)
    bp = _load_bundle(args)
    directions = args.direction
    if not directions:
        directions = [d for d in ("forward", "backward") if bp.supports(d)]
    rows = exp_mod.run_design_comparison(
        bp, vocab, corpus, directions, args.top_k,
        model_tag=_model_tag(args), pooling=args.pooling,
        max_context=args.max_context, jobs=args.jobs,
        skip_empty_tokens=args.skip_empty_tokens,
        legacy_cap_to_manual=args.legacy_cap_to_manual,
    )
    _write_output(exp_mod.emit_report(rows, args.format), args.out)
    return EXIT_OK


def _cmd_position_sweep(args) -> int:
    corpus = corpus_mod.read_jsonl(args.input)
    vocab = tok_mod.load_vocabulary(args.vocab)
    bp = _load_bundle(args)
    positions = [StartPosition.parse(s) for s in (args.start or ["q1", "q2", "q3"])]
    first_legs = args.first_leg or ["forward", "backward"]
    rows = exp_mod.run_position_sweep(
        bp, vocab, corpus, positions, first_legs,
        UiDesign.from_label(args.design), args.top_k,
        model_tag=_model_tag(args), pooling=args.pooling,
        max_context=args.max_context, jobs=args.jobs,
        skip_empty_tokens=args.skip_empty_tokens,
        legacy_cap_to_manual=args.legacy_cap_to_manual,
    )
    _write_output(exp_mod.emit_report(rows, args.format), args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        rows = exp_mod.parse_report_csv(fh.read())
    _write_output(exp_mod.emit_report(rows, args.format), args.out)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    vocab = tok_mod.load_vocabulary(args.vocab)
    bp = _load_bundle(args)
    app = create_app(
        models={args.model_tag: bp}, vocab=vocab,
        default_k=args.top_k, max_context=args.max_context,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command == "tokenizer":
            if args.tokenizer_command != "train":
                parser.error("usage: ae tokenizer train ...")
            return _cmd_tokenizer_train(args)
        if args.command == "model":
            if args.model_command != "train":
                parser.error("usage: ae model train ...")
            return _cmd_model_train(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "experiment":
            if args.experiment_command == "design-compare":
                return _cmd_design_compare(args)
            if args.experiment_command == "position-sweep":
                return _cmd_position_sweep(args)
            parser.error("usage: ae experiment {design-compare|position-sweep} ...")
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "serve":
            return _cmd_serve(args)
        parser.error("a subcommand is required")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"ae: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"ae: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"ae: file error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AekitError as exc:
        print(f"ae: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
