"""
Command-line tool: ``phonoseq {extract,classify,evaluate,generate}``.

Exit codes: 0 success, 1 usage or config error, 2 data error, 3 partial
success (some speakers abstained).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from .classifier import GLOBAL, LOCAL, classify_global, classify_local, collect_observations
from .config import ConfigError, RunConfig, load_config
from .corpus import format_corpus, partition_by_language, read_corpus
from .counting import build_count_table, format_count_table
from .errors import NoEvidenceError, PhonoseqError, SpecError
from .evaluation import evaluate_modes, format_json_report, format_text_report, json_number
from .extraction import extract_sets
from .model import SequenceModel, read_model, write_model
from .syngen import format_spec, generate, paper_shaped_spec, parse_spec

log = logging.getLogger("phonoseq")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_model_options(p):
    g = p.add_argument_group("model parameters (override --config)")
    g.add_argument("--alpha", type=float, help="discriminant factor (default 4)")
    g.add_argument("--max-p", type=int, dest="max_p", help="maximum sequence length (default 3)")
    g.add_argument("--min-count", type=float, dest="min_count_per_speaker",
                   help="minimum occurrences per speaker (default 50)")
    g.add_argument("--sentences-per-speaker", type=int, dest="sentences_per_speaker",
                   help="sentences per speaker used to scale --min-count (default 100)")
    g.add_argument("--max-sequences", type=int, dest="max_sequences_per_language",
                   help="cap on sequences per language (default 30)")
    g.add_argument("--epsilon", type=float, help="additive smoothing on posteriors (default 1e-6)")
    g.add_argument("--no-overlap", dest="overlap", action="store_const", const=False,
                   help="count non-overlapping occurrences only")


def _add_decision_options(p, modes):
    p.add_argument("--mode", choices=modes, help="decision rule")
    p.add_argument("--beta", type=float, help="local-rule pruning factor (default 2.5)")
    p.add_argument("--no-prior", dest="include_prior", action="store_const", const=False,
                   help="drop the prior-correction term from scores")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phonoseq", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract discriminative sequences and write a model file")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--dump-counts", metavar="DIR", help="write per-language count tables here")
    _add_model_options(p)

    p = sub.add_parser("classify", help="classify each speaker of a transcription file")
    p.add_argument("model")
    p.add_argument("transcriptions")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    _add_decision_options(p, (GLOBAL, LOCAL))

    p = sub.add_parser("evaluate", help="leave-one-out evaluation with confusion matrices")
    p.add_argument("corpus")
    p.add_argument("--report", metavar="PREFIX", help="write PREFIX.txt and PREFIX.json")
    p.add_argument("--no-loo", dest="loo", action="store_false",
                   help="train once on the whole corpus (closed-loop check)")
    _add_model_options(p)
    _add_decision_options(p, (GLOBAL, LOCAL, "both"))  # default: both

    p = sub.add_parser("generate", help="generate a synthetic corpus")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("spec", nargs="?", help="generation spec file")
    src.add_argument("--paper-shaped", action="store_true",
                     help="built-in 4-language 31/20/20/10 spec")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--rate", type=float, default=1.0, help="signature rate for --paper-shaped")
    p.add_argument("--print-spec", action="store_true", help="print the spec instead of a corpus")
    p.add_argument("-o", "--output", help="corpus file to write instead of stdout")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    keys = ("alpha", "max_p", "min_count_per_speaker", "sentences_per_speaker",
            "max_sequences_per_language", "epsilon", "overlap", "beta", "include_prior", "seed")
    cfg = cfg.updated(**{k: getattr(args, k, None) for k in keys})
    if args.command == "classify":
        cfg = cfg.updated(mode=args.mode)
    return cfg


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_extract(args, cfg: RunConfig) -> int:
    corpus = read_corpus(args.corpus)
    if len(corpus.languages) < 2:
        raise PhonoseqError(f"{args.corpus}: extraction needs at least 2 languages, found {len(corpus.languages)}")
    ext = cfg.extraction()
    parts = partition_by_language(corpus)
    tables = [build_count_table(lang, parts[lang], ext.max_p, ext.overlap) for lang in corpus.languages]
    if args.dump_counts:
        os.makedirs(args.dump_counts, exist_ok=True)
        for t in tables:
            _write(format_count_table(t), os.path.join(args.dump_counts, f"{t.language}.counts"))
    sets = extract_sets(tables, ext)
    model = SequenceModel.from_tables(tables, sets, cfg.epsilon, ext.overlap)
    write_model(model, args.output)
    for s in sets:
        log.info("%s: %d sequences", s.language, len(s))
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    model = read_model(args.model)
    corpus = read_corpus(args.transcriptions)
    mode = cfg.mode if cfg.mode in (GLOBAL, LOCAL) else GLOBAL
    records = []
    for spk in corpus.speakers:
        obs = collect_observations(model, spk.utterances)
        rec = {"speaker": spk.speaker_id, "language": spk.language, "mode": mode,
               "cardinalities": obs.cardinalities(), "observed": len(obs)}
        try:
            if mode == GLOBAL:
                res = classify_global(model, obs, cfg.include_prior)
            else:
                res = classify_local(model, obs, cfg.beta, cfg.include_prior)
            rec.update(decision=res.decision, scores=res.scores,
                       ignored=[l for l in model.languages if l in res.ignored])
        except NoEvidenceError:
            rec.update(decision=None, scores={}, ignored=[])
        records.append(rec)

    if args.format == "json":
        for r in records:
            r["scores"] = {k: json_number(v) for k, v in r["scores"].items()}
        text = json.dumps({"mode": mode, "beta": cfg.beta, "speakers": records}, indent=1) + "\n"
    else:
        lines = []
        for r in records:
            decision = r["decision"] if r["decision"] is not None else "ABSTAIN"
            scores = " ".join(f"{k}={v!r}" for k, v in r["scores"].items())
            cards = " ".join(f"{k}:{v}" for k, v in r["cardinalities"].items())
            line = f"{r['speaker']}\t{r['language']}\t{decision}\t{mode}\tobs={r['observed']} [{cards}]\t{scores}"
            if r["ignored"]:
                line += "\tignored=" + ",".join(r["ignored"])
            lines.append(line)
        text = "".join(l + "\n" for l in lines)
    _write(text, args.output)
    return EXIT_PARTIAL if any(r["decision"] is None for r in records) else EXIT_OK


def cmd_evaluate(args, cfg: RunConfig) -> int:
    corpus = read_corpus(args.corpus)
    mode = args.mode or "both"
    modes = (GLOBAL, LOCAL) if mode == "both" else (mode,)
    results = evaluate_modes(corpus, cfg.extraction(), modes, cfg.beta, cfg.epsilon,
                             cfg.include_prior, loo=args.loo)
    text = format_text_report(results)
    if args.report:
        _write(text, args.report + ".txt")
        _write(format_json_report(results), args.report + ".json")
    sys.stdout.write(text)
    partial = any(sum(r.matrix.abstentions) for r in results.values())
    return EXIT_PARTIAL if partial else EXIT_OK


def cmd_generate(args, cfg: RunConfig) -> int:
    if args.paper_shaped:
        spec = paper_shaped_spec(seed=args.seed if args.seed is not None else cfg.seed, rate=args.rate)
    else:
        with open(args.spec, encoding="utf-8") as fh:
            spec = parse_spec(fh.read(), source=args.spec)
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
    if args.print_spec:
        _write(format_spec(spec), args.output)
        return EXIT_OK
    _write(format_corpus(generate(spec)), args.output)
    return EXIT_OK


COMMANDS = {"extract": cmd_extract, "classify": cmd_classify,
            "evaluate": cmd_evaluate, "generate": cmd_generate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"phonoseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, SpecError) as exc:
        print(f"phonoseq: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PhonoseqError, OSError) as exc:
        print(f"phonoseq: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
