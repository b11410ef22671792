"""Command line interface: run experiments, synthesize and validate corpora."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .corpus import CorpusError, load_corpus, save_corpus, synth_corpus
from .harness import (
    ConfigError,
    convergence_report,
    emit_outputs,
    load_experiment_config,
    resolve_out_dir,
    run_experiment,
)


def _cmd_run(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed_offset:
        from dataclasses import replace

        config = replace(config, seeds=tuple(s + args.seed_offset for s in config.seeds))
    out_dir = resolve_out_dir(config, args.out)
    result = run_experiment(config, jobs=args.jobs)
    paths = emit_outputs(result, out_dir)
    for p in paths:
        print(f"wrote {p}")
    if config.experiment in ("convergence", "budget_convergence"):
        report = convergence_report(result)
        lines = {}
        for (scheme, t, budget_w, seed), epoch in report.items():
            label = f"{scheme}" + (f" T={t}" if t is not None else "")
            print(f"convergence epoch [{label} budget={budget_w:g}W seed={seed}]: {epoch}")
            lines[f"{scheme}|{'' if t is None else t}|{budget_w:g}|{seed}"] = epoch
        report_path = Path(out_dir) / "convergence.json"
        report_path.write_text(json.dumps(lines, indent=2, sort_keys=True) + "\n")
        print(f"wrote {report_path}")
    return 0


def _cmd_synth(args) -> int:
    corpus = synth_corpus(args.images, args.triplets, args.seed)
    save_corpus(corpus, args.out)
    print(f"wrote {args.out} ({args.images} records x {args.triplets} triplets)")
    return 0


def _cmd_validate(args) -> int:
    corpus = load_corpus(args.corpus)
    n_triplets = sum(rec.n for rec in corpus.records)
    print(f"{args.corpus}: OK ({len(corpus.records)} records, {n_triplets} triplets, "
          f"provenance={corpus.provenance.kind})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semra",
        description="Semantic-aware power allocation: simulate, optimize, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a TOML experiment config")
    p_run.add_argument("--out", default=None, help="output directory (beats config and env)")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel sweep jobs")
    p_run.add_argument("--seed-offset", type=int, default=0, help="shift every configured seed")
    p_run.set_defaults(func=_cmd_run)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    p_synth.add_argument("--images", type=int, required=True)
    p_synth.add_argument("--triplets", type=int, required=True)
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_val = sub.add_parser("validate", help="validate a corpus JSON file")
    p_val.add_argument("corpus")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
