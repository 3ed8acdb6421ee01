"""Command-line surface: generate data, train, evaluate and render models.

Subcommands: ``train``, ``eval`` (outlier / classify), ``gen``, ``render``.
Every successful run writes a ``<output>.manifest.json`` recording the
command, config, seed, input hashes and timing, so results are replayable.
Exit codes: 0 success, 1 data/runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from dataclasses import asdict

from ._util import atomic_write_text, sha256_file
from .data import (
    SYNTHETIC_KINDS,
    SyntheticSpec,
    build_mnist8,
    gen_synthetic,
    load_csv,
    load_model_document,
    normalize,
    save_csv,
    save_model,
)
from .errors import EslError
from .evolution import EvolutionConfig, evolve
from .fitness import FitnessConfig
from .model import Dataset, encode
from .render import render_svg
from .tasks import classify_benchmark, fit_multiclass_with_history, outlier_benchmark


def _add_hyper_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("hyperparameters")
    group.add_argument("--beta", type=float, default=0.05, help="compactness regulator")
    group.add_argument("--gamma", type=float, default=10.0, help="content offset in the fitness log")
    group.add_argument("--pop", type=int, default=10, help="population size")
    group.add_argument("--gens", type=int, default=5, help="generations")
    group.add_argument("--children", type=int, default=2, help="mutated children per survivor")
    group.add_argument("--breed-pairs", type=int, default=5, help="bred children per generation")
    group.add_argument("--kmeans-k", type=int, default=4, help="initial k for high-dimensional init")
    group.add_argument("--kmeans-dim-threshold", type=int, default=16,
                       help="dimensions above this use k-means initialization")
    group.add_argument("--jitter", type=float, default=0.01,
                       help="vertex jitter scale (normalized units)")


def _config_from(args) -> EvolutionConfig:
    return EvolutionConfig(
        population_size=args.pop,
        generations=args.gens,
        children_per_parent=args.children,
        breed_pairs=args.breed_pairs,
        kmeans_k_init=args.kmeans_k,
        kmeans_dim_threshold=args.kmeans_dim_threshold,
        vertex_jitter=args.jitter,
        seed=args.seed,
        fitness=FitnessConfig(beta=args.beta, gamma=args.gamma),
    )


def _write_manifest(anchor_path: str, payload: dict) -> None:
    atomic_write_text(anchor_path + ".manifest.json", json.dumps(payload, indent=2) + "\n")


def _manifest(command: str, args, cfg, inputs: list[str], outputs: list[str],
              started: float, extra: dict) -> dict:
    return {
        "command": command,
        "argv": sys.argv[1:],
        "config": asdict(cfg) if cfg is not None else None,
        "seed": getattr(args, "seed", None),
        "input_hashes": {p: sha256_file(p) for p in inputs},
        "outputs": outputs,
        "wall_clock_sec": round(time.monotonic() - started, 3),
        **extra,
    }


def cmd_train(args) -> int:
    started = time.monotonic()
    cfg = _config_from(args)
    data = load_csv(args.data, has_labels=args.labels)
    norm_data, spec = normalize(data.without_labels(), mode=args.norm)
    meta = {"beta": cfg.fitness.beta, "gamma": cfg.fitness.gamma, "seed": cfg.seed}
    outputs = []
    histories: dict[str, list[float]] = {}
    if args.labels:
        labeled = Dataset(norm_data.points, data.labels)
        multi, class_histories = fit_multiclass_with_history(labeled, cfg)
        os.makedirs(args.out, exist_ok=True)
        for label in multi.labels:
            model = multi.class_models[label]
            path = os.path.join(args.out, f"class_{label}.json")
            save_model(model, path, normalization=spec, meta=meta)
            outputs.append(path)
            histories[f"class_{label}"] = class_histories[label]
            _, sse = encode(labeled.subset(labeled.labels == label).without_labels(), model)
            print(f"class {label}: fitness={class_histories[label][-1]:.6f} SSE={sse:.6g} "
                  f"simplices={model.simplex_count}")
        anchor = os.path.join(args.out, "train")
    else:
        best, history = evolve(norm_data, cfg)
        save_model(best, args.out, normalization=spec, meta=meta)
        outputs.append(args.out)
        histories["model"] = history
        _, sse = encode(norm_data, best)
        print(f"final fitness={history[-1]:.6f} SSE={sse:.6g} "
              f"simplices={best.simplex_count} vertices={best.vertex_count}")
        anchor = args.out
    _write_manifest(anchor, _manifest("train", args, cfg, [args.data], outputs, started,
                                      {"fitness_history": histories}))
    return 0


def cmd_eval(args) -> int:
    started = time.monotonic()
    cfg = _config_from(args)
    data = load_csv(args.data, has_labels=True)
    inputs = [args.data]
    if args.mode == "outlier":
        report = outlier_benchmark(data, cfg, runs=args.runs, train_frac=args.train_frac)
        metrics = [
            {
                "metric": "auc_roc",
                "runs": [r["auc_roc"] for r in report.per_run_scores],
                "mean": report.auc_roc,
                "stdev": report.stdev("auc_roc"),
            },
            {
                "metric": "precision_at_n",
                "runs": [r["precision_at_n"] for r in report.per_run_scores],
                "mean": report.precision_at_n,
                "stdev": report.stdev("precision_at_n"),
            },
        ]
    else:
        test = load_csv(args.test, has_labels=True) if args.test else None
        if test is not None:
            inputs.append(args.test)
        accuracies = classify_benchmark(data, cfg, runs=args.runs,
                                        train_frac=args.train_frac, test_data=test)
        metrics = [
            {
                "metric": "accuracy",
                "runs": accuracies,
                "mean": float(statistics.mean(accuracies)),
                "stdev": float(statistics.pstdev(accuracies)) if len(accuracies) > 1 else 0.0,
            }
        ]
    if args.json:
        print(json.dumps(metrics, indent=2))
    else:
        for m in metrics:
            print(f"{m['metric']:>16}: mean={m['mean']:.4f} stdev={m['stdev']:.4f} "
                  f"({len(m['runs'])} runs)")
    outputs = []
    if args.out:
        atomic_write_text(args.out, json.dumps(metrics, indent=2) + "\n")
        outputs.append(args.out)
    anchor = args.out if args.out else f"esl-eval-{args.mode}"
    _write_manifest(anchor, _manifest(f"eval-{args.mode}", args, cfg, inputs,
                                      outputs, started, {"metrics": metrics}))
    return 0


def cmd_gen(args) -> int:
    started = time.monotonic()
    inputs = []
    if args.kind == "mnist8":
        if not args.source:
            raise EslError("--source is required for kind 'mnist8'")
        source = load_csv(args.source, has_labels=False)
        data = build_mnist8(source, scale=args.scale)
        inputs.append(args.source)
    else:
        spec = SyntheticSpec(kind=args.kind, n_per_class=args.n,
                             noise=args.noise, seed=args.seed)
        data = gen_synthetic(spec)
    save_csv(data, args.out)
    print(f"wrote {data.n_samples} samples ({data.dim}-D, "
          f"{len(set(data.labels.tolist()))} classes) to {args.out}")
    _write_manifest(args.out, _manifest("gen", args, None, inputs, [args.out], started, {}))
    return 0


def cmd_render(args) -> int:
    started = time.monotonic()
    models = [load_model_document(p)[0] for p in args.model]
    data = load_csv(args.data, has_labels=args.labels) if args.data else None
    svg = render_svg(models, data, width=args.width, height=args.height)
    atomic_write_text(args.out, svg)
    print(f"wrote {args.out}")
    inputs = list(args.model) + ([args.data] if args.data else [])
    _write_manifest(args.out, _manifest("render", args, None, inputs, [args.out], started, {}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esl",
        description="Fit bounded unions of simplices to data by evolutionary search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a one-class or multi-class model")
    p_train.add_argument("--data", required=True, help="input CSV")
    p_train.add_argument("--labels", action="store_true",
                         help="last CSV column holds labels; train one model per class")
    p_train.add_argument("--out", required=True,
                         help="model file (one-class) or directory (multi-class)")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--norm", choices=("minmax", "zscore"), default="minmax")
    _add_hyper_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="run a repeated-split evaluation protocol")
    p_eval.add_argument("mode", choices=("outlier", "classify"))
    p_eval.add_argument("--data", required=True, help="labeled input CSV")
    p_eval.add_argument("--test", help="optional labeled test CSV (classify only)")
    p_eval.add_argument("--runs", type=int, default=10)
    p_eval.add_argument("--train-frac", type=float, default=0.6)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--json", action="store_true", help="print the JSON report")
    p_eval.add_argument("--out", help="write the JSON report here")
    _add_hyper_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_gen = sub.add_parser("gen", help="generate a synthetic benchmark CSV")
    p_gen.add_argument("--kind", required=True, choices=SYNTHETIC_KINDS + ("mnist8",))
    p_gen.add_argument("--n", type=int, default=500, help="samples per class")
    p_gen.add_argument("--noise", type=float, default=0.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--source", help="source pixel CSV (mnist8 only)")
    p_gen.add_argument("--scale", type=float, default=0.25, help="pale dimming factor (mnist8)")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_render = sub.add_parser("render", help="draw 2-D models as SVG")
    p_render.add_argument("--model", required=True, nargs="+", help="model JSON file(s)")
    p_render.add_argument("--data", help="optional CSV scatter underlay")
    p_render.add_argument("--labels", action="store_true",
                          help="the underlay CSV carries labels")
    p_render.add_argument("--width", type=int, default=640)
    p_render.add_argument("--height", type=int, default=640)
    p_render.add_argument("--out", required=True)
    p_render.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
