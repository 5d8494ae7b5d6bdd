"""Command-line front door: generate, train, explain, analyse, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
from pathlib import Path

import numpy as np

from . import export
from .data import Dataset, Instance, load_csv, load_schema_file, save_schema_file, split, write_csv
from .errors import PeerInfluenceError
from .influence import ZERO_POLICIES, alt, calt, conflict_matrix, pi_explanation, pi_graph
from .models import GbdtClassifier, LogisticClassifier, load_model, save_model
from .shapley import EXACT, SAMPLED, Attribution, ExplainerConfig, explain
from .synth import GeneratorConfig, LABEL_COLUMN, generate_synthetic

log = logging.getLogger("peerinfluence")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ENVIRONMENT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peerinfluence",
        description="Peer-influence explanations for tabular classifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset (CSV + schema)")
    p.add_argument("--config", type=Path, help="generator config JSON")
    p.add_argument("--n", type=int, help="number of rows (overrides config)")
    p.add_argument("--seed", type=int, help="generator seed (overrides config)")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--name", default="synthetic", help="output file stem")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a classifier on a CSV dataset")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--schema", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    p.add_argument("--model", choices=("gbdt", "logistic"), default="gbdt")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=60)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--epochs", type=int, default=800)
    p.add_argument("--l2", type=float, default=0.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("explain", help="attribute one instance's prediction")
    _add_instance_args(p)
    p.add_argument("--out", type=Path, help="write the attribution document here")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("pi", help="full peer-influence pipeline for one instance")
    _add_instance_args(p)
    p.add_argument("--zero-policy", choices=ZERO_POLICIES, default="strict")
    p.add_argument("--controllable", help="comma-separated feature names to restrict ALT/CALT")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--no-weight-labels", action="store_true")
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("serve", help="run the what-if REST service")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--schema", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.set_defaults(func=cmd_serve)

    return parser


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", type=Path, required=True, dest="model_path")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--schema", type=Path, required=True)
    p.add_argument("--row", type=int, help="explain this row of the dataset")
    p.add_argument(
        "--set",
        action="append",
        dest="assignments",
        metavar="NAME=VALUE",
        help="inline instance value; repeat once per feature",
    )
    p.add_argument("--backend", choices=(EXACT, SAMPLED), default=EXACT)
    p.add_argument("--permutations", type=int, default=2000)
    p.add_argument("--background-rows", type=int, default=100)
    p.add_argument("--background", choices=("train", "all"), default="train")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)


def _load_dataset(args) -> Dataset:
    schema, label = load_schema_file(args.schema)
    return load_csv(args.data, schema, label)


def _resolve_instance(args, dataset: Dataset) -> Instance:
    if args.row is not None and args.assignments:
        raise ValueError("give either --row or --set values, not both")
    if args.row is not None:
        return dataset.instance(args.row)
    if not args.assignments:
        raise ValueError("an instance is required: --row INDEX or --set NAME=VALUE")
    values = np.empty(dataset.m)
    seen: set[str] = set()
    for item in args.assignments:
        if "=" not in item:
            raise ValueError(f"--set expects NAME=VALUE, got {item!r}")
        name, raw = item.split("=", 1)
        name = name.strip()
        j = dataset.feature_index(name)
        feature = dataset.schema[j]
        if feature.kind == "categorical" and raw in (feature.categories or ()):
            values[j] = feature.encode(raw)
        else:
            values[j] = float(raw)
        seen.add(name)
    missing = [n for n in dataset.feature_names if n not in seen]
    if missing:
        raise ValueError(f"missing values for features {missing}")
    return Instance(values=values)


def _background(args, dataset: Dataset) -> Dataset:
    if args.background == "all":
        return dataset
    train, _ = split(dataset, args.train_fraction, args.seed)
    return train


def _explainer_config(args) -> ExplainerConfig:
    return ExplainerConfig(
        backend=args.backend,
        background_rows=args.background_rows,
        seed=args.seed,
        permutations=args.permutations,
    )


def _controllable_indices(arg: str | None, dataset: Dataset):
    if arg is None:
        return None
    names = [n.strip() for n in arg.split(",") if n.strip()]
    if not names:
        raise ValueError("--controllable given but no feature names parsed")
    return tuple(dataset.feature_index(n) for n in names)


def cmd_synth(args) -> int:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = {}
    if args.n is not None:
        doc["n"] = args.n
    if args.seed is not None:
        doc["seed"] = args.seed
    if "n" not in doc or "seed" not in doc:
        raise ValueError("synth requires --n and --seed (or a config providing them)")
    config = GeneratorConfig.from_dict(doc)
    dataset = generate_synthetic(config)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{args.name}.csv"
    schema_path = args.out / f"{args.name}.schema.json"
    write_csv(dataset, csv_path, LABEL_COLUMN)
    save_schema_file(schema_path, dataset.schema, LABEL_COLUMN)
    prevalence = float(dataset.labels.mean())
    print(f"wrote {csv_path} and {schema_path} (n={dataset.n}, label prevalence {prevalence:.3f})")
    return EXIT_OK


def cmd_train(args) -> int:
    dataset = _load_dataset(args)
    train, test = split(dataset, args.train_fraction, args.seed)
    if args.model == "gbdt":
        lr = 0.2 if args.learning_rate is None else args.learning_rate
        model = GbdtClassifier(
            rounds=args.rounds,
            max_depth=args.max_depth,
            learning_rate=lr,
            min_leaf=args.min_leaf,
            seed=args.seed,
        ).fit(train)
    else:
        lr = 0.5 if args.learning_rate is None else args.learning_rate
        model = LogisticClassifier(
            epochs=args.epochs, learning_rate=lr, l2=args.l2, seed=args.seed
        ).fit(train)
    test_accuracy = float(np.mean(model.predict(test.rows) == test.labels))
    save_model(model, args.out)
    print(f"train accuracy {model.train_accuracy_:.4f}")
    print(f"test accuracy {test_accuracy:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _print_attribution(attribution: Attribution, prediction: int) -> None:
    width = max(len(n) for n in attribution.feature_names)
    print(f"{'feature':<{width}}  {'phi':>10}")
    for name, phi in zip(attribution.feature_names, attribution.phi):
        print(f"{name:<{width}}  {phi:>10.4f}")
    print(f"base value  {attribution.base_value:.6f}")
    print(f"raw score   {attribution.target_score:.6f}")
    print(f"prediction  {prediction}")
    gap = attribution.efficiency_gap()
    print(f"efficiency gap {gap:.3e} ({'ok' if gap <= 1e-6 else 'LARGE'})")


def cmd_explain(args) -> int:
    dataset = _load_dataset(args)
    model = load_model(args.model_path)
    x = _resolve_instance(args, dataset)
    background = _background(args, dataset)
    attribution = explain(model, background, x, _explainer_config(args))
    prediction = int(attribution.target_score >= 0)
    _print_attribution(attribution, prediction)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(attribution.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_pi(args) -> int:
    dataset = _load_dataset(args)
    model = load_model(args.model_path)
    x = _resolve_instance(args, dataset)
    background = _background(args, dataset)
    mask = _controllable_indices(args.controllable, dataset)

    pi = pi_explanation(model, background, x, _explainer_config(args))
    graph = pi_graph(pi)
    conflict = conflict_matrix(pi, args.zero_policy)
    alt_result = alt(pi, mask)
    calt_result = calt(conflict, mask)

    args.out.mkdir(parents=True, exist_ok=True)
    document = export.emit_result_document(pi, graph, conflict, alt_result, calt_result)
    (args.out / "result.json").write_text(document, encoding="utf-8")
    dot = export.emit_dot(graph, pi, weight_labels=not args.no_weight_labels)
    (args.out / "graph.dot").write_text(dot, encoding="utf-8")

    proponents = graph.proponents
    print(export.emit_table(alt_result, pi.feature_names, proponents, title="ALT"))
    print(export.emit_table(calt_result, pi.feature_names, proponents, title="CALT"))
    print(f"wrote {args.out / 'result.json'} and {args.out / 'graph.dot'}")
    return EXIT_OK


def _resolve_port(host: str, port: int) -> int:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
        return probe.getsockname()[1]
    finally:
        probe.close()


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    schema, label = load_schema_file(args.schema)
    dataset = load_csv(args.data, schema, label)
    model = load_model(args.model)
    train, _ = split(dataset, args.train_fraction, args.seed)
    state = ServiceState(base_seed=args.seed)
    state.add_dataset("default", train)
    state.add_model("default", model)

    try:
        port = _resolve_port(args.host, args.port)
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    print(f"peerinfluence service listening on http://{args.host}:{port}", flush=True)
    uvicorn.run(create_app(state), host=args.host, port=port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("PEERINFLUENCE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_INPUT
    except (PeerInfluenceError, ValueError, IndexError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
