"""Command-line interface: train, predict, explain, ice, serve.

Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (bad data,
schema/model mismatch, and so on).  An infeasible counterfactual search is
reported as a structured message and exits 0 unless --strict is given.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .cfsearch import (
    CounterfactualQuery,
    NoCounterfactualError,
    find_counterfactuals,
)
from .ice import GridSpec, curve_to_csv, ice_curve
from .model import (
    ModelError,
    TrainingConfig,
    load_model,
    predict,
    save_model,
    train,
)
from .render import render_plot, render_sentence, render_table
from .tabular import (
    DatasetError,
    SchemaError,
    load_dataset,
    load_schema,
    mad_weights,
)

DEFAULT_PORT = 8080
PORT_ENV_VAR = "CONF_CF_PORT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="confcf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model from a CSV dataset")
    p_train.add_argument("--schema", required=True)
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--model", required=True, help="output model file")
    p_train.add_argument("--seed", type=int, default=42)
    p_train.add_argument("--l2", type=float, default=1e-3)
    p_train.add_argument("--learning-rate", type=float, default=0.5)
    p_train.add_argument("--max-epochs", type=int, default=2000)
    p_train.add_argument("--boundary", type=float, default=0.5)

    p_predict = sub.add_parser("predict", help="predict one instance")
    p_predict.add_argument("--schema", required=True)
    p_predict.add_argument("--model", required=True)
    p_predict.add_argument("--instance", required=True, help="JSON file or inline JSON")

    p_explain = sub.add_parser("explain", help="counterfactual explanations")
    p_explain.add_argument("--schema", required=True)
    p_explain.add_argument("--model", required=True)
    p_explain.add_argument("--instance", required=True)
    p_explain.add_argument("--direction", required=True, choices=["raise", "lower"])
    p_explain.add_argument("--threshold", required=True, type=float)
    p_explain.add_argument("--alternatives", type=int, default=2)
    p_explain.add_argument("--out-dir", default=None)
    p_explain.add_argument("--strict", action="store_true")

    p_ice = sub.add_parser("ice", help="per-feature confidence curves")
    p_ice.add_argument("--schema", required=True)
    p_ice.add_argument("--model", required=True)
    p_ice.add_argument("--instance", required=True)
    p_ice.add_argument("--features", required=True, help="comma-separated feature names")
    p_ice.add_argument(
        "--grid",
        action="append",
        default=[],
        metavar="FEATURE=MIN:MAX:STEP",
        help="grid override for a continuous feature (repeatable)",
    )
    p_ice.add_argument("--out-dir", default=".")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--schema", required=True)
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--cors-origin", default="*")
    p_serve.add_argument("--deadline", type=float, default=10.0)

    return parser


def resolve_port(port_flag: int | None, env: dict | None = None) -> int:
    """--port wins; otherwise the CONF_CF_PORT variable; otherwise 8080."""
    env = os.environ if env is None else env
    if port_flag is not None:
        return port_flag
    raw = env.get(PORT_ENV_VAR)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"{PORT_ENV_VAR} must be an integer, got {raw!r}") from None
    return DEFAULT_PORT


def _read_instance(schema_config, source: str):
    text = source if source.lstrip().startswith("{") else None
    if text is None:
        path = Path(source)
        if not path.exists():
            raise DatasetError(f"instance file not found: {path}")
        text = path.read_text(encoding="utf-8")
    try:
        mapping = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"instance is not valid JSON: {exc}") from None
    if not isinstance(mapping, dict):
        raise DatasetError("instance JSON must be an object of feature values")
    return schema_config.schema.instance_from_mapping(mapping)


def _load_bundle(schema_path: str, model_path: str):
    config = load_schema(schema_path)
    model, weights = load_model(model_path)
    if model.schema_hash is not None and model.schema_hash != config.schema.schema_hash:
        raise ModelError(
            f"model {model_path} was trained against a different schema "
            f"than {schema_path}"
        )
    return config, model, weights


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "feature"


def cmd_train(args) -> int:
    config = load_schema(args.schema)
    instances, labels = load_dataset(args.data, config.schema, config.label_column)
    if len(set(labels)) < 2:
        raise ModelError(
            f"label column {config.label_column!r} contains a single class; "
            "training needs examples of both"
        )
    settings = TrainingConfig(
        learning_rate=args.learning_rate,
        l2_penalty=args.l2,
        max_epochs=args.max_epochs,
        seed=args.seed,
        decision_boundary=args.boundary,
    )
    model = train(instances, labels, config.schema, settings, config.class_labels)
    weights = mad_weights(instances, config.schema)
    save_model(args.model, model, weights)
    correct = sum(
        1
        for inst, lab in zip(instances, labels)
        if predict(model, inst, config.schema).predicted_class == lab
    )
    print(f"trained on {len(instances)} rows ({config.schema.encoded_width} encoded columns)")
    print(f"training accuracy: {correct / len(instances):.3f}")
    print(f"model written to {args.model}")
    return 0


def cmd_predict(args) -> int:
    config, model, _ = _load_bundle(args.schema, args.model)
    instance = _read_instance(config, args.instance)
    pred = predict(model, instance, config.schema)
    print(f"predicted class: {pred.predicted_class}")
    print(f"probability:     {pred.probability:.6f}")
    print(f"confidence:      {pred.confidence:.2f}")
    return 0


def cmd_explain(args) -> int:
    config, model, weights = _load_bundle(args.schema, args.model)
    if weights is None:
        raise ModelError(
            f"model {args.model} carries no distance weights; retrain with 'confcf train'"
        )
    instance = _read_instance(config, args.instance)
    query = CounterfactualQuery(
        instance=instance,
        direction=args.direction,
        threshold=args.threshold,
        alternatives=args.alternatives,
    )
    try:
        results = find_counterfactuals(model, weights, config.schema, query)
    except NoCounterfactualError as exc:
        print(f"no counterfactual: {exc.reason}")
        print(str(exc))
        return 2 if args.strict else 0

    for cf in results:
        print(render_sentence(query, cf))
    original_prediction = predict(model, instance, config.schema)
    table = render_table(
        config.schema, instance, original_prediction, results, model.decision_boundary
    )
    print()
    print(table.text, end="")

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sentences.txt").write_text(
            "".join(render_sentence(query, cf) + "\n" for cf in results), encoding="utf-8"
        )
        (out / "table.txt").write_text(table.text, encoding="utf-8")
        (out / "table.html").write_text(table.html, encoding="utf-8")
        structured = [
            {
                "instance": config.schema.instance_to_mapping(cf.instance),
                "cost": cf.cost,
                "probability": cf.probability,
                "confidence": cf.confidence,
                "changes": [
                    {"feature": c.feature, "old": c.old, "new": c.new}
                    for c in cf.changed_features
                ],
            }
            for cf in results
        ]
        (out / "results.json").write_text(
            json.dumps(structured, indent=2) + "\n", encoding="utf-8"
        )
        print(f"\nartifacts written to {out}")
    return 0


def _parse_grid_flags(flags: list[str]) -> dict[str, GridSpec]:
    grids = {}
    for flag in flags:
        match = re.fullmatch(r"(.+)=([^:]+):([^:]+):([^:]+)", flag)
        if not match:
            raise UsageError(f"--grid expects FEATURE=MIN:MAX:STEP, got {flag!r}")
        name, lo, hi, step = match.groups()
        try:
            grids[name] = GridSpec(float(lo), float(hi), float(step))
        except ValueError as exc:
            raise UsageError(f"--grid {flag!r}: {exc}") from None
    return grids


def cmd_ice(args) -> int:
    config, model, _ = _load_bundle(args.schema, args.model)
    instance = _read_instance(config, args.instance)
    features = [name.strip() for name in args.features.split(",") if name.strip()]
    if not features:
        raise UsageError("--features must name at least one feature")
    grids = _parse_grid_flags(args.grid)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in features:
        try:
            curve = ice_curve(model, config.schema, instance, name, grids.get(name))
        except ValueError as exc:
            raise DatasetError(str(exc)) from None
        stem = _slug(name)
        (out / f"{stem}.csv").write_text(curve_to_csv(curve), encoding="utf-8")
        (out / f"{stem}.svg").write_text(render_plot(curve), encoding="utf-8")
        print(f"{name}: {out / (stem + '.csv')}, {out / (stem + '.svg')}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config, model, weights = _load_bundle(args.schema, args.model)
    if weights is None:
        raise ModelError(
            f"model {args.model} carries no distance weights; retrain with 'confcf train'"
        )
    app = create_app(
        model,
        weights,
        config,
        cors_origin=args.cors_origin,
        deadline_seconds=args.deadline,
    )
    port = resolve_port(args.port)
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "explain": cmd_explain,
    "ice": cmd_ice,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DatasetError, SchemaError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
