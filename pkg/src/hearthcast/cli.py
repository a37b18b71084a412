"""Command-line interface.

Subcommands: gen, train, predict, explain, benchmark, serve.
Exit codes: 0 success, 1 usage error, 2 data/config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .bench import BenchmarkSpec, emit_report, run_benchmark
from .data import (
    CSV_COLUMNS,
    FeatureCodec,
    LowConsumptionRule,
    ingest_csv,
    write_dataset_csv,
    write_rejections_csv,
)
from .errors import DataError, HearthcastError
from .jsonio import read_json
from .models import (
    BoostConfig,
    BoostedModel,
    CartConfig,
    CartModel,
    ConstrainedTreeConfig,
    ConstrainedTreeModel,
    ForestConfig,
    ForestModel,
    LegacyModel,
    LegacyTable,
    LinearModel,
    load_model,
    save_model,
)
from .server import record_from_fields, serve
from .synth import GeneratorConfig, generate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hearthcast", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p_gen = sub.add_parser("gen", help="generate a synthetic population CSV")
    p_gen.add_argument("--n", type=int, default=None, help="population size")
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--config", help="generator config JSON file")
    p_gen.add_argument("--out", required=True, help="output CSV path")

    p_train = sub.add_parser("train", help="fit a model from a CSV")
    p_train.add_argument("--data", required=True, help="training CSV path")
    p_train.add_argument(
        "--kind",
        required=True,
        choices=["legacy", "linear", "cart", "forest", "gbm", "constrained"],
    )
    p_train.add_argument("--config", help="model config JSON file")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True, help="output model JSON path")
    p_train.add_argument("--rejects", help="optional CSV path for rejected rows")

    p_pred = sub.add_parser("predict", help="predict CAR for records")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--input", required=True, help="record JSON (object or array) or CSV")
    p_pred.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p_pred.add_argument("--out", help="output path (default: stdout)")

    p_exp = sub.add_parser("explain", help="predict with a decision trace")
    p_exp.add_argument("--model", required=True, help="a constrained-tree model file")
    p_exp.add_argument("--input", required=True, help="record JSON file")
    p_exp.add_argument("--format", choices=["json", "text"], default="text")
    p_exp.add_argument("--out", help="output path (default: stdout)")

    p_bench = sub.add_parser("benchmark", help="run the two-regime benchmark")
    p_bench.add_argument("--spec", help="benchmark spec JSON file")
    p_bench.add_argument("--gen-n", type=int, default=6000, help="synthetic size when no spec given")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--format", choices=["json", "csv", "bundle"], default="bundle")
    p_bench.add_argument("--out", required=True, help="output bundle directory")

    p_serve = sub.add_parser("serve", help="serve a model over HTTP")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--port", type=int, default=8080)

    return parser


def _load_records(path: str) -> list:
    if path.endswith(".csv"):
        records = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                fields = {k: v for k, v in row.items() if k in CSV_COLUMNS}
                for name in ("surface_m2", "occupants", "max_power_kva", "reading_days"):
                    if name in fields and fields[name] != "":
                        fields[name] = float(fields[name])
                fields.pop("observed_kwh", None)
                fields.pop("car_kwh", None)
                records.append(record_from_fields(fields))
        if not records:
            raise DataError(f"{path}: no records")
        return records
    data = read_json(path)
    items = data if isinstance(data, list) else [data]
    return [record_from_fields(item) for item in items]


def _model_from_config(kind: str, config: dict, seed: int):
    codec = None
    if "rule" in config:
        codec = FeatureCodec(rule=LowConsumptionRule.from_jsonable(config.pop("rule")))
    if kind == "legacy":
        table = LegacyTable.from_jsonable(config["table"]) if "table" in config else None
        return LegacyModel(table=table)
    if kind == "linear":
        return LinearModel(ridge_epsilon=float(config.get("ridge_epsilon", 1e-8)), codec=codec)
    if kind == "cart":
        return CartModel(config=CartConfig.from_dict(config), codec=codec)
    if kind == "forest":
        config.setdefault("seed", seed)
        return ForestModel(config=ForestConfig.from_dict(config), codec=codec)
    if kind == "gbm":
        config.setdefault("seed", seed)
        return BoostedModel(config=BoostConfig.from_dict(config), codec=codec)
    if kind == "constrained":
        return ConstrainedTreeModel(config=ConstrainedTreeConfig.from_dict(config), codec=codec)
    raise DataError(f"unknown model kind {kind!r}")


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _cmd_gen(args) -> int:
    overrides = {}
    if args.config:
        overrides = read_json(args.config)
    if args.n is not None:
        overrides["n"] = args.n
    if args.seed is not None:
        overrides["seed"] = args.seed
    config = GeneratorConfig.from_dict(overrides)
    write_dataset_csv(args.out, generate(config))
    print(f"wrote {config.n} rows to {args.out}")
    return 0


def _cmd_train(args) -> int:
    config = read_json(args.config) if args.config else {}
    model = _model_from_config(args.kind, dict(config), args.seed)
    result = ingest_csv(args.data)
    if args.rejects:
        write_rejections_csv(args.rejects, result.rejections)
    if len(result.dataset) == 0:
        raise DataError(f"{args.data}: no usable rows ({len(result.rejections)} rejected)")
    model.fit(result.dataset)
    save_model(model, args.out)
    print(
        f"trained {args.kind} on {len(result.dataset)} rows "
        f"({len(result.rejections)} rejected) -> {args.out}"
    )
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    records = _load_records(args.input)
    predictions = [model.predict_record(r) for r in records]
    if args.format == "json":
        _write_or_print(json.dumps([{"car_kwh": p} for p in predictions], indent=2), args.out)
    elif args.format == "csv":
        lines = ["car_kwh"] + [repr(float(p)) for p in predictions]
        _write_or_print("\n".join(lines), args.out)
    else:
        _write_or_print("\n".join(f"{p:.1f} kWh" for p in predictions), args.out)
    return 0


def _cmd_explain(args) -> int:
    model = load_model(args.model)
    if not isinstance(model, ConstrainedTreeModel):
        raise DataError(f"model kind {model.kind!r} has no explanation traces")
    records = _load_records(args.input)
    outputs = []
    for record in records:
        _car, trace = model.predict_explain(record)
        outputs.append(trace)
    if args.format == "json":
        _write_or_print(json.dumps([t.to_dict() for t in outputs], indent=2), args.out)
    else:
        _write_or_print("\n\n".join(t.to_text() for t in outputs), args.out)
    return 0


def _cmd_benchmark(args) -> int:
    if args.spec:
        spec = BenchmarkSpec.from_dict(read_json(args.spec))
    else:
        spec = BenchmarkSpec(
            generator=GeneratorConfig(n=args.gen_n, seed=args.seed), seed=args.seed
        )
    report = run_benchmark(spec)
    written = emit_report(report, args.format, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    serve(args.model, args.port)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "explain": _cmd_explain,
    "benchmark": _cmd_benchmark,
    "serve": _cmd_serve,
}


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 1
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(str(err), file=sys.stderr)
        return 1
    except (HearthcastError, FileNotFoundError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
