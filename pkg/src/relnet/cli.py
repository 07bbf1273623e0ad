"""Command line entry point: synth, train, eval, relations, reproduce.

Every command accepts ``--config FILE`` (JSON); explicit flags override the
file, which overrides the built-in defaults. The fully resolved settings are
written to ``<out>/run.json`` and that file can be fed back through
``--config`` to repeat the run.

Exit codes: 0 ok, 2 I/O or argument error, 3 class balance error,
4 model/data schema mismatch, 5 wrong model kind.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data as dp
from .evaluate import (
    accuracy_plot_csv,
    compare,
    comparison_to_dict,
    confusion,
    format_comparison,
    relation_report,
)
from .mlp import MlpModel, TrainingConfig, train_mlp
from .network import Activation, RelationalNetwork
from .sampler import Mode, SamplerConfig, train

EXIT_IO, EXIT_BALANCE, EXIT_SCHEMA, EXIT_KIND = 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


DEFAULTS = {
    "synth": {
        "n": 6000,
        "positive_rate": 0.25,
        "seed": 0,
        "planted": [],
        "noise_std": 0.05,
        "schema": None,
        "out": "synth-out",
    },
    "train": {
        "data": None,
        "model": "relnet",
        "activation": "linear",
        "mode": Mode.ALL_FEATURES.value,
        "target": None,
        "seed": 0,
        "iterations": 20_000,
        "step_scale": 0.05,
        "temperature": 0.01,
        "trace_every": 1,
        "hidden": 17,
        "cycles": 1000,
        "learning_rate": 0.01,
        "momentum": 0.9,
        "schema": None,
        "out": "train-out",
    },
    "eval": {"models": [], "names": None, "data": None, "schema": None, "out": "eval-out"},
    "relations": {"model": None, "target": None, "schema": None, "out": "relations-out"},
    "reproduce": {
        "n": 6000,
        "test_size": 1500,
        "positive_rate": 0.25,
        "planted": ["Age:HIV:1.0"],
        "noise_std": 0.2,
        "seed": 7,
        "iterations": 20_000,
        "step_scale": 0.02,
        "temperature": 1e-5,
        "trace_every": 100,
        "hidden": 17,
        "cycles": 1000,
        "learning_rate": 0.01,
        "momentum": 0.9,
        "schema": None,
        "out": "reproduce-out",
    },
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relnet", description="Relational network and MLP classifier toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(sp):
        sp.add_argument("--config", help="JSON file of settings (flags take precedence)")
        sp.add_argument("--schema", default=S, help="feature schema JSON (default: built-in survey schema)")
        sp.add_argument("--out", default=S, help="output directory")

    def synth_flags(sp):
        sp.add_argument("--n", type=int, default=S, help="number of records")
        sp.add_argument("--positive-rate", type=float, default=S)
        sp.add_argument("--planted", action="append", default=S, metavar="FROM:TO:COEF",
                        help="planted linear dependency, repeatable")
        sp.add_argument("--noise-std", type=float, default=S)
        sp.add_argument("--seed", type=int, default=S)

    def sampler_flags(sp):
        sp.add_argument("--iterations", type=int, default=S)
        sp.add_argument("--step-scale", type=float, default=S)
        sp.add_argument("--temperature", type=float, default=S)

    def mlp_flags(sp):
        sp.add_argument("--hidden", type=int, default=S)
        sp.add_argument("--cycles", type=int, default=S)
        sp.add_argument("--learning-rate", type=float, default=S)
        sp.add_argument("--momentum", type=float, default=S)

    sp = sub.add_parser("synth", help="generate a synthetic survey dataset")
    common(sp)
    synth_flags(sp)

    sp = sub.add_parser("train", help="balance a dataset and train one model")
    common(sp)
    sp.add_argument("--data", default=S, help="training CSV")
    sp.add_argument("--model", choices=["relnet", "mlp"], default=S)
    sp.add_argument("--activation", choices=[a.value for a in Activation], default=S)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=S)
    sp.add_argument("--target", default=S, help="target node (default: schema target)")
    sp.add_argument("--seed", type=int, default=S)
    sp.add_argument("--trace-every", type=int, default=S)
    sampler_flags(sp)
    mlp_flags(sp)

    sp = sub.add_parser("eval", help="evaluate models on an unbalanced test CSV")
    common(sp)
    sp.add_argument("--models", nargs="+", default=S, help="model JSON files")
    sp.add_argument("--names", nargs="+", default=S, help="display names, one per model")
    sp.add_argument("--data", default=S, help="test CSV")

    sp = sub.add_parser("relations", help="rank feature weights into a target node")
    common(sp)
    sp.add_argument("--model", default=S, help="relational network JSON")
    sp.add_argument("--target", default=S)

    sp = sub.add_parser("reproduce", help="run the whole synth/train/eval/compare study")
    common(sp)
    synth_flags(sp)
    sp.add_argument("--test-size", type=int, default=S)
    sp.add_argument("--trace-every", type=int, default=S)
    sampler_flags(sp)
    mlp_flags(sp)
    return p


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_IO, f"cannot read config {args.config}: {exc}") from exc
        if loaded.get("command", args.command) != args.command:
            raise CliError(EXIT_IO, f"config is for {loaded['command']!r}, not {args.command!r}")
        loaded = loaded.get("config", loaded)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise CliError(EXIT_IO, f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    cfg.update({k: v for k, v in vars(args).items() if k in cfg})
    return cfg


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _out_dir(cfg) -> Path:
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create {out}: {exc}") from exc
    return out


def _schema(cfg) -> dp.FeatureSchema:
    if not cfg.get("schema"):
        return dp.default_schema()
    try:
        return dp.FeatureSchema.load(cfg["schema"])
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(EXIT_IO, f"bad schema file {cfg['schema']}: {exc}") from exc


def _read(path, schema) -> dp.Dataset:
    if not path:
        raise CliError(EXIT_IO, "no data file given (--data)")
    try:
        return dp.read_csv(path, schema)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc


def _load_model(path):
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read model {path}: {exc}") from exc
    try:
        if "node_names" in d:
            return RelationalNetwork.from_dict(d)
        if "w1" in d:
            return MlpModel.from_dict(d)
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_IO, f"malformed model {path}: {exc}") from exc
    raise CliError(EXIT_IO, f"{path} is not a relnet or mlp model")


def _planted(cfg) -> list[dp.Planted]:
    try:
        return [dp.parse_planted(s) for s in cfg["planted"]]
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc


def _manifest(out: Path, command: str, cfg: dict, extra: dict | None = None) -> None:
    _write_json(out / "run.json", {"command": command, "config": cfg, **(extra or {})})


# ---------------------------------------------------------------------------
# commands


def cmd_synth(cfg: dict) -> Path:
    schema = _schema(cfg)
    try:
        ds = dp.synth_generate(schema, cfg["n"], cfg["positive_rate"], _planted(cfg), cfg["noise_std"], cfg["seed"])
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_IO, f"invalid synth settings: {exc}") from exc
    out = _out_dir(cfg)
    dp.write_csv(ds, out / "data.csv")
    _manifest(out, "synth", cfg, {"schema": schema.to_dict(), "records": len(ds), "positives": int(ds.labels.sum())})
    return out / "data.csv"


def _train_one(cfg: dict, train_set: dp.Dataset, out: Path, stem: str = "model") -> dict:
    schema = train_set.schema
    try:
        balanced = dp.balance(train_set, cfg["seed"])
    except dp.BalanceError as exc:
        raise CliError(EXIT_BALANCE, f"cannot balance training data: {exc}") from exc
    enc = dp.encode(balanced)
    if cfg["model"] == "mlp":
        tc = TrainingConfig(cfg["cycles"], cfg["learning_rate"], cfg["momentum"], cfg["seed"])
        model = train_mlp(enc.mlp_inputs, enc.labels, tc, hidden=cfg["hidden"])
        model.save(out / f"{stem}.json")
        report = {
            "model": "mlp",
            "d": model.d,
            "M": model.M,
            "cycles": tc.cycles,
            "final_loss": model.loss(enc.mlp_inputs, enc.labels),
            "records": len(balanced),
        }
    else:
        target = cfg.get("target") or schema.target_name
        try:
            target_idx = schema.index(target) if not str(target).isdigit() else int(target)
        except KeyError as exc:
            raise CliError(EXIT_IO, str(exc)) from exc
        sc = SamplerConfig(
            seed=cfg["seed"],
            max_iterations=cfg["iterations"],
            step_scale=cfg["step_scale"],
            temperature=cfg["temperature"],
            mode=cfg.get("mode", Mode.ALL_FEATURES.value),
            target=target_idx,
            trace_every=cfg.get("trace_every", 1),
        )
        net, rep = train(enc.relnet_view, cfg["activation"], sc, node_names=schema.names)
        net.save(out / f"{stem}.json")
        report = {"model": "relnet", "activation": net.activation.value, "records": len(balanced), **rep.to_dict()}
    _write_json(out / f"{stem}.report.json", report)
    return report


def cmd_train(cfg: dict) -> Path:
    schema = _schema(cfg)
    ds = _read(cfg["data"], schema)
    out = _out_dir(cfg)
    try:
        _train_one(cfg, ds, out)
    except ValueError as exc:
        raise CliError(EXIT_IO, f"invalid training settings: {exc}") from exc
    _manifest(out, "train", cfg, {"schema": schema.to_dict()})
    return out / "model.json"


def _default_name(path: Path, model) -> str:
    if path.stem != "model":
        return path.stem
    return path.parent.name or ("relnet" if isinstance(model, RelationalNetwork) else "mlp")


def _predict(model, test: dp.Dataset, path):
    schema = test.schema
    if isinstance(model, RelationalNetwork):
        if list(model.node_names) != schema.names:
            raise CliError(EXIT_SCHEMA, f"{path}: nodes {list(model.node_names)} do not match data columns {schema.names}")
        return model.classify_batch(dp.relnet_view(test), schema.target_index)
    if model.d != schema.mlp_dim:
        raise CliError(EXIT_SCHEMA, f"{path}: MLP expects {model.d} inputs, schema encodes {schema.mlp_dim}")
    return model.classify_batch(dp.mlp_view(test)[0])


def evaluate_models(paths, names, test: dp.Dataset, out: Path) -> list:
    if not paths:
        raise CliError(EXIT_IO, "no models given (--models)")
    if names and len(names) != len(paths):
        raise CliError(EXIT_IO, "--names needs one entry per model")
    if len(test) == 0:
        raise CliError(EXIT_IO, "test set has no complete records")
    entries = []
    for i, path in enumerate(map(Path, paths)):
        model = _load_model(path)
        pred = _predict(model, test, path)
        entries.append((names[i] if names else _default_name(path, model), confusion(test.labels, pred)))
    rows = compare(entries)
    _write_json(out / "comparison.json", comparison_to_dict(rows))
    (out / "comparison.txt").write_text(format_comparison(rows))
    (out / "accuracy.csv").write_text(accuracy_plot_csv(rows))
    return rows


def cmd_eval(cfg: dict) -> Path:
    schema = _schema(cfg)
    test = _read(cfg["data"], schema)
    out = _out_dir(cfg)
    rows = evaluate_models(cfg["models"], cfg["names"], test, out)
    _manifest(out, "eval", cfg, {"predictions": len(test)})
    sys.stdout.write(format_comparison(rows))
    return out / "comparison.json"


def cmd_relations(cfg: dict) -> Path:
    if not cfg["model"]:
        raise CliError(EXIT_IO, "no model given (--model)")
    model = _load_model(cfg["model"])
    if not isinstance(model, RelationalNetwork):
        raise CliError(EXIT_KIND, f"{cfg['model']} is an MLP; relations need a relational network")
    target = cfg["target"]
    if target is None:
        target = _schema(cfg).target_name
    elif str(target).isdigit():
        target = int(target)
    try:
        report = relation_report(model, target)
    except (KeyError, IndexError) as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    out = _out_dir(cfg)
    (out / "relations.json").write_text(report.to_json())
    (out / "relations.txt").write_text(report.to_text())
    _manifest(out, "relations", cfg)
    sys.stdout.write(report.to_text())
    return out / "relations.json"


def cmd_reproduce(cfg: dict) -> Path:
    """Synthesise, split, balance-train the MLP and three relational nets, compare."""
    schema = _schema(cfg)
    planted = _planted(cfg)
    try:
        ds = dp.synth_generate(schema, cfg["n"], cfg["positive_rate"], planted, cfg["noise_std"], cfg["seed"])
        train_set, test_set = dp.split(ds, cfg["test_size"], cfg["seed"])
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_IO, f"invalid study settings: {exc}") from exc
    out = _out_dir(cfg)
    data_dir, model_dir = out / "data", out / "models"
    data_dir.mkdir(exist_ok=True)
    model_dir.mkdir(exist_ok=True)
    dp.write_csv(ds, data_dir / "all.csv")
    dp.write_csv(train_set, data_dir / "train.csv")
    dp.write_csv(test_set, data_dir / "test.csv")

    names, paths = [], []
    base = {**DEFAULTS["train"], **{k: cfg[k] for k in cfg if k in DEFAULTS["train"]}}
    _train_one({**base, "model": "mlp"}, train_set, model_dir, "mlp")
    names.append("mlp")
    for act in Activation:
        _train_one({**base, "model": "relnet", "activation": act.value}, train_set, model_dir, act.value)
        names.append(f"relnet-{act.value}")
    paths = [model_dir / "mlp.json"] + [model_dir / f"{a.value}.json" for a in Activation]
    rows = evaluate_models(paths, names, test_set, out)

    relations = {}
    for act in Activation:
        rep = relation_report(RelationalNetwork.load(model_dir / f"{act.value}.json"), schema.target_name)
        (out / f"relations-{act.value}.json").write_text(rep.to_json())
        (out / f"relations-{act.value}.txt").write_text(rep.to_text())
        relations[act.value] = [e.feature_name for e in rep.entries]

    summary = {
        "train_records": len(train_set),
        "test_records": len(test_set),
        "accuracy": {r.name: round(r.accuracy, 2) for r in rows},
        "planted": [p._asdict() for p in planted],
        "relation_ranking": relations,
    }
    _write_json(out / "summary.json", summary)
    _manifest(out, "reproduce", cfg, {"schema": schema.to_dict()})
    sys.stdout.write(format_comparison(rows))
    return out / "summary.json"


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "eval": cmd_eval,
    "relations": cmd_relations,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"relnet {args.command}: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
