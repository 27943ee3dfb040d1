"""Command-line front end.

Subcommands: validate, quality, digitize, predict, train, evaluate,
plot-data. Exit codes: 0 success, 1 validation failures found, 2 usage
error, 3 runtime error. Diagnostics go to stderr; results go to files or
stdout.

Defaults can be preloaded from a JSON config file passed with --config or
named by the CHFKIT_CONFIG environment variable; keys match flag names
with dashes replaced by underscores (e.g. {"lut_file": "lut.tsv",
"threads": 4}). Explicit flags override the config.
"""

import argparse
import json
import os
import sys

from . import channel, dataset, digitizer, evaluate, lut, nn
from .errors import ChfkitError

CONFIG_ENV_VAR = "CHFKIT_CONFIG"


def _err(message: str) -> None:
    print(f"chfkit: {message}", file=sys.stderr)


def _load_config(argv):
    """Fish --config out of argv (or the environment) before parsing."""
    path = os.environ.get(CONFIG_ENV_VAR)
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if not path:
        return {}
    with open(path) as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise ChfkitError(f"config file {path} must hold a JSON object")
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chfkit",
        description="Critical-heat-flux dataset and prediction toolkit.")
    parser.add_argument("--config", help="JSON file with default flag values "
                        f"(or set ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a dataset file and report "
                       "validation findings")
    p.add_argument("--data", required=True)
    p.add_argument("--permissive", action="store_true",
                   help="accept any XML layout holding TestID elements")

    p = sub.add_parser("quality", help="dump enthalpy/quality profiles "
                       "as z, h, x text")
    p.add_argument("--data", required=True)
    p.add_argument("--test-id", type=int, help="restrict to one case")
    p.add_argument("--out", help="output directory (default: stdout)")

    p = sub.add_parser("digitize", help="filter, resample, and "
                       "energy-check a digitized curve")
    p.add_argument("--points", required=True,
                   help="text file with one 'z q_norm' pair per line")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--perimeter", type=float, required=True)
    p.add_argument("--n-nodes", type=int, default=40)
    p.add_argument("--shape", default="uniform")
    p.add_argument("--discontinuous", action="store_true")
    p.add_argument("--breakpoints", default="",
                   help="comma-separated z values of declared steps")
    p.add_argument("--q-av", type=float, help="average heat flux [W/m2] "
                   "for the energy gate")
    p.add_argument("--declared-power", type=float, help="declared test "
                   "power [W] for the energy gate")
    p.add_argument("--energy-threshold", type=float, default=0.02)
    p.add_argument("--out", help="write the profile fragment here")

    p = sub.add_parser("predict", help="per-case CHF predictions")
    p.add_argument("--model", required=True,
                   choices=list(evaluate.KNOWN_MODELS))
    p.add_argument("--data", required=True)
    p.add_argument("--lut-file")
    p.add_argument("--model-file")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("train", help="train the CHF regressor")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-epochs", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--validation-fraction", type=float, default=0.2)

    p = sub.add_parser("evaluate", help="score a predictor and export "
                       "parity reports")
    p.add_argument("--model", required=True,
                   choices=list(evaluate.KNOWN_MODELS))
    p.add_argument("--data", required=True)
    p.add_argument("--lut-file")
    p.add_argument("--model-file")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--metric", default="relative",
                   choices=["relative", "log_ratio", "rmse_over_mean"])
    p.add_argument("--compare", default="flux", choices=["flux", "power"])

    p = sub.add_parser("plot-data", help="export dataset condition scatter")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _resolve_predictor(args):
    """Build the predictor for predict/evaluate; None means usage error."""
    if args.model == "lut":
        if not args.lut_file:
            _err("--model lut requires --lut-file")
            return None
        return evaluate.make_lut_predictor(lut.load_table(args.lut_file))
    if args.model == "nn":
        if not args.model_file:
            _err("--model nn requires --model-file")
            return None
        return evaluate.make_nn_predictor(nn.load_model(args.model_file))
    return evaluate.resolve_predictor(args.model)


def _cmd_validate(args) -> int:
    try:
        cases = dataset.parse_dataset(args.data, permissive=args.permissive)
    except ChfkitError as exc:
        _err(f"parse failed: {exc}")
        return 1
    findings = dataset.validate_dataset(cases)
    errors = [f for f in findings if f.severity == "error"]
    for f in findings:
        print(f"{f.severity}: test case {f.test_id}: {f.rule}: {f.message}",
              file=sys.stderr)
    print(f"{len(cases)} cases, {len(errors)} errors")
    return 1 if errors else 0


def _cmd_quality(args) -> int:
    cases = dataset.parse_dataset(args.data)
    if args.test_id is not None:
        cases = [c for c in cases if c.test_id == args.test_id]
        if not cases:
            _err(f"no test case with id {args.test_id}")
            return 3
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for case in cases:
        profile = channel.quality_profile(case)
        lines = ["z_m\th_J_per_kg\tx\n"]
        lines += [f"{z!r}\t{h!r}\t{x!r}\n"
                  for z, h, x in zip(profile.z.tolist(), profile.h.tolist(),
                                     profile.x.tolist())]
        if args.out:
            with open(os.path.join(args.out, f"quality_{case.test_id}.tsv"),
                      "w") as f:
                f.writelines(lines)
        else:
            sys.stdout.write(f"# test case {case.test_id}\n")
            sys.stdout.writelines(lines)
    return 0


def _cmd_digitize(args) -> int:
    points = []
    with open(args.points) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            z, q = line.split()[:2]
            points.append((float(z), float(q)))
    curve = digitizer.RawCurve(tuple(points),
                               (args.perimeter, args.length),
                               args.declared_power)
    filtered = digitizer.filter_outliers(curve)
    removed = len(curve.points) - len(filtered.points)
    breakpoints = tuple(float(b) for b in args.breakpoints.split(",") if b)
    profile = digitizer.resample_profile(
        filtered, args.n_nodes, shape=args.shape,
        continuous=not args.discontinuous, breakpoints=breakpoints)
    print(f"{removed} outlier(s) removed, {len(profile.wall_power)} nodes",
          file=sys.stderr)
    fragment = (
        "<WallPower>" + " ".join(repr(v) for v in profile.wall_power)
        + "</WallPower>\n"
        + "<WallMesh>" + " ".join(repr(v) for v in profile.wall_mesh)
        + "</WallMesh>\n"
        + f"<Shape>{profile.shape}</Shape>\n"
        + f"<Continuous>{'yes' if profile.continuous else 'no'}</Continuous>\n")
    if args.out:
        with open(args.out, "w") as f:
            f.write(fragment)
    else:
        sys.stdout.write(fragment)
    if args.q_av is not None and args.declared_power is not None:
        balance = digitizer.energy_balance_check(
            profile, args.q_av, (args.perimeter, args.length),
            args.declared_power, args.energy_threshold)
        print(f"energy balance: {'pass' if balance.passed else 'fail'} "
              f"(discrepancy {balance.discrepancy:.4%})")
        return 0 if balance.passed else 1
    return 0


def _cmd_predict(args) -> int:
    predictor = _resolve_predictor(args)
    if predictor is None:
        return 2
    cases = dataset.parse_dataset(args.data)
    lines = ["test_id\tpredicted\tpredicted_power\tlocation\tskip_reason\n"]
    for case in cases:
        try:
            p = predictor(case)
        except ChfkitError as exc:
            p = evaluate.CasePrediction(skip_reason=type(exc).__name__)
        def fmt(v):
            return "" if v is None else repr(float(v))
        lines.append(f"{case.test_id}\t{fmt(p.predicted)}"
                     f"\t{fmt(p.predicted_power)}\t{fmt(p.location)}"
                     f"\t{p.skip_reason or ''}\n")
    if args.out:
        with open(args.out, "w") as f:
            f.writelines(lines)
    else:
        sys.stdout.writelines(lines)
    return 0


def _cmd_train(args) -> int:
    cases = dataset.parse_dataset(args.data)
    samples = []
    for case in cases:
        features, reason = evaluate.nn_features(case)
        if reason:
            continue
        measured, reason = evaluate._measured(case, "flux")
        if reason:
            continue
        samples.append((features, measured))
    if not samples:
        _err("no trainable cases in the dataset")
        return 3
    model = nn.init_model(args.seed)
    config = nn.TrainConfig(
        learning_rate=args.learning_rate, batch_size=args.batch_size,
        max_epochs=args.max_epochs,
        validation_fraction=args.validation_fraction, seed=args.seed)
    model, history = nn.train(model, samples, config)
    nn.save_model(model, args.out)
    print(f"trained on {len(samples)} cases for "
          f"{len(history['train_loss'])} epochs; "
          f"final train loss {history['train_loss'][-1]:.6g}, "
          f"val loss {history['val_loss'][-1]:.6g}")
    return 0


def _cmd_evaluate(args) -> int:
    predictor = _resolve_predictor(args)
    if predictor is None:
        return 2
    cases = dataset.parse_dataset(args.data)
    report = evaluate.evaluate_model(
        args.model, cases, predictor, threads=max(args.threads, 1),
        metric=args.metric, compare=args.compare)
    paths = evaluate.export_parity(report, args.out)
    rmse = ("n/a" if report.rmse_percent is None
            else f"{report.rmse_percent:.2f}%")
    print(f"{report.model_id} on {report.subset}: rmse {rmse}, "
          f"{report.n_cases} scored, {sum(report.n_skipped.values())} skipped")
    for path in paths:
        print(path)
    return 0


def _cmd_plot_data(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cases = dataset.parse_dataset(args.data)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "conditions.svg")
    with matplotlib.rc_context({"svg.hashsalt": "chfkit"}):
        fig, axes = plt.subplots(1, 3, figsize=(12.0, 4.0))
        pressures = [c.pressure / 1e6 for c in cases]
        fluxes = [c.mass_flux for c in cases]
        chf = [c.heat_flux_avg / 1e6 for c in cases]
        axes[0].scatter(pressures, chf, s=8, alpha=0.5, edgecolors="none")
        axes[0].set_xlabel("pressure [MPa]")
        axes[0].set_ylabel("average CHF [MW/m2]")
        axes[1].scatter(fluxes, chf, s=8, alpha=0.5, edgecolors="none")
        axes[1].set_xlabel("mass flux [kg/(m2 s)]")
        axes[2].hist(pressures, bins=30, color="gray")
        axes[2].set_xlabel("pressure [MPa]")
        axes[2].set_ylabel("cases")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    print(path)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "quality": _cmd_quality,
    "digitize": _cmd_digitize,
    "predict": _cmd_predict,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "plot-data": _cmd_plot_data,
}


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        config = _load_config(argv)
    except (OSError, json.JSONDecodeError, ChfkitError) as exc:
        _err(f"bad config: {exc}")
        return 2
    if config:
        # apply config values as defaults on every subparser that knows
        # the key; explicit flags still win
        for sp_action in parser._subparsers._group_actions:
            for sp in sp_action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in config.items()
                                   if k in known})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except ChfkitError as exc:
        _err(str(exc))
        return 3
    except OSError as exc:
        _err(str(exc))
        return 3


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
