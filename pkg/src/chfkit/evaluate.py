"""Evaluation harness: predictors vs measured CHF.

Measured CHF convention: for uniform cases the stored <HeatFlux> (the
average flux at the critical condition); for non-uniform cases the local
flux at the stored <CHFLocation>, q''_av * wall_power(location). A
`compare="power"` flag scores total power instead (measured <Power> vs
predicted critical power) for predictors that report one.

Cases a predictor cannot score are skipped, never silently dropped: the
report counts them by reason. Reasons used by the built-in predictors:
negative_raw_output, out_of_table, no_convergence, no_chf_location,
property_range, no_power_prediction, nonpositive_measured.

The RMSE metric is relative by default, 100*sqrt(mean(((p-m)/m)^2)),
accumulated with compensated summation in fixed case order so results are
independent of thread count. Alternative readings of "percent RMSE" are
available behind the metric flag: "log_ratio" (100*sqrt(mean(ln(p/m)^2)))
and "rmse_over_mean" (100*rmse(p-m)/mean(m)).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import channel, lut, nn, waterprops
from .correlations import biasi_chf, bowring_chf
from .errors import (EmptyInput, NoConvergence, NonPositiveMeasured,
                     OutOfRange, OutOfTable, UnknownModel)

KNOWN_MODELS = ("bowring", "biasi", "lut", "nn")


@dataclass(frozen=True)
class CasePrediction:
    """What a predictor returns for one case."""
    predicted: float | None = None       # W/m2 (or W in power comparison)
    predicted_power: float | None = None  # W, critical power if known
    location: float | None = None         # m, predicted CHF location
    skip_reason: str | None = None


@dataclass(frozen=True)
class PerCaseResult:
    test_id: int
    measured: float
    predicted: float
    relative_error: float
    predicted_location: float | None = None


@dataclass(frozen=True)
class EvalReport:
    model_id: str
    subset: str                      # "uniform" | "non-uniform" | "mixed"
    metric: str
    compare: str                     # "flux" | "power"
    n_cases: int
    n_skipped: dict                  # reason -> count
    rmse_percent: float | None
    mean_relative_error: float | None
    location_mae: float | None       # m, non-uniform with locations only
    per_case: tuple                  # PerCaseResult, scored cases only
    skipped_cases: tuple             # (test_id, reason)


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------

def rmse_percent(pairs, metric: str = "relative") -> float:
    """Percent RMSE over (measured, predicted) pairs, fixed-order fsum."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyInput("no (measured, predicted) pairs")
    for m, _ in pairs:
        if not m > 0.0:
            raise NonPositiveMeasured(f"measured value {m!r} is not positive")
    if metric == "relative":
        sq = [((p - m) / m) ** 2 for m, p in pairs]
    elif metric == "log_ratio":
        sq = [math.log(p / m) ** 2 for m, p in pairs]
    elif metric == "rmse_over_mean":
        mean_m = math.fsum(m for m, _ in pairs) / len(pairs)
        sq = [((p - m) / mean_m) ** 2 for m, p in pairs]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return 100.0 * math.sqrt(math.fsum(sq) / len(pairs))


# ---------------------------------------------------------------------------
# built-in predictors
# ---------------------------------------------------------------------------

def _chf_quality(case):
    """Quality at the point the case's CHF datum refers to."""
    if case.heating == "uniform":
        return channel.outlet_quality(case), None
    if case.chf_location is None:
        return None, "no_chf_location"
    return channel.quality_at(case, case.chf_location), None


def bowring_predictor(case) -> CasePrediction:
    subcooling = (waterprops.saturation_state(case.pressure).h_f
                  - channel._inlet_enthalpy(case))
    pred = bowring_chf(case.pressure, case.mass_flux, case.diameter,
                       case.length, subcooling)
    if not math.isfinite(pred.raw):
        return CasePrediction(skip_reason="property_range")
    if "negative_raw_output" in pred.flags:
        return CasePrediction(skip_reason="negative_raw_output")
    return CasePrediction(
        predicted=pred.raw,
        predicted_power=pred.raw * case.perimeter * case.length)


def biasi_predictor(case) -> CasePrediction:
    x, reason = _chf_quality(case)
    if reason:
        return CasePrediction(skip_reason=reason)
    pred = biasi_chf(case.diameter, case.mass_flux, case.pressure, x)
    if "negative_raw_output" in pred.flags:
        return CasePrediction(skip_reason="negative_raw_output")
    return CasePrediction(predicted=pred.raw)


def make_lut_predictor(table, config=None):
    """LUT predictor: direct corrected lookup at the CHF-point quality for
    uniform cases; critical-power search for non-uniform cases, reporting
    the local flux at the predicted crisis point."""
    if config is None:
        config = lut.PredictConfig(clamp_quality=True)

    def predictor(case) -> CasePrediction:
        if case.heating == "uniform":
            x, reason = _chf_quality(case)
            if reason:
                return CasePrediction(skip_reason=reason)
            base = lut.lookup_base(table, case.pressure, case.mass_flux, x,
                                   config.clamp_quality)
            chf = lut.diameter_correction(base, case.diameter)
            result = lut.predict_critical_power(case, table, config)
            return CasePrediction(predicted=chf,
                                  predicted_power=result.critical_power,
                                  location=result.chf_location)
        result = lut.predict_critical_power(case, table, config)
        scale = result.power_ratio
        local = (scale * case.heat_flux_avg
                 * channel.local_relative_power(case.profile, result.chf_location))
        return CasePrediction(predicted=local,
                              predicted_power=result.critical_power,
                              location=result.chf_location)

    return predictor


def nn_features(case):
    """Feature vector (D, L, P, G, x at the CHF point) or (None, reason)."""
    x, reason = _chf_quality(case)
    if reason:
        return None, reason
    return [case.diameter, case.length, case.pressure, case.mass_flux, x], None


def make_nn_predictor(model):
    def predictor(case) -> CasePrediction:
        features, reason = nn_features(case)
        if reason:
            return CasePrediction(skip_reason=reason)
        value = float(nn.forward(model, [features], mode="infer")[0])
        return CasePrediction(predicted=value)

    return predictor


def resolve_predictor(model_id: str, predictor=None):
    if predictor is not None:
        return predictor
    if model_id == "bowring":
        return bowring_predictor
    if model_id == "biasi":
        return biasi_predictor
    if model_id in ("lut", "nn"):
        raise UnknownModel(
            f"model {model_id!r} needs its artifact (table or model file); "
            "build a predictor with make_lut_predictor/make_nn_predictor")
    raise UnknownModel(f"unknown model id {model_id!r}; "
                       f"known: {', '.join(KNOWN_MODELS)}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _measured(case, compare: str):
    if compare == "power":
        return case.power, None
    if case.heating == "uniform":
        return case.heat_flux_avg, None
    if case.chf_location is None:
        return None, "no_chf_location"
    return (case.heat_flux_avg
            * channel.local_relative_power(case.profile, case.chf_location)), None


def _score_one(case, predictor, compare):
    measured, reason = _measured(case, compare)
    if reason:
        return case, None, reason
    if not measured > 0.0:
        return case, None, "nonpositive_measured"
    try:
        pred = predictor(case)
    except OutOfTable:
        return case, None, "out_of_table"
    except NoConvergence:
        return case, None, "no_convergence"
    except OutOfRange:
        return case, None, "property_range"
    if pred.skip_reason:
        return case, None, pred.skip_reason
    value = pred.predicted_power if compare == "power" else pred.predicted
    if value is None:
        return case, None, "no_power_prediction"
    return case, PerCaseResult(
        case.test_id, measured, value, (value - measured) / measured,
        pred.location), None


def evaluate_model(model_id: str, dataset, predictor=None, *,
                   threads: int = 1, metric: str = "relative",
                   compare: str = "flux") -> EvalReport:
    """Score a predictor on every case of a parsed dataset.

    Deterministic at any `threads` value: workers only compute, the
    reduction runs single-threaded in dataset order.
    """
    predictor = resolve_predictor(model_id, predictor)
    cases = list(dataset)
    heatings = {c.heating for c in cases}
    subset = heatings.pop() if len(heatings) == 1 else "mixed"

    if threads > 1 and cases:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(
                lambda c: _score_one(c, predictor, compare), cases))
    else:
        outcomes = [_score_one(c, predictor, compare) for c in cases]

    per_case, skipped = [], []
    for case, result, reason in outcomes:
        if result is None:
            skipped.append((case.test_id, reason))
        else:
            per_case.append(result)

    n_skipped = {}
    for _, reason in skipped:
        n_skipped[reason] = n_skipped.get(reason, 0) + 1

    if per_case:
        pairs = [(r.measured, r.predicted) for r in per_case]
        rmse = rmse_percent(pairs, metric)
        bias = math.fsum(r.relative_error for r in per_case) / len(per_case)
    else:
        rmse = None
        bias = None

    loc_errors = [abs(r.predicted_location - c.chf_location)
                  for (c, r, _) in outcomes
                  if r is not None and r.predicted_location is not None
                  and c.chf_location is not None]
    location_mae = (math.fsum(loc_errors) / len(loc_errors)
                    if loc_errors else None)

    return EvalReport(
        model_id=model_id, subset=subset, metric=metric, compare=compare,
        n_cases=len(per_case), n_skipped=n_skipped, rmse_percent=rmse,
        mean_relative_error=bias, location_mae=location_mae,
        per_case=tuple(per_case), skipped_cases=tuple(skipped))


# ---------------------------------------------------------------------------
# report export
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def export_parity(report: EvalReport, out) -> list:
    """Write parity.tsv, summary.txt, and parity.svg under directory `out`.

    File bodies are byte-deterministic for identical reports (no
    timestamps, fixed SVG hash salt). Returns the written paths.
    """
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out, exist_ok=True)
    tsv_path = os.path.join(out, "parity.tsv")
    txt_path = os.path.join(out, "summary.txt")
    svg_path = os.path.join(out, "parity.svg")

    with open(tsv_path, "w") as f:
        f.write("test_id\tmeasured\tpredicted\trelative_error"
                "\tpredicted_location\tskip_reason\n")
        for r in report.per_case:
            f.write(f"{r.test_id}\t{_fmt(r.measured)}\t{_fmt(r.predicted)}"
                    f"\t{_fmt(r.relative_error)}"
                    f"\t{_fmt(r.predicted_location)}\t\n")
        for test_id, reason in report.skipped_cases:
            f.write(f"{test_id}\t\t\t\t\t{reason}\n")

    with open(txt_path, "w") as f:
        f.write(f"model: {report.model_id}\n")
        f.write(f"subset: {report.subset}\n")
        f.write(f"metric: {report.metric}\n")
        f.write(f"compare: {report.compare}\n")
        f.write(f"n_cases: {report.n_cases}\n")
        f.write(f"n_skipped: {sum(report.n_skipped.values())}\n")
        for reason in sorted(report.n_skipped):
            f.write(f"  skip.{reason}: {report.n_skipped[reason]}\n")
        f.write(f"rmse_percent: {_fmt(report.rmse_percent)}\n")
        f.write(f"mean_relative_error: {_fmt(report.mean_relative_error)}\n")
        f.write(f"location_mae_m: {_fmt(report.location_mae)}\n")

    with matplotlib.rc_context({"svg.hashsalt": "chfkit"}):
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        if report.per_case:
            xs = [r.measured for r in report.per_case]
            ys = [r.predicted for r in report.per_case]
            ax.scatter(xs, ys, s=12, alpha=0.6, edgecolors="none")
            lim = (0.0, max(max(xs), max(ys)) * 1.05)
        else:
            lim = (0.0, 1.0)
        ax.plot(lim, lim, "k-", linewidth=1.0, label="y = x")
        if report.rmse_percent is not None:
            band = report.rmse_percent / 100.0
            ax.plot(lim, [v * (1 + band) for v in lim], "k--", linewidth=0.8,
                    label=f"±{report.rmse_percent:.1f}%")
            ax.plot(lim, [v * (1 - band) for v in lim], "k--", linewidth=0.8)
        ax.set_xlim(lim)
        ax.set_ylim(lim)
        ax.set_xlabel("measured CHF")
        ax.set_ylabel("predicted CHF")
        ax.set_title(f"{report.model_id} ({report.subset})")
        ax.legend(loc="upper left", fontsize=8)
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    return [tsv_path, txt_path, svg_path]
