"""Command-line interface.

Subcommands wire ingestion, verification, recalibration and rendering
together and always emit a machine-readable JSON summary on stdout.
Exit codes: 0 on success, 2 on malformed input (schema errors), 3 on
mathematically invalid values (domain errors).
"""

import json
import sys
from pathlib import Path

import click

from .colors import PaletteParams
from .datasets import (
    Dataset,
    ForecastRecord,
    pairs_from_dataset,
    parse_csv,
    parse_json,
    resolve_observation,
    resolve_ternary,
    write_json,
)
from .errors import DomainError, EmptyDataset, SchemaError, TriscoreError
from .recalibration import QuadraticMap, apply_map, fit_map, recalibration_report
from .scoring import ScoringRule, brier_rule, rps_rule, score
from .simplex import make_ternary
from .svg import RenderConfig, render_forecast_map, render_palette_legend, render_reliability_diagram
from .verification import bin_forecasts, decompose

EXIT_SCHEMA = 2
EXIT_DOMAIN = 3

_IDENTITY_GUARD = 1e-10


def _fail(code: int, err: Exception) -> None:
    click.echo(f"error: {err}", err=True)
    sys.exit(code)


def _guard(fn):
    """Run a command body, mapping package errors to exit codes."""
    try:
        fn()
    except SchemaError as e:
        _fail(EXIT_SCHEMA, e)
    except DomainError as e:
        _fail(EXIT_DOMAIN, e)
    except FileNotFoundError as e:
        _fail(EXIT_SCHEMA, e)


def _read_dataset(path: str) -> Dataset:
    if path == "-":
        data = sys.stdin.buffer.read()
        sniff = data.lstrip()[:1]
        return parse_json(data) if sniff == b"{" else parse_csv(data)
    data = Path(path).read_bytes()
    if path.lower().endswith(".json"):
        return parse_json(data)
    return parse_csv(data)


def _write_bytes(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(path).write_bytes(data)


def _emit_summary(summary: dict, output: str | None) -> None:
    text = json.dumps(summary, indent=2) + "\n"
    if output is not None and output != "-":
        Path(output).write_text(text, encoding="utf-8")
    click.echo(text, nl=False)


def _rule_by_name(name: str) -> ScoringRule:
    return brier_rule() if name == "brier" else rps_rule()


def _palette_from(m: float, theta0: float, anchors: str | None) -> PaletteParams:
    if anchors is None:
        return PaletteParams(m=m, theta0=theta0)
    try:
        table = tuple((float(t), float(h)) for t, h in json.loads(anchors))
    except (ValueError, TypeError, json.JSONDecodeError) as e:
        raise SchemaError(f"invalid hue anchor list: {e}") from None
    return PaletteParams(m=m, theta0=theta0, hue_anchors=table)


def _decomposition_summary(decomp, n_pairs: int, n_bins: int) -> dict:
    if decomp.identity_gap() > _IDENTITY_GUARD:
        raise EmptyDataset(
            f"decomposition identity violated by {decomp.identity_gap():.3e}"
        )
    return {
        "S": decomp.S,
        "U": decomp.U,
        "Z": decomp.Z,
        "R": decomp.R,
        "sqrtS": decomp.sqrt_S,
        "sqrtU": decomp.sqrt_U,
        "sqrtZ": decomp.sqrt_Z,
        "sqrtR": decomp.sqrt_R,
        "q_bar": list(decomp.q_bar.as_tuple()),
        "n_pairs": n_pairs,
        "n_bins": n_bins,
    }


_input_opt = click.option("--input", "-i", "input_path", default="-", show_default=True,
                          help="Input dataset (CSV or JSON); '-' reads stdin.")
_output_opt = click.option("--output", "-o", "output_path", default=None,
                           help="Output file; defaults to stdout.")
_score_opt = click.option("--score", "score_rule", type=click.Choice(["brier", "rps"]),
                          default="brier", show_default=True, help="Scoring rule.")
_nbins_opt = click.option("--nbins", type=int, default=11, show_default=True,
                          help="Simplex lattice resolution for binning.")
_threshold_opt = click.option("--threshold", type=int, default=10, show_default=True,
                              help="Minimum bin count for a dipole to be drawn.")
_m_opt = click.option("--m", type=float, default=0.7, show_default=True,
                      help="Saturation exponent of the palette.")
_theta0_opt = click.option("--theta0", type=float, default=0.0, show_default=True,
                           help="Palette rotation in radians.")
_anchors_opt = click.option("--anchors", default=None,
                            help="Hue anchor table as a JSON list of [t, hue] pairs.")


@click.group()
@click.version_option(package_name="triscore")
def main():
    """Verification, colouring and recalibration of ternary forecasts."""


@main.command()
@_input_opt
@_output_opt
@click.option("--apply-map", "map_path", default=None,
              help="JSON file with 12 recalibration coefficients to apply.")
@click.option("--clip/--no-clip", default=False, show_default=True,
              help="Project recalibrated forecasts back onto the simplex.")
def project(input_path, output_path, map_path, clip):
    """Resolve every record to a ternary forecast; write a JSON dataset.

    Observations are resolved to category labels at the same time, so
    the projected dataset stays verifiable after the Gaussian or
    ensemble context is dropped.
    """

    def body():
        dataset = _read_dataset(input_path)
        mapping = _load_map(map_path) if map_path else None
        records = []
        n_off = 0
        for i, rec in enumerate(dataset.records):
            try:
                p = resolve_ternary(rec, dataset.q)
                obs = resolve_observation(rec, dataset.q)
                if mapping is not None:
                    res = apply_map(mapping, p, clip=clip)
                    if not res.on_simplex:
                        n_off += 1
                    # unclipped off-simplex values fail here as a domain error
                    p = make_ternary(res.pB, res.pN, res.pA)
            except TriscoreError as e:
                raise type(e)(f"records[{i}]: {e}") from None
            records.append(ForecastRecord(lat=rec.lat, lon=rec.lon, ternary=p, obs=obs))
        out = Dataset(records=tuple(records), q=dataset.q, metadata=dataset.metadata)
        _write_bytes(output_path, write_json(out))
        if output_path not in (None, "-"):
            click.echo(json.dumps({
                "output": output_path,
                "n_records": len(records),
                "n_off_simplex": n_off,
            }, indent=2))

    _guard(body)


@main.command(name="score")
@_input_opt
@_output_opt
@_score_opt
def score_cmd(input_path, output_path, score_rule):
    """Mean quadratic score of the observed records."""

    def body():
        dataset = _read_dataset(input_path)
        rule = _rule_by_name(score_rule)
        pairs = pairs_from_dataset(dataset)
        if not pairs:
            raise EmptyDataset("no records carry observations")
        mean = sum(score(rule, p.forecast, p.obs.to_ternary()) for p in pairs) / len(pairs)
        _emit_summary({"rule": score_rule, "mean_score": mean, "n_pairs": len(pairs)},
                      output_path)

    _guard(body)


@main.command()
@_input_opt
@_output_opt
@_score_opt
@_nbins_opt
def verify(input_path, output_path, score_rule, nbins):
    """Bin forecasts and write the score decomposition S = U - Z + R."""

    def body():
        dataset = _read_dataset(input_path)
        rule = _rule_by_name(score_rule)
        pairs = pairs_from_dataset(dataset)
        if not pairs:
            raise EmptyDataset("no records carry observations")
        binned = bin_forecasts(pairs, nbins)
        decomp = decompose(rule, binned)
        summary = _decomposition_summary(decomp, binned.n_pairs, len(binned.bins))
        summary["rule"] = score_rule
        summary["nbins"] = nbins
        _emit_summary(summary, output_path)

    _guard(body)


def _load_map(path: str) -> QuadraticMap:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid coefficients file: {e}") from None
    coeffs = doc.get("coefficients") if isinstance(doc, dict) else doc
    if not (isinstance(coeffs, list) and len(coeffs) == 12):
        raise SchemaError("coefficients must be a JSON array of 12 numbers")
    return QuadraticMap(tuple(float(c) for c in coeffs))


@main.command()
@_input_opt
@_output_opt
@_score_opt
@_nbins_opt
@click.option("--holdout", type=float, default=0.0, show_default=True,
              help="Trailing fraction of pairs reserved for evaluation.")
def calibrate(input_path, output_path, score_rule, nbins, holdout):
    """Fit the quadratic recalibration map and report before/after."""

    def body():
        if not 0.0 <= holdout < 1.0:
            raise EmptyDataset(f"holdout fraction {holdout} outside [0, 1)")
        dataset = _read_dataset(input_path)
        rule = _rule_by_name(score_rule)
        pairs = pairs_from_dataset(dataset)
        if not pairs:
            raise EmptyDataset("no records carry observations")
        n_train = len(pairs) - int(round(holdout * len(pairs)))
        train = pairs[:n_train]
        evaluate = pairs[n_train:] if holdout > 0.0 else pairs
        if not train:
            raise EmptyDataset("holdout leaves no training pairs")
        if not evaluate:
            raise EmptyDataset("holdout leaves no evaluation pairs")
        mapping = fit_map(train, rule)
        report = recalibration_report(evaluate, mapping, rule, nbins)
        summary = {
            "rule": score_rule,
            "nbins": nbins,
            "holdout": holdout,
            "n_train": len(train),
            "n_eval": len(evaluate),
            "coefficients": list(mapping.coeffs),
            "mean_score_before": report.mean_score_before,
            "mean_score_after": report.mean_score_after,
            "n_off_simplex": report.n_off_simplex,
            "before": _decomposition_summary(
                report.before, report.binned_before.n_pairs, len(report.binned_before.bins)
            ),
            "after": _decomposition_summary(
                report.after, report.binned_after.n_pairs, len(report.binned_after.bins)
            ),
        }
        _emit_summary(summary, output_path)

    _guard(body)


@main.command(name="render-map")
@_input_opt
@click.option("--output", "-o", "output_path", required=True, help="SVG output path.")
@_score_opt
@_nbins_opt
@_m_opt
@_theta0_opt
@_anchors_opt
@click.option("--show-skill-circles", is_flag=True, default=False,
              help="Draw skill circles from per-location verification history.")
@click.option("--cell-size", type=float, default=10.0, show_default=True)
@click.option("--width", type=int, default=720, show_default=True)
@click.option("--height", type=int, default=560, show_default=True)
@click.option("--min-pairs", type=int, default=10, show_default=True,
              help="Minimum per-location pairs needed for a circle.")
@click.option("--circle-scale", type=float, default=1.0, show_default=True,
              help="Circle radius in cells at skill 1.")
@click.option("--overlay", "overlay_path", default=None,
              help="JSON file of polylines (arrays of [lat, lon] pairs) drawn over the map.")
def render_map(input_path, output_path, score_rule, nbins, m, theta0, anchors,
               show_skill_circles, cell_size, width, height, min_pairs, circle_scale,
               overlay_path):
    """Render the forecast map as SVG."""

    def body():
        dataset = _read_dataset(input_path)
        config = RenderConfig(
            width_px=width, height_px=height, cell_size_px=cell_size,
            show_skill_circles=show_skill_circles,
            palette=_palette_from(m, theta0, anchors),
            nbins=nbins, min_pairs_for_circle=min_pairs, circle_scale=circle_scale,
        )
        overlay = _load_overlay(overlay_path) if overlay_path else None
        data = render_forecast_map(dataset, config, _rule_by_name(score_rule), overlay)
        _write_bytes(output_path, data)
        click.echo(json.dumps({"output": output_path, "n_records": len(dataset.records)},
                              indent=2))

    _guard(body)


def _load_overlay(path: str) -> list[list[tuple[float, float]]]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return [[(float(lat), float(lon)) for lat, lon in line] for line in doc]
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid overlay file: {e}") from None


@main.command(name="render-reliability")
@_input_opt
@click.option("--output", "-o", "output_path", required=True, help="SVG output path.")
@_score_opt
@_nbins_opt
@_threshold_opt
@click.option("--width", type=int, default=760, show_default=True)
@click.option("--height", type=int, default=700, show_default=True)
def render_reliability(input_path, output_path, score_rule, nbins, threshold, width, height):
    """Render the ternary reliability diagram as SVG."""

    def body():
        dataset = _read_dataset(input_path)
        rule = _rule_by_name(score_rule)
        pairs = pairs_from_dataset(dataset)
        if not pairs:
            raise EmptyDataset("no records carry observations")
        binned = bin_forecasts(pairs, nbins)
        decomp = decompose(rule, binned)
        config = RenderConfig(width_px=width, height_px=height,
                              dipole_threshold=threshold, nbins=nbins)
        data = render_reliability_diagram(binned, decomp, config)
        _write_bytes(output_path, data)
        shown = sum(1 for b in binned.bins if b.count >= threshold)
        click.echo(json.dumps({"output": output_path, "n_bins": len(binned.bins),
                               "n_dipoles": shown}, indent=2))

    _guard(body)


@main.command()
@click.option("--output", "-o", "output_path", required=True, help="SVG output path.")
@click.option("--q", "q_text", default="1/3,1/3,1/3", show_default=True,
              help="Climatology as three comma-separated values (fractions allowed).")
@_m_opt
@_theta0_opt
@_anchors_opt
@click.option("--size", type=int, default=24, show_default=True,
              help="Lattice resolution of the legend.")
def palette(output_path, q_text, m, theta0, anchors, size):
    """Render the colour palette legend as SVG."""

    def body():
        parts = q_text.split(",")
        if len(parts) != 3:
            raise SchemaError(f"q must have three components, got {q_text!r}")
        vals = []
        for part in parts:
            part = part.strip()
            try:
                if "/" in part:
                    num, den = part.split("/")
                    vals.append(float(num) / float(den))
                else:
                    vals.append(float(part))
            except (ValueError, ZeroDivisionError):
                raise SchemaError(f"invalid climatology component {part!r}") from None
        q = make_ternary(*vals)
        data = render_palette_legend(q, _palette_from(m, theta0, anchors), size)
        _write_bytes(output_path, data)
        click.echo(json.dumps({"output": output_path, "size": size}, indent=2))

    _guard(body)


if __name__ == "__main__":
    main()
