"""Dataset schemas, CSV/JSON parsing and serialisation.

A dataset is a list of per-location records plus a declared ternary
climatology q (default uniform).  Each record carries exactly one
forecast representation:

* a ternary triple ``pB, pN, pA``;
* a Gaussian forecast ``mu, sigma`` with its climatology ``mu_c, sigma_c``;
* an ensemble ``members`` (JSON only), resolved against the record's
  climatology ``series``.

Observations are optional and are either a category label (``obs``,
one of B/N/A, case-insensitive) or a raw value (``obs_value``)
categorised against the record's thresholds.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import (
    MissingClimatologySeries,
    MixedRepresentation,
    SchemaError,
    TriscoreError,
)
from .gaussian import scale_params, gaussian_to_ternary, std_normal_quantile
from .simplex import (
    CategoryThresholds,
    ObsCategory,
    TernaryProb,
    UNIFORM,
    empirical_quantiles,
    ensemble_to_ternary,
    make_ternary,
)
from .verification import ForecastObsPair

_TERNARY_FIELDS = ("pB", "pN", "pA")
_GAUSSIAN_FIELDS = ("mu", "sigma", "mu_c", "sigma_c")


@dataclass(frozen=True)
class ForecastRecord:
    """One located forecast with optional observation and climatology."""

    lat: float
    lon: float
    ternary: TernaryProb | None = None
    gaussian: tuple[float, float, float, float] | None = None
    members: tuple[float, ...] | None = None
    obs: ObsCategory | None = None
    obs_value: float | None = None
    series: tuple[float, ...] | None = None

    def __post_init__(self):
        present = [
            name
            for name, val in (
                ("ternary", self.ternary),
                ("gaussian", self.gaussian),
                ("members", self.members),
            )
            if val is not None
        ]
        if len(present) > 1:
            raise MixedRepresentation(f"record mixes {' and '.join(present)} forecasts")
        if not present:
            raise SchemaError("record carries no forecast representation")
        if not (-90.0 <= self.lat <= 90.0):
            raise SchemaError(f"lat = {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise SchemaError(f"lon = {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class Dataset:
    records: tuple[ForecastRecord, ...]
    q: TernaryProb = UNIFORM
    metadata: dict[str, str] = field(default_factory=dict)


def resolve_ternary(record: ForecastRecord, q: TernaryProb) -> TernaryProb:
    """The record's forecast as a ternary value under climatology q."""
    if record.ternary is not None:
        return record.ternary
    if record.gaussian is not None:
        g = scale_params(*record.gaussian)
        return gaussian_to_ternary(g, q)
    if record.series is None:
        raise MissingClimatologySeries(
            "ensemble record needs a climatology series to place thresholds"
        )
    thresholds = empirical_quantiles(list(record.series), q)
    return ensemble_to_ternary(list(record.members), thresholds)


def _record_thresholds(record: ForecastRecord, q: TernaryProb) -> CategoryThresholds:
    if record.series is not None:
        return empirical_quantiles(list(record.series), q)
    if record.gaussian is not None:
        _, _, mu_c, sigma_c = record.gaussian
        return CategoryThresholds(
            mu_c + sigma_c * std_normal_quantile(q.pB),
            mu_c + sigma_c * std_normal_quantile(q.pB + q.pN),
        )
    raise MissingClimatologySeries(
        "cannot categorise a raw observed value without a climatology series"
    )


def resolve_observation(record: ForecastRecord, q: TernaryProb) -> ObsCategory | None:
    """The record's observation as a category, or None if unobserved."""
    if record.obs is not None:
        return record.obs
    if record.obs_value is None:
        return None
    return _record_thresholds(record, q).categorise(record.obs_value)


def pairs_from_dataset(dataset: Dataset) -> list[ForecastObsPair]:
    """Forecast-observation pairs of all observed records, in order."""
    pairs = []
    for i, rec in enumerate(dataset.records):
        try:
            obs = resolve_observation(rec, dataset.q)
            if obs is not None:
                pairs.append(ForecastObsPair(resolve_ternary(rec, dataset.q), obs))
        except TriscoreError as e:
            raise type(e)(f"records[{i}]: {e}") from None
    return pairs


def _parse_float(text: str, where: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SchemaError(f"{what} is not a number: {text!r}", where) from None
    if not math.isfinite(value):
        raise SchemaError(f"{what} is not finite: {text!r}", where)
    return value


def _parse_obs_label(text: str, where: str) -> ObsCategory:
    label = text.strip().upper()
    if label not in ("B", "N", "A"):
        raise SchemaError(f"obs must be one of B/N/A, got {text!r}", where)
    return ObsCategory(label)


def parse_csv(data: bytes) -> Dataset:
    """Parse a CSV dataset; the climatology defaults to uniform.

    The header must name lat, lon and one forecast family (pB/pN/pA or
    mu/sigma/mu_c/sigma_c); obs and obs_value columns are optional.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SchemaError(f"input is not UTF-8: {e}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty CSV input") from None
    header = [h.strip() for h in header]
    known = {"lat", "lon", "obs", "obs_value", *_TERNARY_FIELDS, *_GAUSSIAN_FIELDS}
    for col in header:
        if col not in known:
            raise SchemaError(f"unknown column {col!r}", "row 1")
    for col in ("lat", "lon"):
        if col not in header:
            raise SchemaError(f"missing required column {col!r}", "row 1")
    has_ternary = all(c in header for c in _TERNARY_FIELDS)
    has_gaussian = all(c in header for c in _GAUSSIAN_FIELDS)
    if not has_ternary and not has_gaussian:
        raise SchemaError(
            "header must include pB,pN,pA or mu,sigma,mu_c,sigma_c", "row 1"
        )
    idx = {col: header.index(col) for col in header}

    records = []
    for rownum, row in enumerate(reader, start=2):
        where = f"row {rownum}"
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise SchemaError(
                f"expected {len(header)} fields, got {len(row)}", where
            )

        def cell(col: str) -> str:
            return row[idx[col]].strip() if col in idx else ""

        lat = _parse_float(cell("lat"), where, "lat")
        lon = _parse_float(cell("lon"), where, "lon")
        ternary_cells = [cell(c) for c in _TERNARY_FIELDS] if has_ternary else []
        gaussian_cells = [cell(c) for c in _GAUSSIAN_FIELDS] if has_gaussian else []
        row_ternary = any(ternary_cells)
        row_gaussian = any(gaussian_cells)
        if row_ternary and row_gaussian:
            raise MixedRepresentation(
                "row supplies both ternary and Gaussian fields", where
            )
        ternary = gaussian = None
        if row_ternary:
            vals = [
                _parse_float(c, where, name)
                for name, c in zip(_TERNARY_FIELDS, ternary_cells)
            ]
            try:
                ternary = make_ternary(*vals)
            except TriscoreError as e:
                raise SchemaError(str(e), where) from None
        elif row_gaussian:
            vals = [
                _parse_float(c, where, name)
                for name, c in zip(_GAUSSIAN_FIELDS, gaussian_cells)
            ]
            if vals[1] <= 0.0 or vals[3] <= 0.0:
                raise SchemaError("sigma and sigma_c must be positive", where)
            gaussian = tuple(vals)
        else:
            raise SchemaError("row carries no forecast values", where)

        obs = obs_value = None
        if cell("obs"):
            obs = _parse_obs_label(cell("obs"), where)
        if cell("obs_value"):
            if obs is not None:
                raise SchemaError("row supplies both obs and obs_value", where)
            obs_value = _parse_float(cell("obs_value"), where, "obs_value")
        try:
            records.append(
                ForecastRecord(
                    lat=lat, lon=lon, ternary=ternary, gaussian=gaussian,
                    obs=obs, obs_value=obs_value,
                )
            )
        except SchemaError as e:
            raise SchemaError(str(e), where) from None
    return Dataset(records=tuple(records))


def parse_json(data: bytes) -> Dataset:
    """Parse a JSON dataset: {"q": [...], "metadata": {...}, "records": [...]}."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SchemaError(f"input is not UTF-8: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or "records" not in doc:
        raise SchemaError("top level must be an object with a 'records' array")

    if "q" in doc:
        qv = doc["q"]
        if not (isinstance(qv, list) and len(qv) == 3):
            raise SchemaError("q must be a 3-element array", "q")
        try:
            q = make_ternary(*(float(x) for x in qv))
        except (TriscoreError, TypeError, ValueError) as e:
            raise SchemaError(f"invalid climatology q: {e}", "q") from None
    else:
        q = UNIFORM

    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise SchemaError("metadata must map strings to strings", "metadata")

    records = []
    for i, rec in enumerate(doc["records"]):
        where = f"records[{i}]"
        if not isinstance(rec, dict):
            raise SchemaError("record must be an object", where)

        def num(key: str) -> float | None:
            if key not in rec or rec[key] is None:
                return None
            v = rec[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise SchemaError(f"{key} must be a finite number", f"{where}.{key}")
            return float(v)

        def numlist(key: str) -> tuple[float, ...] | None:
            if key not in rec or rec[key] is None:
                return None
            v = rec[key]
            if not isinstance(v, list) or not v:
                raise SchemaError(f"{key} must be a non-empty array", f"{where}.{key}")
            out = []
            for j, x in enumerate(v):
                if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                    raise SchemaError(f"{key}[{j}] must be a finite number", f"{where}.{key}")
                out.append(float(x))
            return tuple(out)

        lat = num("lat")
        lon = num("lon")
        if lat is None or lon is None:
            raise SchemaError("record needs lat and lon", where)

        tern_vals = [num(k) for k in _TERNARY_FIELDS]
        gauss_vals = [num(k) for k in _GAUSSIAN_FIELDS]
        members = numlist("members")
        has_t = any(v is not None for v in tern_vals)
        has_g = any(v is not None for v in gauss_vals)
        if sum([has_t, has_g, members is not None]) > 1:
            raise MixedRepresentation(
                "record mixes forecast representations", where
            )
        ternary = gaussian = None
        if has_t:
            if any(v is None for v in tern_vals):
                raise SchemaError("pB, pN, pA must all be present", where)
            try:
                ternary = make_ternary(*tern_vals)
            except TriscoreError as e:
                raise SchemaError(str(e), where) from None
        elif has_g:
            if any(v is None for v in gauss_vals):
                raise SchemaError("mu, sigma, mu_c, sigma_c must all be present", where)
            if gauss_vals[1] <= 0.0 or gauss_vals[3] <= 0.0:
                raise SchemaError("sigma and sigma_c must be positive", where)
            gaussian = tuple(gauss_vals)

        obs = None
        if rec.get("obs") is not None:
            if not isinstance(rec["obs"], str):
                raise SchemaError("obs must be a string label", f"{where}.obs")
            obs = _parse_obs_label(rec["obs"], f"{where}.obs")
        obs_value = num("obs_value")
        if obs is not None and obs_value is not None:
            raise SchemaError("record supplies both obs and obs_value", where)

        try:
            records.append(
                ForecastRecord(
                    lat=lat, lon=lon, ternary=ternary, gaussian=gaussian,
                    members=members, obs=obs, obs_value=obs_value,
                    series=numlist("series"),
                )
            )
        except SchemaError as e:
            raise SchemaError(str(e), where) from None
    return Dataset(records=tuple(records), q=q, metadata=dict(metadata))


def write_json(dataset: Dataset) -> bytes:
    """Serialise a dataset; parse_json(write_json(d)) equals d."""
    doc = {
        "q": [dataset.q.pB, dataset.q.pN, dataset.q.pA],
        "metadata": dataset.metadata,
        "records": [],
    }
    for rec in dataset.records:
        obj: dict = {"lat": rec.lat, "lon": rec.lon}
        if rec.ternary is not None:
            obj["pB"], obj["pN"], obj["pA"] = rec.ternary.as_tuple()
        if rec.gaussian is not None:
            obj["mu"], obj["sigma"], obj["mu_c"], obj["sigma_c"] = rec.gaussian
        if rec.members is not None:
            obj["members"] = list(rec.members)
        if rec.series is not None:
            obj["series"] = list(rec.series)
        if rec.obs is not None:
            obj["obs"] = rec.obs.value
        if rec.obs_value is not None:
            obj["obs_value"] = rec.obs_value
        doc["records"].append(obj)
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
