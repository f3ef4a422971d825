"""Measurement of what a trained classifier internalized, condition by
condition: accuracy, mean-output curves against ideal curves, turning-point
extraction, and per-condition output tables.

All functions are pure over immutable models and datasets.  A "model" is
anything exposing ``outputs(values) -> probabilities`` over raw case rows in
the dataset's canonical feature order; predictions threshold the output at
0.5, ties counting as positive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domains import DomainSchema, SchemaValidationError, build_domain
from .generation import Dataset


# ---------------------------------------------------------------------------
# Reference stubs.  These give the evaluation functions fixed points: the
# condition stub reproduces ideal curves exactly, the label stub has
# accuracy 1.0 on every correctly labelled dataset.
# ---------------------------------------------------------------------------

class ConstantOutputModel:
    """Outputs the same probability for every case."""

    def __init__(self, value: float):
        self.value = float(value)
        self.schema_id = None

    def outputs(self, values) -> np.ndarray:
        return np.full(np.asarray(values).shape[0], self.value)


class ConditionOracleModel:
    """Outputs 1.0 where a named condition holds and 0.0 elsewhere."""

    def __init__(self, schema: DomainSchema, cond_id: str):
        self.schema = schema
        self.schema_id = schema.domain_id
        self.condition = schema.condition(cond_id)

    def outputs(self, values) -> np.ndarray:
        values = np.asarray(values)
        cols = {
            name: values[:, self.schema.index_of(name)]
            for name in self.condition.involved
        }
        return self.condition.fn(cols).astype(np.float64)


class LabelOracleModel:
    """Outputs the true label rule, i.e. a perfect classifier."""

    def __init__(self, schema: DomainSchema):
        self.schema = schema
        self.schema_id = schema.domain_id

    def outputs(self, values) -> np.ndarray:
        return self.schema.label_matrix(np.asarray(values)).astype(np.float64)


def _check_schema(model, dataset: Dataset) -> None:
    model_schema = getattr(model, "schema_id", None)
    if model_schema is not None and model_schema != dataset.schema_id:
        raise SchemaValidationError(
            f"model was built for {model_schema!r} but dataset is "
            f"{dataset.schema_id!r}"
        )


def accuracy(model, dataset: Dataset) -> float:
    """Fraction of cases whose thresholded output equals the stored label."""
    _check_schema(model, dataset)
    predicted = model.outputs(dataset.values) >= 0.5
    return float((predicted == dataset.labels.astype(bool)).mean())


# ---------------------------------------------------------------------------
# Mean-output curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveGroup:
    """One plotted line: mean output at every x for a fixed group value."""

    label: str
    xs: np.ndarray
    means: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class RationaleCurve:
    """Mean model output as a function of one feature, split by another."""

    x_feature: str
    group_feature: str
    groups: tuple[CurveGroup, ...]

    def group(self, label: str) -> CurveGroup:
        for g in self.groups:
            if g.label == label:
                return g
        raise KeyError(f"no group {label!r} (have {[g.label for g in self.groups]})")


IdealCurve = RationaleCurve  # same shape, but all means are exactly 0 or 1


def output_curve(
    model, dataset: Dataset, x_feature: str, group_feature: str
) -> RationaleCurve:
    """Average model outputs over the cases at each (group, x) grid value."""
    _check_schema(model, dataset)
    schema = dataset.schema
    x_spec = schema.feature(x_feature)
    g_spec = schema.feature(group_feature)
    if x_spec.kind != "int_range":
        raise SchemaValidationError(f"{x_feature}: curve x-feature must be numeric")
    if g_spec.kind not in ("boolean", "categorical"):
        raise SchemaValidationError(f"{group_feature}: group feature must be binary")

    outputs = np.asarray(model.outputs(dataset.values), dtype=np.float64)
    xcol = dataset.values[:, schema.index_of(x_feature)]
    gcol = dataset.values[:, schema.index_of(group_feature)]

    groups = []
    for code in (0, 1):
        mask = gcol == code
        xs, inverse = np.unique(xcol[mask], return_inverse=True)
        counts = np.bincount(inverse, minlength=len(xs))
        sums = np.bincount(inverse, weights=outputs[mask], minlength=len(xs))
        groups.append(
            CurveGroup(
                label=str(g_spec.decode(code)),
                xs=xs.astype(np.int64),
                means=sums / counts,
                counts=counts.astype(np.int64),
            )
        )
    return RationaleCurve(x_feature, group_feature, tuple(groups))


_DEDICATED_GRIDS = {
    # (domain, condition) -> (x feature, group feature, xs, cases per grid cell)
    ("welfare", "C1"): ("Age", "Gender", np.arange(5, 101, 5), 1000),
    ("welfare", "C6"): ("Distance", "Type", np.arange(5, 101, 5), 1000),
    ("simplified", "C1"): ("Age", "Gender", np.arange(0, 101), 21),
    ("simplified", "C6"): ("Distance", "Type", np.arange(0, 101, 5), 77),
}


def ideal_curve(domain_id: str, cond_id: str) -> IdealCurve:
    """The 0/1 curve a perfect learner of one condition would produce.

    Supported for the two curve-testable conditions, C1 and C6, on the
    welfare and simplified domains.  Means come from evaluating the schema's
    condition formula over the dedicated test set's grid.
    """
    try:
        x_feature, group_feature, xs, per_cell = _DEDICATED_GRIDS[(domain_id, cond_id)]
    except KeyError:
        raise ValueError(
            f"no ideal curve for condition {cond_id!r} in domain {domain_id!r}; "
            "supported: C1 and C6 on welfare/simplified"
        ) from None
    schema = build_domain(domain_id)
    cond = schema.condition(cond_id)
    g_spec = schema.feature(group_feature)
    groups = []
    for code in (0, 1):
        truth = cond.fn({x_feature: xs, group_feature: np.full(len(xs), code)})
        groups.append(
            CurveGroup(
                label=str(g_spec.decode(code)),
                xs=xs.astype(np.int64),
                means=truth.astype(np.float64),
                counts=np.full(len(xs), per_cell, dtype=np.int64),
            )
        )
    return RationaleCurve(x_feature, group_feature, tuple(groups))


# ---------------------------------------------------------------------------
# Turning points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupTurningPoints:
    label: str
    crossings: tuple[float, ...]
    first: float | None  # None when the curve never crosses 0.5


@dataclass(frozen=True)
class TurningPointReport:
    x_feature: str
    groups: tuple[GroupTurningPoints, ...]

    def first(self, label: str) -> float | None:
        for g in self.groups:
            if g.label == label:
                return g.first
        raise KeyError(f"no group {label!r}")


def turning_points(curve: RationaleCurve) -> TurningPointReport:
    """Every 0.5-crossing of each group's curve, by linear interpolation.

    A segment crosses when its endpoints lie strictly on opposite sides of
    0.5; a point sitting exactly at 0.5 is not a crossing by itself, so a
    flat 0.5 curve reports none.  Crossings are listed in x order and the
    smallest is reported as the turning point.
    """
    groups = []
    for g in curve.groups:
        if len(g.xs) == 0:
            raise ValueError(f"group {g.label!r} has no points")
        rel = g.means - 0.5
        crossings = []
        for i in range(len(g.xs) - 1):
            if rel[i] * rel[i + 1] < 0:
                frac = rel[i] / (rel[i] - rel[i + 1])
                crossings.append(float(g.xs[i] + frac * (g.xs[i + 1] - g.xs[i])))
        groups.append(
            GroupTurningPoints(
                label=g.label,
                crossings=tuple(crossings),
                first=crossings[0] if crossings else None,
            )
        )
    return TurningPointReport(curve.x_feature, tuple(groups))


# ---------------------------------------------------------------------------
# Condition-output tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionTableRow:
    mean_output: float
    count: int
    positive_rate: float  # fraction of cases predicted positive at 0.5


@dataclass(frozen=True)
class ConditionOutputTable:
    condition_id: str
    rows: dict[bool, ConditionTableRow]

    @property
    def accuracy_under_threshold(self) -> float:
        """Accuracy on the dedicated set implied by the per-row positive rates."""
        t, f = self.rows[True], self.rows[False]
        correct = t.positive_rate * t.count + (1.0 - f.positive_rate) * f.count
        return correct / (t.count + f.count)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition_id,
            "false": {
                "mean_output": self.rows[False].mean_output,
                "count": self.rows[False].count,
                "positive_rate": self.rows[False].positive_rate,
            },
            "true": {
                "mean_output": self.rows[True].mean_output,
                "count": self.rows[True].count,
                "positive_rate": self.rows[True].positive_rate,
            },
        }


def condition_table(model, dataset: Dataset, cond_id: str) -> ConditionOutputTable:
    """Mean output among cases where a condition is true versus false."""
    _check_schema(model, dataset)
    schema = dataset.schema
    cond = schema.condition(cond_id)
    cols = {
        name: dataset.values[:, schema.index_of(name)] for name in cond.involved
    }
    truth = np.asarray(cond.fn(cols), dtype=bool)
    if truth.all() or not truth.any():
        raise ValueError(
            f"condition {cond_id!r} never varies in this dataset; a dedicated "
            "set must contain both outcomes"
        )
    outputs = np.asarray(model.outputs(dataset.values), dtype=np.float64)
    rows = {}
    for value in (False, True):
        mask = truth == value
        rows[value] = ConditionTableRow(
            mean_output=float(outputs[mask].mean()),
            count=int(mask.sum()),
            positive_rate=float((outputs[mask] >= 0.5).mean()),
        )
    return ConditionOutputTable(cond_id, rows)


# ---------------------------------------------------------------------------
# Curve deviation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveDeviation:
    max_abs: float
    mean_abs: float
    per_group: dict[str, tuple[float, float]]  # label -> (max_abs, mean_abs)


def curve_deviation(curve: RationaleCurve, ideal: RationaleCurve) -> CurveDeviation:
    """Pointwise |curve - ideal| aggregated per group and overall."""
    if [g.label for g in curve.groups] != [g.label for g in ideal.groups]:
        raise ValueError("curves have different groups")
    per_group = {}
    all_diffs = []
    for got, want in zip(curve.groups, ideal.groups):
        if not np.array_equal(got.xs, want.xs):
            raise ValueError(f"group {got.label!r}: x grids differ")
        diff = np.abs(got.means - want.means)
        per_group[got.label] = (float(diff.max()), float(diff.mean()))
        all_diffs.append(diff)
    stacked = np.concatenate(all_diffs)
    return CurveDeviation(
        max_abs=float(stacked.max()),
        mean_abs=float(stacked.mean()),
        per_group=per_group,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

def write_curve_tsv(curve: RationaleCurve, path: str | Path) -> Path:
    """Plot-ready TSV: one row per (group, x) with mean output and count."""
    path = Path(path)
    lines = ["group\tx\tmean_output\tn"]
    for g in curve.groups:
        for x, mean, n in zip(g.xs, g.means, g.counts):
            lines.append(f"{g.label}\t{int(x)}\t{float(mean)!r}\t{int(n)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_table_json(tables: dict[str, ConditionOutputTable], path: str | Path) -> Path:
    path = Path(path)
    doc = {name: table.to_dict() for name, table in sorted(tables.items())}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path
