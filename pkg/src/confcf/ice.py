"""Per-feature confidence curves for a fixed instance.

An individual-conditional-expectation style sweep: one feature varies over
its level set (categorical) or a regular grid (continuous) while every other
feature stays fixed, and the model's confidence is recorded at each value.
Each point also carries whether the predicted class still matches the
original, so renderers can mark the region where a counterfactual would
cross the decision boundary.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

from .model import LogisticModel, predict
from .tabular import FeatureSchema, Instance, SchemaError


@dataclass(frozen=True)
class GridSpec:
    """Regular grid (lower, upper, step) for sweeping a continuous feature."""

    lower: float
    upper: float
    step: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("grid lower bound must be below its upper bound")
        if not self.step > 0:
            raise ValueError("grid step must be positive")


@dataclass(frozen=True)
class IcePoint:
    value: object  # level name or float
    probability: float
    confidence: float
    same_class: bool


@dataclass(frozen=True)
class IceCurve:
    feature: str
    points: tuple[IcePoint, ...]
    prediction_class: str
    origin_index: int | None


def _grid_values(grid: GridSpec) -> list[float]:
    # include both endpoints; the final partial step is clipped to the upper
    # bound, and accumulated float error within one part in 1e9 of a step is
    # snapped rather than spawning a spurious extra point
    tol = grid.step * 1e-9
    values: list[float] = []
    i = 0
    while True:
        v = grid.lower + i * grid.step
        if v > grid.upper + tol:
            break
        values.append(min(v, grid.upper))
        i += 1
    if not values or values[-1] < grid.upper - tol:
        values.append(grid.upper)
    return values


def ice_curve(
    model: LogisticModel,
    schema: FeatureSchema,
    instance: Instance,
    feature: str,
    grid: GridSpec | None = None,
) -> IceCurve:
    """Sweep one feature and record (probability, confidence) per value.

    Categorical features sweep their full declared level set; continuous
    features sweep ``grid``, defaulting to the schema bounds with a step of
    1/100 of the range.  Mutability is ignored: sweeps are a visualization,
    not a search.  Every point is an ordinary prediction of the modified
    instance, so curve values agree exactly with direct predict calls.
    """
    schema.validate_instance(instance)
    index = schema.index_of(feature)
    spec = schema.features[index]
    original = predict(model, instance, schema)

    if spec.is_categorical:
        if grid is not None:
            raise ValueError(f"feature {feature!r} is categorical; grids apply only to continuous features")
        values: list = list(spec.levels)
        origin_index = spec.levels.index(instance.values[index])
    else:
        if grid is None:
            grid = GridSpec(spec.lower, spec.upper, (spec.upper - spec.lower) / 100.0)
        if grid.lower < spec.lower or grid.upper > spec.upper:
            raise ValueError(
                f"grid [{grid.lower}, {grid.upper}] exceeds bounds "
                f"[{spec.lower}, {spec.upper}] of feature {feature!r}"
            )
        values = _grid_values(grid)
        origin_index = next(
            (k for k, v in enumerate(values) if v == instance.values[index]), None
        )

    points = []
    for v in values:
        pred = predict(model, instance.replace(index, v), schema)
        points.append(
            IcePoint(
                value=v,
                probability=pred.probability,
                confidence=pred.confidence,
                same_class=pred.predicted_class == original.predicted_class,
            )
        )
    return IceCurve(
        feature=feature,
        points=tuple(points),
        prediction_class=original.predicted_class,
        origin_index=origin_index,
    )


def ice_batch(
    model: LogisticModel,
    schema: FeatureSchema,
    instance: Instance,
    features: list[str],
    grids: dict[str, GridSpec] | None = None,
) -> list[IceCurve]:
    """One curve per requested feature, in request order (duplicates kept)."""
    grids = grids or {}
    return [
        ice_curve(model, schema, instance, name, grids.get(name)) for name in features
    ]


def curve_to_csv(curve: IceCurve) -> str:
    """CSV export with columns value, probability, confidence, same_class."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["value", "probability", "confidence", "same_class"])
    for pt in curve.points:
        value = pt.value if isinstance(pt.value, str) else repr(float(pt.value))
        writer.writerow(
            [value, repr(pt.probability), repr(pt.confidence), str(pt.same_class).lower()]
        )
    return buf.getvalue()


def curve_to_plotdata(curve: IceCurve) -> dict:
    """JSON-ready document consumed by the plot renderer and the explorer UI."""
    return {
        "feature": curve.feature,
        "prediction_class": curve.prediction_class,
        "kind": "categorical" if curve.points and isinstance(curve.points[0].value, str) else "continuous",
        "origin_index": curve.origin_index,
        "points": [
            {
                "value": pt.value,
                "probability": pt.probability,
                "confidence": pt.confidence,
                "same_class": pt.same_class,
            }
            for pt in curve.points
        ],
    }
