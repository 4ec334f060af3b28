import numpy as np
import pytest

from confcf.datasets import income_schema, make_income_rows
from confcf.model import LogisticModel, TrainingConfig, train
from confcf.tabular import (
    CATEGORICAL,
    CONTINUOUS,
    DistanceWeights,
    FeatureSchema,
    FeatureSpec,
    Instance,
    mad_weights,
)


@pytest.fixture(scope="session")
def income_fixture():
    """Trained seven-feature income model with its data and weights."""
    config = income_schema()
    rows = make_income_rows(2000, seed=7)
    instances = [
        config.schema.instance_from_mapping(
            {k: v for k, v in row.items() if k != config.label_column}
        )
        for row in rows
    ]
    labels = [row[config.label_column] for row in rows]
    model = train(instances, labels, config.schema, TrainingConfig(), config.class_labels)
    weights = mad_weights(instances, config.schema)
    return config, instances, labels, model, weights


@pytest.fixture
def toy_1d():
    """Single continuous feature on [0, 10] with unit coefficient and weight."""
    schema = FeatureSchema((FeatureSpec("x", CONTINUOUS, lower=0.0, upper=10.0),))
    model = LogisticModel(
        bias=0.0, coefficients=np.array([1.0]), class_labels=("neg", "pos")
    )
    weights = DistanceWeights({"x": 1.0}, {})
    return schema, model, weights, Instance((2.0,))


@pytest.fixture
def mixed_schema():
    schema = FeatureSchema(
        (
            FeatureSpec("color", CATEGORICAL, levels=("A", "B", "C")),
            FeatureSpec("x", CONTINUOUS, lower=0.0, upper=10.0),
        )
    )
    return schema
