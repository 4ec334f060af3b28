"""Counterfactual explanations of classifier confidence for mixed tabular data."""

from .cfsearch import (
    Counterfactual,
    CounterfactualQuery,
    DeadlineExceededError,
    NoCounterfactualError,
    ProbabilityInterval,
    counterfactual_from_instance,
    find_counterfactuals,
    required_probability_interval,
    verify,
)
from .ice import GridSpec, IceCurve, IcePoint, ice_batch, ice_curve
from .model import (
    LogisticModel,
    ModelError,
    Prediction,
    TrainingConfig,
    confidence,
    load_model,
    predict,
    predict_proba,
    save_model,
    train,
)
from .render import TableDocument, render_plot, render_sentence, render_table
from .tabular import (
    DatasetError,
    DistanceWeights,
    FeatureChange,
    FeatureSchema,
    FeatureSpec,
    Instance,
    SchemaConfig,
    SchemaError,
    decode,
    distance,
    encode,
    load_dataset,
    load_schema,
    mad_weights,
)

__version__ = "0.1.0"
