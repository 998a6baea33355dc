"""Nine classifier families behind one train/predict contract.

Training always happens on scaled features: the trainer fits (or receives) a
ScalingState, scales the dataset matrix, and stores the state inside the
returned TrainedModel so that prediction on raw vectors applies it
internally.  Every family is deterministic given (spec, seed, data).
"""

from __future__ import annotations

from ..dataset import Dataset, apply_scaling, fit_scaling
from ..errors import ConfigError, TrainingError
from . import forest as _forest
from . import gbt as _gbt
from . import knn as _knn
from . import linear as _linear
from . import mlp as _mlp
from .base import (
    FAMILIES,
    MODEL_FORMAT_VERSION,
    ModelSpec,
    TrainedModel,
    _EXTRA_FAMILIES,
    load_model,
    save_model,
)
from .defaults import (
    DEFAULT_HYPERPARAMETERS,
    DEFAULT_SEARCH_SPACES,
    DEFAULTS_VERSION,
    default_spec_dict,
)

_TRAINERS = {
    "knn": _knn.train,
    "decision_tree": _forest.train_tree,
    "random_forest": _forest.train_forest,
    "logistic_regression": lambda X, y, C, spec: _linear.train(
        X, y, C, spec, default_loss="logistic", default_batch=None,
        default_epochs=100, default_lr=2.0),
    "linear_svc": lambda X, y, C, spec: _linear.train(
        X, y, C, spec, default_loss="hinge", default_batch=32,
        default_epochs=25, default_lr=1.0),
    "sgd_classifier": lambda X, y, C, spec: _linear.train(
        X, y, C, spec, default_loss="logistic", default_batch=1,
        default_epochs=4, default_lr=1.0),
    "mlp": _mlp.train,
    "gbt": lambda X, y, C, spec: _gbt.train(X, y, C, spec, rf_flavor=False),
    "gbt_rf": lambda X, y, C, spec: _gbt.train(X, y, C, spec, rf_flavor=True),
}

_PARAM_DECODERS = {
    "knn": _knn.KnnPredictor.from_params,
    "decision_tree": _forest.TreePredictor.from_params,
    "random_forest": _forest.ForestPredictor.from_params,
    "logistic_regression": _linear.LinearPredictor.from_params,
    "linear_svc": _linear.LinearPredictor.from_params,
    "sgd_classifier": _linear.LinearPredictor.from_params,
    "mlp": _mlp.MlpPredictor.from_params,
    "gbt": _gbt.GbtPredictor.from_params,
    "gbt_rf": _gbt.GbtPredictor.from_params,
}


def register_family(name, trainer, decoder=None):
    """Add a model family at runtime (extension/test hook)."""
    _EXTRA_FAMILIES.add(name)
    _TRAINERS[name] = trainer
    if decoder is not None:
        _PARAM_DECODERS[name] = decoder


def default_spec(family: str, seed: int = 0) -> ModelSpec:
    return ModelSpec(family, default_spec_dict(family), seed)


def train_model(dataset: Dataset, spec: ModelSpec, scaling=None) -> TrainedModel:
    """Train one model on a dataset.

    scaling: a pre-fitted ScalingState (e.g. fitted on the full variant), or
    None to fit min/max on this dataset's own rows.
    """
    if spec.family not in _TRAINERS:
        raise ConfigError(f"no trainer for family '{spec.family}'")
    if len(dataset) == 0:
        raise TrainingError("empty dataset")
    if scaling is None:
        scaling = fit_scaling(dataset.X)
    X = apply_scaling(dataset.X, scaling)
    predictor = _TRAINERS[spec.family](X, dataset.y, dataset.n_classes, spec)
    return TrainedModel(spec, predictor, dataset.class_names, scaling,
                        dataset.layout)


def predict(model: TrainedModel, vector):
    """(label, per-class scores) for one raw feature vector."""
    return model.predict(vector)


def _family_trainer(family):
    def trainer(dataset, spec, scaling=None):
        if spec.family != family:
            raise ConfigError(f"expected a '{family}' spec, got '{spec.family}'")
        return train_model(dataset, spec, scaling)
    trainer.__name__ = f"train_{family}"
    return trainer


train_knn = _family_trainer("knn")
train_tree = _family_trainer("decision_tree")
train_forest = _family_trainer("random_forest")
train_mlp = _family_trainer("mlp")


def train_linear(dataset, spec, scaling=None):
    """LR / LSVC / SGD classifier: any of the linear families."""
    if spec.family not in ("logistic_regression", "linear_svc", "sgd_classifier"):
        raise ConfigError(f"expected a linear family spec, got '{spec.family}'")
    return train_model(dataset, spec, scaling)


def train_gbt(dataset, spec, scaling=None):
    if spec.family not in ("gbt", "gbt_rf"):
        raise ConfigError(f"expected a gbt/gbt_rf spec, got '{spec.family}'")
    return train_model(dataset, spec, scaling)


def predictor_from_params(family, params):
    if family not in _PARAM_DECODERS:
        raise ConfigError(f"no decoder for family '{family}'")
    return _PARAM_DECODERS[family](params)


__all__ = [
    "DEFAULTS_VERSION",
    "DEFAULT_HYPERPARAMETERS",
    "DEFAULT_SEARCH_SPACES",
    "FAMILIES",
    "MODEL_FORMAT_VERSION",
    "ModelSpec",
    "TrainedModel",
    "default_spec",
    "default_spec_dict",
    "load_model",
    "predict",
    "predictor_from_params",
    "register_family",
    "save_model",
    "train_forest",
    "train_gbt",
    "train_knn",
    "train_linear",
    "train_mlp",
    "train_model",
    "train_tree",
]
