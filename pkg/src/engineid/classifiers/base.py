"""Model specification and the trained-model container + JSON persistence.

A TrainedModel carries everything prediction needs: the learned parameters,
the label map (class id -> manufacturer), the feature layout it expects and
the scaling state fitted at training time, which predict() applies to raw
vectors internally.  Model files are versioned JSON; floats round-trip at
full precision via the standard repr-based serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dataset import ScalingState, apply_scaling
from ..errors import LayoutError, ModelFormatError

MODEL_FORMAT_VERSION = 1

FAMILIES = (
    "knn",
    "decision_tree",
    "random_forest",
    "logistic_regression",
    "linear_svc",
    "sgd_classifier",
    "mlp",
    "gbt",
    "gbt_rf",
)


@dataclass(frozen=True)
class ModelSpec:
    """Family name, hyperparameter map and training seed."""

    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES and self.family not in _EXTRA_FAMILIES:
            raise ValueError(f"unknown model family: {self.family}")

    def with_seed(self, seed: int) -> "ModelSpec":
        return ModelSpec(self.family, dict(self.hyperparameters), seed)

    def get(self, name, default=None):
        return self.hyperparameters.get(name, default)

    def to_dict(self):
        return {
            "family": self.family,
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], dict(data.get("hyperparameters", {})),
                   int(data.get("seed", 0)))


# Test/extension hook: families registered at runtime (see classifiers.register_family).
_EXTRA_FAMILIES: set = set()


class TrainedModel:
    def __init__(self, spec: ModelSpec, predictor, label_map, scaling: ScalingState,
                 layout):
        self.spec = spec
        self.predictor = predictor
        self.label_map = list(label_map)
        self.scaling = scaling
        self.layout = tuple((str(n), int(d)) for n, d in layout)
        self.dimension = sum(d for _, d in self.layout)

    @property
    def n_classes(self):
        return len(self.label_map)

    def predict_scores(self, X) -> np.ndarray:
        """Scores [n, n_classes] for raw (unscaled) row vectors."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.dimension:
            raise LayoutError(
                f"vector has {X.shape[1]} values, model expects {self.dimension}"
            )
        return self.predictor.predict_scores(apply_scaling(X, self.scaling))

    def predict(self, vector):
        """(label, per-class scores) for one raw vector; ties -> lowest class id."""
        scores = self.predict_scores(np.asarray(vector, dtype=np.float64)[None, :])[0]
        return self.label_map[int(np.argmax(scores))], scores

    def predict_labels(self, X) -> list:
        scores = self.predict_scores(X)
        return [self.label_map[i] for i in np.argmax(scores, axis=1)]


def save_model(model: TrainedModel, path) -> None:
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "family": model.spec.family,
        "hyperparameters": model.spec.hyperparameters,
        "seed": model.spec.seed,
        "label_map": model.label_map,
        "scaling": {
            "min": model.scaling.minimum.tolist(),
            "max": model.scaling.maximum.tolist(),
        },
        "layout": [[name, dim] for name, dim in model.layout],
        "parameters": model.predictor.to_params(),
    }
    Path(path).write_text(json.dumps(document, sort_keys=True))


def load_model(path) -> TrainedModel:
    from . import predictor_from_params  # deferred: avoids import cycle

    try:
        document = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format_version {version} unsupported "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    for key in ("family", "label_map", "scaling", "layout", "parameters"):
        if key not in document:
            raise ModelFormatError(f"{path}: missing key '{key}'")
    spec = ModelSpec(document["family"], dict(document["hyperparameters"]),
                     int(document["seed"]))
    scaling = ScalingState(
        np.asarray(document["scaling"]["min"], dtype=np.float64),
        np.asarray(document["scaling"]["max"], dtype=np.float64),
    )
    predictor = predictor_from_params(document["family"], document["parameters"])
    return TrainedModel(spec, predictor, document["label_map"], scaling,
                        [(n, d) for n, d in document["layout"]])
