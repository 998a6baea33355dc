"""Versioned default hyperparameters and search spaces per model family.

The source experiments report no winning configurations, so these defaults
are declared here, shipped with the package, and echoed into every report
for provenance.  Bump DEFAULTS_VERSION when a value changes.
"""

DEFAULTS_VERSION = "2025.1"

DEFAULT_HYPERPARAMETERS = {
    "knn": {"k": 5},
    "decision_tree": {"max_depth": None, "min_samples_split": 2},
    "random_forest": {
        "n_trees": 20,
        "max_features": 0.05,
        "max_depth": None,
        "min_samples_split": 2,
        "bootstrap": True,
    },
    "logistic_regression": {
        "loss": "logistic",
        "epochs": 100,
        "learning_rate": 2.0,
        "l2": 1e-4,
        "batch_size": None,
    },
    "linear_svc": {
        "loss": "hinge",
        "epochs": 25,
        "learning_rate": 1.0,
        "l2": 1e-4,
        "batch_size": 32,
    },
    "sgd_classifier": {
        "loss": "logistic",
        "epochs": 4,
        "learning_rate": 1.0,
        "l2": 1e-4,
        "batch_size": 1,
    },
    "mlp": {
        "hidden_layers": [16],
        "activation": "relu",
        "epochs": 80,
        "learning_rate": 0.1,
        "momentum": 0.9,
        "l2": 0.0,
        "batch_size": None,
    },
    "gbt": {
        "n_rounds": 30,
        "learning_rate": 0.3,
        "max_depth": 3,
        "min_samples_split": 2,
        "subsample": 1.0,
    },
    "gbt_rf": {
        "n_rounds": 30,
        "learning_rate": 0.3,
        "max_depth": 3,
        "min_samples_split": 2,
        "subsample": 0.8,
    },
}

# Default random-search spaces, by family.  Schema matches tuning.SearchSpace:
# {"name": {"type": "integer_range"|"uniform"|"log_uniform"|"categorical", ...}}
DEFAULT_SEARCH_SPACES = {
    "knn": {"k": {"type": "integer_range", "lo": 1, "hi": 15}},
    "decision_tree": {
        "max_depth": {"type": "integer_range", "lo": 2, "hi": 20},
        "min_samples_split": {"type": "integer_range", "lo": 2, "hi": 10},
    },
    "random_forest": {
        "n_trees": {"type": "integer_range", "lo": 5, "hi": 40},
        "max_features": {"type": "uniform", "lo": 0.02, "hi": 0.3},
    },
    "logistic_regression": {
        "learning_rate": {"type": "log_uniform", "lo": 0.1, "hi": 5.0},
        "l2": {"type": "log_uniform", "lo": 1e-6, "hi": 1e-2},
        "epochs": {"type": "integer_range", "lo": 50, "hi": 200},
    },
    "linear_svc": {
        "learning_rate": {"type": "log_uniform", "lo": 0.1, "hi": 5.0},
        "l2": {"type": "log_uniform", "lo": 1e-6, "hi": 1e-2},
        "epochs": {"type": "integer_range", "lo": 10, "hi": 50},
    },
    "sgd_classifier": {
        "learning_rate": {"type": "log_uniform", "lo": 0.1, "hi": 5.0},
        "loss": {"type": "categorical", "values": ["logistic", "hinge"]},
        "epochs": {"type": "integer_range", "lo": 2, "hi": 10},
    },
    "mlp": {
        "hidden_layers": {"type": "categorical", "values": [[8], [16], [32], [16, 16]]},
        "learning_rate": {"type": "log_uniform", "lo": 0.05, "hi": 1.0},
        "activation": {"type": "categorical", "values": ["relu", "tanh"]},
        "epochs": {"type": "integer_range", "lo": 40, "hi": 120},
    },
    "gbt": {
        "n_rounds": {"type": "integer_range", "lo": 10, "hi": 60},
        "learning_rate": {"type": "uniform", "lo": 0.05, "hi": 0.8},
        "max_depth": {"type": "integer_range", "lo": 2, "hi": 6},
    },
    "gbt_rf": {
        "n_rounds": {"type": "integer_range", "lo": 10, "hi": 60},
        "learning_rate": {"type": "uniform", "lo": 0.05, "hi": 0.8},
        "max_depth": {"type": "integer_range", "lo": 2, "hi": 6},
        "subsample": {"type": "uniform", "lo": 0.5, "hi": 1.0},
    },
}


def default_spec_dict(family: str) -> dict:
    return dict(DEFAULT_HYPERPARAMETERS[family])
