"""Hyperparameter search: sampled configurations scored by k-fold CV F1.

The baseline strategy samples each hyperparameter independently from its
declared distribution and keeps the configuration with the highest mean
10-fold macro-F1 (ties go to the earlier sample).  Adaptive strategies can
be plugged in behind the same sample -> cross-validate -> argmax contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import DEFAULT_SEARCH_SPACES, ModelSpec, default_spec_dict, train_model
from .dataset import Dataset, fit_scaling, kfold_splits
from .errors import ConfigError, CrossValidationError, SearchError
from .evaluation import compute_metrics
from .synth import derive_seed


class Distribution:
    def sample(self, rng):
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"uniform requires lo < hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng):
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class LogUniform(Distribution):
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ConfigError(
                f"log_uniform requires 0 < lo < hi, got [{self.lo}, {self.hi}]"
            )

    def sample(self, rng):
        return float(np.exp(rng.uniform(np.log(self.lo), np.log(self.hi))))


@dataclass(frozen=True)
class IntegerRange(Distribution):
    lo: int
    hi: int  # inclusive

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(
                f"integer_range requires lo < hi, got [{self.lo}, {self.hi}]"
            )

    def sample(self, rng):
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class Categorical(Distribution):
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ConfigError("categorical requires at least one value")

    def sample(self, rng):
        choice = self.values[int(rng.integers(0, len(self.values)))]
        return list(choice) if isinstance(choice, (list, tuple)) else choice


_DIST_TYPES = {
    "uniform": lambda d: Uniform(float(d["lo"]), float(d["hi"])),
    "log_uniform": lambda d: LogUniform(float(d["lo"]), float(d["hi"])),
    "integer_range": lambda d: IntegerRange(int(d["lo"]), int(d["hi"])),
    "categorical": lambda d: Categorical(tuple(
        tuple(v) if isinstance(v, list) else v for v in d["values"])),
}


@dataclass(frozen=True)
class SearchSpace:
    """Per-hyperparameter distributions plus fixed values merged into each draw."""

    family: str
    distributions: dict
    fixed: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, family: str, space: dict, fixed: dict | None = None):
        dists = {}
        for name, d in space.items():
            kind = d.get("type")
            if kind not in _DIST_TYPES:
                raise ConfigError(
                    f"hyperparameter '{name}': unknown distribution '{kind}'"
                )
            dists[name] = _DIST_TYPES[kind](d)
        return cls(family, dists, dict(fixed or {}))

    @classmethod
    def default_for(cls, family: str):
        if family not in DEFAULT_SEARCH_SPACES:
            raise ConfigError(f"no default search space for family '{family}'")
        return cls.from_dict(family, DEFAULT_SEARCH_SPACES[family])


def sample_configs(space: SearchSpace, n: int, seed: int = 0) -> list[ModelSpec]:
    """n independent configuration draws; deterministic given the seed.

    Each config starts from the family defaults, overlays the space's fixed
    values, then samples every distribution in sorted hyperparameter order.
    Config i trains with its own derived model seed, recorded in the
    returned ModelSpec so the winner can be retrained identically.
    """
    if n < 1:
        raise ConfigError("need n >= 1 configurations")
    rng = np.random.default_rng(seed)
    configs = []
    for i in range(n):
        try:
            params = default_spec_dict(space.family)
        except KeyError:
            params = {}
        params.update(space.fixed)
        for name in sorted(space.distributions):
            params[name] = space.distributions[name].sample(rng)
        configs.append(ModelSpec(space.family, params,
                                 seed=derive_seed(seed, "model", i)))
    return configs


@dataclass(frozen=True)
class CVResult:
    mean_f1: float
    fold_f1: tuple


def cross_validate(dataset: Dataset, spec: ModelSpec, k: int = 10, seed: int = 0,
                   scale_mode: str = "full") -> CVResult:
    """Mean and per-fold macro-F1 over stratified k-fold CV.

    scale_mode "full" scales with min/max fitted on the whole dataset (the
    reported-procedure default); "train" refits inside each fold.
    """
    splits = kfold_splits(dataset, k=k, stratified=True, seed=seed)
    full_scaling = fit_scaling(dataset.X) if scale_mode == "full" else None
    fold_scores = []
    for fold, (train_idx, val_idx) in enumerate(splits):
        try:
            model = train_model(dataset.subset(train_idx), spec,
                                scaling=full_scaling)
        except Exception as exc:
            raise CrossValidationError(fold, exc) from exc
        predicted = model.predict_scores(dataset.X[val_idx]).argmax(axis=1)
        confusion = np.zeros((dataset.n_classes, dataset.n_classes), dtype=np.int64)
        for truth, guess in zip(dataset.y[val_idx], predicted):
            confusion[truth, guess] += 1
        fold_scores.append(compute_metrics(confusion).f1)
    return CVResult(float(np.mean(fold_scores)), tuple(fold_scores))


@dataclass(frozen=True)
class Trial:
    index: int
    spec: ModelSpec
    mean_f1: float | None
    error: str | None = None


@dataclass(frozen=True)
class SearchResult:
    best_spec: ModelSpec
    best_score: float
    trials: tuple


def select_best(dataset: Dataset, space: SearchSpace, n: int, seed: int = 0,
                k: int = 10, scale_mode: str = "full",
                sampler=sample_configs) -> SearchResult:
    """argmax of mean CV F1 over n sampled configs; ties keep the earlier one.

    The sampling strategy is pluggable: any callable (space, n, seed) ->
    [ModelSpec] fits; the default is independent random sampling.
    """
    configs = sampler(space, n, seed)
    trials = []
    best_spec = None
    best_score = -np.inf
    for i, spec in enumerate(configs):
        try:
            result = cross_validate(dataset, spec, k=k, seed=seed,
                                    scale_mode=scale_mode)
        except Exception as exc:
            trials.append(Trial(i, spec, None, error=str(exc)))
            continue
        trials.append(Trial(i, spec, result.mean_f1))
        if result.mean_f1 > best_score:
            best_score = result.mean_f1
            best_spec = spec
    if best_spec is None:
        failures = "; ".join(f"config {t.index}: {t.error}" for t in trials)
        raise SearchError(f"all {n} configurations failed: {failures}")
    return SearchResult(best_spec, float(best_score), tuple(trials))
