"""Dataset assembly: variants, [0, 1] scaling, label encoding and splits.

A dataset variant is the subset of feature rows for one (rpm, multiplier)
pair; the 3 rpm levels x 3 window multipliers give the nine variants the
models are compared on.  Features are min-max normalized per column; by
default the scaler is fitted on the full variant before splitting (the
procedure the results in this domain are usually reported with), and a
split-safe mode that fits on the training portion only is available since
the default leaks holdout statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionError,
    EmptyVariantError,
    SplitError,
    StratificationError,
)
from .features import DEFAULT_CONFIG, canonical_layout, layout_dimension


@dataclass(frozen=True)
class DatasetRow:
    source_id: str
    segment_index: int
    manufacturer: str
    model: str
    rpm: int
    multiplier: int
    features: np.ndarray


@dataclass(frozen=True)
class ScalingState:
    """Per-column min/max of the rows the scaler was fitted on."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        if np.any(self.maximum < self.minimum):
            raise ValueError("scaling state requires max >= min per column")


class Dataset:
    """Immutable row collection with a stable label map and raw feature matrix."""

    def __init__(self, rows, variant=None, layout=None, label_map=None):
        self.rows = list(rows)
        if not self.rows:
            raise EmptyVariantError("dataset has no rows")
        self.variant = variant
        if layout is None:
            dim = len(self.rows[0].features)
            default = canonical_layout(DEFAULT_CONFIG)
            layout = default if layout_dimension(default) == dim else (("f", dim),)
        self.layout = tuple(layout)
        if label_map is None:
            labels = sorted({r.manufacturer for r in self.rows})
            label_map = {label: i for i, label in enumerate(labels)}
        self.label_map = dict(label_map)
        self.X = np.vstack([r.features for r in self.rows])
        self.y = np.array([self.label_map[r.manufacturer] for r in self.rows],
                          dtype=np.int64)

    def __len__(self):
        return len(self.rows)

    @property
    def n_classes(self):
        return len(self.label_map)

    @property
    def class_names(self):
        return [name for name, _ in sorted(self.label_map.items(),
                                           key=lambda kv: kv[1])]

    def subset(self, indices) -> "Dataset":
        """Row subset sharing this dataset's label map, layout and variant."""
        return Dataset([self.rows[i] for i in indices], variant=self.variant,
                       layout=self.layout, label_map=self.label_map)


def build_variant(rows, rpm: int, multiplier: int, layout=None) -> Dataset:
    """Filter rows to one (rpm, multiplier) cell, in stable input order."""
    selected = [r for r in rows if r.rpm == rpm and r.multiplier == multiplier]
    if not selected:
        raise EmptyVariantError(f"no rows for rpm={rpm}, multiplier={multiplier}")
    return Dataset(selected, variant=(rpm, multiplier), layout=layout)


def fit_scaling(X) -> ScalingState:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return ScalingState(X.min(axis=0), X.max(axis=0))


def apply_scaling(X, state: ScalingState) -> np.ndarray:
    """(x - min) / (max - min), clamped to [0, 1]; constant columns map to 0."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != len(state.minimum):
        raise DimensionError(
            f"vector has {X.shape[-1]} columns, scaling state has "
            f"{len(state.minimum)}"
        )
    span = state.maximum - state.minimum
    scaled = np.where(span > 0, (X - state.minimum) / np.where(span > 0, span, 1.0),
                      0.0)
    return np.clip(scaled, 0.0, 1.0)


def kfold_splits(dataset: Dataset, k: int = 10, stratified: bool = True,
                 seed: int = 0):
    """k disjoint (train, validation) index pairs covering every row once.

    Stratified: each class's rows are shuffled and dealt round-robin over the
    folds.  Deterministic given the seed; index arrays are sorted.
    """
    n = len(dataset)
    if k < 2 or k > n:
        raise SplitError(f"k={k} invalid for {n} rows")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    if stratified:
        for class_id in range(dataset.n_classes):
            members = np.flatnonzero(dataset.y == class_id)
            if 0 < len(members) < k:
                name = dataset.class_names[class_id]
                raise StratificationError(
                    f"class '{name}' has {len(members)} rows, fewer than k={k}"
                )
            members = members[rng.permutation(len(members))]
            for i, row in enumerate(members):
                folds[i % k].append(row)
    else:
        order = rng.permutation(n)
        for i, row in enumerate(order):
            folds[i % k].append(row)
    splits = []
    for i in range(k):
        validation = np.sort(np.array(folds[i], dtype=np.int64))
        train = np.sort(np.concatenate(
            [np.array(folds[j], dtype=np.int64) for j in range(k) if j != i]
        ))
        splits.append((train, validation))
    return splits


def loo_splits(dataset: Dataset, group: str | None = None):
    """Leave-one-out (train, holdout) index pairs.

    group=None holds out one row per split; group="recording" holds out all
    segments of one source_id together.
    """
    n = len(dataset)
    everything = np.arange(n)
    if group is None:
        if n < 2:
            raise SplitError("need at least 2 rows for leave-one-out")
        return [(np.delete(everything, i), np.array([i])) for i in range(n)]
    if group == "recording":
        seen = {}
        for i, row in enumerate(dataset.rows):
            seen.setdefault(row.source_id, []).append(i)
        if len(seen) < 2:
            raise SplitError("need at least 2 recordings for grouped leave-one-out")
        splits = []
        for source_id in seen:  # insertion order = row order
            holdout = np.array(seen[source_id], dtype=np.int64)
            train = np.setdiff1d(everything, holdout)
            splits.append((train, holdout))
        return splits
    raise SplitError(f"unknown grouping: {group}")


# -- feature CSV ----------------------------------------------------------------

_META_COLUMNS = ["source_id", "segment_index", "manufacturer", "model", "rpm",
                 "multiplier"]


def write_feature_csv(path, rows, layout=None) -> None:
    """Feature CSV: meta columns then f0..f{D-1} at full float precision."""
    rows = list(rows)
    if layout is None:
        layout = canonical_layout(DEFAULT_CONFIG)
    dim = layout_dimension(layout)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_META_COLUMNS + [f"f{i}" for i in range(dim)])
        for row in rows:
            if len(row.features) != dim:
                raise DimensionError(
                    f"{row.source_id}[{row.segment_index}]: expected {dim} "
                    f"features, got {len(row.features)}"
                )
            writer.writerow(
                [row.source_id, row.segment_index, row.manufacturer, row.model,
                 row.rpm, row.multiplier]
                + [repr(float(v)) for v in row.features]
            )


def read_feature_csv(path) -> list[DatasetRow]:
    path = Path(path)
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[: len(_META_COLUMNS)] != _META_COLUMNS:
            raise DimensionError(
                f"{path}: expected feature CSV header starting with "
                f"{','.join(_META_COLUMNS)}"
            )
        dim = len(header) - len(_META_COLUMNS)
        for row in reader:
            if not row:
                continue
            meta, values = row[: len(_META_COLUMNS)], row[len(_META_COLUMNS):]
            if len(values) != dim:
                raise DimensionError(f"{path}: row for {meta[0]} has wrong width")
            out.append(DatasetRow(
                source_id=meta[0],
                segment_index=int(meta[1]),
                manufacturer=meta[2],
                model=meta[3],
                rpm=int(meta[4]),
                multiplier=int(meta[5]),
                features=np.array([float(v) for v in values]),
            ))
    return out
