"""Command-line surface: synth, extract, tune, evaluate, predict.

Parameter resolution order is explicit flag > --config file entry > built-in
default; unknown config keys are rejected.  Every artifact embeds (or sits
next to) the fully resolved configuration, so runs are reproducible from
their outputs alone.  Exit codes: 0 success, 1 expected/domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import classifiers, dsp, report as report_mod, synth
from .audio_io import load_manifest, load_wav
from .dataset import DatasetRow, build_variant, read_feature_csv, write_feature_csv
from .errors import EngineIdError, IncompleteGridError
from .evaluation import evaluate_loo
from .features import FeatureExtractor
from .segmentation import VALID_MULTIPLIERS, plan_segmentation, segment
from .tuning import SearchSpace, select_best
from .utils import parallel_map

_UNSET = object()


class UsageError(Exception):
    pass


_COMMON_DEFAULTS = {"seed": 0, "threads": 1}

_COMMAND_DEFAULTS = {
    "synth": {**_COMMON_DEFAULTS, "spec_file": None, "out": "corpus"},
    "extract": {**_COMMON_DEFAULTS, "manifest": None, "out": "features.csv",
                "multipliers": "1,2,5"},
    "tune": {**_COMMON_DEFAULTS, "features": None, "rpm": 2000, "multiplier": 1,
             "family": "knn", "space": None, "n": 10, "folds": 10,
             "scale_mode": "full", "out": "best_spec.json", "model_out": None},
    "evaluate": {**_COMMON_DEFAULTS, "features": None, "out_dir": "report",
                 "families": ",".join(classifiers.FAMILIES), "grid": "auto",
                 "group_mode": "none", "specs": None, "tune_n": 0, "folds": 10,
                 "scale_mode": "full"},
    "predict": {**_COMMON_DEFAULTS, "model": None, "wav": None, "multiplier": 1},
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="engineid",
        description="Identify a car's manufacturer from its engine sound.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=_UNSET)
        p.add_argument("--threads", type=int, default=_UNSET)
        p.add_argument("--config", default=None,
                       help="JSON file with defaults for this command")

    p = sub.add_parser("synth", help="generate a synthetic engine corpus")
    p.add_argument("--out", default=_UNSET, help="output directory")
    p.add_argument("--spec-file", dest="spec_file", default=_UNSET,
                   help="corpus spec JSON (default: built-in 5-profile corpus)")
    add_common(p)

    p = sub.add_parser("extract", help="extract feature vectors to CSV")
    p.add_argument("--manifest", default=_UNSET, help="recording manifest CSV")
    p.add_argument("--out", default=_UNSET, help="output feature CSV")
    p.add_argument("--multipliers", default=_UNSET,
                   help="comma list of window multipliers (subset of 1,2,5)")
    add_common(p)

    p = sub.add_parser("tune", help="hyperparameter search on one variant")
    p.add_argument("--features", default=_UNSET, help="feature CSV")
    p.add_argument("--rpm", type=int, default=_UNSET)
    p.add_argument("--multiplier", type=int, default=_UNSET)
    p.add_argument("--family", default=_UNSET,
                   choices=sorted(classifiers.FAMILIES))
    p.add_argument("--space", default=_UNSET,
                   help="search space JSON (default: built-in space)")
    p.add_argument("--n", type=int, default=_UNSET, help="configurations to sample")
    p.add_argument("--folds", type=int, default=_UNSET)
    p.add_argument("--scale-mode", dest="scale_mode", default=_UNSET,
                   choices=["full", "train"])
    p.add_argument("--out", default=_UNSET, help="output JSON for the best spec")
    p.add_argument("--model-out", dest="model_out", default=_UNSET,
                   help="also train the winner on the full variant and save it")
    add_common(p)

    p = sub.add_parser("evaluate", help="LOO-evaluate families over the grid")
    p.add_argument("--features", default=_UNSET, help="feature CSV")
    p.add_argument("--out-dir", dest="out_dir", default=_UNSET)
    p.add_argument("--families", default=_UNSET, help="comma list of families")
    p.add_argument("--grid", default=_UNSET,
                   help='"auto", "all", or cells like "2000:1,1500:2"')
    p.add_argument("--group-mode", dest="group_mode", default=_UNSET,
                   choices=["none", "recording"])
    p.add_argument("--specs", default=_UNSET,
                   help="JSON file {family: hyperparameters} to skip tuning")
    p.add_argument("--tune-n", dest="tune_n", type=int, default=_UNSET,
                   help="search size per cell (0 = use default/provided specs)")
    p.add_argument("--folds", type=int, default=_UNSET)
    p.add_argument("--scale-mode", dest="scale_mode", default=_UNSET,
                   choices=["full", "train"])
    add_common(p)

    p = sub.add_parser("predict", help="predict the manufacturer of one WAV")
    p.add_argument("--model", default=_UNSET, help="trained model JSON")
    p.add_argument("--wav", default=_UNSET, help="recording to classify")
    p.add_argument("--multiplier", type=int, default=_UNSET)
    add_common(p)

    return parser


def _resolve_config(args) -> dict:
    """flag > config file > default; unknown config keys are usage errors."""
    command = args.command
    defaults = dict(_COMMAND_DEFAULTS[command])
    file_values = {}
    if args.config:
        try:
            file_values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(file_values, dict):
            raise UsageError(f"config file {args.config} must hold a JSON object")
        unknown = sorted(set(file_values) - set(defaults))
        if unknown:
            raise UsageError(
                f"config file {args.config}: unknown keys for '{command}': "
                f"{', '.join(unknown)}"
            )
    resolved = dict(defaults)
    resolved.update(file_values)
    for key in defaults:
        flag_value = getattr(args, key, _UNSET)
        if flag_value is not _UNSET:
            resolved[key] = flag_value
    resolved["command"] = command
    return resolved


def _parse_multipliers(text) -> list[int]:
    try:
        values = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad multiplier list: {text!r}")
    if not values or any(v not in VALID_MULTIPLIERS for v in values):
        raise UsageError(
            f"multipliers must be a non-empty subset of {VALID_MULTIPLIERS}"
        )
    return values


def _load_corpus_spec(path, seed) -> synth.CorpusSpec:
    if path is None:
        return synth.CorpusSpec(seed=seed)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read corpus spec {path}: {exc}")
    try:
        profiles = tuple(
            synth.EngineProfile(
                name=p["name"],
                cylinders=int(p.get("cylinders", 4)),
                harmonic_weights=tuple(p.get("harmonic_weights", (1.0, 0.5, 0.25))),
                noise_color_exponent=float(p.get("noise_color_exponent", 1.0)),
                am_depth=float(p.get("am_depth", 0.5)),
                am_rate=float(p.get("am_rate", 2.0)),
                jitter=float(p.get("jitter", 0.01)),
            )
            for p in data["profiles"]
        ) if "profiles" in data else synth.DEFAULT_PROFILES
        return synth.CorpusSpec(
            profiles=profiles,
            recordings_per_profile=int(data.get("recordings_per_profile", 20)),
            rpm_levels=tuple(data.get("rpm_levels", (1000, 1500, 2000))),
            duration=float(data.get("duration", 15.0)),
            snr_db=None if data.get("snr_db", 20.0) is None
            else float(data.get("snr_db", 20.0)),
            seed=seed if seed is not None else int(data.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"corpus spec {path}: {exc}")


def cmd_synth(cfg) -> int:
    spec = _load_corpus_spec(cfg["spec_file"], cfg["seed"])
    manifest = synth.build_corpus(spec, cfg["out"])
    run_file = Path(cfg["out"]) / "corpus.run.json"
    run_file.write_text(json.dumps({"config": cfg}, sort_keys=True, indent=2) + "\n")
    print(manifest)
    return 0


def _extract_recording(job):
    meta, multipliers, extractor = job
    wav = load_wav(meta.path)
    estimate = dsp.estimate_tempo(
        dsp.onset_envelope(wav.samples, sample_rate=wav.sample_rate)
    )
    rows = []
    for multiplier in multipliers:
        plan = plan_segmentation(wav, multiplier, tempo=estimate)
        for seg in segment(wav, plan):
            rows.append(DatasetRow(
                source_id=wav.source_id,
                segment_index=seg.index,
                manufacturer=meta.manufacturer,
                model=meta.model,
                rpm=meta.rpm,
                multiplier=multiplier,
                features=extractor.extract(seg.samples),
            ))
    return rows


def cmd_extract(cfg) -> int:
    if cfg["manifest"] is None:
        raise UsageError("extract requires --manifest")
    multipliers = _parse_multipliers(cfg["multipliers"])
    metas = load_manifest(cfg["manifest"])
    extractor = FeatureExtractor()

    def safe(job):
        try:
            return _extract_recording(job), None
        except Exception as exc:
            return None, (job[0].path, str(exc))

    results = parallel_map(safe, [(m, multipliers, extractor) for m in metas],
                           threads=cfg["threads"])
    rows, failures = [], []
    for result, failure in results:
        if failure is not None:
            failures.append(failure)
        else:
            rows.extend(result)
    write_feature_csv(cfg["out"], rows, extractor.layout)
    Path(str(cfg["out"]) + ".run.json").write_text(
        json.dumps({"config": cfg, "n_rows": len(rows),
                    "failures": failures}, sort_keys=True, indent=2) + "\n"
    )
    print(f"{cfg['out']}: {len(rows)} rows from {len(metas) - len(failures)} "
          f"recordings")
    if failures:
        for path, message in failures:
            print(f"FAILED {path}: {message}", file=sys.stderr)
        return 1
    return 0


def _load_space(path, family) -> SearchSpace:
    if path is None:
        return SearchSpace.default_for(family)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read search space {path}: {exc}")
    return SearchSpace.from_dict(family, data.get("space", {}),
                                 data.get("fixed", {}))


def cmd_tune(cfg) -> int:
    if cfg["features"] is None:
        raise UsageError("tune requires --features")
    rows = read_feature_csv(cfg["features"])
    dataset = build_variant(rows, cfg["rpm"], cfg["multiplier"])
    space = _load_space(cfg["space"], cfg["family"])
    result = select_best(dataset, space, n=cfg["n"], seed=cfg["seed"],
                         k=cfg["folds"], scale_mode=cfg["scale_mode"])
    document = {
        "config": cfg,
        "family": cfg["family"],
        "best_spec": result.best_spec.to_dict(),
        "cv_f1": result.best_score,
        "trials": [
            {"index": t.index, "spec": t.spec.to_dict(), "mean_f1": t.mean_f1,
             "error": t.error}
            for t in result.trials
        ],
    }
    Path(cfg["out"]).write_text(json.dumps(document, sort_keys=True, indent=2)
                                + "\n")
    print(f"{cfg['out']}: best cv_f1={result.best_score:.4f}")
    if cfg["model_out"]:
        model = classifiers.train_model(dataset, result.best_spec)
        classifiers.save_model(model, cfg["model_out"])
        print(cfg["model_out"])
    return 0


def _parse_grid(text, rows):
    if text == "auto":
        cells = sorted({(r.rpm, r.multiplier) for r in rows})
        if not cells:
            raise UsageError("feature CSV has no rows")
        return cells
    if text == "all":
        return [(rpm, m) for rpm in (1000, 1500, 2000) for m in (1, 2, 5)]
    cells = []
    for part in str(text).split(","):
        part = part.strip()
        try:
            rpm, multiplier = part.split(":")
            cells.append((int(rpm), int(multiplier)))
        except ValueError:
            raise UsageError(f"bad grid cell {part!r}; expected RPM:MULTIPLIER")
    return cells


def _provided_specs(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read specs file {path}: {exc}")
    return {family: dict(params) for family, params in data.items()}


def cmd_evaluate(cfg) -> int:
    if cfg["features"] is None:
        raise UsageError("evaluate requires --features")
    rows = read_feature_csv(cfg["features"])
    families = [f.strip() for f in str(cfg["families"]).split(",") if f.strip()]
    unknown = [f for f in families if f not in classifiers.FAMILIES]
    if unknown:
        raise UsageError(f"unknown families: {', '.join(unknown)}")
    grid = _parse_grid(cfg["grid"], rows)
    provided = _provided_specs(cfg["specs"])
    group = None if cfg["group_mode"] == "none" else cfg["group_mode"]

    cells = []
    missing = []
    for rpm, multiplier in grid:
        try:
            dataset = build_variant(rows, rpm, multiplier)
        except EngineIdError:
            missing.extend((rpm, multiplier, f) for f in families)
            continue
        for family in families:
            cv_score = None
            if cfg["tune_n"] > 0:
                space = _load_space(None, family)
                search = select_best(dataset, space, n=cfg["tune_n"],
                                     seed=cfg["seed"], k=cfg["folds"],
                                     scale_mode=cfg["scale_mode"])
                spec = search.best_spec
                cv_score = search.best_score
            elif family in provided:
                params = dict(provided[family])
                seed = params.pop("seed", cfg["seed"])
                spec = classifiers.ModelSpec(family, params, seed)
            else:
                spec = classifiers.default_spec(family, seed=cfg["seed"])
            metrics = evaluate_loo(dataset, spec, group=group,
                                   scale_mode=cfg["scale_mode"],
                                   threads=cfg["threads"])
            cells.append(report_mod.CellResult(
                rpm=rpm, multiplier=multiplier, family=family, spec=spec,
                metrics=metrics, n_rows=len(dataset), cv_score=cv_score,
            ))
    if missing:
        raise IncompleteGridError(missing)
    evaluation = report_mod.build_report(
        cells, families, grid,
        config={**cfg, "defaults_version": classifiers.DEFAULTS_VERSION},
    )
    written = report_mod.write_report_files(evaluation, cfg["out_dir"])
    for name in sorted(written):
        print(written[name])
    return 0


def cmd_predict(cfg) -> int:
    if cfg["model"] is None or cfg["wav"] is None:
        raise UsageError("predict requires --model and --wav")
    model = classifiers.load_model(cfg["model"])
    wav = load_wav(cfg["wav"])
    extractor = FeatureExtractor()
    if extractor.dimension != model.dimension:
        raise EngineIdError(
            f"model expects {model.dimension}-dim vectors, extractor yields "
            f"{extractor.dimension}"
        )
    plan = plan_segmentation(wav, cfg["multiplier"])
    segments = segment(wav, plan)
    per_segment = []
    votes = np.zeros(model.n_classes, dtype=np.int64)
    for seg in segments:
        label, scores = model.predict(extractor.extract(seg.samples))
        votes[model.label_map.index(label)] += 1
        per_segment.append({
            "index": seg.index,
            "label": label,
            "scores": [float(s) for s in scores],
        })
    aggregate = model.label_map[int(np.argmax(votes))]
    document = {
        "config": cfg,
        "label": aggregate,
        "classes": model.label_map,
        "votes": votes.tolist(),
        "tempo": plan.tempo,
        "segments": per_segment,
    }
    print(json.dumps(document, sort_keys=True, indent=2))
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "extract": cmd_extract,
    "tune": cmd_tune,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except EngineIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
