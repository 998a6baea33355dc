"""Evaluation report assembly: JSON document, aligned text tables, SVG charts.

One four-column metrics table per (rpm, multiplier) variant, and one grouped
bar chart per window multiplier showing F1 by model family, grouped by rpm.
All rendering is deterministic (fixed float formatting, sorted JSON keys, no
timestamps), so identical inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IncompleteGridError
from .evaluation import MetricsReport

_FAMILY_LABELS = {
    "knn": "KNN",
    "decision_tree": "DT",
    "random_forest": "RF",
    "logistic_regression": "LR",
    "linear_svc": "LSVC",
    "sgd_classifier": "SGD",
    "mlp": "MLP",
    "gbt": "XGB",
    "gbt_rf": "XGBRF",
}

_RPM_COLORS = {1000: "#4878cf", 1500: "#e8a33d", 2000: "#6acc65"}
_FALLBACK_COLOR = "#999999"


def family_label(family: str) -> str:
    return _FAMILY_LABELS.get(family, family)


@dataclass(frozen=True)
class CellResult:
    """LOO metrics of one model family on one dataset variant."""

    rpm: int
    multiplier: int
    family: str
    spec: object  # ModelSpec
    metrics: MetricsReport
    n_rows: int
    cv_score: float | None = None


@dataclass(frozen=True)
class EvaluationReport:
    cells: tuple
    families: tuple
    grid: tuple  # ((rpm, multiplier), ...)
    config: dict = field(default_factory=dict)

    def cell(self, rpm, multiplier, family) -> CellResult:
        for c in self.cells:
            if (c.rpm, c.multiplier, c.family) == (rpm, multiplier, family):
                return c
        raise KeyError((rpm, multiplier, family))

    def variant_cells(self, rpm, multiplier):
        return [self.cell(rpm, multiplier, f) for f in self.families]


def build_report(cells, families, grid, config=None) -> EvaluationReport:
    """Validate grid completeness and freeze the result set.

    Raises IncompleteGridError listing every missing (rpm, multiplier,
    family) combination.
    """
    families = tuple(families)
    grid = tuple((int(r), int(m)) for r, m in grid)
    have = {(c.rpm, c.multiplier, c.family) for c in cells}
    missing = [(r, m, f) for r, m in grid for f in families
               if (r, m, f) not in have]
    if missing:
        raise IncompleteGridError(missing)
    ordered = [next(c for c in cells
                    if (c.rpm, c.multiplier, c.family) == (r, m, f))
               for r, m in grid for f in families]
    return EvaluationReport(tuple(ordered), families, grid,
                            dict(config or {}))


def report_to_json(report: EvaluationReport) -> str:
    variants = []
    for rpm, multiplier in report.grid:
        cells = report.variant_cells(rpm, multiplier)
        variants.append({
            "rpm": rpm,
            "multiplier": multiplier,
            "n_rows": cells[0].n_rows,
            "models": [
                {
                    "family": c.family,
                    "spec": c.spec.to_dict(),
                    "cv_f1": c.cv_score,
                    "accuracy": c.metrics.accuracy,
                    "precision": c.metrics.precision,
                    "recall": c.metrics.recall,
                    "f1": c.metrics.f1,
                    "confusion": c.metrics.confusion.tolist(),
                }
                for c in cells
            ],
        })
    return json.dumps({"config": report.config, "variants": variants},
                      sort_keys=True, indent=2) + "\n"


def render_metrics_table(report: EvaluationReport, rpm, multiplier) -> str:
    """Aligned four-metric table for one variant, percentages to 2 decimals."""
    cells = report.variant_cells(rpm, multiplier)
    header = ["ML Model", "Accuracy (%)", "Precision (%)", "Recall (%)",
              "F1-score (%)"]
    rows = [[family_label(c.family),
             f"{100.0 * c.metrics.accuracy:.2f}",
             f"{100.0 * c.metrics.precision:.2f}",
             f"{100.0 * c.metrics.recall:.2f}",
             f"{100.0 * c.metrics.f1:.2f}"] for c in cells]
    widths = [max(len(header[i]), *(len(r[i]) for r in rows))
              for i in range(len(header))]
    lines = [
        f"Validation results (rpm={rpm}, window={multiplier} tempo, "
        f"n={cells[0].n_rows})",
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def render_f1_chart_svg(report: EvaluationReport, multiplier) -> str:
    """Grouped bar chart: F1 per model family, grouped by rpm, one multiplier.

    Bar height in pixels is exactly f1 * PLOT_H (2-decimal formatting), so
    reported values can be read back from the markup.
    """
    rpms = [r for r, m in report.grid if m == multiplier]
    plot_w, plot_h = 560, 200
    left, top = 60, 40
    n_groups = len(report.families)
    group_w = plot_w / max(n_groups, 1)
    bar_w = min(18.0, group_w / (len(rpms) + 1))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{left + plot_w + 20}" height="{top + plot_h + 70}">',
        f'<text x="{left}" y="20" font-size="14" font-family="sans-serif">'
        f'F1-score of models, window size {multiplier} tempo</text>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="#000"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="#000"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = top + plot_h - tick * plot_h
        parts.append(
            f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
            f'stroke="#000"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" font-size="10" '
            f'text-anchor="end" font-family="sans-serif">{tick:.2f}</text>'
        )
    for g, family in enumerate(report.families):
        group_x = left + g * group_w
        for i, rpm in enumerate(rpms):
            cell = report.cell(rpm, multiplier, family)
            height = cell.metrics.f1 * plot_h
            x = group_x + group_w / 2 + (i - len(rpms) / 2) * bar_w
            y = top + plot_h - height
            color = _RPM_COLORS.get(rpm, _FALLBACK_COLOR)
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" '
                f'height="{height:.2f}" fill="{color}">'
                f'<title>{family_label(family)} rpm={rpm} '
                f'f1={cell.metrics.f1:.4f}</title></rect>'
            )
        parts.append(
            f'<text x="{group_x + group_w / 2:.2f}" y="{top + plot_h + 16}" '
            f'font-size="10" text-anchor="middle" font-family="sans-serif">'
            f'{family_label(family)}</text>'
        )
    for i, rpm in enumerate(rpms):
        x = left + 10 + i * 120
        color = _RPM_COLORS.get(rpm, _FALLBACK_COLOR)
        parts.append(
            f'<rect x="{x}" y="{top + plot_h + 34}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{x + 16}" y="{top + plot_h + 44}" font-size="11" '
            f'font-family="sans-serif">{rpm} rpm</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report_files(report: EvaluationReport, out_dir) -> dict:
    """Write report.json, one table per variant, one chart per multiplier.

    Returns {artifact name: path}.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}

    json_path = out_dir / "report.json"
    json_path.write_text(report_to_json(report))
    written["report.json"] = json_path

    for rpm, multiplier in report.grid:
        name = f"table_rpm{rpm}_mult{multiplier}.txt"
        path = out_dir / name
        path.write_text(render_metrics_table(report, rpm, multiplier))
        written[name] = path

    for multiplier in sorted({m for _, m in report.grid}):
        name = f"f1_by_model_mult{multiplier}.svg"
        path = out_dir / name
        path.write_text(render_f1_chart_svg(report, multiplier))
        written[name] = path
    return written
