"""Experiment harness: seeded sweeps over task grids, with CSV/JSON/SVG output.

Every method in a cell is evaluated on the same tasks (seeds derive from the
global seed and the task's grid position), so per-cell method differences are
paired comparisons.  Evaluation is sequential and order-fixed: rerunning a
sweep or recipe with the same seed produces byte-identical output files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .boolefn import (
    count_threshold,
    threshold_stats,
    verify_xor_worst,
    xor_max_accuracy,
)
from .core import Encoding, Task, task_seed
from .kernels import AttentionConfig, attend_classify, attend_probs, predict
from .prototypes import build_prototypes, proto_classify
from .selection import SelectionConfig, SelectionMode, feature_scores, fs_classify
from .tasks import BooleanTaskSpec, SphereTaskSpec, gen_boolean_task, gen_sphere_task
from .theory import and_boundary

__all__ = [
    "CellResult",
    "METHODS",
    "RECIPES",
    "SweepSpec",
    "emit_csv",
    "emit_json",
    "emit_svg_heatmap",
    "evaluate_method",
    "reproduce",
    "run_sweep",
]

METHODS = ("Attn", "AttnSoftFS", "AttnSoftFSNorm", "AttnTopK", "Proto")


@dataclass(frozen=True)
class SweepSpec:
    """A grid of parity tasks: alpha fixed, r and beta ranging."""

    alpha: int
    r_values: tuple[int, ...]
    beta_values: tuple[int, ...]
    p: float = 0.5
    query_count: int = 32
    encoding: Encoding = Encoding.PLUS_MINUS
    methods: tuple[str, ...] = ("Attn", "AttnSoftFS")
    tasks_per_cell: int = 500
    attention: AttentionConfig = AttentionConfig()
    selection: SelectionConfig = SelectionConfig()
    global_seed: int = 0

    def __post_init__(self):
        if not self.r_values or not self.beta_values:
            raise ValueError("r_values and beta_values must be nonempty")
        if self.tasks_per_cell < 1:
            raise ValueError("tasks_per_cell must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("duplicate method names would collapse into one result")


@dataclass
class CellResult:
    r: int
    beta: int
    tasks: int
    failures: int
    accuracy_mean: dict[str, float]
    accuracy_se: dict[str, float]
    per_task: dict[str, np.ndarray] = field(repr=False, default_factory=dict)


def evaluate_method(
    name: str,
    task: Task,
    attention: AttentionConfig,
    selection: SelectionConfig,
) -> float:
    """Query accuracy of one method on one task."""
    labels = task.query.labels
    if name == "Attn":
        probs = attend_classify(task, attention)
    elif name == "AttnSoftFS":
        probs = fs_classify(task, attention, replace(selection, mode=SelectionMode.SOFT_RESCALE))
    elif name == "AttnSoftFSNorm":
        probs = fs_classify(
            task, attention, replace(selection, mode=SelectionMode.SOFT_RESCALE_NORM)
        )
    elif name == "AttnTopK":
        probs = fs_classify(task, attention, replace(selection, mode=SelectionMode.TOP_K))
    elif name == "Proto":
        probs = proto_classify(task.query.features, build_prototypes(task.support), attention.tau_inv)
    else:
        raise ValueError(f"unknown method {name}")
    return float(np.mean(predict(probs) == labels))


def run_sweep(spec: SweepSpec) -> list[CellResult]:
    """Evaluate every method on every cell of the grid; paired per-task seeds."""
    results = []
    cell_index = 0
    for r in spec.r_values:
        for beta in spec.beta_values:
            accs: dict[str, list[float]] = {m: [] for m in spec.methods}
            failures = 0
            for t in range(spec.tasks_per_cell):
                seed = task_seed(spec.global_seed, cell_index * spec.tasks_per_cell + t)
                task = gen_boolean_task(
                    BooleanTaskSpec(
                        n=spec.alpha + beta,
                        alpha=spec.alpha,
                        p=spec.p,
                        r=r,
                        query_count=spec.query_count,
                        encoding=spec.encoding,
                        seed=seed,
                    )
                )
                for m in spec.methods:
                    try:
                        accs[m].append(evaluate_method(m, task, spec.attention, spec.selection))
                    except ValueError:
                        failures += 1
            mean = {}
            se = {}
            per_task = {}
            for m in spec.methods:
                arr = np.array(accs[m], dtype=np.float64)
                per_task[m] = arr
                mean[m] = float(arr.mean()) if arr.size else float("nan")
                se[m] = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
            results.append(
                CellResult(
                    r=r,
                    beta=beta,
                    tasks=spec.tasks_per_cell,
                    failures=failures,
                    accuracy_mean=mean,
                    accuracy_se=se,
                    per_task=per_task,
                )
            )
            cell_index += 1
    return results


_CSV_COLUMNS = [
    "family",
    "alpha",
    "beta",
    "p",
    "r",
    "method",
    "tasks",
    "accuracy_mean",
    "accuracy_se",
    "seed",
]


def _grid_rows(spec: SweepSpec, grid: list[CellResult], family: str = "xor") -> list[dict]:
    rows = []
    for cell in grid:
        for m in spec.methods:
            rows.append(
                {
                    "family": family,
                    "alpha": spec.alpha,
                    "beta": cell.beta,
                    "p": spec.p,
                    "r": cell.r,
                    "method": m,
                    "tasks": cell.tasks,
                    "accuracy_mean": cell.accuracy_mean[m],
                    "accuracy_se": cell.accuracy_se[m],
                    "seed": spec.global_seed,
                }
            )
    return rows


def emit_csv(spec: SweepSpec, grid: list[CellResult], path: str | Path) -> Path:
    """Write one row per (cell, method); floats via repr so parsing round-trips."""
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in _grid_rows(spec, grid):
        writer.writerow(
            [
                row["family"],
                row["alpha"],
                row["beta"],
                repr(float(row["p"])),
                row["r"],
                row["method"],
                row["tasks"],
                repr(float(row["accuracy_mean"])),
                repr(float(row["accuracy_se"])),
                row["seed"],
            ]
        )
    path.write_text(buf.getvalue())
    return path


def parse_csv(path: str | Path) -> list[dict]:
    """Read a sweep CSV back into typed rows."""
    rows = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                {
                    "family": row["family"],
                    "alpha": int(row["alpha"]),
                    "beta": int(row["beta"]),
                    "p": float(row["p"]),
                    "r": int(row["r"]),
                    "method": row["method"],
                    "tasks": int(row["tasks"]),
                    "accuracy_mean": float(row["accuracy_mean"]),
                    "accuracy_se": float(row["accuracy_se"]),
                    "seed": int(row["seed"]),
                }
            )
    return rows


def emit_json(spec: SweepSpec, grid: list[CellResult], path: str | Path) -> Path:
    path = Path(path)
    payload = {"rows": _grid_rows(spec, grid)}
    path.write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    return path


def _heat_color(accuracy: float) -> str:
    """Linear colour scale pinned to [0.5, 1.0]: cold blue to hot red."""
    t = (accuracy - 0.5) / 0.5
    t = min(1.0, max(0.0, t))
    red = round(40 + 215 * t)
    blue = round(255 - 215 * t)
    return f"#{red:02x}30{blue:02x}"


def emit_svg_heatmap(
    spec: SweepSpec, grid: list[CellResult], method: str, path: str | Path
) -> Path:
    """Cell-coloured accuracy grid (beta on x, r on y) for one method."""
    if method not in spec.methods:
        raise ValueError(f"method {method} not present in sweep")
    path = Path(path)
    cell_px = 36
    margin = 60
    betas = sorted(set(spec.beta_values))
    rs = sorted(set(spec.r_values))
    width = margin + cell_px * len(betas) + 20
    height = margin + cell_px * len(rs) + 20
    lookup = {(c.r, c.beta): c.accuracy_mean[method] for c in grid}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{margin + cell_px * len(betas) / 2:.1f}" y="14" text-anchor="middle" '
        f'font-size="12">{method} accuracy (colour scale 0.5 to 1.0)</text>',
    ]
    for yi, r in enumerate(rs):
        for xi, beta in enumerate(betas):
            acc = lookup[(r, beta)]
            x = margin + xi * cell_px
            y = margin + yi * cell_px
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_px}" height="{cell_px}" '
                f'fill="{_heat_color(acc)}"><title>r={r} beta={beta} acc={acc:.4f}</title></rect>'
            )
    for xi, beta in enumerate(betas):
        parts.append(
            f'<text x="{margin + xi * cell_px + cell_px / 2:.1f}" y="{margin - 8}" '
            f'text-anchor="middle" font-size="10">{beta}</text>'
        )
    for yi, r in enumerate(rs):
        parts.append(
            f'<text x="{margin - 8}" y="{margin + yi * cell_px + cell_px / 2 + 4:.1f}" '
            f'text-anchor="end" font-size="10">{r}</text>'
        )
    parts.append(
        f'<text x="{margin + cell_px * len(betas) / 2:.1f}" y="{margin - 28}" '
        f'text-anchor="middle" font-size="11">irrelevant features (beta)</text>'
    )
    parts.append(
        f'<text x="14" y="{margin + cell_px * len(rs) / 2:.1f}" text-anchor="middle" '
        f'font-size="11" transform="rotate(-90 14 {margin + cell_px * len(rs) / 2:.1f})">'
        "variant repetitions (r)</text>"
    )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path


def _write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    return path


def _recipe_table3_counts(out_dir: Path, seed: int, scale: float) -> list[Path]:
    rows = [
        {"n": n, "count": count_threshold(n), "bound_2_pow_n2": 2 ** (n * n)} for n in (2, 3, 4)
    ]
    return [_write_json(out_dir / "table3_counts.json", rows)]


def _recipe_appd_xor_bound(out_dir: Path, seed: int, scale: float) -> list[Path]:
    rows = []
    for n in (2, 3, 4, 5):
        entry = {
            "n": n,
            "max_agreement": xor_max_accuracy(n),
            "accuracy": xor_max_accuracy(n) / 2**n,
            "verified_worst": None,
        }
        if n <= 4:
            holds, _ = verify_xor_worst(n)
            entry["verified_worst"] = holds
        rows.append(entry)
    stats2 = threshold_stats(2)
    summary = {"solved_fraction_n2": stats2[0], "mean_best_accuracy_n2": stats2[1]}
    return [
        _write_json(out_dir / "appD_xor_bound.json", rows),
        _write_json(out_dir / "appD_stats_n2.json", summary),
    ]


def _recipe_appc_boundary(out_dir: Path, seed: int, scale: float) -> list[Path]:
    from .core import LabeledSet

    corners = np.array([[1.0, 1.0], [-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0]])
    labels = np.array([1, 0, 0, 0])
    support = LabeledSet(corners, labels, k=2)
    paths = []
    for tau in (1.0, 2.0):
        xs = np.linspace(0.2, 5.0, 50)
        ys = and_boundary(tau, xs)
        pts = np.column_stack([xs, ys])
        probs = attend_probs(pts, support, AttentionConfig(tau_inv=tau))
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau_inv", "x", "y", "p0", "p1", "gap"])
        for i in range(xs.shape[0]):
            writer.writerow(
                [
                    repr(tau),
                    repr(float(xs[i])),
                    repr(float(ys[i])),
                    repr(float(probs[i, 0])),
                    repr(float(probs[i, 1])),
                    repr(float(abs(probs[i, 1] - probs[i, 0]))),
                ]
            )
        path = out_dir / f"appC_boundary_tau{tau:g}.csv"
        path.write_text(buf.getvalue())
        paths.append(path)
    return paths


def _recipe_fig5_sphere(out_dir: Path, seed: int, scale: float) -> list[Path]:
    tasks = max(2, int(200 * scale))
    sample_count = max(16, int(1024 * scale))
    sel = SelectionConfig()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["task_seed", "x_ratio", "y_ratio", "z_ratio"])
    hits = 0
    for t in range(tasks):
        s = task_seed(seed, t)
        task = gen_sphere_task(SphereTaskSpec(sample_count=sample_count, seed=s))
        base = feature_scores(task.support, replace(sel, rounds=0))
        after = feature_scores(task.support, sel)
        ratio = after / base
        if ratio[2] < 0.2 and ratio[0] > 0.6 and ratio[1] > 0.6:
            hits += 1
        writer.writerow([s, repr(float(ratio[0])), repr(float(ratio[1])), repr(float(ratio[2]))])
    csv_path = out_dir / "fig5_sphere_ratios.csv"
    csv_path.write_text(buf.getvalue())
    summary = {
        "tasks": tasks,
        "sample_count": sample_count,
        "criterion_rate": hits / tasks,
    }
    return [csv_path, _write_json(out_dir / "fig5_sphere_summary.json", summary)]


def _sweep_recipe(
    out_dir: Path,
    stem: str,
    spec: SweepSpec,
    heat_methods: tuple[str, ...],
) -> list[Path]:
    grid = run_sweep(spec)
    paths = [
        emit_csv(spec, grid, out_dir / f"{stem}.csv"),
        emit_json(spec, grid, out_dir / f"{stem}.json"),
    ]
    for m in heat_methods:
        paths.append(emit_svg_heatmap(spec, grid, m, out_dir / f"{stem}_{m}.svg"))
    return paths


def _recipe_fig7_soft_fs(out_dir: Path, seed: int, scale: float) -> list[Path]:
    tasks = max(2, int(500 * scale))
    spec = SweepSpec(
        alpha=4,
        r_values=tuple(range(1, 11)) if scale >= 1 else (1, 2),
        beta_values=tuple(range(0, 11)) if scale >= 1 else (0, 3),
        p=0.5,
        methods=("Attn", "AttnSoftFS"),
        tasks_per_cell=tasks,
        attention=AttentionConfig(),
        selection=SelectionConfig(),
        global_seed=seed,
    )
    return _sweep_recipe(out_dir, "fig7_soft_fs", spec, ("Attn", "AttnSoftFS"))


def _recipe_fig11_topk(out_dir: Path, seed: int, scale: float) -> list[Path]:
    tasks = max(2, int(500 * scale))
    spec = SweepSpec(
        alpha=4,
        r_values=(1, 2, 5) if scale >= 1 else (5,),
        beta_values=(4, 6, 8, 10) if scale >= 1 else (10,),
        p=0.5,
        methods=("AttnSoftFS", "AttnTopK"),
        tasks_per_cell=tasks,
        attention=AttentionConfig(),
        selection=SelectionConfig(top_k=4),
        global_seed=seed,
    )
    return _sweep_recipe(out_dir, "fig11_topk", spec, ("AttnSoftFS", "AttnTopK"))


def _recipe_binary_strings_fs_raw(out_dir: Path, seed: int, scale: float) -> list[Path]:
    tasks = max(2, int(1000 * scale))
    rows = []
    for n in (5, 10):
        for alpha in (2, 3, 4):
            spec = SweepSpec(
                alpha=alpha,
                r_values=(5,),
                beta_values=(n - alpha,),
                p=0.5,
                methods=("Attn", "AttnSoftFS", "Proto"),
                tasks_per_cell=tasks,
                attention=AttentionConfig(),
                selection=SelectionConfig(),
                global_seed=task_seed(seed, n * 100 + alpha),
            )
            grid = run_sweep(spec)
            rows.extend(_grid_rows(spec, grid, family=f"xor_n{n}"))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row["family"],
                row["alpha"],
                row["beta"],
                repr(float(row["p"])),
                row["r"],
                row["method"],
                row["tasks"],
                repr(float(row["accuracy_mean"])),
                repr(float(row["accuracy_se"])),
                row["seed"],
            ]
        )
    csv_path = out_dir / "binary_strings_fs_raw.csv"
    csv_path.write_text(buf.getvalue())
    return [csv_path, _write_json(out_dir / "binary_strings_fs_raw.json", rows)]


RECIPES = {
    "fig7_soft_fs": _recipe_fig7_soft_fs,
    "fig11_topk": _recipe_fig11_topk,
    "table3_counts": _recipe_table3_counts,
    "appD_xor_bound": _recipe_appd_xor_bound,
    "appC_boundary": _recipe_appc_boundary,
    "fig5_sphere": _recipe_fig5_sphere,
    "binary_strings_fs_raw": _recipe_binary_strings_fs_raw,
}


def reproduce(name: str, out_dir: str | Path, seed: int = 0, scale: float = 1.0) -> list[Path]:
    """Run a named recipe and write its artifacts under out_dir.

    scale < 1 shrinks task counts and grids proportionally (used by quick
    runs and the determinism checks); outputs remain fully deterministic in
    (name, seed, scale).
    """
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; available: {sorted(RECIPES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return RECIPES[name](out, seed, scale)
