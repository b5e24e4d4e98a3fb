"""Report writers for the lab and strategy paths.

Every report lands in an output directory as a plain-text PASS/FAIL
summary, tab-separated tables for machine consumption, and matplotlib
figures rendered to PNG files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .enclosing import chebyshev_center  # noqa: E402
from .game import GameState, stage_tables_text  # noqa: E402
from .hilbert import (  # noqa: E402
    AffineAction,
    alternating_projection_realizer,
    cos_angle,
    distance_realizer,
    fixed_affine_set,
    parallelogram_uniqueness_check,
    split_trivial_part,
    strategy_stage_data,
    upgrade_trace,
)
from .patterns import builtin_pattern  # noqa: E402

__all__ = [
    "write_table",
    "strategy_report",
    "realizer_report",
    "trace_report",
    "angle_report",
    "chebyshev_report",
    "split_report",
]

_TAG_COLOR = {"0": 0.0, "1": 1.0, "R": 2.0, "E": 3.0, "*": 4.0}


def write_table(path: Path, header, rows):
    lines = ["\t".join(str(h) for h in header)]
    lines += ["\t".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _grid_axes(ax, grid_rows, title):
    data = np.array([[_TAG_COLOR[c] for c in row] for row in grid_rows])
    ax.imshow(data, cmap="viridis", vmin=0, vmax=4)
    for i, row in enumerate(grid_rows):
        for j, cell in enumerate(row):
            ax.text(j, i, cell, ha="center", va="center", color="white", fontsize=12)
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])


def strategy_report(state: GameState, out_dir) -> list:
    """Stage tables as text, TSV and one grid figure per stage."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    tables = stage_tables_text(state)
    path = out / "stage_tables.txt"
    path.write_text(tables)
    written.append(path)

    from .game import apply_move, new_game
    states = [new_game(state.config)]
    for record in state.history:
        states.append(apply_move(states[-1], record.move))
    rows = []
    for s in states:
        rows.append([s.stage, s.label(1), s.h1.format_grid(compact=True),
                     s.label(2), s.h2.format_grid(compact=True)])
    written.append(write_table(out / "stages.tsv",
                               ["stage", "h1_name", "h1_grid", "h2_name", "h2_grid"], rows))

    fig, axes = plt.subplots(len(states), 2, figsize=(6, 2.6 * len(states)))
    axes = np.atleast_2d(axes)
    for idx, s in enumerate(states):
        _grid_axes(axes[idx][0], s.h1.grid_rows(), f"H1^({s.stage}) = {s.label(1)}")
        _grid_axes(axes[idx][1], s.h2.grid_rows(), f"H2^({s.stage}) = {s.label(2)}")
    fig.tight_layout()
    fig_path = out / "stages.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    written.append(fig_path)
    return written


def _fixed_sets(action: AffineAction, first: str, second: str):
    model = action.model
    sets = []
    for name in (first, second):
        gens = model.pattern_generators(builtin_pattern(name, model.n))
        sets.append(fixed_affine_set(action, gens))
    return sets


def realizer_report(action: AffineAction, out_dir, first: str = "M", second: str = "L",
                    seed: int = 0) -> tuple:
    """Distance realizer by direct solve and alternating projections, plus uniqueness."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fix_a, fix_b = _fixed_sets(action, first, second)
    lines = [f"fixed set of {first}: dim {fix_a.dim}", f"fixed set of {second}: dim {fix_b.dim}"]
    if fix_a.empty or fix_b.empty:
        lines.append("a fixed set is empty: no realizer")
        (out / "report.txt").write_text("\n".join(lines) + "\n")
        return False, [out / "report.txt"]
    d_direct, xi, eta = distance_realizer(fix_a, fix_b)
    d_iter, _, _, history = alternating_projection_realizer(fix_a, fix_b)
    report = parallelogram_uniqueness_check(action, fix_a, fix_b, seed=seed)
    agree = abs(d_direct - d_iter) <= 1e-8
    lines += [
        f"distance (direct solve)            D = {d_direct:.12g}",
        f"distance (alternating projections) D = {d_iter:.12g}  [{len(history)} iterations]",
        f"solver agreement within 1e-8: {'yes' if agree else 'NO'}",
        "",
    ] + report.lines()
    passed = agree and (report.passed or not report.hypothesis_ok)
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    written = [out / "report.txt"]
    written.append(write_table(
        out / "realizer.tsv", ["quantity", "value"],
        [["D_direct", f"{d_direct:.15g}"], ["D_projection", f"{d_iter:.15g}"],
         ["max_deviation", f"{report.max_deviation:.3e}"],
         ["xi_norm", f"{np.linalg.norm(xi):.15g}"], ["eta_norm", f"{np.linalg.norm(eta):.15g}"]]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(np.maximum(np.array(history) - d_direct, 1e-17))
    ax.set_xlabel("iteration")
    ax.set_ylabel("projection gap above D")
    ax.set_title("alternating projections convergence")
    fig.tight_layout()
    fig.savefig(out / "convergence.png", dpi=120)
    plt.close(fig)
    written.append(out / "convergence.png")
    return passed, written


def trace_report(action: AffineAction, out_dir, seed: int = 0) -> tuple:
    """Realizer trace along the scripted strategy stages."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fix_a, fix_b = _fixed_sets(action, "M", "L")
    _, xi, eta = distance_realizer(fix_a, fix_b)
    stages, moves = strategy_stage_data(action.model)
    trace = upgrade_trace(action, stages, xi, eta, moves)
    (out / "report.txt").write_text("\n".join(trace.lines()) + "\n")
    written = [out / "report.txt"]
    rows = [[r["stage"], r["label1"], f"{r['disp1']:.3e}", r["label2"],
             f"{r['disp2']:.3e}", "PASS" if r["ok"] else "FAIL"] for r in trace.rows]
    rows += [[r["stage"], "alpha(w)xi-eta", f"{r['delta']:.3e}", "", "",
              "PASS" if r["ok"] else "FAIL"] for r in trace.move_rows]
    written.append(write_table(out / "trace.tsv",
                               ["stage", "subgroup1", "disp1", "subgroup2", "disp2", "verdict"],
                               rows))
    fig, ax = plt.subplots(figsize=(6, 4))
    stages_idx = [r["stage"] for r in trace.rows]
    ax.bar([s - 0.17 for s in stages_idx], [max(r["disp1"], 1e-17) for r in trace.rows],
           width=0.34, label="disp(H1, xi)")
    ax.bar([s + 0.17 for s in stages_idx], [max(r["disp2"], 1e-17) for r in trace.rows],
           width=0.34, label="disp(H2, eta)")
    ax.axhline(1e-7, color="red", linestyle="--", label="tolerance")
    ax.set_yscale("log")
    ax.set_xlabel("stage")
    ax.set_ylabel("displacement")
    ax.set_xticks(stages_idx)
    ax.legend()
    ax.set_title("realizer displacement along the strategy")
    fig.tight_layout()
    fig.savefig(out / "trace.png", dpi=120)
    plt.close(fig)
    written.append(out / "trace.png")
    return trace.passed, written


def angle_report(action: AffineAction, out_dir, first: str = "M", second: str = "L") -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fix_a, fix_b = _fixed_sets(action, first, second)
    value = cos_angle(fix_a, fix_b)
    # full principal-cosine spectrum for the figure
    sv = np.linalg.svd(fix_a.basis.T @ fix_b.basis, compute_uv=False) \
        if fix_a.dim and fix_b.dim else np.zeros(0)
    lines = [f"cos angle between fixed sets of {first} and {second}: {value:.12g}"]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    written = [out / "report.txt"]
    written.append(write_table(out / "angle.tsv", ["index", "principal_cosine"],
                               [[i, f"{v:.15g}"] for i, v in enumerate(sv)]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sv, marker=".", linestyle="none")
    ax.set_xlabel("index")
    ax.set_ylabel("principal cosine")
    ax.set_title(f"principal cosines: fix({first}) vs fix({second})")
    fig.tight_layout()
    fig.savefig(out / "angle.png", dpi=120)
    plt.close(fig)
    written.append(out / "angle.png")
    return True, written


def chebyshev_report(action: AffineAction, out_dir, seed: int = 0) -> tuple:
    """Enclosing ball of one orbit; the center must be moved by nobody."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    zeta = rng.standard_normal(action.dim)
    orbit = action.apply_all(zeta)
    center, radius = chebyshev_center(orbit)
    moved = float(np.linalg.norm(action.pis @ center + action.bs - center[None, :],
                                 axis=1).max())
    passed = moved <= 1e-5
    lines = [
        f"orbit of a random point, {orbit.shape[0]} elements in dimension {action.dim}",
        f"enclosing-ball radius: {radius:.12g}",
        f"max displacement of the center under the group: {moved:.3e}",
        f"center is group-fixed within 1e-5: {'PASS' if passed else 'FAIL'}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    written = [out / "report.txt"]
    dists = np.linalg.norm(orbit - center, axis=1)
    written.append(write_table(out / "chebyshev.tsv", ["element", "distance_to_center"],
                               [[i, f"{d:.15g}"] for i, d in enumerate(dists)]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(dists, bins=30)
    ax.axvline(radius, color="red", linestyle="--", label="radius")
    ax.set_xlabel("distance to center")
    ax.set_ylabel("orbit points")
    ax.legend()
    ax.set_title("orbit distances to the enclosing-ball center")
    fig.tight_layout()
    fig.savefig(out / "chebyshev.png", dpi=120)
    plt.close(fig)
    written.append(out / "chebyshev.png")
    return passed, written


def split_report(action: AffineAction, out_dir) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trivial, orthogonal = split_trivial_part(action)
    t_norm = float(np.linalg.norm(trivial.bs)) if trivial.dim else 0.0
    o_norm = float(np.linalg.norm(orthogonal.bs)) if orthogonal.dim else 0.0
    lines = [
        f"invariant subspace dimension: {trivial.dim}",
        f"orthogonal complement dimension: {orthogonal.dim}",
        f"cocycle mass on invariant part: {t_norm:.6g}",
        f"cocycle mass on orthogonal part: {o_norm:.6g}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    written = [out / "report.txt"]
    rows = [[g, f"{np.linalg.norm(trivial.bs[g]) if trivial.dim else 0.0:.6e}",
             f"{np.linalg.norm(orthogonal.bs[g]) if orthogonal.dim else 0.0:.6e}"]
            for g in range(len(action.model))]
    written.append(write_table(out / "split.tsv",
                               ["element", "b_trivial_norm", "b_orthogonal_norm"], rows))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(["invariant", "orthogonal"], [t_norm, o_norm])
    ax.set_ylabel("cocycle norm")
    ax.set_title("cocycle split between invariant part and complement")
    fig.tight_layout()
    fig.savefig(out / "split.png", dpi=120)
    plt.close(fig)
    written.append(out / "split.png")
    return True, written
