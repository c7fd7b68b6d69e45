"""Grounding-cost report: counts and times the solver on a fixed
depth-two clause over growing integer universes, writing a tab-separated
table and a rendered figure.

The measured layer is a single implication under two universal quantifiers
whose body only queries the relation being defined, so constant folding never
drops or shrinks an instance: every universe of size n grounds to exactly
(disjuncts + 1) * n**2 simple clauses.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .engine import nesting_depth, solve_detailed
from .model import (Clause, DEFINE, DefImplies, FunctionEnv, LayeredFormula,
                    Universe, Var, disj, conj, forall_def, freeze, query)

DEFAULT_SIZES = (4, 8, 16, 32, 64)
_DISJUNCTS = 16  # 4x4 ordered pairs of body atoms


def scaling_program(size: int) -> LayeredFormula:
    """One define layer with nesting depth two over the universe 0..size-1."""
    universe = Universe.of_range(0, size - 1)
    atoms = [query("T", "x", "y"), query("T", "y", "x"),
             query("T", "x", "x"), query("T", "y", "y")]
    body = disj(*[conj(a, b) for a in atoms for b in atoms])
    layer = Clause(DEFINE, forall_def(["x", "y"], DefImplies(body, "T", (Var("x"), Var("y")))))
    return LayeredFormula(universe=universe, signature={"T": 2},
                          functions=FunctionEnv(universe), facts=freeze({}),
                          layers=(layer,))


@dataclass(frozen=True)
class ScalingRow:
    size: int
    depth: int
    ground_clauses: int
    clauses_per_size_sq: float
    seconds: float


def expected_clause_count(size: int) -> int:
    return (_DISJUNCTS + 1) * size * size


def measure(sizes=DEFAULT_SIZES, repeats: int = 3) -> list[ScalingRow]:
    rows = []
    for size in sizes:
        program = scaling_program(size)
        best = float("inf")
        stats = None
        for _ in range(repeats):
            start = time.perf_counter()
            _, stats = solve_detailed(program)
            best = min(best, time.perf_counter() - start)
        count = stats[0].ground_clauses
        rows.append(ScalingRow(size=size, depth=nesting_depth(program.layers[0]),
                               ground_clauses=count,
                               clauses_per_size_sq=count / (size * size),
                               seconds=best))
    return rows


def write_table(rows: list[ScalingRow], path: Path) -> None:
    lines = ["size\tdepth\tground_clauses\tclauses_per_size_sq\tseconds"]
    for r in rows:
        lines.append(f"{r.size}\t{r.depth}\t{r.ground_clauses}"
                     f"\t{r.clauses_per_size_sq:.6f}\t{r.seconds:.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_figure(rows: list[ScalingRow], path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sizes = [r.size for r in rows]
    counts = [r.ground_clauses for r in rows]
    times = [r.seconds for r in rows]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.6))

    left.loglog(sizes, counts, "o-", label="ground clauses")
    scale = counts[0] / (sizes[0] ** 2)
    left.loglog(sizes, [scale * n * n for n in sizes], "k--",
                alpha=0.6, label="size$^2$ reference")
    left.set_xlabel("universe size")
    left.set_ylabel("simple clauses")
    left.set_title("grounding size, depth-2 clause")
    left.legend()

    right.loglog(sizes, times, "s-", color="tab:red")
    right.set_xlabel("universe size")
    right.set_ylabel("seconds (best of runs)")
    right.set_title("solve wall clock")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def run_report(out_dir: Path, sizes=DEFAULT_SIZES, repeats: int = 3) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = measure(sizes, repeats=repeats)
    tsv = out_dir / "scaling.tsv"
    png = out_dir / "scaling.png"
    write_table(rows, tsv)
    render_figure(rows, png)
    return tsv, png
