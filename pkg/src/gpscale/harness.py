"""Population sizing and scalability sweeps.

Sizing follows bracket-and-halve: double from 16 until a full batch of runs
succeeds, then bisect (even population sizes only) until the bracket is
within 10% of its succeeding bound.  Sweeps size every (algorithm, instance)
cell of a plan and emit a CSV plus a log-log SVG plot.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .gp import GpConfig, RunResult, run_gp
from .pipe import run_pipe
from .problems import ProblemSpec, order_problem, trap_problem
from .trees import default_max_depth

ALGORITHMS = ("gp", "pipe")
DEFAULT_RUNS = 30
DEFAULT_POP_CEILING = 2**20
START_POP = 16
BRACKET_FRACTION = 0.10
# Spreads the per-size seed streams apart so no two probe sizes share seeds.
_SIZE_SEED_STRIDE = 1_000_003
_ROW_SEED_STRIDE = 1_000_000

CSV_HEADER = (
    "algorithm,problem,l,num_junk,neg_join,k,delta,max_depth,"
    "pop_size,avg_evaluations,success_rate,seed_base"
)

BatchFn = Callable[[int], tuple[bool, list[RunResult]]]


class SizingFailure(Exception):
    """Doubling passed the population ceiling without a fully successful batch."""

    def __init__(
        self,
        ceiling: int,
        last_pop_size: int,
        last_results: list[RunResult],
        history: list[tuple[int, bool]],
    ) -> None:
        self.ceiling = ceiling
        self.last_pop_size = last_pop_size
        self.last_results = last_results
        self.history = history
        succeeded = sum(r.success for r in last_results)
        super().__init__(
            f"no fully successful batch at any population size up to {last_pop_size} "
            f"(ceiling {ceiling}); last batch solved {succeeded}/{len(last_results)} runs"
        )

    @property
    def success_rate(self) -> float:
        if not self.last_results:
            return 0.0
        return sum(r.success for r in self.last_results) / len(self.last_results)


@dataclass(frozen=True)
class SizingResult:
    min_pop_size: int
    avg_evaluations: float
    runs: tuple[RunResult, ...]
    history: tuple[tuple[int, bool], ...]


def run_algorithm(algo: str, problem: ProblemSpec, cfg: GpConfig) -> RunResult:
    if algo == "gp":
        return run_gp(problem, cfg)
    if algo == "pipe":
        return run_pipe(problem, cfg)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")


def _run_seeded(args: tuple[str, ProblemSpec, GpConfig]) -> RunResult:
    algo, problem, cfg = args
    return run_algorithm(algo, problem, cfg)


def batch_success(
    problem: ProblemSpec,
    algo: str,
    pop_size: int,
    n_runs: int = DEFAULT_RUNS,
    seed_base: int = 0,
    *,
    max_depth: int | None = None,
    max_generations: int = 200,
    workers: int = 1,
    stop_on_failure: bool = False,
) -> tuple[bool, list[RunResult]]:
    """Run ``n_runs`` independent runs seeded ``seed_base + i``; True iff all
    succeed.  ``stop_on_failure`` cuts the batch short at the first failure
    (the boolean is unaffected; the result list is then partial).
    """
    if max_depth is None:
        max_depth = default_max_depth(problem.primitives.num_pairs)
    jobs = [
        (
            algo,
            problem,
            GpConfig(
                pop_size=pop_size,
                max_depth=max_depth,
                max_generations=max_generations,
                seed=seed_base + i,
            ),
        )
        for i in range(n_runs)
    ]
    results: list[RunResult] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_seeded, job) for job in jobs]
            for fut in futures:
                result = fut.result()
                results.append(result)
                if stop_on_failure and not result.success:
                    for pending in futures:
                        pending.cancel()
                    break
    else:
        for job in jobs:
            result = _run_seeded(job)
            results.append(result)
            if stop_on_failure and not result.success:
                break
    return all(r.success for r in results) and len(results) == n_runs, results


def _nearest_even(x: float) -> int:
    return 2 * round(x / 2)


def bisect_min_size(
    batch: BatchFn,
    *,
    start: int = START_POP,
    ceiling: int = DEFAULT_POP_CEILING,
) -> SizingResult:
    """Smallest population size (to a 10% bracket) at which ``batch`` fully
    succeeds; ``batch`` must be statistically monotone in population size.

    Doubles from ``start`` until success (raising :class:`SizingFailure` past
    ``ceiling``), then bisects on even midpoints while the failing/succeeding
    bracket is wider than 10% of its succeeding bound.
    """
    if ceiling < start:
        raise ValueError(f"ceiling {ceiling} is below the starting size {start}")
    history: list[tuple[int, bool]] = []
    n = start
    ok, results = batch(n)
    history.append((n, ok))
    while not ok:
        if n * 2 > ceiling:
            raise SizingFailure(ceiling, n, results, history)
        n *= 2
        ok, results = batch(n)
        history.append((n, ok))
    hi = n
    lo = n // 2 if n > start else 2
    best_results = results
    while (hi - lo) > BRACKET_FRACTION * hi:
        mid = _nearest_even((lo + hi) / 2)
        if mid <= lo or mid >= hi:
            break  # no even size strictly inside the bracket
        ok, results = batch(mid)
        history.append((mid, ok))
        if ok:
            hi = mid
            best_results = results
        else:
            lo = mid
    avg = statistics.fmean(r.evaluations for r in best_results) if best_results else 0.0
    return SizingResult(hi, avg, tuple(best_results), tuple(history))


def bisect_population_size(
    problem: ProblemSpec,
    algo: str,
    seed_base: int = 0,
    *,
    n_runs: int = DEFAULT_RUNS,
    max_depth: int | None = None,
    max_generations: int = 200,
    ceiling: int = DEFAULT_POP_CEILING,
    workers: int = 1,
    start: int = START_POP,
) -> SizingResult:
    """Size ``algo`` on ``problem``; each probed size gets its own seed stream.

    Probe batches stop at their first failing run (only the final, fully
    successful batch feeds the reported average); the returned result always
    contains ``n_runs`` successful runs.
    """

    def batch(pop_size: int) -> tuple[bool, list[RunResult]]:
        return batch_success(
            problem,
            algo,
            pop_size,
            n_runs,
            seed_base + _SIZE_SEED_STRIDE * pop_size,
            max_depth=max_depth,
            max_generations=max_generations,
            workers=workers,
            stop_on_failure=True,
        )

    return bisect_min_size(batch, start=start, ceiling=ceiling)


@dataclass(frozen=True)
class RowSpec:
    """One sweep cell: an algorithm on one problem instance."""

    algorithm: str
    problem: str  # "order" | "trap"
    l: int
    k: int = 0
    delta: float = 0.0
    neg_join: bool = False
    num_junk: int = 0
    max_depth: int | None = None
    seed_base: int = 0

    def problem_spec(self) -> ProblemSpec:
        if self.problem == "trap":
            return trap_problem(self.l, self.k, self.delta, self.num_junk, self.neg_join)
        return order_problem(self.l, self.num_junk, self.neg_join)

    def resolved_max_depth(self) -> int:
        return self.max_depth if self.max_depth is not None else default_max_depth(self.l)


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    problem: str
    l: int
    num_junk: int
    neg_join: bool
    k: int
    delta: float
    max_depth: int
    pop_size: int
    avg_evaluations: float
    success_rate: float
    seed_base: int


@dataclass(frozen=True)
class SweepPlan:
    name: str
    rows: tuple[RowSpec, ...]
    n_runs: int = DEFAULT_RUNS
    max_generations: int = 200
    ceiling: int = DEFAULT_POP_CEILING
    x_field: str = "l"  # "num_junk" for the fixed-size junk study


PLAN_NAMES = ("order", "trap", "order-neg", "order-junk", "junk-fixed-l")
_ORDER_SIZES = (5, 10, 20, 40, 60, 80, 100)
_TRAP_SIZES = (6, 12, 18, 21, 24, 33)
_JUNK_FIXED_L = 20
_JUNK_FIXED_COUNTS = (5, 10, 15, 20, 40)
_JUNK_FIXED_DEPTHS = (6, 7)


def build_plan(
    name: str,
    *,
    algorithms: Sequence[str] = ALGORITHMS,
    sizes: Sequence[int] | None = None,
    k: int = 3,
    delta: float = 1.0,
    seed_base: int = 0,
    n_runs: int = DEFAULT_RUNS,
    max_generations: int = 200,
    ceiling: int = DEFAULT_POP_CEILING,
) -> SweepPlan:
    """Expand a named plan into per-cell row specs.

    ``order``/``trap``/``order-neg`` sweep problem size; ``order-junk`` adds
    l/5 junk terminals per size; ``junk-fixed-l`` holds l=20 and sweeps the
    junk count at depth budgets 6 and 7.  ``sizes`` overrides the swept list
    (problem sizes, or junk counts for ``junk-fixed-l``).
    """
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    specs: list[RowSpec] = []
    x_field = "l"
    if name == "order":
        for l in sizes or _ORDER_SIZES:
            for algo in algorithms:
                specs.append(RowSpec(algo, "order", l))
    elif name == "trap":
        for l in sizes or _TRAP_SIZES:
            if l % k:
                raise ValueError(f"trap size {l} is not divisible by k={k}")
            for algo in algorithms:
                specs.append(RowSpec(algo, "trap", l, k=k, delta=delta))
    elif name == "order-neg":
        for l in sizes or _ORDER_SIZES:
            for algo in algorithms:
                specs.append(RowSpec(algo, "order", l, neg_join=True))
    elif name == "order-junk":
        for l in sizes or _ORDER_SIZES:
            if l % 5:
                raise ValueError(f"order-junk size {l} is not divisible by 5")
            for algo in algorithms:
                specs.append(RowSpec(algo, "order", l, num_junk=l // 5))
    elif name == "junk-fixed-l":
        x_field = "num_junk"
        for depth in _JUNK_FIXED_DEPTHS:
            for junk in sizes or _JUNK_FIXED_COUNTS:
                for algo in algorithms:
                    specs.append(
                        RowSpec(algo, "order", _JUNK_FIXED_L, num_junk=junk, max_depth=depth)
                    )
    else:
        raise ValueError(f"unknown plan {name!r}; expected one of {PLAN_NAMES}")
    rows = tuple(
        RowSpec(
            s.algorithm,
            s.problem,
            s.l,
            s.k,
            s.delta,
            s.neg_join,
            s.num_junk,
            s.max_depth,
            seed_base + _ROW_SEED_STRIDE * i,
        )
        for i, s in enumerate(specs)
    )
    return SweepPlan(name, rows, n_runs, max_generations, ceiling, x_field)


def scalability_sweep(
    plan: SweepPlan,
    *,
    workers: int = 1,
    log: Callable[[str], None] | None = None,
) -> list[SweepRow]:
    """Size every cell of the plan; cells that hit the population ceiling are
    flagged with success_rate < 1 instead of aborting the sweep."""
    out: list[SweepRow] = []
    for spec in plan.rows:
        problem = spec.problem_spec()
        max_depth = spec.resolved_max_depth()
        try:
            sizing = bisect_population_size(
                problem,
                spec.algorithm,
                spec.seed_base,
                n_runs=plan.n_runs,
                max_depth=max_depth,
                max_generations=plan.max_generations,
                ceiling=plan.ceiling,
                workers=workers,
            )
            pop_size = sizing.min_pop_size
            avg = sizing.avg_evaluations
            rate = 1.0
        except SizingFailure as failure:
            pop_size = failure.last_pop_size
            succeeded = [r for r in failure.last_results if r.success]
            avg = statistics.fmean(r.evaluations for r in succeeded) if succeeded else 0.0
            rate = failure.success_rate
        row = SweepRow(
            algorithm=spec.algorithm,
            problem=spec.problem,
            l=spec.l,
            num_junk=spec.num_junk,
            neg_join=spec.neg_join,
            k=spec.k,
            delta=spec.delta,
            max_depth=max_depth,
            pop_size=pop_size,
            avg_evaluations=avg,
            success_rate=rate,
            seed_base=spec.seed_base,
        )
        out.append(row)
        if log is not None:
            log(
                f"row algorithm={row.algorithm} problem={row.problem} l={row.l} "
                f"num_junk={row.num_junk} max_depth={row.max_depth} "
                f"pop_size={row.pop_size} avg_evaluations={row.avg_evaluations!r} "
                f"success_rate={row.success_rate!r}"
            )
    return out


def _csv_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Sequence[SweepRow], path: Path) -> None:
    fields = CSV_HEADER.split(",")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_csv_value(getattr(row, f)) for f in fields])


def read_csv(path: Path) -> list[SweepRow]:
    """Inverse of :func:`write_csv` (exact for every numeric field)."""
    rows: list[SweepRow] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                SweepRow(
                    algorithm=rec["algorithm"],
                    problem=rec["problem"],
                    l=int(rec["l"]),
                    num_junk=int(rec["num_junk"]),
                    neg_join=rec["neg_join"] == "true",
                    k=int(rec["k"]),
                    delta=float(rec["delta"]),
                    max_depth=int(rec["max_depth"]),
                    pop_size=int(rec["pop_size"]),
                    avg_evaluations=float(rec["avg_evaluations"]),
                    success_rate=float(rec["success_rate"]),
                    seed_base=int(rec["seed_base"]),
                )
            )
    return rows


def emit_report(
    rows: Sequence[SweepRow],
    out_dir: Path | str,
    basename: str = "sweep",
    x_field: str = "l",
) -> tuple[Path, Path]:
    """Write ``<basename>.csv`` and ``<basename>.svg`` under ``out_dir``.

    The plot is log-log with one polyline per series (per algorithm, split by
    depth budget when sweeping junk counts); cells flagged by a failed sizing
    are left out of the plot but stay in the CSV.
    """
    if not rows:
        raise ValueError("no rows to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{basename}.csv"
    svg_path = out / f"{basename}.svg"
    write_csv(rows, csv_path)
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        if row.success_rate < 1.0:
            continue
        label = row.algorithm
        if x_field == "num_junk":
            label = f"{row.algorithm} depth {row.max_depth}"
        series.setdefault(label, []).append(
            (float(getattr(row, x_field)), row.avg_evaluations)
        )
    svg_path.write_text(render_log_log_svg(series))
    return csv_path, svg_path


_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def render_log_log_svg(
    series: dict[str, list[tuple[float, float]]],
    xlabel: str = "problem size",
    ylabel: str = "fitness evaluations",
) -> str:
    """Standalone SVG: log10 axes, decade ticks, one polyline per series."""
    import math

    width, height = 640, 480
    ml, mr, mt, mb = 70, 160, 20, 50
    pts = [p for data in series.values() for p in data if p[0] > 0 and p[1] > 0]
    if pts:
        lx = [math.log10(x) for x, _ in pts]
        ly = [math.log10(y) for _, y in pts]
        x0, x1 = min(lx), max(lx)
        y0, y1 = min(ly), max(ly)
    else:  # every cell flagged: emit bare axes rather than failing the report
        x0, x1, y0, y1 = 0.0, 2.0, 0.0, 2.0
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v: float) -> float:
        return ml + (math.log10(v) - x0) / (x1 - x0) * (width - ml - mr)

    def py(v: float) -> float:
        return height - mb - (math.log10(v) - y0) / (y1 - y0) * (height - mt - mb)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" '
        'stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
    ]
    for d in range(math.floor(x0), math.ceil(x1) + 1):
        if x0 <= d <= x1:
            x = ml + (d - x0) / (x1 - x0) * (width - ml - mr)
            parts.append(
                f'<line x1="{x:.1f}" y1="{height - mb}" x2="{x:.1f}" '
                f'y2="{height - mb + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{x:.1f}" y="{height - mb + 18}" font-size="11" '
                f'text-anchor="middle">1e{d}</text>'
            )
    for d in range(math.floor(y0), math.ceil(y1) + 1):
        if y0 <= d <= y1:
            y = height - mb - (d - y0) / (y1 - y0) * (height - mt - mb)
            parts.append(
                f'<line x1="{ml - 5}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{ml - 8}" y="{y + 4:.1f}" font-size="11" '
                f'text-anchor="end">1e{d}</text>'
            )
    parts.append(
        f'<text x="{(ml + width - mr) / 2:.1f}" y="{height - 10}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(mt + height - mb) / 2:.1f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {(mt + height - mb) / 2:.1f})">'
        f"{ylabel}</text>"
    )
    for i, (label, data) in enumerate(sorted(series.items())):
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        plottable = sorted(p for p in data if p[0] > 0 and p[1] > 0)
        if not plottable:
            continue
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in plottable)
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in plottable:
            parts.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>'
            )
        ly_pos = mt + 16 + 16 * i
        parts.append(
            f'<line x1="{width - mr + 10}" y1="{ly_pos - 4}" x2="{width - mr + 34}" '
            f'y2="{ly_pos - 4}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - mr + 40}" y="{ly_pos}" font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
