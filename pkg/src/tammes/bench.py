"""Loss-function benchmark over the known spherical-code grid.

Each cell of the table is one ``(d, n, loss)`` combination solved from
several seeds; the headline number is the best minimum angle over seeds.
"""
from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .core import TammesError
from .losses import COSINE, LOG, MMA, LossKind, riesz_fisher
from .optimizer import OptimizerConfig, solve

log = logging.getLogger(__name__)

#: Best known minimal angles (degrees) for each benchmark row ``(d, n)``.
OPTIMA: dict[tuple[int, int], float] = {
    (3, 4): 109.5,
    (3, 30): 38.6,
    (3, 130): 18.5,
    (4, 5): 104.5,
    (4, 30): 54.3,
    (4, 130): 33.4,
    (4, 600): 19.8,
    (5, 6): 101.5,
    (5, 30): 65.6,
    (5, 130): 43.8,
}

#: Column order of the report; keys of ``BenchRow.results``.
LOSSES: dict[str, LossKind] = {
    "mma": MMA,
    "cosine": COSINE,
    "rf": riesz_fisher(2.0),
    "log": LOG,
}

BIG_ROWS = {(4, 600)}


@dataclass
class CellResult:
    per_seed: list[float]
    seeds: list[int]

    @property
    def best(self) -> float:
        return max(self.per_seed)


@dataclass
class BenchRow:
    d: int
    n: int
    optimal_deg: float | None
    results: dict[str, CellResult] = field(default_factory=dict)
    failed: dict[str, str] = field(default_factory=dict)


def replica_seed(base_seed: int, d: int, n: int, loss_index: int, replica: int) -> int:
    """``base_seed`` XOR the first 8 bytes of BLAKE2b("d,n,loss_index,replica")."""
    digest = hashlib.blake2b(f"{d},{n},{loss_index},{replica}".encode(), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "little")) & (2**64 - 1)


def select_rows(rows="all", include_600: bool = False) -> list[tuple[int, int]]:
    """Resolve a row selector: ``"all"`` or an iterable of ``(d, n)`` pairs."""
    if rows == "all" or rows is None:
        chosen = [key for key in OPTIMA if include_600 or key not in BIG_ROWS]
    else:
        chosen = [(int(d), int(n)) for d, n in rows]
    return sorted(set(chosen))


def _run_cell(config: OptimizerConfig) -> tuple[float, str | None]:
    try:
        return solve(config).min_angle_deg, None
    except TammesError as err:
        return math.nan, str(err)


def run_table(
    seeds: int = 3,
    rows="all",
    iterations: int | None = None,
    base_seed: int = 0,
    include_600: bool = False,
    jobs: int = 1,
) -> list[BenchRow]:
    if seeds < 1:
        raise TammesError(f"seeds must be >= 1, got {seeds}")
    keys = select_rows(rows, include_600)
    tasks = []
    for d, n in keys:
        for loss_index, (name, kind) in enumerate(LOSSES.items()):
            for replica in range(seeds):
                seed = replica_seed(base_seed, d, n, loss_index, replica)
                config = OptimizerConfig(n=n, d=d, loss=kind, seed=seed)
                if iterations is not None:
                    config = replace(config, iterations=iterations)
                tasks.append(((d, n, name, seed), config))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, [cfg for _, cfg in tasks]))
    else:
        outcomes = []
        for (d, n, name, _), cfg in tasks:
            log.info("solving d=%d n=%d loss=%s seed=%d", d, n, name, cfg.seed)
            outcomes.append(_run_cell(cfg))

    table = {key: BenchRow(key[0], key[1], OPTIMA.get(key)) for key in keys}
    for ((d, n, name, seed), _), (angle, error) in zip(tasks, outcomes):
        row = table[(d, n)]
        if error is not None:
            row.failed[name] = error
            row.results.pop(name, None)
            continue
        if name in row.failed:
            continue
        cell = row.results.setdefault(name, CellResult([], []))
        cell.per_seed.append(angle)
        cell.seeds.append(seed)
    return [table[key] for key in keys]


run_table1 = run_table


def _cell_text(row: BenchRow, name: str) -> str:
    cell = row.results.get(name)
    return "NA" if cell is None else f"{cell.best:.1f}"


def report_rows(rows: list[BenchRow]) -> list[list[str]]:
    out = []
    for row in sorted(rows, key=lambda r: (r.d, r.n)):
        optimal = "NA" if row.optimal_deg is None else f"{row.optimal_deg:.1f}"
        out.append([str(row.d), str(row.n), optimal, *(_cell_text(row, k) for k in LOSSES)])
    return out


HEADER = ["d", "n", "optimal", *LOSSES]


def compare_report(rows: list[BenchRow], fmt: str = "csv") -> str:
    if not rows:
        raise TammesError("nothing to report")
    body = report_rows(rows)
    if fmt == "csv":
        return "\n".join(",".join(line) for line in [HEADER, *body]) + "\n"
    if fmt in ("md", "markdown"):
        widths = [max(len(line[i]) for line in [HEADER, *body]) for i in range(len(HEADER))]

        def fmt_line(cells):
            return "| " + " | ".join(c.rjust(w) for c, w in zip(cells, widths)) + " |"

        rule = "|" + "|".join("-" * (w + 1) + ":" for w in widths) + "|"
        return "\n".join([fmt_line(HEADER), rule, *map(fmt_line, body)]) + "\n"
    raise TammesError(f"unknown report format {fmt!r}")


def rows_to_dict(rows: list[BenchRow]) -> list[dict]:
    return [
        {
            "d": r.d,
            "n": r.n,
            "optimal_deg": r.optimal_deg,
            "results": {
                k: {"best_min_angle_deg": c.best, "per_seed": c.per_seed, "seeds": c.seeds}
                for k, c in r.results.items()
            },
            "failed": dict(r.failed),
        }
        for r in rows
    ]
