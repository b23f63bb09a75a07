import math

import pytest

from tammes import bench
from tammes.bench import (
    OPTIMA,
    BenchRow,
    CellResult,
    compare_report,
    replica_seed,
    run_table,
    select_rows,
)


def full_row(d, n, value):
    return BenchRow(d, n, OPTIMA.get((d, n)), {k: CellResult([value], [0]) for k in bench.LOSSES})


def test_optima_consistent_with_simplex_formula():
    for (d, n), opt in OPTIMA.items():
        if d >= n - 1:
            assert abs(opt - math.degrees(math.acos(-1 / (n - 1)))) <= 0.05


def test_report_csv_single_row():
    text = compare_report([full_row(3, 4, 109.5)], "csv")
    assert text == "d,n,optimal,mma,cosine,rf,log\n3,4,109.5,109.5,109.5,109.5,109.5\n"


def test_report_missing_cells_are_na():
    text = compare_report([BenchRow(3, 30, 38.6)], "csv")
    assert text.splitlines()[1] == "3,30,38.6,NA,NA,NA,NA"


def test_report_markdown_aligned():
    rows = [full_row(4, 30, 54.04), full_row(3, 4, 109.47)]
    lines = compare_report(rows, "md").splitlines()
    assert len({len(line) for line in lines}) == 1
    assert lines[2].split("|")[1].strip() == "3"
    assert "109.5" in lines[2] and "54.0" in lines[3]


def test_report_is_byte_identical():
    rows = [full_row(3, 4, 109.47), BenchRow(5, 6, 101.5)]
    assert compare_report(rows) == compare_report(rows)


def test_report_rejects_empty():
    with pytest.raises(ValueError):
        compare_report([])


def test_replica_seed_is_stable_and_distinct():
    seeds = {replica_seed(0, 3, 30, k, r) for k in range(4) for r in range(3)}
    assert len(seeds) == 12
    assert replica_seed(5, 3, 30, 0, 0) == replica_seed(0, 3, 30, 0, 0) ^ 5
    assert all(0 <= s < 2**64 for s in seeds)


def test_row_selection():
    assert (4, 600) not in select_rows("all")
    assert (4, 600) in select_rows("all", include_600=True)
    assert select_rows([(4, 30), (3, 4)]) == [(3, 4), (4, 30)]


def test_small_run_best_is_max_of_seeds():
    rows = run_table(seeds=2, rows=[(3, 4)], iterations=300)
    (row,) = rows
    assert set(row.results) == set(bench.LOSSES)
    for cell in row.results.values():
        assert len(cell.per_seed) == 2
        assert cell.best == max(cell.per_seed)
        assert cell.best <= row.optimal_deg + 0.2


def test_failed_cell_is_recorded(monkeypatch):
    def boom(config):
        return (math.nan, "synthetic failure") if config.loss.name == "rf" else (100.0, None)

    monkeypatch.setattr(bench, "_run_cell", boom)
    (row,) = run_table(seeds=1, rows=[(3, 4)], iterations=5)
    assert "rf" in row.failed and "rf" not in row.results
    assert compare_report([row]).splitlines()[1] == "3,4,109.5,100.0,100.0,NA,100.0"


def test_rejects_zero_seeds():
    with pytest.raises(ValueError):
        run_table(seeds=0)
