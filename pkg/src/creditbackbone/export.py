"""CSV exports (RFC-4180, header row, floats in shortest round-trip form)."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .analytics import SUMMARY_COLUMNS, BackboneSummary, DegreeSeries
from .disparity import ValidatedArc, ValidatedNetwork
from .ingest import format_float, write_csv
from .model import EntityId, Side
from .overexpression import AttributeReport
from .temporal import JaccardMatrix, LinkLifetime

ARC_COLUMNS = ("year", "from_side", "from_id", "to_id", "p_value", "weight")
TEST_COLUMNS = ("year", "directions", "k1_directions", "test_count", "correction", "theta",
                "arcs")
DEGREE_COLUMNS = ("year", "entity_chain_root", "in_degree", "out_degree")
REPORT_COLUMNS = ("year", "side", "attribute_class", "value", "N", "N_A", "n", "k_obs",
                  "p_value", "over_expressed")
JACCARD_COLUMNS = ("year_a", "year_b", "jaccard")
LIFETIME_COLUMNS = ("bank_id", "firm_id", "first_year", "last_year", "n_years", "max_run")


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return v


def write_arcs(path, networks: Iterable[ValidatedNetwork]) -> Path:
    def rows():
        for net in networks:
            for a in net.arcs:
                yield (net.year, a.source.side.value, a.source.code, a.target.code,
                       format_float(a.p), format_float(a.weight))
    return write_csv(path, ARC_COLUMNS, rows())


def read_arcs(path) -> dict[int, list[ValidatedArc]]:
    """Inverse of :func:`write_arcs`."""
    out: dict[int, list[ValidatedArc]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            side = Side(row["from_side"])
            src = EntityId(side, row["from_id"])
            tgt = EntityId(side.other(), row["to_id"])
            out.setdefault(int(row["year"]), []).append(
                ValidatedArc(src, tgt, float(row["p_value"]), float(row["weight"])))
    return out


def write_test_counts(path, networks: Iterable[ValidatedNetwork]) -> Path:
    return write_csv(path, TEST_COLUMNS, (
        (n.year, 2 * n.snapshot.n_edges, n.n_k1, n.n_tests, n.policy.kind.value,
         format_float(n.policy.theta), len(n))
        for n in networks
    ))


def write_summary(path, rows: Iterable[BackboneSummary]) -> Path:
    return write_csv(path, SUMMARY_COLUMNS, ([_cell(v) for v in r.as_row()] for r in rows))


def read_summary(path) -> list[BackboneSummary]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SUMMARY_COLUMNS:
            raise ValueError(f"unexpected summary header {header}")
        return [BackboneSummary(*(int(v) for v in r[:9]), float(r[9]), float(r[10])) for r in reader]


def write_degree_series(path, series: Iterable[DegreeSeries]) -> Path:
    return write_csv(path, DEGREE_COLUMNS, (
        (pt.year, s.root.code, pt.in_degree, pt.out_degree) for s in series for pt in s.points
    ))


def write_reports(path, reports: Iterable[AttributeReport]) -> Path:
    return write_csv(path, REPORT_COLUMNS, (
        (r.year, r.side.value, r.attribute_class.value, t.value, t.N, t.N_A, t.n, t.k_obs,
         format_float(t.p), _cell(flag))
        for r in reports for t, flag in r.tests
    ))


def write_jaccard(path, matrix: JaccardMatrix) -> Path:
    return write_csv(path, JACCARD_COLUMNS,
                     ((a, b, format_float(v)) for a, b, v in matrix.long_form()))


def read_jaccard(path) -> dict[tuple[int, int], float]:
    with open(path, newline="", encoding="utf-8") as fh:
        return {(int(r["year_a"]), int(r["year_b"])): float(r["jaccard"])
                for r in csv.DictReader(fh)}


def write_lifetimes(path, lifetimes: Sequence[LinkLifetime]) -> Path:
    return write_csv(path, LIFETIME_COLUMNS, (
        (lt.bank, lt.firm, lt.first_year, lt.last_year, len(lt.years_present), lt.max_run)
        for lt in lifetimes
    ))
