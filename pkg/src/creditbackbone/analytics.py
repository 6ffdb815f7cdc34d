"""Descriptive statistics of validated backbones."""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .disparity import CorrectionPolicy, ValidatedArc, ValidatedNetwork, validated_network
from .errors import NodeNotFound
from .ingest import ChainSegment, Panel
from .model import EntityId, Side, Snapshot, density


class CreditAccounting(str, Enum):
    PER_EDGE = "per-edge"
    PER_DIRECTION = "per-direction"


SUMMARY_COLUMNS = (
    "Year", "Banks ON", "Firms ON", "Edges ON", "Banks FN", "Firms FN",
    "LCC FN", "Edges FN", "Pairs BL", "credit_ratio", "density_on",
)


@dataclass(frozen=True)
class BackboneSummary:
    """One row of the yearly summary table.

    ``edges_fn`` counts distinct credit relationships with at least one
    validated direction; ``pairs_bl`` those validated in both directions.
    """

    year: int
    banks_on: int
    firms_on: int
    edges_on: int
    banks_fn: int
    firms_fn: int
    lcc_size: int
    edges_fn: int
    pairs_bl: int
    credit_ratio: float
    density_on: float

    def as_row(self) -> tuple:
        return astuple(self)

    @property
    def lcc_fraction(self) -> float:
        n = self.banks_fn + self.firms_fn
        return self.lcc_size / n if n else 0.0


assert len(fields(BackboneSummary)) == len(SUMMARY_COLUMNS)


def _node_key(e: EntityId):
    return (e.code, e.side.value)


def largest_connected_component(arcs: Iterable[ValidatedArc]) -> set[EntityId]:
    """Nodes of the largest weakly connected component.

    Ties go to the component whose sorted node codes compare smallest.
    """
    arcs = list(arcs)
    if not arcs:
        return set()
    nodes = sorted({n for a in arcs for n in (a.source, a.target)}, key=_node_key)
    pos = {n: i for i, n in enumerate(nodes)}
    u = np.array([pos[a.source] for a in arcs], dtype=np.int64)
    v = np.array([pos[a.target] for a in arcs], dtype=np.int64)
    labels = _kernels.active().component_labels(len(nodes), u, v)
    sizes = np.bincount(labels, minlength=len(nodes))
    best = sizes.max()
    # labels are component minima, so on a tie the smallest label holds the
    # lexicographically smallest sorted code tuple
    root = int(np.flatnonzero(sizes == best)[0])
    return {nodes[i] for i in np.flatnonzero(labels == root)}


def bidirectional_pairs(arcs: Iterable[ValidatedArc]) -> set[tuple[EntityId, EntityId]]:
    """``(bank, firm)`` pairs validated from both endpoints."""
    from_bank, from_firm = set(), set()
    for a in arcs:
        if a.source.side is Side.BANK:
            from_bank.add((a.source, a.target))
        else:
            from_firm.add((a.target, a.source))
    return from_bank & from_firm


def validated_edges(arcs: Iterable[ValidatedArc]) -> set[tuple[str, str]]:
    """Distinct ``(bank_code, firm_code)`` pairs with any validated direction."""
    return {a.pair for a in arcs}


def credit_ratio(
    snapshot: Snapshot,
    arcs: Iterable[ValidatedArc],
    accounting: CreditAccounting | str = CreditAccounting.PER_EDGE,
) -> float:
    """Share of the year's credit carried by validated relationships.

    Per-edge accounting counts a bidirectional link once. Per-direction
    accounting weighs each arc separately against twice the total credit.
    """
    accounting = CreditAccounting(accounting)
    total = snapshot.total_credit
    if total == 0:
        return 0.0
    arcs = list(arcs)
    weights = snapshot.edge_weights()
    if accounting is CreditAccounting.PER_EDGE:
        return math.fsum(weights[p] for p in validated_edges(arcs)) / total
    return math.fsum(weights[a.pair] for a in arcs) / (2.0 * total)


# ---------------------------------------------------------------------------
# degree time series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreePoint:
    year: int
    entity: EntityId
    in_degree: int
    out_degree: int


@dataclass(frozen=True)
class DegreeSeries:
    chain: tuple[ChainSegment, ...]
    points: tuple[DegreePoint, ...]

    @property
    def root(self) -> EntityId:
        return self.chain[0].entity


def _degrees(arcs: Iterable[ValidatedArc]) -> tuple[dict, dict]:
    din: dict[EntityId, int] = {}
    dout: dict[EntityId, int] = {}
    for a in arcs:
        dout[a.source] = dout.get(a.source, 0) + 1
        din[a.target] = din.get(a.target, 0) + 1
    return din, dout


def degree_series(
    panel: Panel,
    arcs_by_year: Mapping[int, Iterable[ValidatedArc]],
    chain: Sequence[ChainSegment],
    follow_mergers: bool = True,
) -> DegreeSeries:
    """In/out-degree per panel year of the entity tracked by ``chain``.

    With ``follow_mergers=False`` the series stops at the end of the first
    segment, i.e. when the entity is absorbed.
    """
    chain = tuple(chain)
    if not chain:
        raise NodeNotFound("empty continuity chain")
    known = set(panel._presence) | {m.absorbed for m in panel.mergers} | {m.survivor for m in panel.mergers}
    if chain[0].entity not in known:
        raise NodeNotFound(f"{chain[0].entity} does not appear in the panel")
    segments = chain if follow_mergers else chain[:1]
    points = []
    for year in panel.years:
        seg = next((s for s in segments if s.first_year <= year <= s.last_year), None)
        if seg is None:
            continue
        din, dout = _degrees(arcs_by_year.get(year, ()))
        points.append(DegreePoint(year, seg.entity, din.get(seg.entity, 0), dout.get(seg.entity, 0)))
    return DegreeSeries(chain, tuple(points))


# ---------------------------------------------------------------------------
# yearly summary
# ---------------------------------------------------------------------------


def summarize_network(
    network: ValidatedNetwork,
    accounting: CreditAccounting | str = CreditAccounting.PER_EDGE,
) -> BackboneSummary:
    snap = network.snapshot
    arcs = network.arcs
    nodes = network.nodes
    by_bank, by_firm = network.direction_mask()
    return BackboneSummary(
        year=snap.year,
        banks_on=snap.n_banks,
        firms_on=snap.n_firms,
        edges_on=snap.n_edges,
        banks_fn=sum(1 for n in nodes if n.side is Side.BANK),
        firms_fn=sum(1 for n in nodes if n.side is Side.FIRM),
        lcc_size=len(largest_connected_component(arcs)),
        edges_fn=int((by_bank | by_firm).sum()),
        pairs_bl=int((by_bank & by_firm).sum()),
        credit_ratio=credit_ratio(snap, arcs, accounting),
        density_on=density(snap),
    )


def summarize(
    panel: Panel,
    policy: CorrectionPolicy | None = None,
    accounting: CreditAccounting | str = CreditAccounting.PER_EDGE,
    networks: Sequence[ValidatedNetwork] | None = None,
) -> list[BackboneSummary]:
    """One :class:`BackboneSummary` per panel year."""
    if networks is None:
        networks = [validated_network(s, policy) for s in panel.snapshots]
    return [summarize_network(n, accounting) for n in networks]
