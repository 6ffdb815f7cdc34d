"""Year-over-year comparison of validated subgraphs."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Mapping, Sequence

import numpy as np

from . import _kernels
from .disparity import CorrectionPolicy, ValidatedNetwork, validated_network
from .errors import DomainError
from .ingest import Panel


class Subgraph(str, Enum):
    FN = "fn"                        # every edge with a validated direction
    BIDIRECTIONAL = "bidirectional"  # edges validated from both endpoints


class JaccardWeights(str, Enum):
    AMOUNT = "amount"
    BINARY = "binary"


def weighted_jaccard(a: Mapping[Hashable, float], b: Mapping[Hashable, float]) -> float:
    """``sum(min) / sum(max)`` over the union of keys, missing weights = 0.

    Two empty (or all-zero) inputs compare as identical (1.0).
    """
    for m in (a, b):
        for w in m.values():
            if not w >= 0:
                raise DomainError(f"weights must be non-negative, got {w!r}")
    keys = sorted(set(a) | set(b), key=repr)
    wa = np.array([a.get(k, 0.0) for k in keys], dtype=np.float64)
    wb = np.array([b.get(k, 0.0) for k in keys], dtype=np.float64)
    lo, hi = _kernels.active().minmax_sums(wa, wb)
    if hi == 0.0:
        return 1.0
    return min(1.0, lo / hi)


def subgraph_weights(
    network: ValidatedNetwork,
    selector: Subgraph | str = Subgraph.BIDIRECTIONAL,
    weighting: JaccardWeights | str = JaccardWeights.AMOUNT,
) -> dict[tuple[str, str], float]:
    """``{(bank_code, firm_code): weight}`` of the selected subgraph."""
    selector, weighting = Subgraph(selector), JaccardWeights(weighting)
    snap = network.snapshot
    by_bank, by_firm = network.direction_mask()
    mask = (by_bank & by_firm) if selector is Subgraph.BIDIRECTIONAL else (by_bank | by_firm)
    out = {}
    for e in np.flatnonzero(mask):
        key = (snap.banks[snap.bank_index[e]], snap.firms[snap.firm_index[e]])
        out[key] = float(snap.weights[e]) if weighting is JaccardWeights.AMOUNT else 1.0
    return out


@dataclass(frozen=True, eq=False)
class JaccardMatrix:
    years: tuple[int, ...]
    values: np.ndarray
    selector: Subgraph = Subgraph.BIDIRECTIONAL
    weighting: JaccardWeights = JaccardWeights.AMOUNT

    def __getitem__(self, pair: tuple[int, int]) -> float:
        i, j = (self.years.index(y) for y in pair)
        return float(self.values[i, j])

    def long_form(self) -> list[tuple[int, int, float]]:
        return [(ya, yb, float(self.values[i, j]))
                for i, ya in enumerate(self.years) for j, yb in enumerate(self.years)]


def _networks(panel: Panel, policy, networks):
    if networks is not None:
        return list(networks)
    return [validated_network(s, policy) for s in panel.snapshots]


def jaccard_matrix(
    panel: Panel,
    selector: Subgraph | str = Subgraph.BIDIRECTIONAL,
    weighting: JaccardWeights | str = JaccardWeights.AMOUNT,
    policy: CorrectionPolicy | None = None,
    networks: Sequence[ValidatedNetwork] | None = None,
) -> JaccardMatrix:
    """Weighted Jaccard similarity of the selected subgraph for all year pairs."""
    selector, weighting = Subgraph(selector), JaccardWeights(weighting)
    nets = _networks(panel, policy, networks)
    graphs = [subgraph_weights(n, selector, weighting) for n in nets]
    m = len(graphs)
    values = np.ones((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            values[i, j] = values[j, i] = weighted_jaccard(graphs[i], graphs[j])
    values.setflags(write=False)
    return JaccardMatrix(tuple(n.year for n in nets), values, selector, weighting)


@dataclass(frozen=True)
class LinkLifetime:
    bank: str
    firm: str
    years_present: tuple[int, ...]
    max_run: int

    @property
    def first_year(self) -> int:
        return self.years_present[0]

    @property
    def last_year(self) -> int:
        return self.years_present[-1]


def longest_run(years: Sequence[int]) -> int:
    """Longest stretch of consecutive calendar years."""
    ys = sorted(set(years))
    best = run = 0
    prev = None
    for y in ys:
        run = run + 1 if prev is not None and y == prev + 1 else 1
        best = max(best, run)
        prev = y
    return best


def link_lifetimes(
    panel: Panel,
    policy: CorrectionPolicy | None = None,
    networks: Sequence[ValidatedNetwork] | None = None,
) -> list[LinkLifetime]:
    """Presence years of every bank-firm pair ever validated in both directions."""
    seen: dict[tuple[str, str], list[int]] = {}
    for net in _networks(panel, policy, networks):
        for key in subgraph_weights(net, Subgraph.BIDIRECTIONAL, JaccardWeights.BINARY):
            seen.setdefault(key, []).append(net.year)
    return [LinkLifetime(b, f, tuple(sorted(ys)), longest_run(ys)) for (b, f), ys in sorted(seen.items())]
