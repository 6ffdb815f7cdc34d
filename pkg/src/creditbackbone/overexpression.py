"""Attribute over-expression in a subnetwork (hypergeometric urn test)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import betaln

from .errors import DomainError
from .model import AttributeClass, EntityId, Side, Snapshot

# Up to this population size the tail is summed in exact integer arithmetic.
EXACT_LIMIT = 10_000


def _check(N: int, N_A: int, n: int, k_obs: int) -> None:
    for name, v in (("N", N), ("N_A", N_A), ("n", n), ("k_obs", k_obs)):
        if isinstance(v, bool) or int(v) != v or v < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
    if N_A > N or n > N:
        raise DomainError(f"need N_A <= N and n <= N, got N={N}, N_A={N_A}, n={n}")
    if k_obs > min(n, N_A):
        raise DomainError(f"k_obs={k_obs} exceeds min(n, N_A)={min(n, N_A)}")


def _log_choose(a, b):
    return -np.log1p(a) - betaln(a - b + 1.0, b + 1.0)


def hypergeometric_tail(N: int, N_A: int, n: int, k_obs: int) -> float:
    """``P(X >= k_obs)`` for ``X`` ~ Hypergeometric(N, N_A, n).

    ``N`` balls, ``N_A`` of them marked, ``n`` drawn without replacement.
    """
    _check(N, N_A, n, k_obs)
    N, N_A, n, k_obs = int(N), int(N_A), int(n), int(k_obs)
    support_lo = max(0, n - (N - N_A))
    if k_obs <= support_lo:
        return 1.0
    lo, hi = k_obs, min(n, N_A)
    if lo > hi:
        return 0.0
    if N <= EXACT_LIMIT:
        # exact integer sum, one correctly rounded division
        a = math.comb(N_A, lo)
        b = math.comb(N - N_A, n - lo)
        total = 0
        for i in range(lo, hi + 1):
            total += a * b
            if i < hi:
                a = a * (N_A - i) // (i + 1)
                b = b * (n - i) // (N - N_A - n + i + 1)
        return min(1.0, total / math.comb(N, n))
    i = np.arange(lo, hi + 1, dtype=np.float64)
    logt = _log_choose(N_A, i) + _log_choose(N - N_A, n - i) - _log_choose(N, n)
    m = logt.max()
    return float(min(1.0, math.exp(m) * np.exp(logt - m).sum()))


@dataclass(frozen=True)
class EnrichmentTest:
    attribute_class: AttributeClass
    value: str
    N: int
    N_A: int
    n: int
    k_obs: int
    p: float

    def __post_init__(self):
        if not (0 <= self.k_obs <= min(self.n, self.N_A) and self.N_A <= self.N and self.n <= self.N):
            raise DomainError(f"inconsistent counts in {self}")


@dataclass(frozen=True)
class AttributeReport:
    year: int
    side: Side
    attribute_class: AttributeClass
    tests: tuple[tuple[EnrichmentTest, bool], ...]
    bonferroni_threshold: float

    @property
    def over_expressed(self) -> list[str]:
        return [t.value for t, flag in self.tests if flag]


def overexpression_report(
    snapshot: Snapshot,
    subnet_nodes: Iterable[EntityId],
    side: Side | str,
    attribute_class: AttributeClass | str,
    theta: float = 0.01,
) -> AttributeReport:
    """Test every value of ``attribute_class`` for over-expression among
    ``subnet_nodes`` relative to all ``side`` nodes of ``snapshot``.

    Unlabelled entities are left out of both urn and draw. The family for
    the Bonferroni threshold is all values tested here.
    """
    side = Side(side)
    attribute_class = AttributeClass(attribute_class)
    if attribute_class.side is not side:
        raise DomainError(f"{attribute_class.value} is not a {side.value} attribute")
    if not (0.0 < theta < 1.0):
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    population = snapshot.entities(side)
    subnet = {e for e in subnet_nodes if e.side is side}
    stray = [e for e in subnet if e not in snapshot]
    if stray:
        raise DomainError(f"subnetwork nodes not in snapshot {snapshot.year}: {sorted(stray)[:3]}")
    attrs = snapshot.attributes
    labels = {e: attrs.value(e, attribute_class) for e in population}
    labelled = [e for e in population if labels[e] is not None]
    N = len(labelled)
    n = sum(1 for e in labelled if e in subnet)
    counts: dict[str, int] = {}
    hits: dict[str, int] = {}
    for e in labelled:
        v = labels[e]
        counts[v] = counts.get(v, 0) + 1
        if e in subnet:
            hits[v] = hits.get(v, 0) + 1
    values = sorted(counts)
    threshold = theta / len(values) if values else theta
    tests = []
    for v in values:
        k_obs = hits.get(v, 0)
        p = hypergeometric_tail(N, counts[v], n, k_obs)
        t = EnrichmentTest(attribute_class, v, N, counts[v], n, k_obs, p)
        tests.append((t, p < threshold))
    return AttributeReport(snapshot.year, side, attribute_class, tuple(tests), threshold)


SIDE_CLASSES = (
    (Side.BANK, AttributeClass.BANK_TYPE),
    (Side.FIRM, AttributeClass.SECTOR),
    (Side.FIRM, AttributeClass.LOCATION),
)


def overexpression_reports(snapshot: Snapshot, subnet_nodes, theta: float = 0.01) -> list[AttributeReport]:
    """Reports for every (side, class) combination, in a fixed order."""
    subnet_nodes = set(subnet_nodes)
    return [overexpression_report(snapshot, subnet_nodes, s, c, theta) for s, c in SIDE_CLASSES]
