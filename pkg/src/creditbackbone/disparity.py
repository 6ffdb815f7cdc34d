"""Directional disparity tests and multiple-testing correction.

Every edge is tested twice, once from each endpoint. Under the null the
source spreads its strength over its ``k`` edges by uniform stick-breaking,
so the chance that one share is at least ``x`` is ``(1 - x) ** (k - 1)``.
A validated arc points away from the node whose test rejected the null.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import EntityId, Side, Snapshot


class Correction(str, Enum):
    NONE = "none"
    BONFERRONI = "bonferroni"
    FDR = "fdr"


class K1Policy(str, Enum):
    """What to do with directions whose source has a single edge."""

    P_ONE = "p-one"  # keep the test with p = 1
    SKIP = "skip"    # drop it from the test list


class NtAccounting(str, Enum):
    """Which directions count towards the number of tests N_t."""

    PERFORMED = "performed"            # sources with k >= 2 only
    ALL_DIRECTIONS = "all-directions"  # 2 * |edges|


@dataclass(frozen=True)
class CorrectionPolicy:
    kind: Correction = Correction.FDR
    theta: float = 0.01
    test_count: int | None = None
    k1_policy: K1Policy = K1Policy.P_ONE
    nt: NtAccounting = NtAccounting.PERFORMED

    def __post_init__(self):
        object.__setattr__(self, "kind", Correction(self.kind))
        object.__setattr__(self, "k1_policy", K1Policy(self.k1_policy))
        object.__setattr__(self, "nt", NtAccounting(self.nt))
        if not (0.0 < self.theta < 1.0):
            raise DomainError(f"theta must lie in (0, 1), got {self.theta}")
        if self.test_count is not None and self.test_count < 1:
            raise DomainError(f"test_count must be >= 1, got {self.test_count}")

    def bonferroni_threshold(self, n_tests: int) -> float:
        return self.theta / n_tests


@dataclass(frozen=True)
class DirectedTest:
    source: EntityId
    target: EntityId
    x: float
    k: int
    p: float
    weight: float = float("nan")

    @property
    def performed(self) -> bool:
        return self.k >= 2


@dataclass(frozen=True, order=True)
class ValidatedArc:
    source: EntityId
    target: EntityId
    p: float
    weight: float

    @property
    def pair(self) -> tuple[str, str]:
        """``(bank_code, firm_code)`` of the underlying edge."""
        if self.source.side is Side.BANK:
            return self.source.code, self.target.code
        return self.target.code, self.source.code


def disparity_pvalue(x: float, k: int) -> float:
    """Probability that a uniform split of [0, 1] into ``k`` pieces yields a
    given piece of length at least ``x``.

    ``k == 1`` returns 1: a lone edge carries no evidence.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"degree k must be an integer >= 1, got {k!r}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"normalized weight must lie in [0, 1], got {x!r}")
    k = int(k)
    if k == 1:
        return 1.0
    if k <= _kernels.LOG_SPACE_DEGREE:
        return (1.0 - x) ** (k - 1)
    return math.exp((k - 1) * math.log1p(-x)) if x < 1.0 else 0.0


def disparity_pvalues(x, k) -> np.ndarray:
    """Vectorised :func:`disparity_pvalue` (no domain checks)."""
    p, _ = _kernels.active().disparity_pvalues(np.asarray(x, float), np.asarray(k, np.int64))
    return p


# ---------------------------------------------------------------------------
# array form of the test list
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TestTable:
    """All directional tests of one snapshot as parallel arrays.

    Row ``i < E`` is the bank-side test of edge ``i``; row ``E + i`` the
    firm-side test of the same edge.
    """

    __test__ = False  # not a pytest class

    snapshot: Snapshot
    from_bank: np.ndarray
    edge: np.ndarray
    x: np.ndarray
    k: np.ndarray
    p: np.ndarray
    logp: np.ndarray

    def __len__(self) -> int:
        return len(self.edge)

    @property
    def performed(self) -> np.ndarray:
        return self.k >= 2

    def subset(self, mask: np.ndarray) -> "TestTable":
        return TestTable(self.snapshot, self.from_bank[mask], self.edge[mask], self.x[mask],
                         self.k[mask], self.p[mask], self.logp[mask])

    def sort_order(self) -> np.ndarray:
        """Stable order by (p, source code, target code, source side)."""
        snap = self.snapshot
        codes = sorted(set(snap.banks) | set(snap.firms))
        rank = {c: i for i, c in enumerate(codes)}
        bank_rank = np.array([rank[c] for c in snap.banks], dtype=np.int64)
        firm_rank = np.array([rank[c] for c in snap.firms], dtype=np.int64)
        br = bank_rank[snap.bank_index[self.edge]] if len(self.edge) else np.zeros(0, np.int64)
        fr = firm_rank[snap.firm_index[self.edge]] if len(self.edge) else np.zeros(0, np.int64)
        src = np.where(self.from_bank, br, fr)
        tgt = np.where(self.from_bank, fr, br)
        side = (~self.from_bank).astype(np.int64)
        return np.lexsort((side, tgt, src, self.logp))

    def source(self, i: int) -> EntityId:
        snap, e = self.snapshot, self.edge[i]
        if self.from_bank[i]:
            return EntityId(Side.BANK, snap.banks[snap.bank_index[e]])
        return EntityId(Side.FIRM, snap.firms[snap.firm_index[e]])

    def target(self, i: int) -> EntityId:
        snap, e = self.snapshot, self.edge[i]
        if self.from_bank[i]:
            return EntityId(Side.FIRM, snap.firms[snap.firm_index[e]])
        return EntityId(Side.BANK, snap.banks[snap.bank_index[e]])

    def to_tests(self) -> list[DirectedTest]:
        w = self.snapshot.weights
        return [
            DirectedTest(self.source(i), self.target(i), float(self.x[i]), int(self.k[i]),
                         float(self.p[i]), float(w[self.edge[i]]))
            for i in range(len(self))
        ]


def test_table(snapshot: Snapshot) -> TestTable:
    E = snapshot.n_edges
    bi, fi, w = snapshot.bank_index, snapshot.firm_index, snapshot.weights
    x = np.concatenate([w / snapshot.bank_strength[bi], w / snapshot.firm_strength[fi]])
    k = np.concatenate([snapshot.bank_degree[bi], snapshot.firm_degree[fi]]).astype(np.int64)
    # a lone edge is its node's whole strength
    x[k == 1] = 1.0
    p, logp = _kernels.active().disparity_pvalues(x, k)
    return TestTable(
        snapshot=snapshot,
        from_bank=np.concatenate([np.ones(E, bool), np.zeros(E, bool)]),
        edge=np.concatenate([np.arange(E), np.arange(E)]).astype(np.int64),
        x=x, k=k, p=p, logp=logp,
    )


test_table.__test__ = False


def enumerate_tests(snapshot: Snapshot) -> list[DirectedTest]:
    """Both directional tests of every edge (``2 * |edges|`` items)."""
    return test_table(snapshot).to_tests()


# ---------------------------------------------------------------------------
# correction
# ---------------------------------------------------------------------------


def _select(p: np.ndarray, order: np.ndarray, kind: Correction, theta: float, n_tests: int):
    """Indices of rejected nulls, in ``order`` for FDR."""
    if len(p) == 0 or n_tests < 1:
        return np.zeros(0, dtype=np.int64)
    if kind is Correction.NONE:
        return order[p[order] < theta]
    theta_b = theta / n_tests
    if kind is Correction.BONFERRONI:
        return order[p[order] < theta_b]
    # ranks beyond N_t would have thresholds above theta
    head = order[: min(len(order), n_tests)]
    t_max = _kernels.active().bh_cutoff(p[head], theta_b)
    return head[:t_max]


def _log_for_sort(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def apply_correction(tests: Sequence[DirectedTest], policy: CorrectionPolicy) -> set[ValidatedArc]:
    """Keep the tests whose null is rejected under ``policy``.

    ``policy.test_count`` overrides N_t; by default N_t = ``len(tests)``.
    """
    tests = list(tests)
    if not tests:
        return set()
    p = np.array([t.p for t in tests], dtype=np.float64)
    if np.any(~((p >= 0) & (p <= 1))):
        raise DomainError("p-values must lie in [0, 1]")
    n_tests = policy.test_count if policy.test_count is not None else len(tests)
    keys = [(t.source.code, t.target.code, t.source.side.value) for t in tests]
    key_rank = np.empty(len(tests), dtype=np.int64)
    key_rank[sorted(range(len(tests)), key=keys.__getitem__)] = np.arange(len(tests))
    order = np.lexsort((key_rank, _log_for_sort(p)))
    kept = _select(p, order, policy.kind, policy.theta, n_tests)
    return {ValidatedArc(tests[i].source, tests[i].target, tests[i].p, tests[i].weight) for i in kept}


@dataclass(frozen=True, eq=False)
class ValidatedNetwork:
    """Arcs kept for one snapshot, with the test bookkeeping behind them."""

    year: int
    snapshot: Snapshot
    policy: CorrectionPolicy
    table: TestTable
    kept: np.ndarray
    n_tests: int
    n_k1: int

    @property
    def threshold(self) -> float:
        """Nominal per-test threshold (θ or θ/N_t; for FDR the rank-1 value)."""
        if self.policy.kind is Correction.NONE or self.n_tests == 0:
            return self.policy.theta
        return self.policy.theta / self.n_tests

    @property
    def arcs(self) -> list[ValidatedArc]:
        t, w = self.table, self.snapshot.weights
        out = [ValidatedArc(t.source(i), t.target(i), float(t.p[i]), float(w[t.edge[i]]))
               for i in self.kept]
        return sorted(out, key=arc_sort_key)

    def __len__(self) -> int:
        return len(self.kept)

    @property
    def nodes(self) -> set[EntityId]:
        return {n for a in self.arcs for n in (a.source, a.target)}

    def direction_mask(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-edge booleans: (validated from bank, validated from firm)."""
        E = self.snapshot.n_edges
        by_bank = np.zeros(E, bool)
        by_firm = np.zeros(E, bool)
        fb, e = self.table.from_bank[self.kept], self.table.edge[self.kept]
        by_bank[e[fb]] = True
        by_firm[e[~fb]] = True
        return by_bank, by_firm


def arc_sort_key(arc: ValidatedArc):
    return (arc.source.side.value, arc.source.code, arc.target.code)


def validated_network(snapshot: Snapshot, policy: CorrectionPolicy | None = None) -> ValidatedNetwork:
    """Run every directional test on ``snapshot`` and apply ``policy``."""
    policy = policy or CorrectionPolicy()
    table = test_table(snapshot)
    n_k1 = int((~table.performed).sum())
    if policy.k1_policy is K1Policy.SKIP:
        table = table.subset(table.performed)
    if policy.test_count is not None:
        n_tests = policy.test_count
    elif policy.nt is NtAccounting.ALL_DIRECTIONS:
        n_tests = 2 * snapshot.n_edges
    else:
        n_tests = len(table) - n_k1 if policy.k1_policy is K1Policy.P_ONE else len(table)
    kept = _select(table.p, table.sort_order(), policy.kind, policy.theta, n_tests)
    return ValidatedNetwork(snapshot.year, snapshot, policy, table, np.asarray(kept, np.int64),
                            n_tests, n_k1)
