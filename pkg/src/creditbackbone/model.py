"""In-memory yearly bank-firm credit networks."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels
from .errors import DomainError, NodeNotFound


class Side(str, Enum):
    BANK = "bank"
    FIRM = "firm"

    def other(self) -> "Side":
        return Side.FIRM if self is Side.BANK else Side.BANK


class AttributeClass(str, Enum):
    BANK_TYPE = "bank_type"
    SECTOR = "sector"
    LOCATION = "location"

    @property
    def side(self) -> Side:
        return Side.BANK if self is AttributeClass.BANK_TYPE else Side.FIRM


TERMS = ("short", "long")


@dataclass(frozen=True, order=True)
class EntityId:
    side: Side
    code: str

    def __post_init__(self):
        if not isinstance(self.code, str) or not self.code:
            raise DomainError("entity code must be a non-empty string")
        object.__setattr__(self, "side", Side(self.side))

    @classmethod
    def bank(cls, code: str) -> "EntityId":
        return cls(Side.BANK, code)

    @classmethod
    def firm(cls, code: str) -> "EntityId":
        return cls(Side.FIRM, code)

    def __str__(self) -> str:
        return f"{self.side.value}:{self.code}"


@dataclass(frozen=True)
class Edge:
    bank: EntityId
    firm: EntityId
    weight: float
    term: str | None = None


class AttributeTable(Mapping):
    """Read-only map ``EntityId -> {AttributeClass: value}``.

    A bank may only carry ``bank_type``; a firm only ``sector`` and
    ``location``. At most one value per class per entity.
    """

    def __init__(self, records: Iterable[tuple[EntityId, AttributeClass, str]] = ()):
        table: dict[EntityId, dict[AttributeClass, str]] = {}
        for entity, cls, value in records:
            cls = AttributeClass(cls)
            if cls.side is not entity.side:
                raise DomainError(f"{cls.value} is not a {entity.side.value} attribute ({entity})")
            if not isinstance(value, str) or value == "":
                raise DomainError(f"empty attribute value for {entity}")
            slot = table.setdefault(entity, {})
            if slot.get(cls, value) != value:
                raise DomainError(
                    f"{entity} has conflicting {cls.value} values {slot[cls]!r} and {value!r}"
                )
            slot[cls] = value
        self._table = {k: dict(sorted(v.items(), key=lambda kv: kv[0].value))
                       for k, v in sorted(table.items())}

    def __getitem__(self, entity: EntityId) -> Mapping[AttributeClass, str]:
        return dict(self._table[entity])

    def __iter__(self) -> Iterator[EntityId]:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttributeTable):
            return NotImplemented
        return self._table == other._table

    __hash__ = None

    def value(self, entity: EntityId, cls: AttributeClass) -> str | None:
        return self._table.get(entity, {}).get(AttributeClass(cls))

    def records(self) -> list[tuple[EntityId, AttributeClass, str]]:
        return [(e, c, v) for e, slot in self._table.items() for c, v in slot.items()]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Snapshot:
    """One year's weighted bipartite credit network.

    Build with :meth:`from_records`. Banks and firms are indexed by the sorted
    order of their codes; edge arrays are sorted by (bank code, firm code).
    Only entities with at least one edge belong to the node universe.
    """

    year: int
    banks: tuple[str, ...]
    firms: tuple[str, ...]
    bank_index: np.ndarray
    firm_index: np.ndarray
    weights: np.ndarray
    terms: tuple[str | None, ...] = ()
    attributes: AttributeTable = field(default_factory=AttributeTable)

    def __post_init__(self):
        n = len(self.weights)
        if not (len(self.bank_index) == len(self.firm_index) == n):
            raise DomainError("edge arrays must have equal length")
        if not self.terms:
            object.__setattr__(self, "terms", (None,) * n)
        for name in ("bank_index", "firm_index", "weights"):
            arr = np.array(getattr(self, name), dtype=np.float64 if name == "weights" else np.int64)
            object.__setattr__(self, name, _readonly(arr))
        if n and not np.all(self.weights > 0):
            raise DomainError("edge weights must be positive")
        kern = _kernels.active()
        bs, bd = kern.accumulate(self.bank_index, self.weights, len(self.banks))
        fs, fd = kern.accumulate(self.firm_index, self.weights, len(self.firms))
        if (bd == 0).any() or (fd == 0).any():
            raise DomainError("every listed bank and firm needs at least one edge")
        object.__setattr__(self, "bank_strength", _readonly(bs))
        object.__setattr__(self, "bank_degree", _readonly(bd))
        object.__setattr__(self, "firm_strength", _readonly(fs))
        object.__setattr__(self, "firm_degree", _readonly(fd))
        object.__setattr__(self, "_bank_pos", {c: i for i, c in enumerate(self.banks)})
        object.__setattr__(self, "_firm_pos", {c: i for i, c in enumerate(self.firms)})

    @classmethod
    def from_records(
        cls,
        year: int,
        records: Iterable[tuple],
        attributes: AttributeTable | None = None,
    ) -> "Snapshot":
        """Aggregate ``(bank_code, firm_code, amount[, term])`` records.

        Zero amounts are dropped, duplicate pairs are summed (exactly rounded,
        so record order never changes the result).
        """
        amounts: dict[tuple[str, str], list[float]] = defaultdict(list)
        terms: dict[tuple[str, str], set] = defaultdict(set)
        for rec in records:
            bank, firm, amount = rec[0], rec[1], float(rec[2])
            term = rec[3] if len(rec) > 3 else None
            if not bank or not firm:
                raise DomainError("empty entity code in edge record")
            if not math.isfinite(amount) or amount < 0:
                raise DomainError(f"invalid amount {amount!r} for ({bank}, {firm})")
            if term is not None and term not in TERMS:
                raise DomainError(f"unknown term {term!r}")
            if amount == 0:
                continue
            amounts[(bank, firm)].append(amount)
            terms[(bank, firm)].add(term)
        keys = sorted(amounts)
        banks = tuple(sorted({b for b, _ in keys}))
        firms = tuple(sorted({f for _, f in keys}))
        bpos = {c: i for i, c in enumerate(banks)}
        fpos = {c: i for i, c in enumerate(firms)}
        tags = []
        for key in keys:
            t = terms[key]
            tags.append(next(iter(t)) if len(t) == 1 else None)
        return cls(
            year=int(year),
            banks=banks,
            firms=firms,
            bank_index=np.array([bpos[b] for b, _ in keys], dtype=np.int64),
            firm_index=np.array([fpos[f] for _, f in keys], dtype=np.int64),
            weights=np.array([math.fsum(amounts[k]) for k in keys], dtype=np.float64),
            terms=tuple(tags),
            attributes=attributes if attributes is not None else AttributeTable(),
        )

    # -- sizes ------------------------------------------------------------
    @property
    def n_banks(self) -> int:
        return len(self.banks)

    @property
    def n_firms(self) -> int:
        return len(self.firms)

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    @property
    def total_credit(self) -> float:
        return math.fsum(self.weights)

    # -- lookup -----------------------------------------------------------
    def __contains__(self, entity: EntityId) -> bool:
        pos = self._bank_pos if entity.side is Side.BANK else self._firm_pos
        return entity.code in pos

    def position(self, entity: EntityId) -> int:
        pos = self._bank_pos if entity.side is Side.BANK else self._firm_pos
        try:
            return pos[entity.code]
        except KeyError:
            raise NodeNotFound(f"{entity} not in snapshot {self.year}") from None

    def strength(self, entity: EntityId) -> float:
        i = self.position(entity)
        arr = self.bank_strength if entity.side is Side.BANK else self.firm_strength
        return float(arr[i])

    def degree(self, entity: EntityId) -> int:
        i = self.position(entity)
        arr = self.bank_degree if entity.side is Side.BANK else self.firm_degree
        return int(arr[i])

    def entities(self, side: Side | None = None) -> list[EntityId]:
        out = []
        if side in (None, Side.BANK):
            out += [EntityId(Side.BANK, c) for c in self.banks]
        if side in (None, Side.FIRM):
            out += [EntityId(Side.FIRM, c) for c in self.firms]
        return out

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(
            Edge(EntityId(Side.BANK, self.banks[b]), EntityId(Side.FIRM, self.firms[f]), float(w), t)
            for b, f, w, t in zip(self.bank_index, self.firm_index, self.weights, self.terms)
        )

    def edge_weights(self) -> dict[tuple[str, str], float]:
        """``{(bank_code, firm_code): amount}`` for every edge."""
        return {
            (self.banks[b], self.firms[f]): float(w)
            for b, f, w in zip(self.bank_index, self.firm_index, self.weights)
        }

    def records(self) -> list[tuple[str, str, float, str | None]]:
        return [(b.code, f.code, w, t) for b, f, w, t in
                ((e.bank, e.firm, e.weight, e.term) for e in self.edges)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (
            self.year == other.year
            and self.banks == other.banks
            and self.firms == other.firms
            and np.array_equal(self.bank_index, other.bank_index)
            and np.array_equal(self.firm_index, other.firm_index)
            and np.array_equal(self.weights, other.weights)
            and self.terms == other.terms
            and self.attributes == other.attributes
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (f"Snapshot(year={self.year}, banks={self.n_banks}, "
                f"firms={self.n_firms}, edges={self.n_edges})")


def node_strength(snapshot: Snapshot, node: EntityId) -> float:
    """Total credit on the edges incident to ``node``."""
    return snapshot.strength(node)


def density(snapshot: Snapshot) -> float:
    """Observed over potential links among active banks and firms."""
    if snapshot.n_edges == 0:
        return 0.0
    return snapshot.n_edges / (snapshot.n_banks * snapshot.n_firms)


def density_from_counts(n_banks: int, n_firms: int, n_edges: int) -> float:
    if n_edges == 0 or n_banks == 0 or n_firms == 0:
        return 0.0
    return n_edges / (n_banks * n_firms)
