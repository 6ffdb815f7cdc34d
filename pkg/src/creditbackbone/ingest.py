"""Reading and writing panel files.

Three CSV inputs, header row required, UTF-8, RFC-4180 quoting::

    edges.csv       year,bank_id,firm_id,amount[,term]
    attributes.csv  entity_id,side,attribute_class,value
    mergers.csv     year,absorbed_id,survivor_id

``term`` is ``short``, ``long`` or empty. Amounts use "." as the decimal
separator and no thousands separators.
"""
from __future__ import annotations

import csv
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import DomainError, IngestError, NodeNotFound
from .model import TERMS, AttributeClass, AttributeTable, EntityId, Side, Snapshot

EDGE_COLUMNS = ("year", "bank_id", "firm_id", "amount")
ATTRIBUTE_COLUMNS = ("entity_id", "side", "attribute_class", "value")
MERGER_COLUMNS = ("year", "absorbed_id", "survivor_id")

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class MergerEvent:
    """``absorbed`` ceases to exist after ``year``; ``survivor`` carries on."""

    year: int
    absorbed: EntityId
    survivor: EntityId

    def __post_init__(self):
        if self.absorbed == self.survivor:
            raise DomainError(f"merger {self.year}: absorbed and survivor are both {self.absorbed}")
        if self.absorbed.side is not Side.BANK or self.survivor.side is not Side.BANK:
            raise DomainError(f"merger {self.year}: both parties must be banks")


class ChainSegment(NamedTuple):
    first_year: int
    last_year: int
    entity: EntityId


@dataclass(frozen=True)
class Panel:
    snapshots: tuple[Snapshot, ...]
    mergers: tuple[MergerEvent, ...] = ()
    attributes: AttributeTable = field(default_factory=AttributeTable)

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        object.__setattr__(
            self, "mergers",
            tuple(sorted(self.mergers, key=lambda m: (m.year, m.absorbed.code, m.survivor.code))),
        )
        years = [s.year for s in self.snapshots]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise DomainError(f"snapshot years must be strictly increasing, got {years}")
        absorbed: dict[EntityId, MergerEvent] = {}
        for m in self.mergers:
            if m.absorbed in absorbed:
                raise DomainError(f"{m.absorbed} is absorbed twice ({absorbed[m.absorbed].year}, {m.year})")
            absorbed[m.absorbed] = m
            late = [y for y in self.years_present(m.absorbed) if y > m.year]
            if late:
                raise DomainError(f"{m.absorbed} absorbed in {m.year} but still present in {late[0]}")

    @property
    def years(self) -> list[int]:
        return [s.year for s in self.snapshots]

    def __iter__(self) -> Iterator[Snapshot]:
        return iter(self.snapshots)

    def __len__(self) -> int:
        return len(self.snapshots)

    def snapshot(self, year: int) -> Snapshot:
        for s in self.snapshots:
            if s.year == year:
                return s
        raise KeyError(year)

    @cached_property
    def _presence(self) -> dict[EntityId, list[int]]:
        seen: dict[EntityId, list[int]] = defaultdict(list)
        for s in self.snapshots:
            for c in s.banks:
                seen[EntityId(Side.BANK, c)].append(s.year)
            for c in s.firms:
                seen[EntityId(Side.FIRM, c)].append(s.year)
        return dict(seen)

    def years_present(self, entity: EntityId) -> list[int]:
        return list(self._presence.get(entity, ()))


def _as_entity(code) -> EntityId:
    return code if isinstance(code, EntityId) else EntityId(Side.BANK, str(code))


def continuity_chain(panel: Panel, code: EntityId | str) -> list[ChainSegment]:
    """Codes under which one institution is tracked through successive mergers.

    Each segment ends in the year its code is absorbed; the next segment
    starts the following year under the survivor's code.
    """
    entity = _as_entity(code)
    by_absorbed = {m.absorbed: m for m in panel.mergers}
    present = panel.years_present(entity)
    if not present and entity not in by_absorbed and all(m.survivor != entity for m in panel.mergers):
        raise NodeNotFound(f"{entity} does not appear in the panel")
    if not panel.years:
        return []
    last_panel_year = panel.years[-1]
    start = present[0] if present else panel.years[0]
    chain: list[ChainSegment] = []
    visited = set()
    while True:
        if entity in visited:
            raise DomainError(f"merger map has a cycle through {entity}")
        visited.add(entity)
        m = by_absorbed.get(entity)
        if m is not None and m.year >= start:
            chain.append(ChainSegment(start, m.year, entity))
            entity, start = m.survivor, m.year + 1
            if start > last_panel_year:
                return chain
            continue
        later = [y for y in panel.years_present(entity) if y >= start]
        chain.append(ChainSegment(start, later[-1] if later else last_panel_year, entity))
        return chain


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------


def _rows(path: Path, required: Sequence[str], optional: Sequence[str] = ()):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read file ({exc.strerror or exc})", path) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty file, header row required", path, 1) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise IngestError(str(exc), path, 1) from exc
        header = [h.strip() for h in header]
        allowed = (tuple(required), tuple(required) + tuple(optional))
        if tuple(header) not in allowed:
            raise IngestError(
                f"header must be {','.join(required)}"
                + (f"[,{','.join(optional)}]" if optional else "")
                + f", got {','.join(header)}",
                path, 1,
            )
        try:
            for row in reader:
                line = reader.line_num
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise IngestError(f"expected {len(header)} columns, got {len(row)}", path, line)
                yield line, [c.strip() for c in row]
        except (csv.Error, UnicodeDecodeError) as exc:
            raise IngestError(str(exc), path, reader.line_num) from exc


def _int(value: str, what: str, path, line) -> int:
    if not _INTEGER.match(value):
        raise IngestError(f"{what} must be an integer, got {value!r}", path, line)
    return int(value)


def _amount(value: str, path, line) -> float:
    if not _NUMBER.match(value):
        raise IngestError(f"amount must be a plain decimal number, got {value!r}", path, line)
    amount = float(value)
    if amount < 0:
        raise IngestError(f"negative amount {value}", path, line)
    if amount == float("inf"):
        raise IngestError(f"amount {value} overflows", path, line)
    return amount


def read_edges(path) -> dict[int, list[tuple[str, str, float, str | None]]]:
    path = Path(path)
    by_year: dict[int, list] = defaultdict(list)
    for line, row in _rows(path, EDGE_COLUMNS, ("term",)):
        year = _int(row[0], "year", path, line)
        bank, firm = row[1], row[2]
        if not bank or not firm:
            raise IngestError("empty bank_id or firm_id", path, line)
        amount = _amount(row[3], path, line)
        term = row[4] if len(row) > 4 and row[4] else None
        if term is not None and term not in TERMS:
            raise IngestError(f"term must be one of {TERMS} or empty, got {term!r}", path, line)
        by_year[year].append((bank, firm, amount, term))
    return dict(by_year)


def read_attributes(path) -> AttributeTable:
    path = Path(path)
    records = []
    seen: dict[tuple[EntityId, AttributeClass], tuple[str, int]] = {}
    for line, row in _rows(path, ATTRIBUTE_COLUMNS):
        code, side, cls, value = row
        if not code:
            raise IngestError("empty entity_id", path, line)
        try:
            side_e = Side(side)
        except ValueError:
            raise IngestError(f"side must be bank or firm, got {side!r}", path, line) from None
        try:
            cls_e = AttributeClass(cls)
        except ValueError:
            raise IngestError(
                f"attribute_class must be bank_type, sector or location, got {cls!r}", path, line
            ) from None
        if cls_e.side is not side_e:
            raise IngestError(f"{cls} is not a {side} attribute", path, line)
        if not value:
            raise IngestError("empty attribute value", path, line)
        entity = EntityId(side_e, code)
        prev = seen.get((entity, cls_e))
        if prev is not None and prev[0] != value:
            raise IngestError(
                f"{entity} already has {cls}={prev[0]!r} (line {prev[1]})", path, line
            )
        seen[(entity, cls_e)] = (value, line)
        records.append((entity, cls_e, value))
    return AttributeTable(records)


def read_mergers(path) -> list[MergerEvent]:
    path = Path(path)
    events = []
    first_line: dict[str, int] = {}
    for line, row in _rows(path, MERGER_COLUMNS):
        year = _int(row[0], "year", path, line)
        absorbed, survivor = row[1], row[2]
        if not absorbed or not survivor:
            raise IngestError("empty absorbed_id or survivor_id", path, line)
        if absorbed in first_line:
            raise IngestError(
                f"{absorbed} already absorbed (line {first_line[absorbed]})", path, line
            )
        first_line[absorbed] = line
        try:
            events.append(MergerEvent(year, EntityId.bank(absorbed), EntityId.bank(survivor)))
        except DomainError as exc:
            raise IngestError(str(exc), path, line) from exc
    return events


def load_panel(edge_file, attribute_file=None, merger_file=None) -> Panel:
    """Parse the panel files into a :class:`Panel` (one snapshot per year)."""
    by_year = read_edges(edge_file)
    attributes = read_attributes(attribute_file) if attribute_file is not None else AttributeTable()
    mergers = read_mergers(merger_file) if merger_file is not None else []
    snapshots = [Snapshot.from_records(y, by_year[y], attributes) for y in sorted(by_year)]
    try:
        return Panel(tuple(snapshots), tuple(mergers), attributes)
    except DomainError as exc:
        raise IngestError(str(exc), merger_file) from exc


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """Shortest repr that reads back to the same float."""
    return repr(float(x))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def write_panel(panel: Panel, directory) -> dict[str, Path]:
    """Write ``edges.csv``, ``attributes.csv`` and ``mergers.csv`` to ``directory``."""
    directory = Path(directory)
    edges = write_csv(
        directory / "edges.csv",
        EDGE_COLUMNS + ("term",),
        (
            (s.year, b, f, format_float(w), t or "")
            for s in panel.snapshots
            for b, f, w, t in s.records()
        ),
    )
    attrs = write_csv(
        directory / "attributes.csv",
        ATTRIBUTE_COLUMNS,
        ((e.code, e.side.value, c.value, v) for e, c, v in panel.attributes.records()),
    )
    mergers = write_csv(
        directory / "mergers.csv",
        MERGER_COLUMNS,
        ((m.year, m.absorbed.code, m.survivor.code) for m in panel.mergers),
    )
    return {"edges": edges, "attributes": attrs, "mergers": mergers}
