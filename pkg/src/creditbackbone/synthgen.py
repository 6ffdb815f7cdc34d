"""Synthetic credit panels with planted concentrated relationships.

Each active bank lends to ``round(mean_degree)`` distinct firms. Non-planted
amounts are i.i.d. exponential draws times a per-bank scale, so the shares of
a bank's credit follow a flat Dirichlet, which is exactly the stick-breaking
null of the disparity test. With equal bank scales (the default) the firm-side
shares are flat Dirichlet as well.

A bank holding ``m`` planted links gives each of them ``concentration / m``
of its strength. Plants are spread over banks as evenly as possible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .ingest import MergerEvent, Panel, write_csv, write_panel
from .model import AttributeClass, AttributeTable, EntityId, Snapshot

GROUND_TRUTH_COLUMNS = ("year", "bank_id", "firm_id")

DEFAULT_BANK_TYPES = {"City": 0.1, "Regional": 0.5, "Trust": 0.1, "LongTerm": 0.05,
                      "Insurance": 0.1, "Cooperative": 0.15}
DEFAULT_SECTORS = {"C": 0.15, "CL": 0.05, "EM": 0.15, "WT": 0.2, "RE": 0.05, "RT": 0.03,
                   "UE": 0.02, "CH": 0.15, "SV": 0.2}
DEFAULT_LOCATIONS = {"Tokyo": 0.4, "Osaka": 0.2, "Aichi": 0.1, "Kanagawa": 0.1,
                     "Hyogo": 0.1, "Fukuoka": 0.1}


@dataclass(frozen=True)
class AttributePalette:
    bank_types: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_BANK_TYPES))
    sectors: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SECTORS))
    locations: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_LOCATIONS))


@dataclass(frozen=True)
class GeneratorConfig:
    n_banks: int = 50
    n_firms: int = 300
    years: tuple[int, ...] = (1980, 1981, 1982)
    mean_degree: float = 10
    concentration_fraction: float = 0.8
    planted_pairs_per_year: int = 0
    plant_persistence: float = 0.0
    strength_dispersion: float = 0.0
    base_amount: float = 1000.0
    palette: AttributePalette = field(default_factory=AttributePalette)
    mergers: tuple[tuple[int, str, str], ...] = ()
    seed: int = 0

    @property
    def bank_degree(self) -> int:
        return int(round(self.mean_degree))

    def bank_codes(self) -> list[str]:
        return [f"B{i:04d}" for i in range(1, self.n_banks + 1)]

    def firm_codes(self) -> list[str]:
        return [f"F{i:05d}" for i in range(1, self.n_firms + 1)]

    def validate(self) -> None:
        if self.n_banks < 1 or self.n_firms < 1:
            raise ConfigError("n_banks and n_firms must be positive")
        if not self.years:
            raise ConfigError("at least one year is required")
        if list(self.years) != sorted(set(self.years)):
            raise ConfigError("years must be strictly increasing")
        if self.bank_degree < 1:
            raise ConfigError("mean_degree must be at least 1")
        if self.bank_degree > self.n_firms:
            raise ConfigError(f"mean_degree {self.mean_degree} exceeds n_firms {self.n_firms}")
        if not (0.0 < self.concentration_fraction < 1.0):
            raise ConfigError("concentration_fraction must lie in (0, 1)")
        if self.planted_pairs_per_year < 0:
            raise ConfigError("planted_pairs_per_year must be >= 0")
        if self.planted_pairs_per_year and self.concentration_fraction <= 1.0 / self.mean_degree:
            raise ConfigError("concentration_fraction must exceed 1/mean_degree")
        if not (0.0 <= self.plant_persistence <= 1.0):
            raise ConfigError("plant_persistence must lie in [0, 1]")
        if self.strength_dispersion < 0 or self.base_amount <= 0:
            raise ConfigError("strength_dispersion must be >= 0 and base_amount > 0")
        banks = set(self.bank_codes())
        for year, absorbed, survivor in self.mergers:
            if absorbed not in banks or survivor not in banks or absorbed == survivor:
                raise ConfigError(f"bad scripted merger {(year, absorbed, survivor)}")
        for y in self.years:
            active = len(self.active_banks(y))
            cap = active * (self.bank_degree - 1)
            if self.planted_pairs_per_year > cap:
                raise ConfigError(
                    f"{self.planted_pairs_per_year} planted pairs exceed the {cap} possible "
                    f"in {y} ({active} banks x {self.bank_degree - 1} plantable links)"
                )
        for name, pal in (("bank_types", self.palette.bank_types), ("sectors", self.palette.sectors),
                          ("locations", self.palette.locations)):
            if not pal or any(w < 0 for w in pal.values()) or sum(pal.values()) <= 0:
                raise ConfigError(f"palette {name} needs non-negative weights with positive sum")

    def active_banks(self, year: int) -> list[str]:
        gone = {a for y, a, _ in self.mergers if y < year}
        return [b for b in self.bank_codes() if b not in gone]


def _draw_labels(rng, palette: Mapping[str, float], n: int) -> list[str]:
    labels = list(palette)
    w = np.array([palette[k] for k in labels], dtype=np.float64)
    return [labels[i] for i in rng.choice(len(labels), size=n, p=w / w.sum())]


def _attributes(config: GeneratorConfig, rng) -> AttributeTable:
    banks, firms = config.bank_codes(), config.firm_codes()
    pal = config.palette
    recs = [(EntityId.bank(b), AttributeClass.BANK_TYPE, v)
            for b, v in zip(banks, _draw_labels(rng, pal.bank_types, len(banks)))]
    recs += [(EntityId.firm(f), AttributeClass.SECTOR, v)
             for f, v in zip(firms, _draw_labels(rng, pal.sectors, len(firms)))]
    recs += [(EntityId.firm(f), AttributeClass.LOCATION, v)
             for f, v in zip(firms, _draw_labels(rng, pal.locations, len(firms)))]
    return AttributeTable(recs)


def _plants(config: GeneratorConfig, rng) -> dict[int, list[tuple[str, str]]]:
    P = config.planted_pairs_per_year
    firms = config.firm_codes()
    out: dict[int, list[tuple[str, str]]] = {}
    prev: list[tuple[str, str]] = []
    for year in config.years:
        active = config.active_banks(year)
        alive = set(active)
        kept = [pr for pr in prev if pr[0] in alive and rng.random() < config.plant_persistence]
        load = {b: 0 for b in active}
        taken = set(kept)
        for b, _ in kept:
            load[b] += 1
        while len(taken) < P:
            low = min(load.values())
            candidates = [b for b in active if load[b] == low]
            b = candidates[rng.integers(len(candidates))]
            while True:
                f = firms[rng.integers(len(firms))]
                if (b, f) not in taken:
                    break
            taken.add((b, f))
            load[b] += 1
        out[year] = sorted(taken)
        prev = out[year]
    return out


def _year_records(config: GeneratorConfig, year: int, plants, scales, rng):
    firms = np.array(config.firm_codes())
    k = config.bank_degree
    c = config.concentration_fraction
    by_bank: dict[str, list[str]] = {}
    for b, f in plants:
        by_bank.setdefault(b, []).append(f)
    fpos = {f: i for i, f in enumerate(firms)}
    records = []
    for b in config.active_banks(year):
        planted = by_bank.get(b, [])
        m = len(planted)
        pool = np.ones(len(firms), bool)
        pool[[fpos[f] for f in planted]] = False
        others = rng.choice(np.flatnonzero(pool), size=k - m, replace=False)
        raw = rng.exponential(1.0, size=k - m) * scales[b]
        for fi, w in zip(sorted(others), raw[np.argsort(others)]):
            records.append((b, str(firms[fi]), float(w)))
        if m:
            w_plant = (c / m) * float(raw.sum()) / (1.0 - c)
            for f in planted:
                records.append((b, f, w_plant))
    return records


def generate_panel(config: GeneratorConfig) -> tuple[Panel, set[tuple[int, str, str]]]:
    """Build a synthetic panel and the set of planted ``(year, bank, firm)``."""
    config.validate()
    root = np.random.SeedSequence(config.seed)
    attr_ss, plant_ss, scale_ss, *year_ss = root.spawn(3 + len(config.years))
    attributes = _attributes(config, np.random.default_rng(attr_ss))
    plants = _plants(config, np.random.default_rng(plant_ss))
    scale_rng = np.random.default_rng(scale_ss)
    banks = config.bank_codes()
    sigma = config.strength_dispersion
    factors = scale_rng.lognormal(0.0, sigma, size=len(banks)) if sigma > 0 else np.ones(len(banks))
    scales = {b: config.base_amount * float(f) for b, f in zip(banks, factors)}
    snapshots = []
    for year, ss in zip(config.years, year_ss):
        recs = _year_records(config, year, plants[year], scales, np.random.default_rng(ss))
        snapshots.append(Snapshot.from_records(year, recs, attributes))
    mergers = tuple(MergerEvent(y, EntityId.bank(a), EntityId.bank(s)) for y, a, s in config.mergers)
    truth = {(y, b, f) for y in config.years for b, f in plants[y]}
    return Panel(tuple(snapshots), mergers, attributes), truth


def write_ground_truth(path, truth) -> Path:
    return write_csv(path, GROUND_TRUTH_COLUMNS, sorted(truth))


def write_synthetic(config: GeneratorConfig, directory) -> dict[str, Path]:
    panel, truth = generate_panel(config)
    paths = write_panel(panel, directory)
    paths["ground_truth"] = write_ground_truth(Path(directory) / "ground_truth.csv", truth)
    return paths
