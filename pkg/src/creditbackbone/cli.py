"""Command-line front end: ``creditbackbone {validate,enrich,compare,synth}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__, export
from .analytics import CreditAccounting, degree_series, summarize_network
from .disparity import Correction, CorrectionPolicy, K1Policy, NtAccounting, validated_network
from .errors import CreditBackboneError
from .ingest import Panel, continuity_chain, load_panel
from .model import EntityId, Side
from .overexpression import overexpression_reports
from .synthgen import GeneratorConfig, write_synthetic
from .temporal import JaccardWeights, Subgraph, jaccard_matrix, link_lifetimes, subgraph_weights

log = logging.getLogger("creditbackbone")


@dataclass(frozen=True)
class RunConfig:
    edges: Path | None
    attributes: Path | None
    mergers: Path | None
    out: Path
    policy: CorrectionPolicy
    subgraph: Subgraph
    jaccard_weights: JaccardWeights
    credit_ratio: CreditAccounting
    jobs: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            edges=args.edges,
            attributes=args.attributes,
            mergers=args.mergers,
            out=args.out,
            policy=CorrectionPolicy(
                kind=Correction(args.correction),
                theta=args.theta,
                k1_policy=K1Policy(args.k1_policy),
                nt=NtAccounting(args.nt),
            ),
            subgraph=Subgraph(args.subgraph),
            jaccard_weights=JaccardWeights(args.jaccard_weights),
            credit_ratio=CreditAccounting(args.credit_ratio),
            jobs=args.jobs,
        )

    def manifest(self, command: str) -> dict:
        return {
            "command": command,
            "version": __version__,
            "inputs": {k: (getattr(self, k).name if getattr(self, k) else None)
                       for k in ("edges", "attributes", "mergers")},
            "correction": self.policy.kind.value,
            "theta": self.policy.theta,
            "k1_policy": self.policy.k1_policy.value,
            "nt": self.policy.nt.value,
            "subgraph": self.subgraph.value,
            "jaccard_weights": self.jaccard_weights.value,
            "credit_ratio": self.credit_ratio.value,
        }


def _write_manifest(cfg: RunConfig, command: str, files: list[Path]) -> None:
    data = cfg.manifest(command)
    data["outputs"] = sorted(p.name for p in files)
    path = cfg.out / f"{command}.manifest.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load(cfg: RunConfig) -> Panel:
    if cfg.edges is None:
        raise CreditBackboneError("--edges is required")
    return load_panel(cfg.edges, cfg.attributes, cfg.mergers)


def _networks(cfg: RunConfig, panel: Panel):
    def run(snap):
        return validated_network(snap, cfg.policy)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(run, panel.snapshots))
    return [run(s) for s in panel.snapshots]


def _subnet_nodes(net, selector: Subgraph) -> set[EntityId]:
    if selector is Subgraph.FN:
        return net.nodes
    keys = subgraph_weights(net, Subgraph.BIDIRECTIONAL, JaccardWeights.BINARY)
    return {EntityId.bank(b) for b, _ in keys} | {EntityId.firm(f) for _, f in keys}


def cmd_validate(cfg: RunConfig) -> int:
    panel = _load(cfg)
    nets = _networks(cfg, panel)
    cfg.out.mkdir(parents=True, exist_ok=True)
    arcs_by_year = {n.year: n.arcs for n in nets}
    roots = sorted({c for s in panel.snapshots for c in s.banks})
    series = [degree_series(panel, arcs_by_year, continuity_chain(panel, EntityId(Side.BANK, c)))
              for c in roots]
    files = [
        export.write_arcs(cfg.out / "arcs.csv", nets),
        export.write_summary(cfg.out / "summary.csv",
                             [summarize_network(n, cfg.credit_ratio) for n in nets]),
        export.write_test_counts(cfg.out / "tests.csv", nets),
        export.write_degree_series(cfg.out / "degree_series.csv", series),
    ]
    _write_manifest(cfg, "validate", files)
    log.info("validated %d years, %d arcs", len(nets), sum(len(n) for n in nets))
    return 0


def cmd_enrich(cfg: RunConfig) -> int:
    panel = _load(cfg)
    nets = _networks(cfg, panel)
    cfg.out.mkdir(parents=True, exist_ok=True)
    reports = []
    for net in nets:
        reports += overexpression_reports(net.snapshot, _subnet_nodes(net, cfg.subgraph),
                                          cfg.policy.theta)
    files = [export.write_reports(cfg.out / "overexpression.csv", reports)]
    _write_manifest(cfg, "enrich", files)
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    panel = _load(cfg)
    nets = _networks(cfg, panel)
    cfg.out.mkdir(parents=True, exist_ok=True)
    matrix = jaccard_matrix(panel, cfg.subgraph, cfg.jaccard_weights, networks=nets)
    files = [
        export.write_jaccard(cfg.out / "jaccard.csv", matrix),
        export.write_lifetimes(cfg.out / "lifetimes.csv", link_lifetimes(panel, networks=nets)),
    ]
    _write_manifest(cfg, "compare", files)
    return 0


def _parse_years(text: str) -> tuple[int, ...]:
    text = text.strip()
    if "-" in text.lstrip("-") and "," not in text:
        a, b = text.split("-", 1)
        return tuple(range(int(a), int(b) + 1))
    return tuple(int(t) for t in text.split(","))


def cmd_synth(args) -> int:
    config = GeneratorConfig(
        n_banks=args.banks,
        n_firms=args.firms,
        years=_parse_years(args.years),
        mean_degree=args.mean_degree,
        concentration_fraction=args.concentration,
        planted_pairs_per_year=args.planted,
        plant_persistence=args.persistence,
        strength_dispersion=args.dispersion,
        seed=args.seed,
    )
    paths = write_synthetic(config, args.out)
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return 0


# ---------------------------------------------------------------------------


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", type=Path, required=True, help="edge CSV")
    p.add_argument("--attributes", type=Path, help="attribute CSV")
    p.add_argument("--mergers", type=Path, help="merger CSV")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--correction", choices=[c.value for c in Correction], default="fdr")
    p.add_argument("--theta", type=float, default=0.01)
    p.add_argument("--subgraph", choices=[s.value for s in Subgraph], default=None)
    p.add_argument("--k1-policy", choices=[k.value for k in K1Policy], default="p-one")
    p.add_argument("--nt", choices=[n.value for n in NtAccounting], default="performed")
    p.add_argument("--jaccard-weights", choices=[w.value for w in JaccardWeights], default="amount")
    p.add_argument("--credit-ratio", choices=[c.value for c in CreditAccounting], default="per-edge")
    p.add_argument("--jobs", type=int, default=1, help="worker threads across years")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; pipeline is deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="creditbackbone", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext, default_sub in (
        ("validate", "validated arcs, yearly summary, degree series", "fn"),
        ("enrich", "attribute over-expression reports", "fn"),
        ("compare", "weighted Jaccard matrix and bidirectional link lifetimes", "bidirectional"),
    ):
        p = sub.add_parser(name, help=helptext)
        _pipeline_flags(p)
        p.set_defaults(default_subgraph=default_sub)

    s = sub.add_parser("synth", help="generate a synthetic panel with planted links")
    s.add_argument("--out", type=Path, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--banks", type=int, default=50)
    s.add_argument("--firms", type=int, default=300)
    s.add_argument("--years", default="1980-1984", help="'1980-1984' or '1980,1985'")
    s.add_argument("--mean-degree", type=float, default=10)
    s.add_argument("--concentration", type=float, default=0.8)
    s.add_argument("--planted", type=int, default=20, help="planted pairs per year")
    s.add_argument("--persistence", type=float, default=0.5)
    s.add_argument("--dispersion", type=float, default=0.0, help="lognormal sigma of bank scales")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.subgraph is None:
            args.subgraph = args.default_subgraph
        cfg = RunConfig.from_args(args)
        return {"validate": cmd_validate, "enrich": cmd_enrich, "compare": cmd_compare}[args.command](cfg)
    except (CreditBackboneError, OSError) as exc:
        print(f"creditbackbone: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
