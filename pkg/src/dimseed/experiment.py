"""Experiment grid (algorithm x target ratio) and the oracle self-check."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .community import CommunityAssignment, detect_communities
from .diffusion import sample_worlds
from .graph import Gender, InvariantViolation, SocialGraph, check_normalized, load_graph, normalize_weights
from .oracles import check_celf_vs_greedy, check_gpi_monotone, check_mc_vs_exact
from .seeding import SwapConfig, target_counts, seed_agnostic, seed_celf, seed_diversity, swap_refine
from .synthgen import SbmSpec, generate_sbm

log = logging.getLogger(__name__)

ALGORITHMS = ("an", "celf", "dv", "an+swap", "celf+swap")
RESULT_COLUMNS = ["dataset", "algo", "zeta", "ratio", "spread", "iters", "converged"]


def derive_seed(master: int, label: str) -> int:
    """Stable 63-bit seed for a named component of a run."""
    digest = hashlib.sha256(f"{int(master)}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


@dataclass
class ExperimentConfig:
    dataset: dict = field(default_factory=lambda: {"name": "synthetic", "sbm": {}})
    algorithms: list = field(default_factory=lambda: ["an+swap", "celf+swap", "dv"])
    zetas: list = field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6])
    swap: dict = field(default_factory=dict)
    master_seed: int = 0
    communities: str = "detect"  # or "truth" (SBM datasets only)
    resolution: float = 1.0
    type_filter: str | None = None

    @classmethod
    def from_json(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"invalid config field(s): {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def validate(self) -> None:
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"invalid algorithm(s) {bad}; choose from {ALGORITHMS}")
        if not isinstance(self.dataset, dict) or ("sbm" in self.dataset) == ("nodes" in self.dataset):
            raise ValueError("dataset needs exactly one of 'sbm' or 'nodes'/'edges'")
        if "nodes" in self.dataset and "edges" not in self.dataset:
            raise ValueError("dataset with 'nodes' also needs 'edges'")
        if self.communities not in ("detect", "truth"):
            raise ValueError("communities must be 'detect' or 'truth'")
        if self.communities == "truth" and "sbm" not in self.dataset:
            raise ValueError("ground-truth communities need an SBM dataset")
        allowed = {f.name for f in fields(SwapConfig)} - {"zeta", "rng_seed"}
        unknown = set(self.swap) - allowed
        if unknown:
            raise ValueError(f"invalid swap field(s): {sorted(unknown)}")
        for z in self.zetas:
            self.swap_config(z)

    def swap_config(self, zeta: float) -> SwapConfig:
        opts = dict(self.swap)
        if "target_gender" in opts:
            opts["target_gender"] = Gender.parse(opts["target_gender"])
        return SwapConfig(zeta=float(zeta), rng_seed=self.master_seed, **opts)

    def effective(self) -> dict:
        d = asdict(self)
        swap = self.swap_config(0.5).to_json()
        d["swap"] = {k: v for k, v in swap.items() if k not in ("zeta", "rng_seed")}
        return d


def _load_dataset(cfg: ExperimentConfig, base_dir: Path) -> tuple[SocialGraph, np.ndarray | None, dict]:
    ds = cfg.dataset
    if "sbm" in ds:
        spec_d = dict(ds["sbm"])
        spec_d.setdefault("rng_seed", derive_seed(cfg.master_seed, "sbm"))
        spec = SbmSpec.from_json(spec_d)
        sample = generate_sbm(spec)
        return sample.graph, sample.truth, sample.meta(spec)
    nodes, edges = (base_dir / ds["nodes"]), (base_dir / ds["edges"])
    for p in (nodes, edges):
        if not p.exists():
            raise ValueError(f"missing dataset file {p}")
    g = normalize_weights(load_graph(nodes, edges, type_filter=cfg.type_filter))
    return g, None, {"nodes": str(ds["nodes"]), "edges": str(ds["edges"])}


def run_experiment(cfg: ExperimentConfig, base_dir: str | Path = ".") -> list[dict]:
    """One row per (algorithm, zeta), sorted by algorithm then zeta."""
    rows: list[dict] = []
    if not cfg.zetas or not cfg.algorithms:
        return rows
    g, truth, _ = _load_dataset(cfg, Path(base_dir))
    name = cfg.dataset.get("name", "dataset")
    first = cfg.swap_config(cfg.zetas[0])
    k, target = first.k, first.target_gender
    ws = sample_worlds(g, first.worlds, derive_seed(cfg.master_seed, "worlds"))
    if cfg.communities == "truth":
        a = CommunityAssignment.from_labels(g, truth)
    else:
        a = detect_communities(g, cfg.resolution, derive_seed(cfg.master_seed, "community"))

    bases: dict[str, list[int]] = {}

    def base(algo: str) -> list[int]:
        if algo not in bases:
            bases[algo] = seed_agnostic(g, k) if algo == "an" else seed_celf(ws, k)
        return bases[algo]

    for algo in sorted(set(cfg.algorithms)):
        for zeta in sorted(cfg.zetas):
            sc = cfg.swap_config(zeta)
            log.info("running %s at zeta=%s", algo, zeta)
            if algo.endswith("+swap"):
                res = swap_refine(g, a, ws, base(algo.split("+")[0]), sc)
                ratio, spread, iters, conv = res.ratio, res.spread, res.iterations, res.converged
            else:
                seeds = seed_diversity(g, ws, k, zeta, target) if algo == "dv" else base(algo)
                total, hits = target_counts(ws, [g.idx(v) for v in seeds], target)
                ratio = hits / total if total else 0.0
                spread, iters = total / ws.R, 0
                conv = abs(ratio - zeta) <= sc.margin + 1e-12
            rows.append({"dataset": name, "algo": algo, "zeta": zeta, "ratio": ratio,
                         "spread": spread, "iters": iters, "converged": conv})
    return rows


def write_results(rows: list[dict], cfg: ExperimentConfig, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    effective = cfg.effective()
    path = out / "results.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# master_seed={cfg.master_seed}\n")
        fh.write(f"# config={json.dumps(effective, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow([r["dataset"], r["algo"], f"{r['zeta']:g}", f"{r['ratio']:.6f}",
                        f"{r['spread']:.6f}", r["iters"], str(r["converged"]).lower()])
    with open(out / "results_meta.json", "w", encoding="utf-8") as fh:
        json.dump({"master_seed": cfg.master_seed, "config": effective}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# -- self-check ----------------------------------------------------------

def self_check(master_seed: int = 0, corrupt: bool = False, mc_graphs: int = 50,
               celf_instances: int = 20, gpi_instances: int = 100) -> list[tuple[str, bool, str]]:
    """Run the oracle suites; returns (check name, passed, detail) per check.

    ``corrupt`` scales one generated graph's probabilities to show that the
    normalisation check catches it.
    """
    report = []

    def run(name, fn, seeds):
        failures = []
        for s in seeds:
            ok, detail = fn(s)
            if not ok:
                failures.append(f"rng-seed {s}: {detail}")
        report.append((name, not failures, "; ".join(failures) or f"{len(seeds)} instances"))

    def normalization(seed):
        g = generate_sbm(SbmSpec(rng_seed=seed)).graph
        if corrupt:
            g = g.with_b(g.b * 1.5)
        try:
            check_normalized(g)
        except InvariantViolation as exc:
            return False, str(exc)
        return True, ""

    base = derive_seed(master_seed, "self-check")
    run("normalization", normalization, [base + i for i in range(3)])
    run("diffusion-exact-vs-mc", check_mc_vs_exact, [base + i for i in range(mc_graphs)])
    run("celf-vs-greedy", check_celf_vs_greedy, [base + i for i in range(celf_instances)])
    run("gpi-monotone", check_gpi_monotone, [base + i for i in range(gpi_instances)])
    return report
