"""Cohort experiments, metrics and tabular exports.

A run optimizes QAOA once per instance (depths ``1..p_max``), refines every
configured ansatz from those optima and writes

``records.jsonl``
    one object per (instance, ansatz, depth), parameters included
``traces.jsonl``
    one object per optimizer outer iteration
``aggregate.csv``
    mean and population std of ``r`` and fidelity per (ansatz, depth), plus
    median ratio metrics
``rfp.csv``
    per-instance ``R_p``, ``R_f``, ``R_fp`` points
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Iterable

import numpy as np

from .ansatz import AnsatzSpec
from .optimizer import OptimizerConfig, optimize_qaoa_interp, run_full_pipeline
from .problems import KINDS, ProblemInstance, generate, read_instance

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
TRACES_FILE = "traces.jsonl"
AGGREGATE_FILE = "aggregate.csv"
RFP_FILE = "rfp.csv"
MIXER_SET = ("YZ", "YY", "XX", "XZ", "XY")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class MetricError(ValueError):
    """Metric undefined for the given inputs."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One cohort run. Every ansatz is evaluated at depths ``1..p_max``; a
    per-ansatz ``p`` in the input is replaced by ``p_max``. QAOA records are
    always produced since they are the baseline for the ratio metrics.
    """

    name: str = "experiment"
    kind: str = "u3R"
    n: int = 14
    cohort: int = 20
    seed_base: int = 0
    p_max: int = 5
    ansatze: tuple[AnsatzSpec, ...] = (AnsatzSpec("zz"), AnsatzSpec("sqaoa"))
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    out_dir: str = "results"
    workers: int = 1
    instances: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.cohort < 1:
            raise ConfigError("cohort size must be >= 1")
        if self.p_max < 1:
            raise ConfigError("p_max must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        specs = tuple(s.with_depth(self.p_max) for s in self.ansatze if s.family != "qaoa")
        labels = [s.label for s in specs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate ansatz labels {labels}")
        object.__setattr__(self, "ansatze", specs)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["ansatze"] = [s.to_dict() for s in self.ansatze]
        d["optimizer"] = self.optimizer.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kw = dict(data)
        try:
            if "ansatze" in kw:
                kw["ansatze"] = tuple(_spec_from(a) for a in kw["ansatze"])
            if "optimizer" in kw:
                opt = kw["optimizer"] or {}
                bad = set(opt) - {f.name for f in fields(OptimizerConfig)}
                if bad:
                    raise ConfigError(f"unknown optimizer fields: {sorted(bad)}")
                kw["optimizer"] = OptimizerConfig(**opt)
            return cls(**kw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def config_hash(self) -> str:
        d = self.to_dict()
        # output location and parallelism do not change results
        for k in ("out_dir", "workers"):
            d.pop(k)
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @property
    def seeds(self) -> list[int]:
        return list(range(self.seed_base, self.seed_base + self.cohort))


def _spec_from(a) -> AnsatzSpec:
    if isinstance(a, AnsatzSpec):
        return a
    if isinstance(a, str):
        return AnsatzSpec(a)
    if not isinstance(a, dict):
        raise ConfigError(f"ansatz entry must be a mapping, got {a!r}")
    a = dict(a)
    if isinstance(a.get("mixers"), list):
        a["mixers"] = tuple(a["mixers"])
    return AnsatzSpec(**a)


def _mixer_specs(mixers: Iterable[str], gathered: bool = True) -> tuple[AnsatzSpec, ...]:
    return tuple(AnsatzSpec("sqaoa", mixers=(m,) if isinstance(m, str) else m, gathered=gathered)
                 for m in mixers)


def presets() -> dict[str, ExperimentConfig]:
    """Named configurations mirroring the published figures.

    Figure 4 has no preset of its own: its points come from the ``rfp.csv``
    tables of fig1, fig2 and fig3.
    """
    main = (AnsatzSpec("zz"), AnsatzSpec("sqaoa"))
    out = {
        "fig1": ExperimentConfig("fig1", "u3R", 14, 20, 0, 5, main),
        "fig2": ExperimentConfig("fig2", "w3R", 14, 20, 0, 5, main),
        "fig3": ExperimentConfig("fig3", "SK", 6, 20, 0, 5, main),
        "fig6": ExperimentConfig("fig6", "w3R", 14, 10, 0, 5,
                                 (AnsatzSpec("sqaoa"), AnsatzSpec("sqaoa", gathered=False))),
    }
    multi = (("YY",), ("YZ", "YY"), ("YZ", "XX"), ("YY", "XX"), ("YZ", "YY", "XX"))
    for kind, n in (("u3R", 14), ("w3R", 14), ("SK", 6)):
        out[f"fig7-{kind}"] = ExperimentConfig(
            f"fig7-{kind}", kind, n, 10, 0, 3, (AnsatzSpec("zz"),) + _mixer_specs(MIXER_SET))
        out[f"fig8-{kind}"] = ExperimentConfig(
            f"fig8-{kind}", kind, n, 10, 0, 3,
            (AnsatzSpec("sqaoa"),) + tuple(AnsatzSpec("sqaoa", mixers=m, gathered=False) for m in multi[1:]))
    return {k: replace(v, out_dir=os.path.join("results", k)) for k, v in out.items()}


def fractional_error(energy: float, e_opt: float) -> float:
    """``r = 1 - E / E_opt``."""
    if e_opt == 0:
        raise MetricError("fractional error undefined for E_opt = 0")
    return 1.0 - energy / e_opt


def ratio_metrics(qaoa: dict, sqaoa: dict) -> tuple[float | None, float, float | None]:
    """``(R_p, R_f, R_fp)`` for two records of the same instance and depth.

    ``R_p`` and ``R_fp`` are ``None`` when the QAOA fidelity is zero.
    """
    if (qaoa["seed"], qaoa["p"]) != (sqaoa["seed"], sqaoa["p"]):
        raise MetricError("ratio metrics need records of the same instance and depth")
    r_f = (sqaoa["f_Q"] + sqaoa["f_G"] + sqaoa["f_O"]) / qaoa["f_Q"]
    if qaoa["fidelity"] <= 0:
        return None, r_f, None
    r_p = sqaoa["fidelity"] / qaoa["fidelity"]
    return r_p, r_f, (r_f / r_p if r_p > 0 else None)


def load_instances(cfg: ExperimentConfig) -> list[ProblemInstance]:
    if cfg.instances is None:
        return [generate(cfg.kind, cfg.n, s) for s in cfg.seeds]
    files = sorted(f for f in os.listdir(cfg.instances) if f.endswith(".txt"))
    insts = [read_instance(os.path.join(cfg.instances, f)) for f in files]
    insts = [i for i in insts if i.kind == cfg.kind and i.n == cfg.n]
    if len(insts) < cfg.cohort:
        raise ConfigError(f"{cfg.instances}: found {len(insts)} {cfg.kind} n={cfg.n} instances, need {cfg.cohort}")
    return insts[: cfg.cohort]


def _record(cfg, inst, spec_label, family, mixers, gathered, res, counter, wall) -> dict:
    e_opt = inst.solution.e_opt
    return {
        "experiment": cfg.name,
        "config_hash": cfg.config_hash,
        "kind": inst.kind,
        "n": inst.n,
        "seed": inst.seed,
        "label": spec_label,
        "family": family,
        "mixers": list(mixers),
        "gathered": gathered,
        "p": res.spec.p,
        "energy": res.best_energy,
        "e_opt": e_opt,
        "r": fractional_error(res.best_energy, e_opt),
        "fidelity": res.fidelity,
        **counter.to_dict(),
        "converged": res.converged,
        "params": [float(v) for v in res.best_params],
        "wall_time": wall,
    }


def run_instance(cfg: ExperimentConfig, inst: ProblemInstance) -> tuple[list[dict], list[dict]]:
    """All records and trace rows for one instance."""
    traces: list[dict] = []

    def tracer(label):
        def on_trace(row):
            traces.append({"seed": inst.seed, "label": label, **row})
        return on_trace

    t0 = time.perf_counter()
    qres = optimize_qaoa_interp(inst, cfg.p_max, cfg.optimizer, on_trace=tracer("QAOA"))
    wall = time.perf_counter() - t0
    records = [_record(cfg, inst, "QAOA", "qaoa", (), True, r, r.counter, wall) for r in qres]
    for spec in cfg.ansatze:
        t0 = time.perf_counter()
        pipe = run_full_pipeline(inst, spec, cfg.optimizer, qaoa_results=qres, on_trace=tracer(spec.label))
        wall = time.perf_counter() - t0
        for q, res, counter in zip(qres, pipe.refined, pipe.counters):
            rec = _record(cfg, inst, spec.label, spec.family, spec.mixers, spec.gathered, res, counter, wall)
            base = records[q.spec.p - 1]
            rec["R_p"], rec["R_f"], rec["R_fp"] = ratio_metrics(base, rec)
            # lower fidelity despite a better expectation value
            rec["unusual"] = bool(rec["energy"] < base["energy"] and rec["fidelity"] < base["fidelity"])
            records.append(rec)
    return records, traces


def _run_one(args):
    cfg, inst = args
    try:
        recs, traces = run_instance(cfg, inst)
        return recs, traces, None
    except Exception as exc:  # recorded, run continues
        logger.exception("instance %s failed", inst.seed)
        return [], [], {"seed": inst.seed, "error": f"{type(exc).__name__}: {exc}"}


@dataclass
class ExperimentResult:
    records: list[dict]
    failures: list[dict]
    out_dir: str | None


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run every instance (optionally on a process pool) and write outputs.

    Records and traces are appended to their files as each instance
    finishes, in seed order; the CSV tables are written at the end.
    """
    insts = load_instances(cfg)
    jobs = [(cfg, inst) for inst in insts]
    records: list[dict] = []
    failures: list[dict] = []
    sinks = []
    if write:
        os.makedirs(cfg.out_dir, exist_ok=True)
        sinks = [open(os.path.join(cfg.out_dir, f), "w") for f in (RECORDS_FILE, TRACES_FILE)]
    try:
        pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
        outs = pool.map(_run_one, jobs) if pool else map(_run_one, jobs)
        for done, (recs, traces, failure) in enumerate(outs, 1):
            records.extend(recs)
            if failure is not None:
                failures.append(failure)
            for fh, rows in zip(sinks, (recs, traces)):
                fh.writelines(json.dumps(row, sort_keys=True) + "\n" for row in rows)
                fh.flush()
            logger.info("%s: %d/%d instances done", cfg.name, done, len(jobs))
        if pool:
            pool.shutdown()
    finally:
        for fh in sinks:
            fh.close()
    if write:
        write_tables(records, cfg.out_dir)
        with open(os.path.join(cfg.out_dir, "config.json"), "w") as fh:
            json.dump({**cfg.to_dict(), "config_hash": cfg.config_hash, "failures": failures},
                      fh, indent=2, default=str)
    return ExperimentResult(records, failures, cfg.out_dir if write else None)


def write_jsonl(path: str, rows: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


@dataclass
class CellStats:
    label: str
    p: int
    count: int
    mean_r: float
    std_r: float
    mean_fidelity: float
    std_fidelity: float
    median_R_p: float | None = None
    median_R_f: float | None = None
    median_R_fp: float | None = None
    mean_f_S: float = 0.0

    @property
    def sem_fidelity(self) -> float:
        return self.std_fidelity / np.sqrt(self.count)

    @property
    def sem_r(self) -> float:
        return self.std_r / np.sqrt(self.count)

    def to_row(self) -> dict:
        row = {f.name: getattr(self, f.name) for f in fields(self)}
        row["sem_r"] = self.sem_r
        row["sem_fidelity"] = self.sem_fidelity
        return row


def _median(values) -> float | None:
    vals = [v for v in values if v is not None]
    return float(np.median(vals)) if vals else None


def aggregate(records: Iterable[dict]) -> dict[tuple[str, int], CellStats]:
    """Mean and population standard deviation per (label, depth)."""
    cells: dict[tuple[str, int], list[dict]] = {}
    for rec in records:
        cells.setdefault((rec["label"], rec["p"]), []).append(rec)
    if not cells:
        raise MetricError("no records to aggregate")
    out = {}
    for key, recs in cells.items():
        r = np.array([x["r"] for x in recs])
        fid = np.array([x["fidelity"] for x in recs])
        stats = CellStats(key[0], key[1], len(recs), float(r.mean()), float(r.std()),
                          float(fid.mean()), float(fid.std()),
                          mean_f_S=float(np.mean([x["f_S"] for x in recs])))
        if key[0] != "QAOA":
            stats.median_R_p = _median(x.get("R_p") for x in recs)
            stats.median_R_f = _median(x.get("R_f") for x in recs)
            stats.median_R_fp = _median(x.get("R_fp") for x in recs)
        out[key] = stats
    return out


def _label_order(records) -> list[str]:
    seen: list[str] = []
    for rec in records:
        if rec["label"] not in seen:
            seen.append(rec["label"])
    return seen


def write_tables(records: list[dict], out_dir: str) -> None:
    if not records:
        return
    stats = aggregate(records)
    order = {lab: k for k, lab in enumerate(_label_order(records))}
    hashes = ";".join(sorted({rec["config_hash"] for rec in records}))
    seeds = sorted({rec["seed"] for rec in records})
    seed_text = f"{seeds[0]}-{seeds[-1]}" if len(seeds) > 1 else str(seeds[0])
    rows = [{"config_hash": hashes, "seeds": seed_text, **s.to_row()}
            for _, s in sorted(stats.items(), key=lambda kv: (order[kv[0][0]], kv[0][1]))]
    _write_csv(os.path.join(out_dir, AGGREGATE_FILE), rows)
    pts = [{k: rec.get(k) for k in ("config_hash", "seed", "label", "p", "R_p", "R_f", "R_fp", "unusual")}
           for rec in records if rec["label"] != "QAOA"]
    _write_csv(os.path.join(out_dir, RFP_FILE), pts)


def _write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else v) for k, v in row.items()})


def report(out_dir: str) -> dict[tuple[str, int], CellStats]:
    """Rebuild the tables of ``out_dir`` from its record file."""
    records = read_jsonl(os.path.join(out_dir, RECORDS_FILE))
    write_tables(records, out_dir)
    return aggregate(records)


def format_table(stats: dict[tuple[str, int], CellStats]) -> str:
    head = f"{'label':<16}{'p':>3}{'N':>4}{'r':>10}{'±':>9}{'fid':>9}{'±':>9}{'R_fp':>8}"
    lines = [head]
    for (label, p), s in sorted(stats.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        rfp = "" if s.median_R_fp is None else f"{s.median_R_fp:.2f}"
        lines.append(f"{label:<16}{p:>3}{s.count:>4}{s.mean_r:>10.4f}{s.std_r:>9.4f}"
                     f"{s.mean_fidelity:>9.4f}{s.std_fidelity:>9.4f}{rfp:>8}")
    return "\n".join(lines)


def recompute_record(rec: dict, inst: ProblemInstance) -> tuple[float, float]:
    """Re-evaluate a stored record's ``(r, fidelity)`` from its parameters."""
    from .optimizer import evaluate

    if rec["family"] == "qaoa":
        spec = AnsatzSpec("qaoa", rec["p"])
    else:
        spec = AnsatzSpec(rec["family"], rec["p"], tuple(rec["mixers"]) or None, rec["gathered"])
    e, fid = evaluate(spec, inst, np.asarray(rec["params"]))
    return fractional_error(e, inst.solution.e_opt), fid
