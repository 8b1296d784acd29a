"""Command line entry point.

Exit codes: 0 success, 1 failed identity check (``verify-cd``), 2 invalid
configuration or input, 3 some instances failed during ``run``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

import yaml

from .counterdiabatic import (
    first_order_cd,
    second_order_structure,
    verify_cd,
    yy_cost_term,
    yy_driver_term,
)
from .experiments import ConfigError, ExperimentConfig, format_table, presets, report, run_experiment
from .problems import KINDS, generate, read_instance, write_cohort

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2, 3


def _load_config(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        table = presets()
        if args.preset not in table:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(table)}")
        cfg = table[args.preset]
    elif args.config:
        try:
            with open(args.config) as fh:
                data = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        cfg = ExperimentConfig.from_dict(data)
    else:
        cfg = ExperimentConfig()
    overrides = {k: getattr(args, k) for k in ("n", "cohort", "p_max", "seed_base", "workers", "out_dir", "instances")
                 if getattr(args, k) is not None}
    if overrides:
        try:
            cfg = replace(cfg, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def cmd_gen(args) -> int:
    paths = write_cohort(args.kind, args.n, args.count, args.seed, args.out)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load_config(args)
    if args.print_config:
        yaml.safe_dump({**cfg.to_dict(), "config_hash": cfg.config_hash}, sys.stdout, sort_keys=False)
        return EXIT_OK
    result = run_experiment(cfg)
    if result.records:
        print(format_table(report(cfg.out_dir)))
    print(f"wrote {len(result.records)} records to {cfg.out_dir} (config {cfg.config_hash})")
    for f in result.failures:
        print(f"instance seed={f['seed']} failed: {f['error']}", file=sys.stderr)
    return EXIT_PARTIAL if result.failures else EXIT_OK


def cmd_verify_cd(args) -> int:
    if args.graph:
        insts = [read_instance(args.graph)]
    else:
        insts = [generate(args.kind, args.n, s) for s in range(args.seed, args.seed + args.count)]
    ok = True
    for inst in insts:
        checks = verify_cd(inst)
        ok &= all(checks.values())
        status = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
        print(f"{inst.kind} n={inst.n} seed={inst.seed}: {status}")
        if args.show:
            rep = second_order_structure(inst)
            print("  i[H_B,H_C] =", first_order_cd(inst))
            print("  YY-driver  =", yy_driver_term(inst))
            print("  YY-cost    =", yy_cost_term(inst))
            print("  order-2 families:", ", ".join(sorted(rep.families)))
            for axes, (a, b, c) in sorted(rep.quadratic_form.items()):
                print(f"    {axes}: {a:+g} b^2 {b:+g} bg {c:+g} g^2")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_report(args) -> int:
    if not os.path.isdir(args.dir):
        raise ConfigError(f"no result directory {args.dir}")
    print(format_table(report(args.dir)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqaoa", description="QAOA, ZZ-technique and S-QAOA experiments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a cohort of graph files")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--count", type=int, default=20)
    g.add_argument("--seed", type=int, default=0, help="seed of the first instance")
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a cohort experiment")
    r.add_argument("--config", help="YAML experiment configuration")
    r.add_argument("--preset", help="named figure configuration, e.g. fig1")
    r.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    r.add_argument("--n", type=int)
    r.add_argument("--cohort", type=int)
    r.add_argument("--p-max", dest="p_max", type=int)
    r.add_argument("--seed-base", dest="seed_base", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", dest="out_dir")
    r.add_argument("--instances", help="directory of graph files to use instead of generating")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify-cd", help="check the counterdiabatic commutator identities")
    v.add_argument("--kind", choices=KINDS, default="u3R")
    v.add_argument("--n", type=int, default=6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=1)
    v.add_argument("--graph", help="graph file instead of generated instances")
    v.add_argument("--show", action="store_true", help="print the expansions")
    v.set_defaults(func=cmd_verify_cd)

    p = sub.add_parser("report", help="rebuild and print tables of a result directory")
    p.add_argument("dir")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
