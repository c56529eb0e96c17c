"""Command line entry point: ``sfgcontrol run <config.json>``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .lab import experiments, io
from .lab.config import ConfigError, load_config, with_overrides
from .oracles import run_verification
from .shaper import export_mask_csv

log = logging.getLogger("sfgcontrol")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3


def run(cfg, out_dir: Path, threads: int = 1) -> dict:
    """Execute one experiment and write its artifacts; returns the summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = {"config_sha256": cfg.digest(), "seed": cfg.run.master_seed, "version": __version__,
            "experiment": cfg.run.experiment, "config": cfg.to_dict()}
    kind = cfg.run.experiment
    if kind == "spectrum":
        sp, summary = experiments.spectrum(cfg, threads)
        io.write_spectrum(out_dir, sp, prov)
        if cfg.mask.descriptor.get("kind") != "zero" or cfg.mask.pixels:
            setup = experiments.build(cfg)
            export_mask_csv(experiments._final_mask(setup), out_dir / "mask.csv")
    else:
        if kind == "ratio_sweep":
            scan, rows = experiments.ratio_sweep(cfg, threads)
            io.write_csv(out_dir / "ratio_sweep.csv",
                         ("photons", "bandwidth_ratio", "engine_ratio", "formula_ratio",
                          "relative_deviation"),
                         ([r["photons"], r["bandwidth_ratio"], r["engine_ratio"],
                           r["formula_ratio"], r["relative_deviation"]] for r in rows), prov)
        elif kind == "delay_scan":
            scan = experiments.delay_scan(cfg, threads)
        else:
            scan = experiments.theta_scan(cfg, threads)
        io.write_scan(out_dir, scan, prov)
        summary = dict(scan.summary)
        summary["contrast_min_over_max"] = scan.contrast
    doc = {"provenance": prov, "summary": summary}
    io.write_json(out_dir / "summary.json", doc)
    return summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sfgcontrol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=None, help="override run.master_seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--verify", action="store_true", help="run the oracle suite first")
    p.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.verify:
        results = run_verification()
        failed = [r for r in results if not r[1]]
        for name, ok, detail in results if args.verbose else []:
            log.info("verify %s: %s (%s)", name, "ok" if ok else "FAIL", detail)
        if failed:
            for name, _, detail in failed:
                print(f"verification failed: {name}: {detail}", file=sys.stderr)
            return EXIT_VERIFY
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("run.master_seed", "must be >= 0")
            cfg = with_overrides(cfg, master_seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = run(cfg, args.out, max(1, args.threads))
    log.info("summary: %s", summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
