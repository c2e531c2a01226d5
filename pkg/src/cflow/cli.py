"""``cflow`` command-line driver.

Exit codes: 0 success, 1 failed checks, 2 malformed config,
3 numerical instability, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import checks, curvature, induction, outputs
from .config import ConfigError, load_config

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("cflow")


def _load(config_path):
    try:
        return load_config(config_path)
    except OSError as exc:
        raise _IOFailure(f"cannot read config {config_path}: {exc}") from None


class _IOFailure(Exception):
    pass


def simulation_summary(cfg: induction.SimConfig, rec: induction.SimRecord, seed) -> dict:
    t = rec.times
    window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    try:
        rates = induction.growth_rates(rec, window)
    except ValueError as exc:
        log.warning("growth rates not fitted: %s", exc)
        rates = (None, None, None)
    m = cfg.metric
    return {
        "seed": seed,
        "metric": {"lambda1": m.lambda1, "lambda2": m.lambda2, "mu1": m.mu1, "mu2": m.mu2,
                   "is_arnold": m.is_arnold},
        "grid": {"n_p": cfg.grid.n_p, "n_q": cfg.grid.n_q, "n_z": cfg.grid.n_z, "fd_order": cfg.fd_order},
        "flow": {"v": cfg.v, "eta": cfg.eta},
        "time": {"dt": cfg.dt, "t_end": cfg.t_end, "sample_stride": cfg.sample_stride},
        "fit_window": list(window),
        "growth_rates": dict(zip(("p", "q", "z"), rates)),
        "expected_rates": dict(zip(("p", "q", "z"), induction.expected_rates(m, cfg.v))),
        "energy_growth_rate": induction.energy_growth_rate(rec, window) if len(rec) >= 2 else None,
        "n_samples": len(rec),
        "final_max_div": float(rec.max_div[-1]),
    }


def run_simulate(config_path, output_dir, seed=None) -> int:
    try:
        rc = _load(config_path)
        cfg = rc.sim_config()
        names = rc.output_names()
        out = Path(output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise _IOFailure(f"cannot create output directory {out}: {exc}") from None
        rec = induction.simulate(cfg)
        summary = simulation_summary(cfg, rec, seed)
        try:
            outputs.write_timeseries(out / names["timeseries"], rec)
            outputs.write_json(out / names["summary"], summary)
            if cfg.snapshots:
                outputs.write_snapshots(out / names["snapshot_file"], rec)
        except OSError as exc:
            raise _IOFailure(f"cannot write outputs: {exc}") from None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except induction.InstabilityError as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    r = summary["growth_rates"]
    e = summary["expected_rates"]
    print(f"simulated {len(rec)} samples to t = {cfg.t_end:g}")
    for k in ("p", "q", "z"):
        got = "undefined" if r[k] is None else f"{r[k]:+.6f}"
        print(f"  rate_{k}: {got}   expected {e[k]:+.6f}")
    return EXIT_OK


def curvature_document(rc) -> dict:
    m = rc.metric()
    cmp = curvature.compare_report(m, alpha=rc.alpha(), z=rc.curvature_z())
    rep = cmp.cartan
    return {
        "lambda1": m.lambda1,
        "lambda2": m.lambda2,
        "mu1": m.mu1,
        "mu2": m.mu2,
        "connection": rep.connection_at(rc.curvature_z()),
        "riemann_frame": rep.riemann,
        "sectional": rep.sectional,
        "scalar": rep.scalar,
        "paper_reference": cmp.reference,
        "computed_counterparts": cmp.computed_counterparts,
        "max_path_deviation": cmp.max_path_deviation,
        "torsion_residual": rep.torsion_residual,
    }


def run_curvature(config_path, output_path, seed=None) -> int:
    try:
        rc = _load(config_path)
        doc = curvature_document(rc)
        doc["seed"] = seed
        out = Path(output_path)
        try:
            if out.parent:
                out.parent.mkdir(parents=True, exist_ok=True)
            outputs.write_json(out, doc)
        except OSError as exc:
            raise _IOFailure(f"cannot write {out}: {exc}") from None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    s = doc["sectional"]
    print(f"K_pz = {s['K_pz']:+.6g}  K_qz = {s['K_qz']:+.6g}  K_pq = {s['K_pq']:+.6g}  "
          f"scalar = {doc['scalar']:+.6g}  path deviation = {doc['max_path_deviation']:.2e}")
    return EXIT_OK


def run_check(config_path, seed=None) -> int:
    try:
        rc = _load(config_path)
        m = rc.metric()
        grid = rc.grid()
        order = rc.fd_order()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = checks.run_checks(m, grid, order)
    print(f"metric lambda1 = {m.lambda1:.12g}, lambda2 = {m.lambda2:.12g}"
          f"{' (Arnold)' if m.is_arnold else ''}; z stencil order {order}")
    print(report.format_table())
    if report.passed:
        print("all checks passed")
        return EXIT_OK
    print("FAILED: " + ", ".join(f"{r.name} ({r.status})" for r in report.failures))
    return EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="recorded in outputs; no stochastic component currently uses it")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="integrate the induction equation")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="output directory")

    c = sub.add_parser("curvature", parents=[common], help="write the curvature report")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True, help="output JSON file")

    k = sub.add_parser("check", parents=[common], help="operator convergence and frame identities")
    k.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "simulate":
        return run_simulate(args.config, args.out, args.seed)
    if args.command == "curvature":
        return run_curvature(args.config, args.out, args.seed)
    return run_check(args.config, args.seed)


if __name__ == "__main__":
    sys.exit(main())
