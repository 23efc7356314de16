"""heightlab command line."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..betti import PeriodFrame, betti_map, degeneracy_rank, keyhole_loop, monodromy
from ..canonical import canonical_height_k, canonical_height_q
from ..family import WeierstrassFamily, specialize, specialize_complex
from ..heights import ProjectivePointK, base_height, weil_height_k, weil_height_q
from ..arithmetic import Polynomial
from ..lattice import BettiGrid, count_lattice_points, linear_map, torsion_specialization_count, zero_map
from .config import ExperimentConfig, SamplingRule, default_config
from .experiments import degree_growth, run_all, silverman_limit, verify_inequality
from .reports import write_report
from .experiments import experiment_hash

COUNT_COLUMNS = ["N", "N0", "count", "volume_estimate", "c_lower", "c_upper", "wall_time_ms"]


def _complex(text: str) -> complex:
    parts = [float(p) for p in text.split(",")]
    return complex(parts[0], parts[1] if len(parts) > 1 else 0.0)


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",")]


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else default_config()
    if args.seed is not None:
        cfg.seed = args.seed
        if cfg.lambda_samples.rule == "random":
            cfg.lambda_samples = replace(cfg.lambda_samples, seed=args.seed)
    return cfg


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=str))


def _write_counts(rows: list[dict], out) -> None:
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        fh = open(path / "counts.csv", "w", encoding="utf-8", newline="")
    else:
        fh = sys.stdout
    w = csv.DictWriter(fh, COUNT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    if fh is not sys.stdout:
        fh.close()


def _count_rows(reports_and_times) -> list[dict]:
    rows, lo, hi = [], float("inf"), 0.0
    for rep, ms in reports_and_times:
        d = rep.count / rep.N**2
        lo, hi = min(lo, d), max(hi, d)
        rows.append({
            "N": rep.N, "N0": rep.N0, "count": rep.count, "volume_estimate": rep.volume_estimate,
            "c_lower": lo, "c_upper": hi, "wall_time_ms": ms,
        })
    return rows


# -- subcommands ---------------------------------------------------------------


def cmd_heights(args, cfg) -> int:
    out = {}
    if args.point:
        out["weil_height_q"] = weil_height_q([Fraction(v) for v in args.point.split(",")])
    if args.poly_point:
        coords = [Polynomial([Fraction(str(c)) for c in p]) for p in json.loads(args.poly_point)]
        out["weil_height_k"] = weil_height_k(ProjectivePointK(coords))
    if args.lam is not None:
        out["base_height"] = base_height(Fraction(args.lam), cfg.family)
    if not out:
        raise SystemExit("heights: give --point, --poly-point or --lambda")
    _emit(out)
    return 0


def cmd_canonical(args, cfg) -> int:
    P = cfg.sections[args.section]
    if args.lam is None:
        R = canonical_height_k(P)
        _emit({"function_field_height": str(R.value), "exact": R.exact, "degrees": R.degrees})
    else:
        R = canonical_height_q(specialize(P, Fraction(args.lam)), args.tol)
        _emit({"lambda": args.lam, "canonical_height": R.value, "tail_bound": R.tail_bound, "iterations": R.iterations})
    return 0


def _local_frame(family, lam: complex) -> PeriodFrame:
    return PeriodFrame(family, lam, 0.5 * family.distance_to_singular(lam), anchor=lam)


def cmd_betti(args, cfg) -> int:
    P = cfg.sections[args.section]
    lam = _complex(args.lam)
    b = betti_map(specialize_complex(P, lam), _local_frame(P.family, lam))
    _emit({"lambda": [lam.real, lam.imag], "betti": list(b.coords), "error": b.error})
    return 0


def cmd_monodromy(args, cfg) -> int:
    family = WeierstrassFamily.legendre() if args.legendre else cfg.family
    M = monodromy(family, keyhole_loop(_complex(args.base), _complex(args.around), args.radius, args.steps))
    _emit({"entries": M.entries, "residual": M.residual, "det": M.det, "trace": M.trace})
    return 0


def cmd_degeneracy(args, cfg) -> int:
    P = cfg.sections[args.section]
    lam = _complex(args.lam)
    _emit({"lambda": [lam.real, lam.imag], "rank": degeneracy_rank(P, lam, _local_frame(P.family, lam))})
    return 0


def cmd_count_torsion(args, cfg) -> int:
    P = cfg.sections[args.section]
    cx, cy, r = _floats(args.disc)
    frame = PeriodFrame(P.family, complex(cx, cy), r, anchor=complex(cx, cy))
    grid = BettiGrid(P, frame, frame.center, frame.radius * (1 - 1e-9), args.grid)
    results = []
    for N in _ints(args.N):
        t = time.perf_counter()
        rep = torsion_specialization_count(P, frame, N, grid=grid, tol=args.tol)
        results.append((rep, round(1000 * (time.perf_counter() - t))))
    _write_counts(_count_rows(results), args.out)
    return 0


def cmd_lattice_count(args, cfg) -> int:
    A = np.array(_floats(args.matrix)).reshape(2, 2)
    box = [(0.0, 1.0), (0.0, 1.0)]
    phi1, phi2 = linear_map(A, box), zero_map(2, box)
    results = []
    for N in _ints(args.N):
        t = time.perf_counter()
        rep = count_lattice_points(phi1, phi2, box, N, args.N0, grid=args.grid, tol=args.tol)
        results.append((rep, round(1000 * (time.perf_counter() - t))))
    _write_counts(_count_rows(results), args.out)
    return 0


def _experiment(args, cfg, kind: str, build) -> int:
    spec = next((e for e in cfg.experiments if e.get("kind") == kind), {"kind": kind})
    report = build(spec)
    out = args.out or cfg.cache_dir
    jpath, _ = write_report(report, out, experiment_hash(cfg, spec))
    _emit({"kind": kind, "headline_constant": report.headline_constant, "summary": report.summary, "report": str(jpath)})
    return 0


def cmd_verify_inequality(args, cfg) -> int:
    return _experiment(args, cfg, "inequality", lambda spec: verify_inequality(cfg, threads=args.threads, spec=spec))


def cmd_degree_growth(args, cfg) -> int:
    def build(spec):
        N_list = _ints(args.N) if args.N else spec.get("N_list", list(range(7)))
        return degree_growth(cfg, cfg.sections[spec.get("section", 0)], N_list, spec.get("h_floor", 0.1), args.threads, spec)

    return _experiment(args, cfg, "degree_growth", build)


def cmd_silverman_limit(args, cfg) -> int:
    def build(spec):
        seq_spec = spec.get("lambda_sequence", {"rule": "powers", "base": 2, "exponents": list(range(26, 146, 5))})
        seq = SamplingRule.from_json(seq_spec).generate()
        return silverman_limit(cfg, cfg.sections[spec.get("section", 0)], seq, args.threads, spec)

    return _experiment(args, cfg, "silverman_limit", build)


def cmd_run_all(args, cfg) -> int:
    reports = run_all(cfg, args.out, args.threads)
    for r in reports:
        _emit({"kind": r.kind, "headline_constant": r.headline_constant, "hash": r.provenance.get("experiment_hash")})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heightlab", description="Heights and Betti maps on elliptic families.")
    p.add_argument("--config", help="experiment config (JSON)")
    p.add_argument("--out", help="output directory (default: the config's cache_dir, or stdout for counts)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("heights", help="Weil heights over Q and Q(l), base heights")
    s.add_argument("--point", help="comma-separated rationals")
    s.add_argument("--poly-point", help="JSON list of coefficient lists")
    s.add_argument("--lambda", dest="lam")
    s.set_defaults(func=cmd_heights)

    s = sub.add_parser("canonical", help="hhat of P(l), or hhat_K without --lambda")
    s.add_argument("--section", type=int, default=0)
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_canonical)

    s = sub.add_parser("betti", help="Betti coordinates of P(l) for complex l")
    s.add_argument("--section", type=int, default=0)
    s.add_argument("--lambda", dest="lam", required=True, help="re,im")
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("monodromy", help="monodromy matrix of a keyhole loop")
    s.add_argument("--legendre", action="store_true", help="use the Legendre family")
    s.add_argument("--around", default="0", help="re,im of the encircled singular value")
    s.add_argument("--base", default="0.5,-1", help="re,im of the basepoint")
    s.add_argument("--radius", type=float, default=0.3)
    s.add_argument("--steps", type=int, default=64)
    s.set_defaults(func=cmd_monodromy)

    s = sub.add_parser("degeneracy", help="rank of the Betti Jacobian of a section")
    s.add_argument("--section", type=int, default=0)
    s.add_argument("--lambda", dest="lam", required=True, help="re,im")
    s.set_defaults(func=cmd_degeneracy)

    for name, func in (("count-torsion", cmd_count_torsion), ("lattice-count", cmd_lattice_count)):
        s = sub.add_parser(name)
        s.add_argument("--N", default="20,30,40,60", help="comma-separated list")
        s.add_argument("--N0", type=int, default=1)
        s.add_argument("--grid", type=int, default=None if name == "lattice-count" else 64)
        s.add_argument("--tol", type=float, default=1e-9)
        if name == "count-torsion":
            s.add_argument("--disc", default="0.5,0,0.45", help="cx,cy,r")
            s.add_argument("--section", type=int, default=0)
        else:
            s.add_argument("--matrix", default="1,0,0,1", help="a,b,c,d of phi1 on the unit square")
        s.set_defaults(func=func)

    s = sub.add_parser("verify-inequality")
    s.set_defaults(func=cmd_verify_inequality)
    s = sub.add_parser("degree-growth")
    s.add_argument("--N", help="comma-separated N list")
    s.set_defaults(func=cmd_degree_growth)
    s = sub.add_parser("silverman-limit")
    s.set_defaults(func=cmd_silverman_limit)
    s = sub.add_parser("run-all")
    s.set_defaults(func=cmd_run_all)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    cfg = _load_config(args)
    return args.func(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
