"""Command-line front end.

One subcommand per pipeline; a flat key = value config file supplies
defaults and every key can be overridden by a flag.  Each run writes
its artifacts plus a manifest.json (config echo, version, timings) into
the output directory.  Exit codes: 0 success, 1 pipeline failure,
2 invalid configuration.
"""

import io
import csv
import json
import sys
import time
import argparse
from pathlib import Path

import numpy as np

import rovella
from rovella.family import FamilyParams, verify_axioms
from rovella.orbit import critical_orbit
from rovella.combinatorics import derive_constants
from rovella.induction import run_induction
from rovella.search import (period2, find_super_attractor, find_preperiodic,
                            preperiodic_from_escape, super_sequence, hits_csv)
from rovella.measures import empirical_measure, instability_table
from rovella.flow import FlowParams, SectionPoint, flow_average

FLOAT_FMT = ".17g"

FAMILY_KEYS = ("s", "a_max")
BUNDLE_KEYS = ("Delta", "alpha", "beta", "lambda0")


def _read_config(path):
    cfg = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"malformed config line: {line!r}")
        cfg[key.strip()] = val.strip()
    return cfg


def _fnum(cfg, args, key, default):
    if getattr(args, key, None) is not None:
        return getattr(args, key)
    if key in cfg:
        return float(cfg[key])
    return default


def _inum(cfg, args, key, default):
    if getattr(args, key, None) is not None:
        return getattr(args, key)
    if key in cfg:
        return int(cfg[key])
    return default


def _family(cfg, args):
    return FamilyParams(s=_fnum(cfg, args, "s", 1.5),
                        a_max=_fnum(cfg, args, "a_max", 0.4))


def _bundle(cfg, args, **extra):
    return derive_constants(s=_fnum(cfg, args, "s", 1.5),
                            Delta=_inum(cfg, args, "Delta", 3),
                            alpha=_fnum(cfg, args, "alpha", 0.03),
                            beta=_fnum(cfg, args, "beta", 0.05),
                            lambda0=_fnum(cfg, args, "lambda0", 1.5),
                            **extra)


def _write_manifest(outdir, command, config_echo, timings):
    manifest = {
        "command": command,
        "version": rovella.__version__,
        "config": config_echo,
        "timings_s": timings,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                     default=str) + "\n")


def _pipe(fn, *args, **kwargs):
    """Run a pipeline step; its failures are exit-1, not config errors."""
    try:
        return fn(*args, **kwargs)
    except ValueError as err:
        raise RuntimeError(str(err)) from err


def _jsonable(x):
    if isinstance(x, float):
        return format(x, FLOAT_FMT)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.floating):
        return format(float(x), FLOAT_FMT)
    return x


# ---------------------------------------------------------------------------
# subcommand bodies (each returns the config echo for the manifest)


def cmd_axioms(args, cfg, outdir):
    params = _family(cfg, args)
    report = verify_axioms(params, n_x=_inum(cfg, args, "grid", 10_000),
                           n_a=_inum(cfg, args, "na", 20))
    payload = {"passed": report.passed,
               "margin": _jsonable(report.margin),
               "all_passed": report.all_passed}
    (outdir / "axioms.json").write_text(json.dumps(payload, indent=2) + "\n")
    if not report.all_passed:
        raise RuntimeError("axiom verification failed")
    return {"s": params.s, "a_max": params.a_max}


def cmd_orbit(args, cfg, outdir):
    params = _family(cfg, args)
    a = _fnum(cfg, args, "a", 0.0)
    n = _inum(cfg, args, "n", 50)
    side = _inum(cfg, args, "side", 1)
    orb = critical_orbit(a, n, side=side, params=params)
    (outdir / "orbit.csv").write_text(orb.to_csv())
    return {"a": a, "n": n, "side": side}


def cmd_constants(args, cfg, outdir):
    bundle = _bundle(cfg, args)
    payload = _jsonable(bundle.to_dict())
    text = json.dumps(payload, indent=2) + "\n"
    (outdir / "constants.json").write_text(text)
    sys.stdout.write(text)
    return {k: getattr(bundle, k) for k in BUNDLE_KEYS + ("s",)}


def cmd_induct(args, cfg, outdir):
    params = _family(cfg, args)
    bundle = _bundle(cfg, args)
    n_max = _inum(cfg, args, "nmax", 30)
    run = _pipe(run_induction, n_max, bundle, params=params)
    run.to_dir(outdir)
    if run.survivor_measure() <= 0:
        raise RuntimeError("no surviving parameter measure")
    return {"nmax": n_max, "survivor_measure": run.survivor_measure(),
            "clean": run.clean}


def cmd_super_search(args, cfg, outdir):
    params = _family(cfg, args)
    k = _inum(cfg, args, "k", 3)
    lo = _fnum(cfg, args, "lo", 0.0)
    hi = _fnum(cfg, args, "hi", params.a_max)
    hit = _pipe(find_super_attractor, lo, hi, k, params=params)
    (outdir / "hits.csv").write_text(hits_csv([hit]))
    return {"k": k, "lo": lo, "hi": hi, "a": hit.a}


def cmd_period2(args, cfg, outdir):
    params = _family(cfg, args)
    a = _fnum(cfg, args, "a", 0.0)
    orb = _pipe(period2, a, params)
    payload = _jsonable({"a": a, "y_minus": orb.y_minus,
                         "y_plus": orb.y_plus,
                         "multiplier": orb.multiplier})
    text = json.dumps(payload, indent=2) + "\n"
    (outdir / "period2.json").write_text(text)
    sys.stdout.write(text)
    return {"a": a}


def cmd_prep_search(args, cfg, outdir):
    params = _family(cfg, args)
    k = _inum(cfg, args, "k", 6)
    lo = _fnum(cfg, args, "lo", 0.0)
    hi = _fnum(cfg, args, "hi", 0.28)
    hit = _pipe(find_preperiodic, lo, hi, k, params=params)
    payload = _jsonable({"a": hit.a, "k": hit.k, "residual": hit.residual,
                         "y_minus": hit.y_minus, "y_plus": hit.y_plus,
                         "alternation_steps": hit.alternation_steps})
    (outdir / "prep.json").write_text(json.dumps(payload, indent=2) + "\n")
    return {"k": k, "lo": lo, "hi": hi, "a": hit.a}


def cmd_measure(args, cfg, outdir):
    params = _family(cfg, args)
    a = _fnum(cfg, args, "a", 0.0)
    n = _inum(cfg, args, "n", 1_000_000)
    bins = _inum(cfg, args, "bins", 2000)
    x0 = _fnum(cfg, args, "x0", -1.0)
    mu = _pipe(empirical_measure, a, x0=x0, params=params, bins=bins, n=n)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lo", "hi", "mass"])
    for i in range(len(mu.weights)):
        if mu.weights[i]:
            w.writerow([format(mu.edges[i], FLOAT_FMT),
                        format(mu.edges[i + 1], FLOAT_FMT),
                        format(mu.weights[i], FLOAT_FMT)])
    for pos, mass in mu.atoms:
        w.writerow([format(pos, FLOAT_FMT), format(pos, FLOAT_FMT),
                    format(mass, FLOAT_FMT)])
    (outdir / "measure.csv").write_text(buf.getvalue())
    return {"a": a, "n": n, "bins": bins, "x0": x0,
            "atoms": len(mu.atoms)}


def escape_component(run):
    """Earliest escape component of an induction run.

    Survivors of the probe run are fragments of the original escape
    component; the component is recovered as the hull of all final
    intervals whose first escape happened at the earliest escape time.
    """
    theta = None
    frags = []
    for itv in run.intervals:
        esc = [r for r in itv.returns if r.escape]
        if not esc:
            continue
        t = esc[0].gamma
        if theta is None or t < theta:
            theta = t
            frags = [itv]
        elif t == theta:
            frags.append(itv)
    if theta is None:
        raise RuntimeError("no escape component in the probe run")
    return (min(f.lo for f in frags), max(f.hi for f in frags)), theta


def cmd_instability(args, cfg, outdir):
    params = _family(cfg, args)
    bundle = _bundle(cfg, args)
    depth = _inum(cfg, args, "depth", 4)
    probe = _inum(cfg, args, "nprobe", 10)
    run = _pipe(run_induction, probe, bundle, params=params)
    (lo_hi, theta) = escape_component(run)
    pre = _pipe(preperiodic_from_escape, lo_hi, theta, params=params)
    hits = _pipe(super_sequence, pre, depth, params=params)
    if len(hits) < depth:
        raise RuntimeError("sequence terminated before requested depth")
    rows, table = instability_table(hits, params=params)
    (outdir / "hits.csv").write_text(hits_csv([pre] + hits))
    (outdir / "instability.csv").write_text(table)
    return {"depth": depth, "a_pre": pre.a, "k_pre": pre.k,
            "deepest_k": hits[-1].k}


def cmd_flow_average(args, cfg, outdir):
    params = _family(cfg, args)
    flow = FlowParams(lambda1=_fnum(cfg, args, "lambda1", 1.0),
                      lambda2=_fnum(cfg, args, "lambda2", -5.0),
                      lambda3=_fnum(cfg, args, "lambda3", -1.5),
                      tau0=_fnum(cfg, args, "tau0", 1.0))
    a = _fnum(cfg, args, "a", 0.0)
    T = _fnum(cfg, args, "T", 1e4)
    x0 = _fnum(cfg, args, "x0", -1.0)
    y0 = _fnum(cfg, args, "y0", 0.0)
    obs = getattr(args, "observable", None) or \
        cfg.get("observable", "dist_to_origin_capped")
    result = _pipe(flow_average, a, SectionPoint(x0, y0), observable=obs,
                   T=T, params=params, flow=flow)
    (outdir / "flow.csv").write_text(result.to_csv())
    payload = _jsonable({"average": result.average, "dwell": result.dwell,
                         "T": T, "terminal": result.terminal,
                         "visits": result.visits})
    (outdir / "flow.json").write_text(json.dumps(payload, indent=2) + "\n")
    return {"a": a, "T": T, "x0": x0, "y0": y0, "observable": obs}


COMMANDS = {
    "axioms": cmd_axioms,
    "orbit": cmd_orbit,
    "constants": cmd_constants,
    "induct": cmd_induct,
    "super-search": cmd_super_search,
    "period2": cmd_period2,
    "prep-search": cmd_prep_search,
    "measure": cmd_measure,
    "instability": cmd_instability,
    "flow-average": cmd_flow_average,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rovella",
        description="contracting Lorenz map family: parameter exclusion, "
                    "super-attractor search, statistical instability, "
                    "suspension-flow averages")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for sampled grids")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap (pipelines here are sequential)")
    for key in ("s", "a_max", "a", "alpha", "beta", "lambda0", "lo", "hi",
                "T", "x0", "y0", "lambda1", "lambda2", "lambda3", "tau0"):
        common.add_argument(f"--{key}", type=float)
    for key in ("Delta", "grid", "na", "n", "side", "nmax", "k", "bins",
                "depth", "nprobe"):
        common.add_argument(f"--{key}", type=int)
    common.add_argument("--observable")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _read_config(args.config) if args.config else {}
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    outdir = Path(args.out or f"runs/{args.command}")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    np.random.seed(args.seed)
    start = time.perf_counter()
    try:
        echo = COMMANDS[args.command](args, cfg, outdir)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except RuntimeError as err:
        print(f"pipeline failure: {err}", file=sys.stderr)
        return 1
    timings = {"total": round(time.perf_counter() - start, 3)}
    _write_manifest(outdir, args.command, _jsonable(echo), timings)
    return 0


if __name__ == "__main__":
    sys.exit(main())
