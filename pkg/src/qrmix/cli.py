"""Command-line front end.

Subcommands: degrees, mixing, recurrence, vdc, sweep, plotdata, verify.
Exit status: 0 all pass, 1 any bound violation, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from .actions import ProbabilitySpace, random_observable
from .characters import CharacterError, character_degrees, quasirandom_degree
from .groups import GroupConstructionError, build_group, conjugacy_classes
from .mixing import EXACT_MAX_ORDER, mixing_bound_check
from .recurrence import VDC_EXACT_MAX, correlation_family, triple_recurrence_error, vdc_check
from .seeding import derive_seed
from .sweep import ConfigError, ExperimentConfig, emit_plot_data, run_sweep
from .verify import PROFILES, run_verify

MIXING_COLUMNS = ["group", "order", "action", "D", "trial", "bound", "measured", "ci", "pass"]
RECURRENCE_COLUMNS = ["group", "order", "D", "epsilon",
                      "bound_case_i", "measured_case_i",
                      "bound_case_ii", "measured_case_ii",
                      "bound_total", "measured_total", "pass"]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "inf" if math.isinf(x) else "%.17g" % x
    return str(x)


def _emit_csv(columns, rows, out_path):
    """Write rows to stdout, and to out_path when given."""
    def write(fh):
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    write(sys.stdout)
    if out_path:
        with open(out_path, "w", newline="") as fh:
            write(fh)


def _d_json(d):
    return "inf" if d == math.inf else d


def cmd_degrees(args):
    G = build_group(args.group)
    deg = character_degrees(G)
    out = {
        "group": G.desc,
        "order": G.order,
        "classes": conjugacy_classes(G).k,
        "degrees": list(deg.degrees),
        "D": _d_json(quasirandom_degree(G)),
    }
    print(json.dumps(out))
    return 0


def cmd_mixing(args):
    G = build_group(args.group)
    reports = mixing_bound_check(G, args.action, args.trials, args.seed,
                                 mc_samples=args.mc, exact_max_order=EXACT_MAX_ORDER)
    rows = [{
        "group": r.group, "order": str(G.order), "action": r.action,
        "D": _fmt(float(r.D) if r.D != math.inf else math.inf),
        "trial": str(r.trial), "bound": _fmt(r.bound), "measured": _fmt(r.measured),
        "ci": _fmt(r.ci_halfwidth), "pass": _fmt(r.passed),
    } for r in reports]
    _emit_csv(MIXING_COLUMNS, rows, args.out and os.path.join(args.out, "mixing.csv"))
    return 0 if all(r.passed for r in reports) else 1


def cmd_recurrence(args):
    G = build_group(args.group)
    space = ProbabilitySpace.uniform(G.order)
    exact = G.order <= EXACT_MAX_ORDER
    rows, ok = [], True
    for t in range(args.trials):
        seed = derive_seed(args.seed, G.desc, "recurrence", t)
        fs = [random_observable(space, derive_seed(seed, n)) for n in ("f1", "f2", "f3")]
        r = triple_recurrence_error(
            G, *fs, mode="exact" if exact else "monte_carlo",
            samples=None if exact else args.mc,
            seed=None if exact else derive_seed(seed, "g"))
        rows.append({
            "group": r.group, "order": str(G.order), "D": _fmt(float(r.D)),
            "epsilon": _fmt(r.epsilon),
            "bound_case_i": _fmt(r.bound_case_i), "measured_case_i": _fmt(r.measured_case_i),
            "bound_case_ii": _fmt(r.bound_case_ii), "measured_case_ii": _fmt(r.measured_case_ii),
            "bound_total": _fmt(r.bound_total), "measured_total": _fmt(r.measured_total),
            "pass": _fmt(r.passed),
        })
        ok &= r.passed
    _emit_csv(RECURRENCE_COLUMNS, rows, args.out and os.path.join(args.out, "recurrence.csv"))
    return 0 if ok else 1


def cmd_vdc(args):
    G = build_group(args.group)
    space = ProbabilitySpace.uniform(G.order)
    exact = G.order <= VDC_EXACT_MAX
    rows, ok = [], True
    for t in range(args.trials):
        seed = derive_seed(args.seed, G.desc, "vdc", t)
        f2 = random_observable(space, derive_seed(seed, "f2"))
        f3 = random_observable(space, derive_seed(seed, "f3"))
        f = random_observable(space, derive_seed(seed, "f"))
        res = vdc_check(correlation_family(G, f2, f3), f,
                        samples=None if exact else args.mc,
                        seed=None if exact else derive_seed(seed, "gh"))
        rows.append({
            "group": G.desc, "order": str(G.order), "D": "",
            "epsilon": _fmt(res.epsilon_lhs),
            "bound_case_i": "", "measured_case_i": "",
            "bound_case_ii": "", "measured_case_ii": "",
            "bound_total": _fmt(res.bound), "measured_total": _fmt(res.rhs_integral),
            "pass": _fmt(res.passed),
        })
        ok &= res.passed
    _emit_csv(RECURRENCE_COLUMNS, rows, args.out and os.path.join(args.out, "vdc.csv"))
    return 0 if ok else 1


def cmd_sweep(args):
    cfg = ExperimentConfig.from_file(args.config)
    if args.out:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.master_seed = args.seed
    _, summary = run_sweep(cfg)
    print(json.dumps({"all_pass": summary["all_pass"],
                      "out_dir": cfg.out_dir}))
    return 0 if summary["all_pass"] else 1


def cmd_plotdata(args):
    out_path = os.path.join(args.out, "plot.csv") if args.out else None
    rows = emit_plot_data(args.results, out_path)
    writer = csv.DictWriter(sys.stdout, fieldnames=["group", "order", "D", "bound",
                                                    "measured_max", "measured_mean"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return 0


def cmd_verify(args):
    return run_verify(args.out or ".", master_seed=args.seed or 0,
                      profile=args.profile, inflate_d=args.inflate_d)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qrmix",
        description="Quasirandomness degrees, mixing bounds, and recurrence "
                    "inequalities on concrete finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group=True):
        if group:
            p.add_argument("--group", "-g", required=True, help="family descriptor, "
                           "e.g. cyclic:8, symmetric:4, sl2:13, product:cyclic:2,sl2:5")
        p.add_argument("--seed", type=int, default=0, help="master seed (u64)")
        p.add_argument("--trials", type=int, default=10)
        p.add_argument("--mc", type=int, default=2000, help="Monte Carlo samples")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("degrees", help="character degree multiset and D as JSON")
    p.add_argument("--group", "-g", required=True)
    p.add_argument("--json", action="store_true", help="JSON output (always on)")
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("mixing", help="check the D^(-1/2) mixing bound")
    common(p)
    p.add_argument("--action", default="left", choices=["left", "right", "conjugation"])
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("recurrence", help="check the triple recurrence bounds")
    common(p)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("vdc", help="check the quantitative van der Corput bound")
    common(p)
    p.set_defaults(func=cmd_vdc)

    p = sub.add_parser("sweep", help="run a configured experiment sweep")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--out", help="override out_dir")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plotdata", help="aggregate a results.csv into plot rows")
    p.add_argument("--results", required=True, help="path to results.csv")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("verify", help="run the verification battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory", default=".")
    p.add_argument("--profile", default="full", choices=sorted(PROFILES))
    p.add_argument("--inflate-d", type=int, default=0,
                   help="debug: add an offset to D in every bound")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GroupConstructionError, ConfigError, CharacterError,
            FileNotFoundError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
