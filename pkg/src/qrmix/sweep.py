"""Experiment orchestration: config ingestion, family sweeps, CSV/JSON output.

Every output byte is a deterministic function of (config, master seed):
trial seeds are derived by a keyed 64-bit hash and rows are emitted in
canonical (group, experiment, action, trial) order.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

from .actions import ProbabilitySpace, random_observable
from .characters import character_degrees, quasirandom_degree
from .groups import GroupConstructionError, build_group, conjugacy_classes, parse_descriptor
from .mixing import mixing_bound_check
from .recurrence import VDC_EXACT_MAX, correlation_family, triple_recurrence_error, vdc_check
from .seeding import derive_seed

EXPERIMENTS = ("degrees", "mixing", "recurrence", "vdc")
ACTION_KINDS = ("left", "right", "conjugation")

RESULT_COLUMNS = [
    "group", "order", "experiment", "action", "trial", "seed", "D", "epsilon",
    "bound", "measured", "ci",
    "bound_case_i", "measured_case_i", "bound_case_ii", "measured_case_ii", "pass",
]

PLOT_COLUMNS = ["group", "order", "D", "bound", "measured_max", "measured_mean"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    groups: list
    experiments: list
    trials: int = 10
    master_seed: int = 0
    actions: list = field(default_factory=lambda: list(ACTION_KINDS))
    exact_max_order: int = 3000
    mc_samples: int = 2000
    out_dir: str = "."

    _KEYS = ("groups", "experiments", "trials", "master_seed", "actions",
             "exact_max_order", "mc_samples", "out_dir")

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.exact_max_order < 1:
            raise ConfigError("exact_max_order must be >= 1")
        for e in self.experiments:
            if e not in EXPERIMENTS:
                raise ConfigError("unknown experiment %r" % e)
        for a in self.actions:
            if a not in ACTION_KINDS:
                raise ConfigError("unknown action kind %r" % a)
        for g in self.groups:
            parse_descriptor(g)  # raises on bad descriptors

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls._KEYS)
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        if "groups" not in data or "experiments" not in data:
            raise ConfigError("config needs 'groups' and 'experiments'")
        try:
            return cls(**data)
        except GroupConstructionError as exc:
            raise ConfigError(str(exc))

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config is not valid JSON: %s" % exc)
        return cls.from_dict(data)


def _fmt(x):
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return "%.17g" % x
    return str(x)


def _row(**kw):
    row = {c: "" for c in RESULT_COLUMNS}
    for k, v in kw.items():
        row[k] = _fmt(v)
    return row


def _d_value(G):
    d = quasirandom_degree(G)
    return float(d) if d == math.inf else d


def _sweep_group(cfg, desc):
    """Rows and per-group summary for one descriptor."""
    rows = []
    summary = {}
    try:
        G = build_group(desc)
    except GroupConstructionError as exc:
        return rows, {"error": str(exc)}
    summary["order"] = G.order
    summary["error"] = None
    summary["experiments"] = {}
    D = None
    space = ProbabilitySpace.uniform(G.order)
    for exp in cfg.experiments:
        stats = {"trials": 0, "pass_count": 0, "fail_count": 0,
                 "max_measured": None, "bound": None, "max_ratio": None}

        def tally(bound, measured, passed):
            stats["trials"] += 1
            stats["pass_count" if passed else "fail_count"] += 1
            if measured is not None:
                if stats["max_measured"] is None or measured > stats["max_measured"]:
                    stats["max_measured"] = measured
                if bound and (stats["max_ratio"] is None or measured / bound > stats["max_ratio"]):
                    stats["max_ratio"] = measured / bound
            if bound is not None and (stats["bound"] is None or bound > stats["bound"]):
                stats["bound"] = bound

        if exp == "degrees":
            deg = character_degrees(G)
            D = _d_value(G)
            ok = (sum(d * d for d in deg.degrees) == G.order
                  and len(deg.degrees) == conjugacy_classes(G).k)
            rows.append(_row(group=desc, order=G.order, experiment=exp, trial=0,
                             seed=derive_seed(cfg.master_seed, desc, exp, 0),
                             D=D, **{"pass": ok}))
            tally(None, None, ok)
            summary["degrees"] = list(deg.degrees)
        elif exp == "mixing":
            D = _d_value(G) if D is None else D
            for kind in cfg.actions:
                reports = mixing_bound_check(
                    G, kind, cfg.trials, cfg.master_seed,
                    mc_samples=cfg.mc_samples, exact_max_order=cfg.exact_max_order)
                for rep in reports:
                    rows.append(_row(group=desc, order=G.order, experiment=exp,
                                     action=kind, trial=rep.trial,
                                     seed=derive_seed(cfg.master_seed, desc, exp, kind, rep.trial),
                                     D=rep.D, epsilon=1.0 / math.sqrt(rep.D),
                                     bound=rep.bound, measured=rep.measured,
                                     ci=rep.ci_halfwidth, **{"pass": rep.passed}))
                    tally(rep.bound, rep.measured, rep.passed)
        elif exp == "recurrence":
            D = _d_value(G) if D is None else D
            exact = G.order <= cfg.exact_max_order
            for t in range(cfg.trials):
                seed = derive_seed(cfg.master_seed, desc, exp, t)
                fs = [random_observable(space, derive_seed(seed, n)) for n in ("f1", "f2", "f3")]
                rep = triple_recurrence_error(
                    G, *fs, mode="exact" if exact else "monte_carlo",
                    samples=None if exact else cfg.mc_samples,
                    seed=None if exact else derive_seed(seed, "g"))
                rows.append(_row(group=desc, order=G.order, experiment=exp, trial=t,
                                 seed=seed, D=rep.D, epsilon=rep.epsilon,
                                 bound=rep.bound_total, measured=rep.measured_total,
                                 bound_case_i=rep.bound_case_i, measured_case_i=rep.measured_case_i,
                                 bound_case_ii=rep.bound_case_ii, measured_case_ii=rep.measured_case_ii,
                                 **{"pass": rep.passed}))
                tally(rep.bound_total, rep.measured_total, rep.passed)
        elif exp == "vdc":
            for t in range(cfg.trials):
                seed = derive_seed(cfg.master_seed, desc, exp, t)
                f2 = random_observable(space, derive_seed(seed, "f2"))
                f3 = random_observable(space, derive_seed(seed, "f3"))
                f = random_observable(space, derive_seed(seed, "f"))
                fam = correlation_family(G, f2, f3)
                exact = G.order <= VDC_EXACT_MAX
                res = vdc_check(fam, f,
                                samples=None if exact else cfg.mc_samples,
                                seed=None if exact else derive_seed(seed, "gh"))
                rows.append(_row(group=desc, order=G.order, experiment=exp, trial=t,
                                 seed=seed, epsilon=res.epsilon_lhs,
                                 bound=res.bound, measured=res.rhs_integral,
                                 **{"pass": res.passed}))
                tally(res.bound, res.rhs_integral, res.passed)
        summary["experiments"][exp] = stats
    summary["D"] = D if D is not None else _d_value(G)
    return rows, summary


def run_sweep(cfg):
    """Execute the configured sweep; returns (rows, summary) and writes
    results.csv / summary.json under cfg.out_dir."""
    all_rows = []
    groups_summary = {}
    for desc in cfg.groups:
        rows, summary = _sweep_group(cfg, desc)
        all_rows.extend(rows)
        groups_summary[desc] = summary
    all_pass = all(r["pass"] != "false" for r in all_rows) and \
        all(s.get("error") is None for s in groups_summary.values())
    summary = {
        "master_seed": cfg.master_seed,
        "all_pass": all_pass,
        "groups": groups_summary,
    }
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_results(os.path.join(cfg.out_dir, "results.csv"), all_rows)
    write_summary(os.path.join(cfg.out_dir, "summary.json"), summary)
    return all_rows, summary


def write_results(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_summary(path, summary):
    def default(x):
        if isinstance(x, float) and math.isinf(x):
            return "inf"
        raise TypeError(x)
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def emit_plot_data(results_path, out_path=None):
    """Aggregate a results.csv into per-group (bound, measured) plot rows."""
    if not os.path.exists(results_path):
        raise FileNotFoundError(results_path)
    with open(results_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames != RESULT_COLUMNS:
            raise ValueError("unexpected results schema in %s" % results_path)
        per_group = {}
        for row in reader:
            if row["measured"] == "":
                continue
            key = row["group"]
            entry = per_group.setdefault(key, {
                "order": int(row["order"]),
                "D": float(row["D"]) if row["D"] not in ("", "inf") else math.inf,
                "bound": 0.0, "measured": []})
            if row["bound"]:
                entry["bound"] = max(entry["bound"], float(row["bound"]))
            entry["measured"].append(float(row["measured"]))
    out_rows = []
    for group in sorted(per_group, key=lambda g: (per_group[g]["D"], g)):
        e = per_group[group]
        out_rows.append({
            "group": group, "order": str(e["order"]), "D": _fmt(e["D"]),
            "bound": _fmt(e["bound"]),
            "measured_max": _fmt(max(e["measured"])),
            "measured_mean": _fmt(sum(e["measured"]) / len(e["measured"])),
        })
    if out_path:
        with open(out_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=PLOT_COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(out_rows)
    return out_rows
