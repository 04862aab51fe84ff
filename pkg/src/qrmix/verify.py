"""One-shot verification battery for the quasirandomness inequalities.

Runs the numbered criteria (character degrees, mixing bound, sharpness,
triple recurrence, case decomposition, van der Corput, ergodic projection,
reduction and Gram identities, estimator consistency), prints one line per
criterion, and writes verify_results.csv / verify_summary.json.  Fully
deterministic given (profile, master seed).

`inflate_d` is a debug fault injector: it adds an offset to D wherever a
bound is formed here, so that e.g. cyclic groups (D = 1, with equality
cases) demonstrably fail the inflated bound.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from .actions import (
    Observable,
    ProbabilitySpace,
    cached_action,
    inner,
    invariant_projection,
    koopman_apply,
    random_observable,
)
from .characters import character_degrees, quasirandom_degree
from .groups import build_group, conjugacy_classes
from .mixing import (
    mixing_bound_check,
    mixing_error,
    monte_carlo_mixing_error,
    reduction_identity_check,
)
from .recurrence import (
    VectorFamily,
    correlation_family,
    gram_identity_check,
    triple_recurrence_error,
    vdc_check,
)
from .seeding import derive_seed

PASS_TOL = 1e-9
IDENTITY_TOL = 1e-10
CLOSED_FORM_RTOL = 1e-13

SUITE = ["symmetric:3", "symmetric:4", "sl2:5", "sl2:7", "sl2:13", "psl2:5", "psl2:7"]

PROFILES = {
    "full": {
        "degrees_groups": SUITE,
        "mixing_groups": SUITE,
        "mixing_trials": 200,
        "sharpness_ns": [5, 8, 12],
        "recurrence_exact": ["sl2:5", "sl2:7", "sl2:13"],
        "recurrence_sampled": ["sl2:37"],
        "recurrence_samples": 2000,
        "recurrence_trials": 20,
        "vdc_delta_groups": ["cyclic:5", "cyclic:8", "cyclic:12", "symmetric:3",
                             "symmetric:4", "psl2:5", "sl2:5", "psl2:7", "sl2:7"],
        "vdc_corr_groups": ["symmetric:4", "sl2:5"],
        "vdc_corr_trials": 100,
        "projection_groups": ["symmetric:3", "symmetric:4", "psl2:5", "sl2:5",
                              "psl2:7", "sl2:7"],
        "projection_trials": 50,
        "reduction_groups": ["symmetric:3", "psl2:5"],
        "gram_groups": ["symmetric:3", "psl2:5"],
        "estimator_groups": ["cyclic:64", "symmetric:5"],
        "estimator_seeds": 100,
        "estimator_samples": 200,
    },
    "quick": {
        "degrees_groups": ["symmetric:3", "symmetric:4", "psl2:5"],
        "mixing_groups": ["symmetric:3", "symmetric:4", "psl2:5"],
        "mixing_trials": 5,
        "sharpness_ns": [5, 8, 12],
        "recurrence_exact": ["sl2:5"],
        "recurrence_sampled": [],
        "recurrence_samples": 500,
        "recurrence_trials": 5,
        "vdc_delta_groups": ["cyclic:8", "symmetric:3", "symmetric:4"],
        "vdc_corr_groups": ["symmetric:4"],
        "vdc_corr_trials": 5,
        "projection_groups": ["symmetric:3", "symmetric:4"],
        "projection_trials": 5,
        "reduction_groups": ["symmetric:3"],
        "gram_groups": ["symmetric:3"],
        "estimator_groups": ["cyclic:64"],
        "estimator_seeds": 20,
        "estimator_samples": 200,
    },
}

CSV_COLUMNS = ["criterion", "name", "group", "action", "trial", "bound", "measured", "pass"]


def degrees_by_float_diagonalization(G, seed=0):
    """Character degrees via eigenvalue multiplicities of a generic central
    element in the regular representation.

    z = sum_i t_i (sum of class i) acts on C[G] by right multiplication;
    on each isotypic component (dimension d^2) it acts as a scalar, so the
    eigenvalue multiplicities of the |G| x |G| matrix are the d^2 values.
    Independent of the modular character machinery.
    """
    n = G.order
    C = conjugacy_classes(G)
    rng = np.random.default_rng(seed)
    t = rng.uniform(1.0, 2.0, C.k) + 1j * rng.uniform(1.0, 2.0, C.k)
    xs = np.arange(n, dtype=np.int64)
    M = np.zeros((n, n), dtype=np.complex128)
    for g in range(n):
        M[xs, G.vec_mul(xs, g)] += t[C.class_of[g]]
    eig = np.linalg.eigvals(M)
    order = np.lexsort((eig.imag, eig.real))
    eig = eig[order]
    mults = []
    i = 0
    while i < n:
        j = i
        while j < n and abs(eig[j] - eig[i]) < 1e-6:
            j += 1
        mults.append(j - i)
        i = j
    degrees = []
    for m in mults:
        d = math.isqrt(m)
        if d * d != m:
            raise ArithmeticError("eigenvalue multiplicity %d is not a perfect square" % m)
        degrees.append(d)
    return tuple(sorted(degrees))


def _row(criterion, name, group="", action="", trial="", bound=None, measured=None, ok=True):
    def fmt(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return "inf" if math.isinf(x) else "%.17g" % x
        return str(x)
    return {"criterion": str(criterion), "name": name, "group": group, "action": action,
            "trial": str(trial), "bound": fmt(bound), "measured": fmt(measured),
            "pass": "true" if ok else "false"}


def _crit_degrees(p, master, inflate):
    rows, ok = [], True
    for desc in p["degrees_groups"]:
        G = build_group(desc)
        deg = character_degrees(G)
        D = quasirandom_degree(G)
        good = (sum(d * d for d in deg.degrees) == G.order
                and len(deg.degrees) == conjugacy_classes(G).k
                and deg.degrees[0] == 1
                and (D == math.inf or D == min(d for d in deg.degrees[1:])))
        rows.append(_row(1, "degree_invariants", desc, measured=float(min(
            deg.degrees[1:], default=1)), ok=good))
        ok &= good
    G = build_group("psl2:5")
    oracle = degrees_by_float_diagonalization(G, seed=derive_seed(master, "oracle"))
    dixon = tuple(sorted(character_degrees(G).degrees))
    good = oracle == dixon and min(d for d in oracle if d > 1) == 3
    rows.append(_row(1, "psl2:5_oracle_crosscheck", "psl2:5", measured=float(oracle[1]), ok=good))
    return rows, ok and good


def _crit_mixing(p, master, inflate):
    rows, ok = [], True
    for desc in p["mixing_groups"]:
        G = build_group(desc)
        D = quasirandom_degree(G)
        scale = math.sqrt(D / (D + inflate)) if inflate else 1.0
        group_ok = True
        for kind in ("right", "left", "conjugation"):
            for rep in mixing_bound_check(G, kind, p["mixing_trials"], master):
                bound = rep.bound * scale
                good = rep.measured <= bound + PASS_TOL
                if not good:
                    rows.append(_row(2, "mixing_bound", desc, kind, rep.trial,
                                     bound, rep.measured, ok=False))
                group_ok &= good
        rows.append(_row(2, "mixing_bound", desc, measured=float(D), ok=group_ok))
        ok &= group_ok
    return rows, ok


def _crit_sharpness(p, master, inflate):
    rows, ok = [], True
    for n in p["sharpness_ns"]:
        G = build_group("cyclic:%d" % n)
        space = ProbabilitySpace.uniform(n)
        chi = Observable(space, np.exp(2j * np.pi * np.arange(n) / n))
        a = cached_action(G, "left")
        measured = mixing_error(a, chi, chi)
        bound = (1.0 + inflate) ** -0.5 * chi.norm2 ** 2
        good = abs(measured - 1.0) <= IDENTITY_TOL and measured <= bound + PASS_TOL
        rows.append(_row(3, "sharpness_witness", G.desc, "left",
                         bound=bound, measured=measured, ok=good))
        ok &= good
    return rows, ok


def _recurrence_reports(p, master):
    reports = []
    for desc in p["recurrence_exact"] + p["recurrence_sampled"]:
        G = build_group(desc)
        exact = desc in p["recurrence_exact"]
        space = ProbabilitySpace.uniform(G.order)
        for t in range(p["recurrence_trials"]):
            seed = derive_seed(master, "recurrence", desc, t)
            fs = [random_observable(space, derive_seed(seed, nm)) for nm in ("f1", "f2", "f3")]
            reports.append(triple_recurrence_error(
                G, *fs, mode="exact" if exact else "monte_carlo",
                samples=None if exact else p["recurrence_samples"],
                seed=None if exact else derive_seed(seed, "g")))
    return reports


def _crit_recurrence(reports, inflate):
    rows, ok = [], True
    for t, rep in enumerate(reports):
        bound = 4.0 * (rep.D + inflate) ** -0.25
        good = rep.measured_total <= bound + PASS_TOL
        rows.append(_row(4, "triple_recurrence", rep.group, rep.mode, t,
                         bound, rep.measured_total, ok=good))
        ok &= good
    return rows, ok


def _crit_cases(reports, inflate):
    rows, ok = [], True
    for t, rep in enumerate(reports):
        eps = (rep.D + inflate) ** -0.5
        good = (rep.measured_case_i <= eps + PASS_TOL
                and rep.measured_case_ii <= math.sqrt(5.0 * eps) + PASS_TOL
                and rep.measured_total <= rep.measured_case_i + rep.measured_case_ii + PASS_TOL)
        rows.append(_row(5, "case_decomposition", rep.group, rep.mode, t,
                         eps + math.sqrt(5.0 * eps), rep.measured_case_i + rep.measured_case_ii,
                         ok=good))
        ok &= good
    return rows, ok


def _delta_family(G):
    n = G.order
    return VectorFamily(group=G, space=ProbabilitySpace.uniform(n),
                        vectors=math.sqrt(n) * np.eye(n, dtype=np.complex128),
                        l2_bound=1.0)


def _crit_vdc(p, master, inflate):
    rows, ok = [], True
    for desc in p["vdc_delta_groups"]:
        G = build_group(desc)
        n = G.order
        fam = _delta_family(G)
        f1 = Observable(fam.space, np.ones(n))
        res = vdc_check(fam, f1)
        good = (abs(res.epsilon_lhs - 1.0 / n) <= CLOSED_FORM_RTOL / n
                and abs(res.rhs_integral - res.bound) <= IDENTITY_TOL)
        rows.append(_row(6, "vdc_delta_closed_form", desc, bound=res.bound,
                         measured=res.rhs_integral, ok=good))
        ok &= good
    for desc in p["vdc_corr_groups"]:
        G = build_group(desc)
        space = ProbabilitySpace.uniform(G.order)
        group_ok = True
        for t in range(p["vdc_corr_trials"]):
            seed = derive_seed(master, "vdc", desc, t)
            f2 = random_observable(space, derive_seed(seed, "f2"))
            f3 = random_observable(space, derive_seed(seed, "f3"))
            f = random_observable(space, derive_seed(seed, "f"))
            res = vdc_check(correlation_family(G, f2, f3), f)
            if not res.passed:
                rows.append(_row(6, "vdc_correlation", desc, trial=t,
                                 bound=res.bound, measured=res.rhs_integral, ok=False))
            group_ok &= res.passed
        rows.append(_row(6, "vdc_correlation", desc, ok=group_ok))
        ok &= group_ok
    return rows, ok


def _crit_projection(p, master, inflate):
    rows, ok = [], True
    for desc in p["projection_groups"]:
        G = build_group(desc)
        space = ProbabilitySpace.uniform(G.order)
        worst = 0.0
        for kind in ("left", "right", "conjugation"):
            a = cached_action(G, kind)
            for t in range(p["projection_trials"]):
                seed = derive_seed(master, "projection", desc, kind, t)
                f = random_observable(space, derive_seed(seed, "f"))
                h = random_observable(space, derive_seed(seed, "h"))
                pf = invariant_projection(a, f)
                ph = invariant_projection(a, h)
                dev = float(np.max(np.abs(invariant_projection(a, pf).values - pf.values)))
                dev = max(dev, abs(inner(space, pf, h) - inner(space, f, ph)))
                for g in range(G.order):
                    dev = max(dev, float(np.max(np.abs(
                        koopman_apply(a, g, pf).values - pf.values))))
                if kind in ("left", "right"):
                    mean = inner(space, f, Observable(space, np.ones(G.order)))
                    dev = max(dev, float(np.max(np.abs(pf.values - mean))))
                worst = max(worst, dev)
        good = worst <= IDENTITY_TOL
        rows.append(_row(7, "ergodic_projection", desc, measured=worst, ok=good))
        ok &= good
    return rows, ok


def _crit_reduction(p, master, inflate):
    rows, ok = [], True
    for desc in p["reduction_groups"]:
        G = build_group(desc)
        space = ProbabilitySpace.uniform(G.order)
        worst = 0.0
        for kind in ("conjugation", "left"):
            a = cached_action(G, kind)
            for t in range(3):
                seed = derive_seed(master, "reduction", desc, kind, t)
                f1 = random_observable(space, derive_seed(seed, "f1"))
                f2 = random_observable(space, derive_seed(seed, "f2"))
                for g in range(G.order):
                    worst = max(worst, reduction_identity_check(a, f1, f2, g)[2])
        good = worst <= IDENTITY_TOL
        rows.append(_row(8, "reduction_identity", desc, measured=worst, ok=good))
        ok &= good
    return rows, ok


def _crit_gram(p, master, inflate):
    rows, ok = [], True
    for desc in p["gram_groups"]:
        G = build_group(desc)
        space = ProbabilitySpace.uniform(G.order)
        seed = derive_seed(master, "gram", desc)
        f2 = Observable(space, random_observable(space, derive_seed(seed, "f2")).values.real)
        f3 = Observable(space, random_observable(space, derive_seed(seed, "f3")).values.real)
        worst = 0.0
        for g in range(G.order):
            for h in range(G.order):
                worst = max(worst, gram_identity_check(G, f2, f3, g, h).discrepancy)
        good = worst <= IDENTITY_TOL
        rows.append(_row(9, "gram_identity", desc, measured=worst, ok=good))
        ok &= good
    return rows, ok


def _crit_estimator(p, master, inflate):
    rows, ok = [], True
    for desc in p["estimator_groups"]:
        G = build_group(desc)
        a = cached_action(G, "left")
        f1 = random_observable(a.space, derive_seed(master, "estimator", desc, "f1"))
        f2 = random_observable(a.space, derive_seed(master, "estimator", desc, "f2"))
        exact = mixing_error(a, f1, f2)
        hits = 0
        for s in range(p["estimator_seeds"]):
            est, ci = monte_carlo_mixing_error(
                a, f1, f2, p["estimator_samples"], derive_seed(master, "estimator", desc, s))
            if abs(est - exact) <= 3.0 * ci:
                hits += 1
        good = hits >= math.ceil(0.95 * p["estimator_seeds"])
        rows.append(_row(10, "estimator_consistency", desc, measured=float(hits),
                         bound=float(p["estimator_seeds"]), ok=good))
        ok &= good
    return rows, ok


CRITERIA = [
    (1, "character degrees and quasirandomness", _crit_degrees),
    (2, "mixing bound D^(-1/2)", _crit_mixing),
    (3, "sharpness witness on cyclic groups", _crit_sharpness),
    (4, "triple recurrence bound 4 D^(-1/4)", None),   # shares reports with 5
    (5, "case decomposition bounds", None),
    (6, "quantitative van der Corput", _crit_vdc),
    (7, "mean ergodic projection", _crit_projection),
    (8, "reduction identity", _crit_reduction),
    (9, "Gram identity", _crit_gram),
    (10, "estimator consistency", _crit_estimator),
]


def run_verify(out_dir, master_seed=0, profile="full", inflate_d=0, echo=print):
    """Run the verification battery; returns process exit status (0/1)."""
    if profile not in PROFILES:
        raise ValueError("profile must be one of %s" % ", ".join(PROFILES))
    p = PROFILES[profile]
    all_rows = []
    summary = {"master_seed": master_seed, "profile": profile,
               "inflate_d": inflate_d, "criteria": {}}
    rec_reports = _recurrence_reports(p, master_seed)
    status = 0
    for num, name, func in CRITERIA:
        if num == 4:
            rows, ok = _crit_recurrence(rec_reports, inflate_d)
        elif num == 5:
            rows, ok = _crit_cases(rec_reports, inflate_d)
        else:
            rows, ok = func(p, master_seed, inflate_d)
        all_rows.extend(rows)
        summary["criteria"][str(num)] = {"name": name, "pass": bool(ok)}
        echo("%s  criterion %2d: %s" % ("PASS" if ok else "FAIL", num, name))
        if not ok:
            status = 1
    summary["all_pass"] = status == 0
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "verify_results.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(all_rows)
    with open(os.path.join(out_dir, "verify_summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return status
