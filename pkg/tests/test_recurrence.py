import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrmix import (
    Observable,
    PreconditionError,
    ProbabilitySpace,
    VectorFamily,
    bessel_check,
    build_group,
    cached_action,
    case_decomposition,
    conjugacy_classes,
    correlation_family,
    gram_identity_check,
    invariant_projection,
    mixing_error,
    random_observable,
    triple_product_average,
    triple_recurrence_error,
    vdc_check,
)


def _real(space, seed):
    f = random_observable(space, seed)
    return Observable(space, f.values.real)


def _triple(space, seed):
    return tuple(random_observable(space, seed + i) for i in range(3))


# ---------------------------------------------------------------------------
# triple product average


def test_triple_product_constant_ones():
    G = build_group("symmetric:4")
    space = ProbabilitySpace.uniform(G.order)
    ones = Observable(space, np.ones(G.order))
    for g in [0, 3, 17]:
        assert triple_product_average(G, ones, ones, ones, g) == pytest.approx(1.0)


def test_triple_product_at_identity():
    G = build_group("dihedral:4")
    space = ProbabilitySpace.uniform(G.order)
    f1, f2, f3 = _triple(space, 60)
    got = triple_product_average(G, f1, f2, f3, G.identity)
    assert got == pytest.approx(np.mean(f1.values * f2.values * f3.values))


def test_triple_product_abelian_conjugation_trivial():
    G = build_group("cyclic:12")
    space = ProbabilitySpace.uniform(12)
    f1, f2, f3 = _triple(space, 61)
    for g in [1, 5, 11]:
        lrow = (np.arange(12) - g) % 12
        expect = np.mean(f1.values * f2.values[lrow] * f3.values)
        assert triple_product_average(G, f1, f2, f3, g) == pytest.approx(complex(expect))


# ---------------------------------------------------------------------------
# recurrence error and case decomposition


def test_all_ones_gives_zero_error():
    G = build_group("symmetric:4")
    space = ProbabilitySpace.uniform(G.order)
    ones = Observable(space, np.ones(G.order))
    rep = triple_recurrence_error(G, ones, ones, ones)
    assert rep.measured_total < 1e-14 and rep.passed


def test_linf_precondition_names_offender():
    G = build_group("symmetric:3")
    space = ProbabilitySpace.uniform(6)
    ok = random_observable(space, 62)
    big = Observable(space, 3.0 * np.ones(6))
    with pytest.raises(PreconditionError, match="f2"):
        triple_recurrence_error(G, ok, big, ok)


def test_triangle_decomposition_random():
    G = build_group("symmetric:4")
    space = ProbabilitySpace.uniform(G.order)
    for seed in (63, 66, 69):
        f1, f2, f3 = _triple(space, seed)
        rep = triple_recurrence_error(G, f1, f2, f3)
        assert rep.measured_total <= rep.measured_case_i + rep.measured_case_ii + 1e-9
        assert rep.decomposition_ok


def test_class_function_f3_reduces_to_mixing_error():
    # with P_c f3 = f3 (real inputs) the total error is the mixing error of
    # the left translation applied to f1*f3 and f2
    G = build_group("symmetric:4")
    space = ProbabilitySpace.uniform(G.order)
    C = conjugacy_classes(G)
    rng = np.random.default_rng(70)
    f3 = Observable(space, rng.uniform(-1, 1, C.k)[C.class_of])
    f1 = _real(space, 71)
    f2 = _real(space, 72)
    rep = triple_recurrence_error(G, f1, f2, f3)
    mix = mixing_error(cached_action(G, "left"), f1 * f3, f2)
    assert abs(rep.measured_total - mix) <= 1e-10
    assert rep.measured_case_ii < 1e-14         # f3 - P_c f3 = 0


def test_zero_projection_f3_kills_case_i():
    # f3 supported on one nontrivial class with values summing to zero
    G = build_group("symmetric:4")
    space = ProbabilitySpace.uniform(G.order)
    C = conjugacy_classes(G)
    members = np.nonzero(C.class_of == C.k - 1)[0]
    vals = np.zeros(G.order)
    vals[members[0]], vals[members[1]] = 1.0, -1.0
    f3 = Observable(space, vals)
    f1, f2 = _real(space, 73), _real(space, 74)
    case_i, case_ii = case_decomposition(G, f1, f2, f3)
    assert case_i < 1e-14


def test_case_decomposition_norm_facts_enforced():
    G = build_group("sl2:5")
    space = ProbabilitySpace.uniform(G.order)
    f1, f2, f3 = _triple(space, 75)
    case_i, case_ii = case_decomposition(G, f1, f2, f3)
    eps = quasirandom_eps(G)
    assert case_i <= eps + 1e-9
    assert case_ii <= math.sqrt(5 * eps) + 1e-9


def quasirandom_eps(G):
    from qrmix import quasirandom_degree
    return 1.0 / math.sqrt(quasirandom_degree(G))


def test_monte_carlo_recurrence_deterministic():
    G = build_group("sl2:5")
    space = ProbabilitySpace.uniform(G.order)
    f1, f2, f3 = _triple(space, 76)
    a = triple_recurrence_error(G, f1, f2, f3, mode="monte_carlo", samples=64, seed=2)
    b = triple_recurrence_error(G, f1, f2, f3, mode="monte_carlo", samples=64, seed=2)
    assert a.measured_total == b.measured_total


# ---------------------------------------------------------------------------
# correlation family and Gram identity


def test_correlation_family_constant_inputs():
    G = build_group("symmetric:3")
    space = ProbabilitySpace.uniform(6)
    ones = Observable(space, np.ones(6))
    fam = correlation_family(G, ones, ones)
    assert np.array_equal(fam.vectors, np.ones((6, 6)))


def test_correlation_family_linf_bound():
    G = build_group("dihedral:4")
    space = ProbabilitySpace.uniform(8)
    f2 = random_observable(space, 80)
    f3 = random_observable(space, 81)
    fam = correlation_family(G, f2, f3)
    assert np.max(np.abs(fam.vectors)) <= f2.norm_inf * f3.norm_inf + 1e-15
    assert fam.l2_bound == f2.norm_inf * f3.norm_inf


def test_correlation_family_abelian_form():
    G = build_group("cyclic:10")
    space = ProbabilitySpace.uniform(10)
    f2 = random_observable(space, 82)
    f3 = random_observable(space, 83)
    fam = correlation_family(G, f2, f3)
    for g in range(10):
        lrow = (np.arange(10) - g) % 10
        assert np.allclose(fam.vectors[g], f2.values[lrow] * f3.values)


def test_gram_identity_trivial_cases():
    G = build_group("symmetric:3")
    space = ProbabilitySpace.uniform(6)
    ones = Observable(space, np.ones(6))
    chk = gram_identity_check(G, ones, ones, 2, 4)
    assert abs(chk.lhs - 1.0) < 1e-12 and abs(chk.rhs - 1.0) < 1e-12


@pytest.mark.parametrize("desc", ["symmetric:3", "dihedral:5", "psl2:5"])
def test_gram_identity_exhaustive_real(desc):
    G = build_group(desc)
    space = ProbabilitySpace.uniform(G.order)
    f2 = _real(space, 84)
    f3 = _real(space, 85)
    worst = 0.0
    for g in range(G.order):
        for h in range(G.order):
            worst = max(worst, gram_identity_check(G, f2, f3, g, h).discrepancy)
    assert worst <= 1e-10


def test_gram_identity_h_identity_specialization():
    G = build_group("symmetric:3")
    space = ProbabilitySpace.uniform(6)
    f2 = _real(space, 86)
    f3 = _real(space, 87)
    fam = correlation_family(G, f2, f3)
    for g in range(6):
        chk = gram_identity_check(G, f2, f3, g, G.identity)
        e_g = fam.vectors[g]
        assert abs(chk.lhs - np.mean(e_g * e_g)) < 1e-12


# ---------------------------------------------------------------------------
# quantitative van der Corput


def _delta_family(G):
    n = G.order
    return VectorFamily(group=G, space=ProbabilitySpace.uniform(n),
                        vectors=math.sqrt(n) * np.eye(n, dtype=np.complex128),
                        l2_bound=1.0)


@pytest.mark.parametrize("desc", ["cyclic:5", "symmetric:4", "dihedral:6", "psl2:5"])
def test_vdc_delta_family_closed_form(desc):
    G = build_group(desc)
    n = G.order
    fam = _delta_family(G)
    f = Observable(fam.space, np.ones(n))
    res = vdc_check(fam, f)
    # <e_g, e_gh> = [h = identity], so epsilon = 1/|G| up to rounding of sqrt(n)
    assert abs(res.epsilon_lhs - 1.0 / n) <= 1e-13 / n
    assert abs(res.rhs_integral - res.bound) <= 1e-10   # tight with f = 1
    assert res.passed


def test_vdc_constant_family_cauchy_schwarz_equality():
    G = build_group("cyclic:8")
    space = ProbabilitySpace.uniform(8)
    e = random_observable(space, 90)
    fam = VectorFamily(group=G, space=space,
                       vectors=np.tile(e.values, (8, 1)), l2_bound=e.norm2)
    res = vdc_check(fam, e)      # f parallel to e: equality case
    assert abs(res.epsilon_lhs - e.norm2 ** 2) < 1e-12
    assert abs(res.rhs_integral - res.bound) < 1e-12


def test_vdc_correlation_families_pass():
    for desc in ("symmetric:4", "sl2:5"):
        G = build_group(desc)
        space = ProbabilitySpace.uniform(G.order)
        for seed in range(95, 115):
            f2 = random_observable(space, seed)
            f3 = random_observable(space, seed + 1000)
            f = random_observable(space, seed + 2000)
            assert vdc_check(correlation_family(G, f2, f3), f).passed


def test_vdc_zero_projection_engine_case():
    # the theorem's engine: f3 with P_c f3 = 0 on a perfect group
    G = build_group("sl2:5")
    space = ProbabilitySpace.uniform(G.order)
    f3 = random_observable(space, 91)
    pc = invariant_projection(cached_action(G, "conjugation"), f3)
    f3 = f3 - pc
    f2 = random_observable(space, 92)
    f = random_observable(space, 93)
    res = vdc_check(correlation_family(G, f2, f3), f)
    assert res.passed


def test_vdc_sampled_mode_deterministic():
    G = build_group("sl2:7")      # order 336 forces nothing; use samples anyway
    space = ProbabilitySpace.uniform(G.order)
    fam = correlation_family(G, random_observable(space, 94),
                             random_observable(space, 95))
    f = random_observable(space, 96)
    a = vdc_check(fam, f, samples=100, seed=4)
    b = vdc_check(fam, f, samples=100, seed=4)
    assert a.epsilon_lhs == b.epsilon_lhs and a.mode == "exact"


# ---------------------------------------------------------------------------
# Bessel


def test_bessel_parseval_equality():
    n = 8
    G = build_group("cyclic:%d" % n)
    space = ProbabilitySpace.uniform(n)
    basis = [Observable(space, np.exp(2j * np.pi * k * np.arange(n) / n))
             for k in range(n)]
    f = random_observable(space, 97)
    res = bessel_check(basis, f)
    assert abs(res.sum_of_squares - res.norm_sq) < 1e-12
    assert res.passed


def test_bessel_empty_family():
    space = ProbabilitySpace.uniform(5)
    f = random_observable(space, 98)
    res = bessel_check([], f)
    assert res.sum_of_squares == 0.0 and res.passed


def test_bessel_orthogonalized_random_family():
    space = ProbabilitySpace.uniform(20)
    raw = [random_observable(space, 200 + i) for i in range(6)]
    ortho = []
    from qrmix import inner
    for v in raw:
        w = Observable(space, v.values.copy())
        for u in ortho:
            coef = inner(space, w, u) / (u.norm2 ** 2)
            w = Observable(space, w.values - coef * u.values)
        ortho.append(w)
    f = random_observable(space, 300)
    assert bessel_check(ortho, f).passed


def test_bessel_rejects_non_orthogonal():
    space = ProbabilitySpace.uniform(6)
    f = random_observable(space, 99)
    fam = [random_observable(space, 101), random_observable(space, 102)]
    with pytest.raises(PreconditionError, match="e_0, e_1"):
        bessel_check(fam, f)


# ---------------------------------------------------------------------------
# the pure inequality chain


def test_bound_chain_on_grid():
    eps = np.linspace(0.0, 1.0, 10_000)
    lhs = eps + np.sqrt(5.0 * eps)
    rhs = 4.0 * np.sqrt(eps)
    assert np.all(lhs <= rhs + 1e-12)


@settings(max_examples=500, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_bound_chain_hypothesis(eps):
    assert eps + math.sqrt(5.0 * eps) <= 4.0 * math.sqrt(eps) + 1e-12
