import math

import numpy as np
import pytest

from qrmix import (
    CharacterError,
    build_group,
    character_degrees,
    class_constants,
    conjugacy_classes,
    group_exponent,
    quasirandom_degree,
)

import oracles


# ---------------------------------------------------------------------------
# class algebra structure constants


@pytest.mark.parametrize("desc", ["symmetric:3", "symmetric:4", "dihedral:4", "sl2:5"])
def test_class_constants_match_brute_force(desc):
    G = build_group(desc)
    got = class_constants(G).a
    assert np.array_equal(got, oracles.brute_force_class_constants(G))


def test_class_constants_counting_identity():
    # summing a[i, j, l] over j counts every x in C_i once (y = x^-1 z)
    for desc in ["symmetric:4", "sl2:5", "dihedral:6"]:
        G = build_group(desc)
        C = conjugacy_classes(G)
        a = class_constants(G).a
        sums = a.sum(axis=1)    # [i, l]
        expect = np.tile(np.array(C.class_sizes)[:, None], (1, C.k))
        assert np.array_equal(sums, expect)


# ---------------------------------------------------------------------------
# degree multisets


@pytest.mark.parametrize("desc", ["symmetric:3", "symmetric:4", "dihedral:4",
                                  "psl2:5", "sl2:5",
                                  "product:cyclic:2,symmetric:3"])
def test_degrees_match_eigen_multiplicity_oracle(desc):
    G = build_group(desc)
    assert tuple(sorted(character_degrees(G).degrees)) == \
        oracles.degrees_by_eigen_multiplicity(G)


def test_degree_invariants_across_suite():
    for desc in ["cyclic:12", "dihedral:6", "symmetric:5", "sl2:7", "psl2:7"]:
        G = build_group(desc)
        deg = character_degrees(G).degrees
        assert sum(d * d for d in deg) == G.order
        assert len(deg) == conjugacy_classes(G).k
        assert deg[0] == 1
        assert all(G.order % d == 0 for d in deg)   # degree divides order
        assert list(deg) == sorted(deg)


def test_abelian_degrees_all_one():
    for desc in ["cyclic:8", "product:cyclic:2,cyclic:9"]:
        G = build_group(desc)
        assert set(character_degrees(G).degrees) == {1}
        assert quasirandom_degree(G) == 1


def test_product_degrees_are_pairwise_products():
    A = build_group("symmetric:3")
    B = build_group("dihedral:4")
    P = build_group("product:symmetric:3,dihedral:4")
    expect = sorted(da * db for da in character_degrees(A).degrees
                    for db in character_degrees(B).degrees)
    assert sorted(character_degrees(P).degrees) == expect


def test_quasirandom_degree_values():
    # D = smallest nontrivial degree; cross-checked against the independent
    # eigen-multiplicity oracle rather than quoted values
    for desc in ["symmetric:4", "psl2:5", "sl2:5", "sl2:7"]:
        G = build_group(desc)
        oracle = oracles.degrees_by_eigen_multiplicity(G)
        nontrivial = [d for d in oracle[1:]]
        assert quasirandom_degree(G) == min(nontrivial)


def test_sl2_quasirandom_degree_formula():
    # smallest nontrivial degree of SL(2,p) is (p-1)/2 for p >= 5
    for p in [5, 7, 13]:
        assert quasirandom_degree(build_group("sl2:%d" % p)) == (p - 1) // 2


def test_trivial_group_degree_is_infinite():
    assert quasirandom_degree(build_group("cyclic:1")) == math.inf


def test_perfect_group_iff_degree_at_least_two():
    # a nontrivial linear character exists iff the abelianization is nontrivial
    assert quasirandom_degree(build_group("symmetric:4")) == 1    # sign character
    assert quasirandom_degree(build_group("dihedral:5")) == 1
    assert quasirandom_degree(build_group("sl2:5")) >= 2          # perfect
    assert quasirandom_degree(build_group("psl2:7")) >= 2         # simple


# ---------------------------------------------------------------------------
# exponent and determinism


def test_group_exponent_matches_element_order_lcm():
    for desc in ["symmetric:4", "dihedral:6", "sl2:5", "cyclic:12"]:
        G = build_group(desc)
        assert group_exponent(G) == oracles.exponent_by_element_orders(G)


def test_degrees_deterministic_across_instances():
    a = character_degrees(build_group("sl2:7")).degrees
    b = character_degrees(build_group("sl2:7")).degrees
    assert a == b


def test_degrees_cached_on_group():
    G = build_group("symmetric:4")
    assert character_degrees(G) is character_degrees(G)
