"""Combinations, morphisms, tensor products and homology of effective
complexes."""

import random

import pytest

from spectra.chains import (
    ChainComplex,
    Combination,
    Generator,
    Morphism,
    apply_morphism,
    cmbn_add,
    homology,
    identity_morphism,
    tensor_complex,
    tensor_generator,
)
from spectra.effective import homology_via_effective, EffectiveHomology, Equivalence, identity_reduction
from spectra.errors import LocallyEffectiveError
from spectra.simplicial import chains_of, circle_complex, k_z_1, k_z2_1, sphere


def gen(degree, key):
    return Generator(degree, key)


X, Y, Z = gen(1, "x"), gen(1, "y"), gen(1, "z")


def cmb(degree, *terms):
    return Combination.build(degree, terms)


# -- combination algebra ------------------------------------------------------


def test_cmbn_add_cancellation():
    assert cmbn_add(cmb(1, (2, X)), cmb(1, (-2, X))).is_zero()


def test_cmbn_add_merge():
    got = cmbn_add(cmb(1, (1, X)), cmb(1, (1, Y)))
    assert got == cmb(1, (1, X), (1, Y))


def test_cmbn_add_partial_cancellation():
    got = cmbn_add(cmb(1, (3, X), (1, Y)), cmb(1, (-1, Y), (2, Z)))
    assert got == cmb(1, (3, X), (2, Z))


def test_cmbn_add_degree_mismatch():
    with pytest.raises(ValueError):
        cmbn_add(cmb(1, (1, X)), Combination.zero(2))


def test_cmbn_terms_sorted_and_nonzero():
    c = cmb(1, (1, Z), (1, X), (-1, Z))
    assert [g.key for _, g in c.terms] == ["x"]


# -- morphism application -----------------------------------------------------


def two_gen_complex():
    a, b = gen(1, "a"), gen(0, "b")

    def basis(n):
        return {0: [b], 1: [a]}.get(n, [])

    def diff(g):
        return Combination.zero(g.degree - 1)

    return ChainComplex(basis, diff, origin="two-gen"), a, b


def test_apply_morphism_empty_and_identity():
    c, a, _ = two_gen_complex()
    m = identity_morphism(c)
    assert apply_morphism(m, Combination.zero(1)).is_zero()
    assert apply_morphism(m, Combination.single(a, 3)) == cmb(1, (3, a))


def test_apply_morphism_linearity_random():
    rng = random.Random(0)
    circle = circle_complex()
    s1 = circle.basis(1)[0]
    dbl = Morphism(circle, circle, 0, lambda g: Combination.single(g, 2))
    for _ in range(20):
        k1, k2 = rng.randint(-5, 5), rng.randint(-5, 5)
        a, b = Combination.single(s1, k1), Combination.single(s1, k2)
        assert apply_morphism(dbl, a.add(b)) == apply_morphism(dbl, a).add(
            apply_morphism(dbl, b)
        )


def test_apply_morphism_foreign_generator():
    c, a, _ = two_gen_complex()
    m = identity_morphism(c)
    with pytest.raises(ValueError):
        apply_morphism(m, Combination.single(gen(1, "zz")))


def test_circle_differential_is_null_combination():
    circle = chains_of(sphere(1))
    (s1,) = circle.basis(1)
    d = circle.d(Combination.single(s1))
    assert d.degree == 0 and d.is_zero()


# -- tensor products ----------------------------------------------------------


def test_tensor_basis_sizes_s2_circle():
    t = tensor_complex(chains_of(sphere(2)), circle_complex())
    # product of basis counts {1,0,1} x {1,1}
    assert [len(t.basis(n)) for n in range(4)] == [1, 1, 1, 1]


def test_tensor_untwisted_differential_vanishes():
    t = tensor_complex(chains_of(sphere(2)), circle_complex())
    (g,) = t.basis(3)
    assert t.d(g).is_zero()


def test_tensor_d_squared_zero():
    t = tensor_complex(chains_of(k_z2_1()), circle_complex())
    for n in range(1, 6):
        for g in t.basis(n):
            assert t.d(t.d(g)).is_zero()


def test_tensor_koszul_sign():
    a = chains_of(k_z2_1())
    b = chains_of(k_z2_1())
    t = tensor_complex(a, b)
    for n in range(1, 5):
        for g in t.basis(n):
            from spectra.chains import split_tensor_generator

            ga, gb = split_tensor_generator(g)
            expect = Combination.zero(n - 1)
            for c, x in a.d(ga).terms:
                expect = expect.add(Combination.single(tensor_generator(x, gb), c))
            sign = -1 if ga.degree % 2 else 1
            for c, y in b.d(gb).terms:
                expect = expect.add(Combination.single(tensor_generator(ga, y), sign * c))
            assert t.d(g) == expect


# -- homology -----------------------------------------------------------------


def test_homology_circle():
    circle = chains_of(sphere(1))
    assert homology(circle, 0).components() == ["Z"]
    assert homology(circle, 1).components() == ["Z"]
    assert homology(circle, 2).components() == []


def test_homology_sphere2():
    c = chains_of(sphere(2))
    assert [homology(c, n).components() for n in range(3)] == [["Z"], [], ["Z"]]


def test_homology_locally_effective_raises():
    with pytest.raises(LocallyEffectiveError):
        homology(chains_of(k_z_1()), 1)


def test_homology_via_identity_equivalence():
    c = chains_of(sphere(2))
    eh = EffectiveHomology(
        space=c, equivalence=Equivalence(c, identity_reduction(c), identity_reduction(c))
    )
    for n in range(3):
        assert homology_via_effective(eh, n).components() == homology(c, n).components()


def test_kz2_homology_is_projective_space():
    c = chains_of(k_z2_1())
    assert [homology(c, n).components() for n in range(4)] == [
        ["Z"],
        ["Z/2Z"],
        [],
        ["Z/2Z"],
    ]
