"""Spectral engine properties: filtered bases, differential matrices, the
page recurrence, stabilization, and the E-infinity comparison."""

import pytest

from spectra.chains import ChainComplex, Combination, Generator
from spectra.errors import (
    ArityError,
    FiltrationError,
    LocallyEffectiveError,
    NeedsEffectiveHomologyError,
)
from spectra.lattice import IntMatrix, kernel_basis, solve_in_lattice, subquotient
from spectra.scenarios import build_scenario
from spectra.simplicial import chains_of, k_z_1, serre_filtration_tensor, sphere
from spectra.spectral import (
    FilteredComplex,
    convergence_level,
    e_infinity_check,
    fltr_dffr_matrix,
    fltrd_basis,
    make_filtered,
    page_differential,
    page_group,
    page_map_matrix,
    stable_page_index,
)
from spectra.chains import tensor_complex
from spectra.simplicial import circle_complex


def zero_complex():
    return ChainComplex(lambda n: [], lambda g: Combination.zero(g.degree - 1), origin="zero")


def tensor_filtered():
    t = tensor_complex(chains_of(sphere(2)), circle_complex())
    return make_filtered(t, serre_filtration_tensor, check_degrees=range(0, 5))


# -- construction -------------------------------------------------------------


def test_make_filtered_zero_complex():
    fc = make_filtered(zero_complex(), lambda n, g: 0)
    assert fltrd_basis(fc, 3, 5) == []


def test_make_filtered_tensor_base_degree():
    fc = tensor_filtered()
    assert fc.bounds(2) == (1, 2)


def test_make_filtered_rejects_incompatible_filtration():
    a, b = Generator(1, "a"), Generator(0, "b")
    c = ChainComplex(
        lambda n: {0: [b], 1: [a]}.get(n, []),
        lambda g: Combination.single(b) if g == a else Combination.zero(-1),
    )
    # d(a) = b but flin(b) > flin(a): invalid
    with pytest.raises(FiltrationError):
        make_filtered(c, lambda n, g: 0 if g == a else 1, check_degrees=range(0, 2))


# -- filtered bases and matrices ------------------------------------------------


def test_fltrd_basis_below_bound_empty():
    fc = tensor_filtered()
    assert fltrd_basis(fc, 2, -1) == []


def test_fltrd_basis_full_at_degree():
    fc = tensor_filtered()
    for n in range(4):
        assert fltrd_basis(fc, n, n) == fc.complex.basis(n)


def test_fltrd_basis_s2xs1_degree2_p1_empty():
    fc = tensor_filtered()
    assert fltrd_basis(fc, 2, 1) == []


def test_fltrd_basis_locally_effective_raises():
    fc = FilteredComplex(chains_of(k_z_1()), lambda n, g: 0, bounds=lambda n: (-1, n))
    with pytest.raises(LocallyEffectiveError):
        fltrd_basis(fc, 1, 1)


def test_fltr_dffr_matrix_zero_complex():
    fc = tensor_filtered()
    m = fltr_dffr_matrix(fc, 2, 2)
    assert m.is_zero()  # untwisted tensor has zero differential


def test_fltr_dffr_matrix_full_p_is_whole_differential():
    sc = build_scenario("s2-kz2")
    fc = sc.filtered
    for n in range(1, 4):
        assert fltr_dffr_matrix(fc, n, n) == fc.complex.differential_matrix(n)


def test_fltr_dffr_matrix_twisted_hopf_effective():
    sc = build_scenario("hopf")
    eff = sc.equivalence.right_filtered
    m = fltr_dffr_matrix(eff, 2, 2)
    assert (m.rows, m.cols) == (1, 1)
    assert m.data[0][0] in (1, -1)


# -- page properties -------------------------------------------------------------


def page_recurrence_holds(fc, r, p, q):
    """Invariant factors of E^{r+1}_{p,q} match the homology of the
    materialized d^r maps around (p,q), computed with plain lattice
    arithmetic on the presented groups."""
    grp = page_group(fc, r, p, q).presentation
    divisors = [grp.divisors[i] for i in grp.effective_indices]
    k = len(divisors)
    out_m = page_map_matrix(fc, r, p, q)
    in_m = page_map_matrix(fc, r, p + r, q - r + 1)
    tgt = page_group(fc, r, p - r, q + r - 1).presentation
    tgt_div = [tgt.divisors[i] for i in tgt.effective_indices]
    # kernel of out_m as a map into the presented target group: vectors x
    # with out_m x in the relation lattice, i.e. the x-block of
    # ker [out_m | -relations]
    rel_tgt = [
        [d if j == i else 0 for j in range(len(tgt_div))]
        for i, d in enumerate(tgt_div)
        if d != 0
    ]
    if k == 0:
        kernel = []
    elif out_m.rows == 0:
        kernel = [[1 if j == i else 0 for j in range(k)] for i in range(k)]
    else:
        cols = [out_m.column(j) for j in range(k)] + [[-x for x in rel] for rel in rel_tgt]
        wide = IntMatrix.from_columns(out_m.rows, cols)
        kernel = [v[:k] for v in kernel_basis(wide)]
    rel_mid = [
        [d if j == i else 0 for j in range(k)]
        for i, d in enumerate(divisors)
        if d != 0
    ]
    image = [in_m.column(j) for j in range(in_m.cols)]
    pres = subquotient(k, kernel + rel_mid, image + rel_mid)
    want = page_group(fc, r + 1, p, q).presentation.invariant_factors
    return pres.invariant_factors == want


def antidiagonal_cells(fc, n):
    s, t = fc.bounds(n)
    return [(p, n - p) for p in range(s + 1, t + 1)]


def test_page_recurrence_s2_kz2():
    fc = build_scenario("s2-kz2").filtered
    for n in range(0, 6):
        for p, q in antidiagonal_cells(fc, n):
            for r in range(1, 6):
                assert page_recurrence_holds(fc, r, p, q), (r, p, q)


def test_page_recurrence_hopf_effective():
    fc = build_scenario("hopf").equivalence.right_filtered
    for n in range(0, 5):
        for p, q in antidiagonal_cells(fc, n):
            for r in range(1, 6):
                assert page_recurrence_holds(fc, r, p, q), (r, p, q)


def test_page_differential_squares_to_zero():
    fc = build_scenario("s2-kz2").filtered
    for n in range(0, 6):
        for p, q in antidiagonal_cells(fc, n):
            for r in range(1, 5):
                src = page_group(fc, r, p, q).presentation
                k = len(src.effective_indices)
                for i in range(k):
                    coords = [1 if j == i else 0 for j in range(k)]
                    once = page_differential(fc, r, p, q, coords)
                    twice = page_differential(fc, r, p - r, q + r - 1, once)
                    assert all(x == 0 for x in twice), (r, p, q, i)


def test_page_differential_zero_coords():
    fc = build_scenario("s2-kz2").filtered
    assert page_differential(fc, 2, 2, 0, [0]) == [0]


def test_page_differential_arity_error():
    fc = build_scenario("s2-kz2").filtered
    with pytest.raises(ArityError):
        page_differential(fc, 2, 2, 0, [1, 0])


def test_e1_equals_graded_quotient_homology():
    """E^1_{p,q} = H_{p+q}(F_p/F_{p-1}) computed independently by SNF on
    the quotient complex."""
    fc = build_scenario("s2-kz2").filtered
    for n in range(0, 5):
        for p, q in antidiagonal_cells(fc, n):
            got = page_group(fc, 1, p, q).presentation.invariant_factors

            def graded_basis(m):
                return [
                    g
                    for g in fc.complex.basis(m)
                    if fc.flin(m, g) == p
                ]

            dom = graded_basis(n)
            up = graded_basis(n + 1)
            down = graded_basis(n - 1)
            didx = {g: i for i, g in enumerate(down)}

            def dbar_cols(gens, codomain_index):
                cols = []
                for g in gens:
                    col = [0] * len(codomain_index)
                    for c, h in fc.complex.d(g).terms:
                        i = codomain_index.get(h)
                        if i is not None:
                            col[i] = c
                    cols.append(col)
                return cols

            didx_dom = {g: i for i, g in enumerate(dom)}
            m_down = IntMatrix.from_columns(len(down), dbar_cols(dom, didx))
            cycles = kernel_basis(m_down) if dom else []
            if not dom:
                cycles = []
            bnd = dbar_cols(up, didx_dom)
            bnd = [c for c in bnd if any(c)]
            want = subquotient(len(dom), cycles, bnd).invariant_factors
            assert got == want, (p, q, got, want)


def test_pages_stabilize_beyond_width():
    fc = build_scenario("s2-kz2").filtered
    for n in range(0, 4):
        r_stable = stable_page_index(fc, n)
        for p, q in antidiagonal_cells(fc, n):
            a = page_group(fc, r_stable, p, q).presentation.invariant_factors
            b = page_group(fc, r_stable + 1, p, q).presentation.invariant_factors
            c = page_group(fc, r_stable + 3, p, q).presentation.invariant_factors
            assert a == b == c


def test_e_infinity_zero_differential_complex():
    fc = tensor_filtered()
    for n in range(0, 4):
        rep = e_infinity_check(fc, n)
        assert rep.ok
        # with a zero differential E^1 is already the graded homology
        for p, q in antidiagonal_cells(fc, n):
            e1 = page_group(fc, 1, p, q).presentation.invariant_factors
            einf = page_group(fc, stable_page_index(fc, n), p, q).presentation.invariant_factors
            assert e1 == einf


def test_e_infinity_s2_kz2():
    fc = build_scenario("s2-kz2").filtered
    for n in range(0, 5):
        assert e_infinity_check(fc, n).ok


def test_e_infinity_hopf_effective_degree3():
    fc = build_scenario("hopf").equivalence.right_filtered
    for n in range(0, 4):
        assert e_infinity_check(fc, n).ok
    # E-infinity concentrated at (2,1) in degree 3, matching H_3(S^3) = Z
    r = stable_page_index(fc, 3)
    cells = {
        (p, q): page_group(fc, r, p, q).presentation.invariant_factors
        for p, q in antidiagonal_cells(fc, 3)
    }
    assert cells[(2, 1)] == (0,)
    assert all(v == () for k, v in cells.items() if k != (2, 1))


def test_page_group_requires_r_at_least_one():
    fc = build_scenario("s2-kz2").filtered
    with pytest.raises(ValueError):
        page_group(fc, 0, 0, 0)


def test_locally_effective_without_equivalence_raises():
    fc = FilteredComplex(chains_of(k_z_1()), lambda n, g: 0, bounds=lambda n: (-1, n))
    with pytest.raises(NeedsEffectiveHomologyError):
        page_group(fc, 2, 0, 1)


def test_locally_effective_without_bounds_is_unbounded():
    from spectra.errors import UnboundedFiltrationError

    fc = FilteredComplex(chains_of(k_z_1()), lambda n, g: 0)
    with pytest.raises(UnboundedFiltrationError):
        fc.bounds(1)
    with pytest.raises(UnboundedFiltrationError):
        convergence_level(fc, 1)


def test_convergence_levels_p3r():
    fc = build_scenario("p3r").filtered
    assert convergence_level(fc, 0).level == 1
    # d^2 is multiplication by 2, so E^3_{0,1} = Z/2 differs from E^2 = Z
    assert convergence_level(fc, 1).level == 3
