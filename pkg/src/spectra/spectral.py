"""Filtered complexes and the spectral-sequence engine.

Groups E^r_{p,q} are computed from the subquotient formula
(Z^r + F_{p-1}) / (d Z^{r-1} + F_{p-1}) with the union read as submodule
sum; pages of locally effective complexes are dispatched through an
attached filtered equivalence to their effective companion.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .chains import ChainComplex, Combination, Generator
from .errors import (
    ArityError,
    FiltrationError,
    NeedsEffectiveHomologyError,
    UnboundedFiltrationError,
)
from .lattice import GroupPresentation, IntMatrix, kernel_basis, solve_in_lattice, subquotient


class FilteredComplex:
    """A chain complex with a filtration-index rule per generator.

    flin(degree, generator) is the least p with the generator in F_p; the
    differential may only lower it.  Bounds per degree are either declared
    (required for locally effective complexes) or discovered by scanning
    the basis.
    """

    def __init__(
        self,
        complex: ChainComplex,
        flin: Callable[[int, Generator], int],
        origin: str = "",
        bounds: Optional[Callable[[int], tuple[int, int]]] = None,
    ):
        self.complex = complex
        self._flin = flin
        self.origin = origin or f"filtered({complex.origin})"
        self._declared_bounds = bounds
        self.equivalence = None  # set by scenario builders (FilteredEquivalence)
        self._basis_cache: dict[tuple[int, int], list[Generator]] = {}
        self._bounds_cache: dict[int, tuple[int, int]] = {}
        self._page_cache: dict[tuple[int, int, int], "_PageData"] = {}

    def flin(self, n: int, g: Generator) -> int:
        return self._flin(n, g)

    def bounds(self, n: int) -> tuple[int, int]:
        """(s, t) with F_s C_n = 0 and F_t C_n = C_n."""
        if self._declared_bounds is not None:
            return self._declared_bounds(n)
        if n in self._bounds_cache:
            return self._bounds_cache[n]
        if not self.complex.effective:
            raise UnboundedFiltrationError(
                f"{self.origin}: locally effective complexes must declare bounds"
            )
        basis = self.complex.basis(n)
        if basis:
            vals = [self.flin(n, g) for g in basis]
            out = (min(vals) - 1, max(vals))
        else:
            out = (-1, -1)
        self._bounds_cache[n] = out
        return out


@dataclass
class PageGroup:
    """E^r_{p,q} with its raw basis-divisors description."""

    r: int
    p: int
    q: int
    presentation: GroupPresentation
    ambient: tuple[Generator, ...]
    combinations: tuple[Combination, ...]
    display_combinations: tuple[Combination, ...]
    guaranteed: bool = True
    origin: str = ""

    def components(self) -> list[str]:
        return self.presentation.components()

    @property
    def divisors(self) -> tuple[int, ...]:
        return self.presentation.divisors

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "p": self.p,
            "q": self.q,
            "components": self.components(),
            "numerator": [list(v) for v in self.presentation.numerator_generators],
            "divisors": list(self.presentation.divisors),
        }


@dataclass(frozen=True)
class ConvergenceReport:
    degree: int
    level: int


@dataclass(frozen=True)
class EInfinityReport:
    degree: int
    ok: bool
    e_infinity_factors: tuple[int, ...]
    graded_homology_factors: tuple[int, ...]


@dataclass
class _PageData:
    ambient: list[Generator]
    index: dict[Generator, int]
    z_basis: list[list[int]]
    den_gens: list[list[int]]
    presentation: GroupPresentation


def make_filtered(
    complex: ChainComplex,
    flin: Callable[[int, Generator], int],
    origin: str = "",
    bounds: Optional[Callable[[int], tuple[int, int]]] = None,
    check_degrees: Sequence[int] = range(0, 6),
    sample_count: int = 50,
    seed: int = 0,
) -> FilteredComplex:
    """Wrap a chain complex with a filtration rule, checking on a sample of
    generators that the differential does not raise the filtration index."""
    f = FilteredComplex(complex, flin, origin=origin, bounds=bounds)
    if complex.effective:
        gens = [(n, g) for n in check_degrees for g in complex.basis(n)]
    elif complex.sampler is not None:
        rng = random.Random(seed)
        degs = [d for d in check_degrees if d > 0]
        gens = [
            (n, complex.sampler(rng, n))
            for n in degs
            for _ in range(max(1, sample_count // max(1, len(degs))))
        ]
    else:
        gens = []
    for n, g in gens:
        pg = flin(n, g)
        for _, h in complex.d(g).terms:
            if flin(n - 1, h) > pg:
                raise FiltrationError(
                    f"{origin or complex.origin}: d raises filtration on {g!r}"
                )
    return f


def fltrd_basis(fc: FilteredComplex, n: int, p: int) -> list[Generator]:
    """Ordered basis of F_p C_n (effective complexes only)."""
    key = (n, p)
    if key not in fc._basis_cache:
        fc._basis_cache[key] = [
            g for g in fc.complex.basis(n) if fc.flin(n, g) <= p
        ]
    return fc._basis_cache[key]


def fltr_dffr_matrix(fc: FilteredComplex, n: int, p: int) -> IntMatrix:
    """Matrix of d_n restricted to F_p C_n -> F_p C_{n-1}."""
    dom = fltrd_basis(fc, n, p)
    cod = fltrd_basis(fc, n - 1, p)
    idx = {g: i for i, g in enumerate(cod)}
    cols = []
    for g in dom:
        col = [0] * len(cod)
        for c, h in fc.complex.d(g).terms:
            if h not in idx:
                raise FiltrationError(
                    f"{fc.origin}: differential leaves F_{p} on {g!r}"
                )
            col[idx[h]] = c
        cols.append(col)
    return IntMatrix.from_columns(len(cod), cols)


def _z_basis(fc: FilteredComplex, r: int, p: int, q: int) -> tuple[list[list[int]], list[Generator]]:
    """Basis of Z^r_{p,q} = {a in F_p C_{p+q} : d a in F_{p-r} C_{p+q-1}},
    in F_p C_{p+q} coordinates."""
    n = p + q
    amb = fltrd_basis(fc, n, p)
    if not amb:
        return [], amb
    cod = fc.complex.basis(n - 1)
    rows = [g for g in cod if fc.flin(n - 1, g) > p - r]
    idx = {g: i for i, g in enumerate(rows)}
    cols = []
    for g in amb:
        col = [0] * len(rows)
        for c, h in fc.complex.d(g).terms:
            i = idx.get(h)
            if i is not None:
                col[i] = c
        cols.append(col)
    m = IntMatrix.from_columns(len(rows), cols)
    return kernel_basis(m), amb


def _page_data(fc: FilteredComplex, r: int, p: int, q: int) -> _PageData:
    if r < 1:
        raise ValueError("page index r must be >= 1")
    key = (r, p, q)
    cached = fc._page_cache.get(key)
    if cached is not None:
        return cached
    n = p + q
    z_basis, amb = _z_basis(fc, r, p, q)
    index = {g: i for i, g in enumerate(amb)}
    rank = len(amb)
    f_lower = [
        _unit(rank, i) for i, g in enumerate(amb) if fc.flin(n, g) <= p - 1
    ]
    # d Z^{r-1}_{p+r-1, q-r+2} expressed in F_p C_n coordinates
    zprev, amb_prev = _z_basis(fc, r - 1, p + r - 1, q - r + 2)
    den = []
    for v in zprev:
        img = Combination.zero(n)
        for c, g in zip(v, amb_prev):
            if c:
                img = img.add(fc.complex.d(g).scale(c))
        col = [0] * rank
        for c, g in img.terms:
            i = index.get(g)
            if i is None:
                raise FiltrationError(
                    f"{fc.origin}: d Z^{r-1} leaves F_{p} at ({p},{q})"
                )
            col[i] = c
        if any(col):
            den.append(col)
    numerator = z_basis + f_lower
    denominator = den + f_lower
    pres = subquotient(rank, numerator, denominator)
    data = _PageData(amb, index, z_basis, den + f_lower, pres)
    fc._page_cache[key] = data
    return data


def _unit(size: int, i: int) -> list[int]:
    v = [0] * size
    v[i] = 1
    return v


def _vector_combination(vec: Sequence[int], amb: Sequence[Generator], n: int) -> Combination:
    return Combination.build(n, [(c, g) for c, g in zip(vec, amb) if c])


def page_group(fc: FilteredComplex, r: int, p: int, q: int) -> PageGroup:
    """E^r_{p,q}; locally effective complexes dispatch through their
    attached equivalence (Theorem-2.15-style transfer)."""
    if fc.complex.effective:
        data = _page_data(fc, r, p, q)
        combos = tuple(
            _vector_combination(v, data.ambient, p + q)
            for v in data.presentation.numerator_generators
        )
        return PageGroup(
            r, p, q, data.presentation, tuple(data.ambient), combos, combos,
            guaranteed=True, origin=fc.origin,
        )
    if fc.equivalence is not None:
        return fc.equivalence.transfer_page(r, p, q)
    raise NeedsEffectiveHomologyError(
        f"{fc.origin}: needs effective homology to compute pages"
    )


def page_basis_divisors(fc: FilteredComplex, r: int, p: int, q: int) -> PageGroup:
    """Raw numerator combinations plus divisor list (same data as
    page_group; kept as a separate entry point mirroring the catalogue)."""
    return page_group(fc, r, p, q)


def page_differential(
    fc: FilteredComplex, r: int, p: int, q: int, coords: Sequence[int]
) -> list[int]:
    """d^r_{p,q} on the class with the given coordinates (with respect to
    the non-collapsed numerator generators), as coordinates in E^r_{p-r,q+r-1}."""
    if not fc.complex.effective:
        if fc.equivalence is not None:
            return fc.equivalence.transfer_differential(r, p, q, coords)
        raise NeedsEffectiveHomologyError(
            f"{fc.origin}: needs effective homology to compute differentials"
        )
    src = _page_data(fc, r, p, q)
    tgt = _page_data(fc, r, p - r, q + r - 1)
    eff = src.presentation.effective_indices
    if len(coords) != len(eff):
        raise ArityError(
            f"expected {len(eff)} coordinates for E^{r}_{{{p},{q}}}, got {len(coords)}"
        )
    n = p + q
    rank = len(src.ambient)
    lift = [0] * rank
    for c, i in zip(coords, eff):
        gen = src.presentation.numerator_generators[i]
        for j in range(rank):
            lift[j] += c * gen[j]
    # replace the lift by a representative inside Z^r (same class modulo the
    # denominator) so that d lands in F_{p-r}
    cols = src.z_basis + src.den_gens
    if cols:
        sol = solve_in_lattice(IntMatrix.from_columns(rank, cols), lift)
        if sol is None:
            raise FiltrationError("page class has no Z^r representative")
        z = [0] * rank
        for c, v in zip(sol[: len(src.z_basis)], src.z_basis):
            for j in range(rank):
                z[j] += c * v[j]
    else:
        z = lift
    dz = Combination.zero(n - 1)
    for c, g in zip(z, src.ambient):
        if c:
            dz = dz.add(fc.complex.d(g).scale(c))
    tvec = [0] * len(tgt.ambient)
    for c, g in dz.terms:
        i = tgt.index.get(g)
        if i is None:
            raise FiltrationError("differential image leaves the target filtration")
        tvec[i] = c
    if not tgt.presentation.numerator_generators:
        if any(tvec):
            raise FiltrationError("nonzero image in a trivial page group")
        return []
    m = IntMatrix.from_columns(len(tgt.ambient), list(tgt.presentation.numerator_generators))
    y = solve_in_lattice(m, tvec)
    if y is None:
        raise FiltrationError("differential image is not in the target numerator")
    return tgt.presentation.reduce_coordinates(y)


def _page_factors(fc: FilteredComplex, r: int, p: int, q: int) -> tuple[int, ...]:
    return page_group(fc, r, p, q).presentation.invariant_factors


def stable_page_index(fc: FilteredComplex, n: int) -> int:
    """An r from which no differential can touch the antidiagonal p+q = n."""
    s_n, t_n = fc.bounds(n)
    s_prev, t_prev = fc.bounds(n - 1)
    s_next, t_next = fc.bounds(n + 1)
    width = max(t_n - s_n, t_prev - s_prev, t_next - s_next)
    return max(1, width + 1, t_n - s_prev, t_next - s_n)


def convergence_level(fc: FilteredComplex, n: int) -> ConvergenceReport:
    """Smallest r with E^r_{p,q} isomorphic to E^infinity_{p,q} for every
    p+q = n, detected as stabilization of invariant factors across all
    later pages up to the stable index."""
    r_max = stable_page_index(fc, n)
    s_n, t_n = fc.bounds(n)
    ps = range(s_n + 1, t_n + 1)
    level = 1
    for p in ps:
        stable = _page_factors(fc, r_max, p, n - p)
        for rho in range(r_max - 1, 0, -1):
            if _page_factors(fc, rho, p, n - p) != stable:
                level = max(level, rho + 1)
                break
    return ConvergenceReport(n, level)


def e_infinity_check(fc: FilteredComplex, n: int) -> EInfinityReport:
    """Compare the stable page on the antidiagonal p+q = n against the
    graded homology induced by the filtration, both by invariant factors.

    The graded side is computed independently of the page machinery, from
    F_p H_n = image(H_n(F_p C) -> H_n(C)) via plain kernel/image lattices.
    """
    if not fc.complex.effective:
        raise NeedsEffectiveHomologyError("e_infinity_check needs an effective complex")
    r_stable = stable_page_index(fc, n)
    s_n, t_n = fc.bounds(n)
    einf: list[int] = []
    for p in range(s_n + 1, t_n + 1):
        einf.extend(_page_factors(fc, r_stable, p, n - p))

    full = fc.complex.basis(n)
    rank = len(full)
    idx = {g: i for i, g in enumerate(full)}
    boundaries = [
        col
        for col in fc.complex.differential_matrix(n + 1).columns()
        if any(col)
    ]

    def cycles_in(p: int) -> list[list[int]]:
        sub = fltrd_basis(fc, n, p)
        if not sub:
            return []
        cod = fc.complex.basis(n - 1)
        cidx = {g: i for i, g in enumerate(cod)}
        cols = []
        for g in sub:
            col = [0] * len(cod)
            for c, h in fc.complex.d(g).terms:
                col[cidx[h]] = c
            cols.append(col)
        ker = kernel_basis(IntMatrix.from_columns(len(cod), cols))
        out = []
        for v in ker:
            w = [0] * rank
            for c, g in zip(v, sub):
                w[idx[g]] = c
            out.append(w)
        return out

    graded: list[int] = []
    prev = cycles_in(s_n)
    for p in range(s_n + 1, t_n + 1):
        cur = cycles_in(p)
        pres = subquotient(rank, cur + boundaries, prev + boundaries)
        graded.extend(pres.invariant_factors)
        prev = cur

    key = lambda d: (d == 0, d)
    ok = sorted(einf, key=key) == sorted(graded, key=key)
    return EInfinityReport(n, ok, tuple(sorted(einf, key=key)), tuple(sorted(graded, key=key)))


def page_map_matrix(fc: FilteredComplex, r: int, p: int, q: int) -> IntMatrix:
    """Matrix of d^r_{p,q} between the non-collapsed generators of source
    and target pages (used by the page-recurrence checks)."""
    src = page_group(fc, r, p, q)
    tgt = page_group(fc, r, p - r, q + r - 1)
    ncols = len(src.presentation.effective_indices)
    nrows = len(tgt.presentation.effective_indices)
    cols = []
    for k in range(ncols):
        coords = [0] * ncols
        coords[k] = 1
        cols.append(page_differential(fc, r, p, q, coords))
    return IntMatrix.from_columns(nrows, cols)
