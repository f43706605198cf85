"""Simplicial sets and the constructors the scenarios need.

Simplices are handled in normalized form: an AbstractSimplex is a strictly
decreasing list of degeneracy indices (outermost first) applied to a
non-degenerate core.  Face and degeneracy application go through the
simplicial identities, so every simplicial set only has to define faces of
its non-degenerate cores.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Callable, NamedTuple, Optional

from .chains import (
    ChainComplex,
    Combination,
    Generator,
    Morphism,
    tensor_complex,
    tensor_generator,
)
from .errors import LocallyEffectiveError


class AbstractSimplex(NamedTuple):
    """Degeneracy operator list (strictly decreasing, outermost first)
    applied to a non-degenerate core simplex."""

    degens: tuple[int, ...]
    core: object

    @property
    def degenerate(self) -> bool:
        return bool(self.degens)


def nondeg(core) -> AbstractSimplex:
    return AbstractSimplex((), core)


def insert_degeneracy(j: int, degens: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical list for eta_j composed outside an existing operator list,
    via eta_i eta_j = eta_{j+1} eta_i (i <= j)."""
    if not degens or j > degens[0]:
        return (j,) + degens
    return (degens[0] + 1,) + insert_degeneracy(j, degens[1:])


def degeneracy_absm(j: int, a: AbstractSimplex) -> AbstractSimplex:
    return AbstractSimplex(insert_degeneracy(j, a.degens), a.core)


def strip_degeneracy(a: AbstractSimplex, j: int) -> AbstractSimplex:
    """Write a = eta_j(result); j must be an element of a.degens."""
    out = []
    removed = False
    for d in a.degens:
        if d == j and not removed:
            removed = True
        elif d > j:
            out.append(d - 1)
        else:
            out.append(d)
    if not removed:
        raise ValueError(f"eta_{j} is not an outer degeneracy of {a}")
    return AbstractSimplex(tuple(out), a.core)


class SimplicialSet:
    """Face rule on non-degenerate cores plus optional basis enumeration."""

    def __init__(
        self,
        name: str,
        face: Callable[[int, int, object], AbstractSimplex],
        basis: Optional[Callable[[int], list]] = None,
        render: Callable[[object], str] = str,
        sampler: Optional[Callable[..., object]] = None,
    ):
        self.name = name
        self._face = face
        self._basis = basis
        self.render_core = render
        self.sampler = sampler

    @property
    def effective(self) -> bool:
        return self._basis is not None

    def basis_cores(self, n: int) -> list:
        if self._basis is None:
            raise LocallyEffectiveError(
                f"The object [{self.name}] is locally-effective."
            )
        return self._basis(n)

    def face_core(self, i: int, n: int, core) -> AbstractSimplex:
        return self._face(i, n, core)

    def face(self, i: int, n: int, a: AbstractSimplex) -> AbstractSimplex:
        """d_i on a possibly degenerate simplex, by the simplicial identities."""
        if not 0 <= i <= n:
            raise ValueError(f"face index {i} out of range for dimension {n}")
        if a.degens:
            j = a.degens[0]
            rest = AbstractSimplex(a.degens[1:], a.core)
            if i == j or i == j + 1:
                return rest
            if i < j:
                return degeneracy_absm(j - 1, self.face(i, n - 1, rest))
            return degeneracy_absm(j, self.face(i - 1, n - 1, rest))
        return self.face_core(i, n, a.core)


class SimplicialGroup(SimplicialSet):
    """Simplicial set with a dimensionwise group structure on words."""

    def __init__(self, *args, mul=None, one=None, **kwargs):
        super().__init__(*args, **kwargs)
        self._mul = mul
        self._one = one

    def mul(self, n: int, a: AbstractSimplex, b: AbstractSimplex) -> AbstractSimplex:
        return self._mul(n, a, b)

    def one(self, n: int) -> AbstractSimplex:
        return self._one(n)


# -- spheres -------------------------------------------------------------

BASEPOINT = "*"


def sphere(n: int) -> SimplicialSet:
    """S^n with a base point and one non-degenerate n-simplex."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    top = f"s{n}"

    def face(i: int, m: int, core) -> AbstractSimplex:
        if core != top or m != n:
            raise ValueError(f"unknown simplex {core!r} of S^{n}")
        # all faces collapse to the (fully degenerate) base point
        return AbstractSimplex(tuple(range(n - 2, -1, -1)), BASEPOINT)

    def basis(m: int) -> list:
        if m == 0:
            return [BASEPOINT]
        if m == n:
            return [top]
        return []

    return SimplicialSet(f"sphere-{n}", face, basis=basis)


# -- Eilenberg-Mac Lane spaces (bar models) ------------------------------


def word_to_absm(word: tuple) -> AbstractSimplex:
    """Canonical form of a bar word: zeros become degeneracies."""
    zeros = [i for i, x in enumerate(word) if x == 0]
    core = tuple(x for x in word if x != 0)
    return AbstractSimplex(tuple(reversed(zeros)), core)


def absm_to_word(a: AbstractSimplex) -> tuple:
    word = list(a.core)
    for d in reversed(a.degens):
        word.insert(d, 0)
    return tuple(word)


def _bar_face_word(word: tuple, i: int) -> tuple:
    n = len(word)
    if i == 0:
        return word[1:]
    if i == n:
        return word[:-1]
    return word[: i - 1] + (word[i - 1] + word[i],) + word[i + 1 :]


def k_z_1() -> SimplicialGroup:
    """Minimal simplicial model of K(Z,1): n-simplices are integer words
    [a_1|...|a_n] with bar faces.  Locally effective."""

    def face(i: int, n: int, core) -> AbstractSimplex:
        return word_to_absm(_bar_face_word(core, i))

    def mul(n: int, a: AbstractSimplex, b: AbstractSimplex) -> AbstractSimplex:
        wa, wb = absm_to_word(a), absm_to_word(b)
        return word_to_absm(tuple(x + y for x, y in zip(wa, wb)))

    def one(n: int) -> AbstractSimplex:
        return word_to_absm((0,) * n)

    def sampler(rng, n: int, bound: int = 5) -> tuple:
        return tuple(_nonzero(rng, bound) for _ in range(n))

    return SimplicialGroup(
        "k-z-1",
        face,
        basis=None,
        render=lambda w: "[" + "|".join(map(str, w)) + "]",
        sampler=sampler,
        mul=mul,
        one=one,
    )


def _nonzero(rng, bound: int) -> int:
    while True:
        x = rng.randint(-bound, bound)
        if x != 0:
            return x


def k_z2_1() -> SimplicialGroup:
    """K(Z_2,1): in dimension n the only non-degenerate simplex is the word
    of n ones, represented by the integer n.  Effective."""

    def face(i: int, n: int, core) -> AbstractSimplex:
        word = _bar_face_word((1,) * int(core), i)
        word = tuple(x % 2 for x in word)
        a = word_to_absm(word)
        return AbstractSimplex(a.degens, len(a.core))

    def mul(n: int, a: AbstractSimplex, b: AbstractSimplex) -> AbstractSimplex:
        wa = absm_to_word(AbstractSimplex(a.degens, (1,) * int(a.core)))
        wb = absm_to_word(AbstractSimplex(b.degens, (1,) * int(b.core)))
        w = tuple((x + y) % 2 for x, y in zip(wa, wb))
        c = word_to_absm(w)
        return AbstractSimplex(c.degens, len(c.core))

    def one(n: int) -> AbstractSimplex:
        c = word_to_absm((0,) * n)
        return AbstractSimplex(c.degens, 0)

    return SimplicialGroup(
        "k-z2-1",
        face,
        basis=lambda n: [n] if n >= 0 else [],
        render=str,
        mul=mul,
        one=one,
    )


# -- twisted cartesian products ------------------------------------------


class TwistingOperator:
    """Degree -1 rule from base simplices to fiber group simplices.

    Only values on non-degenerate cores are supplied; degenerate simplices
    follow tau(eta_0 b) = e and tau(eta_{i+1} b) = eta_i tau(b)."""

    def __init__(self, base: SimplicialSet, fiber: SimplicialGroup, rule, name="tau"):
        self.base = base
        self.fiber = fiber
        self._rule = rule
        self.name = name

    def of(self, n: int, b: AbstractSimplex) -> AbstractSimplex:
        if b.degens:
            j = b.degens[0]
            rest = AbstractSimplex(b.degens[1:], b.core)
            if j == 0:
                return self.fiber.one(n - 1)
            return degeneracy_absm(j - 1, self.of(n - 1, rest))
        return self._rule(n, b.core)


def trivial_twist(base: SimplicialSet, fiber: SimplicialGroup) -> TwistingOperator:
    return TwistingOperator(
        base, fiber, lambda n, core: fiber.one(n - 1), name="trivial"
    )


def pair_absm(a: AbstractSimplex, b: AbstractSimplex) -> AbstractSimplex:
    """Canonical form of the product simplex (a, b): shared degeneracies are
    pulled out, the core is a non-degenerate pair."""
    outer: list[int] = []
    while True:
        shared = set(a.degens) & set(b.degens)
        if not shared:
            break
        j = max(shared)
        a = strip_degeneracy(a, j)
        b = strip_degeneracy(b, j)
        outer.append(j)
    degens: tuple[int, ...] = ()
    for j in reversed(outer):
        degens = insert_degeneracy(j, degens)
    return AbstractSimplex(degens, (a, b))


class TwistedProduct(SimplicialSet):
    """Total space of the principal fibration defined by a twisting
    operator: faces are componentwise except face 0, where the fiber
    component is multiplied by tau applied to the base component."""

    def __init__(self, tau: TwistingOperator, name: Optional[str] = None):
        self.base = tau.base
        self.fiber = tau.fiber
        self.tau = tau
        base, fiber = self.base, self.fiber

        def face(i: int, n: int, core) -> AbstractSimplex:
            cb, cf = core
            fb = base.face(i, n, cb)
            ff = fiber.face(i, n, cf)
            if i == 0:
                ff = fiber.mul(n - 1, tau.of(n, cb), ff)
            return pair_absm(fb, ff)

        basis = None
        if base.effective and fiber.effective:

            def basis(n: int) -> list:
                if n < 0:
                    return []
                out = []
                idx = list(range(n))
                for p in range(n + 1):
                    for bcore in base.basis_cores(p):
                        for bi in combinations(idx, n - p):
                            bdeg = tuple(reversed(bi))
                            rest = [j for j in idx if j not in bi]
                            for q in range(n + 1):
                                if n - q > len(rest):
                                    continue
                                for fcore in fiber.basis_cores(q):
                                    for fi in combinations(rest, n - q):
                                        out.append(
                                            (
                                                AbstractSimplex(bdeg, bcore),
                                                AbstractSimplex(
                                                    tuple(reversed(fi)), fcore
                                                ),
                                            )
                                        )
                return out

        def render(core) -> str:
            cb, cf = core
            return f"<CrPr {render_absm(cb, base.render_core)} {render_absm(cf, fiber.render_core)}>"

        def sampler(rng, n: int):
            # random pair with disjoint degeneracy sets
            while True:
                p = rng.randint(0, n)
                bcores = _sample_cores(base, rng, p)
                if bcores is None:
                    continue
                bi = tuple(sorted(rng.sample(range(n), n - p), reverse=True))
                rest = [j for j in range(n) if j not in bi]
                q = rng.randint(n - len(rest), n)
                fcores = _sample_cores(fiber, rng, q)
                if fcores is None:
                    continue
                fi = tuple(sorted(rng.sample(rest, n - q), reverse=True))
                return (AbstractSimplex(bi, bcores), AbstractSimplex(fi, fcores))

        super().__init__(
            name or f"{base.name} x_{tau.name} {fiber.name}",
            face,
            basis=basis,
            render=render,
            sampler=sampler,
        )


def _sample_cores(sset: SimplicialSet, rng, n: int):
    if sset.effective:
        cores = sset.basis_cores(n)
        return rng.choice(cores) if cores else None
    return sset.sampler(rng, n)


def fibration_total(tau: TwistingOperator) -> TwistedProduct:
    """Total space of the fibration classified by the twisting operator."""
    return TwistedProduct(tau)


def cartesian_product(base: SimplicialSet, fiber: SimplicialGroup) -> TwistedProduct:
    return TwistedProduct(trivial_twist(base, fiber), name=f"{base.name} x {fiber.name}")


def render_absm(a: AbstractSimplex, render_core=str) -> str:
    if not a.degens:
        return f"- {render_core(a.core)}"
    return "-".join(map(str, a.degens)) + f" {render_core(a.core)}"


# -- normalized chains ----------------------------------------------------


def chains_of(x: SimplicialSet) -> ChainComplex:
    """Free chain complex on non-degenerate simplices, differential the
    alternating face sum with degenerate faces dropped."""

    def diff(g: Generator) -> Combination:
        n = g.degree
        terms = []
        if n > 0:
            for i in range(n + 1):
                f = x.face_core(i, n, g.key)
                if not f.degens:
                    terms.append((-1 if i % 2 else 1, Generator(n - 1, f.core)))
        return Combination.build(n - 1, terms)

    basis = None
    if x.effective:

        def basis(n: int) -> list[Generator]:
            if n < 0:
                return []
            return [Generator(n, core) for core in x.basis_cores(n)]

    sampler = None
    if x.sampler is not None:

        def sampler(rng, n: int) -> Generator:
            return Generator(n, x.sampler(rng, n))

    return ChainComplex(basis, diff, origin=x.name, sampler=sampler)


# -- Serre filtration rules ------------------------------------------------


def serre_filtration_total(n: int, g: Generator) -> int:
    """Degree minus the degeneracy count of the base component."""
    base_absm, _ = g.key
    return n - len(base_absm.degens)


def serre_filtration_tensor(n: int, g: Generator) -> int:
    """Degree of the first (base) tensor factor."""
    return g.key[1]


# -- Eilenberg-Zilber reduction -------------------------------------------
#
# f = Alexander-Whitney, g = Eilenberg-Mac Lane shuffle.  The homotopy is
# the contraction obtained by the classical recursive construction on the
# universal models Delta^n x Delta^n (cone at the last vertex), transported
# by naturality and memoized per dimension.


def _shuffles(p: int, q: int):
    """(alpha, beta, sign): alpha degenerates the fiber factor (|alpha|=p),
    beta the base factor (|beta|=q)."""
    for alpha in combinations(range(p + q), p):
        beta = tuple(j for j in range(p + q) if j not in alpha)
        sg = sum(a - i for i, a in enumerate(alpha))
        yield alpha, beta, (-1 if sg % 2 else 1)


def _tup_face(t: tuple, i: int) -> tuple:
    return t[:i] + t[i + 1 :]


def _tup_degen(t: tuple, j: int) -> tuple:
    return t[: j + 1] + (t[j],) + t[j + 1 :]


def _pair_degenerate(u: tuple, v: tuple) -> bool:
    return any(
        u[i] == u[i + 1] and v[i] == v[i + 1] for i in range(len(u) - 1)
    )


def _add_term(acc: dict, key, coef: int):
    c = acc.get(key, 0) + coef
    if c:
        acc[key] = c
    else:
        acc.pop(key, None)


def _universal_gf(n: int) -> dict:
    """EML(AW(iota_n, iota_n)) in the normalized chains of Delta^n x Delta^n."""
    iota = tuple(range(n + 1))
    acc: dict = {}
    for i in range(n + 1):
        front = iota[: i + 1]
        back = iota[i:]
        p, q = i, n - i
        for alpha, beta, sign in _shuffles(p, q):
            u = front
            for j in beta:
                u = _tup_degen(u, j)
            v = back
            for j in alpha:
                v = _tup_degen(v, j)
            if not _pair_degenerate(u, v):
                _add_term(acc, (u, v), sign)
    return acc


@lru_cache(maxsize=None)
def _universal_h(n: int) -> tuple:
    """The contraction homotopy evaluated on the universal pair of
    dimension n; a tuple of (coef, (u, v)) with u, v of length n+2."""
    if n == 0:
        return ()
    iota = tuple(range(n + 1))
    w: dict = {(iota, iota): 1}
    for key, coef in _universal_gf(n).items():
        _add_term(w, key, -coef)
    # minus h(d(iota, iota)), h transported from dimension n-1
    sub = _universal_h(n - 1)
    for i in range(n + 1):
        u = _tup_face(iota, i)
        sign = -1 if i % 2 else 1
        for coef, (s, t) in sub:
            us = tuple(u[k] for k in s)
            vt = tuple(u[k] for k in t)
            if not _pair_degenerate(us, vt):
                _add_term(w, (us, vt), -sign * coef)
    # cone at the last vertex: P(sigma_j) = (-1)^{j+1} sigma * (n,n)
    out: dict = {}
    sign = -1 if (n + 1) % 2 else 1
    for (u, v), coef in w.items():
        uu, vv = u + (n,), v + (n,)
        if not _pair_degenerate(uu, vv):
            _add_term(out, (uu, vv), sign * coef)
    return tuple((c, k) for k, c in sorted(out.items()))


def apply_monotone(sset: SimplicialSet, op: tuple, n: int, a: AbstractSimplex) -> AbstractSimplex:
    """Action on a of the simplicial operator given by the monotone map
    op: [len(op)-1] -> [n]."""
    m = n
    for i in range(n, -1, -1):
        if i not in op:
            a = sset.face(i, m, a)
            m -= 1
            op = tuple(v - 1 if v > i else v for v in op)
    return _apply_surjection(op, a)


def _apply_surjection(op: tuple, a: AbstractSimplex) -> AbstractSimplex:
    for j in range(len(op) - 1):
        if op[j] == op[j + 1]:
            inner = _apply_surjection(op[: j + 1] + op[j + 2 :], a)
            return degeneracy_absm(j, inner)
    return a


def ez_reduction(base: SimplicialSet, fiber: SimplicialGroup, product=None, tensor=None):
    """Classical reduction C(B x G) => C(B) (x) C(G).

    Returns an effective.Reduction; the product/tensor complexes may be
    passed in so callers can share objects across constructions.
    """
    from .effective import Reduction

    prod_sset = product if isinstance(product, TwistedProduct) else None
    if prod_sset is None:
        prod_sset = cartesian_product(base, fiber)
    top = chains_of(prod_sset)
    cb, cf = chains_of(base), chains_of(fiber)
    bottom = tensor if tensor is not None else tensor_complex(cb, cf)

    def aw_rule(g: Generator) -> Combination:
        n = g.degree
        ba, fa = g.key
        terms = []
        for i in range(n + 1):
            front = ba
            for k in range(n, i, -1):
                front = base.face(k, k, front)
            if front.degens:
                continue
            back = fa
            for k in range(i):
                back = fiber.face(0, n - k, back)
            if back.degens:
                continue
            terms.append(
                (
                    1,
                    tensor_generator(
                        Generator(i, front.core), Generator(n - i, back.core)
                    ),
                )
            )
        return Combination.build(n, terms)

    def eml_rule(g: Generator) -> Combination:
        _, p, bkey, q, fkey = g.key
        terms = []
        for alpha, beta, sign in _shuffles(p, q):
            bx = AbstractSimplex(tuple(reversed(beta)), bkey)
            fy = AbstractSimplex(tuple(reversed(alpha)), fkey)
            terms.append((sign, Generator(p + q, (bx, fy))))
        return Combination.build(p + q, terms)

    def shi_rule(g: Generator) -> Combination:
        n = g.degree
        ba, fa = g.key
        terms = []
        for coef, (u, v) in _universal_h(n):
            tb = apply_monotone(base, u, n, ba)
            tf = apply_monotone(fiber, v, n, fa)
            pr = pair_absm(tb, tf)
            if pr.degens:
                continue
            terms.append((coef, Generator(n + 1, pr.core)))
        return Combination.build(n + 1, terms)

    f = Morphism(top, bottom, 0, aw_rule, name="aw")
    g = Morphism(bottom, top, 0, eml_rule, name="eml")
    h = Morphism(top, top, 1, shi_rule, name="shi")
    return Reduction(top, bottom, f, g, h, name="ez")


# -- the circle and its reduction ------------------------------------------


def circle_complex() -> ChainComplex:
    """Two-generator model of the circle: degrees 0 and 1, zero differential."""

    def basis(n: int) -> list[Generator]:
        if n == 0:
            return [Generator(0, BASEPOINT)]
        if n == 1:
            return [Generator(1, "s1")]
        return []

    return ChainComplex(basis, lambda g: Combination.zero(g.degree - 1), origin="circle")


def circle_reduction(kz1_chains: Optional[ChainComplex] = None):
    """Reduction C(K(Z,1)) => C(S^1) from the discrete vector field that
    matches [a_1|rest] (a_1 != 1) with [1|a_1 -+ 1|rest]; the critical cells
    are [] and [1], and f counts windings on 1-simplices."""
    from .effective import Reduction

    top = kz1_chains if kz1_chains is not None else chains_of(k_z_1())
    bottom = circle_complex()

    def h_word(word: tuple) -> list[tuple[int, tuple]]:
        # image lies in the matched (n+1)-cells; terminates by descent of
        # the leading entry towards 1 (positive) or 0 (negative)
        out = []
        while word and word[0] != 1:
            a = word[0]
            rest = word[1:]
            if a >= 2:
                out.append((-1, (1, a - 1) + rest))
                word = (a - 1,) + rest
            else:
                out.append((1, (1, a) + rest))
                if a + 1 == 0:
                    break
                word = (a + 1,) + rest
        return out

    def h_rule(g: Generator) -> Combination:
        if g.degree == 0:
            return Combination.zero(1)
        return Combination.build(
            g.degree + 1,
            [(c, Generator(g.degree + 1, w)) for c, w in h_word(g.key)],
        )

    def f_rule(g: Generator) -> Combination:
        if g.degree == 0:
            return Combination.single(Generator(0, BASEPOINT))
        if g.degree == 1:
            return Combination.single(Generator(1, "s1"), g.key[0])
        return Combination.zero(g.degree)

    def g_rule(g: Generator) -> Combination:
        if g.degree == 0:
            return Combination.single(Generator(0, ()))
        return Combination.single(Generator(1, (1,)))

    f = Morphism(top, bottom, 0, f_rule, name="winding")
    g = Morphism(bottom, top, 0, g_rule, name="circle-in")
    h = Morphism(top, top, 1, h_rule, name="circle-h")
    return Reduction(top, bottom, f, g, h, name="circle")
