"""Chain complexes over Z with free graded components.

Generators are degree-tagged hashable keys; combinations are finite formal
integer linear combinations kept in canonical (sorted, zero-free) form.
Complexes are either effective (an enumeration rule returns the finite
ordered basis of each degree) or locally effective (per-element operations
only).  Differentials and morphisms are evaluation rules extended linearly.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

from .errors import LocallyEffectiveError
from .lattice import GroupPresentation, IntMatrix, kernel_basis, subquotient


class Generator:
    """A basis element: a degree plus an opaque, totally ordered key."""

    __slots__ = ("degree", "key", "_hash")

    def __init__(self, degree: int, key):
        self.degree = degree
        self.key = key
        self._hash = hash((degree, key))

    def __eq__(self, other):
        return (
            isinstance(other, Generator)
            and self.degree == other.degree
            and self.key == other.key
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Generator"):
        return (self.degree, self.key) < (other.degree, other.key)

    def __repr__(self):
        return f"Generator({self.degree}, {self.key!r})"


class Combination:
    """Finite formal sum of generators of one fixed degree.

    Terms are (coefficient, generator) pairs with nonzero coefficients and
    strictly increasing generator keys."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Sequence[tuple[int, Generator]] = ()):
        self.degree = degree
        self.terms = tuple(terms)

    @classmethod
    def zero(cls, degree: int) -> "Combination":
        return cls(degree, ())

    @classmethod
    def single(cls, gen: Generator, coef: int = 1) -> "Combination":
        if coef == 0:
            return cls(gen.degree, ())
        return cls(gen.degree, ((coef, gen),))

    @classmethod
    def build(cls, degree: int, terms: Iterable[tuple[int, Generator]]) -> "Combination":
        """Merge arbitrary (coef, gen) pairs into canonical form."""
        acc: dict[Generator, int] = {}
        for c, g in terms:
            if g.degree != degree:
                raise ValueError("term degree does not match combination degree")
            acc[g] = acc.get(g, 0) + c
        items = [(c, g) for g, c in acc.items() if c != 0]
        items.sort(key=lambda t: t[1].key)
        return cls(degree, items)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, gen: Generator) -> int:
        for c, g in self.terms:
            if g == gen:
                return c
        return 0

    def generators(self) -> list[Generator]:
        return [g for _, g in self.terms]

    def scale(self, c: int) -> "Combination":
        if c == 0:
            return Combination(self.degree, ())
        return Combination(self.degree, tuple((c * a, g) for a, g in self.terms))

    def neg(self) -> "Combination":
        return self.scale(-1)

    def add(self, other: "Combination") -> "Combination":
        return cmbn_add(self, other)

    def sub(self, other: "Combination") -> "Combination":
        return cmbn_add(self, other.neg())

    def __eq__(self, other):
        return (
            isinstance(other, Combination)
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.degree, self.terms))

    def __repr__(self):
        return f"Combination({self.degree}, {list(self.terms)})"


def cmbn_add(a: Combination, b: Combination) -> Combination:
    """Sum of two combinations of equal degree (merge, sort, drop zeros)."""
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    if not a.terms:
        return b
    if not b.terms:
        return a
    return Combination.build(a.degree, list(a.terms) + list(b.terms))


def format_combination(c: Combination, render=str) -> str:
    """Render a combination the way the CMBN blocks print: a degree header
    followed by one `<coef * generator>` line per term."""
    lines = ["-" * 42 + f"{{CMBN {c.degree}}}"]
    for coef, gen in c.terms:
        lines.append(f"<{coef} * {render(gen.key)}>")
    lines.append("-" * 54)
    return "\n".join(lines)


class ChainComplex:
    """A graded generator source plus a degree -1 differential rule.

    basis: callable degree -> ordered generator list, or None for a locally
    effective complex.  The differential rule is memoized; rules must be
    pure.  sampler, when present, draws random generators of a given degree
    for the statistical test suites.
    """

    def __init__(
        self,
        basis: Optional[Callable[[int], list[Generator]]],
        diff: Callable[[Generator], Combination],
        origin: str = "",
        sampler: Optional[Callable[..., Generator]] = None,
    ):
        self._basis = basis
        self._diff = diff
        self.origin = origin
        self.sampler = sampler
        self._diff_cache: dict[Generator, Combination] = {}
        self._basis_cache: dict[int, list[Generator]] = {}

    @property
    def effective(self) -> bool:
        return self._basis is not None

    def basis(self, degree: int) -> list[Generator]:
        if self._basis is None:
            raise LocallyEffectiveError(
                f"The object [{self.origin or 'chain complex'}] is locally-effective."
            )
        if degree not in self._basis_cache:
            self._basis_cache[degree] = list(self._basis(degree))
        return self._basis_cache[degree]

    def d(self, x) -> Combination:
        """Differential of a generator or a combination."""
        if isinstance(x, Combination):
            out = Combination.zero(x.degree - 1)
            for c, g in x.terms:
                out = out.add(self.d(g).scale(c))
            return out
        cached = self._diff_cache.get(x)
        if cached is None:
            cached = self._diff(x)
            if cached.degree != x.degree - 1:
                raise ValueError("differential must lower degree by exactly 1")
            self._diff_cache[x] = cached
        return cached

    def differential_matrix(self, degree: int) -> IntMatrix:
        """Matrix of d_degree in the ordered bases (rows: degree-1 basis)."""
        dom = self.basis(degree)
        cod = self.basis(degree - 1)
        index = {g: i for i, g in enumerate(cod)}
        cols = []
        for g in dom:
            col = [0] * len(cod)
            for c, h in self.d(g).terms:
                col[index[h]] = c
            cols.append(col)
        return IntMatrix.from_columns(len(cod), cols)


class Morphism:
    """Graded-linear map between complexes, given by a rule on generators."""

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        degree: int,
        rule: Callable[[Generator], Combination],
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.degree = degree
        self._rule = rule
        self.name = name
        self._cache: dict[Generator, Combination] = {}

    def of_gen(self, g: Generator) -> Combination:
        cached = self._cache.get(g)
        if cached is None:
            cached = self._rule(g)
            if cached.degree != g.degree + self.degree:
                raise ValueError(
                    f"morphism {self.name or ''} must shift degree by {self.degree}"
                )
            self._cache[g] = cached
        return cached

    def __call__(self, x) -> Combination:
        return apply_morphism(self, x)


def apply_morphism(m: Morphism, c: Combination) -> Combination:
    """Linear extension of a morphism rule to combinations."""
    if m.source.effective:
        known = set(m.source.basis(c.degree)) if c.terms else ()
        for _, g in c.terms:
            if g not in known:
                raise ValueError(f"foreign generator {g!r} for morphism source")
    out = Combination.zero(c.degree + m.degree)
    for coef, g in c.terms:
        out = out.add(m.of_gen(g).scale(coef))
    return out


def identity_morphism(c: ChainComplex) -> Morphism:
    return Morphism(c, c, 0, lambda g: Combination.single(g), name="id")


def zero_morphism(source: ChainComplex, target: ChainComplex, degree: int) -> Morphism:
    return Morphism(
        source, target, degree, lambda g: Combination.zero(g.degree + degree), name="0"
    )


def morphism_sum(a: Morphism, b: Morphism) -> Morphism:
    if a.degree != b.degree:
        raise ValueError("cannot add morphisms of different degrees")
    return Morphism(
        a.source,
        a.target,
        a.degree,
        lambda g: a.of_gen(g).add(b.of_gen(g)),
        name=f"({a.name}+{b.name})",
    )


def morphism_compose(outer: Morphism, inner: Morphism) -> Morphism:
    """outer after inner."""
    return Morphism(
        inner.source,
        outer.target,
        inner.degree + outer.degree,
        lambda g: apply_morphism(outer, inner.of_gen(g)),
        name=f"({outer.name}o{inner.name})",
    )


def perturbed_complex(c: ChainComplex, delta: Morphism, origin: str = "") -> ChainComplex:
    """Same generators as c, differential d + delta."""
    if delta.degree != -1:
        raise ValueError("a perturbation must have degree -1")
    return ChainComplex(
        c._basis,
        lambda g: c.d(g).add(delta.of_gen(g)),
        origin=origin or f"add({c.origin})",
        sampler=c.sampler,
    )


# -- tensor products ----------------------------------------------------


def tensor_key(a: Generator, b: Generator):
    return ("tnpr", a.degree, a.key, b.degree, b.key)


def tensor_generator(a: Generator, b: Generator) -> Generator:
    return Generator(a.degree + b.degree, tensor_key(a, b))


def split_tensor_generator(g: Generator) -> tuple[Generator, Generator]:
    _, dega, keya, degb, keyb = g.key
    return Generator(dega, keya), Generator(degb, keyb)


def tensor_complex(a: ChainComplex, b: ChainComplex, origin: str = "") -> ChainComplex:
    """Tensor product with the Koszul sign rule
    d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy."""

    basis = None
    if a.effective and b.effective:

        def basis(n: int) -> list[Generator]:
            # all constructors here are nonnegatively graded
            out = []
            for p in range(0, max(n, -1) + 1):
                for ga in a.basis(p):
                    for gb in b.basis(n - p):
                        out.append(tensor_generator(ga, gb))
            return out

    def diff(g: Generator) -> Combination:
        ga, gb = split_tensor_generator(g)
        terms: list[tuple[int, Generator]] = []
        for c, x in a.d(ga).terms:
            terms.append((c, tensor_generator(x, gb)))
        sign = -1 if ga.degree % 2 else 1
        for c, y in b.d(gb).terms:
            terms.append((sign * c, tensor_generator(ga, y)))
        return Combination.build(g.degree - 1, terms)

    sampler = None
    if basis is None and _samplable(a) and _samplable(b):

        def sampler(rng, n: int) -> Generator:
            while True:
                p = rng.randint(0, n)
                ga = _pick_generator(a, rng, p)
                gb = _pick_generator(b, rng, n - p)
                if ga is not None and gb is not None:
                    return tensor_generator(ga, gb)

    return ChainComplex(
        basis, diff, origin=origin or f"tnpr({a.origin},{b.origin})", sampler=sampler
    )


def _samplable(c: ChainComplex) -> bool:
    return c.effective or c.sampler is not None


def _pick_generator(c: ChainComplex, rng, n: int) -> Optional[Generator]:
    if c.effective:
        opts = c.basis(n)
        return rng.choice(opts) if opts else None
    return c.sampler(rng, n)


def tensor_morphisms(f: Morphism, g: Morphism, source: ChainComplex, target: ChainComplex) -> Morphism:
    """f (x) g with the Koszul sign (-1)^{|g| * |x|} on x (x) y."""

    def rule(gen: Generator) -> Combination:
        ga, gb = split_tensor_generator(gen)
        fa = f.of_gen(ga)
        gb_img = g.of_gen(gb)
        sign = -1 if (g.degree % 2) and (ga.degree % 2) else 1
        terms = []
        for c1, x in fa.terms:
            for c2, y in gb_img.terms:
                terms.append((sign * c1 * c2, tensor_generator(x, y)))
        return Combination.build(gen.degree + f.degree + g.degree, terms)

    return Morphism(source, target, f.degree + g.degree, rule, name=f"({f.name}(x){g.name})")


# -- homology of effective complexes ------------------------------------


def homology(c: ChainComplex, n: int) -> GroupPresentation:
    """H_n = Ker d_n / Im d_{n+1} as a basis-divisors presentation."""
    if not c.effective:
        raise LocallyEffectiveError(
            "homology of a locally effective complex needs effective homology"
        )
    rank = len(c.basis(n))
    dn = c.differential_matrix(n)
    cycles = kernel_basis(dn)
    dnext = c.differential_matrix(n + 1)
    boundaries = [col for col in dnext.columns() if any(x != 0 for x in col)]
    return subquotient(rank, cycles, boundaries)
