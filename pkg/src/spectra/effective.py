"""Reductions, strong chain equivalences, the Basic Perturbation Lemma and
the page-transfer mechanism for locally effective filtered complexes.

A reduction (f, g, h): D => C satisfies the five identities
(1) fg = 1, (2) gf + dh + hd = 1, (3) fh = 0, (4) hg = 0, (5) hh = 0,
all checked by evaluation in validate_reduction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .chains import (
    ChainComplex,
    Combination,
    Generator,
    Morphism,
    identity_morphism,
    morphism_compose,
    morphism_sum,
    perturbed_complex,
    tensor_complex,
    tensor_morphisms,
    zero_morphism,
)
from .errors import LocallyEffectiveError, SpectraError
from .lattice import GroupPresentation
from . import spectral
from .spectral import FilteredComplex, PageGroup


class Reduction:
    """The (f, g, h) triple exhibiting bottom as a deformation retract of top."""

    def __init__(
        self,
        top: ChainComplex,
        bottom: ChainComplex,
        f: Morphism,
        g: Morphism,
        h: Morphism,
        name: str = "",
        is_identity: bool = False,
    ):
        self.top = top
        self.bottom = bottom
        self.f = f
        self.g = g
        self.h = h
        self.name = name
        self.is_identity = is_identity
        self.bottom_perturbation: Optional[Morphism] = None

    def __repr__(self):
        return f"Reduction({self.name or 'anonymous'}: {self.top.origin} => {self.bottom.origin})"


def identity_reduction(c: ChainComplex) -> Reduction:
    return Reduction(
        c, c,
        identity_morphism(c), identity_morphism(c), zero_morphism(c, c, 1),
        name="identity", is_identity=True,
    )


@dataclass
class Violation:
    identity: str
    witness: object
    discrepancy: Combination


@dataclass
class ValidationReport:
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"ok ({self.checks} checks)"
        lines = [f"FAILED ({len(self.violations)} violations in {self.checks} checks)"]
        for v in self.violations[:10]:
            lines.append(f"  {v.identity} fails on {v.witness!r}")
        return "\n".join(lines)


def sample_generators(
    complex: ChainComplex,
    degrees: Iterable[int],
    count: int = 200,
    seed: int = 0,
) -> list[Combination]:
    """Exhaustive basis for effective complexes, otherwise random samples."""
    degs = list(degrees)
    if complex.effective:
        return [
            Combination.single(g) for n in degs for g in complex.basis(n)
        ]
    if complex.sampler is None:
        raise LocallyEffectiveError(
            f"{complex.origin}: no sampler available for validation"
        )
    rng = random.Random(seed)
    degs = [d for d in degs if d >= 1]
    per = max(1, count // max(1, len(degs)))
    return [
        Combination.single(complex.sampler(rng, n)) for n in degs for _ in range(per)
    ]


def validate_reduction(
    red: Reduction,
    top_samples: Sequence[Combination],
    bottom_samples: Optional[Sequence[Combination]] = None,
) -> ValidationReport:
    """Evaluate the five reduction identities (plus the chain-map conditions
    on f and g) on the given samples; violations are report content."""
    rep = ValidationReport()
    f, g, h = red.f, red.g, red.h
    dt, db = red.top.d, red.bottom.d

    def check(name: str, got: Combination, want: Combination, witness):
        rep.checks += 1
        diff = got.sub(want)
        if not diff.is_zero():
            rep.violations.append(Violation(name, witness, diff))

    for x in top_samples:
        lhs = g(f(x)).add(dt(h(x))).add(h(dt(x)))
        check("gf+dh+hd=1", lhs, x, x)
        check("fh=0", f(h(x)), Combination.zero(x.degree + 1), x)
        check("hh=0", h(h(x)), Combination.zero(x.degree + 2), x)
        check("fd=df", f(dt(x)), db(f(x)), x)
    if bottom_samples is None and red.bottom.effective:
        degrees = sorted({c.degree for c in top_samples})
        bottom_samples = [
            Combination.single(gen) for n in degrees for gen in red.bottom.basis(n)
        ]
    for y in bottom_samples or ():
        check("fg=1", f(g(y)), y, y)
        check("hg=0", h(g(y)), Combination.zero(y.degree + 1), y)
        check("gd=dg", g(db(y)), dt(g(y)), y)
    return rep


# -- perturbation lemmas --------------------------------------------------


def _series(step: Callable[[Combination], Combination], x: Combination, cap: int) -> Combination:
    """x + step(x) + step(step(x)) + ... with a nilpotency cap."""
    acc = x
    term = x
    for _ in range(cap):
        term = step(term)
        if term.is_zero():
            return acc
        acc = acc.add(term)
    raise SpectraError("perturbation series did not terminate (not locally nilpotent)")


def bpl_perturb(
    red: Reduction,
    delta: Morphism,
    cap: int = 64,
    top: Optional[ChainComplex] = None,
    bottom: Optional[ChainComplex] = None,
) -> Reduction:
    """Basic Perturbation Lemma.

    delta is a degree -1 perturbation of the top differential with h*delta
    locally nilpotent; the output reduction connects (top, d+delta) with
    (bottom, d + f delta phi g), phi the usual alternating series.
    """
    f, g, h = red.f, red.g, red.h

    def phi(x: Combination) -> Combination:
        return _series(lambda t: h(delta(t)).neg(), x, cap)

    def psi(x: Combination) -> Combination:
        return _series(lambda t: delta(h(t)).neg(), x, cap)

    def delta_bottom_rule(gen: Generator) -> Combination:
        return f(delta(phi(g(Combination.single(gen)))))

    delta_bottom = Morphism(red.bottom, red.bottom, -1, delta_bottom_rule, name="bpl-delta")
    new_top = top if top is not None else perturbed_complex(
        red.top, delta, origin=f"add({red.top.origin})"
    )
    new_bottom = bottom if bottom is not None else perturbed_complex(
        red.bottom, delta_bottom, origin=f"add({red.bottom.origin})"
    )
    new_f = Morphism(
        new_top, new_bottom, 0,
        lambda gen: f(psi(Combination.single(gen))), name=f"bpl({red.f.name})",
    )
    new_g = Morphism(
        new_bottom, new_top, 0,
        lambda gen: phi(g(Combination.single(gen))), name=f"bpl({red.g.name})",
    )
    new_h = Morphism(
        new_top, new_top, 1,
        lambda gen: phi(h(Combination.single(gen))), name=f"bpl({red.h.name})",
    )
    out = Reduction(new_top, new_bottom, new_f, new_g, new_h, name=f"bpl({red.name})")
    out.bottom_perturbation = delta_bottom
    return out


def epl_perturb(
    red: Reduction,
    delta_hat: Morphism,
    top: Optional[ChainComplex] = None,
    bottom: Optional[ChainComplex] = None,
) -> Reduction:
    """Easy Perturbation Lemma: a perturbation of the bottom differential
    lifts through g, f unchanged; the top picks up g delta_hat f."""
    f, g, h = red.f, red.g, red.h

    def top_delta_rule(gen: Generator) -> Combination:
        return g(delta_hat(f(Combination.single(gen))))

    top_delta = Morphism(red.top, red.top, -1, top_delta_rule, name="epl-delta")
    new_top = top if top is not None else perturbed_complex(
        red.top, top_delta, origin=f"add({red.top.origin})"
    )
    new_bottom = bottom if bottom is not None else perturbed_complex(
        red.bottom, delta_hat, origin=f"add({red.bottom.origin})"
    )
    out = Reduction(
        new_top, new_bottom,
        Morphism(new_top, new_bottom, 0, lambda gen: f.of_gen(gen), name=f.name),
        Morphism(new_bottom, new_top, 0, lambda gen: g.of_gen(gen), name=g.name),
        Morphism(new_top, new_top, 1, lambda gen: h.of_gen(gen), name=h.name),
        name=f"epl({red.name})",
    )
    out.bottom_perturbation = delta_hat
    return out


# -- structural constructions ----------------------------------------------


def tensor_reductions(
    r1: Reduction,
    r2: Reduction,
    top: Optional[ChainComplex] = None,
    bottom: Optional[ChainComplex] = None,
) -> Reduction:
    """Tensor of reductions with the contraction h1 (x) 1 + g1 f1 (x) h2."""
    new_top = top if top is not None else tensor_complex(r1.top, r2.top)
    new_bottom = bottom if bottom is not None else tensor_complex(r1.bottom, r2.bottom)
    f = tensor_morphisms(r1.f, r2.f, new_top, new_bottom)
    g = tensor_morphisms(r1.g, r2.g, new_bottom, new_top)
    h = morphism_sum(
        tensor_morphisms(r1.h, identity_morphism(r2.top), new_top, new_top),
        tensor_morphisms(
            morphism_compose(r1.g, r1.f), r2.h, new_top, new_top
        ),
    )
    h = Morphism(new_top, new_top, 1, h.of_gen, name="tnsr-h")
    return Reduction(new_top, new_bottom, f, g, h, name=f"({r1.name})(x)({r2.name})")


def compose_reductions(outer: Reduction, inner: Reduction) -> Reduction:
    """inner: D => C followed by outer: C => E gives D => E."""
    f = morphism_compose(outer.f, inner.f)
    f = Morphism(inner.top, outer.bottom, 0, f.of_gen, name=f"{outer.f.name}o{inner.f.name}")
    g = morphism_compose(inner.g, outer.g)
    g = Morphism(outer.bottom, inner.top, 0, g.of_gen, name=f"{inner.g.name}o{outer.g.name}")

    def h_rule(gen: Generator) -> Combination:
        x = Combination.single(gen)
        return inner.h(x).add(inner.g(outer.h(inner.f(x))))

    h = Morphism(inner.top, inner.top, 1, h_rule, name="cmps-h")
    return Reduction(inner.top, outer.bottom, f, g, h, name=f"{outer.name}o{inner.name}")


class Equivalence:
    """Strong chain equivalence: a span of two reductions with shared top."""

    def __init__(self, top: ChainComplex, left: Reduction, right: Reduction, name: str = ""):
        if left.top is not top or right.top is not top:
            raise ValueError("both reductions of an equivalence must share the top complex")
        self.top = top
        self.left = left
        self.right = right
        self.name = name
        self.sample_projector: Optional[Callable[[Combination], Combination]] = None

    @property
    def left_bottom(self) -> ChainComplex:
        return self.left.bottom

    @property
    def right_bottom(self) -> ChainComplex:
        return self.right.bottom

    def to_original(self, c: Combination) -> Combination:
        """Map a combination of the right bottom into the left bottom."""
        return self.left.f(self.right.g(c))


def identity_equivalence(c: ChainComplex) -> Equivalence:
    r = identity_reduction(c)
    return Equivalence(c, r, identity_reduction(c), name="identity")


def compose_equivalences(e1: Equivalence, e2: Equivalence) -> Equivalence:
    """Compose X <=> Y and Y <=> Z into X <=> Z.

    When one of the two facing reductions is an identity the composite is a
    plain composition of reductions; otherwise the top is the direct sum
    D1 (+) Ker f3 conjugated onto D2 (+) Ker f2.
    """
    if e1.right.bottom is not e2.left.bottom:
        raise ValueError("middle complexes do not match")
    if e2.left.is_identity:
        return Equivalence(
            e1.top, e1.left, compose_reductions(e2.right, e1.right),
            name=f"{e1.name}*{e2.name}",
        )
    if e1.right.is_identity:
        return Equivalence(
            e2.top, compose_reductions(e1.left, e2.left), e2.right,
            name=f"{e1.name}*{e2.name}",
        )
    return _compose_general(e1, e2)


def direct_sum_complex(c1: ChainComplex, c2: ChainComplex, origin: str = "") -> ChainComplex:
    """Tagged direct sum; locally effective is contagious."""

    def retag(comb: Combination, tag: str) -> Combination:
        return Combination(
            comb.degree,
            tuple((c, Generator(g.degree, (tag, g.key))) for c, g in comb.terms),
        )

    def diff(g: Generator) -> Combination:
        tag, key = g.key
        src = c1 if tag == "L" else c2
        return retag(src.d(Generator(g.degree, key)), tag)

    basis = None
    if c1.effective and c2.effective:

        def basis(n: int) -> list[Generator]:
            return [Generator(n, ("L", g.key)) for g in c1.basis(n)] + [
                Generator(n, ("R", g.key)) for g in c2.basis(n)
            ]

    return ChainComplex(basis, diff, origin=origin or f"({c1.origin})(+)({c2.origin})")


def _compose_general(e1: Equivalence, e2: Equivalence) -> Equivalence:
    d1, d2 = e1.top, e2.top
    amb = direct_sum_complex(d1, d2, origin=f"cmps({d1.origin},{d2.origin})")
    f2, g2 = e1.right.f, e1.right.g
    f3, g3, h3 = e2.left.f, e2.left.g, e2.left.h
    f1, g1, h1 = e1.left.f, e1.left.g, e1.left.h
    f4, g4, h4 = e2.right.f, e2.right.g, e2.right.h
    h2 = e1.right.h

    def split(x: Combination) -> tuple[Combination, Combination]:
        a = Combination(x.degree, tuple((c, Generator(g.degree, g.key[1])) for c, g in x.terms if g.key[0] == "L"))
        b = Combination(x.degree, tuple((c, Generator(g.degree, g.key[1])) for c, g in x.terms if g.key[0] == "R"))
        return a, b

    def join(a: Combination, b: Combination) -> Combination:
        terms = [(c, Generator(g.degree, ("L", g.key))) for c, g in a.terms]
        terms += [(c, Generator(g.degree, ("R", g.key))) for c, g in b.terms]
        return Combination.build(a.degree, terms)

    def theta(x: Combination) -> Combination:
        a, b = split(x)
        fa = f2(a)
        return join(a.sub(g2(fa)), g3(fa).add(b))

    def theta_inv(x: Combination) -> Combination:
        a, b = split(x)
        fb = f3(b)
        return join(g2(fb).add(a), b.sub(g3(fb)))

    def fl_rule(gen):
        a, _ = split(Combination.single(gen))
        return f1(a)

    def gl_rule(gen):
        x = Combination.single(gen)
        return join(g1(x), Combination.zero(x.degree))

    def hl_rule(gen):
        a, b = split(Combination.single(gen))
        return join(h1(a), h3(b))

    def fr_rule(gen):
        _, b = split(theta(Combination.single(gen)))
        return f4(b)

    def gr_rule(gen):
        x = Combination.single(gen)
        return theta_inv(join(Combination.zero(x.degree), g4(x)))

    def hr_rule(gen):
        a, b = split(theta(Combination.single(gen)))
        return theta_inv(join(h2(a), h4(b)))

    left = Reduction(
        amb, e1.left.bottom,
        Morphism(amb, e1.left.bottom, 0, fl_rule, name="cmps-fl"),
        Morphism(e1.left.bottom, amb, 0, gl_rule, name="cmps-gl"),
        Morphism(amb, amb, 1, hl_rule, name="cmps-hl"),
        name="cmps-left",
    )
    right = Reduction(
        amb, e2.right.bottom,
        Morphism(amb, e2.right.bottom, 0, fr_rule, name="cmps-fr"),
        Morphism(e2.right.bottom, amb, 0, gr_rule, name="cmps-gr"),
        Morphism(amb, amb, 1, hr_rule, name="cmps-hr"),
        name="cmps-right",
    )
    out = Equivalence(amb, left, right, name=f"{e1.name}*{e2.name}")

    def projector(x: Combination) -> Combination:
        # retract of the ambient sum onto D1 (+) Ker f3
        a, b = split(x)
        fb = f3(b)
        return join(a.add(g2(fb)), b.sub(g3(fb)))

    out.sample_projector = projector
    return out


@dataclass
class EffectiveHomology:
    """A complex tied to an effective complex by an equivalence."""

    space: ChainComplex
    equivalence: Equivalence

    def __post_init__(self):
        if not self.equivalence.right.bottom.effective:
            raise ValueError("the right bottom complex must be effective")

    @property
    def effective_complex(self) -> ChainComplex:
        """The paper calls this rbcc: right bottom chain complex."""
        return self.equivalence.right.bottom


def homology_via_effective(eh: EffectiveHomology, n: int) -> GroupPresentation:
    from .chains import homology

    return homology(eh.effective_complex, n)


def homotopy_order(
    h: Morphism,
    flin: Callable[[int, Generator], int],
    samples: Sequence[Combination],
) -> int:
    """Measured filtration shift of a homotopy operator: the maximum over
    the samples of (max filtration index in h(x)) - (filtration index of x).
    A lower bound for the true order; 0 when h vanishes on every sample."""
    best = None
    for x in samples:
        src = max(flin(x.degree, g) for _, g in x.terms) if x.terms else None
        img = h(x)
        if src is None or img.is_zero():
            continue
        shift = max(flin(img.degree, g) for _, g in img.terms) - src
        best = shift if best is None else max(best, shift)
    return best if best is not None else 0


# -- filtered equivalences and page transfer --------------------------------


class FilteredEquivalence:
    """An equivalence whose outer complexes carry filtrations, with a
    declared homotopy order t; pages transfer for r > t."""

    def __init__(
        self,
        equivalence: Equivalence,
        left_filtered: FilteredComplex,
        right_filtered: FilteredComplex,
        order: int = 0,
    ):
        self.equivalence = equivalence
        self.left_filtered = left_filtered
        self.right_filtered = right_filtered
        self.order = order
        left_filtered.equivalence = self

    def transfer_page(self, r: int, p: int, q: int) -> PageGroup:
        page = spectral.page_group(self.right_filtered, r, p, q)
        display = tuple(
            self.equivalence.to_original(c) for c in page.combinations
        )
        return PageGroup(
            r, p, q, page.presentation, page.ambient, page.combinations,
            display_combinations=display,
            guaranteed=r > self.order,
            origin=self.left_filtered.origin,
        )

    def transfer_differential(self, r: int, p: int, q: int, coords) -> list[int]:
        return spectral.page_differential(self.right_filtered, r, p, q, coords)


def transfer_page(fc: FilteredComplex, r: int, p: int, q: int) -> PageGroup:
    """Page of a locally effective filtered complex through its attached
    filtered equivalence; flagged when r <= t is not covered by the
    isomorphism theorem."""
    if fc.equivalence is None:
        raise SpectraError(f"{fc.origin}: no filtered equivalence attached")
    return fc.equivalence.transfer_page(r, p, q)
