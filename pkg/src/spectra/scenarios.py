"""The worked fibration scenarios and their effective-homology pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .chains import ChainComplex, Combination, Generator, Morphism, tensor_complex
from .effective import (
    EffectiveHomology,
    Equivalence,
    FilteredEquivalence,
    bpl_perturb,
    identity_reduction,
    tensor_reductions,
    compose_equivalences,
)
from .errors import UnknownScenarioError
from .simplicial import (
    TwistingOperator,
    cartesian_product,
    chains_of,
    circle_reduction,
    ez_reduction,
    fibration_total,
    k_z_1,
    k_z2_1,
    nondeg,
    serre_filtration_tensor,
    serre_filtration_total,
    sphere,
)
from .spectral import FilteredComplex, make_filtered


@dataclass
class Scenario:
    """A filtered complex ready for the spectral engine, plus the filtered
    equivalence when the complex is only locally effective."""

    name: str
    description: str
    filtered: FilteredComplex
    equivalence: Optional[FilteredEquivalence]
    effective_path: bool

    @property
    def complex(self) -> ChainComplex:
        return self.filtered.complex


def _twisted_sphere_bundle(twist: int) -> Scenario:
    """S^2 x_tau K(Z,1) with tau(s2) = [twist], through the full pipeline:
    Eilenberg-Zilber, BPL with the twist perturbation, tensor with the
    circle reduction, BPL again, and composition of the two equivalences."""
    base = sphere(2)
    fiber = k_z_1()
    tau = TwistingOperator(
        base, fiber, lambda n, core: nondeg((twist,)), name=f"tau{twist}"
    )
    total = fibration_total(tau)
    twisted_chains = chains_of(total)

    product = cartesian_product(base, fiber)
    cb, cf = chains_of(base), chains_of(fiber)
    tensor = tensor_complex(cb, cf)
    ez = ez_reduction(base, fiber, product=product, tensor=tensor)

    def twist_delta(g: Generator) -> Combination:
        return twisted_chains.d(g).sub(ez.top.d(g))

    delta = Morphism(ez.top, ez.top, -1, twist_delta, name="twist")
    red1 = bpl_perturb(ez, delta, top=twisted_chains)
    eq1 = Equivalence(twisted_chains, identity_reduction(twisted_chains), red1)

    rho2 = tensor_reductions(
        identity_reduction(cb), circle_reduction(cf), top=tensor
    )
    twisted_tensor = red1.bottom
    red2 = bpl_perturb(rho2, red1.bottom_perturbation, top=twisted_tensor)
    eq2 = Equivalence(twisted_tensor, identity_reduction(twisted_tensor), red2)

    eq = compose_equivalences(eq1, eq2)
    left = make_filtered(
        twisted_chains,
        serre_filtration_total,
        origin=f"filtered({total.name})",
        bounds=lambda n: (-1, n),
        check_degrees=range(1, 5),
        sample_count=24,
    )
    right = make_filtered(
        red2.bottom,
        serre_filtration_tensor,
        origin=f"filtered({red2.bottom.origin})",
        check_degrees=range(0, 5),
    )
    feq = FilteredEquivalence(eq, left, right, order=0)
    return Scenario(
        name="",
        description="",
        filtered=left,
        equivalence=feq,
        effective_path=False,
    )


def _build_hopf() -> Scenario:
    s = _twisted_sphere_bundle(1)
    s.name = "hopf"
    s.description = "S^2 x_tau K(Z,1), tau(s2)=[1]: Hopf fibration, total space S^3"
    return s


def _build_p3r() -> Scenario:
    s = _twisted_sphere_bundle(2)
    s.name = "p3r"
    s.description = "S^2 x_tau K(Z,1), tau(s2)=[2]: total space P^3(R)"
    return s


def _build_s2_kz2() -> Scenario:
    base = sphere(2)
    fiber = k_z2_1()
    tau = TwistingOperator(base, fiber, lambda n, core: nondeg(1), name="tau2")
    total = fibration_total(tau)
    filtered = make_filtered(
        chains_of(total),
        serre_filtration_total,
        origin=f"filtered({total.name})",
        check_degrees=range(0, 7),
    )
    return Scenario(
        name="s2-kz2",
        description="S^2 x_tau K(Z_2,1), tau(s2)=[1]: effective, direct computation",
        filtered=filtered,
        equivalence=None,
        effective_path=True,
    )


_BUILDERS = {
    "hopf": _build_hopf,
    "p3r": _build_p3r,
    "s2-kz2": _build_s2_kz2,
}

SCENARIO_NAMES = tuple(sorted(_BUILDERS))


@lru_cache(maxsize=None)
def build_scenario(name: str) -> Scenario:
    builder = _BUILDERS.get(name)
    if builder is None:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}"
        )
    return builder()


def scenario_descriptions() -> list[tuple[str, str, bool]]:
    return [
        (name, build_scenario(name).description, build_scenario(name).effective_path)
        for name in SCENARIO_NAMES
    ]


@lru_cache(maxsize=None)
def kz1_effective_homology() -> EffectiveHomology:
    """K(Z,1) with its circle reduction, as an object with effective homology."""
    top = chains_of(k_z_1())
    red = circle_reduction(top)
    return EffectiveHomology(
        space=top,
        equivalence=Equivalence(top, identity_reduction(top), red, name="efhm-kz1"),
    )
