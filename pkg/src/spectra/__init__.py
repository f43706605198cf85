"""Exact-arithmetic spectral sequences of filtered chain complexes."""

from .lattice import (
    GroupPresentation,
    IntMatrix,
    SmithDecomposition,
    kernel_basis,
    smith_normal_form,
    solve_in_lattice,
    subquotient,
)
from .chains import (
    ChainComplex,
    Combination,
    Generator,
    Morphism,
    apply_morphism,
    cmbn_add,
    homology,
    tensor_complex,
)
from .simplicial import (
    AbstractSimplex,
    SimplicialSet,
    TwistingOperator,
    chains_of,
    circle_reduction,
    ez_reduction,
    fibration_total,
    k_z_1,
    k_z2_1,
    serre_filtration_tensor,
    serre_filtration_total,
    sphere,
)
from .effective import (
    EffectiveHomology,
    Equivalence,
    FilteredEquivalence,
    Reduction,
    bpl_perturb,
    compose_equivalences,
    epl_perturb,
    homology_via_effective,
    homotopy_order,
    tensor_reductions,
    transfer_page,
    validate_reduction,
)
from .spectral import (
    ConvergenceReport,
    FilteredComplex,
    PageGroup,
    convergence_level,
    e_infinity_check,
    fltr_dffr_matrix,
    fltrd_basis,
    make_filtered,
    page_basis_divisors,
    page_differential,
    page_group,
)
from .scenarios import Scenario, build_scenario, kz1_effective_homology

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
