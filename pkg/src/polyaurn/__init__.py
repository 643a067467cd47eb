"""Generalized Polya urns as a commutative semiring.

Urns compose by disjoint union and product; taking intensity matrices turns
those into direct sums and Kronecker sums of matrices up to permutation
similarity, and taking spectra turns the latter into unions and Minkowski
sums of complex multisets. The package implements the composition algebra
exactly (rational arithmetic), checks the morphism and semiring laws, and
validates the asymptotic consequences (dominance structure, eigenvalue
assumptions, the product limit vector) by seeded Monte Carlo simulation.
"""

from .urn import (
    PolyaUrn,
    ReplacementMeasure,
    dirac,
    expected_replacement,
    load_urn,
    make_urn,
    save_urn,
    scalar_urn,
    second_moment_matrix,
    unit_urn,
    urn_from_json,
    urn_to_json,
    zero_urn,
)
from .algebra import (
    check_semiring_laws,
    disjoint_union,
    is_strict_isomorphism,
    product,
    pushforward,
    relabel,
    strict_isomorphic,
)
from .intensity import (
    check_matrix_semiring_laws,
    direct_sum,
    intensity_matrix,
    kronecker_product,
    kronecker_sum,
    matrix_power_identity,
    permutation_similar,
    product_intensity_entry,
    vector_boxplus,
    verify_phi_morphism,
)
from .spectra import (
    SpectrumMultiset,
    minkowski_sum,
    multiset_approx_equal,
    multiset_union,
    spectrum,
    verify_sigma_morphism,
)
from .analysis import (
    AssumptionReport,
    DominancePartition,
    LimitPrediction,
    aggregate_B,
    check_assumption_preservation,
    check_assumptions,
    dominance_partition,
    largest_real_eigenvalue,
    limit_prediction,
    product_B_identities,
    product_partition_check,
)
from .simulate import (
    SimulationTrace,
    UrnState,
    available_kernels,
    default_kernel,
    initial_state,
    normalized_composition,
    run,
    run_replicas,
    slowed_embedding,
    step,
    write_trace,
)
from .graphs import (
    SimpleGraph,
    cartesian_product,
    complete_graph,
    cycle_graph,
    path_graph,
    star_graph,
    verify_walk_product,
    walk_urn,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
