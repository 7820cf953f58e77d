"""Exact arithmetic of reduced residues in short windows: relative gcd
decompositions, solution counting for rational linear equations with
coprimality constraints, window-count moments, singular series, and the
set-partition identities tying the routes together."""

from .arith import (
    BigRational,
    BudgetError,
    PrecisionBreach,
    factorize,
    is_prime,
    is_squarefree,
    mobius,
    primes_up_to,
    primorial,
    reduce_fraction,
    totient,
)
from .fracsolve import (
    BoxConstraint,
    CountReport,
    IntervalConstraint,
    NumeratorSetConstraint,
    classify_degenerate,
    count_box,
    count_interval,
    count_numerator_sets,
    fractions_in_box,
    fractions_in_interval,
    iter_solutions,
    reference_bounds,
)
from .moments import (
    E_kernel,
    F_kernel,
    M_direct,
    M_mixed_direct,
    V_expsum,
    V_mixed_expsum,
    V_via_singular,
    check_MV_identity,
    check_mixed_MV_identity,
    check_r_sum_bound,
    check_smooth_rough_decomposition,
)
from .partitions import (
    IntPolynomial,
    SetPartition,
    check_Rk_partition_identity,
    check_partition_lemma,
    enumerate_partitions,
    f_poly,
    main_term_table,
    P_poly,
    w_weight,
    w_weight_bruteforce,
)
from .relgcd import (
    RelGcdDecomposition,
    check_cross_coprimality,
    check_squarefree_pairwise,
    decompose_local,
    decompose_recursive,
    recompose,
)
from .singular import (
    R_mod_q,
    S0_mod_q,
    S_infinite,
    S_mod_q,
    check_repeated_elements,
    check_S0_expansion,
    gallagher_ratio,
    sum_S0_over_tuples,
)

__version__ = "0.1.0"

__all__ = [
    "BigRational",
    "BoxConstraint",
    "BudgetError",
    "CountReport",
    "E_kernel",
    "F_kernel",
    "IntervalConstraint",
    "IntPolynomial",
    "M_direct",
    "M_mixed_direct",
    "NumeratorSetConstraint",
    "PrecisionBreach",
    "P_poly",
    "R_mod_q",
    "RelGcdDecomposition",
    "S0_mod_q",
    "S_infinite",
    "S_mod_q",
    "SetPartition",
    "V_expsum",
    "V_mixed_expsum",
    "V_via_singular",
    "check_MV_identity",
    "check_Rk_partition_identity",
    "check_S0_expansion",
    "check_cross_coprimality",
    "check_mixed_MV_identity",
    "check_partition_lemma",
    "check_r_sum_bound",
    "check_repeated_elements",
    "check_smooth_rough_decomposition",
    "check_squarefree_pairwise",
    "classify_degenerate",
    "count_box",
    "count_interval",
    "count_numerator_sets",
    "decompose_local",
    "decompose_recursive",
    "enumerate_partitions",
    "f_poly",
    "factorize",
    "fractions_in_box",
    "fractions_in_interval",
    "gallagher_ratio",
    "is_prime",
    "is_squarefree",
    "iter_solutions",
    "main_term_table",
    "mobius",
    "primes_up_to",
    "primorial",
    "recompose",
    "reduce_fraction",
    "reference_bounds",
    "sum_S0_over_tuples",
    "totient",
    "w_weight",
    "w_weight_bruteforce",
    "__version__",
]
