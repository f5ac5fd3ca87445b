"""Counting Galois cohomology classes over Q with cyclic coefficients.

Exact local cohomology at every place, Frobenian families of local
conditions, character enumeration under admissible orderings, the
Poisson-summation identity between direct counts and dual Euler products,
the Greenberg-Wiles box identity, and desk-scale asymptotic verification.
"""

from .cyclotomic import CyclotomicScalar, UnitRootExponent
from .groups import (
    FiniteAbelianGroup,
    annihilator,
    character_pairing,
    divisions,
    mobius_divisor_lattice,
    subgroup_closure,
)
from .localfields import (
    OO,
    LocalClass,
    LocalKummerClass,
    conductor_exponent,
    local_group,
    local_tate_pair,
    restrict_rational,
)
from .orderings import (
    OrderingSpec,
    custom_ordering,
    disc_ordering,
    inv_exponent,
    is_constant_on_divisions,
    radical_ordering,
)
from .families import (
    ConditionFamily,
    FrobenianRule,
    a_invariant,
    b_invariant,
    box_family,
    classify_family,
    example_d1mod4_family,
    family_slice,
    full_family,
    membership,
    minimal_inertia_subgroup,
    unramified_family,
)
from .characters import (
    GlobalCharacter,
    GlobalKummerClass,
    enumerate_characters,
    is_surjective,
    reciprocity_defect,
    restrict_character,
    surjective_count,
)
from .euler import CoefficientSeries, EulerProductSpec, FrobenianPolyMap, evaluate, expand, singularity
from .poisson import (
    PoissonReport,
    dual_series,
    dual_support,
    greenberg_wiles_check,
    local_fourier,
    mb_main_term,
    poisson_check,
)
from .asymptotics import (
    CountSample,
    counting_function,
    fit_power_log,
    geometric_grid,
    surjective_proportion,
)

__version__ = "0.1.0"
