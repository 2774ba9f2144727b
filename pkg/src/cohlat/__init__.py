"""cohlat: exact mod-2^k cohomology of finite 2-groups and lattice obstructions."""

from cohlat.cohomology import (GroupCohomology, bar_cohomology_invariants,
                               default_modulus_exp)
from cohlat.criterion import (CriterionConfig, CriterionReport,
                              evaluate_criterion)
from cohlat.errors import (BudgetExceeded, CohlatError, IncompatibleOperands,
                           InternalInvariant, ValidationError)
from cohlat.groups import (FiniteGroup, Subgroup, builtin_group, load_group,
                           subgroup_classes)
from cohlat.lattices import (GLattice, alpha_image, build_mnq, builtin_lattice,
                             coflasque_resolution, h1_integral,
                             lambda2_regular_decomposition, lattice_from_json,
                             phi)
from cohlat.resolution import minimal_resolution

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "CohlatError", "CriterionConfig", "CriterionReport",
    "FiniteGroup", "GLattice", "GroupCohomology", "IncompatibleOperands",
    "InternalInvariant", "Subgroup", "ValidationError", "alpha_image",
    "bar_cohomology_invariants", "build_mnq", "builtin_group",
    "builtin_lattice", "coflasque_resolution", "default_modulus_exp",
    "evaluate_criterion", "h1_integral", "lambda2_regular_decomposition",
    "lattice_from_json", "load_group", "minimal_resolution", "phi",
    "subgroup_classes", "__version__",
]
