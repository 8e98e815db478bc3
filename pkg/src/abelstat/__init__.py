"""Natural, lacunary and Abel densities; statistical convergence; continuity probes."""

__version__ = "0.1.0"

from abelstat.convergence import (  # noqa: E402
    ConvergenceOptions,
    IntervalSpec,
    classify,
    closure_witness_check,
    compactness_verdict,
    estimate_limit,
    noncompactness_witness,
    verify_limit,
)
from abelstat.density import (  # noqa: E402
    abel_density,
    abel_partial,
    lacunary_density,
    natural_density,
    natural_density_partial,
    validate_lacunary,
)
from abelstat.index_sets import contains, exact_density, exceedance_set  # noqa: E402
from abelstat.sequences import enumerate_selector, evaluate, make_perturbed  # noqa: E402

__all__ = [
    "ConvergenceOptions",
    "IntervalSpec",
    "abel_density",
    "abel_partial",
    "classify",
    "closure_witness_check",
    "compactness_verdict",
    "contains",
    "enumerate_selector",
    "estimate_limit",
    "evaluate",
    "exact_density",
    "exceedance_set",
    "lacunary_density",
    "make_perturbed",
    "natural_density",
    "natural_density_partial",
    "noncompactness_witness",
    "validate_lacunary",
    "verify_limit",
]
