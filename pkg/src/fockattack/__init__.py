"""Post-selective attack on phase-encoded coherent-state QKD via multi-mode Fock projection."""

__version__ = "0.1.0"

from .attack import (  # noqa: E402
    AttackPoint,
    Branch,
    Mode,
    Region,
    RegionReport,
    SplitPlan,
    attack_information,
    classify_region,
    critical_mu,
    information,
    iso_info_boundary,
    limit_ratio_check,
    solve_split,
    top_boundary,
    verify_rate_condition,
)
from .fock import binary_entropy, coherent_amplitude, coherent_fock_vector, poisson_pmf  # noqa: E402
from .infocalc import (  # noqa: E402
    GramMatrix,
    gram_feasible,
    gram_max_success,
    holevo_eigen_oracle,
    holevo_from_overlap,
    holevo_full,
    holevo_per_n,
)
