"""Hitting times, limit laws, starvation and mixing on hard-core random-access networks.

Branch and level indices are 0-based branches with levels 1..L; level 0 is
the empty state. Config files passed to run_command use 1-based branches.
"""

from ._hcnet import (
    HcnetError,
    LimitLaw,
    Network,
    __version__,
    branch_conductance,
    classify,
    command_names,
    escape_spectrum,
    exact_mean_transition,
    mean_hitting,
    mixing_lower_bound,
    run_command,
    sample_transition,
    t_mix_exact,
    tv_distance,
)

__all__ = [
    "HcnetError",
    "LimitLaw",
    "Network",
    "__version__",
    "branch_conductance",
    "classify",
    "command_names",
    "escape_spectrum",
    "exact_mean_transition",
    "mean_hitting",
    "mixing_lower_bound",
    "run_command",
    "sample_transition",
    "t_mix_exact",
    "tv_distance",
]
