"""
S-ring Toolkit Configuration Module

Contains the size bounds, search budgets and sampler defaults shared by all
engine modules, plus the RunConfig carried by one CLI invocation.
"""

from dataclasses import dataclass, field
from typing import Optional

# Group bounds
MAX_GROUP_ORDER = 256          # all_subgroups / automorphism_group
MAX_AUT_CANDIDATES = 2_000_000  # generator-image tuples tried for Aut(H)

# Permutation-group bounds
MAX_SCHEME_DEGREE = 64         # aut_scheme
MAX_CI_ORDER = 64              # babai_ci_check, verify-theorem (p^3 q)
MAX_CI_SRING_ORDER = 24        # ci_sring_check
DIRECT_ISO_ORDER = 8           # Iso_1 identity checked elementwise up to here
MAX_ISO_SEARCH_ORDER = 16      # iso1_search
BRUTE_ISO_ORDER = 8            # iso1_search scans all normalized bijections
MAX_PRECEQ_DEGREE = 24         # preceq_check / minimality_reduce
PRECEQ_GROUP_BOUND = 50_000    # |Y| for which regular subgroups are listed

# Babai check strategy
DIRECT_REGULAR_BOUND = 5000    # |G| up to which regular subgroups are listed
STAB_ENUM_BOUND = 20_000       # |G_1| up to which conjugate_into enumerates
BRUTE_CONFIRM_ORDER = 8        # refusals re-confirmed by a full scan of G
MAX_CONJUGATOR_ROWS = 64       # conjugator rows written to verdict JSON

# Search budgets
SEARCH_NODE_BUDGET = 5_000_000  # backtracking nodes before giving up

# Enumeration
MAX_ENUM_ORDER = 27            # enumerate_srings hard bound
GATED_ENUM_ORDER = 16          # above this, allow_large must be set

# Sampler
SAMPLE_COLORS = (1, 4)         # connection sets per sample (inclusive)
DEFAULT_SAMPLES = 200
DEFAULT_SEED = 0


@dataclass
class RunConfig:
    """One CLI invocation: command, workload and bounds."""
    command: str = ""
    group: Optional[str] = None
    file: Optional[str] = None
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    max_order: int = MAX_CI_ORDER
    out: Optional[str] = None
    format: str = "json"  # "json" or "text"
    workers: int = 1
    p: Optional[int] = None
    q: Optional[int] = None
    undirected: bool = False
    allow_large: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """
        Build a RunConfig from an argparse namespace.

        Missing attributes fall back to the dataclass defaults, so every
        subcommand can share this constructor.
        """
        kwargs = {}
        for name in cls.__dataclass_fields__:
            if name == 'extra':
                continue
            value = getattr(args, name, None)
            if value is not None:
                kwargs[name] = value
        return cls(**kwargs)
