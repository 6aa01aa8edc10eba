"""Workbench for edge-spreading Raptor-like spatially-coupled LDPC codes."""

from esrl.profile import (
    CodeProfile,
    CoupledCode,
    ProfileError,
    code_rate,
    expand_coupled,
    lift_expand,
    load_profile,
    prune,
    save_profile,
    split_submatrices,
    validate,
)

__version__ = "0.1.0"
