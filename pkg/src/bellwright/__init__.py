"""Executable separate-common-cause derivation of the Wigner-Bell inequality."""

from .core import (
    FiniteProbabilitySpace,
    Variable,
    cond_prob,
    correlated,
    ev,
    prob,
    screens_off,
)
from .derivation import bell_check, reduce_to_binary, run_derivation
from .feasibility import encode, solve, verify_certificate
from .models import (
    HiddenVariableModel,
    SettingPolicy,
    TargetStatistics,
    check_ex_nowm,
    check_no_cons,
    model_to_space,
    predicted_conditionals,
)
from .quantum import DirectionConfig, joint_prob, marginal_prob, quantum_targets
from .simulate import RunConfig, empirical_bell, empirical_no_cons, estimate, run

__version__ = "0.1.0"
