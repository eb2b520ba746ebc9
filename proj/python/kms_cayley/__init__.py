"""KMS states on Cayley graphs: critical temperatures, Q(beta), cone fans and N-infinity."""

from ._core import (
    ConvergenceError,
    DomainError,
    Group,
    HMap,
    InputError,
    KmsError,
    UnsupportedError,
    associated_limit,
    beta_of_u,
    builtin_groups,
    critical_beta,
    fan,
    harmonic_residual,
    kms_check,
    kms_eval,
    ninf,
    radial_root,
    ray_limit,
    sample_q_beta,
    sphere_grid,
    u_of_beta,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "Group",
    "HMap",
    "InputError",
    "KmsError",
    "UnsupportedError",
    "associated_limit",
    "beta_of_u",
    "builtin_groups",
    "critical_beta",
    "fan",
    "harmonic_residual",
    "kms_check",
    "kms_eval",
    "ninf",
    "radial_root",
    "ray_limit",
    "sample_q_beta",
    "sphere_grid",
    "u_of_beta",
]
