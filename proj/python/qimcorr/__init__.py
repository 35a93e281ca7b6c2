"""Multiphoton correlations between entangled quantum images."""

from qimcorr._core import (
    DefocusParams,
    MapSpec,
    QubitApproximation,
    SourceParams,
    TwoQubitState,
    analytic_map,
    derive_defocus,
    joint_probability,
    p2,
    p2n,
    p2n_term_count,
    p4,
    permanent,
    permanent_reference,
    phi_defocused_momentum,
    phi_defocused_position,
    phi_far,
    phi_near,
    qubit_approximation,
    qubit_overlap,
    slm_order_coefficient,
    stochastic_g4,
    swap_tomography,
)

__all__ = [
    "DefocusParams",
    "MapSpec",
    "QubitApproximation",
    "SourceParams",
    "TwoQubitState",
    "analytic_map",
    "derive_defocus",
    "joint_probability",
    "p2",
    "p2n",
    "p2n_term_count",
    "p4",
    "permanent",
    "permanent_reference",
    "phi_defocused_momentum",
    "phi_defocused_position",
    "phi_far",
    "phi_near",
    "qubit_approximation",
    "qubit_overlap",
    "slm_order_coefficient",
    "stochastic_g4",
    "swap_tomography",
]
