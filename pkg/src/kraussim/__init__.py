"""Single-qubit channel simulation via signed time-partition decompositions.

Channels on one photon of an entangled pair are decomposed into signed
mixtures of unit-form operators, compiled to wave-plate and polarizer
sequences, and reproduced from simulated coincidence counting with the
weights realized purely as acquisition-time fractions.
"""

__version__ = "1.0.0"

from .channels import (
    KrausChannel,
    amplitude_damping,
    canonical_form,
    depolarizing,
    fujiwara_algoet_check,
    generalized_amplitude_damping,
    to_affine,
    trig_channel,
)
from .decomposition import (
    SignedDecomposition,
    apply_signed,
    dp_decomposition,
    gad_decomposition,
    to_partition,
)
from .experiment import (
    SourceModel,
    dynamics_sweep,
    reconstruct_linear,
    reconstruct_mle,
    run_protocol,
    sweep_to_csv,
    tomography_settings,
)
from .states import bell_state, concurrence, fidelity, purity, werner_state

__all__ = [
    "__version__",
    "KrausChannel",
    "SignedDecomposition",
    "SourceModel",
    "amplitude_damping",
    "apply_signed",
    "bell_state",
    "canonical_form",
    "concurrence",
    "depolarizing",
    "dp_decomposition",
    "dynamics_sweep",
    "fidelity",
    "fujiwara_algoet_check",
    "gad_decomposition",
    "generalized_amplitude_damping",
    "purity",
    "reconstruct_linear",
    "reconstruct_mle",
    "run_protocol",
    "sweep_to_csv",
    "to_affine",
    "to_partition",
    "tomography_settings",
    "trig_channel",
    "werner_state",
]
