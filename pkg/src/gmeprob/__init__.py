"""A-priori detection probabilities of genuine multipartite entanglement.

Evaluate the element-based criteria Q_0 and Q_m on multi-qubit density
matrices and estimate, by sampling Haar-random local unitaries, how often a
randomly chosen local measurement basis lets them certify GME.

>>> from gmeprob import make_ghz, projector, eval_q0
>>> round(eval_q0(projector(make_ghz(3))).value, 12)
0.5
"""

from .criteria import (
    COMPUTATIONAL,
    DETECTION_THRESHOLD,
    HADAMARD_BASIS,
    Basis,
    Criterion,
    CriterionResult,
    DetectorConfig,
    eval_detector,
    eval_q0,
    eval_qm,
    full_detector,
    required_elements,
)
from .estimator import (
    ProbabilityEstimate,
    SweepResult,
    estimate_probability,
    sweep_noise,
    wilson_interval,
)
from .exceptions import (
    CapabilityError,
    HermiticityError,
    PositivityError,
    StateParseError,
    StateValidationError,
    TraceError,
)
from .haar import GroupMode, SampleStream, UnitaryGroup, sample_group, sample_su2
from .oracle import oracle_q0, oracle_qm
from .states import (
    NoiseFamily,
    apply_local_unitary,
    load_density_matrix,
    make_dicke,
    make_ghz,
    make_w,
    projector,
    realize,
)

__all__ = [
    "COMPUTATIONAL", "DETECTION_THRESHOLD", "HADAMARD_BASIS", "Basis", "CapabilityError",
    "Criterion", "CriterionResult", "DetectorConfig", "GroupMode", "HermiticityError",
    "NoiseFamily", "PositivityError", "ProbabilityEstimate", "SampleStream",
    "StateParseError", "StateValidationError", "SweepResult", "TraceError", "UnitaryGroup",
    "apply_local_unitary", "estimate_probability", "eval_detector", "eval_q0", "eval_qm",
    "full_detector", "load_density_matrix", "make_dicke", "make_ghz", "make_w",
    "oracle_q0", "oracle_qm", "projector", "realize", "required_elements",
    "sample_group", "sample_su2", "sweep_noise", "wilson_interval",
]
