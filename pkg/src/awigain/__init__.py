"""Inversionless gain of polarized light in molecules aligned by a control field."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AWIError,
    DecoupledUpperStateError,
    EnvelopeError,
    InvalidArgument,
    MoleculeFileError,
    NoRootError,
    QuadratureError,
    ResonanceError,
    SweepEvaluationError,
)
from .gain import (  # noqa: E402
    GainResult,
    GainScenario,
    ProbeGeometry,
    TransitionSpec,
    decoupled_limit,
    gain_general,
    gain_numeric,
    gain_parallel,
    gain_perpendicular,
    propagate_intensity,
    sigma0_from_transition,
    transition_probability,
)
from .orientation import (  # noqa: E402
    AlignmentParams,
    OrientationAngle,
    interaction_energy,
    langevin,
    mean_cos2_axis,
    orientation_pdf,
)
