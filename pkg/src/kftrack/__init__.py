"""Linear Kalman filtering, ToA trilateration and a tracking simulator."""

from .errors import (
    DomainError,
    KFError,
    NonFiniteError,
    ShapeError,
    SimulationError,
    SingularMatrixError,
)
from .gaussian import (
    GaussianParams,
    LikelihoodResult,
    gauss_pdf,
    gauss_pdf_batch,
    gauss_pdf_many_means,
    sample_gaussian,
)
from .kf import GaussianState, StateSpaceModel, UpdateDiagnostics, kf_predict, kf_step, kf_update
from .localize import Anchor, ToaObservation, fix_position, toa_to_range, trilaterate
from .rng import SeededRng

__version__ = "0.1.0"
