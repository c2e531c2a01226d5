"""Kinematic dynamo simulation and curvature analysis for C-flow metrics."""
from .metric import (
    CFlowMetric,
    CoordinatePair,
    beta,
    cat_eigenvalues,
    from_arnold,
    mu,
    new_cflow,
    pq_to_xy,
    scale_factors,
    xy_to_pq,
)
from .frame_ops import FrameField, GridSpec, ScalarField
from .induction import InitialCondition, Mode, SimConfig, SimRecord, simulate

__version__ = "0.1.0"
