"""Uniform point arrangements on the hypersphere and angular-diversity regularization."""
from .core import (
    TammesError,
    TooFewPoints,
    ZeroNormRow,
    angle_matrix,
    cosine_matrix,
    min_angle_deg,
    min_angle_of,
    min_pairwise_angle,
    normalize_rows,
    row_min_angles,
)
from .losses import (
    COSINE,
    LOG,
    MMA,
    LossEval,
    LossKind,
    cosine_loss_grad,
    log_loss_grad,
    mma_loss_grad,
    mma_regularization,
    orthogonal_loss_grad,
    riesz_fisher,
    riesz_fisher_loss_grad,
)

__version__ = "0.1.0"
