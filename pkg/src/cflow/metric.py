"""C-flow metric family ds^2 = l1^(2z) dp^2 + l2^(2z) dq^2 + dz^2.

Arnold's cat-map metric is the member with ``lambda1 * lambda2 == 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

ARNOLD_TOL = 1e-12
BETA_TOL = 1e-12

Axis = Literal["p", "q"]


class CoordinatePair(NamedTuple):
    first: float
    second: float


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class CFlowMetric:
    """Stretch bases ``(lambda1, lambda2)`` along the p and q directions.

    Compression along an axis is expressed by a base in (0, 1), i.e. a
    negative exponent ``mu``.
    """

    lambda1: float
    lambda2: float

    def __post_init__(self):
        object.__setattr__(self, "lambda1", _check_positive("lambda1", self.lambda1))
        object.__setattr__(self, "lambda2", _check_positive("lambda2", self.lambda2))

    @property
    def mu1(self) -> float:
        return math.log(self.lambda1)

    @property
    def mu2(self) -> float:
        return math.log(self.lambda2)

    @property
    def is_arnold(self) -> bool:
        return abs(self.lambda1 * self.lambda2 - 1.0) <= ARNOLD_TOL

    @property
    def beta(self) -> float:
        return beta(self)


def new_cflow(lambda1: float, lambda2: float) -> CFlowMetric:
    return CFlowMetric(lambda1, lambda2)


def from_arnold(lam: float) -> CFlowMetric:
    """Arnold metric ``e^{-2 lam z} dp^2 + e^{2 lam z} dq^2 + dz^2``."""
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError(f"arnold lambda must be finite, got {lam!r}")
    return CFlowMetric(math.exp(-lam), math.exp(lam))


def mu(m: CFlowMetric, axis: Axis) -> float:
    if axis == "p":
        return m.mu1
    if axis == "q":
        return m.mu2
    raise ValueError(f"axis must be 'p' or 'q', got {axis!r}")


def scale_factors(m: CFlowMetric, z):
    """Orthonormal-frame scale factors ``(lambda1**z, lambda2**z, 1)``.

    ``z`` may be a scalar or an array; the third factor is returned with
    the same shape as the first two.
    """
    hp = m.lambda1 ** z
    hq = m.lambda2 ** z
    return hp, hq, hp * 0 + 1.0


def beta(m: CFlowMetric) -> float:
    """The constant ``l1 + l2 - 2 l1 l2``; zero marks a rejected configuration."""
    return m.lambda1 + m.lambda2 - 2.0 * m.lambda1 * m.lambda2


def map_determinant(m: CFlowMetric) -> float:
    """Determinant of the linear map (x, y) -> (p, q), equal to ``l1 - l2``."""
    return m.lambda1 * (1.0 - m.lambda2) - m.lambda2 * (1.0 - m.lambda1)


def xy_to_pq(m: CFlowMetric, xy) -> CoordinatePair:
    x, y = xy
    l1, l2 = m.lambda1, m.lambda2
    return CoordinatePair(l1 * x + (1.0 - l1) * y, l2 * x + (1.0 - l2) * y)


def pq_to_xy(m: CFlowMetric, pq) -> CoordinatePair:
    """Exact inverse of :func:`xy_to_pq`.

    Rejects ``|beta| <= 1e-12`` as well as a vanishing map determinant
    (``lambda1 == lambda2``), where the inverse does not exist.
    """
    b = beta(m)
    if abs(b) <= BETA_TOL:
        raise ValueError(f"coordinate map rejected: beta = {b!r}")
    det = map_determinant(m)
    if abs(det) <= BETA_TOL:
        raise ValueError(f"coordinate map is singular: determinant lambda1 - lambda2 = {det!r}")
    p, q = pq
    l1, l2 = m.lambda1, m.lambda2
    return CoordinatePair(((1.0 - l2) * p - (1.0 - l1) * q) / det, (l1 * q - l2 * p) / det)


def cat_eigenvalues() -> tuple[float, float]:
    """Eigenvalues of the cat map [[2, 1], [1, 1]], largest first."""
    s5 = math.sqrt(5.0)
    return (3.0 + s5) / 2.0, (3.0 - s5) / 2.0
