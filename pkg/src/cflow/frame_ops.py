"""Fields and orthonormal-frame differential operators on the periodic (p, q, z) grid.

Derivatives are Fourier-spectral along p and q and centered finite
differences along z. Metric coefficients ``lambda**(-z)`` are evaluated on
the nodes and applied after differentiation; fields wrap periodically in z
while the coefficients do not, so operators that differentiate a
coefficient-weighted quantity (nested operators such as the vector
Laplacian) carry an O(1) error on the few nodes next to the z = 0 seam.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import CFlowMetric

# centered first-derivative weights for offsets 1..s (antisymmetric)
FD_WEIGHTS = {
    2: (1 / 2,),
    4: (2 / 3, -1 / 12),
    6: (3 / 4, -3 / 20, 1 / 60),
}
COMPONENTS = ("p", "q", "z")


@dataclass(frozen=True)
class GridSpec:
    n_p: int
    n_q: int
    n_z: int

    def __post_init__(self):
        for name in ("n_p", "n_q", "n_z"):
            n = getattr(self, name)
            if int(n) != n or n < 4:
                raise ValueError(f"{name} must be an integer >= 4, got {n!r}")
            object.__setattr__(self, name, int(n))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_p, self.n_q, self.n_z)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (1.0 / self.n_p, 1.0 / self.n_q, 1.0 / self.n_z)

    @property
    def h_z(self) -> float:
        return 1.0 / self.n_z

    def axes(self):
        """1-D node coordinates on [0, 1) for p, q, z."""
        return tuple(np.arange(n) / n for n in self.shape)

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def z_column(self) -> np.ndarray:
        """z nodes shaped to broadcast against field arrays."""
        return self.axes()[2][None, None, :]

    def cell_volume(self) -> float:
        hp, hq, hz = self.spacing
        return hp * hq * hz


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: GridSpec, c: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(c)))

    def __add__(self, other):
        return ScalarField(self.grid, self.values + _values(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - _values(other))

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FrameField:
    """Components (B_p, B_q, B_z) on the orthonormal frame (e_p, e_q, e_z).

    ``values`` has shape ``(3, n_p, n_q, n_z)``.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (3,) + self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match (3,) + {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("frame field contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_components(cls, bp: ScalarField, bq: ScalarField, bz: ScalarField) -> "FrameField":
        if not (bp.grid == bq.grid == bz.grid):
            raise ValueError("components live on different grids")
        return cls(bp.grid, np.stack([bp.values, bq.values, bz.values]))

    @classmethod
    def basis(cls, grid: GridSpec, axis: str) -> "FrameField":
        """The unit frame vector e_p, e_q or e_z."""
        v = np.zeros((3,) + grid.shape)
        v[COMPONENTS.index(axis)] = 1.0
        return cls(grid, v)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "FrameField":
        return cls(grid, np.zeros((3,) + grid.shape))

    def component(self, axis: str) -> ScalarField:
        return ScalarField(self.grid, self.values[COMPONENTS.index(axis)])

    @property
    def bp(self) -> ScalarField:
        return self.component("p")

    @property
    def bq(self) -> ScalarField:
        return self.component("q")

    @property
    def bz(self) -> ScalarField:
        return self.component("z")

    def __add__(self, other):
        return FrameField(self.grid, self.values + _values(other))

    def __sub__(self, other):
        return FrameField(self.grid, self.values - _values(other))

    def __mul__(self, c):
        return FrameField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return FrameField(self.grid, -self.values)


def _values(x):
    return x.values if isinstance(x, (ScalarField, FrameField)) else x


# -- derivative kernels on raw arrays -------------------------------------------------


def spectral_derivative(a: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
    """Fourier derivative along a periodic unit-length axis.

    The Nyquist coefficient is dropped so that repeated first derivatives
    and the second derivative agree exactly.
    """
    n = a.shape[axis]
    ahat = np.fft.rfft(a, axis=axis)
    k = 2j * np.pi * np.arange(ahat.shape[axis])
    if n % 2 == 0:
        k[-1] = 0.0
    shape = [1] * a.ndim
    shape[axis] = -1
    return np.fft.irfft(ahat * k.reshape(shape) ** order, n=n, axis=axis)


def fd_derivative(a: np.ndarray, axis: int, h: float, order: int = 2) -> np.ndarray:
    """Centered periodic finite-difference first derivative of the given accuracy order."""
    try:
        weights = FD_WEIGHTS[order]
    except KeyError:
        raise ValueError(f"finite-difference order must be one of {sorted(FD_WEIGHTS)}") from None
    out = np.zeros_like(a)
    for s, w in enumerate(weights, start=1):
        out += w * (np.roll(a, -s, axis=axis) - np.roll(a, s, axis=axis))
    return out / h


class _Ops:
    """Derivative kernels and metric coefficients bound to one (metric, grid, order)."""

    def __init__(self, m: CFlowMetric, grid: GridSpec, order: int = 2):
        if order not in FD_WEIGHTS:
            raise ValueError(f"finite-difference order must be one of {sorted(FD_WEIGHTS)}")
        self.m = m
        self.grid = grid
        self.order = order
        z = grid.z_column()
        self.inv_hp = m.lambda1 ** (-z)
        self.inv_hq = m.lambda2 ** (-z)

    def dp(self, a):
        return spectral_derivative(a, -3)

    def dq(self, a):
        return spectral_derivative(a, -2)

    def dz(self, a):
        return fd_derivative(a, -1, self.grid.h_z, self.order)

    def gradient(self, f):
        return np.stack([self.inv_hp * self.dp(f), self.inv_hq * self.dq(f), self.dz(f)])

    def divergence(self, b):
        return self.inv_hp * self.dp(b[0]) + self.inv_hq * self.dq(b[1]) + self.dz(b[2])

    def curl(self, b):
        bp, bq, bz = b
        mu1, mu2 = self.m.mu1, self.m.mu2
        cp = self.inv_hq * self.dq(bz) - self.dz(bq) - mu2 * bq
        cq = self.dz(bp) + mu1 * bp - self.inv_hp * self.dp(bz)
        cz = self.inv_hp * self.dp(bq) - self.inv_hq * self.dq(bp)
        return np.stack([cp, cq, cz])

    def laplacian_scalar(self, f):
        dzf = self.dz(f)
        return (
            self.inv_hp**2 * spectral_derivative(f, -3, 2)
            + self.inv_hq**2 * spectral_derivative(f, -2, 2)
            + self.dz(dzf)
            + (self.m.mu1 + self.m.mu2) * dzf
        )

    def vector_laplacian(self, b):
        return self.gradient(self.divergence(b)) - self.curl(self.curl(b))


def _ops_for(m: CFlowMetric, grid: GridSpec, order: int) -> _Ops:
    return _Ops(m, grid, order)


def gradient(m: CFlowMetric, f: ScalarField, order: int = 2) -> FrameField:
    """Frame components ``(l1^-z d_p f, l2^-z d_q f, d_z f)``."""
    return FrameField(f.grid, _ops_for(m, f.grid, order).gradient(f.values))


def divergence(m: CFlowMetric, b: FrameField, order: int = 2) -> ScalarField:
    """Frame divergence ``l1^-z d_p B_p + l2^-z d_q B_q + d_z B_z``.

    This is the form under which every frame vector is divergence-free and
    which the ideal induction flow transports. It differs from the
    Laplace-Beltrami divergence by ``(mu1 + mu2) B_z``; see
    :func:`covariant_divergence`.
    """
    return ScalarField(b.grid, _ops_for(m, b.grid, order).divergence(b.values))


def covariant_divergence(m: CFlowMetric, b: FrameField, order: int = 2) -> ScalarField:
    """Riemannian divergence with volume element ``(l1 l2)^z``.

    Satisfies ``covariant_divergence(gradient(f)) == laplacian_scalar(f)``
    and annihilates curls. Coincides with :func:`divergence` for Arnold metrics.
    """
    ops = _ops_for(m, b.grid, order)
    return ScalarField(b.grid, ops.divergence(b.values) + (m.mu1 + m.mu2) * b.values[2])


def curl(m: CFlowMetric, b: FrameField, order: int = 2) -> FrameField:
    """Orthonormal-frame curl for scale factors ``(l1^z, l2^z, 1)``.

    The z-derivatives of the scale factors are expanded analytically, e.g.
    ``l1^-z d_z(l1^z B_p) = d_z B_p + mu1 B_p``.
    """
    return FrameField(b.grid, _ops_for(m, b.grid, order).curl(b.values))


def laplacian_scalar(m: CFlowMetric, f: ScalarField, order: int = 2) -> ScalarField:
    """Laplace-Beltrami operator including the drift ``(mu1 + mu2) d_z``.

    ``d_z^2`` is discretized as the square of the first-derivative stencil,
    so the operator equals ``covariant_divergence(gradient(f))`` exactly.
    """
    return ScalarField(f.grid, _ops_for(m, f.grid, order).laplacian_scalar(f.values))


def vector_laplacian(m: CFlowMetric, b: FrameField, order: int = 2) -> FrameField:
    """``grad(div B) - curl(curl B)`` with the frame divergence."""
    return FrameField(b.grid, _ops_for(m, b.grid, order).vector_laplacian(b.values))


# -- frame basis identities -----------------------------------------------------------


@dataclass(frozen=True)
class IdentityRow:
    name: str
    closed_form: str
    residual: float


@dataclass(frozen=True)
class IdentityReport:
    metric: CFlowMetric
    rows: tuple[IdentityRow, ...]

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_residual <= tol


def frame_basis_identities(
    m: CFlowMetric, grid: GridSpec | None = None, order: int = 2
) -> IdentityReport:
    """Apply div, curl and the vector Laplacian to e_p, e_q, e_z and compare
    with their closed forms.

    Frame vectors have constant components, so the discrete operators are
    exact up to rounding and the residuals measure the algebra, not the
    discretization.
    """
    grid = grid or GridSpec(8, 8, 16)
    mu1, mu2 = m.mu1, m.mu2
    e = {a: FrameField.basis(grid, a) for a in COMPONENTS}
    zero_s = ScalarField.constant(grid, 0.0)
    zero_v = FrameField.zeros(grid)

    def sup(x):
        return float(np.max(np.abs(_values(x))))

    if m.is_arnold:
        lam = mu2 + 0.0
        forms = (f"-lambda e_q = {-lam + 0.0:.6g} e_q", f"-lambda e_p = {-lam + 0.0:.6g} e_p",
                 f"-lambda^2 e_p = {-lam * lam + 0.0:.6g} e_p", f"-lambda^2 e_q = {-lam * lam + 0.0:.6g} e_q")
    else:
        forms = (f"mu1 e_q = {mu1:.6g} e_q", f"-mu2 e_p = {-mu2:.6g} e_p",
                 f"mu1 mu2 e_p = {mu1 * mu2:.6g} e_p", f"mu1 mu2 e_q = {mu1 * mu2:.6g} e_q")

    expected = [
        ("div e_p", "0", divergence(m, e["p"], order), zero_s),
        ("div e_q", "0", divergence(m, e["q"], order), zero_s),
        ("div e_z", "0", divergence(m, e["z"], order), zero_s),
        ("curl e_p", forms[0], curl(m, e["p"], order), mu1 * e["q"]),
        ("curl e_q", forms[1], curl(m, e["q"], order), -mu2 * e["p"]),
        ("curl e_z", "0", curl(m, e["z"], order), zero_v),
        ("lap e_p", forms[2], vector_laplacian(m, e["p"], order), mu1 * mu2 * e["p"]),
        ("lap e_q", forms[3], vector_laplacian(m, e["q"], order), mu1 * mu2 * e["q"]),
        ("lap e_z", "0", vector_laplacian(m, e["z"], order), zero_v),
    ]
    rows = tuple(IdentityRow(name, form, sup(got - want)) for name, form, got, want in expected)
    return IdentityReport(m, rows)
