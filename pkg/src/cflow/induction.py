"""Kinematic induction for the flow u = v e_z on a C-flow background.

In the ideal limit each frame component is carried along z at speed v and
B_p, B_q are amplified by ``lambda1**(v t)`` and ``lambda2**(v t)``; the
resistive operator adds ``eta * (grad div B - curl curl B)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .frame_ops import COMPONENTS, FrameField, GridSpec, _Ops
from .metric import CFlowMetric

log = logging.getLogger(__name__)



class InstabilityError(RuntimeError):
    """Raised when the integrated field stops being finite."""

    def __init__(self, step_index: int):
        super().__init__(f"non-finite field after step {step_index}")
        self.step_index = step_index


@dataclass(frozen=True)
class Mode:
    """``amplitude * cos(2 pi (k_p p + k_q q + k_z z) + phase)`` in one frame component."""

    component: str
    k: tuple[int, int, int]
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValueError(f"mode component must be one of {COMPONENTS}, got {self.component!r}")
        k = tuple(self.k)
        if len(k) != 3 or any(int(x) != x for x in k):
            raise ValueError(f"mode wavevector must be three integers, got {self.k!r}")
        object.__setattr__(self, "k", tuple(int(x) for x in k))
        for name in ("amplitude", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"mode {name} must be finite")


@dataclass(frozen=True)
class InitialCondition:
    modes: tuple[Mode, ...]
    divergence_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def is_empty(self) -> bool:
        return not any(md.amplitude != 0.0 for md in self.modes)

    def field(self, grid: GridSpec) -> FrameField:
        pp, qq, zz = grid.mesh()
        values = np.zeros((3,) + grid.shape)
        for md in self.modes:
            kp, kq, kz = md.k
            arg = 2 * np.pi * (kp * pp + kq * qq + kz * zz) + md.phase
            values[COMPONENTS.index(md.component)] += md.amplitude * np.cos(arg)
        return FrameField(grid, values)


@dataclass(frozen=True)
class SimConfig:
    metric: CFlowMetric
    grid: GridSpec
    initial: InitialCondition
    dt: float
    t_end: float
    eta: float = 0.0
    v: float = 1.0
    sample_stride: int = 1
    fd_order: int = 2
    snapshots: bool = False

    def __post_init__(self):
        for name in ("dt", "t_end", "eta", "v"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta!r}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end ({self.t_end!r}) must be >= dt ({self.dt!r})")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")
        limit = self.dt_limit
        if self.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt = {self.dt!r} exceeds the stability bound {limit!r}")

    @property
    def dt_limit(self) -> float:
        return stable_dt(self.grid, self.v, self.eta)


def stable_dt(grid: GridSpec, v: float, eta: float) -> float:
    """``0.5 * min(h_z / |v|, h_z^2 / (2 eta))``; a vanishing term imposes no bound."""
    hz = grid.h_z
    adv = hz / abs(v) if v != 0 else math.inf
    diff = hz * hz / (2 * eta) if eta > 0 else math.inf
    return 0.5 * min(adv, diff)


@dataclass(frozen=True)
class SimRecord:
    times: np.ndarray
    norms: np.ndarray  # (n_samples, 3): L2 norms of B_p, B_q, B_z
    energy: np.ndarray
    max_div: np.ndarray
    snapshots: tuple[FrameField, ...] = field(default=(), repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        for name in ("times", "norms", "energy", "max_div"):
            a = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite entries")
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    def __len__(self):
        return len(self.times)


# -- right-hand sides -------------------------------------------------------------------


def _ideal(ops: _Ops, v: float, b: np.ndarray) -> np.ndarray:
    m = ops.m
    dzb = ops.dz(b)
    out = -v * dzb
    out[0] += v * m.mu1 * b[0]
    out[1] += v * m.mu2 * b[1]
    return out


def _resistive(ops: _Ops, v: float, eta: float, b: np.ndarray) -> np.ndarray:
    out = _ideal(ops, v, b)
    if eta != 0.0:
        out += eta * ops.vector_laplacian(b)
    return out


def ideal_rhs(m: CFlowMetric, v: float, b: FrameField, order: int = 2) -> FrameField:
    """``dB/dt = (-v d_z B_p + v mu1 B_p, -v d_z B_q + v mu2 B_q, -v d_z B_z)``."""
    return FrameField(b.grid, _ideal(_Ops(m, b.grid, order), v, b.values))


def resistive_rhs(m: CFlowMetric, v: float, eta: float, b: FrameField, order: int = 2) -> FrameField:
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta!r}")
    return FrameField(b.grid, _resistive(_Ops(m, b.grid, order), v, eta, b.values))


def _rk4(rhs, b: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(b)
    k2 = rhs(b + 0.5 * dt * k1)
    k3 = rhs(b + 0.5 * dt * k2)
    k4 = rhs(b + dt * k3)
    return b + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(
    m: CFlowMetric,
    v: float,
    eta: float,
    b: FrameField,
    dt: float,
    order: int = 2,
    step_index: int = 0,
) -> FrameField:
    """One classical RK4 step of the resistive (or, at eta = 0, ideal) system."""
    if dt == 0:
        return b
    ops = _Ops(m, b.grid, order)
    with np.errstate(over="ignore", invalid="ignore"):
        new = _rk4(lambda x: _resistive(ops, v, eta, x), b.values, dt)
    if not np.all(np.isfinite(new)):
        raise InstabilityError(step_index)
    return FrameField(b.grid, new)


# -- diagnostics --------------------------------------------------------------------------


def component_norms(b: np.ndarray) -> np.ndarray:
    """Coordinate-measure L2 norms of the three components over the unit cell."""
    return np.sqrt(np.mean(b * b, axis=(-3, -2, -1)))


def magnetic_energy(m: CFlowMetric, grid: GridSpec, b: np.ndarray) -> float:
    """``0.5 * integral |B|^2 sqrt(g) dp dq dz`` with ``sqrt(g) = (l1 l2)^z``."""
    sqrt_g = (m.lambda1 * m.lambda2) ** grid.z_column()
    return 0.5 * float(np.sum(np.sum(b * b, axis=0) * sqrt_g)) * grid.cell_volume()


def simulate(cfg: SimConfig) -> SimRecord:
    """Integrate from t = 0 to ``t_end`` with RK4, sampling every ``sample_stride`` steps.

    The final step is shortened if ``t_end`` is not a multiple of ``dt``;
    the end time is always sampled.
    """
    if cfg.initial.is_empty:
        raise ValueError("empty initial condition")
    grid, m = cfg.grid, cfg.metric
    ops = _Ops(m, grid, cfg.fd_order)

    def rhs(x):
        return _resistive(ops, cfg.v, cfg.eta, x)

    b = cfg.initial.field(grid).values.copy()
    n_steps = max(1, int(math.ceil(cfg.t_end / cfg.dt - 1e-9)))
    times, norms, energy, max_div, snaps = [], [], [], [], []

    def sample(t, i):
        with np.errstate(over="ignore", invalid="ignore"):
            row = (component_norms(b), magnetic_energy(m, grid, b), float(np.max(np.abs(ops.divergence(b)))))
        # finite field whose squares overflow: as unusable as a non-finite one
        if not all(np.all(np.isfinite(x)) for x in row):
            raise InstabilityError(i)
        times.append(t)
        norms.append(row[0])
        energy.append(row[1])
        max_div.append(row[2])
        if cfg.snapshots:
            snaps.append(FrameField(grid, b))

    sample(0.0, 0)
    t = 0.0
    for i in range(1, n_steps + 1):
        h = cfg.dt if i < n_steps else cfg.t_end - (n_steps - 1) * cfg.dt
        with np.errstate(over="ignore", invalid="ignore"):
            b = _rk4(rhs, b, h)
        if not np.all(np.isfinite(b)):
            raise InstabilityError(i)
        t = cfg.t_end if i == n_steps else i * cfg.dt
        if i % cfg.sample_stride == 0 or i == n_steps:
            sample(t, i)
    log.debug("simulated %d steps to t=%g", n_steps, t)
    return SimRecord(
        np.array(times), np.array(norms), np.array(energy), np.array(max_div), tuple(snaps)
    )


# -- closed-form solutions ----------------------------------------------------------------


def shift_z(values: np.ndarray, s: float) -> np.ndarray:
    """Spectrally interpolate ``f(z - s)`` for fields periodic in z."""
    n = values.shape[-1]
    fhat = np.fft.rfft(values, axis=-1)
    k = 2 * np.pi * np.arange(fhat.shape[-1])
    return np.fft.irfft(fhat * np.exp(-1j * k * s), n=n, axis=-1)


def analytic_ideal(m: CFlowMetric, b0: FrameField, v: float, t: float) -> FrameField:
    """``(l1^{vt} B_p0, l2^{vt} B_q0, B_z0)`` evaluated at ``(p, q, z - v t)``."""
    if t == 0:
        return b0
    shifted = shift_z(b0.values, v * t)
    shifted[0] *= m.lambda1 ** (v * t)
    shifted[1] *= m.lambda2 ** (v * t)
    return FrameField(b0.grid, shifted)


def analytic_arnold(b0: FrameField, lam: float, v: float, t: float) -> FrameField:
    """Arnold solution: the q-component grows as ``e^{lam v t}``, p decays as ``e^{-lam v t}``."""
    if t == 0:
        return b0
    shifted = shift_z(b0.values, v * t)
    shifted[0] *= math.exp(-lam * v * t)
    shifted[1] *= math.exp(lam * v * t)
    return FrameField(b0.grid, shifted)


def growth_rates(rec: SimRecord, fit_window: tuple[float, float] | None = None):
    """Least-squares slopes of ``ln ||B_i||`` over the window, one per component.

    The default window is the final half of the run. A component with a
    non-positive norm inside the window is returned as ``None``.
    """
    t = rec.times
    if fit_window is None:
        fit_window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    lo, hi = fit_window
    sel = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    if sel.sum() < 10:
        raise ValueError(f"fit window {fit_window} contains {sel.sum()} samples; need >= 10")
    rates = []
    for i in range(rec.norms.shape[1]):
        y = rec.norms[sel, i]
        rates.append(log_slope(t[sel], y))
    return tuple(rates)


def log_slope(t, y):
    """Slope of the least-squares line through ``(t, ln y)``; None if any y <= 0."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return None
    slope, _ = np.polyfit(np.asarray(t, dtype=float), np.log(y), 1)
    return float(slope)


def energy_growth_rate(rec: SimRecord, fit_window: tuple[float, float] | None = None):
    t = rec.times
    if fit_window is None:
        fit_window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    sel = (t >= fit_window[0] - 1e-12) & (t <= fit_window[1] + 1e-12)
    return log_slope(t[sel], rec.energy[sel])


def expected_rates(m: CFlowMetric, v: float) -> tuple[float, float, float]:
    return (v * m.mu1, v * m.mu2, 0.0)

