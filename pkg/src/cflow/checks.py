"""Operator convergence and frame-identity checks behind ``cflow check``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import frame_ops as fo
from . import symbolic as sym
from .frame_ops import FD_WEIGHTS, FrameField, GridSpec, ScalarField
from .metric import CFlowMetric

ORDER_THRESHOLD = 1.9
IDENTITY_TOL = 1e-10
# below this many z-points per wavelength of the test fields a failed order is
# attributed to resolution rather than to the operator
MIN_POINTS_PER_WAVELENGTH = 8
TEST_KZ = 1
# errors below this are rounding noise; the discrete operator is exact there
ROUNDING_FLOOR = 1e-11


@dataclass(frozen=True)
class CheckRow:
    kind: str  # "convergence" or "identity"
    name: str
    detail: str
    value: float
    threshold: float
    status: str  # "pass", "fail", "insufficient-resolution"

    @property
    def ok(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class CheckReport:
    metric: CFlowMetric
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def failures(self) -> tuple[CheckRow, ...]:
        return tuple(r for r in self.rows if not r.ok)

    def format_table(self) -> str:
        lines = [f"{'check':<34} {'value':>13} {'threshold':>11}  status"]
        for r in self.rows:
            cmp = ">=" if r.kind == "convergence" else "<="
            label = f"{r.name} [{r.detail}]" if r.detail else r.name
            lines.append(f"{label:<34} {r.value:>13.4e} {cmp}{r.threshold:>9.3g}  {r.status}")
        return "\n".join(lines)


def _seam_mask(n_z: int, order: int) -> np.ndarray:
    """Interior z-nodes, dropping the stencil half-width on each side of z = 0."""
    s = len(FD_WEIGHTS[order])
    mask = np.ones(n_z, dtype=bool)
    mask[:s] = False
    mask[n_z - s:] = False
    return mask


def _cases(m: CFlowMetric):
    """(name, discrete operator, closed form, field kind, nested) tuples."""
    f = sym.sample_scalar()
    b = sym.sample_vector()
    zero = sym.sp.Integer(0)
    return [
        ("gradient", fo.gradient, sym.grad(m, f), "scalar", False),
        ("divergence", fo.divergence, sym.frame_div(m, b), "vector", False),
        ("curl", fo.curl, sym.curl(m, b), "vector", False),
        ("laplacian_scalar", fo.laplacian_scalar, sym.laplace_beltrami(m, f), "scalar", False),
        ("vector_laplacian", fo.vector_laplacian, sym.vector_laplacian(m, b), "vector", True),
        ("curl(grad f)", lambda mm, x, order: fo.curl(mm, fo.gradient(mm, x, order), order),
         (zero, zero, zero), "scalar", True),
        ("covdiv(curl B)", lambda mm, x, order: fo.covariant_divergence(mm, fo.curl(mm, x, order), order),
         zero, "vector", True),
    ], f, b


def _error(m, grid, op, exact, kind, nested, order, f, b):
    if kind == "scalar":
        arg = ScalarField(grid, sym.evaluate(f, grid))
    else:
        arg = FrameField(grid, sym.evaluate(b, grid))
    got = op(m, arg, order).values
    want = sym.evaluate(exact, grid)
    diff = np.abs(got - want)
    if nested:
        diff = diff[..., _seam_mask(grid.n_z, order)]
    return float(diff.max())


def operator_convergence(m: CFlowMetric, grid: GridSpec, order: int = 2) -> list[CheckRow]:
    """Observed z-convergence order of each operator between ``n_z`` and ``2 n_z``.

    Errors are measured against sympy closed forms of smooth test fields;
    nested operators are measured away from the z = 0 seam.
    """
    cases, f, b = _cases(m)
    fine = GridSpec(grid.n_p, grid.n_q, 2 * grid.n_z)
    rows = []
    resolved = grid.n_z / TEST_KZ >= MIN_POINTS_PER_WAVELENGTH
    for name, op, exact, kind, nested in cases:
        e1 = _error(m, grid, op, exact, kind, nested, order, f, b)
        e2 = _error(m, fine, op, exact, kind, nested, order, f, b)
        if max(e1, e2) <= ROUNDING_FLOOR:
            observed = math.inf
        elif e2 == 0.0:
            observed = math.inf
        else:
            observed = math.log2(e1 / e2)
        if observed >= ORDER_THRESHOLD:
            status = "pass"
        else:
            status = "fail" if resolved else "insufficient-resolution"
        detail = f"n_z {grid.n_z}->{fine.n_z}"
        rows.append(CheckRow("convergence", name, detail, observed, ORDER_THRESHOLD, status))
    return rows


def identity_rows(m: CFlowMetric, grid: GridSpec, order: int = 2) -> list[CheckRow]:
    rep = fo.frame_basis_identities(m, grid, order)
    return [
        CheckRow("identity", r.name, r.closed_form, r.residual, IDENTITY_TOL,
                 "pass" if r.residual <= IDENTITY_TOL else "fail")
        for r in rep.rows
    ]


def run_checks(m: CFlowMetric, grid: GridSpec, order: int = 2) -> CheckReport:
    return CheckReport(m, tuple(identity_rows(m, grid, order) + operator_convergence(m, grid, order)))
