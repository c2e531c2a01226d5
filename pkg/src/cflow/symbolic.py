"""Closed-form operator values from textbook scale-factor formulas (sympy).

Independent of the discrete kernels in :mod:`cflow.frame_ops`: here the
scale factors stay inside the derivatives and sympy differentiates through
them. Used by the convergence checks and the test suite.
"""
from __future__ import annotations

import numpy as np
import sympy as sp

from .metric import CFlowMetric

P, Q, Z = sp.symbols("p q z", real=True)
COORDS = (P, Q, Z)


def scale_factors(m: CFlowMetric):
    l1 = sp.Float(m.lambda1, 30)
    l2 = sp.Float(m.lambda2, 30)
    return (l1**Z, l2**Z, sp.Integer(1))


def grad(m, f):
    h = scale_factors(m)
    return tuple(sp.diff(f, x) / hi for x, hi in zip(COORDS, h))


def covariant_div(m, b):
    h = scale_factors(m)
    vol = h[0] * h[1] * h[2]
    return sum(sp.diff(vol / hi * bi, x) for x, hi, bi in zip(COORDS, h, b)) / vol


def frame_div(m, b):
    """Covariant divergence minus the volume-growth term ``(mu1 + mu2) B_z``."""
    mu_sum = sp.log(sp.Float(m.lambda1, 30)) + sp.log(sp.Float(m.lambda2, 30))
    return covariant_div(m, b) - mu_sum * b[2]


def curl(m, b):
    h = scale_factors(m)
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        term = sp.diff(h[k] * b[k], COORDS[j]) - sp.diff(h[j] * b[j], COORDS[k])
        out.append(term / (h[j] * h[k]))
    return tuple(out)


def laplace_beltrami(m, f):
    h = scale_factors(m)
    vol = h[0] * h[1] * h[2]
    return sum(sp.diff(vol / hi**2 * sp.diff(f, x), x) for x, hi in zip(COORDS, h)) / vol


def vector_laplacian(m, b):
    g = grad(m, frame_div(m, b))
    cc = curl(m, curl(m, b))
    return tuple(gi - ci for gi, ci in zip(g, cc))


def evaluate(expr, grid):
    """Evaluate a sympy expression (or tuple of them) on the grid nodes."""
    pp, qq, zz = grid.mesh()
    if isinstance(expr, tuple):
        return np.stack([evaluate(e, grid) for e in expr])
    fn = sp.lambdify(COORDS, expr, "numpy")
    return np.broadcast_to(np.asarray(fn(pp, qq, zz), dtype=float), grid.shape).copy()


def sample_scalar():
    """Smooth periodic scalar with structure along all three axes."""
    two_pi = 2 * sp.pi
    return sp.sin(two_pi * (P + 2 * Q)) * sp.cos(two_pi * Z) + sp.cos(two_pi * (Q - Z))


def sample_vector():
    two_pi = 2 * sp.pi
    return (
        sp.cos(two_pi * (Q + Z)) + sp.sin(two_pi * P) * sp.sin(two_pi * Z),
        sp.sin(two_pi * (P - Z)) + 0.5 * sp.cos(two_pi * Q),
        sp.cos(two_pi * (P + Q)) * sp.cos(two_pi * Z),
    )
