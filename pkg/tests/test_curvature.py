import itertools
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cflow.curvature import (
    ExpSum,
    OneForm,
    alpha_reference,
    basis_forms,
    christoffel_oracle,
    compare_report,
    connection_forms,
    curvature_forms,
    exterior_derivatives,
    riemann_symmetry_residual,
)
from cflow.metric import from_arnold, new_cflow

FLAT = new_cflow(1, 1)
E = math.e
bases = st.floats(0.05, 20.0)


def sympy_frame_riemann(l1, l2, z0):
    """Brute-force frame Riemann tensor straight from the metric components."""
    p, q, z = sp.symbols("p q z", real=True)
    X = (p, q, z)
    g = sp.diag(sp.Float(l1, 30) ** (2 * z), sp.Float(l2, 30) ** (2 * z), 1)
    gi = g.inv()
    G = [[[sum(gi[k, l] * (sp.diff(g[j, l], X[i]) + sp.diff(g[i, l], X[j]) - sp.diff(g[i, j], X[l]))
               for l in range(3)) / 2 for j in range(3)] for i in range(3)] for k in range(3)]
    R = np.zeros((3, 3, 3, 3))
    h = [math.sqrt(float(g[i, i].subs(z, z0))) for i in range(3)]
    for r, s, a, b in itertools.product(range(3), repeat=4):
        expr = sp.diff(G[r][b][s], X[a]) - sp.diff(G[r][a][s], X[b])
        expr += sum(G[r][a][l] * G[l][b][s] - G[r][b][l] * G[l][a][s] for l in range(3))
        val = float((g[r, r] * expr).subs(z, z0))
        R[r, s, a, b] = val / (h[r] * h[s] * h[a] * h[b])
    return R


# -- coefficient algebra ---------------------------------------------------------------


def test_expsum_algebra():
    a = ExpSum.exp(2.0, 3.0)
    b = ExpSum.const(1.5)
    assert (a * b)(0.4) == pytest.approx(4.5 * math.exp(0.8))
    assert (a + b)(0.0) == 4.5
    assert (a - a).is_zero
    assert a.dz()(0.0) == 6.0
    assert b.is_constant and not a.is_constant
    assert (ExpSum.exp(1.0) * ExpSum.exp(-1.0)).is_constant


def test_wedge_antisymmetric():
    one = ExpSum.const(1.0)
    zero = ExpSum()
    a = OneForm((one, zero, ExpSum.exp(0.3)))
    b = OneForm((zero, one, one))
    ab, ba = a.wedge(b), b.wedge(a)
    for i, j in itertools.permutations(range(3), 2):
        assert ab.component(i, j)(0.2) == pytest.approx(-ba.component(i, j)(0.2))
        assert ab.component(i, j)(0.2) == pytest.approx(-ab.component(j, i)(0.2))
    assert a.wedge(a).is_zero


# -- basis and exterior derivatives -----------------------------------------------------


def coframe_at(m, z):
    return np.array([[c(z) for c in row] for row in basis_forms(m)])


def test_basis_forms_examples():
    assert np.array_equal(coframe_at(FLAT, 0.7), np.eye(3))
    assert np.allclose(coframe_at(new_cflow(2, 3), 1.0), np.diag([2.0, 3.0, 1.0]), atol=1e-14)
    lam, z = 0.6, 0.35
    assert np.allclose(coframe_at(from_arnold(lam), z), np.diag([math.exp(-lam * z), math.exp(lam * z), 1]),
                       atol=1e-15)


@given(bases, bases, st.floats(-1, 2))
def test_basis_forms_reproduce_line_element(l1, l2, z):
    c = coframe_at(new_cflow(l1, l2), z)
    assert np.allclose(c.T @ c, np.diag([l1 ** (2 * z), l2 ** (2 * z), 1.0]), rtol=1e-12)


def test_exterior_derivative_examples():
    dp, dq, dz = exterior_derivatives(new_cflow(E, E**2))
    assert dz.is_zero
    # w^z ^ w^p = -(w^p ^ w^z)
    assert dp.component(2, 0)(0.3) == pytest.approx(1.0, abs=1e-14)
    assert dq.component(2, 1)(0.3) == pytest.approx(2.0, abs=1e-14)
    assert dp.component(0, 1).is_zero and dq.component(0, 1).is_zero
    assert all(f.is_zero for f in exterior_derivatives(FLAT))


@given(bases, bases)
def test_exterior_derivatives_general(l1, l2):
    m = new_cflow(l1, l2)
    dp, dq, dz = exterior_derivatives(m)
    assert dz.is_zero
    assert dp.component(2, 0)(0.0) == pytest.approx(m.mu1, abs=1e-14)
    assert dq.component(2, 1)(0.0) == pytest.approx(m.mu2, abs=1e-14)


# -- connection ------------------------------------------------------------------------


def conn(m, z=0.0):
    return connection_forms(m).connection_at(z)


def test_connection_flat():
    assert all(v == [0.0, 0.0, 0.0] for v in conn(FLAT).values())


def test_connection_ee():
    c = conn(new_cflow(E, E), 0.4)
    assert c["p_z"] == pytest.approx([1.0, 0.0, 0.0], abs=1e-15)
    assert c["q_z"] == pytest.approx([0.0, 1.0, 0.0], abs=1e-15)
    assert c["p_q"] == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("lam", [0.5, 1.0, -1.2])
def test_connection_arnold(lam):
    c = conn(from_arnold(lam))
    assert c["p_z"] == pytest.approx([-lam, 0.0, 0.0], abs=1e-15)
    assert c["q_z"] == pytest.approx([0.0, lam, 0.0], abs=1e-15)


@given(bases, bases)
def test_connection_torsion_free_exactly(l1, l2):
    assert connection_forms(new_cflow(l1, l2)).torsion_residual == 0.0


@settings(max_examples=30)
@given(st.floats(0.5, 3), st.floats(0.5, 3), st.floats(-1, 1))
def test_connection_matches_christoffel(l1, l2, z):
    m = new_cflow(l1, l2)
    a = connection_forms(m).connection_at(z)
    b = christoffel_oracle(m, z).connection_at(z)
    for key in a:
        assert np.allclose(a[key], b[key], atol=1e-12)


# -- curvature ------------------------------------------------------------------------


def test_curvature_flat():
    rep = curvature_forms(FLAT)
    assert np.all(rep.riemann == 0.0)
    assert np.all(christoffel_oracle(FLAT).riemann == 0.0)


def test_curvature_ee():
    rep = curvature_forms(new_cflow(E, E))
    assert rep.sectional == pytest.approx({"K_pz": -1.0, "K_qz": -1.0, "K_pq": -1.0}, abs=1e-14)
    assert rep.scalar == pytest.approx(-6.0, abs=1e-13)
    assert np.max(np.abs(rep.riemann - christoffel_oracle(new_cflow(E, E)).riemann)) <= 1e-14


def test_curvature_arnold_one():
    rep = curvature_forms(from_arnold(1))
    assert rep.sectional == pytest.approx({"K_pz": -1.0, "K_qz": -1.0, "K_pq": 1.0}, abs=1e-14)
    assert rep.scalar == pytest.approx(-2.0, abs=1e-13)


@pytest.mark.parametrize("l1,l2,z", [(2.0, 3.0, 0.0), (0.7, 1.9, 0.45), (E, 0.5, -0.3)])
def test_curvature_matches_sympy_brute_force(l1, l2, z):
    m = new_cflow(l1, l2)
    assert np.max(np.abs(curvature_forms(m, z).riemann - sympy_frame_riemann(l1, l2, z))) <= 1e-12


@given(bases, bases)
def test_closed_form_sectional_and_scalar(l1, l2):
    m = new_cflow(l1, l2)
    rep = curvature_forms(m)
    mu1, mu2 = m.mu1, m.mu2
    tol = 1e-12 * (1 + mu1 * mu1 + mu2 * mu2)
    s = rep.sectional
    assert abs(s["K_pz"] + mu1 * mu1) <= tol
    assert abs(s["K_qz"] + mu2 * mu2) <= tol
    assert abs(s["K_pq"] + mu1 * mu2) <= tol
    assert abs(rep.scalar + 2 * (mu1 * mu1 + mu1 * mu2 + mu2 * mu2)) <= 6 * tol


@given(bases, bases)
def test_scalar_curvature_non_positive(l1, l2):
    m = new_cflow(l1, l2)
    sc = curvature_forms(m).scalar
    assert sc <= 0.0
    if sc == 0.0:
        assert l1 == 1.0 and l2 == 1.0
    assert curvature_forms(FLAT).scalar == 0.0


@given(bases, bases)
def test_sectional_signs(l1, l2):
    m = new_cflow(l1, l2)
    s = curvature_forms(m).sectional
    assert s["K_pz"] <= 0.0 and s["K_qz"] <= 0.0
    prod = m.mu1 * m.mu2
    if prod > 1e-12:
        assert s["K_pq"] < 0
    elif prod < -1e-12:
        assert s["K_pq"] > 0


@given(st.floats(0.05, 3.0))
def test_arnold_mixed_section_positive(lam):
    assert curvature_forms(from_arnold(lam)).sectional["K_pq"] > 0


@pytest.mark.parametrize("m", [new_cflow(2, 3), from_arnold(0.8), new_cflow(0.6, 2.5)])
def test_components_constant_in_z(m):
    ref = curvature_forms(m, 0.0).riemann
    for z in (-0.7, 0.1, 0.5, 0.9, 1.6):
        assert np.max(np.abs(curvature_forms(m, z).riemann - ref)) <= 1e-13
        assert np.max(np.abs(christoffel_oracle(m, z).riemann - ref)) <= 1e-12


@settings(max_examples=50)
@given(bases, bases, st.floats(-1, 1))
def test_symmetries_both_paths(l1, l2, z):
    m = new_cflow(l1, l2)
    for rep in (curvature_forms(m, z), christoffel_oracle(m, z)):
        assert riemann_symmetry_residual(rep.riemann) <= 1e-12 * (1 + np.abs(rep.riemann).max())


def test_symmetry_residual_detects_violation():
    R = np.zeros((3, 3, 3, 3))
    R[0, 1, 0, 1] = 1.0
    assert riemann_symmetry_residual(R) == 1.0


# -- comparison record ------------------------------------------------------------------


def test_alpha_reference():
    assert alpha_reference(0.5) == {"alpha": 0.5, "Rq_zzq": -0.25, "Rq_zzp": -0.5, "K_G": -0.25}


def test_compare_flat_alpha_zero():
    rec = compare_report(FLAT, alpha=0.0)
    assert rec.max_path_deviation <= 1e-14
    assert all(v == 0.0 for k, v in rec.reference.items())
    assert all(v == 0.0 for v in rec.computed_counterparts.values())
    assert rec.as_rows() == []


def test_compare_ee_alpha_one_recorded_not_asserted():
    rec = compare_report(new_cflow(E, E), alpha=1.0)
    assert rec.reference["K_G"] == -1.0
    assert rec.computed_counterparts["K_pq"] == pytest.approx(-1.0, abs=1e-14)
    # the alpha block carries a component the exact computation sets to zero
    assert rec.reference["Rq_zzp"] == -1.0
    assert rec.computed_counterparts["Rq_zzp"] == 0.0
    assert rec.max_path_deviation <= 1e-10


def test_compare_rows():
    rec = compare_report(new_cflow(2, 3))
    rows = dict((name, (a, b, d)) for name, a, b, d in rec.as_rows())
    assert rows["R_pzpz"][0] == pytest.approx(-math.log(2) ** 2, abs=1e-14)
    assert all(d <= 1e-12 for _, _, d in rows.values())
