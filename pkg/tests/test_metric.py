import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cflow.metric import (
    CFlowMetric,
    beta,
    cat_eigenvalues,
    from_arnold,
    map_determinant,
    mu,
    new_cflow,
    pq_to_xy,
    scale_factors,
    xy_to_pq,
)

bases = st.floats(0.05, 20.0)
lams = st.floats(-5.0, 5.0)


def test_new_cflow_examples():
    assert new_cflow(2, 0.5).is_arnold
    assert not new_cflow(2, 3).is_arnold
    with pytest.raises(ValueError, match="lambda1"):
        new_cflow(0, 1)
    with pytest.raises(ValueError, match="lambda2"):
        new_cflow(1, -2)
    with pytest.raises(ValueError, match="lambda1"):
        new_cflow(float("nan"), 1)
    with pytest.raises(ValueError, match="lambda2"):
        new_cflow(1, float("inf"))


def test_metric_is_immutable():
    m = new_cflow(2, 3)
    with pytest.raises(AttributeError):
        m.lambda1 = 4


def test_from_arnold_examples():
    m = from_arnold(0.0)
    assert (m.lambda1, m.lambda2) == (1.0, 1.0)
    m = from_arnold(math.log(2))
    assert m.lambda1 == pytest.approx(0.5, abs=1e-15)
    assert m.lambda2 == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        from_arnold(float("nan"))


@given(lams)
def test_from_arnold_is_arnold(lam):
    m = from_arnold(lam)
    assert m.is_arnold
    assert abs(mu(m, "p") + lam) <= 1e-15 * max(1, abs(lam))
    assert abs(mu(m, "q") - lam) <= 1e-15 * max(1, abs(lam))


def test_mu_examples():
    assert mu(new_cflow(2, 3), "p") == pytest.approx(0.693147, abs=1e-6)
    assert mu(new_cflow(1, 1), "q") == 0.0
    assert mu(from_arnold(0.7), "p") == pytest.approx(-0.7, abs=1e-15)
    with pytest.raises(ValueError):
        mu(new_cflow(1, 1), "z")


def test_scale_factor_examples():
    assert scale_factors(new_cflow(2, 3), 0.0) == (1.0, 1.0, 1.0)
    assert scale_factors(new_cflow(2, 3), 1.0) == (2.0, 3.0, 1.0)
    lam, z = 0.4, 0.3
    hp, hq, hz = scale_factors(from_arnold(lam), z)
    assert hp == pytest.approx(math.exp(-lam * z), rel=1e-14)
    assert hq == pytest.approx(math.exp(lam * z), rel=1e-14)
    assert hz == 1.0


@given(bases, bases, st.floats(-2, 2), st.floats(-2, 2))
def test_scale_factor_exponential_law(l1, l2, z1, z2):
    m = new_cflow(l1, l2)
    a = scale_factors(m, z1 + z2)
    b = scale_factors(m, z1)
    c = scale_factors(m, z2)
    for x, y, w in zip(a, b, c):
        assert x == pytest.approx(y * w, rel=1e-12)


def test_beta_examples():
    assert beta(new_cflow(2, 3)) == -7.0
    assert beta(new_cflow(0.5, 2)) == 0.5
    assert beta(new_cflow(1, 1)) == 0.0


@given(bases, bases)
def test_beta_symmetric(l1, l2):
    assert beta(new_cflow(l1, l2)) == beta(new_cflow(l2, l1))


def test_coordinate_map_examples():
    m = new_cflow(2, 3)
    assert xy_to_pq(m, (1.0, 0.0)) == (2.0, 3.0)
    assert xy_to_pq(m, (0.0, 0.0)) == (0.0, 0.0)
    assert xy_to_pq(new_cflow(0.3, 7.0), (1.0, 1.0)) == pytest.approx((1.0, 1.0), abs=1e-15)
    assert pq_to_xy(m, (2.0, 3.0)) == pytest.approx((1.0, 0.0), abs=1e-15)
    assert pq_to_xy(m, (0.0, 0.0)) == (0.0, 0.0)


def test_pq_to_xy_rejects_singular():
    with pytest.raises(ValueError, match="beta"):
        pq_to_xy(new_cflow(1, 1), (0.3, 0.2))
    # beta = 0 off the diagonal: l1 = 2, l2 = 2/3
    m = new_cflow(2, 2 / 3)
    assert abs(beta(m)) < 1e-12
    with pytest.raises(ValueError, match="beta"):
        pq_to_xy(m, (1.0, 1.0))
    # beta != 0 but l1 == l2: the linear map itself is not invertible
    m = new_cflow(3, 3)
    assert beta(m) == -12.0
    with pytest.raises(ValueError, match="determinant"):
        pq_to_xy(m, (1.0, 1.0))


@given(bases, bases)
def test_pq_to_xy_matches_matrix_inverse(l1, l2):
    m = new_cflow(l1, l2)
    if abs(beta(m)) <= 1e-3 or abs(l1 - l2) <= 1e-3:
        return
    mat = np.array([[l1, 1 - l1], [l2, 1 - l2]])
    assert map_determinant(m) == pytest.approx(np.linalg.det(mat), rel=1e-9, abs=1e-12)
    expected = np.linalg.solve(mat, [0.7, -1.3])
    assert pq_to_xy(m, (0.7, -1.3)) == pytest.approx(tuple(expected), rel=1e-9, abs=1e-9)


def test_roundtrip_1000_random():
    rng = np.random.default_rng(20240601)
    done = 0
    while done < 1000:
        l1, l2 = rng.uniform(0.05, 5.0, size=2)
        m = new_cflow(l1, l2)
        if abs(beta(m)) <= 0.1 or abs(l1 - l2) <= 0.1:
            continue
        xy = rng.uniform(-10, 10, size=2)
        back = pq_to_xy(m, xy_to_pq(m, xy))
        assert np.max(np.abs(np.array(back) - xy)) <= 1e-12 * max(1.0, 1.0 / abs(l1 - l2))
        done += 1


def test_cat_eigenvalues():
    c1, c2 = cat_eigenvalues()
    assert c1 == pytest.approx(2.618033988, abs=1e-9)
    assert c2 == pytest.approx(0.381966011, abs=1e-9)
    assert c1 > 1 > c2 > 0
    assert abs(c1 * c2 - 1) <= 1e-14
    assert abs(c1 + c2 - 3) <= 1e-14
    # brute force: eigenvalues of the cat map matrix
    ev = sorted(np.linalg.eigvalsh(np.array([[2.0, 1.0], [1.0, 1.0]])), reverse=True)
    assert (c1, c2) == pytest.approx(tuple(ev), abs=1e-14)


@settings(max_examples=50)
@given(bases, bases)
def test_metric_roundtrip_via_dataclass(l1, l2):
    m = CFlowMetric(l1, l2)
    assert m.mu1 == math.log(l1)
    assert m.is_arnold == (abs(l1 * l2 - 1) <= 1e-12)
