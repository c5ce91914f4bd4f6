import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symflat.cone import (
    ConeForm,
    ConeOperator,
    cone_curvature,
    cone_curvature_apply,
    cone_d,
    cone_inner_product,
    cone_norm_via_star,
    cone_star,
    cone_wedge,
    theta_integral,
)
from symflat.errors import AlgebraMismatchError, DegreeError, InvalidConnectionError, NotClosedError
from symflat.forms import (
    SU2,
    DifferentialForm,
    Metric,
    TorusDomain,
    inner_product,
    random_form,
    sup_norm,
    volume_form,
)
from symflat.functionals import eval_cone_ym
from symflat.gauge import Connection, covariant_d, curvature
from symflat.presets import constant_flux, flat_wilson, random_abelian, random_su2
from symflat.symplectic import darboux_form, lefschetz_L

D8 = TorusDomain(4, 8)
G8 = Metric.t4_example(D8)


def _max(c: ConeForm) -> float:
    return max(0.0 if s is None else float(np.max(np.abs(s.data))) for s in (c.xi, c.eta))


def _random_cone(domain, k, rng, algebra=None):
    kw = {} if algebra is None else {"algebra": algebra}
    xi = random_form(domain, k, rng, **kw) if k <= domain.dim else None
    eta = random_form(domain, k - 1, rng, **kw) if k >= 1 else None
    return ConeForm(xi, eta)


def _zero_op(domain, algebra=None):
    kw = {} if algebra is None else {"algebra": algebra}
    A = Connection(DifferentialForm.zeros(domain, 1, **kw))
    return ConeOperator(A, DifferentialForm.zeros(domain, 0, **kw))


def test_cone_d_of_constants():
    op = _zero_op(D8)
    one = DifferentialForm.scalar(D8, 1.0)
    assert _max(cone_d(ConeForm(one, None), op)) == 0.0
    out = cone_d(ConeForm(None, one), op)
    np.testing.assert_array_equal(out.xi.data, darboux_form(D8).data)
    assert np.max(np.abs(out.eta.data)) == 0.0


@pytest.mark.parametrize("c", [0.0, 0.5, -1.5])
def test_cone_d_squared_vanishes_when_flat(c, rng):
    p = constant_flux(c)
    op = ConeOperator(p.connection, p.cone_B)
    x = ConeForm(random_form(p.domain, 0, rng), None)
    assert _max(cone_d(cone_d(x, op), op)) <= 1e-8


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_cone_d_squared_is_curvature_su2(k, rng):
    p = random_su2(2, 0.4, max_mode=1)
    op = ConeOperator(p.connection, random_form(p.domain, 0, rng, SU2, 0.5, max_mode=1))
    x = _random_cone(p.domain, k, rng, SU2)
    diff = cone_d(cone_d(x, op), op) - cone_curvature_apply(op, x)
    assert _max(diff) <= 1e-8


@pytest.mark.parametrize("k", [0, 1, 2])
def test_cone_d_squared_fundamental_action(k, rng):
    p = random_abelian(1, 0.4, max_mode=1)
    op = ConeOperator(p.connection, random_form(p.domain, 0, rng, max_mode=1), action="fundamental")
    x = _random_cone(p.domain, k, rng)
    diff = cone_d(cone_d(x, op), op) - cone_curvature_apply(op, x)
    assert _max(diff) <= 1e-8


def test_cone_operator_errors(rng):
    p = random_su2(0, max_mode=1)
    with pytest.raises(InvalidConnectionError):
        ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 0, SU2), action="fundamental")
    with pytest.raises(AlgebraMismatchError):
        ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 0))
    with pytest.raises(DegreeError):
        ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 1, SU2))
    x = p.domain.coordinates()
    sigma = DifferentialForm.from_components(p.domain, 2, {(0, 1): np.sin(x[2]) * np.ones(p.domain.shape)})
    with pytest.raises(NotClosedError):
        ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 0, SU2), sigma=sigma)
    op = ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 0, SU2))
    with pytest.raises(AlgebraMismatchError):
        cone_d(ConeForm(random_form(p.domain, 0, rng), None), op)


def test_cone_form_slot_checks(rng):
    with pytest.raises(DegreeError):
        ConeForm(None, None)
    with pytest.raises(DegreeError):
        ConeForm(random_form(D8, 2, rng), random_form(D8, 2, rng))


def test_cone_curvature_examples(t4_small):
    p = flat_wilson(0.1, 0.2)
    assert _max(cone_curvature(ConeOperator(p.connection, DifferentialForm.zeros(p.domain, 0)))) == 0.0
    p = constant_flux(0.9)
    assert _max(cone_curvature(ConeOperator(p.connection, p.cone_B))) == 0.0
    for b in (-1.0, 0.0, 2.0):
        B = DifferentialForm.scalar(t4_small.domain, b)
        cc = cone_curvature(ConeOperator(t4_small.connection, B))
        assert sup_norm(cc.xi, t4_small.metric) > 1e-3


def test_cone_star_of_units():
    one = DifferentialForm.scalar(D8, 1.0)
    vol = volume_form(D8, G8)
    s = cone_star(ConeForm(None, one), G8)
    np.testing.assert_allclose(s.xi.data, vol.data, atol=1e-14)
    assert s.eta is None
    s = cone_star(ConeForm(one, None), G8)
    np.testing.assert_allclose(s.eta.data, vol.data, atol=1e-14)
    assert s.xi is None


@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(0, 5))
def test_cone_norm_two_routes(seed, k):
    c = _random_cone(D8, k, np.random.default_rng(seed))
    a = cone_inner_product(c, c, G8)
    b = cone_norm_via_star(c, G8)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_cone_norm_two_routes_su2(rng):
    c = _random_cone(D8, 2, rng, SU2)
    a = cone_inner_product(c, c, G8)
    assert abs(a - cone_norm_via_star(c, G8)) <= 1e-8 * a


def test_cone_inner_product_slots(rng):
    xi, eta = random_form(D8, 2, rng), random_form(D8, 1, rng)
    assert cone_inner_product(ConeForm(xi, None), ConeForm(None, eta), G8) == 0.0
    both = ConeForm(xi, eta)
    total = cone_inner_product(both, both, G8)
    assert total == inner_product(xi, xi, G8) + inner_product(eta, eta, G8)
    with pytest.raises(DegreeError):
        cone_inner_product(both, ConeForm(eta, None), G8)


@pytest.mark.parametrize("preset", ["t4", "su2", "abelian"])
def test_cone_pythagoras(preset, t4_small, rng):
    if preset == "t4":
        p, B = t4_small, DifferentialForm.scalar(t4_small.domain, 0.3)
    elif preset == "su2":
        p = random_su2(4, max_mode=1)
        B = random_form(p.domain, 0, rng, SU2, 0.5, max_mode=1)
    else:
        p = random_abelian(4)
        B = random_form(p.domain, 0, rng, amplitude=0.5)
    A, g = p.connection, p.metric
    cc = cone_curvature(ConeOperator(A, B))
    lhs = cone_inner_product(cc, cc, g)
    base = curvature(A) + lefschetz_L(B)
    dAB = covariant_d(B, A)
    assert lhs == inner_product(base, base, g) + inner_product(dAB, dAB, g)
    fv = eval_cone_ym(A, B, g)
    assert lhs == pytest.approx(fv.value, rel=1e-14)


def test_cone_wedge_sign_rule(rng):
    x1 = ConeForm(random_form(D8, 1, rng), random_form(D8, 0, rng))
    x2 = ConeForm(random_form(D8, 1, rng), random_form(D8, 0, rng))
    prod = cone_wedge(x1, x2)
    expected = (x1.xi * x2.eta.data[0, 0]) * -1.0 + x2.xi * x1.eta.data[0, 0]
    np.testing.assert_allclose(prod.eta.data, expected.data, atol=1e-14)


def test_theta_integral_of_base_only(rng):
    assert theta_integral(ConeForm(random_form(D8, 4, rng), None)) == 0.0
