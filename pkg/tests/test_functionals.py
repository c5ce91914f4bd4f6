import math
import warnings

import numpy as np
import pytest

from oracles import fd_first, fd_second
from symflat.errors import DimensionError, NotCriticalWarning
from symflat.forms import (
    SU2,
    DifferentialForm,
    Metric,
    TorusDomain,
    codifferential,
    exterior_derivative,
    inner_product,
    norm,
    pointwise_inner,
    random_form,
    sup_norm,
)
from symflat.functionals import (
    chern_simons_p2,
    chern_simons_p2_variation,
    chern_simons_p4,
    cs_invariant,
    el_residual,
    eval_all,
    eval_cone_ym,
    eval_zeta_functionals,
    hessian_apply,
    phi_codifferential_identity,
    primitive_curvature,
)
from symflat.gauge import Connection, curvature, gauge_apply, su2_group_field
from symflat.presets import constant_flux, flat_wilson, random_abelian, random_su2
from symflat.symplectic import d_plus, darboux_form, dual_lefschetz, lefschetz_L

GOLDEN = {"ym": 12 * math.pi ** 2, "pym": 11.5 * math.pi ** 2, "phi": math.pi ** 2 / 2}


def _su2(seed=0, amp=0.4):
    return random_su2(seed, amp, max_mode=1)


def test_flat_connection_zero_everything():
    p = flat_wilson(0.1, 0.2, 0.3, 0.4)
    for fv in eval_all(p.connection, p.metric).values():
        assert fv.value == 0.0
        assert all(v == 0.0 for v in fv.residuals.values())


def test_t4_values_and_verdicts(t4):
    vals = eval_all(t4.connection, t4.metric)
    for k, exact in GOLDEN.items():
        assert vals[k].value == pytest.approx(exact, rel=1e-4)
    assert vals["ym"].critical
    assert not vals["pym"].critical
    assert vals["phi"].residuals["d_A Phi"] > 0.01


def test_pym_needs_dimension_four():
    p = constant_flux(1.0, dim=2)
    with pytest.raises(DimensionError):
        primitive_curvature(p.connection)


def test_el_residual_kind_validation():
    p = flat_wilson()
    with pytest.raises(ValueError):
        el_residual("bogus", p.connection, p.metric)
    with pytest.raises(ValueError):
        el_residual("cone", p.connection, p.metric)


def test_pym_residual_identity_check():
    p = _su2(3)
    res = el_residual("pym", p.connection, p.metric, verify=True)
    assert res.degree == 1


@pytest.mark.parametrize("kind", ["ym", "pym", "phi"])
@pytest.mark.parametrize("preset", ["su2", "abelian", "t4_metric"])
def test_gradient_matches_finite_difference(kind, preset, rng):
    if preset == "su2":
        p = _su2(1)
        A, g = p.connection, p.metric
    elif preset == "abelian":
        p = random_abelian(2, max_mode=1)
        A, g = p.connection, p.metric
    else:
        p = random_abelian(3, max_mode=1, resolution=8)
        A, g = p.connection, Metric.t4_example(p.domain)
    r = el_residual(kind, A, g)
    for _ in range(3):
        eta = random_form(A.domain, 1, rng, A.algebra, max_mode=1)
        exact = 2 * inner_product(r, eta, g)
        scale = max(1.0, 2 * norm(r, g) * norm(eta, g))
        assert abs(exact - fd_first(kind, A, g, eta)) <= 1e-5 * scale


def test_cone_gradient_matches_finite_difference(rng):
    p = _su2(2)
    A, g = p.connection, p.metric
    B = random_form(p.domain, 0, rng, SU2, 0.5, max_mode=1)
    r1, r2 = el_residual("cone", A, g, B)
    for _ in range(3):
        eta = random_form(A.domain, 1, rng, SU2, max_mode=1)
        b = random_form(A.domain, 0, rng, SU2, max_mode=1)
        exact = 2 * inner_product(r1, eta, g) + 2 * inner_product(r2, b, g)
        scale = max(1.0, 2 * (norm(r1, g) * norm(eta, g) + norm(r2, g) * norm(b, g)))
        assert abs(exact - fd_first("cone", A, g, eta, B, b)) <= 1e-5 * scale


def test_values_gauge_invariant(rng):
    p = _su2(4)
    gf = su2_group_field(random_form(p.domain, 0, rng, SU2, 0.6, max_mode=1))
    A1 = gauge_apply(p.connection, gf)
    v0, v1 = eval_all(p.connection, p.metric), eval_all(A1, p.metric)
    for k in v0:
        assert abs(v0[k].value - v1[k].value) <= 1e-7


@pytest.mark.parametrize("c", [0.0, 0.7])
def test_cone_zero_at_symplectically_flat(c):
    p = constant_flux(c)
    fv = eval_cone_ym(p.connection, p.cone_B, p.metric)
    assert fv.value == 0.0
    assert fv.critical


def test_phi_codifferential_identity(rng):
    D = TorusDomain(4, 8)
    g = Metric.t4_example(D)
    A = Connection(DifferentialForm.zeros(D, 1))
    phi = random_form(D, 0, rng)
    lhs = codifferential(lefschetz_L(phi), g)
    rhs = phi_codifferential_identity(phi, A, g)
    assert np.max(np.abs((lhs - rhs).data)) <= 1e-8


def test_phi_residual_norm_matches_dphi(rng):
    p = random_abelian(5, max_mode=1)
    A, g = p.connection, p.metric
    phi = dual_lefschetz(curvature(A)) / 2
    r = el_residual("phi", A, g)
    np.testing.assert_allclose(pointwise_inner(r, r, g), pointwise_inner(exterior_derivative(phi),
                                                                          exterior_derivative(phi), g), atol=1e-12)


def test_zeta_functionals(rng):
    D = TorusDomain(4, 8)
    g = Metric.flat(D)
    A = Connection(random_form(D, 1, rng))
    # zeta = omega reduces to the symplectic split
    fv = eval_zeta_functionals(A, darboux_form(D), g)
    vals = eval_all(A, g)
    assert fv.parts["||F_perp||^2"] == pytest.approx(vals["pym"].value, rel=1e-12)
    assert fv.parts["||Phi zeta||^2"] == pytest.approx(vals["phi"].value, rel=1e-12)
    zeta = DifferentialForm.from_components(D, 2, {(0, 1): 1.0, (2, 3): 2.0})
    fv = eval_zeta_functionals(A, zeta, g)
    assert abs(fv.value - fv.parts["||F_perp||^2"] - fv.parts["||Phi zeta||^2"]) <= 1e-8 * fv.value
    flux = Connection(DifferentialForm.zeros(D, 1), zeta)
    assert eval_zeta_functionals(flux, zeta, g).residuals["F - Phi zeta"] <= 1e-15


# ---------------------------------------------------------------------------
# Hessians


def test_hessian_abelian_is_linearized_operator(rng):
    p = constant_flux(0.4)
    eta = random_form(p.domain, 1, rng)
    L = hessian_apply("pym", p.connection, eta, p.metric)
    ref = codifferential(d_plus(eta), p.metric)
    np.testing.assert_allclose(L.data, ref.data, atol=1e-13)


@pytest.mark.parametrize("kind", ["ym", "pym", "phi"])
def test_hessian_symmetric(kind, rng):
    p = _su2(6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotCriticalWarning)
        e1 = random_form(p.domain, 1, rng, SU2, max_mode=1)
        e2 = random_form(p.domain, 1, rng, SU2, max_mode=1)
        a = inner_product(hessian_apply(kind, p.connection, e1, p.metric), e2, p.metric)
        b = inner_product(e1, hessian_apply(kind, p.connection, e2, p.metric), p.metric)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


@pytest.mark.parametrize("kind", ["ym", "pym", "phi"])
def test_hessian_second_difference_noncritical(kind, rng):
    # along a straight line A + t eta the second variation is the Hessian form at any A
    p = _su2(7)
    eta = random_form(p.domain, 1, rng, SU2, max_mode=1)
    with pytest.warns(NotCriticalWarning):
        L = hessian_apply(kind, p.connection, eta, p.metric)
    q = 2 * inner_product(L, eta, p.metric)
    fd = fd_second(kind, p.connection, p.metric, eta)
    assert q == pytest.approx(fd, rel=1e-4)


def test_hessian_rejects_two_forms(rng):
    p = flat_wilson()
    with pytest.raises(ValueError):
        hessian_apply("ym", p.connection, random_form(p.domain, 2, rng), p.metric)


# ---------------------------------------------------------------------------
# Chern-Simons


def test_p2_flat_zero(rng):
    D = TorusDomain(2, 16)
    A = Connection(DifferentialForm.zeros(D, 1))
    B = DifferentialForm.zeros(D, 0)
    assert chern_simons_p2(A, B)["value"] == 0.0
    for _ in range(5):
        assert abs(chern_simons_p2_variation(A, B, random_form(D, 1, rng), random_form(D, 0, rng))) <= 1e-7


@pytest.mark.parametrize("algebra", ["abelian", "su2"])
def test_p2_variation_matches_finite_difference(algebra, rng):
    if algebra == "su2":
        p = random_su2(3, 0.5, dim=2, max_mode=1)
        B = random_form(p.domain, 0, rng, SU2, 0.5, max_mode=1)
    else:
        p = random_abelian(3, 0.5, dim=2, max_mode=1)
        B = random_form(p.domain, 0, rng, amplitude=0.5, max_mode=1)
    A = p.connection
    alg = A.algebra
    for _ in range(3):
        alpha = random_form(p.domain, 1, rng, alg, max_mode=1)
        b = random_form(p.domain, 0, rng, alg, max_mode=1)
        h = 1e-4
        f = lambda t: chern_simons_p2(Connection(A.a + alpha * t), B + b * t)["value"]  # noqa: E731
        fd = (f(h) - f(-h)) / (2 * h)
        assert chern_simons_p2_variation(A, B, alpha, b) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("c", [0.3, -1.2])
def test_p2_identity(c):
    p = constant_flux(c, dim=2)
    r = chern_simons_p2(p.connection, p.cone_B)
    assert r["value"] == pytest.approx(cs_invariant(p.phi) / (8 * math.pi ** 2), abs=1e-6)
    # n = 1: int Phi^2 omega = c^2 (2 pi)^2
    assert r["value"] == pytest.approx(c ** 2 / 2, rel=1e-12)


def test_p4_identity_constant_flux():
    p = constant_flux(0.7)
    r = chern_simons_p4(p.connection, p.cone_B)
    # int Phi^3 omega^2 = c^3 * 2 * vol
    expect = 1j / 48 * 0.7 ** 3 * 2 * (2 * math.pi) ** 4
    assert abs(r["value"] - expect) <= 1e-6


def test_p4_su2_constant_phi_vanishes_both_sides():
    # tr(Phi^3) = 0 for constant su2 Phi, and the P4 formula agrees
    D = TorusDomain(4, 8)
    A = Connection(DifferentialForm.zeros(D, 1, SU2))
    phi = DifferentialForm.scalar(D, np.array([0.3, -0.2, 0.5])[:, None, None, None, None], SU2)
    r = chern_simons_p4(A, -phi)
    assert abs(r["value"]) <= 1e-10
    assert abs(cs_invariant(phi)) <= 1e-10


def test_exact_terms_vanish_random_su2():
    p2 = random_su2(8, 0.5, dim=2, max_mode=1)
    rng = np.random.default_rng(0)
    assert abs(chern_simons_p2(p2.connection, random_form(p2.domain, 0, rng, SU2, max_mode=1))["exact_term"]) <= 1e-8
    p4 = random_su2(8, 0.5, resolution=8, max_mode=1)
    assert abs(chern_simons_p4(p4.connection, random_form(p4.domain, 0, rng, SU2, max_mode=1))["exact_term"]) <= 1e-8


def test_cs_dimension_errors():
    with pytest.raises(DimensionError):
        chern_simons_p2(flat_wilson().connection, DifferentialForm.zeros(flat_wilson().domain, 0))
    p = constant_flux(1.0, dim=2)
    with pytest.raises(DimensionError):
        chern_simons_p4(p.connection, p.cone_B)


def test_residual_sup_norms_match_report(t4):
    fv = eval_all(t4.connection, t4.metric)["ym"]
    r = el_residual("ym", t4.connection, t4.metric)
    assert fv.residuals["d_A^*F"] == sup_norm(r, t4.metric)
