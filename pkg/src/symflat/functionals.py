"""Curvature functionals, their Euler-Lagrange residuals and Hessians, and Chern-Simons-type forms.

Values are L2 squared norms.  Residuals are reported unnormalized: the
gradient of every quadratic functional here is twice the residual form.
Residual norms in a ``FunctionalValue`` are sup norms over the grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DimensionError, DomainMismatchError, NotCriticalWarning
from .forms import (
    DifferentialForm,
    Metric,
    exterior_derivative,
    hodge_star,
    inner_product,
    integrate,
    random_form,
    sup_norm,
    trace,
    wedge,
)
from .gauge import Connection, covariant_codifferential, covariant_d, curvature
from .symplectic import (
    d_minus,
    d_plus,
    darboux_form,
    dual_lefschetz,
    half_dim,
    lefschetz_L,
    lefschetz_decompose_2form,
    zeta_decompose,
)

KINDS = ("ym", "pym", "phi", "cone")


@dataclass
class FunctionalValue:
    name: str
    value: float
    residuals: dict
    tolerance: float
    parts: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> dict:
        return {k: v <= self.tolerance for k, v in self.residuals.items()}

    @property
    def critical(self) -> bool:
        return all(self.verdicts.values())

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "residuals": dict(self.residuals),
                "tolerance": self.tolerance, "critical": self.critical, "parts": dict(self.parts)}


def _require_torus(A: Connection):
    if A.domain.kind != "torus":
        raise DomainMismatchError("integrated functionals need a torus domain")


def _phi(F: DifferentialForm) -> DifferentialForm:
    return dual_lefschetz(F) / half_dim(F.domain)


def primitive_curvature(A: Connection) -> DifferentialForm:
    if A.domain.dim < 4:
        raise DimensionError("the primitive part of a 2-form is trivial in dimension 2")
    return lefschetz_decompose_2form(curvature(A))[0]


# ---------------------------------------------------------------------------
# residuals


def el_residual(kind: str, A: Connection, g: Metric, B: DifferentialForm | None = None,
                verify: bool = False, rng=None, verify_tol: float = 1e-8):
    """Euler-Lagrange residual(s); the gradient of the functional is twice this.

    ym: d_A^* F.  pym: d_A^* F_p.  phi: d_A^*(Phi omega), whose pointwise norm
    equals |d_A Phi| in dimension 4.  cone: the pair
    (d_A^*(F + omega B) - [d_A B, B],  n (Phi + B) + d_A^* d_A B) with Phi = Lambda F / n.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown functional kind {kind!r}; expected one of {KINDS}")
    F = curvature(A)
    if kind == "ym":
        return covariant_codifferential(F, A, g)
    if kind == "pym":
        Fp = primitive_curvature(A)
        res = covariant_codifferential(Fp, A, g)
        if verify:
            _verify_pym_identity(A, Fp, res, g, rng, verify_tol)
        return res
    if kind == "phi":
        return covariant_codifferential(lefschetz_L(_phi(F)), A, g)
    if B is None:
        raise ValueError("cone residual needs B")
    n = half_dim(A.domain)
    dAB = covariant_d(B, A)
    r1 = covariant_codifferential(F + lefschetz_L(B), A, g)
    if not A.is_abelian:
        r1 = r1 - wedge(dAB, B, pairing="bracket")
    r2 = (_phi(F) + B) * n + covariant_codifferential(dAB, A, g)
    return r1, r2


def _verify_pym_identity(A, Fp, res, g, rng, tol):
    """<eta, d_A^* F_p> = <d+_A eta, F_p> on random 1-forms."""
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(3):
        eta = random_form(A.domain, 1, rng, A.algebra)
        lhs = inner_product(eta, res, g)
        rhs = inner_product(d_plus(eta, A), Fp, g)
        scale = math.sqrt(max(inner_product(eta, eta, g), 0)) * math.sqrt(max(inner_product(Fp, Fp, g), 0))
        if abs(lhs - rhs) > tol * max(scale, 1.0):
            raise ConsistencyError(f"pym residual identity off by {abs(lhs - rhs):.3e}")


def phi_codifferential_identity(phi: DifferentialForm, A: Connection, g: Metric) -> DifferentialForm:
    """-(1/(n-1)!) *((d_A Phi) ^ omega^{n-1}); equals d_A^*(Phi omega) for compatible metrics."""
    n = half_dim(phi.domain)
    x = covariant_d(phi, A)
    for _ in range(n - 1):
        x = lefschetz_L(x)
    return hodge_star(x, g) * (-1.0 / math.factorial(n - 1))


# ---------------------------------------------------------------------------
# values


def eval_ym(A: Connection, g: Metric, tol: float = 1e-6) -> FunctionalValue:
    _require_torus(A)
    F = curvature(A)
    return FunctionalValue("ym", inner_product(F, F, g),
                           {"d_A^*F": sup_norm(covariant_codifferential(F, A, g), g)}, tol)


def eval_pym(A: Connection, g: Metric, tol: float = 1e-6) -> FunctionalValue:
    _require_torus(A)
    Fp = primitive_curvature(A)
    return FunctionalValue("pym", inner_product(Fp, Fp, g),
                           {"d_A^*F_p": sup_norm(covariant_codifferential(Fp, A, g), g)}, tol)


def eval_phi_omega(A: Connection, g: Metric, tol: float = 1e-6) -> FunctionalValue:
    _require_torus(A)
    phi = _phi(curvature(A))
    po = lefschetz_L(phi)
    return FunctionalValue("phi", inner_product(po, po, g),
                           {"d_A Phi": sup_norm(covariant_d(phi, A), g)}, tol)


def eval_cone_ym(A: Connection, B: DifferentialForm, g: Metric, tol: float = 1e-6) -> FunctionalValue:
    """||F + omega B||^2 + ||d_A B||^2 with both critical-point residuals."""
    _require_torus(A)
    F = curvature(A)
    base = F + lefschetz_L(B)
    dAB = covariant_d(B, A)
    v1, v2 = inner_product(base, base, g), inner_product(dAB, dAB, g)
    r1, r2 = el_residual("cone", A, g, B)
    return FunctionalValue("cone", v1 + v2, {"A-equation": sup_norm(r1, g), "B-equation": sup_norm(r2, g)},
                           tol, parts={"||F+omega B||^2": v1, "||d_A B||^2": v2})


def eval_all(A: Connection, g: Metric, tol: float = 1e-6) -> dict:
    return {"ym": eval_ym(A, g, tol), "pym": eval_pym(A, g, tol), "phi": eval_phi_omega(A, g, tol)}


def functional_value(kind: str, A: Connection, g: Metric, B: DifferentialForm | None = None) -> float:
    """Just the number, used by finite-difference oracles and flows."""
    F = curvature(A)
    if kind == "ym":
        x = F
    elif kind == "pym":
        x = lefschetz_decompose_2form(F)[0]
    elif kind == "phi":
        x = lefschetz_L(_phi(F))
    elif kind == "cone":
        base = F + lefschetz_L(B)
        dAB = covariant_d(B, A)
        return inner_product(base, base, g) + inner_product(dAB, dAB, g)
    else:
        raise ValueError(f"unknown functional kind {kind!r}")
    return inner_product(x, x, g)


def eval_zeta_functionals(A: Connection, zeta: DifferentialForm, g: Metric,
                          B: DifferentialForm | None = None, tol: float = 1e-6) -> FunctionalValue:
    """||F||^2 split as ||F_perp||^2 + ||Phi zeta||^2, and the zeta-cone value when B is given."""
    _require_torus(A)
    F = curvature(A)
    F_perp, phi = zeta_decompose(F, zeta, g)
    pz = wedge(phi, zeta)
    parts = {"||F_perp||^2": inner_product(F_perp, F_perp, g), "||Phi zeta||^2": inner_product(pz, pz, g)}
    if B is not None:
        base = F + wedge(B, zeta)
        dAB = covariant_d(B, A)
        parts["||F+zeta B||^2"] = inner_product(base, base, g)
        parts["||d_A B||^2"] = inner_product(dAB, dAB, g)
    residuals = {"F - Phi zeta": sup_norm(F_perp, g), "d_A Phi": sup_norm(covariant_d(phi, A), g)}
    return FunctionalValue("zeta", inner_product(F, F, g), residuals, tol, parts)


# ---------------------------------------------------------------------------
# Hessians


def _star_bracket(X: DifferentialForm, eta: DifferentialForm, g: Metric) -> DifferentialForm:
    """*[*X, eta]."""
    return hodge_star(wedge(hodge_star(X, g), eta, pairing="bracket"), g)


def hessian_apply(kind: str, A: Connection, eta: DifferentialForm, g: Metric,
                  tol: float = 1e-6) -> DifferentialForm:
    """Linearized operator whose quadratic form is half the second variation.

    ym:  d_A^* d_A eta + *[*F, eta]
    pym: d_A^* d+_A eta + *[*F_p, eta]
    phi: d_A^*(omega ^ d-_A eta) + *[*(Phi omega), eta]
    """
    if eta.degree != 1:
        raise ValueError("Hessians act on 1-forms")
    if kind not in ("ym", "pym", "phi"):
        raise ValueError(f"unknown Hessian kind {kind!r}")
    res = el_residual(kind, A, g)
    if sup_norm(res, g) > tol:
        warnings.warn(f"connection is not a critical point of {kind} (residual {sup_norm(res, g):.2e})",
                      NotCriticalWarning, stacklevel=2)
    F = curvature(A)
    if kind == "ym":
        lin, X = covariant_codifferential(covariant_d(eta, A), A, g), F
    elif kind == "pym":
        lin, X = covariant_codifferential(d_plus(eta, A), A, g), lefschetz_decompose_2form(F)[0]
    else:
        lin, X = covariant_codifferential(lefschetz_L(d_minus(eta, A)), A, g), lefschetz_L(_phi(F))
    if A.is_abelian:
        return lin
    return lin + _star_bracket(X, eta, g)


# ---------------------------------------------------------------------------
# Chern-Simons-type forms


def _mprod(*forms):
    """Matrix-product wedge of a sequence of forms."""
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f, pairing="matrix")
    return out


def _tr_integral(top: DifferentialForm) -> float:
    return integrate(trace(top))


def _omega_like(A):
    return darboux_form(A.domain)


def chern_simons_p2(A: Connection, B: DifferentialForm, exact_tol: float = 1e-8) -> dict:
    """P2 = -(1/8 pi^2) int tr[omega B^2 + 2 B F - d(A B)] on a 2-torus.

    Returns the value and the separately integrated exact term, which must vanish.
    """
    if A.domain.dim != 2:
        raise DimensionError("P2 is defined on 2-dimensional tori")
    _require_torus(A)
    F = curvature(A)
    w = _omega_like(A)
    bulk = _tr_integral(_mprod(w, B, B)) + 2 * _tr_integral(_mprod(B, F))
    exact = _tr_integral(exterior_derivative(trace(_mprod(A.a, B))))
    if abs(exact) > exact_tol:
        raise ConsistencyError(f"exact term of P2 integrates to {exact:.3e}")
    return {"value": -(bulk - exact) / (8 * math.pi ** 2), "exact_term": exact}


def chern_simons_p2_variation(A: Connection, B: DifferentialForm, alpha: DifferentialForm,
                              b: DifferentialForm) -> float:
    """Directional derivative of P2 along (alpha, b):
    -(1/4 pi^2) int tr[b (F + omega B)] + (1/4 pi^2) int tr[d_A B ^ alpha]."""
    F = curvature(A)
    w = _omega_like(A)
    t1 = _tr_integral(_mprod(b, F + wedge(w, B)))
    t2 = _tr_integral(_mprod(covariant_d(B, A), alpha))
    return (-t1 + t2) / (4 * math.pi ** 2)


def chern_simons_p4(A: Connection, B: DifferentialForm, exact_tol: float = 1e-8) -> dict:
    """P4 = (-i/48) int tr[3BF^2 + 3 omega B^2 F + omega^2 B^3
    - d(B dA A + omega B A B + (3/2) B A^3 - B A dA)] on a 4-torus (complex value)."""
    if A.domain.dim != 4:
        raise DimensionError("P4 is defined on 4-dimensional tori")
    _require_torus(A)
    F = curvature(A)
    w = _omega_like(A)
    a, da = A.a, exterior_derivative(A.a)
    bulk = (3 * _tr_integral(_mprod(B, F, F)) + 3 * _tr_integral(_mprod(w, B, B, F))
            + _tr_integral(_mprod(w, w, B, B, B)))
    inner3 = (trace(_mprod(B, da, a)) + trace(_mprod(w, B, a, B))
              + trace(_mprod(B, a, a, a)) * 1.5 - trace(_mprod(B, a, da)))
    exact = integrate(exterior_derivative(inner3))
    if abs(exact) > exact_tol:
        raise ConsistencyError(f"exact term of P4 integrates to {exact:.3e}")
    return {"value": complex(0, -1) / 48 * (bulk - exact), "exact_term": exact}


def cs_invariant(phi: DifferentialForm) -> float:
    """int tr(Phi^{n+1}) omega^n."""
    n = half_dim(phi.domain)
    w = darboux_form(phi.domain)
    return _tr_integral(_mprod(*([phi] * (n + 1) + [w] * n)))
