"""Darboux form, Lefschetz operators, primitive projection and the splitting d = d+ + omega ^ d-.

Conventions (0-based axes): omega = sum_i dx_{2i} ^ dx_{2i+1}, n = dim / 2.
The dual operator is the metric-free bivector contraction
Lambda = sum_i iota_{2i+1} iota_{2i}, so Lambda omega = n and Lambda never
reads a metric.  Under a compatible metric it is the adjoint of L.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateZetaError,
    DegreeError,
    DegreeOverflowError,
    DimensionError,
    NotClosedError,
    NotPrimitiveError,
)
from .errors import DimensionTooSmallWarning
from .forms import (
    ABELIAN,
    DifferentialForm,
    Metric,
    basis,
    basis_index,
    contract,
    exterior_derivative,
    pointwise_inner,
    sup_norm,
    wedge,
)

PRIMITIVE_TOL = 1e-8


@lru_cache(maxsize=None)
def _darboux_cached(domain):
    comps = {(2 * i, 2 * i + 1): 1.0 for i in range(domain.dim // 2)}
    return DifferentialForm.from_components(domain, 2, comps)


def darboux_form(domain) -> DifferentialForm:
    """omega = dx_0 ^ dx_1 (+ dx_2 ^ dx_3)."""
    return _darboux_cached(domain)


def half_dim(domain) -> int:
    return domain.dim // 2


@lru_cache(maxsize=None)
def lambda_table(k: int, dim: int) -> tuple:
    """Entries (i_target, i_source, sign) for Lambda on k-forms."""
    target = basis_index(k - 2, dim)
    out = []
    for iI, I in enumerate(basis(k, dim)):
        for i in range(dim // 2):
            a, b = 2 * i, 2 * i + 1
            if a in I and b in I:
                # iota_a removes a with sign (-1)^pos(a); iota_b then removes b from the rest
                pa = I.index(a)
                rest = I[:pa] + I[pa + 1:]
                pb = rest.index(b)
                sign = (-1) ** (pa + pb)
                out.append((target[rest[:pb] + rest[pb + 1:]], iI, sign))
    return tuple(out)


def lefschetz_L(eta: DifferentialForm) -> DifferentialForm:
    """omega ^ eta."""
    if eta.degree + 2 > eta.domain.dim:
        raise DegreeOverflowError(f"L of a {eta.degree}-form in dimension {eta.domain.dim}")
    return wedge(darboux_form(eta.domain), eta)


def dual_lefschetz(eta: DifferentialForm) -> DifferentialForm:
    """Lambda eta by contraction with the inverse bivector (metric-free)."""
    if eta.degree < 2:
        raise DegreeError("dual Lefschetz needs degree >= 2")
    dim = eta.domain.dim
    out = np.zeros((math.comb(dim, eta.degree - 2),) + eta.data.shape[1:])
    for iT, iS, s in lambda_table(eta.degree, dim):
        out[iT] += s * eta.data[iS]
    return DifferentialForm(eta.domain, eta.degree - 2, out, eta.algebra)


def lefschetz_decompose_2form(eta: DifferentialForm):
    """eta = eta_p + Phi omega with Phi = Lambda eta / n; returns (eta_p, Phi)."""
    if eta.degree != 2:
        raise DegreeError("decomposition is for 2-forms")
    n = half_dim(eta.domain)
    phi = dual_lefschetz(eta) / n
    if eta.domain.dim == 2:
        warnings.warn("in dimension 2 every 2-form is a multiple of omega; primitive part is 0",
                      DimensionTooSmallWarning, stacklevel=2)
        return DifferentialForm.zeros(eta.domain, 2, eta.algebra), phi
    return eta - lefschetz_L(phi), phi


def primitive_project(eta: DifferentialForm) -> DifferentialForm:
    """Primitive part of a form of degree <= 3 in dimension <= 4.

    Degrees 0 and 1 are already primitive.  For degree j in dimension 2n the
    projection is eta - L(Lambda eta / (n - j + 2)), which is exact whenever
    Lambda eta is primitive (always the case here).  Degrees above n have no
    primitive part, and the formula returns 0 for them.
    """
    dim, j = eta.domain.dim, eta.degree
    if dim not in (2, 4) or j > 3 or j > dim:
        raise DimensionError(f"primitive projection not supported for degree {j} in dimension {dim}")
    if j < 2:
        return eta
    n = half_dim(eta.domain)
    return eta - lefschetz_L(dual_lefschetz(eta) / (n - j + 2))


def _check_primitive(eta: DifferentialForm, tol: float):
    if eta.degree < 2:
        return
    lam = dual_lefschetz(eta)
    scale = max(float(np.max(np.abs(eta.data))), 1.0)
    if float(np.max(np.abs(lam.data))) > tol * scale:
        raise NotPrimitiveError("input is not primitive (Lambda eta != 0)")


def _deriv(eta, connection):
    if connection is None:
        return exterior_derivative(eta)
    from .gauge import covariant_d
    return covariant_d(eta, connection)


def d_plus(eta: DifferentialForm, connection=None, tol: float = PRIMITIVE_TOL) -> DifferentialForm:
    """Primitive part of d eta (or of d_A eta when a connection is given)."""
    _check_primitive(eta, tol)
    d_eta = _deriv(eta, connection)
    if eta.degree == 0:
        return d_eta
    return primitive_project(d_eta)


def d_minus(eta: DifferentialForm, connection=None, tol: float = PRIMITIVE_TOL):
    """The form d- eta with d eta = d+ eta + omega ^ d- eta; None for 0-forms (d- = 0)."""
    _check_primitive(eta, tol)
    if eta.degree == 0:
        return None
    if eta.degree + 1 > eta.domain.dim:
        raise DegreeOverflowError("d of a top-degree form")
    d_eta = _deriv(eta, connection)
    n, j = half_dim(eta.domain), eta.degree + 1
    return dual_lefschetz(d_eta) / (n - j + 2)


def twisted_d_plus(eta, connection, tol: float = PRIMITIVE_TOL):
    return d_plus(eta, connection, tol)


def twisted_d_minus(eta, connection, tol: float = PRIMITIVE_TOL):
    return d_minus(eta, connection, tol)


def zeta_decompose(F: DifferentialForm, zeta: DifferentialForm, g: Metric, floor: float = 1e-14):
    """Pointwise F = F_perp + Phi zeta with <F_perp, zeta>_g = 0; returns (F_perp, Phi)."""
    if F.degree != 2 or zeta.degree != 2:
        raise DegreeError("zeta decomposition is for 2-forms")
    zz = pointwise_inner(zeta, zeta, g)
    if float(np.min(zz)) <= floor:
        raise DegenerateZetaError("zeta vanishes at a sample point")
    phi = contract(F, zeta, g) / zz
    return F - wedge(phi, zeta), phi


@dataclass(frozen=True)
class ClosedTwoForm:
    """A 2-form together with its closedness certificate sup|d zeta|."""

    form: DifferentialForm
    defect: float
    tolerance: float

    @classmethod
    def certify(cls, form: DifferentialForm, g: Metric | None = None, tolerance: float = 1e-8):
        if form.degree != 2:
            raise DegreeError("zeta must be a 2-form")
        if form.algebra is not ABELIAN:
            raise DegreeError("zeta must be real-valued")
        if form.domain.dim == 2:
            defect = 0.0
        else:
            g = g or Metric.flat(form.domain)
            defect = sup_norm(exterior_derivative(form), g)
        if defect > tolerance:
            raise NotClosedError(f"|d zeta| = {defect:.3e} exceeds {tolerance:.1e}")
        return cls(form, defect, tolerance)

    def pointwise_norm(self, g: Metric) -> np.ndarray:
        return np.sqrt(pointwise_inner(self.form, self.form, g))
