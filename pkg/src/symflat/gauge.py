"""Connections, curvature, covariant derivatives, gauge action, flatness residuals, holonomy.

An abelian connection is a global real 1-form ``a`` plus a fixed closed
background flux ``beta`` (standing in for a nontrivial line bundle), so
F = beta + da.  An su2 connection lives on the trivial bundle: F = da + a ^ a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import AlgebraMismatchError, DegreeError, DomainMismatchError, GaugeError, InvalidConnectionError
from .forms import (
    ABELIAN,
    SU2,
    DifferentialForm,
    Metric,
    exterior_derivative,
    hodge_star,
    mat2_product,
    spectral_derivative,
    sup_norm,
    wedge,
)
from .symplectic import darboux_form, dual_lefschetz, half_dim

CLOSED_TOL = 1e-8
UNITARITY_TOL = 1e-10


class Connection:
    """Gauge connection: global 1-form part ``a`` and (abelian only) background flux ``beta``."""

    def __init__(self, a: DifferentialForm, beta: DifferentialForm | None = None, check: bool = True):
        if a.degree != 1:
            raise InvalidConnectionError("connection form must have degree 1")
        if a.algebra not in (ABELIAN, SU2):
            raise InvalidConnectionError(f"unsupported structure algebra {a.algebra.kind}")
        if beta is not None:
            if a.algebra is not ABELIAN:
                raise InvalidConnectionError("background flux is only allowed for abelian bundles")
            if beta.degree != 2 or beta.domain is not a.domain or beta.algebra is not ABELIAN:
                raise InvalidConnectionError("background flux must be a real 2-form on the same domain")
            if check and a.domain.kind == "torus" and a.domain.dim > 2:
                defect = float(np.max(np.abs(exterior_derivative(beta).data)))
                if defect > CLOSED_TOL * max(1.0, float(np.max(np.abs(beta.data)))):
                    raise InvalidConnectionError(f"background flux is not closed (|d beta| = {defect:.2e})")
        self.a = a
        self.beta = beta

    @property
    def domain(self):
        return self.a.domain

    @property
    def algebra(self):
        return self.a.algebra

    @property
    def is_abelian(self) -> bool:
        return self.a.algebra is ABELIAN

    def shifted(self, xi: DifferentialForm) -> "Connection":
        """A + xi, keeping the background flux."""
        return Connection(self.a + xi, self.beta, check=False)

    def __repr__(self):
        return f"Connection(algebra={self.algebra.kind}, flux={self.beta is not None}, domain={self.domain!r})"


def curvature(A: Connection) -> DifferentialForm:
    """abelian: beta + da;  su2: da + a ^ a with the matrix-product wedge."""
    da = exterior_derivative(A.a)
    if A.is_abelian:
        return da if A.beta is None else da + A.beta
    # a ^ a = (1/2)[a ^ a]; the matrix wedge has vanishing scalar part, so keep the su2 part
    aa = wedge(A.a, A.a, pairing="matrix").as_algebra(SU2)
    return DifferentialForm(A.domain, 2, da.data + aa.data, SU2)


def covariant_d(eta: DifferentialForm, A: Connection) -> DifferentialForm:
    """d_A eta = d eta + [a ^ eta] (the bracket term vanishes for abelian A)."""
    if eta.algebra is not A.algebra:
        raise AlgebraMismatchError(f"{eta.algebra.kind} form with {A.algebra.kind} connection")
    d_eta = exterior_derivative(eta)
    if A.is_abelian:
        return d_eta
    return DifferentialForm(eta.domain, eta.degree + 1,
                            d_eta.data + wedge(A.a, eta, pairing="bracket").data, SU2)


def covariant_codifferential(eta: DifferentialForm, A: Connection, g: Metric) -> DifferentialForm:
    """d_A^* eta = (-1)^{N(k+1)+1} * d_A * eta  (= -* d_A * in even dimension)."""
    if eta.degree == 0:
        raise DegreeError("codifferential of a 0-form")
    dim = eta.domain.dim
    sign = -1 if (dim * (eta.degree + 1) + 1) % 2 else 1
    return hodge_star(covariant_d(hodge_star(eta, g), A), g) * sign


# ---------------------------------------------------------------------------
# gauge transformations


@dataclass(frozen=True)
class GroupField:
    """Pointwise SU(2) element g0 + g.T stored as mat2 coefficients, shape (4, *grid)."""

    domain: object
    coeffs: np.ndarray

    def inverse(self) -> "GroupField":
        c = np.array(self.coeffs)
        c[1:] *= -1
        return GroupField(self.domain, c)

    def unitarity_defect(self) -> float:
        c = self.coeffs
        return float(np.max(np.abs(c[0] ** 2 + 0.25 * np.sum(c[1:] ** 2, axis=0) - 1.0)))


def su2_group_field(lam: DifferentialForm) -> GroupField:
    """exp(lam . T) for an su2-valued 0-form lam: cos(|lam|/2) + (2 sin(|lam|/2)/|lam|) lam . T."""
    if lam.degree != 0 or lam.algebra is not SU2:
        raise GaugeError("generator must be an su2-valued 0-form")
    v = lam.data[0]
    theta = np.sqrt(np.sum(v ** 2, axis=0))
    half = 0.5 * theta
    # sin(t/2) / (t/2) written via sinc to stay finite at t = 0
    factor = np.sinc(half / np.pi)
    coeffs = np.empty((4,) + v.shape[1:])
    coeffs[0] = np.cos(half)
    coeffs[1:] = factor * v
    return GroupField(lam.domain, coeffs)


def conjugate(gf: GroupField, eta: DifferentialForm) -> DifferentialForm:
    """g eta g^{-1} for an su2-valued form."""
    if eta.algebra is not SU2:
        raise AlgebraMismatchError("conjugation acts on su2-valued forms")
    ginv = gf.inverse().coeffs
    out = np.empty(eta.data.shape)
    for i in range(eta.ncomponents):
        x = np.zeros((4,) + eta.data.shape[2:])
        x[1:] = eta.data[i]
        out[i] = mat2_product(mat2_product(gf.coeffs, x), ginv)[1:]
    return DifferentialForm(eta.domain, eta.degree, out, SU2)


def gauge_apply(A: Connection, gfield) -> Connection:
    """Gauge transform.  abelian: gfield is a real 0-form lam, a -> a + d lam.
    su2: gfield is a GroupField, a -> g a g^{-1} - (dg) g^{-1}."""
    if A.is_abelian:
        if not isinstance(gfield, DifferentialForm) or gfield.degree != 0 or gfield.algebra is not ABELIAN:
            raise GaugeError("abelian gauge parameter must be a real 0-form")
        return Connection(A.a + exterior_derivative(gfield), A.beta, check=False)
    if not isinstance(gfield, GroupField):
        raise GaugeError("su2 gauge transformations need a GroupField")
    if gfield.domain is not A.domain:
        raise DomainMismatchError("group field lives on another domain")
    if A.domain.kind != "torus":
        raise DomainMismatchError("su2 gauge action needs a torus domain")
    if gfield.unitarity_defect() > UNITARITY_TOL:
        raise GaugeError(f"group field is not unitary (defect {gfield.unitarity_defect():.2e})")
    ginv = gfield.inverse().coeffs
    rotated = conjugate(gfield, A.a).data
    out = np.empty_like(rotated)
    for axis in range(A.domain.dim):
        dg = spectral_derivative(gfield.coeffs, A.domain, axis)
        out[axis] = rotated[axis] - mat2_product(dg, ginv)[1:]
    return Connection(DifferentialForm(A.domain, 1, out, SU2))


# ---------------------------------------------------------------------------
# flatness checks


@dataclass(frozen=True)
class FlatnessReport:
    """Sup-norm residuals |F - Phi zeta| and |d_A Phi| with verdicts at ``tolerance``."""

    curvature_residual: float
    phi_residual: float
    tolerance: float

    @property
    def curvature_ok(self) -> bool:
        return self.curvature_residual <= self.tolerance

    @property
    def phi_ok(self) -> bool:
        return self.phi_residual <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.curvature_ok and self.phi_ok


def check_zeta_flat(A: Connection, phi: DifferentialForm | None, zeta: DifferentialForm,
                    tol: float = 1e-6, g: Metric | None = None) -> FlatnessReport:
    """Residuals of F = Phi zeta and d_A Phi = 0."""
    if zeta.domain is not A.domain:
        raise DomainMismatchError("zeta lives on another domain")
    g = g or Metric.flat(A.domain)
    F = curvature(A)
    if phi is None:
        from .symplectic import zeta_decompose
        phi = zeta_decompose(F, zeta, g)[1]
    if phi.domain is not A.domain:
        raise DomainMismatchError("Phi lives on another domain")
    res_F = sup_norm(F - wedge(phi, zeta), g)
    res_phi = sup_norm(covariant_d(phi, A), g)
    return FlatnessReport(res_F, res_phi, tol)


def check_symplectically_flat(A: Connection, phi: DifferentialForm | None = None,
                              tol: float = 1e-6, g: Metric | None = None) -> FlatnessReport:
    """Residuals of F = Phi omega and d_A Phi = 0; Phi defaults to Lambda F / n."""
    if phi is None:
        phi = dual_lefschetz(curvature(A)) / half_dim(A.domain)
    return check_zeta_flat(A, phi, darboux_form(A.domain), tol, g)


# ---------------------------------------------------------------------------
# holonomy


@dataclass(frozen=True)
class AxisRectangle:
    """Counterclockwise rectangle in the (axis_u, axis_v) plane, axis_u < axis_v.

    ``origin`` gives all coordinates of the lower-left corner.
    """

    axis_u: int
    axis_v: int
    origin: tuple
    width: float
    height: float


def _axis_weights(n: int, period: float, op):
    """Linear functional on fft modes along one axis: ('eval', t) or ('int', lo, hi)."""
    m = np.fft.fftfreq(n, 1.0 / n)
    k = 2 * np.pi / period * m
    nyq = n // 2
    w = np.zeros(n, dtype=complex)
    if op[0] == "eval":
        t = op[1]
        w[:] = np.exp(1j * k * t)
        w[nyq] = np.cos(k[nyq] * t)
    else:
        lo, hi = op[1], op[2]
        nz = k != 0
        w[nz] = (np.exp(1j * k[nz] * hi) - np.exp(1j * k[nz] * lo)) / (1j * k[nz])
        w[~nz] = hi - lo
        kn = abs(k[nyq])
        w[nyq] = (np.sin(kn * hi) - np.sin(kn * lo)) / kn
    return w


def interpolant_functional(field: np.ndarray, domain, ops) -> float:
    """Apply per-axis evaluation/integration to the trigonometric interpolant of ``field``."""
    coeffs = sfft.fftn(field, norm="forward")
    for axis in reversed(range(domain.dim)):
        w = _axis_weights(domain.resolution[axis], domain.periods[axis], ops[axis])
        coeffs = coeffs @ w
    return float(np.real(coeffs))


def loop_holonomy(A: Connection, loop: AxisRectangle) -> complex:
    """exp(i (oint a + flux of beta through the rectangle)) for an abelian connection."""
    if not A.is_abelian:
        raise GaugeError("path-ordered su2 holonomy is not supported")
    D = A.domain
    if D.kind != "torus":
        raise DomainMismatchError("holonomy needs a torus domain")
    u, v = loop.axis_u, loop.axis_v
    if not 0 <= u < v < D.dim:
        raise ValueError("need 0 <= axis_u < axis_v < dim")
    if not (0 <= loop.width <= D.periods[u] and 0 <= loop.height <= D.periods[v]):
        raise ValueError("rectangle must fit inside one periodic cell")
    if loop.width == 0 or loop.height == 0:
        return complex(1.0)
    o = tuple(float(c) for c in loop.origin)
    u0, v0, u1, v1 = o[u], o[v], o[u] + loop.width, o[v] + loop.height

    def ops(**over):
        base = [("eval", o[i]) for i in range(D.dim)]
        for i, op in over.items():
            base[int(i[1:])] = op
        return base

    a_u = A.a.component((u,))[0]
    a_v = A.a.component((v,))[0]
    line = (interpolant_functional(a_u, D, ops(**{f"x{u}": ("int", u0, u1)}))
            + interpolant_functional(a_v, D, ops(**{f"x{u}": ("eval", u1), f"x{v}": ("int", v0, v1)}))
            - interpolant_functional(a_u, D, ops(**{f"x{u}": ("int", u0, u1), f"x{v}": ("eval", v1)}))
            - interpolant_functional(a_v, D, ops(**{f"x{v}": ("int", v0, v1)})))
    flux = 0.0
    if A.beta is not None:
        flux = interpolant_functional(A.beta.component((u, v))[0], D,
                                      ops(**{f"x{u}": ("int", u0, u1), f"x{v}": ("int", v0, v1)}))
    return complex(np.exp(1j * (line + flux)))


def rectangle_flux(F: DifferentialForm, loop: AxisRectangle) -> float:
    """Integral of F_{uv} over the rectangle (Stokes partner of the line integral)."""
    D = F.domain
    o = tuple(float(c) for c in loop.origin)
    u, v = loop.axis_u, loop.axis_v
    ops = [("eval", o[i]) for i in range(D.dim)]
    ops[u] = ("int", o[u], o[u] + loop.width)
    ops[v] = ("int", o[v], o[v] + loop.height)
    return interpolant_functional(F.component((u, v))[0], D, ops)
