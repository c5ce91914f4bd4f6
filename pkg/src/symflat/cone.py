"""Mapping-cone forms xi + theta eta with d theta = sigma (sigma = omega by default).

Sign convention for the cone differential, fixed once:

    D_C(xi + theta eta) = (d_A xi + sigma ^ eta) + theta (B . xi - d_A eta)

With it D_C^2 is multiplication by the cone curvature
(F + sigma B) - theta d_A B, i.e.

    D_C^2(xi + theta eta) = (F + sigma B) . xi + theta ((F + sigma B) . eta - (d_A B) . xi)

for every degree.  ``.`` is the action of the structure algebra on the
coefficients: the bracket (adjoint bundle) or plain multiplication (the
fundamental representation of an abelian connection without background flux).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlgebraMismatchError, DegreeError, DomainMismatchError, InvalidConnectionError
from .forms import (
    DifferentialForm,
    Metric,
    exterior_derivative,
    hodge_star,
    inner_product,
    integrate,
    wedge,
)
from .gauge import Connection, covariant_d, curvature
from .symplectic import ClosedTwoForm, darboux_form


@dataclass(frozen=True)
class ConeForm:
    """xi + theta eta; ``xi`` has degree k, ``eta`` degree k - 1, either may be None when out of range."""

    xi: DifferentialForm | None
    eta: DifferentialForm | None

    def __post_init__(self):
        if self.xi is None and self.eta is None:
            raise DegreeError("a cone form needs at least one slot")
        if self.xi is not None and self.eta is not None:
            if self.eta.degree != self.xi.degree - 1:
                raise DegreeError("theta slot must have degree one less than the base slot")
            if self.xi.domain is not self.eta.domain:
                raise DomainMismatchError("cone slots live on different domains")
            if self.xi.algebra is not self.eta.algebra:
                raise AlgebraMismatchError("cone slots carry different algebras")

    @property
    def degree(self) -> int:
        return self.xi.degree if self.xi is not None else self.eta.degree + 1

    @property
    def domain(self):
        return (self.xi if self.xi is not None else self.eta).domain

    @property
    def algebra(self):
        return (self.xi if self.xi is not None else self.eta).algebra

    def __add__(self, other):
        return ConeForm(_add(self.xi, other.xi), _add(self.eta, other.eta))

    def __neg__(self):
        return ConeForm(_scale(self.xi, -1.0), _scale(self.eta, -1.0))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return ConeForm(_scale(self.xi, c), _scale(self.eta, c))

    __rmul__ = __mul__


def _add(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return x + y


def _scale(x, c):
    return None if x is None else x * c


class ConeOperator:
    """D_C = d_A + theta B with d theta = sigma."""

    def __init__(self, A: Connection, B: DifferentialForm, sigma: DifferentialForm | None = None,
                 action: str = "adjoint", g: Metric | None = None):
        if B.degree != 0 or B.domain is not A.domain:
            raise DegreeError("B must be a 0-form on the connection's domain")
        if B.algebra is not A.algebra:
            raise AlgebraMismatchError("B must take values in the connection's algebra")
        if action not in ("adjoint", "fundamental"):
            raise ValueError(f"unknown action {action!r}")
        if action == "fundamental" and (not A.is_abelian or A.beta is not None):
            raise InvalidConnectionError("fundamental action needs an abelian connection without background flux")
        if sigma is None:
            sigma = darboux_form(A.domain)
        elif A.domain.kind == "torus":
            ClosedTwoForm.certify(sigma, g)
        self.A = A
        self.B = B
        self.sigma = sigma
        self.action = action

    def act(self, X: DifferentialForm, xi: DifferentialForm) -> DifferentialForm:
        """X . xi for an algebra-valued form X acting on the coefficients of xi."""
        if self.action == "adjoint":
            return wedge(X, xi, pairing="bracket")
        return wedge(X, xi, pairing="plain")

    def d_A(self, xi: DifferentialForm) -> DifferentialForm:
        if self.action == "adjoint":
            return covariant_d(xi, self.A)
        return exterior_derivative(xi) + wedge(self.A.a, xi)

    def curvature(self) -> DifferentialForm:
        if self.action == "adjoint":
            return curvature(self.A)
        return exterior_derivative(self.A.a)


def cone_d(c: ConeForm, op: ConeOperator) -> ConeForm:
    """D_C(xi + theta eta) = (d_A xi + sigma ^ eta) + theta (B . xi - d_A eta)."""
    if c.algebra is not op.A.algebra:
        raise AlgebraMismatchError("cone form and operator carry different algebras")
    dim = c.domain.dim
    base = None
    if c.xi is not None and c.xi.degree < dim:
        base = op.d_A(c.xi)
    if c.eta is not None and c.eta.degree + 2 <= dim:
        base = _add(base, wedge(op.sigma, c.eta))
    theta = None
    if c.xi is not None:
        theta = op.act(op.B, c.xi)
    if c.eta is not None and c.eta.degree < dim:
        theta = _add(theta, -op.d_A(c.eta))
    if base is None and theta is None:
        raise DegreeError("D_C leaves the degree range")
    return ConeForm(base, theta)


def cone_curvature(op: ConeOperator) -> ConeForm:
    """(F + sigma B) - theta d_A B.

    B is an endomorphism field, so d_A B is the adjoint derivative whatever the action on forms.
    """
    return ConeForm(op.curvature() + wedge(op.sigma, op.B), -covariant_d(op.B, op.A))


def cone_curvature_apply(op: ConeOperator, c: ConeForm) -> ConeForm:
    """Multiplication by the cone curvature: F~ . xi + theta (F~_0 . eta - (d_A B) . xi)."""
    curv = cone_curvature(op)
    dim = c.domain.dim
    base = theta = None
    if c.xi is not None and c.xi.degree + 2 <= dim:
        base = op.act(curv.xi, c.xi)
    if c.xi is not None and c.xi.degree + 1 <= dim:
        theta = op.act(curv.eta, c.xi)
    if c.eta is not None and c.eta.degree + 2 <= dim:
        theta = _add(theta, op.act(curv.xi, c.eta))
    return ConeForm(base, theta)


def cone_star(c: ConeForm, g: Metric) -> ConeForm:
    """xi + theta eta -> *eta + theta (-1)^{|xi|} *xi."""
    k = c.degree
    xi = None if c.eta is None else hodge_star(c.eta, g)
    eta = None if c.xi is None else hodge_star(c.xi, g) * (-1.0) ** k
    return ConeForm(xi, eta)


def _slot_inner(x, y, g):
    if x is None or y is None:
        return 0.0
    return inner_product(x, y, g)


def cone_inner_product(c1: ConeForm, c2: ConeForm, g: Metric) -> float:
    """<xi1, xi2> + <eta1, eta2>."""
    if c1.degree != c2.degree:
        raise DegreeError("cone inner product needs equal degrees")
    return _slot_inner(c1.xi, c2.xi, g) + _slot_inner(c1.eta, c2.eta, g)


def cone_wedge(c1: ConeForm, c2: ConeForm, pairing: str = "plain") -> ConeForm:
    """(xi1 + theta eta1)(xi2 + theta eta2) = xi1 xi2 + theta((-1)^{|xi1|} xi1 eta2 + eta1 xi2)."""
    dim = c1.domain.dim
    k1, k2 = c1.degree, c2.degree
    base = theta = None
    if c1.xi is not None and c2.xi is not None and k1 + k2 <= dim:
        base = wedge(c1.xi, c2.xi, pairing)
    if c1.xi is not None and c2.eta is not None and k1 + k2 - 1 <= dim:
        theta = wedge(c1.xi, c2.eta, pairing) * (-1.0) ** k1
    if c1.eta is not None and c2.xi is not None and k1 + k2 - 1 <= dim:
        theta = _add(theta, wedge(c1.eta, c2.xi, pairing))
    if base is None and theta is None:
        raise DegreeError("cone product leaves the degree range")
    return ConeForm(base, theta)


def theta_integral(c: ConeForm) -> float:
    """Integral over M of d/d theta of a cone form of degree dim + 1."""
    if c.eta is None:
        return 0.0
    return integrate(c.eta)


def cone_norm_via_star(c: ConeForm, g: Metric) -> float:
    """<c, c>_C computed as the integral of d/d theta (c ^ *_C c)."""
    return theta_integral(cone_wedge(c, cone_star(c, g), pairing="inner"))
