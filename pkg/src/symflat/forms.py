"""Lie-algebra-valued differential forms on flat tori and on point clouds in R^4.

A form of degree k stores one algebra-valued field per strictly increasing
multi-index ``I = (i_0 < ... < i_{k-1})``, in lexicographic order.  Axes are
0-based throughout: ``dx_0`` is the first coordinate.  The data array of a
form has shape ``(C(dim, k), algebra.dim, *domain.shape)``.

On a ``TorusDomain`` the exterior derivative is Fourier collocation along each
axis.  A ``PointCloudDomain`` never differentiates numerically: a form there
can carry its exterior derivative as an attached, closed-form ``derivative``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import (
    AlgebraMismatchError,
    DegreeError,
    DegreeOverflowError,
    DomainMismatchError,
    MetricError,
    MissingDerivativeError,
)

# ---------------------------------------------------------------------------
# multi-index combinatorics


@lru_cache(maxsize=None)
def basis(k: int, dim: int) -> tuple:
    """Strictly increasing k-index tuples of range(dim), lexicographic."""
    if k < 0 or k > dim:
        return ()
    return tuple(itertools.combinations(range(dim), k))


@lru_cache(maxsize=None)
def basis_index(k: int, dim: int) -> dict:
    return {I: n for n, I in enumerate(basis(k, dim))}


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def wedge_table(k1: int, k2: int, dim: int) -> tuple:
    """Entries (iK, iI, iJ, sign) with dx_I ^ dx_J = sign dx_K."""
    index = basis_index(k1 + k2, dim)
    out = []
    for iI, I in enumerate(basis(k1, dim)):
        for iJ, J in enumerate(basis(k2, dim)):
            s = permutation_sign(I + J)
            if s:
                out.append((index[tuple(sorted(I + J))], iI, iJ, s))
    return tuple(out)


@lru_cache(maxsize=None)
def d_table(k: int, dim: int) -> dict:
    """axis -> tuple of (iK, i_source, sign) for d acting on k-forms."""
    src_index = basis_index(k, dim)
    table: dict = {}
    for iK, K in enumerate(basis(k + 1, dim)):
        for p, axis in enumerate(K):
            src = K[:p] + K[p + 1:]
            table.setdefault(axis, []).append((iK, src_index[src], -1 if p % 2 else 1))
    return {axis: tuple(v) for axis, v in table.items()}


@lru_cache(maxsize=None)
def star_table(k: int, dim: int) -> tuple:
    """Entries (iI, iIc, sign(I, I^c))."""
    comp_index = basis_index(dim - k, dim)
    out = []
    for iI, I in enumerate(basis(k, dim)):
        Ic = tuple(i for i in range(dim) if i not in I)
        out.append((iI, comp_index[Ic], permutation_sign(I + Ic)))
    return tuple(out)


# ---------------------------------------------------------------------------
# domains


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class TorusDomain:
    """Uniform periodic grid on a flat torus of dimension 2 or 4.

    Domains compare by identity: forms must share the very same domain object.
    """

    dim: int
    resolution: tuple
    periods: tuple

    def __init__(self, dim: int = 4, resolution=32, periods=2 * math.pi):
        if dim not in (2, 4):
            raise ValueError(f"torus dimension must be 2 or 4, got {dim}")
        res = (int(resolution),) * dim if np.isscalar(resolution) else tuple(int(r) for r in resolution)
        per = (float(periods),) * dim if np.isscalar(periods) else tuple(float(p) for p in periods)
        if len(res) != dim or len(per) != dim:
            raise ValueError("resolution and periods need one entry per axis")
        for r in res:
            if r < 8 or not _is_power_of_two(r):
                raise ValueError(f"resolution must be a power of two >= 8, got {r}")
        if any(p <= 0 for p in per):
            raise ValueError("periods must be positive")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "periods", per)

    kind = "torus"

    @property
    def shape(self) -> tuple:
        return self.resolution

    @property
    def npoints(self) -> int:
        return math.prod(self.resolution)

    @property
    def spacing(self) -> tuple:
        return tuple(p / r for p, r in zip(self.periods, self.resolution))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def volume(self) -> float:
        return math.prod(self.periods)

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return np.arange(self.resolution[axis]) * self.spacing[axis]

    def coordinates(self) -> list:
        """Sparse broadcastable coordinate arrays, one per axis."""
        return np.meshgrid(*(self.axis_coordinates(i) for i in range(self.dim)), indexing="ij", sparse=True)

    def wavenumbers(self, axis: int) -> np.ndarray:
        """rfft wavenumbers along ``axis`` with the Nyquist entry zeroed."""
        return _rfft_wavenumbers(self.resolution[axis], self.periods[axis])


@lru_cache(maxsize=None)
def _rfft_wavenumbers(n: int, period: float) -> np.ndarray:
    k = 2 * np.pi / period * np.arange(n // 2 + 1)
    k[-1] = 0.0  # Nyquist: odd derivatives of the real interpolant vanish there
    k.setflags(write=False)
    return k


class PointCloudDomain:
    """Finite set of distinct points in R^4; derivatives come from closed forms only."""

    kind = "cloud"
    dim = 4

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4 or len(pts) == 0:
            raise ValueError("points must be a nonempty (N, 4) array")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        pts.setflags(write=False)
        self.points = pts
        self.analytic = True

    @property
    def shape(self) -> tuple:
        return (len(self.points),)

    @property
    def npoints(self) -> int:
        return len(self.points)

    def coordinates(self) -> list:
        return [self.points[:, i] for i in range(4)]

    def __repr__(self):
        return f"PointCloudDomain(npoints={self.npoints})"


# ---------------------------------------------------------------------------
# Lie algebras


@dataclass(frozen=True)
class LieAlgebra:
    """Coefficient algebra for form values.

    ``abelian``: R (also used for plain scalar forms such as omega).
    ``su2``: coefficients on T_a = sigma_a / (2i), with [T_a, T_b] = eps_abc T_c
    and <X, Y> = -2 tr(XY), so {T_a} is orthonormal.
    ``mat2``: the span of {1, T_1, T_2, T_3} inside 2x2 complex matrices, closed
    under matrix products; used for traces and matrix-product wedges.
    """

    kind: str
    dim: int

    def bracket(self, x, y):
        if self.kind == "abelian":
            return np.zeros(np.broadcast_shapes(x.shape, y.shape))
        if self.kind == "su2":
            return np.cross(x, y, axis=0)
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
        out[1:] = np.cross(x[1:], y[1:], axis=0)
        return out

    def inner(self, x, y):
        """Pointwise algebra inner product, summed over the coefficient axis."""
        if self.kind == "mat2":
            raise AlgebraMismatchError("mat2 carries no invariant inner product; take a trace instead")
        return np.sum(x * y, axis=0)

    def trace(self, x):
        """Matrix trace of coefficient arrays (abelian fields are 1x1 matrices)."""
        if self.kind == "abelian":
            return x[0]
        if self.kind == "su2":
            return np.zeros(x.shape[1:])
        return 2.0 * x[0]

    def matrices(self) -> np.ndarray:
        """Basis matrices, shape (dim, n, n)."""
        if self.kind == "abelian":
            return np.ones((1, 1, 1), dtype=complex)
        sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
        T = sig / 2j
        if self.kind == "su2":
            return T
        return np.concatenate([np.eye(2, dtype=complex)[None], T])

    def to_matrix(self, x) -> np.ndarray:
        """Coefficient array (dim, ...) -> matrices (..., n, n)."""
        return np.tensordot(np.moveaxis(np.asarray(x), 0, -1), self.matrices(), axes=1)


ABELIAN = LieAlgebra("abelian", 1)
SU2 = LieAlgebra("su2", 3)
MAT2 = LieAlgebra("mat2", 4)

ALGEBRAS = {"abelian": ABELIAN, "su2": SU2, "mat2": MAT2}


def _embed_mat2(x, algebra):
    if algebra.kind == "mat2":
        return x
    out = np.zeros((4,) + x.shape[1:])
    out[1:] = x
    return out


def mat2_product(x, y):
    """(x0 + x.T)(y0 + y.T) using T_a T_b = -delta_ab/4 + eps_abc T_c / 2."""
    x0, xv = x[0], x[1:]
    y0, yv = y[0], y[1:]
    out = np.empty(np.broadcast_shapes(x.shape, y.shape))
    out[0] = x0 * y0 - 0.25 * np.sum(xv * yv, axis=0)
    out[1:] = x0 * yv + y0 * xv + 0.5 * np.cross(xv, yv, axis=0)
    return out


# ---------------------------------------------------------------------------
# metric


class Metric:
    """Diagonal metric g = sum_i g_i(x) dx_i^2 on a domain.

    ``coefficients`` are arrays (or scalars) broadcastable to ``domain.shape``.
    """

    def __init__(self, domain, coefficients, name: str = "custom"):
        if len(coefficients) != domain.dim:
            raise MetricError("need one diagonal coefficient per axis")
        coeffs = tuple(np.asarray(c, dtype=float) for c in coefficients)
        for c in coeffs:
            if np.any(~np.isfinite(c)) or np.any(c <= 0):
                raise MetricError("metric coefficients must be positive at every sample")
        self.domain = domain
        self.coefficients = coeffs
        self.name = name

    @classmethod
    def flat(cls, domain) -> "Metric":
        return cls(domain, (1.0,) * domain.dim, name="flat")

    @classmethod
    def t4_example(cls, domain) -> "Metric":
        """g = dx_0^2 + dx_1^2 + dx_2^2 / f + f dx_3^2, f = (3 + 2 s) / (1 - s / 2), s = sin 2x_1 cos x_2."""
        if domain.dim != 4:
            raise MetricError("the T^4 example metric lives in dimension 4")
        x = domain.coordinates()
        s = np.sin(2 * x[1]) * np.cos(x[2])
        f = (3 + 2 * s) / (1 - 0.5 * s)
        return cls(domain, (1.0, 1.0, 1.0 / f, f), name="t4_example")

    @property
    def is_flat(self) -> bool:
        return all(c.ndim == 0 and c == 1.0 for c in self.coefficients)

    @cached_property
    def sqrt_det(self):
        return np.sqrt(math.prod(self.coefficients))

    @cached_property
    def inverse(self) -> tuple:
        return tuple(1.0 / c for c in self.coefficients)

    def weight(self, I):
        """prod_{i in I} g^{ii}."""
        w = 1.0
        for i in I:
            w = w * self.inverse[i]
        return w

    def compatibility_defect(self) -> float:
        """max |g_{2i} g_{2i+1} - 1|; zero iff g is compatible with the Darboux form."""
        c = self.coefficients
        return max(float(np.max(np.abs(c[2 * i] * c[2 * i + 1] - 1.0))) for i in range(self.domain.dim // 2))

    def is_compatible(self, tol: float = 1e-12) -> bool:
        return self.compatibility_defect() <= tol


# ---------------------------------------------------------------------------
# forms


class DifferentialForm:
    """Algebra-valued k-form sampled on a domain.  Treated as immutable."""

    __array_priority__ = 100

    def __init__(self, domain, degree: int, data, algebra: LieAlgebra = ABELIAN, derivative=None):
        if not 0 <= degree <= domain.dim:
            raise DegreeError(f"degree {degree} outside [0, {domain.dim}]")
        data = np.asarray(data, dtype=float)
        expected = (math.comb(domain.dim, degree), algebra.dim) + tuple(domain.shape)
        if data.shape != expected:
            data = np.broadcast_to(data, expected)
        if data.flags.writeable:
            data.setflags(write=False)
        if derivative is not None and (derivative.degree != degree + 1 or derivative.domain is not domain):
            raise DegreeError("attached derivative must be a (k+1)-form on the same domain")
        self.domain = domain
        self.degree = degree
        self.algebra = algebra
        self.data = data
        self.derivative = derivative

    # -- construction helpers
    @classmethod
    def zeros(cls, domain, degree, algebra=ABELIAN):
        shape = (math.comb(domain.dim, degree), algebra.dim) + tuple(domain.shape)
        return cls(domain, degree, np.broadcast_to(0.0, shape), algebra)

    @classmethod
    def from_components(cls, domain, degree, components: dict, algebra=ABELIAN, derivative=None):
        """Build from {index tuple: field}; fields have shape domain.shape (abelian) or (m, *shape)."""
        index = basis_index(degree, domain.dim)
        data = np.zeros((len(index), algebra.dim) + tuple(domain.shape))
        for I, field in components.items():
            key = tuple(I)
            s = permutation_sign(key)
            if s == 0:
                raise DegreeError(f"repeated index in {key}")
            field = np.asarray(field, dtype=float)
            if algebra.dim == 1 and field.shape[:1] != (1,):
                field = field[None]
            data[index[tuple(sorted(key))]] += s * np.broadcast_to(field, data.shape[1:])
        return cls(domain, degree, data, algebra, derivative)

    @classmethod
    def scalar(cls, domain, field, algebra=ABELIAN, derivative=None):
        return cls.from_components(domain, 0, {(): field}, algebra, derivative)

    def component(self, I) -> np.ndarray:
        """Field for index I (any order; sign applied), shape (m, *shape)."""
        key = tuple(I)
        s = permutation_sign(key)
        if s == 0:
            return np.zeros(self.data.shape[1:])
        return s * self.data[basis_index(self.degree, self.domain.dim)[tuple(sorted(key))]]

    @property
    def ncomponents(self) -> int:
        return self.data.shape[0]

    def with_derivative(self, derivative):
        return DifferentialForm(self.domain, self.degree, self.data, self.algebra, derivative)

    def as_algebra(self, algebra):
        """Re-tag coefficients (su2 <-> mat2 embedding, abelian -> mat2 scalar)."""
        if algebra is self.algebra:
            return self
        if algebra.kind == "mat2":
            data = np.zeros((self.ncomponents, 4) + self.data.shape[2:])
            if self.algebra.kind == "su2":
                data[:, 1:] = self.data
            else:
                data[:, 0] = self.data[:, 0]
            return DifferentialForm(self.domain, self.degree, data, MAT2)
        if algebra.kind == "su2" and self.algebra.kind == "mat2":
            return DifferentialForm(self.domain, self.degree, self.data[:, 1:], SU2)
        raise AlgebraMismatchError(f"cannot view {self.algebra.kind} form as {algebra.kind}")

    # -- arithmetic
    def _check_compatible(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if other.domain is not self.domain:
            raise DomainMismatchError("forms live on different domains")
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError(f"{self.algebra.kind} vs {other.algebra.kind}")
        if other.degree != self.degree:
            raise DegreeError(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check_compatible(other)
        der = None
        if self.derivative is not None and other.derivative is not None:
            der = self.derivative + other.derivative
        return DifferentialForm(self.domain, self.degree, self.data + other.data, self.algebra, der)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        der = None if self.derivative is None else -self.derivative
        return DifferentialForm(self.domain, self.degree, -self.data, self.algebra, der)

    def __mul__(self, c):
        """Multiply by a real constant or a real scalar field of shape domain.shape."""
        c = np.asarray(c, dtype=float)
        der = None
        if self.derivative is not None and c.ndim == 0:
            der = self.derivative * c
        return DifferentialForm(self.domain, self.degree, self.data * c, self.algebra, der)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / np.asarray(c, dtype=float))

    def __repr__(self):
        return (f"DifferentialForm(degree={self.degree}, algebra={self.algebra.kind}, "
                f"domain={self.domain!r})")


def random_form(domain, degree, rng, algebra=ABELIAN, amplitude=1.0, max_mode=2):
    """Random real band-limited form: Fourier modes with |k_i| <= max_mode on each axis."""
    if domain.kind != "torus":
        raise DomainMismatchError("random band-limited forms need a torus domain")
    shape = (math.comb(domain.dim, degree), algebra.dim) + tuple(domain.shape)
    spec = np.zeros(shape, dtype=complex)
    box = tuple(slice(None) for _ in range(2))
    low = []
    for n in domain.resolution:
        idx = np.r_[0:max_mode + 1, n - max_mode:n]
        low.append(idx)
    sub = np.ix_(*low)
    block_shape = shape[:2] + tuple(len(i) for i in low)
    block = rng.standard_normal(block_shape) + 1j * rng.standard_normal(block_shape)
    spec[box + sub] = block
    axes = tuple(range(2, 2 + domain.dim))
    field = np.real(sfft.ifftn(spec, axes=axes, norm="forward"))
    scale = np.max(np.abs(field))
    return DifferentialForm(domain, degree, amplitude * field / scale, algebra)


# ---------------------------------------------------------------------------
# operations


def _check_same_domain(a, b):
    if a.domain is not b.domain:
        raise DomainMismatchError("forms live on different domains")


def spectral_derivative(data, domain, axis: int):
    """d/dx_axis of a periodic array whose trailing dims are domain.shape."""
    grid_axis = data.ndim - domain.dim + axis
    n = domain.resolution[axis]
    k = domain.wavenumbers(axis)
    bshape = [1] * data.ndim
    bshape[grid_axis] = len(k)
    spec = sfft.rfft(data, axis=grid_axis)
    spec *= 1j * k.reshape(bshape)
    return sfft.irfft(spec, n=n, axis=grid_axis)


def exterior_derivative(eta: DifferentialForm) -> DifferentialForm:
    """d eta.  Torus: Fourier collocation.  Point cloud: the attached closed-form table."""
    dim = eta.domain.dim
    if eta.degree >= dim:
        raise DegreeOverflowError(f"d of a {eta.degree}-form on a {dim}-dimensional domain")
    if eta.domain.kind == "cloud":
        if eta.derivative is None:
            raise MissingDerivativeError("point-cloud form has no analytic derivative table")
        return eta.derivative
    out = np.zeros((math.comb(dim, eta.degree + 1),) + eta.data.shape[1:])
    for axis, entries in d_table(eta.degree, dim).items():
        src = sorted({e[1] for e in entries})
        deriv = spectral_derivative(eta.data[src], eta.domain, axis)
        pos = {s: n for n, s in enumerate(src)}
        for iK, iS, sign in entries:
            if sign > 0:
                out[iK] += deriv[pos[iS]]
            else:
                out[iK] -= deriv[pos[iS]]
    return DifferentialForm(eta.domain, eta.degree + 1, out, eta.algebra)


def _pair(x, y, ax, ay, pairing):
    """Pointwise coefficient pairing; returns (values, result algebra)."""
    if pairing == "plain":
        if ax.kind == "abelian":
            return x * y, ay
        if ay.kind == "abelian":
            return x * y, ax
        raise AlgebraMismatchError("plain pairing needs one real-scalar factor")
    if pairing == "bracket":
        if ax is not ay:
            raise AlgebraMismatchError("bracket pairing needs a common algebra")
        return ax.bracket(x, y), ax
    if pairing == "inner":
        if ax is not ay:
            raise AlgebraMismatchError("inner pairing needs a common algebra")
        return ax.inner(x, y)[None], ABELIAN
    if pairing == "matrix":
        if ax.kind == "abelian" or ay.kind == "abelian":
            return x * y, (ay if ax.kind == "abelian" else ax)
        return mat2_product(_embed_mat2(x, ax), _embed_mat2(y, ay)), MAT2
    raise ValueError(f"unknown pairing {pairing!r}")


def wedge(alpha: DifferentialForm, beta: DifferentialForm, pairing: str = "plain") -> DifferentialForm:
    """alpha ^ beta with coefficients combined by ``pairing``.

    ``plain``: one factor must be real-scalar.  ``bracket``: [X, Y] on the
    coefficients.  ``inner``: the algebra inner product, giving a real form.
    ``matrix``: matrix product (su2 inputs give mat2 output).
    """
    _check_same_domain(alpha, beta)
    dim = alpha.domain.dim
    k = alpha.degree + beta.degree
    if k > dim:
        raise DegreeOverflowError(f"wedge of degrees {alpha.degree} + {beta.degree} > {dim}")
    out = None
    result_alg = None
    for iK, iI, iJ, s in wedge_table(alpha.degree, beta.degree, dim):
        val, result_alg = _pair(alpha.data[iI], beta.data[iJ], alpha.algebra, beta.algebra, pairing)
        if out is None:
            out = np.zeros((math.comb(dim, k),) + val.shape)
        out[iK] += s * val
    if out is None:
        # no index pairs survive; still type-check the pairing
        _, result_alg = _pair(alpha.data[0], beta.data[0], alpha.algebra, beta.algebra, pairing)
        return DifferentialForm.zeros(alpha.domain, k, result_alg)
    return DifferentialForm(alpha.domain, k, out, result_alg)


def hodge_star(eta: DifferentialForm, g: Metric) -> DifferentialForm:
    """*(dx_I) = sign(I, I^c) sqrt(det g) prod_{i in I} g^{ii} dx_{I^c}, pointwise."""
    if g.domain is not eta.domain:
        raise DomainMismatchError("metric and form live on different domains")
    dim = eta.domain.dim
    out = np.zeros((math.comb(dim, dim - eta.degree),) + eta.data.shape[1:])
    basis_k = basis(eta.degree, dim)
    for iI, iIc, s in star_table(eta.degree, dim):
        out[iIc] = (s * g.sqrt_det * g.weight(basis_k[iI])) * eta.data[iI]
    return DifferentialForm(eta.domain, dim - eta.degree, out, eta.algebra)


def pointwise_inner(alpha: DifferentialForm, beta: DifferentialForm, g: Metric) -> np.ndarray:
    """<alpha, beta>_g at each sample (no volume factor)."""
    _check_same_domain(alpha, beta)
    if alpha.degree != beta.degree:
        raise DegreeError("inner product needs equal degrees")
    if alpha.algebra is not beta.algebra:
        raise AlgebraMismatchError("inner product needs a common algebra")
    total = np.zeros(alpha.domain.shape)
    for iI, I in enumerate(basis(alpha.degree, alpha.domain.dim)):
        total = total + g.weight(I) * alpha.algebra.inner(alpha.data[iI], beta.data[iI])
    return total


def contract(alpha: DifferentialForm, zeta: DifferentialForm, g: Metric) -> DifferentialForm:
    """Algebra-valued pointwise contraction <alpha, zeta>_g with a real-scalar form zeta."""
    _check_same_domain(alpha, zeta)
    if zeta.algebra.kind != "abelian" or alpha.degree != zeta.degree:
        raise AlgebraMismatchError("contract needs a real-scalar second form of equal degree")
    total = np.zeros(alpha.data.shape[1:])
    for iI, I in enumerate(basis(alpha.degree, alpha.domain.dim)):
        total = total + g.weight(I) * alpha.data[iI] * zeta.data[iI]
    return DifferentialForm(alpha.domain, 0, total[None], alpha.algebra)


def inner_product(alpha: DifferentialForm, beta: DifferentialForm, g: Metric) -> float:
    """L2 inner product: grid sum of <alpha, beta>_g sqrt(det g) times the cell volume."""
    if alpha.domain.kind != "torus":
        raise DomainMismatchError("integrated inner products need a torus domain")
    return float(np.sum(pointwise_inner(alpha, beta, g) * g.sqrt_det) * alpha.domain.cell_volume)


def norm(eta: DifferentialForm, g: Metric) -> float:
    return math.sqrt(max(inner_product(eta, eta, g), 0.0))


def sup_norm(eta: DifferentialForm, g: Metric) -> float:
    """max over samples of the pointwise metric norm."""
    return math.sqrt(max(float(np.max(pointwise_inner(eta, eta, g))), 0.0))


def codifferential(eta: DifferentialForm, g: Metric) -> DifferentialForm:
    """d* eta = (-1)^{N(k+1)+1} * d * eta; equals -*d* in even dimension."""
    if eta.degree == 0:
        raise DegreeError("codifferential of a 0-form")
    dim = eta.domain.dim
    sign = -1 if (dim * (eta.degree + 1) + 1) % 2 else 1
    return hodge_star(exterior_derivative(hodge_star(eta, g)), g) * sign


def integrate(top: DifferentialForm):
    """Coordinate integral of a top-degree form; returns the coefficient vector (float if 1-dim)."""
    if top.degree != top.domain.dim:
        raise DegreeError("only top-degree forms integrate")
    if top.domain.kind != "torus":
        raise DomainMismatchError("integration needs a torus domain")
    axes = tuple(range(1, top.data.ndim - 1))
    vals = np.sum(top.data[0], axis=axes) * top.domain.cell_volume
    return float(vals[0]) if len(vals) == 1 else vals


def trace(eta: DifferentialForm) -> DifferentialForm:
    """Matrix trace of the coefficients; a real-scalar form."""
    data = np.stack([eta.algebra.trace(eta.data[i]) for i in range(eta.ncomponents)])[:, None]
    return DifferentialForm(eta.domain, eta.degree, data, ABELIAN)


def volume_form(domain, g: Metric | None = None) -> DifferentialForm:
    field = 1.0 if g is None else g.sqrt_det
    return DifferentialForm.from_components(domain, domain.dim, {tuple(range(domain.dim)): field})
