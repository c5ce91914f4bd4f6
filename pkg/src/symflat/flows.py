"""Gradient flows (ym, pym, cone) by fixed-step RK4 with step halving, and the
elliptic correction turning a connection into a primitive Yang-Mills one.

The flows integrate dA/dt = -(residual), i.e. half the L2 gradient:
ym: -d_A^* F;  pym: -d_A^* F_p;  cone: -(A-equation, B-equation).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainMismatchError,
    FlowDivergedError,
    InvalidConnectionError,
    StepUnderflowError,
)
from .forms import DifferentialForm, Metric, codifferential, exterior_derivative, sup_norm
from .functionals import el_residual, eval_all, functional_value, primitive_curvature
from .gauge import Connection
from .symplectic import half_dim, primitive_project

CSV_HEADER = ("time", "value_ym", "value_pym", "value_phi", "residual")
RK4_STABILITY = 2.785  # real-axis extent of the classical RK4 stability region
MONOTONE_SLACK = 1e-10
FLOW_KINDS = ("ym", "pym", "cone")


def max_symbol(domain, g: Metric, kind: str = "ym") -> float:
    """Upper estimate of the largest eigenvalue of the linearized flow operator."""
    inv_max = max(float(np.max(c)) for c in g.inverse)
    k2 = sum((2 * math.pi / p * (n // 2 - 1)) ** 2 for n, p in zip(domain.resolution, domain.periods))
    lam = k2 * inv_max
    if kind == "cone":
        lam += half_dim(domain)
    return lam


def default_step(domain, g: Metric, kind: str = "ym") -> float:
    """0.1 h^2, capped at 90% of the RK4 stability limit of the linearized operator."""
    h = min(domain.spacing)
    return min(0.1 * h * h, 0.9 * RK4_STABILITY / max_symbol(domain, g, kind))


@dataclass
class FlowConfig:
    kind: str = "pym"
    step: float | None = None
    max_steps: int = 500
    tolerance: float = 1e-8
    stride: int = 1
    preset: str | None = None

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"flow kind must be one of {FLOW_KINDS}")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_steps < 0 or self.stride < 1:
            raise ValueError("max_steps >= 0 and stride >= 1 required")


@dataclass
class FlowTrace:
    rows: list = field(default_factory=list)
    flowed_values: list = field(default_factory=list)
    halvings: int = 0
    steps: int = 0

    def record(self, t, values, residual, flowed):
        self.rows.append((t, values["ym"], values["pym"], values["phi"], residual))
        self.flowed_values.append(flowed)

    @property
    def times(self):
        return [r[0] for r in self.rows]

    def column(self, name: str) -> np.ndarray:
        return np.array([r[CSV_HEADER.index(name)] for r in self.rows])

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        v = np.asarray(self.flowed_values)
        return bool(np.all(np.diff(v) <= slack))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow([f"{x:.17g}" for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


@dataclass
class FlowState:
    connection: Connection
    B: DifferentialForm | None = None


def _velocity(kind, A, B, g):
    if kind == "cone":
        r1, r2 = el_residual("cone", A, g, B)
        return -r1.data, -r2.data
    return -el_residual(kind, A, g).data, None


def _residual_norm(kind, A, B, g):
    if kind == "cone":
        r1, r2 = el_residual("cone", A, g, B)
        return max(sup_norm(r1, g), sup_norm(r2, g))
    return sup_norm(el_residual(kind, A, g), g)


def _make(A0, B0, a_data, b_data):
    A = Connection(DifferentialForm(A0.domain, 1, a_data, A0.algebra), A0.beta, check=False)
    B = None if b_data is None else DifferentialForm(B0.domain, 0, b_data, B0.algebra)
    return A, B


def _rk4(kind, A, B, g, dt):
    a0 = A.a.data
    b0 = None if B is None else B.data

    def shifted(ka, kb, c):
        return _make(A, B, a0 + c * ka, None if b0 is None else b0 + c * kb)

    k1a, k1b = _velocity(kind, A, B, g)
    k2a, k2b = _velocity(kind, *shifted(k1a, k1b, dt / 2), g)
    k3a, k3b = _velocity(kind, *shifted(k2a, k2b, dt / 2), g)
    k4a, k4b = _velocity(kind, *shifted(k3a, k3b, dt), g)
    a1 = a0 + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
    b1 = None if b0 is None else b0 + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
    return _make(A, B, a1, b1)


def flow_run(A0: Connection, cfg: FlowConfig, g: Metric, B0: DifferentialForm | None = None,
             max_halvings: int = 20):
    """Integrate the gradient flow; returns (FlowState, FlowTrace)."""
    if A0.domain.kind != "torus" or A0.domain.dim != 4:
        raise DomainMismatchError("flows run on 4-dimensional tori")
    if cfg.kind == "cone" and B0 is None:
        raise InvalidConnectionError("cone flow needs an initial B")
    kind = cfg.kind
    B = B0 if kind == "cone" else None
    dt = cfg.step if cfg.step is not None else default_step(A0.domain, g, kind)
    min_dt = dt / 2 ** max_halvings
    A, t = A0, 0.0
    trace = FlowTrace()
    value = functional_value(kind, A, g, B)
    residual = _residual_norm(kind, A, g=g, B=B)
    trace.record(t, _values(A, g), residual, value)
    step = 0
    while step < cfg.max_steps and residual > cfg.tolerance:
        while True:
            # overflow is detected explicitly below, so numpy's warnings are redundant
            with np.errstate(all="ignore"):
                A_new, B_new = _rk4(kind, A, B, g, dt)
                finite = np.all(np.isfinite(A_new.a.data)) and (B_new is None or np.all(np.isfinite(B_new.data)))
                new_value = functional_value(kind, A_new, g, B_new) if finite else math.nan
            if not finite:
                raise FlowDivergedError(f"non-finite state at t = {t:.6g}")
            if not math.isfinite(new_value):
                raise FlowDivergedError(f"non-finite functional value at t = {t:.6g}")
            if new_value <= value + MONOTONE_SLACK:
                break
            dt /= 2
            trace.halvings += 1
            if dt < min_dt:
                raise StepUnderflowError("step halving did not restore monotonicity")
        A, B, value, t = A_new, B_new, new_value, t + dt
        step += 1
        residual = _residual_norm(kind, A, g=g, B=B)
        if step % cfg.stride == 0 or residual <= cfg.tolerance or step == cfg.max_steps:
            trace.record(t, _values(A, g), residual, value)
    trace.steps = step
    return FlowState(A, B), trace


def _values(A, g):
    return {k: v.value for k, v in eval_all(A, g).items()}


def initial_speed(A: Connection, g: Metric, kind: str = "pym") -> float:
    """sup norm of dA/dt at t = 0."""
    return sup_norm(el_residual(kind, A, g), g)


# ---------------------------------------------------------------------------
# conjugate gradients


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float


def conjugate_gradient(apply, b, precond=None, tol=1e-10, maxiter=500, norm=None) -> CGResult:
    """Preconditioned CG for a Euclidean-symmetric positive semidefinite operator.

    Stops when ``norm(b - A x) <= tol`` (default: max-abs), raising ConvergenceError
    past ``maxiter`` iterations.
    """
    norm = norm or (lambda r: float(np.max(np.abs(r))))
    precond = precond or (lambda r: r)
    x = np.zeros_like(b)
    r = b.copy()
    if norm(r) <= tol:
        return CGResult(x, 0, norm(r))
    z = precond(r)
    p = z.copy()
    rz = float(np.vdot(r, z))
    for it in range(1, maxiter + 1):
        Ap = apply(p)
        pAp = float(np.vdot(p, Ap))
        if pAp <= 0:
            raise ConvergenceError("operator is not positive on the search direction")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        res = norm(r)
        if res <= tol:
            return CGResult(x, it, res)
        z = precond(r)
        rz_new = float(np.vdot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"CG did not converge in {maxiter} iterations (residual {res:.3e})")


def laplacian_preconditioner(domain, g: Metric, weights: np.ndarray):
    """Fourier inverse of the constant-coefficient Laplacian sum_i <g^ii> d_i^2, per component,
    divided by the mean quadrature weight of that component.  The zero mode maps to 1 / weight."""
    coef = [float(np.mean(c * np.ones(domain.shape))) for c in g.inverse]
    k2 = 0.0
    for axis in range(domain.dim):
        n, p = domain.resolution[axis], domain.periods[axis]
        m = np.fft.fftfreq(n, 1.0 / n) if axis < domain.dim - 1 else np.arange(n // 2 + 1)
        shape = [1] * domain.dim
        shape[axis] = len(m)
        k2 = k2 + coef[axis] * ((2 * np.pi / p * m) ** 2).reshape(shape)
    inv = np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 1.0)
    wbar = np.array([float(np.mean(w)) for w in weights]).reshape((-1,) + (1,) * (weights.ndim - 1))
    axes = tuple(range(-domain.dim, 0))

    def apply(r):
        spec = sfft.rfftn(r, axes=axes)
        return sfft.irfftn(spec * inv, s=domain.resolution, axes=axes) / wbar

    return apply


@dataclass
class PymCorrection:
    xi: DifferentialForm
    iterations: int
    residual: float


def solve_pym_correction(A: Connection, g: Metric, tol: float = 1e-8, maxiter: int = 400) -> PymCorrection:
    """Solve (d^* Pi d + d d^*) xi = -d^* F_p for abelian A (Coulomb-gauge normal equations)."""
    if not A.is_abelian:
        raise InvalidConnectionError("the correction solve is implemented for abelian connections")
    D = A.domain
    if D.kind != "torus" or D.dim != 4:
        raise DomainMismatchError("the correction solve needs a 4-torus")
    Fp = primitive_curvature(A)
    rhs = -codifferential(Fp, g)
    weights = np.stack([g.inverse[i] * g.sqrt_det * D.cell_volume * np.ones(D.shape) for i in range(D.dim)])
    weights = weights[:, None]

    def K(x):
        xi = DifferentialForm(D, 1, x, A.algebra)
        y = codifferential(primitive_project(exterior_derivative(xi)), g)
        y = y + exterior_derivative(codifferential(xi, g))
        return y.data

    # Euclidean-symmetric form: (W K) x = W rhs, W the diagonal quadrature weights
    res = conjugate_gradient(lambda x: weights * K(x), weights * rhs.data,
                             precond=laplacian_preconditioner(D, g, weights),
                             tol=tol, maxiter=maxiter,
                             norm=lambda r: float(np.max(np.abs(r / weights))))
    xi = DifferentialForm(D, 1, res.x, A.algebra)
    return PymCorrection(xi, res.iterations, res.residual)


def make_pym_from_ym(A: Connection, g: Metric, tol: float = 1e-6, cg_tol: float = 1e-8,
                     maxiter: int = 400) -> Connection:
    """A' = A + xi with d^*(F_p + d+ xi) = 0.

    If A was Yang-Mills but not primitive Yang-Mills, also asserts that A' is not Yang-Mills.
    """
    was_ym = sup_norm(el_residual("ym", A, g), g) <= tol
    was_pym = sup_norm(el_residual("pym", A, g), g) <= tol
    corr = solve_pym_correction(A, g, cg_tol, maxiter)
    A1 = A.shifted(corr.xi)
    pym_res = sup_norm(el_residual("pym", A1, g), g)
    if pym_res > tol:
        raise ConvergenceError(f"corrected connection has pym residual {pym_res:.3e}")
    if was_ym and not was_pym:
        ym_res = sup_norm(el_residual("ym", A1, g), g)
        if ym_res <= 10 * tol:
            raise ConsistencyError("corrected connection is still Yang-Mills")
    return A1
