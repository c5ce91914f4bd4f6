"""Named connection presets and the ``name(args)`` registry.

Presets bundle a domain, a metric, a connection and whatever exact data is
known in closed form (Phi, the cone field B, reference curvature).
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneError
from .forms import ABELIAN, SU2, DifferentialForm, Metric, PointCloudDomain, TorusDomain, random_form
from .gauge import Connection
from .symplectic import darboux_form


@dataclass
class Preset:
    name: str
    domain: object
    metric: Metric
    connection: Connection
    phi: DifferentialForm | None = None
    symplectically_flat: bool | None = None
    extras: dict = field(default_factory=dict)

    @property
    def cone_B(self):
        """-Phi when the exact Phi is known, else None."""
        return None if self.phi is None else -self.phi


def t4_yang_mills_example(resolution: int = 32) -> Preset:
    """Abelian Yang-Mills connection on T^4 that is not primitive Yang-Mills.

    F = -(1/2pi) cos 2x_1 sin x_2 dx_0dx_1 + (1/2pi)(1 - sin 2x_1 cos x_2 / 2) dx_0dx_2
    is split as constant flux (1/2pi) dx_0dx_2 plus d of a = (1/4pi) sin 2x_1 sin x_2 dx_0.
    """
    D = TorusDomain(4, resolution)
    x = D.coordinates()
    a = DifferentialForm.from_components(D, 1, {(0,): np.sin(2 * x[1]) * np.sin(x[2]) / (4 * math.pi)})
    beta = DifferentialForm.from_components(D, 2, {(0, 2): 1.0 / (2 * math.pi)})
    phi = DifferentialForm.scalar(D, -np.cos(2 * x[1]) * np.sin(x[2]) / (4 * math.pi))
    F_ref = DifferentialForm.from_components(D, 2, {
        (0, 1): -np.cos(2 * x[1]) * np.sin(x[2]) / (2 * math.pi),
        (0, 2): (1 - 0.5 * np.sin(2 * x[1]) * np.cos(x[2])) / (2 * math.pi),
    })
    return Preset("t4_yang_mills_example", D, Metric.t4_example(D), Connection(a, beta), phi,
                  symplectically_flat=False, extras={"F_reference": F_ref})


# 't Hooft symbols, 0-based: eta[a, mu, nu]
def thooft_symbols() -> np.ndarray:
    eta = np.zeros((3, 4, 4))
    for a in range(3):
        for mu in range(3):
            for nu in range(3):
                eta[a, mu, nu] = np.linalg.det(np.eye(3)[[a, mu, nu]]) if len({a, mu, nu}) == 3 else 0.0
        eta[a, 3, a] = -1.0
        eta[a, a, 3] = 1.0
    return eta


def bpst(npoints: int = 1000, seed: int = 0, scale: float = 1.5) -> Preset:
    """Unit-size BPST instanton at the origin of R^4, sampled on random points.

    A = 2 eta^a_{mu nu} x^nu / (|x|^2 + 1) T_a dx^mu, with dA and Phi, dPhi in closed form.
    """
    rng = np.random.default_rng(seed)
    D = PointCloudDomain(scale * rng.standard_normal((npoints, 4)))
    x = D.points.T                     # (4, N)
    r2 = np.sum(x ** 2, axis=0)
    den = r2 + 1.0
    eta = thooft_symbols()
    # A^a_mu = 2 eta^a_{mu nu} x^nu / den
    Amu = 2.0 * np.einsum("amn,nN->maN", eta, x) / den   # (mu, a, N)
    # d_mu A^a_nu = 2 eta^a_{nu mu} / den - 4 x_mu eta^a_{nu r} x^r / den^2
    dA = {}
    for mu in range(4):
        for nu in range(mu + 1, 4):
            d_mu_A_nu = 2 * eta[:, nu, mu, None] / den - 4 * x[mu] * Amu[nu] / (2 * den)
            d_nu_A_mu = 2 * eta[:, mu, nu, None] / den - 4 * x[nu] * Amu[mu] / (2 * den)
            dA[(mu, nu)] = d_mu_A_nu - d_nu_A_mu
    dA_form = DifferentialForm.from_components(D, 2, dA, SU2)
    a = DifferentialForm(D, 1, Amu, SU2, derivative=dA_form)
    prof = 4.0 / den ** 2
    e = np.eye(3)[:, :, None]
    F_ref = DifferentialForm.from_components(D, 2, {
        (0, 3): -prof * e[0], (1, 2): -prof * e[0],
        (0, 2): prof * e[1], (1, 3): -prof * e[1],
        (0, 1): -prof * e[2], (2, 3): -prof * e[2],
    }, SU2)
    # Phi = -4/den^2 T_3, d Phi = 16 x_mu / den^3 T_3 dx^mu
    dphi = DifferentialForm.from_components(D, 1, {(mu,): 16 * x[mu] / den ** 3 * e[2] for mu in range(4)}, SU2)
    phi = DifferentialForm.scalar(D, -prof * e[2], SU2, derivative=dphi)
    return Preset("bpst", D, Metric.flat(D), Connection(a), phi, symplectically_flat=False,
                  extras={"F_reference": F_ref})


def flat_wilson(c1=0.0, c2=0.0, c3=0.0, c4=0.0, resolution: int = 16) -> Preset:
    """Constant abelian connection sum c_i dx_i: flat, nontrivial Wilson lines."""
    D = TorusDomain(4, resolution)
    a = DifferentialForm.from_components(D, 1, {(i,): float(c) for i, c in enumerate((c1, c2, c3, c4))})
    return Preset("flat_wilson", D, Metric.flat(D), Connection(a), DifferentialForm.zeros(D, 0),
                  symplectically_flat=True)


def constant_flux(c=1.0, dim: int = 4, resolution: int = 16) -> Preset:
    """Abelian connection with F = c omega carried by the background flux."""
    D = TorusDomain(dim, resolution)
    beta = darboux_form(D) * float(c)
    A = Connection(DifferentialForm.zeros(D, 1), beta)
    phi = DifferentialForm.scalar(D, float(c))
    return Preset("constant_flux", D, Metric.flat(D), A, phi, symplectically_flat=True)


def random_su2(seed: int = 0, amplitude: float = 0.5, resolution: int = 16, max_mode: int = 2,
               dim: int = 4) -> Preset:
    D = TorusDomain(dim, resolution)
    a = random_form(D, 1, np.random.default_rng(seed), SU2, amplitude, max_mode)
    return Preset("random_su2", D, Metric.flat(D), Connection(a), symplectically_flat=False)


def random_abelian(seed: int = 0, amplitude: float = 0.5, resolution: int = 16, max_mode: int = 2,
                   dim: int = 4) -> Preset:
    D = TorusDomain(dim, resolution)
    a = random_form(D, 1, np.random.default_rng(seed), ABELIAN, amplitude, max_mode)
    return Preset("random_abelian", D, Metric.flat(D), Connection(a), symplectically_flat=False)


REGISTRY = {
    "t4_yang_mills_example": t4_yang_mills_example,
    "bpst": bpst,
    "flat_wilson": flat_wilson,
    "constant_flux": constant_flux,
    "random_su2": random_su2,
    "random_abelian": random_abelian,
}

_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$", re.S)


def parse_preset(text: str, **overrides) -> Preset:
    """Build a preset from ``name`` or ``name(arg, ..., key=value)``."""
    m = _CALL.match(text)
    if not m or m.group(1) not in REGISTRY:
        raise SceneError(f"unknown preset {text!r}; known: {', '.join(sorted(REGISTRY))}")
    args, kwargs = [], {}
    if m.group(2) and m.group(2).strip():
        try:
            call = ast.parse(f"f({m.group(2)})", mode="eval").body
            args = [ast.literal_eval(v) for v in call.args]
            kwargs = {k.arg: ast.literal_eval(k.value) for k in call.keywords}
        except (SyntaxError, ValueError) as exc:
            raise SceneError(f"cannot parse preset arguments in {text!r}") from exc
    kwargs.update(overrides)
    try:
        return REGISTRY[m.group(1)](*args, **kwargs)
    except TypeError as exc:
        raise SceneError(str(exc)) from exc
