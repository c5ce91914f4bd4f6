"""Reproduction checks grouped into suites, shared by ``symflat verify``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from . import classification as cl
from .cone import ConeForm, ConeOperator, cone_curvature, cone_curvature_apply, cone_d
from .forms import (
    SU2,
    DifferentialForm,
    codifferential,
    exterior_derivative,
    hodge_star,
    random_form,
    sup_norm,
)
from .functionals import (
    chern_simons_p2,
    chern_simons_p2_variation,
    chern_simons_p4,
    cs_invariant,
    eval_all,
)
from .gauge import covariant_d, curvature
from .presets import bpst, constant_flux, random_su2, t4_yang_mills_example
from .symplectic import dual_lefschetz, lefschetz_decompose_2form

SUITES = ("all", "t4", "bpst", "cone", "classify", "cs")


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    measured: float
    tolerance: float
    op: str = "<="  # measured <op> tolerance

    @property
    def passed(self) -> bool:
        if self.op == "<=":
            return self.measured <= self.tolerance
        return self.measured >= self.tolerance

    def as_dict(self) -> dict:
        return {"check": self.name, "anchor": self.anchor, "measured": self.measured,
                "tolerance": f"{self.op} {self.tolerance:.1e}", "status": "PASS" if self.passed else "FAIL"}


def load_golden() -> dict:
    return json.loads(resources.files("symflat").joinpath("data/golden_t4.json").read_text())


def suite_t4(resolution: int = 32, tolerance: float = 1e-6) -> list:
    p = t4_yang_mills_example(resolution)
    A, g, D = p.connection, p.metric, p.domain
    F = curvature(A)
    Fp, phi = lefschetz_decompose_2form(F)
    x = D.coordinates()
    f = g.coefficients[3]
    star = hodge_star(DifferentialForm.from_components(D, 2, {(0, 2): 1.0}), g)
    star_err = float(np.max(np.abs(star.component((1, 3))[0] + f)))
    vals = {k: v.value for k, v in eval_all(A, g, tolerance).items()}
    golden = load_golden()["values"]
    rel = max(abs(vals[k] - golden[k]) / abs(golden[k]) for k in golden)
    phi_ref = -np.cos(2 * x[1]) * np.sin(x[2]) / (4 * math.pi)
    return [
        Check("d*F vanishes (Yang-Mills)", "T4 example: F is d-harmonic", sup_norm(codifferential(F, g), g), tolerance),
        Check("dF vanishes", "T4 example: curvature is closed", sup_norm(exterior_derivative(F), g), 1e-8),
        Check("Phi matches -(1/4pi) cos 2x1 sin x2", "T4 example: Lefschetz component Phi",
              float(np.max(np.abs(phi.data[0, 0] - phi_ref))), 1e-10),
        Check("|dPhi| bounded below (not pYM)", "T4 example: Phi is not d-closed",
              sup_norm(exterior_derivative(phi), g), 0.01, ">="),
        Check("*(dx0 dx2) = -f dx1 dx3", "T4 example: metric Hodge star", star_err, 1e-12),
        Check("functional values match golden file", "T4 example: golden quadrature", rel, 1e-4),
    ]


def suite_bpst(npoints: int = 1000, seed: int = 0) -> list:
    p = bpst(npoints, seed)
    A, g = p.connection, p.metric
    F = curvature(A)
    phi = dual_lefschetz(F) / 2
    dphi = covariant_d(p.phi, A)
    t3 = np.abs(dphi.data[:, 2]).max(axis=0)
    return [
        Check("curvature matches closed form", "BPST: curvature display",
              float(np.max(np.abs((F - p.extras["F_reference"]).data))), 1e-12),
        Check("F self-dual", "BPST: F is self-dual", float(np.max(np.abs((hodge_star(F, g) - F).data))), 1e-12),
        Check("Phi = -4/(|x|^2+1)^2 T3", "BPST: Lefschetz component Phi",
              float(np.max(np.abs((phi - p.phi).data))), 1e-12),
        Check("fraction of samples with T3 part of d_A Phi > 0", "BPST: d_A Phi has a T3 component",
              float(np.mean(t3 > 0)), 0.99, ">="),
    ]


def suite_cone(tolerance: float = 1e-8) -> list:
    p = constant_flux(0.7)
    op = ConeOperator(p.connection, p.cone_B)
    cc = cone_curvature(op)
    flat_res = max(float(np.max(np.abs(cc.xi.data))), float(np.max(np.abs(cc.eta.data))))
    t4 = t4_yang_mills_example(16)
    B = DifferentialForm.scalar(t4.domain, 0.1)
    cc4 = cone_curvature(ConeOperator(t4.connection, B))
    rs = random_su2(3, 0.5)
    rng = np.random.default_rng(7)
    op2 = ConeOperator(rs.connection, random_form(rs.domain, 0, rng, SU2, 0.5))
    c = ConeForm(random_form(rs.domain, 0, rng, SU2), None)
    diff = cone_d(cone_d(c, op2), op2) - cone_curvature_apply(op2, c)
    d2 = max(float(np.max(np.abs(diff.xi.data))), float(np.max(np.abs(diff.eta.data))))
    return [
        Check("cone curvature vanishes for F = c omega, B = -c", "cone: flat iff symplectically flat",
              flat_res, tolerance),
        Check("T4 example keeps a primitive cone curvature", "cone: F_p survives any constant B",
              sup_norm(cc4.xi, t4.metric), 1e-3, ">="),
        Check("D_C^2 equals cone curvature action", "cone: D_C^2 = (F + omega B) - theta d_A B", d2, tolerance),
    ]


def suite_classify() -> list:
    r = cl.classify_u1_t4(1, Fraction(1, 2))
    irr = cl.classify_u1_t4(1, cl.irrational_ratio(1))
    c0_err = abs(r.c0.rational_value - Fraction(1, 2))
    brute = abs(cl.brute_force_minimum([1, Fraction(1, 2)]) - r.c0.rational_value)
    r23 = cl.case_of(cl.PeriodGroupSpec.of(2, 3))
    empty = cl.case_of(cl.PeriodGroupSpec.of())
    return [
        Check("c0 for (1, 1/2) equals 1/2", "U(1) over T4: minimal positive c0", float(c0_err), 0.0),
        Check("c0 agrees with enumeration |p|,|q| <= 50", "U(1) over T4: brute-force lattice", float(brute), 0.0),
        Check("irrational ratio gives flat-only with Euler class 0", "U(1) over T4: the only possible c is 0",
              0.0 if irr.flat_only and irr.euler_class_coefficient(1) == 0 else 1.0, 0.0),
        Check("H generated by {2, 3} is Z", "period group trichotomy: minimal element",
              0.0 if r23.case == cl.S1_EXTENSION and r23.c0 == cl.Period.rational(1) else 1.0, 0.0),
        Check("empty H gives an R-extension", "period group trichotomy: H = 0",
              0.0 if empty.case == cl.R_EXTENSION else 1.0, 0.0),
    ]


def suite_cs(tolerance: float = 1e-6) -> list:
    rows = []
    p2 = constant_flux(0.7, dim=2)
    r = chern_simons_p2(p2.connection, p2.cone_B)
    ref = cs_invariant(p2.phi) / (8 * math.pi ** 2)
    rows.append(Check("P2(A, -Phi) = (1/8pi^2) int tr Phi^2 omega", "P2 at constant flux",
                      abs(r["value"] - ref), tolerance))
    p4 = constant_flux(0.7, dim=4)
    r4 = chern_simons_p4(p4.connection, p4.cone_B)
    ref4 = 1j / 48 * cs_invariant(p4.phi)
    rows.append(Check("P4(A, -Phi) = (i/48) int tr Phi^3 omega^2", "P4 at constant flux",
                      abs(r4["value"] - ref4), tolerance))
    rows.append(Check("exact terms integrate to zero", "P2/P4 exact terms",
                      max(abs(r["exact_term"]), abs(r4["exact_term"])), 1e-8))
    rng = np.random.default_rng(11)
    D = p2.domain
    dirs = [(random_form(D, 1, rng), random_form(D, 0, rng)) for _ in range(5)]
    flat_var = max(abs(chern_simons_p2_variation(p2.connection, p2.cone_B, a, b)) for a, b in dirs)
    Bp = p2.cone_B + random_form(D, 0, rng, amplitude=0.2)
    pert_var = max(abs(chern_simons_p2_variation(p2.connection, Bp, a, b)) for a, b in dirs)
    rows.append(Check("P2 first variation vanishes at symplectically flat pair", "P2 critical points",
                      flat_var, 1e-7))
    rows.append(Check("P2 first variation is nonzero after perturbing B", "P2 critical points",
                      pert_var, 1e-3, ">="))
    return rows


def run_suite(name: str, resolution: int = 32, tolerance: float = 1e-6) -> list:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    order = ("t4", "bpst", "cone", "classify", "cs") if name == "all" else (name,)
    rows = []
    for s in order:
        if s == "t4":
            rows += suite_t4(resolution, tolerance)
        elif s == "bpst":
            rows += suite_bpst()
        elif s == "cone":
            rows += suite_cone()
        elif s == "classify":
            rows += suite_classify()
        else:
            rows += suite_cs(tolerance)
    return rows
