"""Exact case analysis of period groups and the U(1)-over-T^4 morphism families.

Periods live in a Q-vector space: a rational part plus rational multiples of
declared irrational markers (e.g. ``sqrt2``).  Distinct markers and 1 are
taken to be Q-linearly independent positive reals; density of a group is
decided from that declaration, never from floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .errors import ClassificationError

ONE = "1"
R_EXTENSION = "R-extension"
S1_EXTENSION = "S1-extension"
FLAT_ONLY = "flat-only"


@dataclass(frozen=True)
class Period:
    """sum_label coeff * label, with label "1" the rational unit."""

    coeffs: tuple  # sorted ((label, Fraction), ...) without zeros

    @classmethod
    def make(cls, mapping: dict) -> "Period":
        items = tuple(sorted((k, Fraction(v)) for k, v in mapping.items() if Fraction(v) != 0))
        return cls(items)

    @classmethod
    def rational(cls, q) -> "Period":
        return cls.make({ONE: Fraction(q)})

    @classmethod
    def irrational(cls, label: str, coeff=1) -> "Period":
        if label == ONE or not label.isidentifier():
            raise ClassificationError(f"bad irrational marker {label!r}")
        return cls.make({label: Fraction(coeff)})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_rational(self) -> bool:
        return all(k == ONE for k, _ in self.coeffs)

    @property
    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ClassificationError(f"{self} is not rational")
        return self.as_dict().get(ONE, Fraction(0))

    def sign(self) -> int:
        """Sign, decidable when all coefficients agree in sign (markers are positive)."""
        signs = {1 if c > 0 else -1 for _, c in self.coeffs}
        if not signs:
            return 0
        if len(signs) > 1:
            raise ClassificationError(f"sign of {self} is not decidable from the declared markers")
        return signs.pop()

    def scale(self, q) -> "Period":
        q = Fraction(q)
        return Period.make({k: c * q for k, c in self.coeffs})

    def __add__(self, other: "Period") -> "Period":
        d = self.as_dict()
        for k, c in other.coeffs:
            d[k] = d.get(k, Fraction(0)) + c
        return Period.make(d)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in self.coeffs:
            parts.append(str(c) if k == ONE else (k if c == 1 else f"{c}*{k}"))
        return " + ".join(parts)


def as_period(x) -> Period:
    """Accept Period, Fraction, int or an exact string; floats are rejected as untagged."""
    if isinstance(x, Period):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise ClassificationError(f"untagged input {x!r}: pass an exact rational or an irrational marker")
    if isinstance(x, (int, Fraction)):
        return Period.rational(x)
    if isinstance(x, str):
        return parse_period(x)
    raise ClassificationError(f"untagged input {x!r}")


_TERM = re.compile(r"^(?:(?P<q>[-+]?[0-9./]+)\s*\*\s*)?(?P<label>[A-Za-z_][A-Za-z_0-9]*)$")


def parse_period(text: str) -> Period:
    """Parse "3/4", "0.5", "sqrt2", "2*sqrt2" or sums like "1 + sqrt2"."""
    total = Period.make({})
    for term in re.split(r"\s+\+\s+", text.strip()):
        term = term.strip()
        try:
            total = total + Period.rational(Fraction(term))
            continue
        except (ValueError, ZeroDivisionError):
            pass
        m = _TERM.match(term)
        if not m:
            raise ClassificationError(f"cannot parse period {text!r}")
        try:
            q = Fraction(m.group("q")) if m.group("q") else Fraction(1)
        except (ValueError, ZeroDivisionError) as exc:
            raise ClassificationError(f"cannot parse period {text!r}") from exc
        total = total + Period.irrational(m.group("label"), q)
    return total


def rational_gcd(values) -> Fraction:
    """gcd over Q: the positive generator of sum Z q_i (for nonzero input)."""
    vals = [abs(Fraction(v)) for v in values if Fraction(v) != 0]
    if not vals:
        return Fraction(0)
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vals))
    num = reduce(math.gcd, (int(v * den) for v in vals))
    return Fraction(num, den)


def minimal_positive_combination(c1, c2) -> Fraction:
    """Minimal positive element of Z c1 + Z c2 for positive rationals."""
    c1, c2 = Fraction(c1), Fraction(c2)
    if c1 <= 0 or c2 <= 0:
        raise ClassificationError("minimal positive combination needs positive rationals")
    a1, d1, a2, d2 = c1.numerator, c1.denominator, c2.numerator, c2.denominator
    return Fraction(math.gcd(a1 * d2, a2 * d1), d1 * d2)


@dataclass(frozen=True)
class PeriodGroupSpec:
    """Generators of H = {int_D zeta}; ``generators=None`` means nothing was supplied."""

    generators: tuple | None

    @classmethod
    def of(cls, *gens) -> "PeriodGroupSpec":
        return cls(tuple(as_period(g) for g in gens))

    @property
    def h_plus_nonempty(self) -> bool:
        return any(not g.is_zero for g in (self.generators or ()))


@dataclass(frozen=True)
class CaseVerdict:
    case: str
    c0: Period | None
    note: str

    def as_dict(self) -> dict:
        return {"case": self.case, "c0": None if self.c0 is None else str(self.c0), "note": self.note}


def _common_direction(gens):
    """If all periods are rational multiples of one vector v, return (v, multiples); else None."""
    labels = sorted({k for g in gens for k, _ in g.coeffs})
    pivot_label = labels[0]
    base = next(g for g in gens if pivot_label in g.as_dict())
    v = base.scale(1 / base.as_dict()[pivot_label])
    mults = []
    for g in gens:
        d = g.as_dict()
        q = d.get(pivot_label, Fraction(0))
        if g != v.scale(q):
            return None
        mults.append(q)
    return v, mults


def case_of(spec: PeriodGroupSpec) -> CaseVerdict:
    """Trichotomy for H: R-extension (H = 0), S1-extension (H = Z c0), flat-only (H dense)."""
    if spec.generators is None:
        raise ClassificationError("no generators supplied")
    gens = [g for g in spec.generators if not g.is_zero]
    if not gens:
        return CaseVerdict(R_EXTENSION, None, "H^+ is empty, so H = 0 and R/H = R")
    found = _common_direction(gens)
    if found is None:
        return CaseVerdict(FLAT_ONLY, None,
                           "generators span a Q-space of dimension >= 2, so H is dense and R/H is not a Lie group")
    v, mults = found
    c0 = v.scale(rational_gcd(mults))
    if c0.sign() < 0:
        c0 = c0.scale(-1)
    return CaseVerdict(S1_EXTENSION, c0, f"H^+ has minimal element {c0}, so H = Z c0 and R/H = S^1")


@dataclass
class U1T4Report:
    """Classification of zeta-flat U(1) bundles over T^4 for zeta = c1 dx1dx2 + c2 dx3dx4."""

    c1: Period
    c2: Period
    gamma: CaseVerdict
    lattice: CaseVerdict
    c0: Period | None
    wilson_parameters: int = 4
    commutators: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return self.lattice.case if self.lattice.case == FLAT_ONLY else S1_EXTENSION

    @property
    def flat_only(self) -> bool:
        return self.lattice.case == FLAT_ONLY

    def euler_class_coefficient(self, n: int) -> Fraction | int:
        """The c with Euler class c * zeta for the family member n (0 when flat-only)."""
        if self.flat_only:
            return 0
        return Fraction(n) / self.c0.rational_value if self.c0.is_rational else None

    def morphism_family(self) -> str:
        if self.flat_only:
            return "rho(b) = 1 for all b; rho(a_i) free in S^1"
        return f"rho(b) = exp(2 pi i n |b| / ({self.c0})), n in Z; rho(a_i) free in S^1"

    def euler_class_label(self) -> str:
        return "0" if self.flat_only else f"(n / ({self.c0})) zeta"

    def as_dict(self) -> dict:
        return {
            "c1": str(self.c1), "c2": str(self.c2),
            "gamma": self.gamma.as_dict(),
            "verdict": self.verdict,
            "c0": None if self.c0 is None else str(self.c0),
            "morphisms": self.morphism_family(),
            "euler_class": self.euler_class_label(),
            "wilson_parameters": self.wilson_parameters,
            "commutators": {f"[a{j}^-1 a{i}^-1 a{j} a{i}]": str(v) for (j, i), v in sorted(self.commutators.items())},
        }

    def render(self) -> str:
        d = self.as_dict()
        lines = [f"zeta = ({d['c1']}) dx1 dx2 + ({d['c2']}) dx3 dx4 on T^4",
                 f"Gamma: {d['gamma']['case']} of pi_1(T^4) (pi_2(T^4) = 0)",
                 f"verdict: {d['verdict']}",
                 f"c0: {d['c0'] if d['c0'] is not None else '-'}",
                 f"morphisms: {d['morphisms']}",
                 f"euler class: {d['euler_class']}",
                 f"wilson parameters: {d['wilson_parameters']}",
                 "commutators:"]
        lines += [f"  |{k}| = {v}" for k, v in d["commutators"].items()]
        return "\n".join(lines)


def classify_u1_t4(c1, c2) -> U1T4Report:
    """Morphisms Gamma -> S^1 for zeta = c1 dx1dx2 + c2 dx3dx4 on T^4."""
    p1, p2 = as_period(c1), as_period(c2)
    if p1.is_zero or p2.is_zero:
        raise ClassificationError("c1 and c2 must be nonzero")
    gamma = case_of(PeriodGroupSpec(()))
    lattice = case_of(PeriodGroupSpec((p1, p2)))
    zero = Period.make({})
    commutators = {(j, i): zero for i in range(1, 5) for j in range(i + 1, 5)}
    commutators[(2, 1)] = p1
    commutators[(4, 3)] = p2
    return U1T4Report(p1, p2, gamma, lattice, lattice.c0, 4, commutators)


def irrational_ratio(c1, label: str = "r") -> Period:
    """c1 times a declared irrational marker: a partner with irrational ratio to c1."""
    p = as_period(c1)
    if not p.is_rational:
        raise ClassificationError("irrational-ratio partner is built from a rational c1")
    return Period.irrational(label, p.rational_value)


def brute_force_minimum(gens, bound: int = 50) -> Fraction | None:
    """Minimal positive p*g1 + q*g2 (+ ...) over |p|, |q| <= bound, by enumeration."""
    import itertools
    gens = [Fraction(g) for g in gens]
    best = None
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(gens)):
        s = sum(c * g for c, g in zip(coeffs, gens))
        if s > 0 and (best is None or s < best):
            best = s
    return best
