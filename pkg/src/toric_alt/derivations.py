"""Homogeneous derivations d_{rho,e}: action on characters, brackets, Cox lifts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .lattice import LatticeCone, Vector, as_vector, class_group, content, divisor_class, pairing, solve_unique
from .polyauto import SparsePoly, VectorField, to_fraction
from .roots import CoxLift, DemazureRoot, lift_root


@dataclass(frozen=True)
class HomogeneousDerivation:
    """coeff * d_{rho,e}, acting by chi^m -> coeff <rho, m> chi^{m+e}.

    Canonical form: rho primitive with first nonzero entry positive; the zero
    derivation is (0, 0, 0).
    """

    coeff: Fraction
    rho: Vector
    e: Vector

    def __post_init__(self):
        coeff = to_fraction(self.coeff)
        rho = as_vector(self.rho)
        e = as_vector(self.e, len(rho))
        g = content(rho)
        if coeff == 0 or g == 0:
            coeff, rho, e = Fraction(0), (0,) * len(rho), (0,) * len(rho)
        else:
            lead = next(x for x in rho if x)
            if lead < 0:
                g = -g
            rho = tuple(x // g for x in rho)
            coeff = coeff * g
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "e", e)

    @classmethod
    def root(cls, cone: LatticeCone, r: DemazureRoot) -> "HomogeneousDerivation":
        return cls(Fraction(1), cone.ray(r.ray), r.e)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def to_json(self) -> dict:
        return {"coeff": str(self.coeff), "rho": list(self.rho), "e": list(self.e)}

    @classmethod
    def from_json(cls, obj) -> "HomogeneousDerivation":
        return cls(to_fraction(obj["coeff"]), tuple(obj["rho"]), tuple(obj["e"]))


@dataclass(frozen=True)
class CharacterTerm:
    """coeff * chi^m; the zero term is canonically (0, 0)."""

    coeff: Fraction
    m: Vector

    def __post_init__(self):
        coeff = to_fraction(self.coeff)
        m = as_vector(self.m)
        if coeff == 0:
            m = (0,) * len(m)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "m", m)


def apply_to_character(d: HomogeneousDerivation, m: Sequence[int]) -> CharacterTerm:
    m = as_vector(m)
    if len(m) != len(d.rho):
        raise InputError(f"character of length {len(m)} for a derivation on rank {len(d.rho)}")
    c = d.coeff * pairing(d.rho, m)
    return CharacterTerm(c, tuple(a + b for a, b in zip(m, d.e)))


def apply_to_term(d: HomogeneousDerivation, t: CharacterTerm) -> CharacterTerm:
    out = apply_to_character(d, t.m)
    return CharacterTerm(out.coeff * t.coeff, out.m)


def bracket(d1: HomogeneousDerivation, d2: HomogeneousDerivation) -> HomogeneousDerivation:
    """[d1, d2] = d_{rho, e1+e2} with rho = <rho1,e2> rho2 - <rho2,e1> rho1."""
    if len(d1.rho) != len(d2.rho):
        raise InputError("bracket of derivations on different lattices")
    n = len(d1.rho)
    if d1.is_zero() or d2.is_zero():
        return HomogeneousDerivation(0, (0,) * n, (0,) * n)
    c = pairing(d2.rho, d1.e)
    d = pairing(d1.rho, d2.e)
    rho = tuple(d * b - c * a for a, b in zip(d1.rho, d2.rho))
    e = tuple(a + b for a, b in zip(d1.e, d2.e))
    return HomogeneousDerivation(d1.coeff * d2.coeff, rho, e)


@dataclass(frozen=True)
class MonomialField:
    """coeff * prod_{i != target} x_i^{exponents_i} * d/dx_target (target 1-based)."""

    target: int
    coeff: Fraction
    exponents: Vector

    def __post_init__(self):
        object.__setattr__(self, "coeff", to_fraction(self.coeff))
        ex = as_vector(self.exponents)
        if not 1 <= self.target <= len(ex):
            raise InputError(f"target {self.target} out of range")
        if ex[self.target - 1] != 0 or any(a < 0 for a in ex):
            raise InputError(f"invalid exponents {ex} for target {self.target}")
        object.__setattr__(self, "exponents", ex)

    @property
    def k(self) -> int:
        return len(self.exponents)

    def to_vector_field(self) -> VectorField:
        return VectorField(self.k, {self.target - 1: SparsePoly.monomial(self.exponents, self.coeff)})

    def to_json(self) -> dict:
        return {"target": self.target, "coeff": str(self.coeff), "exponents": list(self.exponents)}

    @classmethod
    def from_json(cls, obj) -> "MonomialField":
        return cls(obj["target"], to_fraction(obj["coeff"]), tuple(obj["exponents"]))


def to_cox_field(lift: CoxLift) -> MonomialField:
    hat = lift.hat_e
    j = lift.ray
    if not 1 <= j <= len(hat) or hat[j - 1] != -1 or any(c < 0 for i, c in enumerate(hat) if i != j - 1):
        raise InputError(f"invalid Cox lift {lift}")
    ex = tuple(0 if i == j - 1 else c for i, c in enumerate(hat))
    return MonomialField(j, Fraction(1), ex)


def lift_derivation(cone: LatticeCone, d: HomogeneousDerivation, rays: Sequence[int]) -> VectorField:
    """Cox-ring field of d, writing coeff*rho over the given (1-based) rays.

    With coeff*rho = sum_l a_l rho_l this is x^{e_hat} * sum_l a_l x_l d/dx_l,
    which restricts to d on the Cox-quasitorus invariants.
    """
    k = cone.k
    if d.is_zero():
        return VectorField.zero(k)
    rays = list(dict.fromkeys(rays))
    target = [d.coeff * x for x in d.rho]
    coeffs = solve_unique([cone.ray(j) for j in rays], target)
    if coeffs is None:
        raise InputError(f"rho = {list(d.rho)} is not uniquely a combination of rays {rays}")
    hat = cone.pairings(d.e)
    comps = {}
    for j, a in zip(rays, coeffs):
        if not a:
            continue
        ex = list(hat)
        ex[j - 1] += 1
        if any(x < 0 for x in ex):
            raise InputError(f"lift of degree {list(d.e)} is not polynomial along ray {j}")
        comps[j - 1] = SparsePoly.monomial(ex, a)
    return VectorField(k, comps)


def check_cox_invariance(cone: LatticeCone, r: DemazureRoot) -> bool:
    """The lifted degree of r has trivial class in Cl(X)."""
    lift = lift_root(cone, r)
    cg = class_group(cone)
    return not any(divisor_class(cg, lift.hat_e))

