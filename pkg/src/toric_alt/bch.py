"""Elements of a closed root Lie algebra, their exponentials, BCH and Zassenhaus.

``bch`` goes through automorphisms (exp, multiply, log) and needs no series
coefficients; ``dynkin_bch`` evaluates the truncated Dynkin series on the
structure constants and serves as an independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .closure import Basis, RootLieAlgebra
from .errors import InputError, InternalError
from .polyauto import (
    PolyAutomorphism,
    SparsePoly,
    VectorField,
    compose,
    exp_field,
    inverse,
    log_auto,
    product,
    to_fraction,
)


@dataclass(frozen=True, eq=False)
class LieElement:
    coords: Mapping[Basis, Fraction]

    def __post_init__(self):
        clean = {}
        for b, c in self.coords.items():
            c = to_fraction(c)
            if c:
                clean[(b[0], tuple(b[1]))] = c
        object.__setattr__(self, "coords", dict(sorted(clean.items())))

    @classmethod
    def zero(cls) -> "LieElement":
        return cls({})

    @classmethod
    def basis(cls, b: Basis, coeff=1) -> "LieElement":
        return cls({b: coeff})

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.coords)
        for b, c in other.coords.items():
            out[b] = out.get(b, 0) + c
        return LieElement(out)

    def scale(self, c) -> "LieElement":
        c = to_fraction(c)
        return LieElement({b: v * c for b, v in self.coords.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def __repr__(self):
        return f"LieElement({self.coords})"

    def to_json(self) -> list:
        return [{"ray": b[0], "e": list(b[1]), "coeff": str(c)} for b, c in self.coords.items()]

    @classmethod
    def from_json(cls, terms) -> "LieElement":
        if not isinstance(terms, list):
            raise InputError("Lie element JSON must be a list of terms")
        out: dict[Basis, Fraction] = {}
        for t in terms:
            b = (t["ray"], tuple(t["e"]))
            out[b] = out.get(b, 0) + to_fraction(t.get("coeff", 1))
        return cls(out)


def check_support(alg: RootLieAlgebra, a: LieElement) -> None:
    missing = [b for b in a.coords if b not in alg.lifts]
    if missing:
        raise InputError(f"element is not supported on the closed root set: {missing[0]}")


def lie_bracket(alg: RootLieAlgebra, a: LieElement, b: LieElement) -> LieElement:
    out: dict[Basis, Fraction] = {}
    table = alg.table
    for x, cx in a.coords.items():
        for y, cy in b.coords.items():
            hit = table.get((x, y))
            if hit is not None:
                s, t = hit
                out[t] = out.get(t, 0) + s * cx * cy
    return LieElement(out)


def to_field(alg: RootLieAlgebra, a: LieElement) -> VectorField:
    """The Cox-coordinate field of a, declared triangular in the sink order."""
    check_support(alg, a)
    k = alg.cone.k
    comps: dict[int, SparsePoly] = {}
    for (ray, e), c in a.coords.items():
        hat = alg.lifts[(ray, e)]
        ex = tuple(0 if i == ray - 1 else h for i, h in enumerate(hat))
        mono = SparsePoly.monomial(ex, c)
        comps[ray - 1] = comps[ray - 1] + mono if ray - 1 in comps else mono
    return VectorField(k, comps, alg.coordinate_order)


def from_field(alg: RootLieAlgebra, f: VectorField) -> LieElement:
    out: dict[Basis, Fraction] = {}
    for i, p in f.components.items():
        for ex, c in p.terms.items():
            if ex[i] != 0:
                raise InternalError(f"field component {i + 1} depends on its own coordinate")
            hat = ex[:i] + (-1,) + ex[i + 1 :]
            b = alg.by_lift.get((i + 1, hat))
            if b is None:
                raise InternalError(f"monomial {ex} on coordinate {i + 1} is outside the closed root set")
            out[b] = out.get(b, 0) + c
    return LieElement(out)


def exp_element(alg: RootLieAlgebra, a: LieElement) -> PolyAutomorphism:
    return exp_field(to_field(alg, a))


def log_element(alg: RootLieAlgebra, g: PolyAutomorphism) -> LieElement:
    return from_field(alg, log_auto(g.with_order(alg.coordinate_order)))


def bch(alg: RootLieAlgebra, a: LieElement, b: LieElement) -> LieElement:
    """log(exp(a) exp(b)) with operator-order product, via automorphisms."""
    return log_element(alg, product(exp_element(alg, a), exp_element(alg, b)))


def _nested(alg: RootLieAlgebra, letters: Sequence[LieElement]) -> LieElement:
    """[l_1, [l_2, [..., l_m]]]."""
    acc = letters[-1]
    for x in reversed(letters[:-1]):
        if acc.is_zero():
            return acc
        acc = lie_bracket(alg, x, acc)
    return acc


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def dynkin_bch(alg: RootLieAlgebra, a: LieElement, b: LieElement, n: int) -> LieElement:
    """Dynkin's series for log(exp(a) exp(b)) through total degree n."""
    total = LieElement.zero()
    for deg in range(1, n + 1):
        for kk in range(1, deg + 1):
            sign = Fraction((-1) ** (kk - 1), kk)
            # 2k exponents (r_1, s_1, ..., r_k, s_k) summing to deg, each r_i + s_i > 0
            for ex in _compositions(deg, 2 * kk):
                if any(ex[2 * i] + ex[2 * i + 1] == 0 for i in range(kk)):
                    continue
                letters: list[LieElement] = []
                denom = deg
                for i in range(kk):
                    letters += [a] * ex[2 * i] + [b] * ex[2 * i + 1]
                    denom *= factorial(ex[2 * i]) * factorial(ex[2 * i + 1])
                if len(letters) >= 2 and letters[-1] is letters[-2]:
                    continue  # innermost [x, x] vanishes
                term = _nested(alg, letters)
                if not term.is_zero():
                    total = total + term.scale(sign / denom)
    return total


@dataclass(frozen=True)
class ZassenhausSplit:
    factors: tuple[PolyAutomorphism, ...]  # exp(a_1), ..., exp(a_nu)
    tail: tuple[PolyAutomorphism, ...]  # exp(psi_2), ..., exp(psi_n)
    psi: tuple[LieElement, ...]  # psi_2, ..., psi_n

    @property
    def automorphisms(self) -> tuple[PolyAutomorphism, ...]:
        return self.factors + self.tail


def _interpolate(samples: Sequence[tuple[Fraction, LieElement]], degree: int) -> list[LieElement]:
    """Coefficients c_1..c_degree of the polynomial sum_j c_j t^j through the samples."""
    ts = [t for t, _ in samples]
    keys = sorted({b for _, v in samples for b in v.coords})
    coeffs = [dict() for _ in range(degree)]
    # Vandermonde solve for each basis coordinate
    for key in keys:
        rows = [[t**j for j in range(1, degree + 1)] + [v.coords.get(key, Fraction(0))] for t, v in samples]
        for col in range(degree):
            piv = next(r for r in range(col, degree) if rows[r][col] != 0)
            rows[col], rows[piv] = rows[piv], rows[col]
            p = rows[col][col]
            rows[col] = [x / p for x in rows[col]]
            for r in range(degree):
                if r != col and rows[r][col] != 0:
                    f = rows[r][col]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
        for j in range(degree):
            if rows[j][-1]:
                coeffs[j][key] = rows[j][-1]
    return [LieElement(c) for c in coeffs]


def zassenhaus_split(alg: RootLieAlgebra, parts: Sequence[LieElement]) -> ZassenhausSplit:
    """exp(a_1 + ... + a_nu) = exp(a_1) o ... o exp(a_nu) o exp(psi_2) o ... o exp(psi_n).

    Products are point-map compositions.  Each psi_m is the degree-m part of
    the logarithm of the remainder after peeling off the known factors; the
    grading is recovered by scaling every part by t and interpolating in t.
    """
    parts = list(parts)
    if not parts:
        raise InputError("Zassenhaus split of an empty sequence")
    for a in parts:
        check_support(alg, a)
    n = max(alg.lcs.nilpotency_class, 1)
    k = alg.cone.k
    ts = [Fraction(t) for t in range(1, n + 1)]
    total = LieElement.zero()
    for a in parts:
        total = total + a
    targets = {t: exp_element(alg, total.scale(t)) for t in ts}
    prefixes = {}
    for t in ts:
        pre = PolyAutomorphism.identity(k, alg.coordinate_order)
        for a in parts:
            pre = compose(pre, exp_element(alg, a.scale(t)))
        prefixes[t] = pre
    psis: list[LieElement] = []
    for m in range(2, n + 1):
        samples = []
        for t in ts:
            rem = compose(inverse(prefixes[t]), targets[t])
            samples.append((t, log_element(alg, rem)))
        coeffs = _interpolate(samples, n)
        if any(not c.is_zero() for c in coeffs[: m - 1]):
            raise InternalError("Zassenhaus remainder has a component below the current degree")
        psi = coeffs[m - 1]
        psis.append(psi)
        for t in ts:
            prefixes[t] = compose(prefixes[t], exp_element(alg, psi.scale(t**m)))
    one = Fraction(1)
    if compose(inverse(prefixes[one]), targets[one]) != PolyAutomorphism.identity(k):
        raise InternalError("Zassenhaus factors do not reproduce exp of the sum")
    factors = tuple(exp_element(alg, a) for a in parts)
    tail = tuple(exp_element(alg, p) for p in psis)
    return ZassenhausSplit(factors, tail, tuple(psis))
