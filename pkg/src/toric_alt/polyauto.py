"""Sparse rational polynomials, polynomial vector fields and unitriangular automorphisms.

Conventions
-----------
Coordinates are 0-based internally (``x_{i+1}`` in printed output).  A
``PolyAutomorphism`` is a point map given by the images of the coordinates;
``compose(a, b)`` is the point map ``a o b``: every coordinate in ``a``'s images
is replaced by ``b``'s images.

``exp_field(d)`` has images ``sum_m d^m(x_i) / m!``.  As operators on the
coordinate ring, exp(a) exp(b) corresponds to ``compose(exp(b), exp(a))``;
``product(a, b, ...)`` packages that operator-order product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import InputError, InternalError

Exp = tuple[int, ...]

LOG_SERIES_CAP = 10_000


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {x!r}") from exc
    raise InputError(f"not a rational number: {x!r}")


def fraction_str(x: Fraction) -> str:
    return str(x)


class SparsePoly:
    """A polynomial in ``nvars`` variables over Q, as {exponent tuple: coefficient}.

    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exp, Fraction] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for ex, c in terms.items():
                if c:
                    if len(ex) != nvars:
                        raise InputError(f"exponent {ex} has wrong length for {nvars} variables")
                    clean[tuple(ex)] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms: dict[Exp, Fraction] = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "SparsePoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "SparsePoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "SparsePoly":
        c = to_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "SparsePoly":
        ex = [0] * nvars
        ex[i] = 1
        return cls._raw(nvars, {tuple(ex): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "SparsePoly":
        if any(x < 0 for x in exps):
            raise InputError(f"negative exponent in {tuple(exps)}")
        coeff = to_fraction(coeff)
        return cls._raw(len(exps), {tuple(exps): coeff} if coeff else {})

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(ex) for ex in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for ex in self.terms for i, a in enumerate(ex) if a}

    def sorted_terms(self) -> list[tuple[Exp, Fraction]]:
        """Terms in graded-lexicographic order, leading term first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for ex, c in self.terms.items():
            v = c
            for x, a in zip(point, ex):
                if a:
                    v *= x**a
            total += v
        return total

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "SparsePoly") -> None:
        if other.nvars != self.nvars:
            raise InputError(f"polynomials in {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for ex, c in other.terms.items():
            v = out.get(ex, 0) + c
            if v:
                out[ex] = v
            else:
                out.pop(ex, None)
        return SparsePoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._raw(self.nvars, {ex: -c for ex, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SparsePoly":
        c = to_fraction(c)
        if not c:
            return SparsePoly.zero(self.nvars)
        return SparsePoly._raw(self.nvars, {ex: v * c for ex, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                ex = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(ex, 0) + c1 * c2
                if v:
                    out[ex] = v
                else:
                    out.pop(ex, None)
        return SparsePoly._raw(self.nvars, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise InputError("negative polynomial power")
        result = SparsePoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, i: int) -> "SparsePoly":
        out = {}
        for ex, c in self.terms.items():
            a = ex[i]
            if a:
                ex2 = ex[:i] + (a - 1,) + ex[i + 1 :]
                out[ex2] = c * a
        return SparsePoly._raw(self.nvars, out)

    def substitute(self, images: Sequence["SparsePoly"]) -> "SparsePoly":
        """self(images[0], ..., images[n-1]); the images may live in another ring."""
        if len(images) != self.nvars:
            raise InputError(f"substituting {len(images)} images into {self.nvars} variables")
        if not images:
            return self
        target = images[0].nvars
        powers: list[dict[int, SparsePoly]] = [{0: SparsePoly.const(target, 1), 1: im} for im in images]

        def power(i: int, a: int) -> SparsePoly:
            cache = powers[i]
            if a not in cache:
                cache[a] = power(i, a // 2) * power(i, a - a // 2)
            return cache[a]

        acc: dict[Exp, Fraction] = {}
        for ex, c in self.terms.items():
            term = SparsePoly.const(target, c)
            for i, a in enumerate(ex):
                if a:
                    term = term * power(i, a)
            for e2, v in term.terms.items():
                s = acc.get(e2, 0) + v
                if s:
                    acc[e2] = s
                else:
                    acc.pop(e2, None)
        return SparsePoly._raw(target, acc)

    # -- identity --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            if isinstance(other, (int, Fraction)):
                return self == SparsePoly.const(self.nvars, other)
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"SparsePoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for ex, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(ex) if a
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list:
        return [{"coeff": fraction_str(c), "exp": list(ex)} for ex, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, terms) -> "SparsePoly":
        if not isinstance(terms, list):
            raise InputError("polynomial JSON must be a list of terms")
        out: dict[Exp, Fraction] = {}
        for t in terms:
            if not isinstance(t, dict) or "coeff" not in t or "exp" not in t:
                raise InputError('term JSON must be {"coeff": "p/q", "exp": [...]}')
            ex = tuple(t["exp"])
            if len(ex) != nvars or any(not isinstance(a, int) or a < 0 for a in ex):
                raise InputError(f"bad exponent vector {t['exp']!r}")
            out[ex] = out.get(ex, 0) + to_fraction(t["coeff"])
        return cls(nvars, out)


def coordinates(k: int) -> tuple[SparsePoly, ...]:
    return tuple(SparsePoly.var(k, i) for i in range(k))


def _check_order(order: Sequence[int] | None, k: int) -> tuple[int, ...] | None:
    if order is None:
        return None
    order = tuple(order)
    if sorted(order) != list(range(k)):
        raise InputError(f"coordinate order {order} is not a permutation of 0..{k - 1}")
    return order


def _depends_only_on_later(poly: SparsePoly, i: int, position: Mapping[int, int]) -> bool:
    return all(position[v] > position[i] for v in poly.variables())


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True, eq=False)
class VectorField:
    """sum_i components[i] * d/dx_i on affine k-space.

    ``order`` optionally declares a coordinate order (0-based permutation)
    under which the field is meant to be triangular.
    """

    k: int
    components: Mapping[int, SparsePoly]
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        comps = {}
        for i, p in self.components.items():
            if not 0 <= i < self.k:
                raise InputError(f"component index {i} out of range")
            if p.nvars != self.k:
                raise InputError("component polynomial has the wrong number of variables")
            if not p.is_zero():
                comps[i] = p
        object.__setattr__(self, "components", dict(sorted(comps.items())))
        object.__setattr__(self, "order", _check_order(self.order, self.k))

    @classmethod
    def zero(cls, k: int, order=None) -> "VectorField":
        return cls(k, {}, order)

    def component(self, i: int) -> SparsePoly:
        return self.components.get(i, SparsePoly.zero(self.k))

    def is_zero(self) -> bool:
        return not self.components

    def apply(self, f: SparsePoly) -> SparsePoly:
        out = SparsePoly.zero(self.k)
        for i, p in self.components.items():
            df = f.diff(i)
            if not df.is_zero():
                out = out + p * df
        return out

    def is_triangular(self, order: Sequence[int] | None = None) -> bool:
        order = _check_order(order, self.k) if order is not None else self.order
        if order is None:
            return False
        pos = {c: n for n, c in enumerate(order)}
        return all(_depends_only_on_later(p, i, pos) for i, p in self.components.items())

    def with_order(self, order) -> "VectorField":
        return VectorField(self.k, self.components, order)

    def __add__(self, other: "VectorField") -> "VectorField":
        comps = dict(self.components)
        for i, p in other.components.items():
            comps[i] = comps[i] + p if i in comps else p
        return VectorField(self.k, comps, self.order or other.order)

    def scale(self, c) -> "VectorField":
        return VectorField(self.k, {i: p.scale(c) for i, p in self.components.items()}, self.order)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.k == other.k and self.components == other.components

    def __hash__(self):
        return hash((self.k, frozenset(self.components.items())))

    def __str__(self):
        if not self.components:
            return "0"
        return " + ".join(f"({p})*d/dx{i + 1}" for i, p in self.components.items())

    def to_json(self) -> dict:
        out = {"k": self.k, "components": [self.component(i).to_json() for i in range(self.k)]}
        if self.order is not None:
            out["order"] = [c + 1 for c in self.order]
        return out

    @classmethod
    def from_json(cls, obj) -> "VectorField":
        k = obj["k"]
        comps = obj["components"]
        if len(comps) != k:
            raise InputError("field JSON needs one component per coordinate")
        order = [c - 1 for c in obj["order"]] if "order" in obj else None
        return cls(k, {i: SparsePoly.from_json(k, t) for i, t in enumerate(comps)}, order)


def field_bracket(a: VectorField, b: VectorField) -> VectorField:
    """Commutator [a, b] = a b - b a of derivations."""
    if a.k != b.k:
        raise InputError("fields on spaces of different dimension")
    comps = {}
    for i in range(a.k):
        v = a.apply(b.component(i)) - b.apply(a.component(i))
        if not v.is_zero():
            comps[i] = v
    return VectorField(a.k, comps, a.order if a.order == b.order else None)


# ---------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True, eq=False)
class PolyAutomorphism:
    images: tuple[SparsePoly, ...]
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        images = tuple(self.images)
        k = len(images)
        if k == 0:
            raise InputError("an automorphism needs at least one coordinate")
        if any(p.nvars != k for p in images):
            raise InputError("image polynomials must live in k variables")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "order", _check_order(self.order, k))

    @property
    def k(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, k: int, order=None) -> "PolyAutomorphism":
        return cls(coordinates(k), order)

    def is_identity(self) -> bool:
        return all(p == SparsePoly.var(self.k, i) for i, p in enumerate(self.images))

    def shifts(self) -> tuple[SparsePoly, ...]:
        """f_i = image_i - x_i."""
        return tuple(p - SparsePoly.var(self.k, i) for i, p in enumerate(self.images))

    def is_unitriangular(self, order: Sequence[int] | None = None) -> bool:
        order = _check_order(order, self.k) if order is not None else self.order
        if order is None:
            return False
        pos = {c: n for n, c in enumerate(order)}
        return all(_depends_only_on_later(f, i, pos) for i, f in enumerate(self.shifts()))

    def with_order(self, order) -> "PolyAutomorphism":
        return PolyAutomorphism(self.images, order)

    def pullback(self, f: SparsePoly) -> SparsePoly:
        """f o self."""
        return f.substitute(self.images)

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(p.evaluate(point) for p in self.images)

    def degree(self) -> int:
        return max(p.degree() for p in self.images)

    def __eq__(self, other):
        if not isinstance(other, PolyAutomorphism):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.images) + ")"

    def to_json(self) -> dict:
        out = {"k": self.k, "images": [p.to_json() for p in self.images]}
        if self.order is not None:
            out["order"] = [c + 1 for c in self.order]
        return out

    @classmethod
    def from_json(cls, obj) -> "PolyAutomorphism":
        if not isinstance(obj, dict) or "k" not in obj or "images" not in obj:
            raise InputError('automorphism JSON must be {"k": k, "images": [...]}')
        k = obj["k"]
        if len(obj["images"]) != k:
            raise InputError("automorphism JSON needs k images")
        order = [c - 1 for c in obj["order"]] if "order" in obj else None
        return cls(tuple(SparsePoly.from_json(k, t) for t in obj["images"]), order)


def compose(a: PolyAutomorphism, b: PolyAutomorphism) -> PolyAutomorphism:
    """Point-map composition a o b."""
    if a.k != b.k:
        raise InputError(f"composing maps of A^{a.k} and A^{b.k}")
    order = a.order if a.order == b.order else None
    return PolyAutomorphism(tuple(p.substitute(b.images) for p in a.images), order)


def product(*autos: PolyAutomorphism) -> PolyAutomorphism:
    """Operator-order product: acts on functions as a_1^* a_2^* ... a_n^*.

    ``product(a, b) == compose(b, a)``, so ``product(exp(x), exp(y))`` is the
    automorphism whose coordinate ring action is exp(x) exp(y).
    """
    if not autos:
        raise InputError("empty product")
    out = autos[-1]
    for a in reversed(autos[:-1]):
        out = compose(out, a)
    return out


def _require_triangular_field(d: VectorField) -> tuple[int, ...]:
    if d.order is None or not d.is_triangular():
        raise InputError("field is not triangular under its declared coordinate order")
    return d.order


def exp_field(d: VectorField) -> PolyAutomorphism:
    order = _require_triangular_field(d)
    images = []
    for i in range(d.k):
        term = SparsePoly.var(d.k, i)
        total = term
        m = 0
        while True:
            term = d.apply(term)
            m += 1
            if term.is_zero():
                break
            if m > LOG_SERIES_CAP:
                raise InternalError("exponential series failed to terminate")
            total = total + term.scale(Fraction(1, factorial(m)))
        images.append(total)
    return PolyAutomorphism(tuple(images), order)


def log_auto(a: PolyAutomorphism) -> VectorField:
    """The triangular field c with exp_field(c) == a."""
    if a.order is None or not a.is_unitriangular():
        raise InputError("automorphism is not unitriangular under its declared order")
    comps = {}
    for i in range(a.k):
        term = SparsePoly.var(a.k, i)
        total = SparsePoly.zero(a.k)
        m = 0
        while True:
            term = a.pullback(term) - term
            m += 1
            if term.is_zero():
                break
            if m > LOG_SERIES_CAP:
                raise InternalError("logarithm series failed to terminate")
            total = total + term.scale(Fraction((-1) ** (m + 1), m))
        comps[i] = total
    return VectorField(a.k, comps, a.order)


def inverse(a: PolyAutomorphism) -> PolyAutomorphism:
    if a.is_identity():
        return a
    return exp_field(-log_auto(a))


def word_eval(gens: Sequence[PolyAutomorphism], word: Iterable[int]) -> PolyAutomorphism:
    """Left-to-right composite of gens[|w|-1]^{sign w} over the signed 1-based word."""
    gens = list(gens)
    if not gens:
        raise InputError("word evaluation needs at least one generator")
    k = gens[0].k
    inverses: dict[int, PolyAutomorphism] = {}
    out = PolyAutomorphism.identity(k)
    for w in word:
        if w == 0 or abs(w) > len(gens):
            raise InputError(f"word letter {w} out of range")
        g = gens[abs(w) - 1]
        if w < 0:
            if w not in inverses:
                inverses[w] = inverse(g)
            g = inverses[w]
        out = compose(out, g)
    return out
