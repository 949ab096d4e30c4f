"""The unipotent/free decision with certificates for either branch.

Free witnesses are checked on every reduced word up to a length bound.  To keep
this fast, a word is evaluated modulo a prime at a random point, which proves
it is not the identity when the point moves, and its leading terms along a
random direction are tracked, which proves exact degrees when no cancellation
occurs.  Anything left undecided falls back to exact symbolic evaluation.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bch import LieElement, dynkin_bch, exp_element
from .closure import (
    Basis,
    CommutationGraph,
    LowerCentralSeries,
    RootLieAlgebra,
    TwoCycleWitness,
    close,
    violating_pairs,
)
from .errors import InputError, InternalError
from .lattice import LatticeCone, require_valid_cone
from .polyauto import PolyAutomorphism, SparsePoly, inverse, product, word_eval
from .roots import DemazureRoot, require_root

PRIME = 1_048_573


class Case(str, enum.Enum):
    NOT_FREE = "NOT_FREE"
    CD_GE2 = "CD_GE2"
    C_GE2_D1 = "C_GE2_D1"
    C1_D1 = "C1_D1"

    @property
    def label(self) -> str:
        return {
            "NOT_FREE": "min(c,d)=0",
            "CD_GE2": "c>=2,d>=2",
            "C_GE2_D1": "c>=2,d=1",
            "C1_D1": "c=1,d=1",
        }[self.value]


@dataclass(frozen=True)
class PairProfile:
    c: int
    d: int


def classify_pair(p: PairProfile) -> Case:
    c, d = max(p.c, p.d), min(p.c, p.d)
    if d <= 0:
        return Case.NOT_FREE
    if d >= 2:
        return Case.CD_GE2
    if c >= 2:
        return Case.C_GE2_D1
    return Case.C1_D1


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Specialization:
    point: tuple[int, ...]  # values of the coordinates other than the pair
    s: int = 1
    t: int = 1

    def to_json(self) -> dict:
        return {"point": list(self.point), "s": self.s, "t": self.t}


def _elementary(cone: LatticeCone, b: Basis, scale: int) -> PolyAutomorphism:
    """exp(scale * M d/dx_ray) = (..., x_ray + scale*M, ...)."""
    k = cone.k
    i = b[0] - 1
    hat = cone.pairings(b[1])
    ex = tuple(0 if l == i else h for l, h in enumerate(hat))
    images = [SparsePoly.var(k, l) for l in range(k)]
    images[i] = images[i] + SparsePoly.monomial(ex, scale)
    order = (i, *[l for l in range(k) if l != i])
    return PolyAutomorphism(tuple(images), order)


def normalize_witness(w: TwoCycleWitness) -> TwoCycleWitness:
    """Swap the pair so that c >= d."""
    if w.c >= w.d:
        return w
    return TwoCycleWitness(w.second, w.first, w.d, w.c, (w.chains[1], w.chains[0]), w.roots_by_ray)


def build_witnesses(
    cone: LatticeCone, witness: TwoCycleWitness, s: int = 1, t: int = 1
) -> tuple[PolyAutomorphism, PolyAutomorphism, Specialization]:
    w = witness
    i, j = w.first[0], w.second[0]
    if i == j:
        raise InputError("a 2-cycle needs roots on different rays")
    for b in (w.first, w.second):
        require_root(cone, DemazureRoot(*b))
    c = cone.pairings(w.first[1])[j - 1]
    d = cone.pairings(w.second[1])[i - 1]
    if c != w.c or d != w.d or c <= 0 or d <= 0:
        raise InputError("pair does not satisfy the 2-cycle pairing conditions")
    u1 = _elementary(cone, w.first, s)
    u2 = _elementary(cone, w.second, t)
    point = tuple(1 for _ in range(cone.k - 2))
    return u1, u2, Specialization(point, s, t)


# ---------------------------------------------------------------------------
# word enumeration and fast evaluation


def reduced_words(n_gens: int, max_len: int):
    """All reduced signed words of length 1..max_len in shortlex order."""
    letters = [x for g in range(1, n_gens + 1) for x in (g, -g)]
    level = [()]
    for _ in range(max_len):
        nxt = []
        for w in level:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        yield from nxt
        level = nxt


class _ModularEvaluator:
    """Words tracked by a value at a random point and a leading term along a random direction, mod p.

    Per coordinate the state is (value at P, degree, leading coefficient) where
    the last two describe the restriction to the line P + b t.  Products of
    leading terms are exact; a sum whose top terms cancel (or vanish mod p)
    leaves the leading coefficient unknown and the degree only an upper bound.
    """

    def __init__(self, gens: Sequence[PolyAutomorphism], seed: int, p: int = PRIME):
        self.p = p
        self.k = gens[0].k
        rng = random.Random(seed)
        self.point = tuple(rng.randrange(1, p) for _ in range(self.k))
        self.direction = tuple(rng.randrange(1, p) for _ in range(self.k))
        self.letters: dict[int, list] = {}
        for g, auto in enumerate(gens, start=1):
            self.letters[g] = self._compile(auto)
            self.letters[-g] = self._compile(inverse(auto))

    def _compile(self, auto: PolyAutomorphism):
        out = []
        for l, poly in enumerate(auto.images):
            if poly == SparsePoly.var(self.k, l):
                out.append(None)
            else:
                out.append([(ex, c.numerator * pow(c.denominator, -1, self.p) % self.p) for ex, c in poly.terms.items()])
        return out

    def start(self):
        return tuple(zip(self.point, [1] * self.k, self.direction))

    def apply(self, letter: int, state):
        """State of g o h from the state of h."""
        p = self.p
        out = []
        for l, terms in enumerate(self.letters[letter]):
            if terms is None:
                out.append(state[l])
                continue
            val, top, lc = 0, -1, 0
            for ex, c in terms:
                tv, td, tl = c, 0, c
                for v, e in enumerate(ex):
                    if e:
                        sv, sd, sl = state[v]
                        tv = tv * pow(sv, e, p) % p
                        td += e * sd
                        tl = None if tl is None or sl is None else tl * pow(sl, e, p) % p
                val = (val + tv) % p
                if td > top:
                    top, lc = td, tl
                elif td == top:
                    lc = None if lc is None or tl is None else (lc + tl) % p
            out.append((val, top, lc if lc else None))
        return tuple(out)

    def differs_from_identity(self, state) -> bool:
        return any(s[0] != a for s, a in zip(state, self.point))

    @staticmethod
    def exact_degrees(state) -> list[int | None]:
        """Certified total degrees (None where the leading term is unknown)."""
        return [d if lc is not None else None for _, d, lc in state]


@dataclass
class VerificationReport:
    case: Case
    max_len: int
    words_checked: int = 0
    failures: list[tuple[int, ...]] = field(default_factory=list)
    exact_fallbacks: int = 0
    exact_crosschecks: int = 0
    degree_signature_checked: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {
            "case": self.case.value,
            "max_word_len": self.max_len,
            "words_checked": self.words_checked,
            "failures": [list(w) for w in sorted(self.failures)],
            "exact_fallbacks": self.exact_fallbacks,
            "exact_crosschecks": self.exact_crosschecks,
            "degree_signature_checked": self.degree_signature_checked,
        }
        out.update(self.extra)
        return out


def _specialize(auto: PolyAutomorphism, coords: tuple[int, int], point: Sequence[int]) -> PolyAutomorphism:
    """Restrict to the plane of the two pair coordinates, other coordinates fixed at point."""
    k = auto.k
    i, j = coords
    rest = [l for l in range(k) if l not in coords]
    subs = []
    for l in range(k):
        if l == i:
            subs.append(SparsePoly.var(2, 0))
        elif l == j:
            subs.append(SparsePoly.var(2, 1))
        else:
            subs.append(SparsePoly.const(2, point[rest.index(l)]))
    order = (0, 1) if _moved_coordinate(auto) == i else (1, 0)
    return PolyAutomorphism((auto.images[i].substitute(subs), auto.images[j].substitute(subs)), order)


def _signature_ok(word: tuple[int, ...], dp: int, dq: int) -> bool:
    return dp > dq if abs(word[0]) == 1 else dq > dp


def _exact_degrees(g: PolyAutomorphism, coords: tuple[int, int]) -> tuple[int, int]:
    return g.images[coords[0]].degree(), g.images[coords[1]].degree()


def _check_words(report: VerificationReport, gens, max_len: int, seed: int, coords=None, signature=False):
    ev = _ModularEvaluator(gens, seed)
    states = {(): ev.start()}
    for word in reduced_words(len(gens), max_len):
        # leftmost letter is the outermost map: word = x . rest
        state = ev.apply(word[0], states[word[1:]])
        if len(word) < max_len:
            states[word] = state
        report.words_checked += 1
        nontrivial = ev.differs_from_identity(state)
        degs = ev.exact_degrees(state) if signature else None
        need_exact = not nontrivial or (signature and (degs[coords[0]] is None or degs[coords[1]] is None))
        if need_exact or len(word) <= 3:
            g = word_eval(gens, word)
            if need_exact:
                report.exact_fallbacks += 1
            else:
                report.exact_crosschecks += 1
            if g.is_identity():
                report.failures.append(word)
                continue
            if signature:
                dp, dq = _exact_degrees(g, coords)
                if not need_exact and (dp, dq) != (degs[coords[0]], degs[coords[1]]):
                    raise InternalError(f"fast degree evaluation disagrees with exact evaluation on {word}")
                if not _signature_ok(word, dp, dq):
                    report.failures.append(word)
                    continue
                report.degree_signature_checked += 1
            continue
        if signature:
            if not _signature_ok(word, degs[coords[0]], degs[coords[1]]):
                report.failures.append(word)
                continue
            report.degree_signature_checked += 1
    return report


def _matrix_words(report: VerificationReport, mats, max_len: int) -> None:
    inv = {}
    for g, m in enumerate(mats, start=1):
        (a, b), (c, d) = m
        if a * d - b * c != 1:
            raise InternalError("linear part is not in SL2(Z)")
        inv[g] = m
        inv[-g] = ((d, -b), (-c, a))
    ident = ((1, 0), (0, 1))
    cache = {(): ident}
    for word in reduced_words(len(mats), max_len):
        m = _mul(inv[word[0]], cache[word[1:]])
        if len(word) < max_len:
            cache[word] = m
        report.words_checked += 1
        if m == ident:
            report.failures.append(word)


def _mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _linear_part(plane: PolyAutomorphism):
    rows = []
    for poly in plane.images:
        if poly.degree() > 1 or poly.terms.get((0, 0), 0) != 0:
            raise InternalError("specialized witness is not linear")
        a = poly.terms.get((1, 0), Fraction(0))
        b = poly.terms.get((0, 1), Fraction(0))
        if a.denominator != 1 or b.denominator != 1:
            raise InternalError("specialized witness has non-integral linear part")
        rows.append((int(a), int(b)))
    return tuple(rows)


def _moved_coordinate(auto: PolyAutomorphism) -> int:
    moved = [l for l, p in enumerate(auto.images) if p != SparsePoly.var(auto.k, l)]
    if len(moved) != 1:
        raise InputError("witness must move exactly one coordinate")
    return moved[0]


def verify_witness(
    w1: PolyAutomorphism,
    w2: PolyAutomorphism,
    case: Case,
    max_len: int = 8,
    point: Sequence[int] | None = None,
    seed: int = 0,
) -> VerificationReport:
    """Check every reduced word of length <= max_len; failures are listed sorted by word."""
    if max_len < 1:
        raise InputError("word length bound must be positive")
    if w1.k != w2.k:
        raise InputError("witnesses act on different spaces")
    coords = (_moved_coordinate(w1), _moved_coordinate(w2))
    if coords[0] == coords[1]:
        raise InputError("witnesses move the same coordinate")
    point = tuple(point) if point is not None else (1,) * (w1.k - 2)
    if len(point) != w1.k - 2 or any(v == 0 for v in point):
        raise InputError("specialization point must have k-2 nonzero entries")
    report = VerificationReport(case, max_len)
    if case is Case.CD_GE2:
        _check_words(report, [w1, w2], max_len, seed, coords, signature=True)
    elif case is Case.C_GE2_D1:
        plane = [_specialize(w, coords, point) for w in (w1, w2)]
        _check_words(report, plane, max_len, seed)
    elif case is Case.C1_D1:
        one = [_linear_part(_specialize(w, coords, point)) for w in (w1, w2)]
        two = [_mul(m, m) for m in one]
        _matrix_words(report, two, max_len)
        gens_ok = one == [((1, 1), (0, 1)), ((1, 0), (1, 1))]
        a, b = one
        binv = ((b[1][1], -b[0][1]), (-b[1][0], b[0][0]))
        m = ((1, 0), (0, 1))
        for _ in range(6):
            m = _mul(m, _mul(a, binv))
        report.extra = {
            "linear_parts": [[list(r) for r in mm] for mm in one],
            "free_pair_parameter": 2,
            "sl2z_generators": gens_ok,
            "relation_u1_u2inv_pow6": m == ((1, 0), (0, 1)),
        }
        if not (gens_ok and report.extra["relation_u1_u2inv_pow6"]):
            report.failures.append(())
    else:
        raise InputError(f"no freeness check for case {case.value}")
    report.failures.sort()
    return report


# ---------------------------------------------------------------------------
# certificates and the decision


def random_element(alg: RootLieAlgebra, rng: random.Random, density: float = 0.5) -> LieElement:
    coords = {}
    for b in alg.basis:
        if rng.random() < density:
            coords[b] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return LieElement(coords)


def check_group_law(alg: RootLieAlgebra, samples: int, seed: int = 0) -> int:
    """exp(BCH(a, b)) = exp(a) exp(b) via the Dynkin series; returns the count passed."""
    rng = random.Random(seed)
    n = alg.lcs.nilpotency_class
    passed = 0
    for _ in range(samples):
        a, b = random_element(alg, rng), random_element(alg, rng)
        lhs = exp_element(alg, dynkin_bch(alg, a, b, n))
        rhs = product(exp_element(alg, a), exp_element(alg, b))
        if lhs != rhs:
            raise InternalError("group law fails on a sampled pair")
        passed += 1
    return passed


@dataclass(frozen=True)
class UnipotentCertificate:
    algebra: RootLieAlgebra
    graph: CommutationGraph
    sink_order: tuple[int, ...]
    lcs: LowerCentralSeries
    group_law_samples: int
    seed: int

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def to_json(self) -> dict:
        return {
            "verdict": "unipotent",
            "dim": self.dim,
            "roots": self.algebra.to_json()["roots_by_ray"],
            "graph": self.graph.to_json(),
            "sink_order": list(self.sink_order),
            "lower_central_series": self.lcs.to_json(),
            "pairwise_condition_checked": True,
            "group_law": {"samples": self.group_law_samples, "seed": self.seed, "passed": True},
        }


@dataclass(frozen=True)
class FreeCertificate:
    witness: TwoCycleWitness
    case: Case
    specialization: Specialization
    witness_autos: tuple[PolyAutomorphism, PolyAutomorphism]
    verification: VerificationReport

    @property
    def c(self) -> int:
        return self.witness.c

    @property
    def d(self) -> int:
        return self.witness.d

    def to_json(self) -> dict:
        return {
            "verdict": "free",
            "case": self.case.value,
            "c": self.c,
            "d": self.d,
            "pair": self.witness.to_json(),
            "specialization": self.specialization.to_json(),
            "witness_autos": [a.to_json() for a in self.witness_autos],
            "verification": self.verification.to_json(),
        }


Verdict = UnipotentCertificate | FreeCertificate


def decide(
    cone: LatticeCone,
    generators: Sequence[DemazureRoot],
    cap: int | None = None,
    max_word_len: int = 8,
    group_law_samples: int = 50,
    seed: int = 0,
) -> Verdict:
    require_valid_cone(cone)
    result = close(cone, generators, cap)
    if isinstance(result, RootLieAlgebra):
        alg = result
        acyclic = alg.graph.is_acyclic()
        eq8 = not violating_pairs(cone, alg.basis)
        if not (acyclic and eq8):
            raise InternalError("closed root set disagrees with the acyclicity or pairwise test")
        order = tuple(c + 1 for c in alg.coordinate_order[: len(alg.active_rays)])
        samples = check_group_law(alg, group_law_samples, seed)
        return UnipotentCertificate(alg, alg.graph, order, alg.lcs, samples, seed)
    w = normalize_witness(result)
    case = classify_pair(PairProfile(w.c, w.d))
    if case is Case.NOT_FREE:
        raise InternalError("closure reported a 2-cycle with a zero pairing")
    u1, u2, spec = build_witnesses(cone, w)
    report = verify_witness(u1, u2, case, max_word_len, spec.point, seed)
    if not report.ok:
        raise InternalError(f"free witness failed on words {report.failures[:5]}")
    return FreeCertificate(w, case, spec, (u1, u2), report)


def all_violations(cone: LatticeCone, generators: Sequence[DemazureRoot]) -> list[tuple[Basis, Basis, int, int]]:
    """Every violating pair among the generators themselves."""
    require_valid_cone(cone)
    for g in generators:
        require_root(cone, g)
    return violating_pairs(cone, [(g.ray, g.e) for g in generators])
