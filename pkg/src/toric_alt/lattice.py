"""Exact lattice arithmetic: pairings, cone validation, Smith normal form, Cl(X).

Both the lattice of one-parameter subgroups and the character lattice are
stored as plain integer tuples in the input coordinates; the pairing is the
dot product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import InputError

Vector = tuple[int, ...]
Matrix = list[list[int]]


def as_vector(v: Iterable[int], length: int | None = None) -> Vector:
    out = []
    for x in v:
        if isinstance(x, bool) or not isinstance(x, int):
            raise InputError(f"lattice entries must be integers, got {x!r}")
        out.append(x)
    if length is not None and len(out) != length:
        raise InputError(f"expected a vector of length {length}, got {len(out)}")
    return tuple(out)


def pairing(rho: Sequence[int], e: Sequence[int]) -> int:
    if len(rho) != len(e):
        raise InputError(f"pairing of vectors of lengths {len(rho)} and {len(e)}")
    return sum(a * b for a, b in zip(rho, e))


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


@dataclass(frozen=True)
class LatticeCone:
    """A cone in Z^rank given by its ray generators (listed, 1-based in I/O)."""

    rank: int
    rays: tuple[Vector, ...]

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 1:
            raise InputError(f"rank must be a positive integer, got {self.rank!r}")
        rays = tuple(as_vector(r, self.rank) for r in self.rays)
        if not rays:
            raise InputError("a cone needs at least one ray")
        object.__setattr__(self, "rays", rays)

    @property
    def k(self) -> int:
        return len(self.rays)

    def ray(self, j: int) -> Vector:
        """Ray generator by 1-based index."""
        if not 1 <= j <= self.k:
            raise InputError(f"ray index {j} out of range 1..{self.k}")
        return self.rays[j - 1]

    def pairings(self, e: Sequence[int]) -> Vector:
        """(<rho_1, e>, ..., <rho_k, e>)."""
        e = as_vector(e, self.rank)
        return tuple(pairing(r, e) for r in self.rays)

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays]}

    @classmethod
    def from_json(cls, obj) -> "LatticeCone":
        if not isinstance(obj, dict) or "rank" not in obj or "rays" not in obj:
            raise InputError('cone JSON must be {"rank": n, "rays": [[...], ...]}')
        if not isinstance(obj["rays"], list):
            raise InputError("cone rays must be a list")
        return cls(obj["rank"], tuple(tuple(r) if isinstance(r, list) else r for r in obj["rays"]))

    @classmethod
    def octant(cls, n: int) -> "LatticeCone":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


# ---------------------------------------------------------------------------
# exact linear algebra over Q


def rank(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col] / m[r][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def solve_unique(columns: Sequence[Sequence[int]], target: Sequence) -> list[Fraction] | None:
    """Unique x with sum_l x_l * columns[l] == target, or None.

    Returns None when there is no solution or when it is not unique.
    """
    n = len(target)
    m = len(columns)
    aug = [[Fraction(columns[l][i]) for l in range(m)] + [Fraction(target[i])] for i in range(n)]
    r = 0
    pivots = []
    for col in range(m):
        piv = next((i for i in range(r, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][col]
        aug[r] = [a / p for a in aug[r]]
        for i in range(n):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    if any(aug[i][m] != 0 for i in range(r, n)):
        return None
    return [aug[i][m] for i in range(m)]


def lp_feasible(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """A nonnegative rational x with A x = b, or None if infeasible.

    Phase-one simplex with Bland's rule, exact over Q.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    rows = []
    for i in range(nrows):
        row = [Fraction(x) for x in A[i]] + [Fraction(b[i])]
        if row[-1] < 0:
            row = [-x for x in row]
        rows.append(row)
    # tableau columns: originals 0..ncols-1, artificials ncols..ncols+nrows-1, rhs last
    width = ncols + nrows
    tab = []
    for i, row in enumerate(rows):
        art = [Fraction(int(i == j)) for j in range(nrows)]
        tab.append(row[:-1] + art + [row[-1]])
    basis = [ncols + i for i in range(nrows)]
    # objective: minimise sum of artificials -> reduced costs
    obj = [Fraction(0)] * (width + 1)
    for row in tab:
        for j in range(width + 1):
            obj[j] -= row[j]
    for j in range(ncols, width):
        obj[j] += 1
    while True:
        entering = next((j for j in range(width) if obj[j] < 0), None)
        if entering is None:
            break
        best = None
        for i, row in enumerate(tab):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded; cannot happen for phase one
            break
        i = best[1]
        p = tab[i][entering]
        tab[i] = [x / p for x in tab[i]]
        for r in range(nrows):
            if r != i and tab[r][entering] != 0:
                f = tab[r][entering]
                tab[r] = [x - f * y for x, y in zip(tab[r], tab[i])]
        f = obj[entering]
        obj = [x - f * y for x, y in zip(obj, tab[i])]
        basis[i] = entering
    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * ncols
    for i, bvar in enumerate(basis):
        if bvar < ncols:
            x[bvar] = tab[i][-1]
    return x


def in_cone(target: Sequence[int], generators: Sequence[Sequence[int]]) -> bool:
    """Is target a nonnegative rational combination of generators?"""
    if not generators:
        return all(t == 0 for t in target)
    n = len(target)
    A = [[g[i] for g in generators] for i in range(n)]
    return lp_feasible(A, list(target)) is not None


# ---------------------------------------------------------------------------
# cone validation


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    index: int | None = None  # 1-based ray index of the offender, if any
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "ok": c.ok, "index": c.index, "detail": c.detail}
                for c in self.checks
            ],
        }


@lru_cache(maxsize=256)
def _cone_checks(cone: LatticeCone) -> tuple[Check, ...]:
    report = ValidationReport()
    n, k = cone.rank, cone.k
    report.checks.append(Check("count", k >= n, None, f"k={k}, n={n}"))
    for j, r in enumerate(cone.rays, start=1):
        g = content(r)
        report.checks.append(Check("primitive", g == 1, j, f"gcd={g}"))
    rk = rank(cone.rays)
    report.checks.append(Check("full_dimensional", rk == n, None, f"rank={rk}"))
    # extremality: rho_j must not lie in the cone spanned by the other rays
    for j, r in enumerate(cone.rays, start=1):
        others = [s for i, s in enumerate(cone.rays, start=1) if i != j]
        redundant = any(c != 0 for c in r) and in_cone(r, others)
        report.checks.append(
            Check("extremal", not redundant, j, "lies in the cone of the other rays" if redundant else "")
        )
    # pointed: no nonzero nonnegative combination of the rays vanishes
    A = [[r[i] for r in cone.rays] for i in range(n)] + [[1] * k]
    line = lp_feasible(A, [0] * n + [1]) is not None
    report.checks.append(Check("pointed", not line, None, "cone contains a line" if line else ""))
    return tuple(report.checks)


def validate_cone(cone: LatticeCone) -> ValidationReport:
    return ValidationReport(list(_cone_checks(cone)))


def require_valid_cone(cone: LatticeCone) -> None:
    report = validate_cone(cone)
    if not report.ok:
        msgs = ", ".join(
            f"{c.name}" + (f" (ray {c.index})" if c.index is not None else "") for c in report.failures
        )
        raise InputError(f"invalid cone: {msgs}")


# ---------------------------------------------------------------------------
# Smith normal form


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U*M*V == D, U and V unimodular, D in Smith form."""
    D = [list(row) for row in M]
    m = len(D)
    n = len(D[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(a, b):
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [x + q * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] != 0 and (piv is None or abs(D[i][j]) < abs(D[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return U, D, V
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return U, D, V


# ---------------------------------------------------------------------------
# class group


@dataclass(frozen=True)
class ClassGroup:
    """Cl(X) = Z^k / im(P), presented as prod Z/m_i x Z^free_rank.

    ``rows[i]`` is a linear form on Z^k and ``moduli[i]`` its modulus
    (0 for a free coordinate); a vector's class is the tuple of reduced values.
    """

    k: int
    free_rank: int
    torsion: tuple[int, ...]
    rows: tuple[Vector, ...]
    moduli: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not self.rows

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def pairing_matrix(cone: LatticeCone) -> Matrix:
    """k x n matrix whose column l is the lift of the l-th basis character."""
    return [list(r) for r in cone.rays]


def class_group(cone: LatticeCone) -> ClassGroup:
    require_valid_cone(cone)
    P = pairing_matrix(cone)
    U, D, _ = smith_normal_form(P)
    k, n = cone.k, cone.rank
    rows, moduli, torsion = [], [], []
    for i in range(k):
        d = D[i][i] if i < n else 0
        if d == 1:
            continue
        rows.append(tuple(U[i]))
        moduli.append(d)
        if d > 1:
            torsion.append(d)
    return ClassGroup(k, k - n, tuple(torsion), tuple(rows), tuple(moduli))


def divisor_class(cg: ClassGroup, v: Sequence[int]) -> tuple[int, ...]:
    v = as_vector(v, cg.k)
    out = []
    for row, mod in zip(cg.rows, cg.moduli):
        x = pairing(row, v)
        out.append(x % mod if mod else x)
    return tuple(out)
