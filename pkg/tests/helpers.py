"""Shared fixtures and random instance generators for the test suite."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

from toric_alt.lattice import LatticeCone, content, validate_cone
from toric_alt.polyauto import SparsePoly, VectorField
from toric_alt.roots import DemazureRoot, enumerate_roots

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE_GENERATORS = [
    DemazureRoot(1, (-1, 1, 1)),
    DemazureRoot(2, (0, -1, 1)),
    DemazureRoot(2, (0, -1, 2)),
    DemazureRoot(3, (0, 0, -1)),
]

# y d/dx and d/dy on the plane; closes to span(d/dx, y d/dx, d/dy)
HEISENBERG_GENERATORS = [DemazureRoot(1, (-1, 1)), DemazureRoot(2, (0, -1))]

PLANAR = {
    (0, 0): [DemazureRoot(1, (-1, 0)), DemazureRoot(2, (0, -1))],
    (1, 0): [DemazureRoot(1, (-1, 1)), DemazureRoot(2, (0, -1))],
    (2, 1): [DemazureRoot(1, (-1, 2)), DemazureRoot(2, (1, -1))],
    (1, 1): [DemazureRoot(1, (-1, 1)), DemazureRoot(2, (1, -1))],
    (2, 2): [DemazureRoot(1, (-1, 2)), DemazureRoot(2, (2, -1))],
}


def fixture(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str) -> dict:
    return json.loads(fixture(name).read_text())


def example_cone() -> LatticeCone:
    return LatticeCone.octant(3)


def random_cone(rng: random.Random, max_rank: int = 4, max_rays: int = 6) -> LatticeCone:
    """A valid pointed cone: the standard basis plus a few primitive vectors with entries in 0..2."""
    while True:
        n = rng.randint(2, max_rank)
        rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        for _ in range(rng.randint(0, max_rays - n)):
            v = tuple(rng.randint(0, 2) for _ in range(n))
            g = content(v)
            if g == 0:
                continue
            v = tuple(x // g for x in v)
            if v not in rays:
                rays.append(v)
        rng.shuffle(rays)
        cone = LatticeCone(n, tuple(rays))
        if validate_cone(cone).ok:
            return cone


def random_roots(rng: random.Random, cone: LatticeCone, count: int, bound: int = 2) -> list[DemazureRoot]:
    pools = {j: enumerate_roots(cone, j, bound) for j in range(1, cone.k + 1)}
    rays = [j for j, rs in pools.items() if rs]
    out = []
    for _ in range(count):
        j = rng.choice(rays)
        out.append(rng.choice(pools[j]))
    return out


def random_triangular_field(rng: random.Random, k: int, terms: int = 3, max_exp: int = 2) -> VectorField:
    order = list(range(k))
    rng.shuffle(order)
    comps = {}
    for pos, i in enumerate(order):
        later = order[pos + 1 :]
        if not later:
            continue
        poly = SparsePoly.zero(k)
        for _ in range(rng.randint(0, terms)):
            ex = [0] * k
            for v in later:
                ex[v] = rng.randint(0, max_exp)
            poly = poly + SparsePoly.monomial(ex, Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        if not poly.is_zero():
            comps[i] = poly
    return VectorField(k, comps, tuple(order))


# (criterion number, passed, detail) lines collected by the acceptance suite
ACCEPTANCE: list[tuple[int, bool, str]] = []


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((number, ok, detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
