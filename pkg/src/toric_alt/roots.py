"""Demazure roots: membership tests, bounded enumeration, lifts to total coordinates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .lattice import LatticeCone, Vector, as_vector, pairing


@dataclass(frozen=True, order=True)
class DemazureRoot:
    ray: int  # 1-based
    e: Vector

    def __post_init__(self):
        if isinstance(self.ray, bool) or not isinstance(self.ray, int):
            raise InputError(f"ray index must be an integer, got {self.ray!r}")
        object.__setattr__(self, "e", as_vector(self.e))

    def to_json(self) -> dict:
        return {"ray": self.ray, "e": list(self.e)}

    @classmethod
    def from_json(cls, obj) -> "DemazureRoot":
        if not isinstance(obj, dict) or "ray" not in obj or "e" not in obj:
            raise InputError('root JSON must be {"ray": j, "e": [...]}')
        if not isinstance(obj["e"], list):
            raise InputError("root vector e must be a list")
        return cls(obj["ray"], tuple(obj["e"]))


@dataclass(frozen=True)
class CoxLift:
    ray: int
    hat_e: Vector


@dataclass(frozen=True)
class RootReport:
    ok: bool
    pairings: Vector
    violations: tuple[str, ...]


def _check_ray(cone: LatticeCone, j: int) -> None:
    if isinstance(j, bool) or not isinstance(j, int) or not 1 <= j <= cone.k:
        raise InputError(f"ray index {j!r} out of range 1..{cone.k}")


def is_demazure_root(cone: LatticeCone, j: int, e: Sequence[int]) -> RootReport:
    _check_ray(cone, j)
    pairs = cone.pairings(e)
    bad = []
    for i, p in enumerate(pairs, start=1):
        if i == j and p != -1:
            bad.append(f"<rho_{i}, e> = {p}, expected -1")
        elif i != j and p < 0:
            bad.append(f"<rho_{i}, e> = {p}, expected >= 0")
    return RootReport(not bad, pairs, tuple(bad))


def require_root(cone: LatticeCone, r: DemazureRoot) -> None:
    rep = is_demazure_root(cone, r.ray, r.e)
    if not rep.ok:
        raise InputError(f"not a Demazure root on ray {r.ray}: {list(r.e)}; " + "; ".join(rep.violations))


def is_in_dual_cone(cone: LatticeCone, m: Sequence[int]) -> bool:
    return all(p >= 0 for p in cone.pairings(m))


def enumerate_roots(cone: LatticeCone, j: int, bound: int) -> list[DemazureRoot]:
    """All roots on ray j with max-norm <= bound, lexicographically sorted.

    One coordinate is solved from the equation <rho_j, e> = -1, so the scan
    runs over a box of one dimension less.
    """
    _check_ray(cone, j)
    if isinstance(bound, bool) or not isinstance(bound, int) or bound <= 0:
        raise InputError(f"bound must be a positive integer, got {bound!r}")
    rho = cone.ray(j)
    n = cone.rank
    pivot = max(range(n), key=lambda i: (abs(rho[i]) == 1, abs(rho[i])))
    if rho[pivot] == 0:
        return []
    free = [i for i in range(n) if i != pivot]
    out = []
    for vals in itertools.product(range(-bound, bound + 1), repeat=len(free)):
        rest = -1 - sum(rho[i] * v for i, v in zip(free, vals))
        if rest % rho[pivot]:
            continue
        x = rest // rho[pivot]
        if abs(x) > bound:
            continue
        e = [0] * n
        for i, v in zip(free, vals):
            e[i] = v
        e[pivot] = x
        if all(pairing(r, e) >= 0 for i, r in enumerate(cone.rays, start=1) if i != j):
            out.append(DemazureRoot(j, tuple(e)))
    out.sort(key=lambda r: r.e)
    return out


def lift_root(cone: LatticeCone, r: DemazureRoot) -> CoxLift:
    require_root(cone, r)
    return CoxLift(r.ray, cone.pairings(r.e))
