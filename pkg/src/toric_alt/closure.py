"""Closure of a root set under brackets, with 2-cycle detection.

Basis elements of the closed Lie algebra are pairs ``(ray, e)`` with a 1-based
ray index; the element stands for the root derivation d_{rho_ray, e}.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping, Sequence

from .derivations import HomogeneousDerivation, bracket
from .errors import InputError, InternalError
from .lattice import LatticeCone, Vector, require_valid_cone
from .roots import DemazureRoot, require_root

Basis = tuple[int, Vector]

DEFAULT_CAP = 10_000


def default_cap() -> int:
    raw = os.environ.get("TORIC_ALT_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputError(f"TORIC_ALT_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise InputError("TORIC_ALT_CAP must be positive")
    return cap


@dataclass(frozen=True)
class RootLieAlgebra:
    cone: LatticeCone
    roots_by_ray: Mapping[int, tuple[Vector, ...]]
    generators: Mapping[int, tuple[Vector, ...]]
    # derived root -> (same-ray parent, other-ray root) that produced it
    provenance: Mapping[Basis, tuple[Basis, Basis]] = field(default_factory=dict)

    @cached_property
    def active_rays(self) -> tuple[int, ...]:
        return tuple(sorted(i for i, rs in self.roots_by_ray.items() if rs))

    @cached_property
    def basis(self) -> tuple[Basis, ...]:
        return tuple((i, e) for i in sorted(self.roots_by_ray) for e in self.roots_by_ray[i])

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def lifts(self) -> dict[Basis, Vector]:
        return {b: self.cone.pairings(b[1]) for b in self.basis}

    @cached_property
    def by_lift(self) -> dict[Basis, Basis]:
        """(ray, e_hat) -> basis element."""
        return {(b[0], hat): b for b, hat in self.lifts.items()}

    @cached_property
    def graph(self) -> "CommutationGraph":
        return build_graph(self)

    @cached_property
    def coordinate_order(self) -> tuple[int, ...]:
        """0-based coordinate order making every element triangular."""
        active = sink_order(self.graph)
        rest = [j for j in range(1, self.cone.k + 1) if j not in active]
        return tuple(j - 1 for j in (*active, *rest))

    @cached_property
    def table(self) -> dict[tuple[Basis, Basis], tuple[Fraction, Basis]]:
        return structure_constants(self)

    @cached_property
    def lcs(self) -> "LowerCentralSeries":
        return lower_central_series(self)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "roots_by_ray": {str(i): [list(e) for e in rs] for i, rs in sorted(self.roots_by_ray.items())},
            "generators": {str(i): [list(e) for e in rs] for i, rs in sorted(self.generators.items())},
        }


@dataclass(frozen=True)
class TwoCycleWitness:
    first: Basis
    second: Basis
    c: int  # <rho_second, e_first>
    d: int  # <rho_first, e_second>
    chains: tuple[tuple, tuple]
    roots_by_ray: Mapping[int, tuple[Vector, ...]]

    def to_json(self) -> dict:
        return {
            "first": {"ray": self.first[0], "e": list(self.first[1])},
            "second": {"ray": self.second[0], "e": list(self.second[1])},
            "c": self.c,
            "d": self.d,
            "provenance": [_chain_json(ch) for ch in self.chains],
        }


def _chain_json(chain):
    if chain[0] == "gen":
        return {"ray": chain[1][0], "e": list(chain[1][1]), "from": "generator"}
    _, b, parent, other = chain
    return {"ray": b[0], "e": list(b[1]), "from": [_chain_json(parent), _chain_json(other)]}


def provenance_chain(provenance: Mapping[Basis, tuple[Basis, Basis]], b: Basis):
    """Nested derivation tree of b down to generators."""
    if b not in provenance:
        return ("gen", b)
    parent, other = provenance[b]
    return ("sum", b, provenance_chain(provenance, parent), provenance_chain(provenance, other))


def chain_leaves(chain) -> set[Basis]:
    if chain[0] == "gen":
        return {chain[1]}
    return chain_leaves(chain[2]) | chain_leaves(chain[3])


def close(
    cone: LatticeCone, generators: Sequence[DemazureRoot], cap: int | None = None
) -> RootLieAlgebra | TwoCycleWitness:
    """Bracket-closure fixpoint of the generators' root set.

    Rounds scan every cross-ray pair involving a root added in the previous
    round, in lexicographic order of (ray_i, e, ray_j, e') with ray_i < ray_j.
    The first pair with both pairings positive is returned as a 2-cycle.
    """
    require_valid_cone(cone)
    if not generators:
        raise InputError("at least one generator is required")
    for g in generators:
        if len(g.e) != cone.rank:
            raise InputError(f"root {list(g.e)} has wrong length for rank {cone.rank}")
        require_root(cone, g)
    cap = default_cap() if cap is None else cap

    gens: dict[int, set[Vector]] = {}
    for g in generators:
        gens.setdefault(g.ray, set()).add(g.e)
    lift = {}
    current: set[Basis] = set()
    new = {(g.ray, g.e) for g in generators}
    provenance: dict[Basis, tuple[Basis, Basis]] = {}

    while new:
        for b in new:
            lift[b] = cone.pairings(b[1])
        current |= new
        if len(current) > cap:
            raise InternalError(f"closure exceeded the safety cap of {cap} roots")
        ordered = sorted(current)
        produced: dict[Basis, tuple[Basis, Basis]] = {}
        for x, a in enumerate(ordered):
            i = a[0]
            ha = lift[a]
            a_new = a in new
            for b in ordered[x + 1 :]:
                j = b[0]
                if j == i or not (a_new or b in new):
                    continue
                c = ha[j - 1]
                d = lift[b][i - 1]
                if c > 0 and d > 0:
                    chains = (provenance_chain(provenance, a), provenance_chain(provenance, b))
                    snapshot = _group(current)
                    return TwoCycleWitness(a, b, c, d, chains, snapshot)
                if c > 0:
                    s = (i, tuple(p + q for p, q in zip(a[1], b[1])))
                    if s not in current and s not in produced:
                        produced[s] = (a, b)
                elif d > 0:
                    s = (j, tuple(p + q for p, q in zip(a[1], b[1])))
                    if s not in current and s not in produced:
                        produced[s] = (b, a)
        provenance.update(produced)
        new = set(produced)

    return RootLieAlgebra(
        cone,
        _group(current),
        {i: tuple(sorted(es)) for i, es in sorted(gens.items())},
        provenance,
    )


def _group(basis: Iterable[Basis]) -> dict[int, tuple[Vector, ...]]:
    out: dict[int, list[Vector]] = {}
    for i, e in basis:
        out.setdefault(i, []).append(e)
    return {i: tuple(sorted(out[i])) for i in sorted(out)}


def violating_pairs(cone: LatticeCone, roots: Iterable[Basis]) -> list[tuple[Basis, Basis, int, int]]:
    """Every cross-ray pair with both pairings positive (plain rescan, no closure)."""
    roots = sorted(set(roots))
    out = []
    for x, a in enumerate(roots):
        for b in roots[x + 1 :]:
            if a[0] == b[0]:
                continue
            c = sum(p * q for p, q in zip(cone.ray(b[0]), a[1]))
            d = sum(p * q for p, q in zip(cone.ray(a[0]), b[1]))
            if c > 0 and d > 0:
                out.append((a, b, c, d))
    return out


# ---------------------------------------------------------------------------
# commutation graph


@dataclass(frozen=True)
class CommutationGraph:
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]  # (j, i) means L_j -> L_i
    sizes: Mapping[int, int] = field(default_factory=dict)

    def successors(self, j: int) -> list[int]:
        return sorted(i for (a, i) in self.edges if a == j)

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except CycleError:
            return False
        return True

    def topological_order(self) -> tuple[int, ...]:
        ts = TopologicalSorter({v: [j for (j, i) in self.edges if i == v] for v in self.vertices})
        return tuple(ts.static_order())

    def to_dot(self) -> str:
        lines = ["digraph Gamma {"]
        for v in self.vertices:
            lines.append(f'  L{v} [label="L{v} (dim={self.sizes.get(v, 0)})"];')
        for j, i in sorted(self.edges):
            lines.append(f"  L{j} -> L{i};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [[j, i] for j, i in sorted(self.edges)]}


def graph_of(cone: LatticeCone, roots_by_ray: Mapping[int, Sequence[Vector]]) -> CommutationGraph:
    active = tuple(sorted(i for i, rs in roots_by_ray.items() if rs))
    edges = set()
    for i in active:
        for e in roots_by_ray[i]:
            hat = cone.pairings(e)
            for j in active:
                if j != i and hat[j - 1] > 0:
                    edges.add((j, i))
    return CommutationGraph(active, frozenset(edges), {i: len(roots_by_ray[i]) for i in active})


def build_graph(alg: RootLieAlgebra) -> CommutationGraph:
    return graph_of(alg.cone, alg.roots_by_ray)


def sink_order(g: CommutationGraph) -> tuple[int, ...]:
    """Repeatedly remove the smallest-index vertex emitting no remaining edge."""
    remaining = set(g.vertices)
    edges = set(g.edges)
    order = []
    while remaining:
        sinks = [v for v in remaining if not any(j == v and i in remaining for (j, i) in edges)]
        if not sinks:
            raise InternalError("commutation graph has a directed cycle")
        v = min(sinks)
        order.append(v)
        remaining.remove(v)
    return tuple(order)


# ---------------------------------------------------------------------------
# structure constants and lower central series


def basis_bracket(alg: RootLieAlgebra, a: Basis, b: Basis) -> tuple[Fraction, Basis] | None:
    """[d_a, d_b] as (coefficient, basis element), or None when it vanishes."""
    cone = alg.cone
    out = bracket(HomogeneousDerivation.root(cone, DemazureRoot(*a)), HomogeneousDerivation.root(cone, DemazureRoot(*b)))
    if out.is_zero():
        return None
    for j in (a[0], b[0]):
        rho = cone.ray(j)
        if out.rho == rho:
            coeff = out.coeff
        elif out.rho == tuple(-x for x in rho):
            coeff = -out.coeff
        else:
            continue
        target = (j, out.e)
        if target not in alg.lifts:
            raise InternalError(f"bracket of {a} and {b} leaves the closed root set")
        return coeff, target
    raise InternalError(f"bracket of {a} and {b} is not a root derivation (2-cycle in a closed set)")


def structure_constants(alg: RootLieAlgebra) -> dict[tuple[Basis, Basis], tuple[Fraction, Basis]]:
    """Nonzero brackets of ordered basis pairs."""
    table = {}
    for a in alg.basis:
        for b in alg.basis:
            if a[0] == b[0]:
                continue
            v = basis_bracket(alg, a, b)
            if v is not None:
                table[(a, b)] = v
    return table


def _echelon_rank(vectors: list[dict[Basis, Fraction]]) -> tuple[int, list[dict[Basis, Fraction]]]:
    """Rank and a row-reduced spanning set of sparse rational vectors."""
    rows: list[dict[Basis, Fraction]] = []
    pivots: list[Basis] = []
    for v in vectors:
        v = dict(v)
        for p, row in zip(pivots, rows):
            if p in v:
                f = v[p] / row[p]
                for key, val in row.items():
                    nv = v.get(key, 0) - f * val
                    if nv:
                        v[key] = nv
                    else:
                        v.pop(key, None)
        if v:
            p = min(v)
            rows.append(v)
            pivots.append(p)
    return len(rows), rows


@dataclass(frozen=True)
class LowerCentralSeries:
    dims: tuple[int, ...]  # dims[0] = dim L^1 = dim L, ..., last entry 0

    @property
    def nilpotency_class(self) -> int:
        """Smallest n with L^{n+1} = 0 (0 for the zero algebra)."""
        return len(self.dims) - 1

    def vanishing_index(self) -> int:
        """Smallest i with L^i = 0."""
        return len(self.dims)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "nilpotency_class": self.nilpotency_class}


def lower_central_series(alg: RootLieAlgebra, max_steps: int | None = None) -> LowerCentralSeries:
    """L^1 = L, L^{i+1} = [L, L^i] by exact linear algebra on the bracket table."""
    table = alg.table
    basis = alg.basis
    current = [{b: Fraction(1)} for b in basis]
    dims = [len(basis)]
    max_steps = max_steps if max_steps is not None else len(basis) + 1
    while dims[-1] > 0:
        if len(dims) > max_steps:
            raise InternalError("lower central series does not terminate: algebra is not nilpotent")
        images = []
        for b in basis:
            for v in current:
                w: dict[Basis, Fraction] = {}
                for key, coef in v.items():
                    hit = table.get((b, key))
                    if hit is not None:
                        s, t = hit
                        nv = w.get(t, 0) + s * coef
                        if nv:
                            w[t] = nv
                        else:
                            w.pop(t, None)
                if w:
                    images.append(w)
        r, current = _echelon_rank(images)
        dims.append(r)
    return LowerCentralSeries(tuple(dims))
