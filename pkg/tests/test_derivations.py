import random
from fractions import Fraction

import pytest

from helpers import random_cone, random_roots
from toric_alt.derivations import (
    CharacterTerm,
    HomogeneousDerivation,
    MonomialField,
    apply_to_character,
    apply_to_term,
    bracket,
    check_cox_invariance,
    lift_derivation,
    to_cox_field,
)
from toric_alt.errors import InputError
from toric_alt.lattice import LatticeCone
from toric_alt.polyauto import SparsePoly, field_bracket
from toric_alt.roots import DemazureRoot, lift_root


def _commutator_on_character(d1, d2, m):
    """d1(d2(chi^m)) - d2(d1(chi^m)), by direct application."""
    a = apply_to_term(d1, apply_to_character(d2, m))
    b = apply_to_term(d2, apply_to_character(d1, m))
    if a.coeff == 0:
        return CharacterTerm(-b.coeff, b.m)
    if b.coeff == 0:
        return a
    assert a.m == b.m
    return CharacterTerm(a.coeff - b.coeff, a.m)


def test_canonical_form():
    d = HomogeneousDerivation(3, (-2, 0), (1, 1))
    assert d.rho == (1, 0) and d.coeff == -6
    z = HomogeneousDerivation(0, (1, 2), (3, 4))
    assert z.rho == (0, 0) and z.e == (0, 0)
    assert HomogeneousDerivation.from_json(d.to_json()) == d


def test_action_on_character():
    d = HomogeneousDerivation(1, (1, 0), (-1, 1))
    t = apply_to_character(d, (2, 0))
    assert t == CharacterTerm(2, (1, 1))
    assert apply_to_character(d, (0, 3)) == CharacterTerm(0, (0, 0))
    with pytest.raises(InputError):
        apply_to_character(d, (1, 2, 3))


def test_bracket_heisenberg():
    # [y d/dx, d/dy] = -d/dx
    a = HomogeneousDerivation(1, (1, 0), (-1, 1))
    b = HomogeneousDerivation(1, (0, 1), (0, -1))
    assert bracket(a, b) == HomogeneousDerivation(-1, (1, 0), (-1, 0))


def test_bracket_antisymmetry_and_same_ray():
    a = HomogeneousDerivation(1, (1, 0), (-1, 2))
    b = HomogeneousDerivation(1, (1, 0), (-1, 0))
    assert bracket(a, b).is_zero()
    c = HomogeneousDerivation(2, (0, 1), (1, -1))
    x, y = bracket(a, c), bracket(c, a)
    assert x.rho == y.rho and x.e == y.e and x.coeff == -y.coeff


@pytest.mark.parametrize("seed", range(10))
def test_bracket_matches_commutator(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    for _ in range(10):
        ds = [
            HomogeneousDerivation(
                Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
                tuple(rng.randint(-3, 3) for _ in range(n)),
                tuple(rng.randint(-3, 3) for _ in range(n)),
            )
            for _ in range(2)
        ]
        br = bracket(*ds)
        for _ in range(20):
            m = tuple(rng.randint(-5, 5) for _ in range(n))
            assert apply_to_character(br, m) == _commutator_on_character(*ds, m)


def test_monomial_field():
    f = MonomialField(1, 1, (0, 2))
    vf = f.to_vector_field()
    assert vf.components[0] == SparsePoly.monomial((0, 2))
    assert MonomialField.from_json(f.to_json()) == f
    with pytest.raises(InputError):
        MonomialField(1, 1, (1, 0))


def test_cox_field_of_lift():
    cone = LatticeCone.octant(3)
    lift = lift_root(cone, DemazureRoot(1, (-1, 1, 1)))
    assert to_cox_field(lift) == MonomialField(1, 1, (0, 1, 1))


def test_lift_derivation_root():
    cone = LatticeCone.octant(2)
    d = HomogeneousDerivation(1, (1, 0), (-1, 2))
    vf = lift_derivation(cone, d, [1])
    assert vf.components == {0: SparsePoly.monomial((0, 2))}


def test_lift_needs_unique_combination():
    cone = LatticeCone.octant(2)
    with pytest.raises(InputError):
        lift_derivation(cone, HomogeneousDerivation(1, (1, 1), (0, 0)), [1])


@pytest.mark.parametrize("seed", range(10))
def test_lift_coherence(seed):
    rng = random.Random(100 + seed)
    cone = random_cone(rng)
    for _ in range(5):
        r1, r2 = random_roots(rng, cone, 2)
        d1, d2 = (HomogeneousDerivation.root(cone, r) for r in (r1, r2))
        rays = sorted({r1.ray, r2.ray})
        lhs = lift_derivation(cone, bracket(d1, d2), rays)
        rhs = field_bracket(lift_derivation(cone, d1, [r1.ray]), lift_derivation(cone, d2, [r2.ray]))
        assert lhs == rhs


def test_cox_invariance_torsion_cone():
    cone = LatticeCone(2, ((1, 0), (1, 2)))
    assert check_cox_invariance(cone, DemazureRoot(1, (-1, 1)))
    assert check_cox_invariance(cone, DemazureRoot(2, (1, -1)))
