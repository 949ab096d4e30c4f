import itertools
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_alt.errors import InputError
from toric_alt.lattice import (
    LatticeCone,
    class_group,
    divisor_class,
    in_cone,
    lp_feasible,
    pairing,
    rank,
    require_valid_cone,
    smith_normal_form,
    solve_unique,
    validate_cone,
)


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1 :] for row in m[1:]]) for j in range(len(m)))


def _determinantal_divisors(M):
    """d_i = gcd of all i x i minors."""
    m, n = len(M), len(M[0])
    out = []
    for size in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), size):
            for cols in itertools.combinations(range(n), size):
                g = gcd(g, _det([[M[r][c] for c in cols] for r in rows]))
        out.append(g)
    return out


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_pairing_and_mismatch():
    assert pairing((1, 2, 3), (4, 5, 6)) == 32
    with pytest.raises(InputError):
        pairing((1, 2), (1, 2, 3))


def test_cone_rejects_bad_entries():
    with pytest.raises(InputError):
        LatticeCone(2, ((1, 0), (0, 1, 0)))
    with pytest.raises(InputError):
        LatticeCone(2, ((1.5, 0), (0, 1)))
    with pytest.raises(InputError):
        LatticeCone(0, ())


def test_cone_json_roundtrip():
    cone = LatticeCone(2, ((1, 0), (1, 2)))
    assert LatticeCone.from_json(cone.to_json()) == cone
    with pytest.raises(InputError):
        LatticeCone.from_json({"rays": []})


def test_octant_is_valid():
    assert validate_cone(LatticeCone.octant(3)).ok


@pytest.mark.parametrize(
    "rays, failing",
    [
        (((2, 0), (0, 1)), "primitive"),
        (((1, 0),), "count"),
        (((1, 0), (2, 0)), "full_dimensional"),
        (((1, 0), (0, 1), (1, 1)), "extremal"),
        (((1, 0), (-1, 0), (0, 1)), "pointed"),
    ],
)
def test_validation_failures(rays, failing):
    cone = LatticeCone(2, rays)
    report = validate_cone(cone)
    assert not report.ok
    assert failing in {c.name for c in report.failures}
    with pytest.raises(InputError):
        require_valid_cone(cone)


def test_extremal_failure_names_the_ray():
    report = validate_cone(LatticeCone(2, ((1, 0), (0, 1), (1, 1))))
    bad = [c for c in report.failures if c.name == "extremal"]
    assert [c.index for c in bad] == [3]


def test_rank_and_solve():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0, 0], [0, 1, 0], [1, 1, 0]]) == 2
    assert solve_unique([(1, 0), (1, 2)], (3, 4)) == [Fraction(1), Fraction(2)]
    assert solve_unique([(1, 0), (2, 0)], (3, 0)) is None
    assert solve_unique([(1, 0)], (0, 1)) is None


def test_lp_feasible():
    x = lp_feasible([[1, 1]], [2])
    assert x is not None and sum(x) == 2 and all(v >= 0 for v in x)
    assert lp_feasible([[1, 1]], [-1]) is None
    assert in_cone((1, 1), [(1, 0), (0, 1)])
    assert not in_cone((-1, 1), [(1, 0), (0, 1)])


def test_snf_small():
    U, D, V = smith_normal_form([[2, 0], [0, 3]])
    assert D == [[1, 0], [0, 6]]
    assert _matmul(_matmul(U, [[2, 0], [0, 3]]), V) == D


matrices = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 3).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_matches_determinantal_divisors(M):
    U, D, V = smith_normal_form(M)
    assert _matmul(_matmul(U, M), V) == D
    assert abs(_det(U)) == 1 and abs(_det(V)) == 1
    m, n = len(M), len(M[0])
    diag = [D[i][i] for i in range(min(m, n))]
    assert all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    # product of the first i invariant factors is the i-th determinantal divisor
    prod = 1
    for d, dd in zip(diag, _determinantal_divisors(M)):
        prod *= d
        assert prod == dd


def test_class_group_octant_trivial():
    cg = class_group(LatticeCone.octant(3))
    assert cg.is_trivial and cg.free_rank == 0 and cg.torsion == ()


def test_class_group_z2():
    cg = class_group(LatticeCone(2, ((1, 0), (1, 2))))
    assert cg.torsion == (2,) and cg.free_rank == 0
    assert divisor_class(cg, (1, 0)) != (0,)
    assert divisor_class(cg, (2, 0)) == (0,)
    # lifts of characters are trivial
    for m in [(1, 0), (0, 1), (3, -5)]:
        assert divisor_class(cg, LatticeCone(2, ((1, 0), (1, 2))).pairings(m)) == (0,)


def test_class_group_free_part():
    cone = LatticeCone(3, ((1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)))
    cg = class_group(cone)
    assert cg.free_rank == 1 and cg.torsion == ()
    assert divisor_class(cg, cone.pairings((1, 2, 3))) == (0,)
    assert divisor_class(cg, (1, 0, 0, 0)) != (0,)
