import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohnloc.addcat import (FMObject, KarObject, Matrix, SmallEnvelopeWitness, canonical_maps,
                            check_small_envelope, determinant, invert_matrix, kar_hom_contains, mat_ops)
from cohnloc.coeff import DomainError, FreeAlgebraQ, Integers, PolynomialsQ, Rationals
from helpers import rand_matrix

Z, Q = Integers(), Rationals()


def M(rows, R=Z):
    return Matrix.from_ints(R, rows)


def test_block_assembly_and_slicing():
    a, b, c = M([[1, 2]]), M([[3], [4]]), M([[5]])
    big = Matrix.block(Z, [[a, None], [None, c]], [1, 1], [2, 1])
    assert big == M([[1, 2, 0], [0, 0, 5]])
    assert big.sub(0, 1, 0, 2) == a
    assert b.transpose() == M([[3, 4]])
    with pytest.raises(DomainError):
        Matrix.block(Z, [[b]], [1], [1])


def test_biproduct_maps():
    i1, p1, i2, p2 = canonical_maps(Z, FMObject(2), FMObject(1))
    assert p1 @ i1 == Matrix.identity(Z, 2)
    assert p2 @ i2 == Matrix.identity(Z, 1)
    assert (p2 @ i1).is_zero()
    assert i1 @ p1 + i2 @ p2 == Matrix.identity(Z, 3)


def test_shape_mismatch_is_an_error():
    with pytest.raises(DomainError):
        mat_ops("compose", M([[1, 2]]), M([[1, 2]]))
    with pytest.raises(DomainError):
        FMObject(-1)


def test_permute_convention():
    m = M([[1, 2], [3, 4]])
    assert m.permute([1, 0], None) == M([[3, 4], [1, 2]])
    assert m.permute(None, [1, 0]) == M([[2, 1], [4, 3]])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_composition_is_associative_and_distributive(seed, n):
    rng = random.Random(seed)
    for R in (Z, Q):
        a, b, c = (rand_matrix(rng, R, n, n) for _ in range(3))
        assert (a @ b) @ c == a @ (b @ c)
        assert a @ (b + c) == a @ b + a @ c
        assert a.dsum(b) @ c.dsum(c) == (a @ c).dsum(b @ c)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_determinant_is_multiplicative(seed, n):
    rng = random.Random(seed)
    a, b = rand_matrix(rng, Z, n, n), rand_matrix(rng, Z, n, n)
    assert determinant(a @ b) == determinant(a) * determinant(b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_inverse_over_Q(seed, n):
    rng = random.Random(seed)
    a = rand_matrix(rng, Q, n, n)
    inv = invert_matrix(a)
    if determinant(a) == 0:
        assert inv is None
    else:
        assert a @ inv == Matrix.identity(Q, n) == inv @ a


def test_inverse_over_Z_needs_unit_determinant():
    assert invert_matrix(M([[2]])) is None
    u = M([[2, 1], [1, 1]])
    assert u @ invert_matrix(u) == Matrix.identity(Z, 2)


def test_inverse_over_polynomials_and_free_algebra():
    P = PolynomialsQ()
    t = P.parse("t")
    a = Matrix(P, 2, 2, [[P.one, P.zero], [t, P.one]])
    assert a @ invert_matrix(a) == Matrix.identity(P, 2)
    F = FreeAlgebraQ(["x", "y"])
    x = F.parse("x")
    b = Matrix(F, 2, 2, [[F.one, F.zero], [x, F.one]])
    assert invert_matrix(b) @ b == Matrix.identity(F, 2)


def test_karoubi_and_small_envelope():
    p = M([[1, 0], [0, 0]])
    obj = KarObject(FMObject(2), p)
    assert kar_hom_contains(obj, obj, p)
    assert not kar_hom_contains(obj, obj, Matrix.identity(Z, 2))
    q, s = M([[0, 1]]), M([[0], [1]])
    assert check_small_envelope(SmallEnvelopeWitness(obj, FMObject(1), q, s))
    assert not check_small_envelope(SmallEnvelopeWitness(obj, FMObject(1), q, s.scale(2)))
    with pytest.raises(DomainError):
        KarObject(FMObject(1), M([[2]]))
