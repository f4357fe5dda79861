import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohnloc.addcat import Matrix
from cohnloc.coeff import DomainError, FreeAlgebraQ, Integers, PreconditionError, Rationals
from cohnloc.equality import fraction_oracle_map
from cohnloc.localization import (Forward, InverseOfS, RingMap, ZigZag, compose_roofs, evaluate_functor,
                                  evaluate_roof, forward_roof, from_plain, inverse_roof, invert_s,
                                  roof_to_triple, triple_add, triple_compose, triple_dsum, triple_neg,
                                  zero_triple, zigzag_normalize)
from cohnloc.triangular import SSet
from helpers import rand_triple

Z, Q = Integers(), Rationals()
S2 = SSet(Z, (Matrix.from_ints(Z, [[2]]),))
F2 = fraction_oracle_map(S2)


def value(t):
    return evaluate_functor(t, F2)


def frac(x):
    return Matrix.from_rows(Q, [[Fraction(x)]])


def test_from_plain_examples():
    assert value(from_plain(S2, Matrix.from_ints(Z, [[2]]))) == frac(2)
    assert value(from_plain(S2, Matrix.identity(Z, 2))) == Matrix.identity(Q, 2)
    assert value(zero_triple(S2, 2, 1)).is_zero()


def test_inverse_and_its_arithmetic():
    h = invert_s(S2, 0)
    assert value(h) == frac(Fraction(1, 2))
    assert value(triple_compose(h, h)) == frac(Fraction(1, 4))
    assert value(triple_add(h, h)) == frac(1)
    assert value(triple_compose(h, from_plain(S2, S2[0]))) == frac(1)
    assert value(triple_neg(h)) == frac(Fraction(-1, 2))


def test_compose_block_shape():
    h = invert_s(S2, 0)
    f = from_plain(S2, Matrix.from_ints(Z, [[3]]))
    c = triple_compose(f, h)
    # s = [[s2, 0], [-i1 g2, s1]] with s2 = [2], s1 = id
    assert c.s == Matrix.from_ints(Z, [[2, 0], [-1, 1]])
    assert c.g == Matrix.from_ints(Z, [[0, 3]])
    assert c.i == Matrix.from_ints(Z, [[1], [0]])


def test_dsum_of_plain_maps_is_plain():
    a, b = Matrix.from_ints(Z, [[1, 2]]), Matrix.from_ints(Z, [[3]])
    assert value(triple_dsum(from_plain(S2, a), from_plain(S2, b))) == value(from_plain(S2, a.dsum(b)))


def test_shape_mismatch():
    with pytest.raises(DomainError):
        triple_compose(from_plain(S2, Matrix.identity(Z, 2)), invert_s(S2, 0))
    with pytest.raises(DomainError):
        triple_add(from_plain(S2, Matrix.identity(Z, 2)), invert_s(S2, 0))


def test_roofs():
    r = compose_roofs(inverse_roof(S2, 0), inverse_roof(S2, 0))
    assert r.apex.rank(1) == 0 + 1 + 0  # L^1 (+) B (+) T^1
    assert value(roof_to_triple(r)) == frac(Fraction(1, 4))
    plain = forward_roof(S2, Matrix.from_ints(Z, [[5]]))
    assert value(roof_to_triple(plain)) == frac(5)
    assert evaluate_roof(plain, F2) == frac(5)
    with pytest.raises(PreconditionError):
        evaluate_roof(r, F2)


def test_zigzags():
    s = Matrix.from_ints(Z, [[2]])
    assert value(zigzag_normalize(ZigZag(S2, (InverseOfS(0), Forward(s))))) == frac(1)
    assert value(zigzag_normalize(ZigZag(S2, (Forward(s), InverseOfS(0))))) == frac(1)
    word = (Forward(Matrix.from_ints(Z, [[3]])), InverseOfS(0), InverseOfS(0), Forward(Matrix.from_ints(Z, [[5]])))
    assert value(zigzag_normalize(ZigZag(S2, word))) == frac(Fraction(15, 4))
    with pytest.raises(DomainError):
        ZigZag(S2, (Forward(Matrix.identity(Z, 2)), InverseOfS(0)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 2))
def test_direct_and_factor_inversion_agree(seed, a, b):
    rng = random.Random(seed)
    sset = SSet(Z, (Matrix.from_ints(Z, [[2]]), Matrix.from_ints(Z, [[3]])))
    F = fraction_oracle_map(sset)
    t = rand_triple(rng, sset, a, b)
    assert evaluate_functor(t, F, method="direct") == evaluate_functor(t, F, method="factor")


def test_free_algebra_specialisation():
    A = FreeAlgebraQ(["x", "y"])
    x, y = A.parse("x"), A.parse("y")
    sset = SSet(A, (Matrix(A, 1, 1, [[x]]),))

    def specialise(p):
        # substitute x -> 2, y -> 3 word by word
        total = Fraction(0)
        for word, c in p.terms:
            v = c
            for letter in word:
                v *= 2 if letter == "x" else 3
            total += v
        return total

    ev = RingMap(A, Q, specialise)
    t = triple_compose(from_plain(sset, Matrix(A, 1, 1, [[y]])), invert_s(sset, 0))
    assert evaluate_functor(t, ev) == frac(Fraction(3, 2))
    assert evaluate_functor(t, ev, method="factor") == frac(Fraction(3, 2))
