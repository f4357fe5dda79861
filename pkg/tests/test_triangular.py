import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohnloc.addcat import Matrix, invert_matrix
from cohnloc.coeff import DomainError, Integers, PreconditionError, Rationals
from cohnloc.complexes import BoundedComplex
from cohnloc.triangular import (PermutedCert, SSet, TriangularCert, assemble, check_factor,
                                dsum_certs, extend, factor_elementary, factor_product)
from helpers import rand_cert

Z, Q = Integers(), Rationals()


def m(rows, R=Z):
    return Matrix.from_ints(R, rows)


S23 = SSet(Z, (m([[2]]), m([[3]])))


def two_by_two():
    return TriangularCert(S23, [("S", 0), ("S", 1)], {(0, 1): m([[5]])})


def test_two_by_two_assembles():
    c = two_by_two()
    assert c.assembled == m([[2, 0], [5, 3]])
    assert assemble(c) == BoundedComplex.two_term(m([[2, 0], [5, 3]]))


def test_trivial_sizes():
    assert assemble(TriangularCert.empty(S23)).is_zero()
    assert assemble(TriangularCert.singleton(S23, 1)) == BoundedComplex.two_term(m([[3]]))


def test_extend_with_glue_gives_the_same_certificate():
    a, b = TriangularCert.singleton(S23, 0), TriangularCert.singleton(S23, 1)
    assert extend(a, b, m([[5]])).assembled == two_by_two().assembled
    split = extend(a, b)
    assert assemble(split) == assemble(a).dsum(assemble(b))


def test_iterated_extend_is_lower_triangular():
    rng = random.Random(5)
    certs = [TriangularCert.singleton(S23, rng.randrange(2)) for _ in range(3)]
    c = certs[0]
    for nxt in certs[1:]:
        glue = m([[rng.randint(-4, 4) for _ in range(c.assembled.ncols)]])
        c = extend(c, nxt, glue)
    a = c.assembled
    assert [a.rows[i][i] for i in range(3)] == [int(x.assembled.rows[0][0]) for x in certs]
    assert all(a.rows[i][j] == 0 for i in range(3) for j in range(i + 1, 3))


def test_shape_errors():
    with pytest.raises(DomainError):
        TriangularCert(S23, [("S", 0), ("S", 1)], {(0, 1): m([[1, 1]])})
    with pytest.raises(DomainError):
        TriangularCert(S23, [("S", 0), ("S", 1)], {(1, 0): m([[1]])})
    with pytest.raises(DomainError):
        extend(TriangularCert.singleton(S23, 0), TriangularCert.singleton(S23, 1), m([[1, 2]]))


def test_factor_two_by_two():
    fs = factor_elementary(two_by_two())
    assert [f.matrix for f in fs] == [m([[2, 0], [0, 1]]), m([[1, 0], [5, 1]]), m([[1, 0], [0, 3]])]
    assert [f.kind for f in fs] == ["InS", "Invertible", "InS"]
    assert factor_product(fs, Z) == m([[2, 0], [5, 3]])


def test_factor_singleton():
    fs = factor_elementary(TriangularCert.singleton(S23, 0))
    assert len(fs) == 1 and fs[0].kind == "InS" and fs[0].matrix == m([[2]])


def test_factor_needs_the_closure_flags():
    bare = SSet(Z, (m([[2]]),), contains_identities=False)
    with pytest.raises(PreconditionError):
        factor_elementary(TriangularCert(bare, [("S", 0), ("S", 0)]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.sampled_from(["Z", "Q"]))
def test_factor_round_trip(seed, n, ring):
    rng = random.Random(seed)
    R = Z if ring == "Z" else Q
    sset = SSet(R, (Matrix.from_ints(R, [[2]]), Matrix.from_ints(R, [[1, 0], [4, 3]]),
                    Matrix.from_ints(R, [[5, 1]])))
    c = rand_cert(rng, sset, n)
    fs = factor_elementary(c)
    assert factor_product(fs, R) == c.assembled
    for f in fs:
        assert check_factor(f, sset)
        if f.kind == "Invertible":
            assert invert_matrix(f.matrix) is not None


def test_dsum_certs_is_block_diagonal():
    c = dsum_certs(TriangularCert.singleton(S23, 0), TriangularCert.identity(S23, 2),
                   TriangularCert.singleton(S23, 1))
    assert c.assembled == m([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 3]])
    assert not c.only_s_tags()


def test_permuted_certificate():
    c = two_by_two()
    upper = m([[3, 5], [0, 2]])
    pc = PermutedCert(c, (1, 0), (1, 0))
    assert pc.certifies(upper)
    assert not pc.certifies(m([[3, 5], [0, 1]]))
    assert PermutedCert.plain(c).certifies(c.assembled)
