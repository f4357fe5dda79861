"""The additive category Free(R): formal ranks and matrices between them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .coeff import DomainError, Integers, Ring


@dataclass(frozen=True)
class FMObject:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise DomainError("rank must be non-negative")

    def __add__(self, other: "FMObject") -> "FMObject":
        return FMObject(self.rank + other.rank)


class Matrix:
    """A morphism ``R^cols -> R^rows`` stored row-major.

    Composition ``f @ g`` means ``f after g``.  Instances are immutable and
    compare structurally (ring, shape and entries).
    """

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: Ring, nrows: int, ncols: int, rows: Sequence[Sequence] = None):
        if rows is None:
            rows = [[ring.zero] * ncols for _ in range(nrows)]
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise DomainError(f"entries do not form a {nrows}x{ncols} matrix")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *_):
        raise AttributeError("Matrix is immutable")

    # -- construction
    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        n = len(rows[0]) if rows else (ncols or 0)
        return cls(ring, len(rows), n, rows)

    @classmethod
    def from_ints(cls, ring: Ring, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "Matrix":
        return cls.from_rows(ring, [[ring.from_int(x) for x in r] for r in rows], ncols)

    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        return cls(ring, nrows, ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        return cls(ring, n, n, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, ring: Ring, n: int, c) -> "Matrix":
        return cls(ring, n, n, [[c if i == j else ring.zero for j in range(n)] for i in range(n)])

    @classmethod
    def block(cls, ring: Ring, blocks: Sequence[Sequence["Matrix | None"]],
              row_sizes: Sequence[int], col_sizes: Sequence[int]) -> "Matrix":
        """Assemble from a grid of blocks; ``None`` stands for a zero block."""
        out = []
        for bi, rs in enumerate(row_sizes):
            part = [[] for _ in range(rs)]
            for bj, cs in enumerate(col_sizes):
                b = blocks[bi][bj]
                if b is None:
                    for r in part:
                        r.extend([ring.zero] * cs)
                    continue
                if (b.nrows, b.ncols) != (rs, cs):
                    raise DomainError(
                        f"block ({bi},{bj}) is {b.nrows}x{b.ncols}, expected {rs}x{cs}"
                    )
                for r, src in zip(part, b.rows):
                    r.extend(src)
            out.extend(part)
        return cls(ring, sum(row_sizes), sum(col_sizes), out)

    # -- shape
    @property
    def domain(self) -> FMObject:
        return FMObject(self.ncols)

    @property
    def codomain(self) -> FMObject:
        return FMObject(self.nrows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.ring == other.ring
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, {self.to_lists()})"

    def to_lists(self) -> list[list[str]]:
        return [[self.ring.format(x) for x in r] for r in self.rows]

    # -- arithmetic
    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DomainError(f"cannot add {self.shape} and {other.shape}")
        add = self.ring.add
        return Matrix(self.ring, *self.shape,
                      [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(self.ring, *self.shape, [[neg(a) for a in r] for r in self.rows])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DomainError(
                f"cannot compose {self.nrows}x{self.ncols} after {other.nrows}x{other.ncols}"
            )
        R = self.ring
        add, mul, zero = R.add, R.mul, R.zero
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a != zero and b != zero:
                        acc = add(acc, mul(a, b))
                row.append(acc)
            out.append(row)
        return Matrix(R, self.nrows, other.ncols, out)

    def scale(self, c) -> "Matrix":
        """Left scalar multiple ``c * self``."""
        mul = self.ring.mul
        return Matrix(self.ring, *self.shape, [[mul(c, a) for a in r] for r in self.rows])

    def dsum(self, other: "Matrix") -> "Matrix":
        return Matrix.block(self.ring, [[self, None], [None, other]],
                            [self.nrows, other.nrows], [self.ncols, other.ncols])

    def hstack(self, other: "Matrix") -> "Matrix":
        return Matrix.block(self.ring, [[self, other]], [self.nrows], [self.ncols, other.ncols])

    def vstack(self, other: "Matrix") -> "Matrix":
        return Matrix.block(self.ring, [[self], [other]], [self.nrows, other.nrows], [self.ncols])

    def sub(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(self.ring, r1 - r0, c1 - c0, [r[c0:c1] for r in self.rows[r0:r1]])

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.ncols, self.nrows, [list(c) for c in zip(*self.rows)]
                      if self.nrows else [[] for _ in range(self.ncols)])

    def permute(self, row_perm: Sequence[int] | None = None, col_perm: Sequence[int] | None = None) -> "Matrix":
        """Row ``i`` of the result is row ``row_perm[i]`` of self (same for columns)."""
        rp = list(range(self.nrows)) if row_perm is None else list(row_perm)
        cp = list(range(self.ncols)) if col_perm is None else list(col_perm)
        if sorted(rp) != list(range(self.nrows)) or sorted(cp) != list(range(self.ncols)):
            raise DomainError("not a permutation")
        return Matrix(self.ring, self.nrows, self.ncols, [[self.rows[i][j] for j in cp] for i in rp])

    def map(self, f: Callable, ring: Ring) -> "Matrix":
        """Apply a ring map entrywise, landing in ``ring``."""
        return Matrix(ring, *self.shape, [[f(a) for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        z = self.ring.zero
        return all(a == z for r in self.rows for a in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == Matrix.identity(self.ring, self.nrows)

    def flat(self) -> list:
        return [a for r in self.rows for a in r]


def mat_ops(op: str, f: Matrix, g: Matrix | None = None) -> Matrix:
    """compose (f after g), add, direct_sum, negate."""
    if op == "compose":
        return f @ g
    if op == "add":
        return f + g
    if op == "direct_sum":
        return f.dsum(g)
    if op == "negate":
        return -f
    raise DomainError(f"unknown matrix operation {op!r}")


def canonical_maps(ring: Ring, X: FMObject, Y: FMObject):
    """``(in_X, pr_X, in_Y, pr_Y)`` for the biproduct ``X (+) Y``."""
    x, y = X.rank, Y.rank
    I = Matrix.identity
    in_x = Matrix.block(ring, [[I(ring, x)], [None]], [x, y], [x])
    in_y = Matrix.block(ring, [[None], [I(ring, y)]], [x, y], [y])
    return in_x, in_x.transpose(), in_y, in_y.transpose()


# --------------------------------------------------------------------------
# determinants and inversion


def determinant(M: Matrix):
    """Fraction-free (Bareiss) determinant over a commutative ring."""
    R = M.ring
    if not R.is_commutative:
        raise DomainError("determinant needs a commutative ring")
    if M.nrows != M.ncols:
        raise DomainError("determinant of a non-square matrix")
    n = M.nrows
    if n == 0:
        return R.one
    if R.is_field:
        return _field_det(M)
    A = [list(r) for r in M.rows]
    sign = R.one
    prev = R.one
    for k in range(n - 1):
        if R.is_zero(A[k][k]):
            p = next((i for i in range(k + 1, n) if not R.is_zero(A[i][k])), None)
            if p is None:
                return R.zero
            A[k], A[p] = A[p], A[k]
            sign = R.neg(sign)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = R.sub(R.mul(A[i][j], A[k][k]), R.mul(A[i][k], A[k][j]))
                A[i][j] = _exact_div(R, num, prev)
        prev = A[k][k]
    return R.mul(sign, A[n - 1][n - 1])


def _exact_div(R: Ring, a, b):
    if isinstance(R, Integers):
        return a // b
    from .coeff import PolynomialsQ, poly_divmod

    if isinstance(R, PolynomialsQ):
        return poly_divmod(a, b)[0]
    return R.mul(a, R.try_invert(b))


def _field_det(M: Matrix):
    R = M.ring
    A = [list(r) for r in M.rows]
    n = len(A)
    det = R.one
    for c in range(n):
        p = next((i for i in range(c, n) if not R.is_zero(A[i][c])), None)
        if p is None:
            return R.zero
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = R.neg(det)
        det = R.mul(det, A[c][c])
        inv = R.try_invert(A[c][c])
        for i in range(c + 1, n):
            if not R.is_zero(A[i][c]):
                f = R.mul(A[i][c], inv)
                A[i] = [R.sub(x, R.mul(f, y)) for x, y in zip(A[i], A[c])]
    return det


def _adjugate(M: Matrix) -> Matrix:
    R = M.ring
    n = M.nrows
    out = [[R.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = Matrix(R, n - 1, n - 1,
                           [[M.rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i])
            d = determinant(minor)
            out[j][i] = d if (i + j) % 2 == 0 else R.neg(d)
    return Matrix(R, n, n, out)


def _triangular_inverse(M: Matrix) -> Matrix | None:
    """Inverse of a lower- or upper-triangular matrix with unit diagonal."""
    R = M.ring
    n = M.nrows
    lower = all(R.is_zero(M.rows[i][j]) for i in range(n) for j in range(i + 1, n))
    upper = all(R.is_zero(M.rows[i][j]) for i in range(n) for j in range(i))
    if not (lower or upper):
        return None
    if not lower:
        # reversing row and column order turns upper-triangular into lower
        T = _triangular_inverse(_reverse(M))
        return None if T is None else _reverse(T)
    diag_inv = [R.try_invert(M.rows[i][i]) for i in range(n)]
    if any(d is None for d in diag_inv):
        return None
    # forward substitution for X with M X = I, column by column
    X = [[R.zero] * n for _ in range(n)]
    for col in range(n):
        for i in range(n):
            acc = R.one if i == col else R.zero
            for k in range(i):
                acc = R.sub(acc, R.mul(M.rows[i][k], X[k][col]))
            X[i][col] = R.mul(diag_inv[i], acc)
    inv = Matrix(R, n, n, X)
    # in a noncommutative ring a right inverse from substitution need not be a left one
    if inv @ M != Matrix.identity(R, n):
        return None
    return inv


def _reverse(M: Matrix) -> Matrix:
    return M.permute(list(range(M.nrows - 1, -1, -1)), list(range(M.ncols - 1, -1, -1)))


def invert_matrix(M: Matrix) -> Matrix | None:
    """Two-sided inverse, or ``None``.

    Complete over fields and over commutative rings whose unit test is exact
    (integers, polynomials); over the free algebra only triangular matrices
    with unit diagonal are inverted.
    """
    if M.nrows != M.ncols:
        return None
    R = M.ring
    n = M.nrows
    if n == 0:
        return M
    if R.is_field:
        A = [list(r) + [R.one if i == j else R.zero for j in range(n)] for i, r in enumerate(M.rows)]
        from .coeff import _field_rref

        piv = _field_rref(R, A)
        if piv[:n] != list(range(n)):
            return None
        return Matrix(R, n, n, [r[n:] for r in A])
    if R.is_commutative:
        d = determinant(M)
        dinv = R.try_invert(d)
        if dinv is None:
            return None
        return _adjugate(M).scale(dinv)
    return _triangular_inverse(M)


# --------------------------------------------------------------------------
# Karoubization and the small envelope


@dataclass(frozen=True)
class KarObject:
    base: FMObject
    idempotent: Matrix

    def __post_init__(self):
        p = self.idempotent
        if p.shape != (self.base.rank, self.base.rank):
            raise DomainError("idempotent must be an endomorphism of the base object")
        if p @ p != p:
            raise DomainError("idempotent condition p*p = p fails")


def kar_hom_contains(src: KarObject, dst: KarObject, f: Matrix) -> bool:
    """Whether ``f`` is a morphism ``(X,p) -> (X',p')``: ``p' f = f p = f``."""
    return dst.idempotent @ f == f and f @ src.idempotent == f


def kar_compose(f: Matrix, g: Matrix) -> Matrix:
    return f @ g


@dataclass(frozen=True)
class SmallEnvelopeWitness:
    """``(X, p)`` with a free complement ``Y`` and maps ``q: X->Y``, ``s: Y->X``."""

    obj: KarObject
    complement: FMObject
    q: Matrix
    s: Matrix


def check_small_envelope(w: SmallEnvelopeWitness) -> bool:
    p = w.obj.idempotent
    R = p.ring
    x, y = w.obj.base.rank, w.complement.rank
    if w.q.shape != (y, x) or w.s.shape != (x, y):
        return False
    if p @ p != p:
        return False
    return w.s @ w.q == Matrix.identity(R, x) - p and w.q @ w.s == Matrix.identity(R, y)
