"""Exact coefficient rings.

Four kinds of coefficient ring are supported: the integers, the rationals,
univariate polynomials over the rationals and the free (noncommutative)
algebra over the rationals on a finite set of named generators.  A fifth
ring, rational functions in one variable, exists only as the target of the
fraction oracle and cannot be used as a session coefficient ring.

Elements are plain immutable Python values (``int``, ``Fraction``,
:class:`Poly`, :class:`NCPoly`, :class:`RatFunc`); the ring object carries the
operations.  Every operation returns a canonical form, so ``==`` on elements
is structural equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import Matrix as SympyMatrix
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.domains import ZZ


class DomainError(ValueError):
    """Shape or ring mismatch in an otherwise well-typed call."""


class Unsupported(Exception):
    """The coefficient ring lacks the capability the operation needs."""


class PreconditionError(ValueError):
    """A documented precondition of the operation does not hold."""


# --------------------------------------------------------------------------
# element types


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]
    var: str = "t"

    @staticmethod
    def make(coeffs: Iterable, var: str = "t") -> "Poly":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return Poly(tuple(cs), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            terms.append(_signed_term(c, mono))
        return _join_terms(terms)


Word = tuple[str, ...]


@dataclass(frozen=True)
class NCPoly:
    """Element of a free algebra: sorted tuple of (word, nonzero coefficient)."""

    terms: tuple[tuple[Word, Fraction], ...]

    @staticmethod
    def make(pairs: Iterable[tuple[Word, Fraction]]) -> "NCPoly":
        acc: dict[Word, Fraction] = {}
        for w, c in pairs:
            acc[w] = acc.get(w, Fraction(0)) + Fraction(c)
        items = [(w, c) for w, c in acc.items() if c != 0]
        items.sort(key=lambda wc: (len(wc[0]), wc[0]))
        return NCPoly(tuple(items))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = [_signed_term(c, "*".join(w)) for w, c in reversed(self.terms)]
        return _join_terms(parts)


@dataclass(frozen=True)
class RatFunc:
    """Reduced quotient of polynomials with monic denominator."""

    num: Poly
    den: Poly

    def __str__(self) -> str:
        if self.den.coeffs == (Fraction(1),):
            return str(self.num)
        return f"({self.num})/({self.den})"


def _signed_term(c: Fraction, mono: str) -> str:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if mono == "":
        body = str(a)
    elif a == 1:
        body = mono
    else:
        body = f"{a}*{mono}"
    return f"{sign} {body}"


def _join_terms(terms: list[str]) -> str:
    s = " ".join(terms)
    if s.startswith("+ "):
        return s[2:]
    return "-" + s[2:]


# --------------------------------------------------------------------------
# textual syntax: sums of monomials such as ``2*x*y - y*x + 1`` or ``3*t^2 - 1``

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|([*+\-]))")


def parse_monomials(text: str) -> list[tuple[Fraction, list[str]]]:
    """Parse a signed sum of monomials into (coefficient, factor names) pairs.

    Exponents ``x^k`` are expanded into ``k`` repeated factors.
    """
    toks: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    if not text:
        raise DomainError("empty ring element")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"bad character {text[pos]!r} at column {pos + 1} in {text!r}")
        pos = m.end()
        num, name, caret, op = m.groups()
        if num is not None:
            toks.append(("num", num))
        elif name is not None:
            toks.append(("name", name))
        elif caret:
            toks.append(("^", "^"))
        elif op:
            toks.append(("op", op))
    out: list[tuple[Fraction, list[str]]] = []
    i = 0
    sign = 1
    expect_term = True
    while i < len(toks):
        kind, val = toks[i]
        if expect_term:
            if kind == "op" and val in "+-":
                sign = sign * (-1 if val == "-" else 1)
                i += 1
                continue
            coef = Fraction(sign)
            names: list[str] = []
            while True:
                if i >= len(toks):
                    raise DomainError(f"dangling operator in {text!r}")
                kind, val = toks[i]
                if kind == "num":
                    coef *= Fraction(val)
                    i += 1
                elif kind == "name":
                    i += 1
                    rep = 1
                    if i < len(toks) and toks[i][0] == "^":
                        if i + 1 >= len(toks) or toks[i + 1][0] != "num" or "/" in toks[i + 1][1]:
                            raise DomainError(f"bad exponent in {text!r}")
                        rep = int(toks[i + 1][1])
                        i += 2
                    names.extend([val] * rep)
                else:
                    raise DomainError(f"unexpected {val!r} in {text!r}")
                if i < len(toks) and toks[i] == ("op", "*"):
                    i += 1
                    continue
                break
            out.append((coef, names))
            sign = 1
            expect_term = False
        else:
            if kind == "op" and val in "+-":
                sign = -1 if val == "-" else 1
                expect_term = True
                i += 1
            else:
                raise DomainError(f"expected + or - before {val!r} in {text!r}")
    if expect_term:
        raise DomainError(f"dangling operator in {text!r}")
    return out


# --------------------------------------------------------------------------
# polynomial helpers (coefficient lists, lowest degree first)


def _padd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _trim(a: list[Fraction]) -> list[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b.coeffs:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    q = [Fraction(0)] * max(len(r) - len(b.coeffs) + 1, 0)
    lb = b.coeffs[-1]
    while len(_trim(r)) >= len(b.coeffs):
        shift = len(r) - len(b.coeffs)
        c = r[-1] / lb
        q[shift] = c
        for k, bc in enumerate(b.coeffs):
            r[shift + k] -= c * bc
    return Poly.make(q, a.var), Poly.make(r, a.var)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    while b.coeffs:
        a, b = b, poly_divmod(a, b)[1]
    if not a.coeffs:
        return a
    return Poly.make([c / a.lead() for c in a.coeffs], a.var)


# --------------------------------------------------------------------------
# rings


class Ring:
    """Base class: a coefficient ring descriptor plus its arithmetic."""

    kind: str = "abstract"
    is_commutative: bool = True
    supports_linear_solving: bool = False
    is_field: bool = False

    # -- required by subclasses
    zero: object
    one: object

    def contains(self, a) -> bool:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def try_invert(self, a):
        """Two-sided inverse of ``a`` or ``None`` when ``a`` is not a unit."""
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def random_element(self, rng, height: int):
        raise NotImplementedError

    # -- derived
    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def from_int(self, n: int):
        return self._from_int(n)

    def _from_int(self, n: int):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def format(self, a) -> str:
        return str(a)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()

    @property
    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "is_commutative": self.is_commutative,
            "supports_linear_solving": self.supports_linear_solving,
        }


class Integers(Ring):
    kind = "integers"
    supports_linear_solving = True
    zero = 0
    one = 1

    def contains(self, a) -> bool:
        return type(a) is int

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def try_invert(self, a):
        return a if a in (1, -1) else None

    def _from_int(self, n: int):
        return int(n)

    def parse(self, text: str):
        t = text.strip()
        if not re.fullmatch(r"[+-]?\s*\d+", t):
            raise DomainError(f"not an integer literal: {text!r}")
        return int(t.replace(" ", ""))

    def random_element(self, rng, height: int):
        return rng.randint(-height, height)

    def __str__(self) -> str:
        return "Z"


class Rationals(Ring):
    kind = "rationals"
    supports_linear_solving = True
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def contains(self, a) -> bool:
        return type(a) is Fraction

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def try_invert(self, a):
        return None if a == 0 else 1 / a

    def _from_int(self, n: int):
        return Fraction(n)

    def parse(self, text: str):
        t = text.replace(" ", "")
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", t):
            raise DomainError(f"not a rational literal: {text!r}")
        q = Fraction(t)
        return q

    def format(self, a) -> str:
        return str(a)

    def random_element(self, rng, height: int):
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    def __str__(self) -> str:
        return "Q"


class PolynomialsQ(Ring):
    """Q[var]."""

    kind = "univariate-polynomials-over-rationals"

    def __init__(self, var: str = "t"):
        self.var = var
        self.zero = Poly((), var)
        self.one = Poly((Fraction(1),), var)

    def _key(self):
        return (self.var,)

    def __repr__(self) -> str:
        return f"PolynomialsQ({self.var!r})"

    def __str__(self) -> str:
        return f"Q[{self.var}]"

    def contains(self, a) -> bool:
        return isinstance(a, Poly) and a.var == self.var

    def add(self, a, b):
        return Poly.make(_padd(a.coeffs, b.coeffs), self.var)

    def mul(self, a, b):
        return Poly.make(_pmul(a.coeffs, b.coeffs), self.var)

    def neg(self, a):
        return Poly(tuple(-c for c in a.coeffs), self.var)

    def try_invert(self, a):
        if len(a.coeffs) == 1:
            return Poly((1 / a.coeffs[0],), self.var)
        return None

    def _from_int(self, n: int):
        return Poly.make([n], self.var)

    def const(self, c) -> Poly:
        return Poly.make([c], self.var)

    def parse(self, text: str):
        acc = self.zero
        for coef, names in parse_monomials(text):
            if any(n != self.var for n in names):
                raise DomainError(f"unknown variable in {text!r} (ring is {self})")
            acc = self.add(acc, Poly.make([0] * len(names) + [coef], self.var))
        return acc

    def random_element(self, rng, height: int):
        deg = rng.randint(0, 2)
        return Poly.make([rng.randint(-height, height) for _ in range(deg + 1)], self.var)

    def __eq__(self, other):
        return isinstance(other, PolynomialsQ) and other.var == self.var

    __hash__ = Ring.__hash__


class FreeAlgebraQ(Ring):
    """Q<gens>; words are ordered length-then-lexicographic."""

    kind = "free-noncommutative-algebra-over-rationals"

    def __init__(self, gens: Sequence[str]):
        if not gens:
            raise DomainError("free algebra needs at least one generator")
        self.gens = tuple(gens)
        self.is_commutative = len(self.gens) < 2
        self.zero = NCPoly(())
        self.one = NCPoly((((), Fraction(1)),))

    def _key(self):
        return self.gens

    def __repr__(self) -> str:
        return f"FreeAlgebraQ({list(self.gens)!r})"

    def __str__(self) -> str:
        return "Q<" + ",".join(self.gens) + ">"

    def gen(self, name: str) -> NCPoly:
        if name not in self.gens:
            raise DomainError(f"unknown generator {name!r}")
        return NCPoly((((name,), Fraction(1)),))

    def contains(self, a) -> bool:
        return isinstance(a, NCPoly) and all(x in self.gens for w, _ in a.terms for x in w)

    def add(self, a, b):
        return NCPoly.make(a.terms + b.terms)

    def mul(self, a, b):
        return NCPoly.make((wa + wb, ca * cb) for wa, ca in a.terms for wb, cb in b.terms)

    def neg(self, a):
        return NCPoly(tuple((w, -c) for w, c in a.terms))

    def try_invert(self, a):
        # units of a free algebra over a field are the nonzero constants
        if len(a.terms) == 1 and a.terms[0][0] == ():
            return NCPoly((((), 1 / a.terms[0][1]),))
        return None

    def _from_int(self, n: int):
        return NCPoly.make([((), Fraction(n))])

    def parse(self, text: str):
        pairs = []
        for coef, names in parse_monomials(text):
            for n in names:
                if n not in self.gens:
                    raise DomainError(f"unknown generator {n!r} in {text!r}")
            pairs.append((tuple(names), coef))
        return NCPoly.make(pairs)

    def random_element(self, rng, height: int):
        pairs = []
        for _ in range(rng.randint(1, 3)):
            w = tuple(rng.choice(self.gens) for _ in range(rng.randint(0, 2)))
            pairs.append((w, Fraction(rng.randint(-height, height))))
        return NCPoly.make(pairs)

    def __eq__(self, other):
        return isinstance(other, FreeAlgebraQ) and other.gens == self.gens

    __hash__ = Ring.__hash__


class RationalFunctionsQ(Ring):
    """Q(var).  Used only as the target of the fraction oracle."""

    kind = "rational-functions-over-rationals"
    supports_linear_solving = True
    is_field = True

    def __init__(self, var: str = "t"):
        self.var = var
        self.base = PolynomialsQ(var)
        self.zero = RatFunc(self.base.zero, self.base.one)
        self.one = RatFunc(self.base.one, self.base.one)

    def _key(self):
        return (self.var,)

    def __str__(self) -> str:
        return f"Q({self.var})"

    def make(self, num: Poly, den: Poly) -> RatFunc:
        if not den.coeffs:
            raise ZeroDivisionError("zero denominator")
        if not num.coeffs:
            return self.zero
        g = poly_gcd(num, den)
        num = poly_divmod(num, g)[0]
        den = poly_divmod(den, g)[0]
        lc = den.lead()
        return RatFunc(
            Poly.make([c / lc for c in num.coeffs], self.var),
            Poly.make([c / lc for c in den.coeffs], self.var),
        )

    def embed(self, p: Poly) -> RatFunc:
        return RatFunc(p, self.base.one)

    def contains(self, a) -> bool:
        return isinstance(a, RatFunc) and a.num.var == self.var

    def add(self, a, b):
        B = self.base
        return self.make(B.add(B.mul(a.num, b.den), B.mul(b.num, a.den)), B.mul(a.den, b.den))

    def mul(self, a, b):
        B = self.base
        return self.make(B.mul(a.num, b.num), B.mul(a.den, b.den))

    def neg(self, a):
        return RatFunc(self.base.neg(a.num), a.den)

    def try_invert(self, a):
        if not a.num.coeffs:
            return None
        return self.make(a.den, a.num)

    def _from_int(self, n: int):
        return self.embed(self.base.from_int(n))

    def parse(self, text: str):
        return self.embed(self.base.parse(text))

    def random_element(self, rng, height: int):
        return self.embed(self.base.random_element(rng, height))

    def __eq__(self, other):
        return isinstance(other, RationalFunctionsQ) and other.var == self.var

    __hash__ = Ring.__hash__


def fraction_field(ring: Ring) -> tuple[Ring, callable]:
    """Fraction field of a commutative domain together with the embedding."""
    if isinstance(ring, Integers):
        return Rationals(), Fraction
    if isinstance(ring, Rationals):
        return ring, lambda a: a
    if isinstance(ring, PolynomialsQ):
        F = RationalFunctionsQ(ring.var)
        return F, F.embed
    raise Unsupported(f"no fraction field for {ring}")


def ring_from_spec(text: str) -> Ring:
    """``Z``, ``Q``, ``Q[t]`` or ``Q<x,y>``."""
    t = text.replace(" ", "")
    if t == "Z":
        return Integers()
    if t == "Q":
        return Rationals()
    m = re.fullmatch(r"Q\[([A-Za-z_]\w*)\]", t)
    if m:
        return PolynomialsQ(m.group(1))
    m = re.fullmatch(r"Q<([A-Za-z_]\w*(?:,[A-Za-z_]\w*)*)>", t)
    if m:
        return FreeAlgebraQ(m.group(1).split(","))
    raise DomainError(f"unknown ring {text!r}")


def ring_arith(op: str, a, b, ring: Ring):
    """Checked binary arithmetic: ``op`` is one of add, mul, sub (neg ignores b)."""
    if not ring.contains(a) or (op != "neg" and not ring.contains(b)):
        raise DomainError(f"operands are not elements of {ring}")
    if op == "add":
        return ring.add(a, b)
    if op == "mul":
        return ring.mul(a, b)
    if op == "sub":
        return ring.sub(a, b)
    if op == "neg":
        return ring.neg(a)
    raise DomainError(f"unknown operation {op!r}")


# --------------------------------------------------------------------------
# linear solving


def _check_system(A: Sequence[Sequence], b: Sequence | None, ncols: int | None = None):
    rows = len(A)
    cols = len(A[0]) if rows else (ncols or 0)
    if any(len(r) != cols for r in A):
        raise DomainError("ragged system matrix")
    if b is not None and len(b) != rows:
        raise DomainError(f"right-hand side has length {len(b)}, expected {rows}")
    return rows, cols


def _field_rref(ring: Ring, A: list[list]):
    """In-place reduced row echelon form; returns pivot columns."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if not ring.is_zero(A[i][c])), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = ring.try_invert(A[r][c])
        A[r] = [ring.mul(inv, x) for x in A[r]]
        for i in range(rows):
            if i != r and not ring.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return pivots


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Integer Smith normal form via sympy.

    Returns ``(D, U, V)`` as nested int lists with ``U @ A @ V == D``,
    ``U`` and ``V`` unimodular and ``D`` diagonal.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0 or n == 0:
        return ([[0] * n for _ in range(m)], [[int(i == j) for j in range(m)] for i in range(m)],
                [[int(i == j) for j in range(n)] for i in range(n)])
    D, U, V = smith_normal_decomp(SympyMatrix([[int(x) for x in row] for row in A]), domain=ZZ)

    def lists(M):
        return [[int(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]

    return lists(D), lists(U), lists(V)


def _matvec(ring: Ring, M, x):
    out = []
    for row in M:
        acc = ring.zero
        for a, b in zip(row, x):
            acc = ring.add(acc, ring.mul(a, b))
        out.append(acc)
    return out


def solve_linear(ring: Ring, A: Sequence[Sequence], b: Sequence, ncols: int | None = None):
    """Solve ``A x = b``.

    Returns a solution list or ``None`` when the system has no solution.
    Raises :class:`Unsupported` for rings without linear solving.
    ``ncols`` fixes the number of unknowns when ``A`` has no rows.
    """
    rows, cols = _check_system(A, b, ncols)
    if not ring.supports_linear_solving:
        raise Unsupported(f"linear solving is not available over {ring}")
    if rows == 0:
        return [ring.zero] * cols
    if ring.is_field:
        M = [list(r) + [bi] for r, bi in zip(A, b)]
        piv = _field_rref(ring, M)
        if cols in piv:
            return None
        x = [ring.zero] * cols
        for r, c in enumerate(piv):
            x[c] = M[r][cols]
        return x
    if isinstance(ring, Integers):
        D, U, V = smith_normal_form(A)
        c = _matvec(ring, U, b)
        y = [0] * cols
        for i in range(rows):
            d = D[i][i] if i < cols else 0
            if d == 0:
                if c[i] != 0:
                    return None
            else:
                if c[i] % d:
                    return None
                y[i] = c[i] // d
        return _matvec(ring, V, y)
    raise Unsupported(f"linear solving is not available over {ring}")


def kernel_basis(ring: Ring, A: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of ``{x : A x = 0}`` (a lattice basis over Z)."""
    rows, cols = _check_system(A, None, ncols)
    if not ring.supports_linear_solving:
        raise Unsupported(f"kernels are not available over {ring}")
    if rows == 0:
        return [[ring.one if i == j else ring.zero for i in range(cols)] for j in range(cols)]
    if ring.is_field:
        M = [list(r) for r in A]
        piv = _field_rref(ring, M)
        basis = []
        for f in (c for c in range(cols) if c not in piv):
            v = [ring.zero] * cols
            v[f] = ring.one
            for r, c in enumerate(piv):
                v[c] = ring.neg(M[r][f])
            basis.append(v)
        return basis
    D, _, V = smith_normal_form(A)
    rank = sum(1 for i in range(min(rows, cols)) if D[i][i] != 0)
    return [[V[i][j] for i in range(cols)] for j in range(rank, cols)]
