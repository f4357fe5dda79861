"""Bounded cochain complexes over Free(R) and their homotopy category.

Differentials raise degree: ``d^n : C^n -> C^{n+1}``.  Shift follows
``C[k]^n = C^{n+k}`` with differential ``(-1)^k d``, and the cone of
``f : X -> Y`` is ``X^{n+1} (+) Y^n`` with differential ``[[-d_X, 0], [f, d_Y]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .addcat import Matrix
from .coeff import DomainError, Ring, Unsupported, kernel_basis, solve_linear


class BoundedComplex:
    """Finite complex; terms outside the stored range are zero."""

    def __init__(self, ring: Ring, ranks: Mapping[int, int], diffs: Mapping[int, Matrix] | None = None):
        self.ring = ring
        self.ranks = {n: r for n, r in sorted(ranks.items()) if r > 0}
        self.diffs: dict[int, Matrix] = {}
        for n, m in sorted((diffs or {}).items()):
            want = (self.rank(n + 1), self.rank(n))
            if m.shape != want:
                raise DomainError(f"d({n}) has shape {m.shape}, expected {want}")
            if m.ring != ring:
                raise DomainError(f"d({n}) has entries in {m.ring}, expected {ring}")
            if not m.is_zero():
                self.diffs[n] = m
        for n in self.diffs:
            if n + 1 in self.diffs and not (self.diffs[n + 1] @ self.diffs[n]).is_zero():
                raise DomainError(f"d({n + 1}) * d({n}) != 0 (degrees {n}, {n + 1})")

    # -- access
    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.diffs.get(n)
        return m if m is not None else Matrix.zero(self.ring, self.rank(n + 1), self.rank(n))

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        return min(self.ranks), max(self.ranks)

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def is_zero(self) -> bool:
        return not self.ranks

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundedComplex)
            and self.ring == other.ring
            and self.ranks == other.ranks
            and self.diffs == other.diffs
        )

    def __hash__(self):
        return hash(tuple(self.ranks.items()))

    def __repr__(self) -> str:
        parts = [f"{n}:{r}" for n, r in self.ranks.items()]
        ds = [f"d({n})={m.to_lists()}" for n, m in self.diffs.items()]
        return f"BoundedComplex({', '.join(parts)}; {' '.join(ds)})"

    # -- constructors
    @classmethod
    def zero(cls, ring: Ring) -> "BoundedComplex":
        return cls(ring, {})

    @classmethod
    def single(cls, ring: Ring, rank: int, degree: int = 0) -> "BoundedComplex":
        return cls(ring, {degree: rank})

    @classmethod
    def two_term(cls, m: Matrix, lo: int = -1) -> "BoundedComplex":
        """``m.domain -> m.codomain`` in degrees ``lo, lo + 1``."""
        return cls(m.ring, {lo: m.ncols, lo + 1: m.nrows}, {lo: m})

    def dsum(self, other: "BoundedComplex") -> "BoundedComplex":
        degs = set(self.ranks) | set(other.ranks)
        return BoundedComplex(
            self.ring,
            {n: self.rank(n) + other.rank(n) for n in degs},
            {n: self.d(n).dsum(other.d(n)) for n in degs},
        )


class ChainMap:
    """Components ``f^n : source^n -> target^n`` commuting with differentials."""

    def __init__(self, source: BoundedComplex, target: BoundedComplex,
                 comps: Mapping[int, Matrix] | None = None, check: bool = True):
        self.source = source
        self.target = target
        self.ring = source.ring
        self.comps: dict[int, Matrix] = {}
        for n, m in (comps or {}).items():
            want = (target.rank(n), source.rank(n))
            if m.shape != want:
                raise DomainError(f"component {n} has shape {m.shape}, expected {want}")
            if not m.is_zero():
                self.comps[n] = m
        if check:
            for n in self._degrees():
                if target.d(n) @ self[n] != self[n + 1] @ source.d(n):
                    raise DomainError(f"chain map does not commute with differentials in degree {n}")

    def _degrees(self) -> list[int]:
        return sorted(set(self.source.ranks) | set(self.target.ranks))

    def __getitem__(self, n: int) -> Matrix:
        m = self.comps.get(n)
        return m if m is not None else Matrix.zero(self.ring, self.target.rank(n), self.source.rank(n))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChainMap)
            and self.source == other.source
            and self.target == other.target
            and self.comps == other.comps
        )

    def __repr__(self) -> str:
        return f"ChainMap({ {n: m.to_lists() for n, m in self.comps.items()} })"

    def _same_ends(self, other: "ChainMap"):
        if self.source != other.source or self.target != other.target:
            raise DomainError("chain maps have different sources or targets")

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._same_ends(other)
        degs = set(self.comps) | set(other.comps)
        return ChainMap(self.source, self.target, {n: self[n] + other[n] for n in degs}, check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -m for n, m in self.comps.items()}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        if other.target != self.source:
            raise DomainError("cannot compose chain maps: target/source mismatch")
        degs = set(self.comps) & set(other.comps)
        return ChainMap(other.source, self.target, {n: self[n] @ other[n] for n in degs}, check=False)

    @classmethod
    def identity(cls, C: BoundedComplex) -> "ChainMap":
        return cls(C, C, {n: Matrix.identity(C.ring, r) for n, r in C.ranks.items()}, check=False)

    @classmethod
    def zero(cls, X: BoundedComplex, Y: BoundedComplex) -> "ChainMap":
        return cls(X, Y, {}, check=False)

    def is_zero(self) -> bool:
        return not self.comps


@dataclass
class Homotopy:
    """``h^n : C^n -> D^{n-1}`` with ``f - g = d h + h d`` in every degree."""

    f: ChainMap
    g: ChainMap
    comps: dict[int, Matrix] = field(default_factory=dict)

    def __getitem__(self, n: int) -> Matrix:
        m = self.comps.get(n)
        if m is not None:
            return m
        return Matrix.zero(self.f.ring, self.f.target.rank(n - 1), self.f.source.rank(n))

    def verify(self) -> bool:
        C, D = self.f.source, self.f.target
        for n in sorted(set(C.ranks) | set(D.ranks)):
            lhs = self.f[n] - self.g[n]
            rhs = D.d(n - 1) @ self[n] + self[n + 1] @ C.d(n)
            if lhs != rhs:
                return False
        return True


# --------------------------------------------------------------------------
# shift and cone


def shift(C: BoundedComplex, k: int) -> BoundedComplex:
    sign = -1 if k % 2 else 1
    return BoundedComplex(
        C.ring,
        {n - k: r for n, r in C.ranks.items()},
        {n - k: (m if sign == 1 else -m) for n, m in C.diffs.items()},
    )


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.source, k), shift(f.target, k),
                    {n - k: m for n, m in f.comps.items()}, check=False)


@dataclass
class Cone:
    complex: BoundedComplex
    incl: ChainMap  # target -> cone
    proj: ChainMap  # cone -> source[1]


def cone(f: ChainMap) -> Cone:
    X, Y, R = f.source, f.target, f.ring
    degs = {n - 1 for n in X.ranks} | set(Y.ranks)
    ranks = {n: X.rank(n + 1) + Y.rank(n) for n in degs}
    diffs = {}
    for n in degs | {n - 1 for n in degs}:
        diffs[n] = Matrix.block(
            R,
            [[-X.d(n + 1), None], [f[n + 1], Y.d(n)]],
            [X.rank(n + 2), Y.rank(n + 1)],
            [X.rank(n + 1), Y.rank(n)],
        )
    K = BoundedComplex(R, ranks, diffs)
    X1 = shift(X, 1)
    incl, proj = {}, {}
    for n in degs:
        x, y = X.rank(n + 1), Y.rank(n)
        incl[n] = Matrix.block(R, [[None], [Matrix.identity(R, y)]], [x, y], [y])
        proj[n] = Matrix.block(R, [[Matrix.identity(R, x), None]], [x], [x, y])
    return Cone(K, ChainMap(Y, K, incl), ChainMap(K, X1, proj))


# --------------------------------------------------------------------------
# homotopy decisions


def _homotopy_unknowns(C: BoundedComplex, D: BoundedComplex):
    """Index table of the entries of ``h^n : C^n -> D^{n-1}``."""
    index = {}
    for n in sorted(C.ranks):
        for r in range(D.rank(n - 1)):
            for c in range(C.rank(n)):
                index[(n, r, c)] = len(index)
    return index


def _homotopy_system(C: BoundedComplex, D: BoundedComplex):
    """Rows of the linear map ``h -> d h + h d`` together with equation labels.

    Only valid over commutative rings: coefficients are pulled to the left.
    """
    R = C.ring
    index = _homotopy_unknowns(C, D)
    rows, labels = [], []
    for n in sorted(set(C.ranks) & set(D.ranks)):
        dD = D.d(n - 1)
        dC = C.d(n)
        for r in range(D.rank(n)):
            for c in range(C.rank(n)):
                row = [R.zero] * len(index)
                for k in range(D.rank(n - 1)):
                    a = dD.rows[r][k]
                    if a != R.zero:
                        j = index[(n, k, c)]
                        row[j] = R.add(row[j], a)
                for k in range(C.rank(n + 1)):
                    a = dC.rows[k][c]
                    if a != R.zero:
                        j = index[(n + 1, r, k)]
                        row[j] = R.add(row[j], a)
                rows.append(row)
                labels.append((n, r, c))
    return index, rows, labels


def _homotopy_from_vector(f: ChainMap, g: ChainMap, index, x) -> Homotopy:
    C, D, R = f.source, f.target, f.ring
    comps = {}
    for n in C.ranks:
        rr, cc = D.rank(n - 1), C.rank(n)
        if rr == 0:
            continue
        comps[n] = Matrix(R, rr, cc, [[x[index[(n, r, c)]] for c in range(cc)] for r in range(rr)])
    return Homotopy(f, g, comps)


def is_null_homotopic(f: ChainMap) -> Homotopy | None:
    """A homotopy ``f ~ 0`` or ``None``; raises :class:`Unsupported` over rings
    without linear solving (the free algebra is verification-only)."""
    R = f.ring
    if not R.supports_linear_solving or not R.is_commutative:
        raise Unsupported(f"null-homotopy search is not available over {R}")
    zero = ChainMap.zero(f.source, f.target)
    if f.is_zero():
        return Homotopy(f, zero, {})
    index, rows, labels = _homotopy_system(f.source, f.target)
    rhs = [f[n].rows[r][c] for (n, r, c) in labels]
    x = solve_linear(R, rows, rhs, ncols=len(index))
    if x is None:
        return None
    h = _homotopy_from_vector(f, zero, index, x)
    if not h.verify():
        raise AssertionError("solver returned a non-homotopy")
    return h


def homotopy_equal(f: ChainMap, g: ChainMap) -> Homotopy | None:
    h = is_null_homotopic(f - g)
    return None if h is None else Homotopy(f, g, h.comps)


def chain_map_space(X: BoundedComplex, Y: BoundedComplex) -> list[ChainMap]:
    """Basis (lattice basis over Z) of all chain maps ``X -> Y``."""
    R = X.ring
    if not R.supports_linear_solving or not R.is_commutative:
        raise Unsupported(f"chain map spaces are not available over {R}")
    index = {}
    for n in sorted(X.ranks):
        for r in range(Y.rank(n)):
            for c in range(X.rank(n)):
                index[(n, r, c)] = len(index)
    rows = []
    # d_Y f^n - f^{n+1} d_X = 0, entrywise
    for n in sorted(set(X.ranks) | set(Y.ranks) | {m - 1 for m in Y.ranks}):
        dY, dX = Y.d(n), X.d(n)
        for r in range(Y.rank(n + 1)):
            for c in range(X.rank(n)):
                row = [R.zero] * len(index)
                for k in range(Y.rank(n)):
                    a = dY.rows[r][k]
                    if a != R.zero:
                        j = index[(n, k, c)]
                        row[j] = R.add(row[j], a)
                for k in range(X.rank(n + 1)):
                    a = dX.rows[k][c]
                    if a != R.zero:
                        j = index[(n + 1, r, k)]
                        row[j] = R.sub(row[j], a)
                rows.append(row)
    basis = kernel_basis(R, rows, ncols=len(index))
    out = []
    for v in basis:
        comps = {}
        for n in X.ranks:
            rr, cc = Y.rank(n), X.rank(n)
            if rr:
                comps[n] = Matrix(R, rr, cc, [[v[index[(n, r, c)]] for c in range(cc)] for r in range(rr)])
        out.append(ChainMap(X, Y, comps))
    return out


# --------------------------------------------------------------------------
# minimal models over a field


@dataclass
class HomotopyEquivalence:
    """``to_model : C -> M`` and ``from_model : M -> C`` with
    ``to_model after from_model = id_M`` exactly and ``from_model after to_model ~ id_C``
    via ``homotopy``."""

    complex: BoundedComplex
    model: BoundedComplex
    to_model: ChainMap
    from_model: ChainMap
    homotopy: Homotopy

    def verify(self) -> bool:
        ok_m = self.to_model @ self.from_model == ChainMap.identity(self.model)
        h = self.homotopy
        ok_c = (
            h.f == self.from_model @ self.to_model
            and h.g == ChainMap.identity(self.complex)
            and h.verify()
        )
        return ok_m and ok_c


def _drop(m: Matrix, row: int | None = None, col: int | None = None) -> Matrix:
    rows = [r for i, r in enumerate(m.rows) if i != row]
    rows = [[x for j, x in enumerate(r) if j != col] for r in rows]
    return Matrix(m.ring, m.nrows - (row is not None), m.ncols - (col is not None), rows)


def _eliminate(C: BoundedComplex, n: int, r: int, c: int):
    """Cancel the invertible entry ``d^n[r][c]``; returns ``(M, f, g, h)``."""
    R = C.ring
    d = C.d(n)
    phi_inv = R.try_invert(d.rows[r][c])
    ranks = dict(C.ranks)
    ranks[n] -= 1
    ranks[n + 1] -= 1
    delta = _drop(d.sub(r, r + 1, 0, d.ncols), col=c)            # 1 x (b-1)
    gamma = _drop(d.sub(0, d.nrows, c, c + 1), row=r)            # (c-1) x 1
    eps = _drop(d, row=r, col=c)
    diffs = dict(C.diffs)
    diffs[n] = eps - (gamma @ delta).scale(phi_inv)
    if n - 1 in diffs:
        diffs[n - 1] = _drop(diffs[n - 1], row=c)
    if n + 1 in diffs:
        diffs[n + 1] = _drop(diffs[n + 1], col=r)
    M = BoundedComplex(R, ranks, diffs)

    f_comps, g_comps = {}, {}
    for k, rk in C.ranks.items():
        I = Matrix.identity(R, rk)
        if k == n:
            f_comps[k] = _drop(I, row=c)
            ins = -delta.scale(phi_inv)
            g_comps[k] = Matrix(R, rk, rk - 1,
                                [ins.rows[0] if i == c else _drop(I, col=c).rows[i] for i in range(rk)])
        elif k == n + 1:
            base = _drop(I, row=r)
            corr = -gamma.scale(phi_inv)
            f_comps[k] = Matrix(R, rk - 1, rk,
                                [[corr.rows[i][0] if j == r else base.rows[i][j] for j in range(rk)]
                                 for i in range(rk - 1)])
            g_comps[k] = _drop(I, col=r)
        else:
            f_comps[k] = I
            g_comps[k] = I
    f = ChainMap(C, M, f_comps)
    g = ChainMap(M, C, g_comps)
    hm = Matrix.zero(R, C.rank(n), C.rank(n + 1))
    hm = Matrix(R, hm.nrows, hm.ncols,
                [[R.neg(phi_inv) if (i, j) == (c, r) else R.zero for j in range(hm.ncols)]
                 for i in range(hm.nrows)])
    h = Homotopy(g @ f, ChainMap.identity(C), {n + 1: hm})
    return M, f, g, h


def minimize(C: BoundedComplex) -> HomotopyEquivalence:
    """Cancel unit differential entries until none remain (field coefficients)."""
    R = C.ring
    if not R.is_field:
        raise Unsupported(f"minimize needs field coefficients, got {R}")
    cur = C
    to_m = ChainMap.identity(C)
    from_m = ChainMap.identity(C)
    hcomps: dict[int, Matrix] = {}
    while True:
        hit = next(
            ((n, i, j) for n, m in sorted(cur.diffs.items())
             for i, row in enumerate(m.rows) for j, a in enumerate(row) if a != R.zero),
            None,
        )
        if hit is None:
            break
        M, f, g, h = _eliminate(cur, *hit)
        # total homotopy: h_old + from_m h_new to_m
        for n, m in h.comps.items():
            term = from_m[n - 1] @ m @ to_m[n]
            hcomps[n] = hcomps[n] + term if n in hcomps else term
        to_m = f @ to_m
        from_m = from_m @ g
        cur = M
    # restore exact chain maps between the original complex and the model
    to_m = ChainMap(C, cur, to_m.comps)
    from_m = ChainMap(cur, C, from_m.comps)
    hom = Homotopy(from_m @ to_m, ChainMap.identity(C), hcomps)
    return HomotopyEquivalence(C, cur, to_m, from_m, hom)


# --------------------------------------------------------------------------
# stupid truncation


@dataclass
class Truncation:
    """``X -> C -> Y -> X[1]`` from the stupid filtration at degree ``n``.

    ``X`` keeps degrees ``>= n`` (a subcomplex), ``Y`` degrees ``<= n - 1``.
    ``cone_to_y``/``y_to_cone`` identify ``cone(X -> C)`` with ``Y`` up to
    ``cone_homotopy`` (``y_to_cone after cone_to_y ~ id``).
    """

    X: BoundedComplex
    Y: BoundedComplex
    incl: ChainMap
    proj: ChainMap
    connecting: ChainMap
    cone: Cone
    cone_to_y: ChainMap
    y_to_cone: ChainMap
    cone_homotopy: Homotopy

    def verify(self) -> bool:
        ok = (self.proj @ self.incl).is_zero()
        ok = ok and self.cone_to_y @ self.y_to_cone == ChainMap.identity(self.Y)
        h = self.cone_homotopy
        ok = ok and h.f == self.y_to_cone @ self.cone_to_y and h.verify()
        return ok


def stupid_truncate(C: BoundedComplex, n: int) -> Truncation:
    R = C.ring
    X = BoundedComplex(R, {k: r for k, r in C.ranks.items() if k >= n},
                       {k: m for k, m in C.diffs.items() if k >= n})
    Y = BoundedComplex(R, {k: r for k, r in C.ranks.items() if k <= n - 1},
                       {k: m for k, m in C.diffs.items() if k <= n - 2})
    incl = ChainMap(X, C, {k: Matrix.identity(R, r) for k, r in X.ranks.items()})
    proj = ChainMap(C, Y, {k: Matrix.identity(R, r) for k, r in Y.ranks.items()})
    X1 = shift(X, 1)
    connecting = ChainMap(Y, X1, {n - 1: C.d(n - 1)} if Y.rank(n - 1) and X.rank(n) else {})
    K = cone(incl)
    KC = K.complex
    # cone^k = X^{k+1} (+) C^k
    c2y, y2c, hcomps = {}, {}, {}
    for k in KC.ranks:
        x, c = X.rank(k + 1), C.rank(k)
        if k <= n - 1 and c:
            c2y[k] = Matrix.block(R, [[None, Matrix.identity(R, c)]], [c], [x, c])
            top = -C.d(n - 1) if k == n - 1 else None
            y2c[k] = Matrix.block(R, [[top], [Matrix.identity(R, c)]], [x, c], [c])
        if k >= n and c:
            # h^k : X^{k+1} (+) C^k -> X^k (+) C^{k-1}, (x, c) -> (-c, 0)
            xk, ck1 = X.rank(k), C.rank(k - 1)
            hcomps[k] = Matrix.block(R, [[None, -Matrix.identity(R, c)], [None, None]],
                                     [xk, ck1], [x, c])
    cone_to_y = ChainMap(KC, Y, c2y)
    y_to_cone = ChainMap(Y, KC, y2c)
    hom = Homotopy(y_to_cone @ cone_to_y, ChainMap.identity(KC), hcomps)
    return Truncation(X, Y, incl, proj, connecting, K, cone_to_y, y_to_cone, hom)
