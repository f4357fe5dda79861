"""Deciding and certifying equality of triples.

Two witness formats are checked structurally: the factorization of
``x' = (0, g1, -g2)`` through a complex ``Z -> T1 (+) T2 -> Z'`` and the
single block identity ``big = (P ; u)(Q v)``.  A fraction-field oracle decides
commutative instances and a bounded search looks for factorization witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .addcat import Matrix
from .coeff import DomainError, PreconditionError, Ring, Unsupported, fraction_field, solve_linear
from .localization import LocTriple, RingMap, evaluate_functor
from .triangular import PermutedCert, SSet, TriangularCert, extend


class Inapplicable:
    """The fraction oracle does not apply to this instance."""

    def __init__(self, reason: str):
        self.reason = reason

    def __repr__(self) -> str:
        return f"Inapplicable({self.reason!r})"

    def __bool__(self) -> bool:
        raise TypeError("Inapplicable has no truth value")


@dataclass(frozen=True)
class NotFoundWithinCap:
    """Search exhausted; this says nothing about inequality."""

    cap: int
    candidates: int


# --------------------------------------------------------------------------
# shared pieces


def _same_ends(t1: LocTriple, t2: LocTriple):
    if (t1.source, t1.target) != (t2.source, t2.target):
        raise DomainError(
            f"triples differ in source/target: {(t1.source, t1.target)} vs {(t2.source, t2.target)}")
    if t1.sset != t2.sset:
        raise DomainError("triples are over different S")


def _want(m: Matrix, shape: tuple[int, int], name: str):
    if m.shape != shape:
        raise DomainError(f"{name} has shape {m.shape}, expected {shape}")


def r_matrix(t1: LocTriple, t2: LocTriple) -> Matrix:
    """``[[i1, s1, 0], [i2, 0, s2]] : A (+) C'1 (+) C'2 -> C1 (+) C2``."""
    R = t1.ring
    return Matrix.block(R, [[t1.i, t1.s, None], [t2.i, None, t2.s]],
                        [t1.s.nrows, t2.s.nrows], [t1.source, t1.mid, t2.mid])


def x_prime(t1: LocTriple, t2: LocTriple) -> Matrix:
    R = t1.ring
    return Matrix.block(R, [[None, t1.g, -t2.g]], [t1.target], [t1.source, t1.mid, t2.mid])


def _cert_ok(cert: TriangularCert, m: Matrix, sset: SSet) -> bool:
    if cert.sset != sset or not cert.certifies(m):
        return False
    return sset.contains_identities or cert.only_s_tags()


# --------------------------------------------------------------------------
# factorization witnesses


@dataclass(frozen=True)
class FactorizationWitness:
    Z: int
    Zp: int
    T1: int
    T2: int
    k1: Matrix  # Z -> T1
    k1_cert: TriangularCert
    k2: Matrix  # T2 -> Z'
    k2_cert: TriangularCert
    p: Matrix  # Z -> T2
    g: Matrix  # T1 -> Z'
    alpha1_0: Matrix  # A (+) C'1 (+) C'2 -> T1 (+) T2
    alpha1_1: Matrix  # C1 (+) C2 -> Z'
    alpha2: Matrix  # T1 (+) T2 -> A'

    def blocks(self) -> dict[str, Matrix]:
        return {"k1": self.k1, "k2": self.k2, "p": self.p, "g": self.g,
                "alpha1_0": self.alpha1_0, "alpha1_1": self.alpha1_1, "alpha2": self.alpha2}

    def replace(self, **kw) -> "FactorizationWitness":
        d = dict(self.__dict__)
        d.update(kw)
        return FactorizationWitness(**d)


def factorization_failures(t1: LocTriple, t2: LocTriple, w: FactorizationWitness) -> list[str]:
    """Names of the conditions the witness violates (empty when it verifies)."""
    _same_ends(t1, t2)
    a, a2 = t1.source, t1.target
    left = a + t1.mid + t2.mid
    right = t1.s.nrows + t2.s.nrows
    _want(w.k1, (w.T1, w.Z), "k1")
    _want(w.k2, (w.Zp, w.T2), "k2")
    _want(w.p, (w.T2, w.Z), "p")
    _want(w.g, (w.Zp, w.T1), "g")
    _want(w.alpha1_0, (w.T1 + w.T2, left), "alpha1_0")
    _want(w.alpha1_1, (w.Zp, right), "alpha1_1")
    _want(w.alpha2, (a2, w.T1 + w.T2), "alpha2")
    out = []
    if not _cert_ok(w.k1_cert, w.k1, t1.sset):
        out.append("k1 certificate")
    if not _cert_ok(w.k2_cert, w.k2, t1.sset):
        out.append("k2 certificate")
    gk2 = w.g.hstack(w.k2)
    k1p = w.k1.vstack(w.p)
    if w.alpha2 @ w.alpha1_0 != x_prime(t1, t2):
        out.append("alpha2 alpha1_0 = (0, g1, -g2)")
    if not (w.alpha2 @ k1p).is_zero():
        out.append("alpha2 (k1 ; p) = 0")
    if gk2 @ w.alpha1_0 != w.alpha1_1 @ r_matrix(t1, t2):
        out.append("(g, k2) alpha1_0 = alpha1_1 r")
    if not (gk2 @ k1p).is_zero():
        out.append("g k1 + k2 p = 0")
    return out


def check_factorization(t1: LocTriple, t2: LocTriple, w: FactorizationWitness) -> bool:
    return not factorization_failures(t1, t2, w)


def tautological_witness(t: LocTriple) -> FactorizationWitness:
    """Witness for ``t == t`` through ``C' -> C (+) C' -> C`` built from ``s`` twice."""
    R = t.ring
    c, cp, a, a2 = t.s.nrows, t.mid, t.source, t.target
    I_cp = Matrix.identity(R, cp)
    alpha1_0 = Matrix.block(R, [[None, None, None], [None, I_cp, -I_cp]], [c, cp], [a, cp, cp])
    I_c = Matrix.identity(R, c)
    return FactorizationWitness(
        Z=cp, Zp=c, T1=c, T2=cp,
        k1=t.s, k1_cert=t.cert, k2=t.s, k2_cert=t.cert,
        p=Matrix.zero(R, cp, cp), g=Matrix.zero(R, c, c),
        alpha1_0=alpha1_0,
        alpha1_1=I_c.hstack(-I_c),
        alpha2=Matrix.zero(R, a2, c).hstack(t.g),
    )


def _solve_left(R: Ring, r: Matrix, x: Matrix) -> Matrix | None:
    """Some ``h`` with ``h r = x`` (commutative rings with linear solving)."""
    rows = []
    rhs = []
    nh = x.nrows * r.nrows
    for i in range(x.nrows):
        for j in range(x.ncols):
            row = [R.zero] * nh
            for k in range(r.nrows):
                row[i * r.nrows + k] = r.rows[k][j]
            rows.append(row)
            rhs.append(x.rows[i][j])
    sol = solve_linear(R, rows, rhs, ncols=nh)
    if sol is None:
        return None
    return Matrix(R, x.nrows, r.nrows, [sol[i * r.nrows:(i + 1) * r.nrows] for i in range(x.nrows)])


def homotopy_witness(t1: LocTriple, t2: LocTriple) -> FactorizationWitness | None:
    """Factor through the contractible ``0 -> A' -> A'`` when ``x' = h r`` is solvable."""
    _same_ends(t1, t2)
    R = t1.ring
    if not R.supports_linear_solving or not R.is_commutative:
        raise Unsupported(f"linear solving is not available over {R}")
    h = _solve_left(R, r_matrix(t1, t2), x_prime(t1, t2))
    if h is None:
        return None
    a2 = t1.target
    I = Matrix.identity(R, a2)
    return FactorizationWitness(
        Z=0, Zp=a2, T1=0, T2=a2,
        k1=Matrix.zero(R, 0, 0), k1_cert=TriangularCert.empty(t1.sset),
        k2=I, k2_cert=TriangularCert.identity(t1.sset, a2),
        p=Matrix.zero(R, a2, 0), g=Matrix.zero(R, a2, 0),
        alpha1_0=x_prime(t1, t2), alpha1_1=h, alpha2=I,
    )


# --------------------------------------------------------------------------
# block-identity witnesses


@dataclass(frozen=True)
class MalcolmsonWitness:
    E1: int
    E2: int
    R1: int
    R2: int
    E: int
    L: Matrix  # E1 -> R1
    M: Matrix  # E2 -> R2
    Q: Matrix  # C'1 (+) C'2 (+) E1 (+) E2 -> E
    P: Matrix  # E -> C1 (+) C2 (+) R1 (+) R2
    u: Matrix  # E -> A'
    v: Matrix  # A -> E
    X: Matrix  # E1 -> A'
    Y: Matrix  # A -> R2
    P_cert: PermutedCert
    L_cert: PermutedCert
    M_cert: PermutedCert

    def blocks(self) -> dict[str, Matrix]:
        return {k: getattr(self, k) for k in ("L", "M", "Q", "P", "u", "v", "X", "Y")}

    def replace(self, **kw) -> "MalcolmsonWitness":
        d = dict(self.__dict__)
        d.update(kw)
        return MalcolmsonWitness(**d)


def malcolmson_lhs(t1: LocTriple, t2: LocTriple, w: MalcolmsonWitness) -> Matrix:
    R = t1.ring
    return Matrix.block(
        R,
        [[t1.s, None, None, None, t1.i],
         [None, t2.s, None, None, -t2.i],
         [None, None, w.L, None, None],
         [None, None, None, w.M, w.Y],
         [t1.g, t2.g, w.X, None, None]],
        [t1.s.nrows, t2.s.nrows, w.R1, w.R2, t1.target],
        [t1.mid, t2.mid, w.E1, w.E2, t1.source],
    )


def check_malcolmson(t1: LocTriple, t2: LocTriple, w: MalcolmsonWitness) -> bool:
    _same_ends(t1, t2)
    c1, c2 = t1.s.nrows, t2.s.nrows
    _want(w.L, (w.R1, w.E1), "L")
    _want(w.M, (w.R2, w.E2), "M")
    _want(w.Q, (w.E, t1.mid + t2.mid + w.E1 + w.E2), "Q")
    _want(w.P, (c1 + c2 + w.R1 + w.R2, w.E), "P")
    _want(w.u, (t1.target, w.E), "u")
    _want(w.v, (w.E, t1.source), "v")
    _want(w.X, (t1.target, w.E1), "X")
    _want(w.Y, (w.R2, t1.source), "Y")
    sset = t1.sset
    for pc, m in ((w.P_cert, w.P), (w.L_cert, w.L), (w.M_cert, w.M)):
        if pc.cert.sset != sset or not pc.certifies(m):
            return False
        if not (sset.contains_identities or pc.cert.only_s_tags()):
            return False
    rhs = w.P.vstack(w.u) @ w.Q.hstack(w.v)
    return malcolmson_lhs(t1, t2, w) == rhs


def _chain_cert(pieces: list[TriangularCert], full: Matrix) -> TriangularCert:
    """Glue certificates for the diagonal blocks of a block lower triangular ``full``."""
    cert = pieces[0]
    for c in pieces[1:]:
        r0, c0 = cert.assembled.shape
        glue = full.sub(r0, r0 + c.assembled.nrows, 0, c0)
        cert = extend(cert, c, glue)
    return cert


def malcolmson_from_factorization(t1: LocTriple, t2: LocTriple, w: FactorizationWitness) -> MalcolmsonWitness:
    """``E = C1 + C2 + C'1 + C'2 + T1 + T2``, ``E1 = T2``, ``E2 = Z + C'1 + C'2``,
    ``R1 = Z'``, ``R2 = T1 + C1 + C2``."""
    if not check_factorization(t1, t2, w):
        raise PreconditionError("factorization witness does not verify")
    R, sset = t1.ring, t1.sset
    a, a2 = t1.source, t1.target
    m1, m2, c1, c2 = t1.mid, t2.mid, t1.s.nrows, t2.s.nrows
    T1, T2, Z, Zp = w.T1, w.T2, w.Z, w.Zp
    s1, s2, i1, i2 = t1.s, t2.s, t1.i, t2.i
    al = w.alpha1_0
    aA, a_1, a_2 = al.sub(0, T1, 0, a), al.sub(0, T1, a, a + m1), al.sub(0, T1, a + m1, a + m1 + m2)
    bA, b_1, b_2 = al.sub(T1, T1 + T2, 0, a), al.sub(T1, T1 + T2, a, a + m1), al.sub(T1, T1 + T2, a + m1, a + m1 + m2)
    mm1, mm2 = w.alpha1_1.sub(0, Zp, 0, c1), w.alpha1_1.sub(0, Zp, c1, c1 + c2)
    cc1, cc2 = w.alpha2.sub(0, a2, 0, T1), w.alpha2.sub(0, a2, T1, T1 + T2)

    def I(n):
        return Matrix.identity(R, n)

    e_sizes = [c1, c2, m1, m2, T1, T2]
    E = sum(e_sizes)
    # Q columns: C'1, C'2, E1 = T2, E2 = (Z, C'1, C'2)
    Qm = Matrix.block(
        R,
        [[s1, None, None, None, None, None],
         [None, s2, None, None, None, None],
         [I(m1), None, None, None, I(m1), None],
         [None, I(m2), None, None, None, I(m2)],
         [a_1, -a_2, None, w.k1, None, None],
         [b_1, -b_2, I(T2), w.p, None, None]],
        e_sizes, [m1, m2, T2, Z, m1, m2],
    )
    v = Matrix.block(R, [[i1], [-i2], [None], [None], [aA], [bA]], e_sizes, [a])
    u = Matrix.block(R, [[None, None, None, None, cc1, cc2]], [a2], e_sizes)
    # P rows: C1, C2, R1 = Z', R2 = (T1, C1, C2)
    P_rows = [c1, c2, Zp, T1, c1, c2]
    P = Matrix.block(
        R,
        [[I(c1), None, None, None, None, None],
         [None, I(c2), None, None, None, None],
         [-mm1, mm2, None, None, w.g, w.k2],
         [None, None, -a_1, a_2, I(T1), None],
         [-I(c1), None, s1, None, None, None],
         [None, -I(c2), None, s2, None, None]],
        P_rows, e_sizes,
    )
    L = w.k2
    M = Matrix.block(R, [[w.k1, -a_1, a_2], [None, s1, None], [None, None, s2]], [T1, c1, c2], [Z, m1, m2])
    Y = Matrix.block(R, [[aA], [-i1], [i2]], [T1, c1, c2], [a])

    # P becomes lower triangular after ordering rows C1, C2, C1b, C2b, T1r, Z'
    offs = list(itertools.accumulate([0] + P_rows))
    order = [0, 1, 4, 5, 3, 2]
    row_perm = tuple(j for b in order for j in range(offs[b], offs[b + 1]))
    P_sorted = P.permute(row_perm, None)
    P_cert = _chain_cert(
        [TriangularCert.identity(sset, c1 + c2), t1.cert, t2.cert,
         TriangularCert.identity(sset, T1), w.k2_cert],
        P_sorted,
    )
    # M becomes lower triangular after reversing both block orders
    moffs = [0, T1, T1 + c1, T1 + c1 + c2]
    mrow = tuple(j for b in (2, 1, 0) for j in range(moffs[b], moffs[b + 1]))
    coffs = [0, Z, Z + m1, Z + m1 + m2]
    mcol = tuple(j for b in (2, 1, 0) for j in range(coffs[b], coffs[b + 1]))
    M_sorted = M.permute(mrow, mcol)
    M_cert = _chain_cert([t2.cert, t1.cert, w.k1_cert], M_sorted)

    return MalcolmsonWitness(
        E1=T2, E2=Z + m1 + m2, R1=Zp, R2=T1 + c1 + c2, E=E,
        L=L, M=M, Q=Qm, P=P, u=u, v=v, X=cc2, Y=Y,
        P_cert=PermutedCert(P_cert, row_perm, tuple(range(E))),
        L_cert=PermutedCert.plain(w.k2_cert),
        M_cert=PermutedCert(M_cert, mrow, mcol),
    )


# --------------------------------------------------------------------------
# fraction-field oracle


def fraction_oracle_map(sset: SSet) -> RingMap | Inapplicable:
    R = sset.ring
    if not R.is_commutative:
        return Inapplicable(f"{R} is not commutative")
    try:
        K, embed = fraction_field(R)
    except Unsupported as e:
        return Inapplicable(str(e))
    F = RingMap(R, K, embed)
    from .addcat import determinant

    for k, s in enumerate(sset.elements):
        if s.nrows != s.ncols:
            return Inapplicable(f"{sset.name(k)} is not square")
        if K.is_zero(determinant(F.apply(s))):
            return Inapplicable(f"{sset.name(k)} is singular over the fraction field")
    return F


def decide_equal_oracle(t1: LocTriple, t2: LocTriple) -> bool | Inapplicable:
    _same_ends(t1, t2)
    F = fraction_oracle_map(t1.sset)
    if isinstance(F, Inapplicable):
        return F
    return evaluate_functor(t1, F) == evaluate_functor(t2, F)


# --------------------------------------------------------------------------
# bounded search


class _System:
    """Linear equations in matrix unknowns, terms ``left @ U @ right``."""

    def __init__(self, ring: Ring):
        self.R = ring
        self.offsets: dict[str, tuple[int, int, int]] = {}
        self.n = 0
        self.rows: list[list] = []
        self.rhs: list = []

    def unknown(self, name: str, nrows: int, ncols: int):
        self.offsets[name] = (self.n, nrows, ncols)
        self.n += nrows * ncols

    def equation(self, terms, const: Matrix):
        """``sum(left @ U @ right) = const``; ``left``/``right`` may be ``None`` (identity)."""
        R = self.R
        eqs = [[{} for _ in range(const.ncols)] for _ in range(const.nrows)]
        for left, name, right in terms:
            off, ur, uc = self.offsets[name]
            for i in range(const.nrows):
                for k in range(ur):
                    lk = (R.one if i == k else R.zero) if left is None else left.rows[i][k]
                    if R.is_zero(lk):
                        continue
                    for l in range(uc):
                        for j in range(const.ncols):
                            rl = (R.one if l == j else R.zero) if right is None else right.rows[l][j]
                            if R.is_zero(rl):
                                continue
                            idx = off + k * uc + l
                            cell = eqs[i][j]
                            cell[idx] = R.add(cell.get(idx, R.zero), R.mul(lk, rl))
        for i in range(const.nrows):
            for j in range(const.ncols):
                self.rows.append(eqs[i][j])
                self.rhs.append(const.rows[i][j])

    def solve(self) -> dict[str, Matrix] | None:
        R = self.R
        dense = []
        for sparse in self.rows:
            row = [R.zero] * self.n
            for idx, val in sparse.items():
                row[idx] = val
            dense.append(row)
        x = solve_linear(R, dense, self.rhs, ncols=self.n)
        if x is None:
            return None
        out = {}
        for name, (off, ur, uc) in self.offsets.items():
            out[name] = Matrix(R, ur, uc, [x[off + k * uc: off + (k + 1) * uc] for k in range(ur)])
        return out


def _tag_lists(sset: SSet, cap: int) -> list[tuple]:
    """Multisets of diagonal tags with at most ``cap`` entries, sorted."""
    alphabet = [("S", k) for k in range(len(sset))]
    if sset.contains_identities:
        alphabet.append(("id", 1))
    out = []
    for n in range(cap + 1):
        out.extend(itertools.combinations_with_replacement(alphabet, n))
    return out


def _box(R: Ring, n: int, radius: int) -> Iterator[list]:
    vals = [R.from_int(v) for v in sorted(range(-radius, radius + 1), key=lambda v: (abs(v), -v))]
    return itertools.product(vals, repeat=n)


def _candidate_shapes(sset: SSet, cap: int):
    tags = _tag_lists(sset, cap)
    cands = []
    for k1_tags in tags:
        c1 = TriangularCert(sset, k1_tags)
        for k2_tags in tags:
            c2 = TriangularCert(sset, k2_tags)
            T1, Z = c1.assembled.shape
            Zp, T2 = c2.assembled.shape
            if Z + Zp + T1 + T2 > cap:
                continue
            cands.append(((Z, Zp, T1, T2, k1_tags, k2_tags), c1, c2))
    cands.sort(key=lambda c: (sum(c[0][:4]), c[0]))
    return cands


def search_equal(t1: LocTriple, t2: LocTriple, cap: int = 4, radius: int = 1,
                 max_candidates: int | None = None) -> FactorizationWitness | NotFoundWithinCap:
    """Look for a factorization witness with ``Z + Z' + T1 + T2 <= cap``.

    The certificates of ``k1`` and ``k2`` are direct sums of tags; ``g`` and
    ``alpha2`` run through entries in ``[-radius, radius]``.  The remaining
    unknowns ``p``, ``alpha1_0``, ``alpha1_1`` enter linearly and are solved
    for.  Candidates are tried in order of total rank, then shape.
    """
    _same_ends(t1, t2)
    R = t1.ring
    if not R.supports_linear_solving or not R.is_commutative:
        raise Unsupported(f"witness search needs linear solving, not available over {R}")
    if t1 == t2:
        return tautological_witness(t1)
    hw = homotopy_witness(t1, t2)
    if hw is not None:
        return hw
    sset = t1.sset
    a, a2 = t1.source, t1.target
    left = a + t1.mid + t2.mid
    right = t1.s.nrows + t2.s.nrows
    xp, r = x_prime(t1, t2), r_matrix(t1, t2)
    tried = 0
    for (Z, Zp, T1, T2, _, _), c1, c2 in _candidate_shapes(sset, cap):
        k1, k2 = c1.assembled, c2.assembled
        for gv in _box(R, Zp * T1, radius):
            g = Matrix(R, Zp, T1, [list(gv[i * T1:(i + 1) * T1]) for i in range(Zp)])
            for av in _box(R, a2 * (T1 + T2), radius):
                tried += 1
                if max_candidates is not None and tried > max_candidates:
                    return NotFoundWithinCap(cap, tried - 1)
                alpha2 = Matrix(R, a2, T1 + T2, [list(av[i * (T1 + T2):(i + 1) * (T1 + T2)]) for i in range(a2)])
                if alpha2.is_zero() and not xp.is_zero():
                    continue
                cc1, cc2 = alpha2.sub(0, a2, 0, T1), alpha2.sub(0, a2, T1, T1 + T2)
                sys = _System(R)
                sys.unknown("p", T2, Z)
                sys.unknown("top", T1, left)
                sys.unknown("bot", T2, left)
                sys.unknown("alpha1_1", Zp, right)
                sys.equation([(cc1, "top", None), (cc2, "bot", None)], xp)
                sys.equation([(cc2, "p", None)], -(cc1 @ k1))
                sys.equation([(g, "top", None), (k2, "bot", None), (-Matrix.identity(R, Zp), "alpha1_1", r)],
                             Matrix.zero(R, Zp, left))
                sys.equation([(k2, "p", None)], -(g @ k1))
                sol = sys.solve()
                if sol is None:
                    continue
                w = FactorizationWitness(
                    Z=Z, Zp=Zp, T1=T1, T2=T2, k1=k1, k1_cert=c1, k2=k2, k2_cert=c2,
                    p=sol["p"], g=g, alpha1_0=sol["top"].vstack(sol["bot"]),
                    alpha1_1=sol["alpha1_1"], alpha2=alpha2,
                )
                if check_factorization(t1, t2, w):
                    return w
    return NotFoundWithinCap(cap, tried)
