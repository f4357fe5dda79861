"""Morphisms of the localized category as triples ``g s^-1 i``.

A triple ``(g, s, i)`` from ``A`` to ``A'`` has ``i : A -> E``, ``s : M -> E``
and ``g : M -> A'``, and ``s`` carries a triangular certificate.  Roofs over
two-term apexes are folded into triples; zig-zags fold through roofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .addcat import Matrix, invert_matrix
from .coeff import DomainError, PreconditionError, Ring
from .complexes import BoundedComplex
from .triangular import SSet, TriangularCert, extend, factor_elementary


@dataclass(frozen=True)
class LocTriple:
    sset: SSet
    g: Matrix
    s: Matrix
    i: Matrix
    cert: TriangularCert

    def __post_init__(self):
        if self.s.nrows != self.i.nrows:
            raise DomainError(f"s lands in rank {self.s.nrows} but i lands in rank {self.i.nrows}")
        if self.g.ncols != self.s.ncols:
            raise DomainError(f"g starts at rank {self.g.ncols} but s starts at rank {self.s.ncols}")
        if not self.cert.certifies(self.s):
            raise DomainError("certificate does not assemble to s")

    @property
    def ring(self) -> Ring:
        return self.sset.ring

    @property
    def source(self) -> int:
        return self.i.ncols

    @property
    def target(self) -> int:
        return self.g.nrows

    @property
    def mid(self) -> int:
        return self.s.ncols

    @property
    def summand(self) -> int:
        return self.s.nrows - self.source

    @property
    def canonical_i(self) -> bool:
        """Whether ``i`` is the inclusion of the first summand."""
        R, a = self.ring, self.source
        return self.i == Matrix.block(R, [[Matrix.identity(R, a)], [None]], [a, self.summand], [a])

    def cone(self) -> BoundedComplex:
        return BoundedComplex.two_term(self.s, lo=-1)


def from_plain(sset: SSet, f: Matrix) -> LocTriple:
    a = f.ncols
    I = Matrix.identity(sset.ring, a)
    return LocTriple(sset, f, I, I, TriangularCert.identity(sset, a))


def invert_s(sset: SSet, k: int) -> LocTriple:
    s = sset[k]
    return LocTriple(sset, Matrix.identity(sset.ring, s.ncols), s,
                     Matrix.identity(sset.ring, s.nrows), TriangularCert.singleton(sset, k))


def zero_triple(sset: SSet, source: int, target: int) -> LocTriple:
    return from_plain(sset, Matrix.zero(sset.ring, target, source))


def triple_dsum(t1: LocTriple, t2: LocTriple) -> LocTriple:
    return LocTriple(t1.sset, t1.g.dsum(t2.g), t1.s.dsum(t2.s), t1.i.dsum(t2.i),
                     extend(t1.cert, t2.cert))


def triple_compose(t1: LocTriple, t2: LocTriple) -> LocTriple:
    """``t1 after t2``."""
    if t2.target != t1.source:
        raise DomainError(f"cannot compose: target rank {t2.target} vs source rank {t1.source}")
    R = t1.ring
    glue = -(t1.i @ t2.g)
    m1, m2 = t1.mid, t2.mid
    e1, e2 = t1.s.nrows, t2.s.nrows
    g = Matrix.block(R, [[None, t1.g]], [t1.target], [m2, m1])
    s = Matrix.block(R, [[t2.s, None], [glue, t1.s]], [e2, e1], [m2, m1])
    i = Matrix.block(R, [[t2.i], [None]], [e2, e1], [t2.source])
    return LocTriple(t1.sset, g, s, i, extend(t2.cert, t1.cert, glue))


def triple_add(t1: LocTriple, t2: LocTriple) -> LocTriple:
    if (t1.source, t1.target) != (t2.source, t2.target):
        raise DomainError("cannot add triples with different source or target")
    return LocTriple(t1.sset, t1.g.hstack(t2.g), t1.s.dsum(t2.s), t1.i.vstack(t2.i),
                     extend(t1.cert, t2.cert))


def triple_neg(t: LocTriple) -> LocTriple:
    return LocTriple(t.sset, -t.g, t.s, t.i, t.cert)


# --------------------------------------------------------------------------
# roofs


@dataclass(frozen=True)
class Roof:
    """``forward after backward^-1`` with apex concentrated in degrees 0 and 1.

    The certificate is for ``sigma = (backward ; d)`` from apex degree 0 to
    ``source (+) apex^1``, the source summand first.
    """

    sset: SSet
    apex: BoundedComplex
    backward: Matrix
    forward: Matrix
    cert: TriangularCert

    def __post_init__(self):
        sup = self.apex.support
        if sup is not None and (sup[0] < 0 or sup[1] > 1):
            raise DomainError(f"roof apex must live in degrees 0 and 1, got {sup}")
        c0 = self.apex.rank(0)
        if self.backward.ncols != c0 or self.forward.ncols != c0:
            raise DomainError("roof legs must start at apex degree 0")
        if not self.cert.certifies(self.sigma):
            raise DomainError("roof certificate does not assemble to (backward ; d)")

    @property
    def source(self) -> int:
        return self.backward.nrows

    @property
    def target(self) -> int:
        return self.forward.nrows

    @property
    def sigma(self) -> Matrix:
        return self.backward.vstack(self.apex.d(0))


def forward_roof(sset: SSet, f: Matrix) -> Roof:
    a = f.ncols
    R = sset.ring
    return Roof(sset, BoundedComplex.single(R, a, 0), Matrix.identity(R, a), f,
                TriangularCert.identity(sset, a))


def inverse_roof(sset: SSet, k: int) -> Roof:
    s = sset[k]
    R = sset.ring
    return Roof(sset, BoundedComplex.single(R, s.ncols, 0), s, Matrix.identity(R, s.ncols),
                TriangularCert.singleton(sset, k))


def compose_roofs(phi: Roof, psi: Roof) -> Roof:
    """``psi after phi`` with apex ``L^0 (+) T^0 -> L^1 (+) B (+) T^1``.

    The ``B`` row of the differential is ``(-f, t)``; with that sign the new
    sigma is block lower triangular over the two input sigmas.
    """
    if phi.target != psi.source:
        raise DomainError(f"cannot compose roofs: rank {phi.target} vs {psi.source}")
    R = phi.sset.ring
    L, T = phi.apex, psi.apex
    l0, l1, t0, t1, b = L.rank(0), L.rank(1), T.rank(0), T.rank(1), phi.target
    d = Matrix.block(R, [[L.d(0), None], [-phi.forward, psi.backward], [None, T.d(0)]],
                     [l1, b, t1], [l0, t0])
    apex = BoundedComplex(R, {0: l0 + t0, 1: l1 + b + t1}, {0: d})
    backward = Matrix.block(R, [[phi.backward, None]], [phi.source], [l0, t0])
    forward = Matrix.block(R, [[None, psi.forward]], [psi.target], [l0, t0])
    glue = Matrix.block(R, [[-phi.forward], [None]], [b, t1], [l0])
    return Roof(phi.sset, apex, backward, forward, extend(phi.cert, psi.cert, glue))


def roof_to_triple(r: Roof) -> LocTriple:
    if r.cert is None:
        raise PreconditionError("roof carries no certificate")
    R = r.sset.ring
    a, c1 = r.source, r.apex.rank(1)
    i = Matrix.block(R, [[Matrix.identity(R, a)], [None]], [a, c1], [a])
    return LocTriple(r.sset, r.forward, r.sigma, i, r.cert)


# --------------------------------------------------------------------------
# zig-zags


@dataclass(frozen=True)
class Forward:
    f: Matrix


@dataclass(frozen=True)
class InverseOfS:
    k: int


@dataclass(frozen=True)
class ZigZag:
    """Tokens in composition order: the rightmost token is applied first."""

    sset: SSet
    tokens: tuple

    def __post_init__(self):
        spans = [_token_span(self.sset, t) for t in self.tokens]
        for (src, _), (_, tgt) in zip(spans, spans[1:]):
            if src != tgt:
                raise DomainError(f"zig-zag does not chain: rank {tgt} feeds rank {src}")


def _token_span(sset: SSet, tok) -> tuple[int, int]:
    """(source rank, target rank) of a token."""
    if isinstance(tok, Forward):
        return tok.f.ncols, tok.f.nrows
    if isinstance(tok, InverseOfS):
        s = sset[tok.k]
        return s.nrows, s.ncols
    raise DomainError(f"unknown zig-zag token {tok!r}")


def _token_roof(sset: SSet, tok) -> Roof:
    if isinstance(tok, Forward):
        return forward_roof(sset, tok.f)
    return inverse_roof(sset, tok.k)


def zigzag_normalize(z: ZigZag) -> LocTriple:
    if not z.tokens:
        raise DomainError("empty zig-zag")
    acc = _token_roof(z.sset, z.tokens[-1])
    for tok in reversed(z.tokens[:-1]):
        acc = compose_roofs(acc, _token_roof(z.sset, tok))
    return roof_to_triple(acc)


# --------------------------------------------------------------------------
# functors


@dataclass(frozen=True)
class RingMap:
    source: Ring
    target: Ring
    fn: Callable

    def apply(self, m: Matrix) -> Matrix:
        return m.map(self.fn, self.target)


def _invert_or_fail(m: Matrix, what: str) -> Matrix:
    if m.nrows != m.ncols:
        raise PreconditionError(f"{what} is not square ({m.nrows}x{m.ncols})")
    inv = invert_matrix(m)
    if inv is None:
        raise PreconditionError(f"{what} is not invertible after the ring map")
    return inv


def _inverse_via_factors(t: LocTriple, F: RingMap, s_inverses: Mapping[int, Matrix] | None) -> Matrix:
    if t.s.nrows != t.s.ncols:
        raise PreconditionError(f"F(s) is not square ({t.s.nrows}x{t.s.ncols})")
    inv_s = {}
    for kind, v in t.cert.diagonal:
        if kind == "S" and v not in inv_s:
            given = (s_inverses or {}).get(v)
            inv_s[v] = given if given is not None else _invert_or_fail(F.apply(t.sset[v]), f"F({t.sset.name(v)})")
    out = Matrix.identity(F.target, t.s.ncols)
    for fac in factor_elementary(t.cert):
        if fac.kind == "Invertible":
            piece = F.apply(fac.inverse)
        else:
            piece = None
            for kind, v in fac.tags:
                blk = inv_s[v] if kind == "S" else Matrix.identity(F.target, v)
                piece = blk if piece is None else piece.dsum(blk)
            if piece is None:
                piece = Matrix.identity(F.target, 0)
        # (f1 f2 ... fn)^-1 = fn^-1 ... f1^-1
        out = piece @ out
    return out


def evaluate_functor(t: LocTriple, F: RingMap, s_inverses: Mapping[int, Matrix] | None = None,
                     method: str = "direct") -> Matrix:
    """``F(g) F(s)^-1 F(i)``; ``method='factor'`` inverts through the elementary factors."""
    if method == "direct":
        s_inv = _invert_or_fail(F.apply(t.s), "F(s)")
    elif method == "factor":
        s_inv = _inverse_via_factors(t, F, s_inverses)
    else:
        raise DomainError(f"unknown evaluation method {method!r}")
    return F.apply(t.g) @ s_inv @ F.apply(t.i)


def evaluate_roof(r: Roof, F: RingMap) -> Matrix:
    """``F(forward) F(backward)^-1`` for roofs whose apex is a single object."""
    if r.apex.rank(1):
        raise PreconditionError("roof apex has a degree-1 term")
    return F.apply(r.forward) @ _invert_or_fail(F.apply(r.backward), "F(backward)")


def product_of(mats: Sequence[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out
