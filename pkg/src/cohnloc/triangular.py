"""Triangular certificates for the class generated by cones of ``S``.

A certificate records a block lower triangular matrix whose diagonal blocks
are elements of ``S`` or identities.  Blocks below the diagonal are free.
When only ``S`` tags occur the cone of the assembled matrix lies in the
extension closure of the cones of ``S``; identity tags give the enlarged
class used for denominators of triples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .addcat import Matrix, invert_matrix
from .coeff import DomainError, PreconditionError, Ring
from .complexes import BoundedComplex


@dataclass(frozen=True)
class SSet:
    ring: Ring
    elements: tuple[Matrix, ...]
    contains_identities: bool = True
    closed_under_direct_sums: bool = True
    names: tuple[str, ...] = ()

    def __post_init__(self):
        for k, s in enumerate(self.elements):
            if s.ring != self.ring:
                raise DomainError(f"S element {k} has entries in {s.ring}, expected {self.ring}")
        if self.names and len(self.names) != len(self.elements):
            raise DomainError("one name per S element")

    def __getitem__(self, k: int) -> Matrix:
        if not 0 <= k < len(self.elements):
            raise DomainError(f"S has no element {k}")
        return self.elements[k]

    def __len__(self) -> int:
        return len(self.elements)

    def name(self, k: int) -> str:
        return self.names[k] if self.names else f"s{k}"


# A diagonal tag is ("S", index) or ("id", rank).
Tag = tuple[str, int]


def tag_matrix(sset: SSet, tag: Tag) -> Matrix:
    kind, val = tag
    if kind == "S":
        return sset[val]
    if kind == "id":
        return Matrix.identity(sset.ring, val)
    raise DomainError(f"unknown diagonal tag {tag!r}")


def _tags_sum_shape(sset: SSet, tags: Sequence[Tag]) -> tuple[int, int]:
    ms = [tag_matrix(sset, t) for t in tags]
    return sum(m.nrows for m in ms), sum(m.ncols for m in ms)


class TriangularCert:
    """``below[(k, l)]`` with ``k < l`` is the block in block-row ``l``,
    block-column ``k``; it maps the domain of tag ``k`` to the codomain of tag ``l``."""

    def __init__(self, sset: SSet, diagonal: Sequence[Tag], below: dict | None = None):
        self.sset = sset
        self.diagonal = tuple(diagonal)
        self.blocks = [tag_matrix(sset, t) for t in self.diagonal]
        self.below: dict[tuple[int, int], Matrix] = {}
        for (k, l), m in (below or {}).items():
            if not 0 <= k < l < len(self.diagonal):
                raise DomainError(f"block ({k},{l}) is not strictly below the diagonal")
            want = (self.blocks[l].nrows, self.blocks[k].ncols)
            if m.shape != want:
                raise DomainError(f"block ({k},{l}) has shape {m.shape}, expected {want}")
            if not m.is_zero():
                self.below[(k, l)] = m
        self.assembled = self._assemble_matrix()

    @property
    def n(self) -> int:
        return len(self.diagonal)

    @property
    def ring(self) -> Ring:
        return self.sset.ring

    @property
    def row_sizes(self) -> list[int]:
        return [b.nrows for b in self.blocks]

    @property
    def col_sizes(self) -> list[int]:
        return [b.ncols for b in self.blocks]

    def _assemble_matrix(self) -> Matrix:
        n = self.n
        grid = [[None] * n for _ in range(n)]
        for j, b in enumerate(self.blocks):
            grid[j][j] = b
        for (k, l), m in self.below.items():
            grid[l][k] = m
        return Matrix.block(self.ring, grid, self.row_sizes, self.col_sizes)

    def only_s_tags(self) -> bool:
        return all(kind == "S" for kind, _ in self.diagonal)

    def verify(self) -> bool:
        """Re-check that ``assembled`` is block lower triangular with the tagged diagonal."""
        return self.assembled == self._assemble_matrix()

    def certifies(self, m: Matrix) -> bool:
        return self.assembled == m

    def __repr__(self) -> str:
        tags = ", ".join(self.sset.name(v) if k == "S" else f"id{v}" for k, v in self.diagonal)
        return f"TriangularCert([{tags}], below={sorted(self.below)})"

    @classmethod
    def empty(cls, sset: SSet) -> "TriangularCert":
        return cls(sset, [])

    @classmethod
    def singleton(cls, sset: SSet, k: int) -> "TriangularCert":
        return cls(sset, [("S", k)])

    @classmethod
    def identity(cls, sset: SSet, rank: int) -> "TriangularCert":
        return cls(sset, [("id", rank)] if rank else [])


def assemble(cert: TriangularCert) -> BoundedComplex:
    """The two-term complex of the assembled matrix in degrees -1, 0."""
    return BoundedComplex.two_term(cert.assembled, lo=-1)


def _split(m: Matrix, row_sizes: Sequence[int], col_sizes: Sequence[int]):
    out = {}
    r0 = 0
    for i, rs in enumerate(row_sizes):
        c0 = 0
        for j, cs in enumerate(col_sizes):
            out[(i, j)] = m.sub(r0, r0 + rs, c0, c0 + cs)
            c0 += cs
        r0 += rs
    return out


def extend(cert_a: TriangularCert, cert_b: TriangularCert, glue: Matrix | None = None) -> TriangularCert:
    """Certificate of ``[[a, 0], [glue, b]]``; ``glue`` maps dom(a) to cod(b)."""
    if cert_a.sset is not cert_b.sset and cert_a.sset != cert_b.sset:
        raise DomainError("certificates over different S")
    R = cert_a.ring
    if glue is None:
        glue = Matrix.zero(R, cert_b.assembled.nrows, cert_a.assembled.ncols)
    want = (cert_b.assembled.nrows, cert_a.assembled.ncols)
    if glue.shape != want:
        raise DomainError(f"glue has shape {glue.shape}, expected {want}")
    na = cert_a.n
    below = dict(cert_a.below)
    for (k, l), m in cert_b.below.items():
        below[(k + na, l + na)] = m
    for (l, k), m in _split(glue, cert_b.row_sizes, cert_a.col_sizes).items():
        below[(k, l + na)] = m
    return TriangularCert(cert_a.sset, cert_a.diagonal + cert_b.diagonal, below)


def dsum_certs(*certs: TriangularCert) -> TriangularCert:
    out = certs[0]
    for c in certs[1:]:
        out = extend(out, c)
    return out


@dataclass(frozen=True)
class Factor:
    kind: str  # "InS" or "Invertible"
    matrix: Matrix
    inverse: Matrix | None = None
    tags: tuple[Tag, ...] = field(default=())


def factor_elementary(cert: TriangularCert) -> list[Factor]:
    """Factors whose ordered product (first factor leftmost) is ``cert.assembled``.

    ``[[t, 0], [g, s_n]] = (t (+) id) (unipotent [[id, 0], [g, id]]) (id (+) s_n)``,
    recursing on ``t``.
    """
    sset = cert.sset
    if not (sset.contains_identities and sset.closed_under_direct_sums):
        raise PreconditionError("S must contain identities and be closed under direct sums")
    R = cert.ring
    if cert.n == 0:
        return []
    if cert.n == 1:
        return [Factor("InS", cert.assembled, None, cert.diagonal)]
    head = TriangularCert(sset, cert.diagonal[:-1],
                          {kl: m for kl, m in cert.below.items() if kl[1] < cert.n - 1})
    last = cert.blocks[-1]
    a = cert.assembled
    p_head, q_head = head.assembled.ncols, head.assembled.nrows
    q_last, p_last = last.shape
    g = a.sub(q_head, a.nrows, 0, p_head)  # cod(last) x dom(head)
    id_q = Matrix.identity(R, q_last)
    id_p = Matrix.identity(R, p_head)

    out = []
    for f in factor_elementary(head):
        inv = None if f.inverse is None else f.inverse.dsum(id_q)
        out.append(Factor(f.kind, f.matrix.dsum(id_q), inv,
                          f.tags + ((("id", q_last),) if f.kind == "InS" and q_last else ())))
    uni = Matrix.block(R, [[id_p, None], [g, id_q]], [p_head, q_last], [p_head, q_last])
    uni_inv = Matrix.block(R, [[id_p, None], [-g, id_q]], [p_head, q_last], [p_head, q_last])
    out.append(Factor("Invertible", uni, uni_inv))
    tail_tags = ((("id", p_head),) if p_head else ()) + (cert.diagonal[-1],)
    out.append(Factor("InS", id_p.dsum(last), None, tail_tags))
    return out


def factor_product(factors: Sequence[Factor], ring: Ring, n: int | None = None) -> Matrix:
    if not factors:
        return Matrix.identity(ring, n or 0)
    out = factors[0].matrix
    for f in factors[1:]:
        out = out @ f.matrix
    return out


def check_factor(f: Factor, sset: SSet) -> bool:
    if f.kind == "Invertible":
        inv = invert_matrix(f.matrix)
        return inv is not None and f.inverse is not None and f.matrix @ f.inverse == Matrix.identity(
            sset.ring, f.matrix.nrows)
    if f.kind == "InS":
        return TriangularCert(sset, f.tags).assembled == f.matrix
    return False


@dataclass(frozen=True)
class PermutedCert:
    """``matrix.permute(row_perm, col_perm) == cert.assembled``.

    Reordering summands is an isomorphism, so the certificate transfers.
    """

    cert: TriangularCert
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]

    def certifies(self, m: Matrix) -> bool:
        try:
            return m.permute(self.row_perm, self.col_perm) == self.cert.assembled
        except DomainError:
            return False

    @classmethod
    def plain(cls, cert: TriangularCert) -> "PermutedCert":
        return cls(cert, tuple(range(cert.assembled.nrows)), tuple(range(cert.assembled.ncols)))
