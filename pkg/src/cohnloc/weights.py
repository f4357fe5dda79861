"""The stupid weight structure on bounded complexes and its localized heart.

Weights use the homological convention: a complex concentrated in degree
``-k`` has weight ``k``.  ``WEIGHT_SIGN`` is the only place that sign lives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .addcat import Matrix
from .coeff import DomainError, Unsupported
from .complexes import (BoundedComplex, ChainMap, Homotopy, Truncation, chain_map_space,
                        is_null_homotopic, minimize, shift, stupid_truncate)
from .equality import Inapplicable, decide_equal_oracle
from .localization import LocTriple, ZigZag, zigzag_normalize
from .triangular import SSet, TriangularCert, assemble

WEIGHT_SIGN = -1


def weight_of_degree(n: int) -> int:
    return WEIGHT_SIGN * n


def degree_of_weight(w: int) -> int:
    return WEIGHT_SIGN * w


@dataclass(frozen=True)
class WeightRange:
    """Closed interval of weights; ``lo > hi`` encodes the empty interval."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def as_json(self):
        if self.empty:
            return {"empty": True, "lo": "+inf", "hi": "-inf"}
        return {"empty": False, "lo": self.lo, "hi": self.hi}


EMPTY_RANGE = WeightRange(float("inf"), float("-inf"))


# --------------------------------------------------------------------------
# weight decompositions


@dataclass
class WeightDecomposition:
    """``X -> M -> Y -> X[1]`` with ``X`` of weights ``<= n`` and ``Y`` of weights ``>= n + 1``."""

    n: int
    M: BoundedComplex
    truncation: Truncation
    composite_homotopy: Homotopy

    @property
    def X(self) -> BoundedComplex:
        return self.truncation.X

    @property
    def Y(self) -> BoundedComplex:
        return self.truncation.Y

    def verify(self) -> bool:
        t = self.truncation
        if not t.verify() or not self.composite_homotopy.verify():
            return False
        ok_x = all(weight_of_degree(k) <= self.n for k in t.X.ranks)
        ok_y = all(weight_of_degree(k) >= self.n + 1 for k in t.Y.ranks)
        return ok_x and ok_y


def weight_decompose(M: BoundedComplex, n: int) -> WeightDecomposition:
    t = stupid_truncate(M, degree_of_weight(n))
    composite = t.proj @ t.incl
    zero = ChainMap.zero(t.X, t.Y)
    return WeightDecomposition(n, M, t, Homotopy(composite, zero, {}))


def weight_range(M: BoundedComplex) -> WeightRange:
    """Weights spanned by the minimal model (field coefficients only)."""
    if not M.ring.is_field:
        raise Unsupported(f"weight_range needs field coefficients, got {M.ring}")
    sup = minimize(M).model.support
    if sup is None:
        return EMPTY_RANGE
    ws = sorted((weight_of_degree(sup[0]), weight_of_degree(sup[1])))
    return WeightRange(ws[0], ws[1])


@dataclass(frozen=True)
class WeightClassQuery:
    complex: BoundedComplex
    claim: str  # "le", "ge" or "between"
    a: int
    b: int | None = None


def check_weight_claim(q: WeightClassQuery) -> bool:
    """Membership up to homotopy, decided on the minimal model."""
    r = weight_range(q.complex)
    if r.empty:
        return True
    if q.claim == "le":
        return r.hi <= q.a
    if q.claim == "ge":
        return r.lo >= q.a
    if q.claim == "between":
        return q.a <= r.lo and r.hi <= q.b
    raise DomainError(f"unknown weight claim {q.claim!r}")


# --------------------------------------------------------------------------
# towers of shifted cones and weak weight decompositions


@dataclass(frozen=True)
class Layer:
    cert: TriangularCert
    shift: int

    def complex(self) -> BoundedComplex:
        return shift(assemble(self.cert), self.shift)


def _offsets(layers: Sequence[Layer], degree: int) -> list[int]:
    out, acc = [], 0
    for layer in layers:
        out.append(acc)
        acc += layer.complex().rank(degree)
    out.append(acc)
    return out


class Tower:
    """Total complex of shifted cones of certificates glued along a lower triangle.

    In every degree the term is the direct sum of the layers' terms in layer
    order.  The differential restricted to layer ``j`` is that layer's own
    differential and components run only from earlier to later layers.
    """

    def __init__(self, sset: SSet, layers: Sequence[Layer], total: BoundedComplex):
        self.sset = sset
        self.layers = tuple(layers)
        self.total = total
        R = sset.ring
        if total.ring != R:
            raise DomainError("tower complex is over a different ring")
        parts = [l.complex() for l in self.layers]
        degs = set(total.ranks)
        for p in parts:
            degs |= set(p.ranks)
        for n in degs:
            if total.rank(n) != sum(p.rank(n) for p in parts):
                raise DomainError(f"tower rank mismatch in degree {n}")
        for n in degs:
            src, dst = _offsets(self.layers, n), _offsets(self.layers, n + 1)
            d = total.d(n)
            for j, pj in enumerate(parts):
                for k in range(len(parts)):
                    blk = d.sub(dst[k], dst[k + 1], src[j], src[j + 1])
                    if k == j and blk != pj.d(n):
                        raise DomainError(f"layer {j} differential altered in degree {n}")
                    if k < j and not blk.is_zero():
                        raise DomainError(f"tower glue from layer {j} back to layer {k} in degree {n}")

    @property
    def shifts(self) -> list[int]:
        return [l.shift for l in self.layers]


def build_tower(sset: SSet, layers: Sequence[Layer], glue: dict | None = None) -> Tower:
    """``glue[(j, k)][n]`` is the degree-``n`` component from layer ``j`` to layer ``k > j``."""
    R = sset.ring
    parts = [l.complex() for l in layers]
    degs = set()
    for p in parts:
        degs |= set(p.ranks)
    ranks = {n: sum(p.rank(n) for p in parts) for n in degs}
    diffs = {}
    for n in degs:
        grid = [[None] * len(parts) for _ in parts]
        for j, p in enumerate(parts):
            grid[j][j] = p.d(n)
        for (j, k), comps in (glue or {}).items():
            if not j < k:
                raise DomainError("tower glue must run from an earlier to a later layer")
            if n in comps:
                grid[k][j] = comps[n]
        diffs[n] = Matrix.block(R, grid, [p.rank(n + 1) for p in parts], [p.rank(n) for p in parts])
    return Tower(sset, layers, BoundedComplex(R, ranks, diffs))


@dataclass
class WeakWeightDecomposition:
    M: Tower
    X: Tower
    Y: Tower
    incl: ChainMap
    proj: ChainMap
    connecting: ChainMap  # Y -> X[1]
    x_layers: list[int]
    y_layers: list[int]

    def verify(self) -> bool:
        if not all(s <= 0 for s in self.X.shifts) or not all(s >= 1 for s in self.Y.shifts):
            return False
        if not (self.proj @ self.incl).is_zero():
            return False
        return reassemble(self) == _permuted_total(self.M, self.x_layers + self.y_layers)


def _restrict(tower: Tower, keep: list[int]) -> tuple[Tower, dict, dict]:
    """Sub-tower on the listed layers plus the index maps used for each degree."""
    R = tower.sset.ring
    M = tower.total
    layers = [tower.layers[j] for j in keep]
    degs = sorted(set(M.ranks) | {n - 1 for n in M.ranks} | {n + 1 for n in M.ranks})
    pick = {}
    for n in degs:
        offs = _offsets(tower.layers, n)
        pick[n] = [i for j in keep for i in range(offs[j], offs[j + 1])]
    ranks = {n: len(pick[n]) for n in M.ranks}
    diffs = {}
    for n in M.ranks:
        d = M.d(n)
        rows = pick.get(n + 1, [])
        diffs[n] = Matrix(R, len(rows), len(pick[n]), [[d.rows[r][c] for c in pick[n]] for r in rows])
    return Tower(tower.sset, layers, BoundedComplex(R, ranks, diffs)), pick, degs


def _selector(R, idx: list[int], size: int, transpose: bool = False) -> Matrix:
    m = Matrix(R, len(idx), size, [[R.one if c == i else R.zero for c in range(size)] for i in idx])
    return m.transpose() if transpose else m


def weak_weight_decompose(tower: Tower) -> WeakWeightDecomposition:
    """Split layers with shift ``<= 0`` (a subcomplex) from those with shift ``>= 1``."""
    R = tower.sset.ring
    xs = [j for j, l in enumerate(tower.layers) if l.shift <= 0]
    ys = [j for j, l in enumerate(tower.layers) if l.shift >= 1]
    X, xpick, _ = _restrict(tower, xs)
    Y, ypick, _ = _restrict(tower, ys)
    M = tower.total
    incl = ChainMap(X.total, M, {n: _selector(R, xpick[n], M.rank(n), transpose=True) for n in X.total.ranks})
    proj = ChainMap(M, Y.total, {n: _selector(R, ypick[n], M.rank(n)) for n in Y.total.ranks})
    X1 = shift(X.total, 1)
    conn = {}
    for n in Y.total.ranks:
        d = M.d(n)
        rows = xpick.get(n + 1, [])
        conn[n] = Matrix(R, len(rows), len(ypick[n]), [[d.rows[r][c] for c in ypick[n]] for r in rows])
    connecting = ChainMap(Y.total, X1, conn)
    return WeakWeightDecomposition(tower, X, Y, incl, proj, connecting, xs, ys)


def reassemble(w: WeakWeightDecomposition) -> BoundedComplex:
    """Glue ``Y`` back onto ``X`` along the connecting map, ``X`` terms first."""
    R = w.M.sset.ring
    X, Y = w.X.total, w.Y.total
    degs = set(X.ranks) | set(Y.ranks)
    ranks = {n: X.rank(n) + Y.rank(n) for n in degs}
    diffs = {}
    for n in degs:
        diffs[n] = Matrix.block(R, [[X.d(n), w.connecting[n]], [None, Y.d(n)]],
                                [X.rank(n + 1), Y.rank(n + 1)], [X.rank(n), Y.rank(n)])
    return BoundedComplex(R, ranks, diffs)


def _permuted_total(tower: Tower, order: list[int]) -> BoundedComplex:
    M = tower.total
    R = tower.sset.ring
    perm = {}
    for n in set(M.ranks) | {k + 1 for k in M.ranks}:
        offs = _offsets(tower.layers, n)
        perm[n] = [i for j in order for i in range(offs[j], offs[j + 1])]
    diffs = {n: M.d(n).permute(perm[n + 1], perm[n]) for n in M.ranks}
    return BoundedComplex(R, dict(M.ranks), diffs)


# --------------------------------------------------------------------------
# heart hom-sets and negativity


@dataclass
class HeartReport:
    source: int
    target: int
    triples: list[LocTriple]
    classes: list[list[int]]
    mode: str  # "oracle" or "structural"
    inapplicable_reason: str | None = None

    @property
    def representatives(self) -> list[LocTriple]:
        return [self.triples[c[0]] for c in self.classes]


def heart_hom(sset: SSet, source: int, target: int, probes: Sequence[ZigZag]) -> HeartReport:
    triples = []
    for z in probes:
        t = zigzag_normalize(z)
        if (t.source, t.target) != (source, target):
            raise DomainError(f"probe maps rank {t.source} to {t.target}, expected {source} to {target}")
        triples.append(t)
    mode, reason = "oracle", None
    if triples:
        probe = decide_equal_oracle(triples[0], triples[0])
        if isinstance(probe, Inapplicable):
            mode, reason = "structural", probe.reason
    classes: list[list[int]] = []
    for j, t in enumerate(triples):
        for c in classes:
            rep = triples[c[0]]
            same = decide_equal_oracle(rep, t) if mode == "oracle" else rep == t
            if same:
                c.append(j)
                break
        else:
            classes.append([j])
    return HeartReport(source, target, triples, classes, mode, reason)


@dataclass
class NegativityViolation:
    source: int
    target: int
    shift: int
    chain_map: ChainMap


@dataclass
class NegativityReport:
    pairs_checked: int
    violations: list[NegativityViolation] = field(default_factory=list)

    @property
    def negative(self) -> bool:
        return not self.violations


def negativity_check(objects: Sequence[BoundedComplex], shifts: Sequence[int]) -> NegativityReport:
    """Whether every chain map ``P -> Q[i]`` is null-homotopic for ``i`` in ``shifts``."""
    report = NegativityReport(0)
    for i in shifts:
        if i <= 0:
            raise DomainError("negativity shifts must be positive")
    for a, P in enumerate(objects):
        for b, Q in enumerate(objects):
            for i in shifts:
                report.pairs_checked += 1
                Qi = shift(Q, i)
                for f in chain_map_space(P, Qi):
                    if is_null_homotopic(f) is None:
                        report.violations.append(NegativityViolation(a, b, i, f))
                        break
    return report
