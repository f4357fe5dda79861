"""Random generators and independent reference solvers for the test suite.

The reference solvers deliberately avoid the engine's linear algebra: the
rational one is its own Gaussian elimination on Fractions, the integer one is a
bounded box search.
"""

from __future__ import annotations

import itertools
import random
import shlex
from fractions import Fraction
from pathlib import Path

from cohnloc.addcat import Matrix
from cohnloc.cli import dump_report, run
from cohnloc.coeff import kernel_basis
from cohnloc.complexes import BoundedComplex, ChainMap
from cohnloc.equality import (FactorizationWitness, fraction_oracle_map, homotopy_witness, r_matrix,
                              tautological_witness)
from cohnloc.localization import (evaluate_functor, from_plain, invert_s, triple_add, triple_compose,
                                  triple_dsum)
from cohnloc.triangular import SSet, TriangularCert


def rand_matrix(rng: random.Random, R, nrows: int, ncols: int, height: int = 3) -> Matrix:
    return Matrix(R, nrows, ncols, [[R.random_element(rng, height) for _ in range(ncols)] for _ in range(nrows)])


def rand_triple(rng, sset: SSet, src: int, tgt: int, depth: int = 2, height: int = 9):
    """Random triple built from plain maps, inverses of square elements of S and the three operations."""
    R = sset.ring
    invertible = [k for k in range(len(sset)) if sset[k].shape == (src, tgt) and src == tgt]
    choices = ["plain"]
    if depth > 0:
        choices += ["compose", "add"]
        if src >= 2 and tgt >= 2:
            choices.append("dsum")
        if invertible:
            choices += ["inv", "inv"]
    kind = rng.choice(choices)
    if kind == "plain":
        return from_plain(sset, rand_matrix(rng, R, tgt, src, height))
    if kind == "inv":
        return invert_s(sset, rng.choice(invertible))
    if kind == "compose":
        mid = rng.choice([1, 2])
        return triple_compose(rand_triple(rng, sset, mid, tgt, depth - 1, height),
                              rand_triple(rng, sset, src, mid, depth - 1, height))
    if kind == "add":
        return triple_add(rand_triple(rng, sset, src, tgt, depth - 1, height),
                          rand_triple(rng, sset, src, tgt, depth - 1, height))
    return triple_dsum(rand_triple(rng, sset, 1, 1, depth - 1, height),
                       rand_triple(rng, sset, src - 1, tgt - 1, depth - 1, height))


def rand_cert(rng, sset: SSet, n: int, height: int = 3) -> TriangularCert:
    tags = []
    for _ in range(n):
        if rng.random() < 0.3:
            tags.append(("id", rng.randint(1, 2)))
        else:
            tags.append(("S", rng.randrange(len(sset))))
    probe = TriangularCert(sset, tags)
    below = {}
    for k in range(n):
        for l in range(k + 1, n):
            if rng.random() < 0.7:
                below[(k, l)] = rand_matrix(rng, sset.ring, probe.blocks[l].nrows, probe.blocks[k].ncols, height)
    return TriangularCert(sset, tags, below)


# --------------------------------------------------------------------------
# small complexes


def all_entries(R, nrows, ncols, lo=-2, hi=2):
    for vals in itertools.product(range(lo, hi + 1), repeat=nrows * ncols):
        yield Matrix(R, nrows, ncols, [[R.from_int(vals[i * ncols + j]) for j in range(ncols)] for i in range(nrows)])


def rand_complex(rng, R, ranks: dict[int, int], lo=-2, hi=2) -> BoundedComplex:
    """Random complex with entries in ``[lo, hi]``; later differentials are drawn
    uniformly from all small matrices that square to zero with the previous one."""
    degs = sorted(ranks)
    diffs = {}
    prev = None
    for n in degs:
        if ranks.get(n + 1, 0) == 0 or ranks[n] == 0:
            prev = None
            continue
        nr, nc = ranks[n + 1], ranks[n]
        if prev is None:
            d = Matrix(R, nr, nc, [[R.from_int(rng.randint(lo, hi)) for _ in range(nc)] for _ in range(nr)])
        else:
            ok = [m for m in all_entries(R, nr, nc, lo, hi) if (m @ prev).is_zero()]
            d = rng.choice(ok)
        diffs[n] = d
        prev = d
    return BoundedComplex(R, ranks, diffs)


def rand_homotopic_zero(rng, C: BoundedComplex, D: BoundedComplex, height=2) -> ChainMap:
    """``d h + h d`` for a random ``h``."""
    R = C.ring
    h = {n: rand_matrix(rng, R, D.rank(n - 1), C.rank(n), height) for n in C.ranks}

    def H(n):
        return h.get(n, Matrix.zero(R, D.rank(n - 1), C.rank(n)))

    comps = {n: D.d(n - 1) @ H(n) + H(n + 1) @ C.d(n) for n in C.ranks}
    return ChainMap(C, D, comps)


# --------------------------------------------------------------------------
# reference null-homotopy solvers


def _unknown_layout(C, D):
    layout = []
    for n in sorted(C.ranks):
        if D.rank(n - 1):
            layout.append((n, D.rank(n - 1), C.rank(n)))
    return layout


def reference_null_homotopic_Q(f: ChainMap) -> bool:
    """Rank test on the homotopy equations, with a private Gaussian elimination."""
    C, D = f.source, f.target
    layout = _unknown_layout(C, D)
    index = {}
    for n, r, c in layout:
        for i in range(r):
            for j in range(c):
                index[(n, i, j)] = len(index)
    rows = []
    for n in sorted(set(C.ranks) & set(D.ranks)):
        for i in range(D.rank(n)):
            for j in range(C.rank(n)):
                row = [Fraction(0)] * (len(index) + 1)
                dD = D.d(n - 1)
                for k in range(D.rank(n - 1)):
                    row[index[(n, k, j)]] += Fraction(dD.rows[i][k])
                dC = C.d(n)
                for k in range(C.rank(n + 1)):
                    if (n + 1, i, k) in index:
                        row[index[(n + 1, i, k)]] += Fraction(dC.rows[k][j])
                row[-1] = Fraction(f[n].rows[i][j])
                rows.append(row)
    return _consistent(rows, len(index))


def _consistent(rows, nvars) -> bool:
    rows = [r[:] for r in rows]
    piv_row = 0
    for col in range(nvars):
        p = next((i for i in range(piv_row, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[piv_row], rows[p] = rows[p], rows[piv_row]
        pv = rows[piv_row][col]
        for i in range(len(rows)):
            if i != piv_row and rows[i][col] != 0:
                fct = rows[i][col] / pv
                rows[i] = [a - fct * b for a, b in zip(rows[i], rows[piv_row])]
        piv_row += 1
    return all(any(x != 0 for x in r[:-1]) or r[-1] == 0 for r in rows)


def _vectors(length, radius):
    return list(itertools.product(range(-radius, radius + 1), repeat=length))


def reference_null_homotopic_Z(f: ChainMap, radius: int = 10) -> bool:
    """Box search for an integer homotopy with entries in ``[-radius, radius]``.

    Complexes live in degrees 0..2, so the unknowns are ``h1 : C^1 -> D^0``
    and ``h2 : C^2 -> D^1``.  The equations in degree 0 constrain the rows of
    ``h1`` one at a time, those in degree 2 the columns of ``h2``; the degree-1
    equation is matched by hashing.
    """
    C, D = f.source, f.target
    if not set(C.ranks) | set(D.ranks) <= {0, 1, 2}:
        raise ValueError("reference solver expects degrees 0..2")

    def ints(m: Matrix):
        return [[int(x) for x in r] for r in m.rows]

    c0, c1, c2 = C.rank(0), C.rank(1), C.rank(2)
    d0, d1 = D.rank(0), D.rank(1)
    dC0, dC1 = ints(C.d(0)), ints(C.d(1))
    dD0, dD1 = ints(D.d(0)), ints(D.d(1))
    f0, f1, f2 = ints(f[0]), ints(f[1]), ints(f[2])
    # degree 0: f0 = h1 dC0   (h1 : d0 x c1), row by row
    h1_rows = []
    for i in range(d0):
        ok = [v for v in _vectors(c1, radius)
              if all(sum(v[k] * dC0[k][j] for k in range(c1)) == f0[i][j] for j in range(c0))]
        if not ok:
            return False
        h1_rows.append(ok)
    # degree 2: f2 = dD1 h2   (h2 : d1 x c2), column by column
    h2_cols = []
    for j in range(c2):
        ok = [v for v in _vectors(d1, radius)
              if all(sum(dD1[i][k] * v[k] for k in range(d1)) == f2[i][j] for i in range(D.rank(2)))]
        if not ok:
            return False
        h2_cols.append(ok)
    # degree 1: f1 = dD0 h1 + h2 dC1.  Both sides are sums of rank-one
    # contributions, collected as deduplicated sets of flattened matrices.
    # h2 dC1 = sum_k col_k(h2) (x) row_k(dC1)
    right = {tuple([0] * (d1 * c1))}
    for k in range(c2):
        terms = {tuple(v[i] * dC1[k][j] for i in range(d1) for j in range(c1)) for v in h2_cols[k]}
        right = {tuple(x + y for x, y in zip(s, t)) for s in right for t in terms}
    target = tuple(f1[i][j] for i in range(d1) for j in range(c1))
    left = {tuple([0] * (d1 * c1))}
    for k in range(d0):
        terms = {tuple(dD0[i][k] * v[j] for i in range(d1) for j in range(c1)) for v in h1_rows[k]}
        left = {tuple(x + y for x, y in zip(s, t)) for s in left for t in terms}
    return any(tuple(a - b for a, b in zip(target, s)) in right for s in left)


# --------------------------------------------------------------------------
# verifying factorization witnesses over a field


def perturb_witness(rng, t1, t2, w: FactorizationWitness, height: int = 3) -> FactorizationWitness:
    """Move ``alpha1`` along a homotopy that keeps every witness condition.

    ``alpha1_0 += (k1 ; p) H0 + H1 r`` and ``alpha1_1 += (g, k2) H1`` with
    ``alpha2 H1 = 0``.
    """
    R = t1.ring
    left = w.alpha1_0.ncols
    r = r_matrix(t1, t2)
    T = w.T1 + w.T2
    H0 = rand_matrix(rng, R, w.Z, left, height)
    ker = kernel_basis(R, [list(row) for row in w.alpha2.rows], ncols=T) if T else []
    H1 = Matrix.zero(R, T, r.nrows)
    for vec in ker:
        col = Matrix(R, T, 1, [[x] for x in vec])
        H1 = H1 + col @ rand_matrix(rng, R, 1, r.nrows, height)
    k1p = w.k1.vstack(w.p)
    gk2 = w.g.hstack(w.k2)
    return w.replace(alpha1_0=w.alpha1_0 + k1p @ H0 + H1 @ r, alpha1_1=w.alpha1_1 + gk2 @ H1)


def rand_witness_case(rng, sset: SSet):
    """``(t1, t2, w)`` with ``w`` a verifying witness, from one of three families."""
    src, tgt = rng.randint(1, 2), rng.randint(1, 2)
    t1 = rand_triple(rng, sset, src, tgt, depth=2, height=3)
    kind = rng.choice(["same", "plain", "padded"])
    if kind == "same":
        t2, w = t1, tautological_witness(t1)
    else:
        if kind == "plain":
            t2 = from_plain(sset, evaluate_functor(t1, fraction_oracle_map(sset)))
        else:
            t2 = triple_compose(from_plain(sset, Matrix.identity(sset.ring, tgt)), t1)
        w = homotopy_witness(t1, t2)
        if w is None:
            t2, w = t1, tautological_witness(t1)
    return t1, t2, perturb_witness(rng, t1, t2, w)


# --------------------------------------------------------------------------
# golden CLI sessions

GOLDEN = Path(__file__).parent / "golden"


def golden_commands():
    """``(name, argv)`` for every line of the golden command list."""
    out = []
    for line in (GOLDEN / "commands.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, session, args = (x.strip() for x in line.split("|"))
        out.append((name, [str(GOLDEN / "sessions" / session)] + shlex.split(args)))
    return out


def golden_report(argv) -> tuple[int, str]:
    """Exit code and the JSON report with wall-clock timing removed."""
    code, report, text = run(argv)
    if report is None:
        return code, "\n".join(text) + "\n"
    report = dict(report)
    report.pop("timing")
    return code, dump_report(report)


def half_plus_half_Z():
    """``(sset, inv(s) + inv(s), id)`` over Z with ``S = {[2]}``."""
    from cohnloc.coeff import Integers

    Z = Integers()
    sset = SSet(Z, (Matrix.from_ints(Z, [[2]]),))
    half = invert_s(sset, 0)
    return sset, triple_add(half, half), from_plain(sset, Matrix.identity(Z, 1))


def witness_to_json(w: FactorizationWitness) -> dict:
    def ints(m):
        return {"shape": list(m.shape), "rows": [[int(x) for x in r] for r in m.rows]}

    def cert(c):
        return {"diagonal": [list(t) for t in c.diagonal],
                "below": [[k, l, ints(m)] for (k, l), m in sorted(c.below.items())]}

    out = {k: getattr(w, k) for k in ("Z", "Zp", "T1", "T2")}
    out.update({k: ints(m) for k, m in w.blocks().items()})
    out["k1_cert"], out["k2_cert"] = cert(w.k1_cert), cert(w.k2_cert)
    return out


def witness_from_json(sset: SSet, d: dict) -> FactorizationWitness:
    R = sset.ring

    def mat(x):
        return Matrix(R, x["shape"][0], x["shape"][1], [[R.from_int(v) for v in r] for r in x["rows"]])

    def cert(c):
        return TriangularCert(sset, [tuple(t) for t in c["diagonal"]],
                              {(k, l): mat(m) for k, l, m in c["below"]})

    blocks = {k: mat(d[k]) for k in ("k1", "k2", "p", "g", "alpha1_0", "alpha1_1", "alpha2")}
    return FactorizationWitness(Z=d["Z"], Zp=d["Zp"], T1=d["T1"], T2=d["T2"],
                                k1_cert=cert(d["k1_cert"]), k2_cert=cert(d["k2_cert"]), **blocks)
