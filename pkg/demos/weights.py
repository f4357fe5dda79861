"""Weight decompositions of a small complex over Q.

Cuts a two-term complex at several n and prints the pieces, then asks
for its weight range.
"""
from cohnloc.addcat import Matrix
from cohnloc.coeff import Rationals
from cohnloc.complexes import BoundedComplex
from cohnloc.weights import weight_decompose, weight_range

Q = Rationals()
C = BoundedComplex.two_term(Matrix.from_ints(Q, [[1, 0], [0, 0]]))

for n in (-1, 0, 1):
    w = weight_decompose(C, n)
    print(f"n = {n}: X = {w.X!r}, Y = {w.Y!r}, verifies: {w.verify()}")

r = weight_range(C)
print("weight range:", (r.lo, r.hi))
