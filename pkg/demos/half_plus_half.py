"""One half plus one half equals one, over the integers.

Builds the inverse of 2 as a localization triple, adds it to itself, and
checks the result against the identity three ways: the fraction-field
oracle, a bounded witness search, and the translated Malcolmson witness.
"""
from cohnloc.addcat import Matrix
from cohnloc.coeff import Integers
from cohnloc.equality import (check_factorization, check_malcolmson, decide_equal_oracle,
                              malcolmson_from_factorization, search_equal)
from cohnloc.localization import from_plain, invert_s, triple_add
from cohnloc.triangular import SSet

Z = Integers()
sset = SSet(Z, (Matrix.from_ints(Z, [[2]]),))
half = invert_s(sset, 0)
total = triple_add(half, half)
one = from_plain(sset, Matrix.identity(Z, 1))

print("oracle says equal:", decide_equal_oracle(total, one))
print("oracle says half == one:", decide_equal_oracle(half, one))

w = search_equal(total, one, cap=4)
print("witness ranks Z, Z', T1, T2:", w.Z, w.Zp, w.T1, w.T2)
print("factorization witness verifies:", check_factorization(total, one, w))
mw = malcolmson_from_factorization(total, one, w)
print("malcolmson witness verifies:", check_malcolmson(total, one, mw))
