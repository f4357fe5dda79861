"""Exact computations in additive (Cohn) localizations of free-module categories."""

from .addcat import FMObject, Matrix, invert_matrix
from .coeff import (DomainError, FreeAlgebraQ, Integers, PolynomialsQ, PreconditionError, Rationals,
                    Unsupported, ring_from_spec)
from .complexes import BoundedComplex, ChainMap, Homotopy, cone, is_null_homotopic, minimize, shift
from .equality import (FactorizationWitness, Inapplicable, MalcolmsonWitness, NotFoundWithinCap,
                       check_factorization, check_malcolmson, decide_equal_oracle,
                       malcolmson_from_factorization, search_equal)
from .localization import (LocTriple, Roof, ZigZag, evaluate_functor, from_plain, invert_s,
                           triple_add, triple_compose, triple_dsum, zigzag_normalize)
from .triangular import SSet, TriangularCert, assemble, extend, factor_elementary
from .weights import weak_weight_decompose, weight_decompose, weight_range

__version__ = "0.1.0"
