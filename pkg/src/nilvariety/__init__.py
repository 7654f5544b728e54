"""Exact-arithmetic computations with nilpotent matrix quadruples whose
commutator (or sum) has rank at most one: stratum classification, orbit
invariants, canonical forms, slice constructions, and finite-field censuses.
"""

from .fields import GF, QQ, Field, PrimeField, RationalField
from .linalg import (Matrix, commutator, commutator_defect, inverse,
                     is_nilpotent, nullspace, outer, rank, regular_nilpotent,
                     solve)
from .strata import (Quadruple, Staircase, StratumLabel, adapted_basis,
                     classify, is_in_N, left_module, quadruple, right_module,
                     triangularize_pair)
from .hilbert import BorderIdeal, Orientation, PsiImage, annihilator_ideal, extend_cyclic, psi
from .canonical import (CanonicalParams, StabilizerReport, canonical_quadruple,
                        conjugate, orbit_equivalent, stabilizer_dim)
from .slices import (RegularSliceParams, SliceData, build_slice_point,
                     regular_slice_point, stratum_jump_sample)
from .svariety import (SQuadruple, classify_S, is_in_S, s_canonical, s_deform,
                       s_stabilizer_dim, s_witness, squadruple,
                       trace_pairing_check, triangularize_S)
from .census import (CensusRecord, SlopeEstimate, count_commuting_nilpotent_pairs,
                     count_ij_solutions, dimension_slope, enumerate_N,
                     enumerate_S, iter_S_points)
from .errors import (InternalCheckError, NilvarietyError, PreconditionError,
                     SearchExhaustedError)

__version__ = "0.1.0"
