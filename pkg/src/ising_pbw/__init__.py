"""Exact PBW bases for the three irreducible modules (h = 0, 1/2, 1/16)
of the c = 1/2 Virasoro algebra.

Three independent descriptions of the same graded dimensions:

  * exact RREF pivots of the weight matrices of singular-vector
    submodules (reduction),
  * partitions avoiding an explicit pattern list (partitions),
  * truncated bivariate Nahm-type q-series (qseries),

plus the straightening machinery for Verma modules (virasoro) that
feeds the first route.  The cross_check and verify entry points insist
that all three agree, weight by weight, over exact rationals.
"""

from .exact import QQ, parse_rat, rat_str
from .partitions import (PATTERN_SETS, Partition, PatternSet, compare_pbw,
                         contains, enumerate_P, in_P, length, partition,
                         partitions_of, sort_pbw, u_divides, weight)
from .qseries import (BiPoly, NahmParams, agree, check_lemma1,
                      check_tail_closed_forms, eval_f, first_mismatch,
                      p_series, poch, theorem_rhs)
from .reduction import (EchelonResult, InconsistencyError, ModuleSpec,
                        WeightMatrix, build_An, cross_check, echelon,
                        module_spec, pivots_up_to, quotient_basis,
                        refined_character, rref, uK_fixtures)
from .virasoro import (PBWVector, VermaSpec, apply_mode, apply_word,
                       pbw_vector, singular_vectors, verma)

__all__ = [
    "QQ", "parse_rat", "rat_str",
    "Partition", "PatternSet", "PATTERN_SETS", "partition",
    "partitions_of", "weight", "length", "compare_pbw", "sort_pbw",
    "contains", "u_divides", "in_P", "enumerate_P",
    "BiPoly", "NahmParams", "poch", "eval_f", "check_lemma1", "agree",
    "first_mismatch", "p_series", "theorem_rhs",
    "check_tail_closed_forms",
    "VermaSpec", "PBWVector", "verma", "pbw_vector", "apply_mode",
    "apply_word", "singular_vectors",
    "ModuleSpec", "WeightMatrix", "EchelonResult", "InconsistencyError",
    "module_spec", "build_An", "rref", "echelon", "pivots_up_to",
    "quotient_basis", "refined_character", "cross_check", "uK_fixtures",
]

__version__ = "0.1.0"
