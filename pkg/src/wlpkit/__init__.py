"""Exact computations with artinian graded quotients of k[x, y, z] and their Lefschetz properties."""

from .errors import WlpkitError
from .exactfield import GF, QQ, ExtField, PrimeField, Rationals, parse_field
from .exactla import ExactMatrix, kernel_basis, rank, rref
from .fileformats import parse_ideal_file, parse_matrix_file
from .gorenstein import (SkewPolyMatrix, annihilator, certify_gorenstein, compressed_random, inverse_system_form,
                         level_decompose, pfaffian, pfaffian_ideal, truncate_algebra)
from .gradedquot import GradedIdeal, HVector, hilbert_function, hvector
from .lefschetz import (JordanPartition, LinearForm, general_jordan, jordan_partition, mult_map_rank, slp_check,
                        wlp_check)
from .multipoly import DualForm, Polynomial, contract, parse_polynomial

__version__ = "0.1.0"
