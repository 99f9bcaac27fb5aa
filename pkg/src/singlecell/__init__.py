"""Exact single cell construction for polynomial sign invariance over the reals."""

from .cellmodel import Cell, IndexedRoot, Section, Sector, describe, parse_cell
from .exact import Rational, parse_rational
from .instance import Instance, extract_smtlib, generate, parse_instance
from .poly import Polynomial, VarOrder, parse_polynomial
from .scc import NullificationFailure, construct_cell
from .scc_projective import construct_cell_pd
from .verify import compare_traces, verify_sign_invariance

__all__ = [
    "Cell", "IndexedRoot", "Section", "Sector", "describe", "parse_cell",
    "Rational", "parse_rational", "Instance", "extract_smtlib", "generate", "parse_instance",
    "Polynomial", "VarOrder", "parse_polynomial", "NullificationFailure", "construct_cell",
    "construct_cell_pd", "compare_traces", "verify_sign_invariance",
]
