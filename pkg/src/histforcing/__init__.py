"""Finite-scale workbench for the historic forcing construction of Boolean algebras.

Conditions are built as concrete trees with their valuation tables and
history data; the :mod:`checks` module verifies the structural facts the
construction is designed to satisfy against brute-force oracles.
"""
from .algebra import (And, BoolTerm, Const, Not, Or, TermInstance, ValuationTable, Var,
                      closure, elem_le, elem_lt, elem_nonzero, eval_term, in_generated,
                      instance_value, is_subalgebra_embedding, longest_chain, sigma_maj)
from .checks import CheckReport, build_maj_chain, run_suite
from .delta import DeltaSystem, clean_and_amalgamate, find_delta_system
from .errors import (ClauseViolation, ConsistencyError, FormatError, InvalidInput,
                     PreconditionViolation, ResourceLimit, SearchFailure)
from .generate import GeneratorSpec, generate
from .poset import (Amalgam, Atomic, Condition, amalgamate, atomic, fingerprint, iso_map,
                    leq, leq_pr, transform, transport)
from .serialize import condition_id, decode, dumps, encode, loads
from .signatures import (U_set, close, closed_sets, components, flip, is_p_closed,
                         pr_component, u_iso, upsilon)

__version__ = "0.1.0"
