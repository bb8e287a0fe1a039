from .affine import AffineFragment, compile_affine, fragment_quiescent_output, monotone_violations
from .predicate import PredicateCrd, compile_predicate
from .top import CompiledCrn, SpecValidationError, audit_invariant, audit_violations, compile_spec

__all__ = [
    "AffineFragment",
    "compile_affine",
    "fragment_quiescent_output",
    "monotone_violations",
    "PredicateCrd",
    "compile_predicate",
    "CompiledCrn",
    "SpecValidationError",
    "audit_invariant",
    "audit_violations",
    "compile_spec",
]
