"""Decision procedure and interpolant synthesizer for multi-agent S5 on cross-sequents."""

from .cross_sequent import CrossSequent
from .interpolation import InterpolationReport, NonTheoremError, interpolate
from .prover import ProofResult, ProofTree, prove, prove_formula
from .semantics import KripkeModel, evaluate, find_countermodel_bruteforce
from .syntax import FormulaSyntaxError, negate, parse, parse_nnf, pretty, to_nnf

__version__ = "0.1.0"

__all__ = [
    "CrossSequent",
    "FormulaSyntaxError",
    "InterpolationReport",
    "KripkeModel",
    "NonTheoremError",
    "ProofResult",
    "ProofTree",
    "evaluate",
    "find_countermodel_bruteforce",
    "interpolate",
    "negate",
    "parse",
    "parse_nnf",
    "pretty",
    "prove",
    "prove_formula",
    "to_nnf",
]
