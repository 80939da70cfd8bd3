"""Verification toolkit for hybrid quantum Markov chains.

Models (chains, labeled chains, hybrid and quantum automata, bilinear
machines, DFAs), conversions between them, equivalence checking, and
safety model checking via super-operator valued reachability.
"""

from .equivalence import (
    EquivalenceVerdict,
    blm_equivalent,
    blm_k_equivalent_bruteforce,
    hqa_equivalent,
    sl_trace_equivalent,
)
from .errors import DimensionError, FormatError, HqmcError
from .formats import dump_model, load_model, loads_model, model_to_json, save_model
from .linalg import (
    get_default_tol,
    gram_schmidt_residual,
    is_positive_semidefinite,
    kron,
    set_default_tol,
    unvec,
    vec,
)
from .model_check import (
    PathMeasure,
    ReachResult,
    SafetyResult,
    check_safety,
    cylinder_measure,
    path_superop,
    reach_measure,
)
from .models import (
    BLM,
    Dfa,
    Fashion,
    HQA,
    HqMC,
    QA,
    QMC,
    SLHqMC,
    ValidationReport,
    blm_weight,
    hqa_accept_prob,
    hqmc_step,
    powerset_alphabet,
    qa_accept_prob,
    qmc_step,
    sl_trace_prob,
)
from .operations import QuantumOperation, eqsim, op_compose, op_sum
from .transforms import hqa_to_qa, hqmc_to_qmc, product, qa_to_blm, sl_to_chqa

__version__ = "0.1.0"

__all__ = [
    "BLM",
    "Dfa",
    "DimensionError",
    "EquivalenceVerdict",
    "Fashion",
    "FormatError",
    "HQA",
    "HqMC",
    "HqmcError",
    "PathMeasure",
    "QA",
    "QMC",
    "QuantumOperation",
    "ReachResult",
    "SLHqMC",
    "SafetyResult",
    "ValidationReport",
    "blm_equivalent",
    "blm_k_equivalent_bruteforce",
    "blm_weight",
    "check_safety",
    "cylinder_measure",
    "dump_model",
    "eqsim",
    "get_default_tol",
    "gram_schmidt_residual",
    "hqa_accept_prob",
    "hqa_equivalent",
    "hqa_to_qa",
    "hqmc_step",
    "hqmc_to_qmc",
    "is_positive_semidefinite",
    "kron",
    "load_model",
    "loads_model",
    "model_to_json",
    "op_compose",
    "op_sum",
    "path_superop",
    "powerset_alphabet",
    "product",
    "qa_accept_prob",
    "qa_to_blm",
    "qmc_step",
    "reach_measure",
    "save_model",
    "set_default_tol",
    "sl_to_chqa",
    "sl_trace_equivalent",
    "sl_trace_prob",
    "unvec",
    "vec",
]
