"""Product-matrix regenerating codes, resilient to block errors and erasures.

One fixed encoding serves every feasible (s, t) budget: erasures and silent
corruptions during repair or reconstruction are absorbed by connecting to
s + 2t extra nodes at decode time, never by re-encoding.
"""

from .decoding import (
    Response,
    consistency_reconstruct,
    erased_response,
    received_response,
    rs_decode_ee,
    subset_decode_oracle,
)
from .errors import (
    AmbiguityError,
    ConstructionError,
    DecodeFailure,
    FieldMismatchError,
    InconsistentSystemError,
    InfeasibleError,
    ParameterError,
    PmrcError,
    SingularMatrixError,
)
from .field import Fq, default_modulus, is_prime, smallest_prime_at_least
from .linalg import MatrixFq, vandermonde
from .mbr import (
    MbrMessageMatrix,
    mbr_encode,
    mbr_fill_message,
    mbr_helper_symbol,
    mbr_read_message,
    mbr_reconstruct,
    mbr_repair,
)
from .msr import (
    MsrMessageMatrix,
    NodeShare,
    msr_encode,
    msr_fill_message,
    msr_helper_symbol,
    msr_read_message,
    msr_reconstruct,
    msr_repair,
    msr_systematic_remap,
)
from .params import (
    CodeMode,
    EncodingMatrix,
    SystemParams,
    build_encoding,
    build_psi_mbr,
    build_psi_msr,
    capacity_bound,
    encoding_from_points,
    feasible_pairs,
    mbr_params,
    msr_params,
    resilience_feasible,
)
from .simulator import (
    AdversaryPlan,
    ClusterState,
    EventReport,
    adversary_patterns,
    exhaustive_resilience_check,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryPlan",
    "AmbiguityError",
    "ClusterState",
    "CodeMode",
    "ConstructionError",
    "DecodeFailure",
    "EncodingMatrix",
    "EventReport",
    "FieldMismatchError",
    "Fq",
    "InconsistentSystemError",
    "InfeasibleError",
    "MatrixFq",
    "MbrMessageMatrix",
    "MsrMessageMatrix",
    "NodeShare",
    "ParameterError",
    "PmrcError",
    "Response",
    "SingularMatrixError",
    "SystemParams",
    "adversary_patterns",
    "build_encoding",
    "build_psi_mbr",
    "build_psi_msr",
    "capacity_bound",
    "consistency_reconstruct",
    "default_modulus",
    "encoding_from_points",
    "erased_response",
    "exhaustive_resilience_check",
    "feasible_pairs",
    "is_prime",
    "mbr_encode",
    "mbr_fill_message",
    "mbr_helper_symbol",
    "mbr_params",
    "mbr_read_message",
    "mbr_reconstruct",
    "mbr_repair",
    "msr_encode",
    "msr_fill_message",
    "msr_helper_symbol",
    "msr_params",
    "msr_read_message",
    "msr_reconstruct",
    "msr_repair",
    "msr_systematic_remap",
    "received_response",
    "resilience_feasible",
    "rs_decode_ee",
    "run_scenario",
    "smallest_prime_at_least",
    "subset_decode_oracle",
    "vandermonde",
]
