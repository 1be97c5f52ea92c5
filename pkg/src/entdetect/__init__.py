"""Entanglement detection from few correlation measurements.

The toolkit certifies entanglement of N-qubit states once the sum of
squared measured full-weight Pauli correlations exceeds 1, and provides
two strategies for getting there quickly: locally determined Schmidt bases
(with filtering for maximally entangled states) and adaptive decision
trees built from mutually commuting Pauli strings.
"""

from .engine import (
    DecisionPolicy,
    Session,
    SessionError,
    Status,
    detection_step,
    priorities,
    random_order_session,
    run_auto,
    two_qubit_tree,
)
from .pauli import PauliStringError, commutes, full_weight_settings
from .schmidt import (
    FilterAnnihilatedError,
    PrimedFrame,
    SchmidtAngles,
    SchmidtTranscript,
    VanishingBlochError,
    angles_from_bloch,
    apply_filter,
    primed_frame,
    schmidt_protocol,
)
from .states import (
    QuantumState,
    StateError,
    bell,
    colored_noise,
    dicke_4_2,
    g_state,
    ghz,
    make_state,
    negativity,
    product_state,
    random_mixed,
    random_pure,
    w_state,
    werner,
)
from .strings import (
    TreeBranch,
    build_branch,
    commutant_of_seed,
    commutant_size,
    find_string_by_search,
    maximal_commuting_strings,
    relabel,
    string_length,
)
from .tensor import (
    CorrelationTensor,
    CriterionError,
    bloch_vector,
    correlation,
    criterion_sum,
    full_tensor,
    reconstruct,
    sample_correlation,
)

__version__ = "0.1.0"
