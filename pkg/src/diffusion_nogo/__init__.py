"""Simulator for general-diffusion amplitude amplification and its no-go certificates."""

__version__ = "0.1.0"

from .errors import CapacityError, InputError, NogoError, PreconditionError, ShapeError
from .statevector import (
    BasisLabel,
    RegisterLayout,
    StateVector,
    inner,
    measure_sample,
    prepare_from_zero,
    prepare_from_zero_inverse,
    reflect_about,
    tensor,
)
from .encoding import (
    InputBitstring,
    Predicate,
    block_split,
    encode_block_state,
    exact_a,
    phase_oracle_apply,
    predicate_eval,
)
from .amplification import (
    AmplificationInstance,
    GoodBadDecomposition,
    QSearchConfig,
    QSearchOutcome,
    analytic_success_prob,
    apply_Q,
    claim_equivalence_residual,
    decompose_good_bad,
    general_diffusion_apply,
    qsearch,
    qsearch_analytic,
)
from .nogo import (
    DistortionWitness,
    LinearExtensionReport,
    inner_product_distortion,
    linear_extension_contradiction,
    search_max_distortion,
)
from .protocol import (
    ProtocolConfig,
    ProtocolResult,
    communication_cost,
    failure_probability_bound,
    ground_truth_disjoint,
    run_disjointness,
)
