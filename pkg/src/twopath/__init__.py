"""Two-path interferometry with channels in the paths: gluings, tomography and dilations."""
from .channels import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    canonical_kraus,
    choi_matrix,
    connecting_matrix,
    is_trace_preserving,
    random_channel,
)
from .dilation import (
    Dilation,
    assemble_dilation,
    decompose_dilation,
    dilation_for_target_gluing,
    global_unitary,
    gluing_of_dilation,
    zero_visibility_dilation,
)
from .gluing import (
    GluedChannel,
    GluingMatrix,
    apply_glued,
    extend_occupation,
    glue,
    is_subspace_preserving,
    lsp_gluing,
    rebase_gluing,
    validate_gluing_matrix,
)
from .interferometer import (
    InterferenceReport,
    detection_probability,
    fringe,
    generalized_interference,
    interference_operator,
    steered_interference,
    visibility_measures,
)
from .tomography import (
    TomographyResult,
    reconstruct_R,
    recover_C_generalized,
    recover_C_standard,
    state_basis,
    unitary_basis,
)

__version__ = "0.1.0"
