"""acnmap: compile artificial-neuron weights into dual-tree adiabatic
switched-capacitor (ACN) netlists, verify functional equivalence against
the abstract neuron, and report hardware-relevant metrics."""

from .errors import (
    AcnMapError,
    AllZeroWeights,
    DimensionMismatch,
    InvariantViolation,
    NotUnitQuantized,
    ParseError,
    SchemaMismatch,
    SchemaVersionError,
    TooLargeForExhaustive,
    WeightNormExceedsVmax,
)
from .model import (
    AcnDiagnostics,
    EvalResult,
    LayerAggregates,
    MappedAcn,
    MappingReport,
    NeuronMetrics,
    NeuronSpec,
    SplitWeights,
    TechConstraints,
)
from .mapper import (
    CapViolation,
    apply_pillars,
    balanced_map,
    check_realizable,
    compensate_parasitics,
    conditional_map,
    map_neuron,
    prune,
    relu_map,
    select_ct,
    split_weights,
    vectored_bias_map,
    with_parasitic_load,
)
from .simulator import (
    Mismatch,
    acn_output,
    an_output,
    bias_offset,
    delta_vm,
    membrane_voltages,
    normalized_cap_vector,
    verify_equivalence,
)
from .metrics import (
    cap_vec_norm,
    cos_theta,
    instability,
    layer_stats,
    swing_range,
)
from .harness import (
    SweepConfig,
    TilePlan,
    binarize_weights,
    evaluate_layer,
    sweep_random,
    tile_plan,
)
from .interchange import (
    Layer,
    Network,
    load_corpus,
    load_mapping,
    load_network,
    save_corpus,
    save_mapping,
    save_network,
)

__version__ = "0.1.0"
