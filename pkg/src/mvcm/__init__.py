"""Multi-valued cognitive maps over finite atomic lattices of linguistic labels."""

from .engine import (
    EngineConfig,
    IterationTrace,
    MapModel,
    ModelError,
    NonConvergenceError,
    SignedWeight,
    check_bound,
    compute_r,
    run,
    signed_join,
    step,
    trace_violations,
)
from .lattice import (
    AtomLattice,
    AtomSet,
    FiniteLatticeTable,
    LabelError,
    LatticeError,
    ValidityReport,
    brute_force_residual,
    generator_count,
    implies,
    join,
    leq,
    meet,
    set_minus,
    sym_diff,
    table_from_lattice,
    validate,
)
from .learning import (
    LearnConfig,
    LearnResult,
    LearningError,
    apply_weight_update,
    delta_w,
    gen_diff,
    learn,
    learn_cases,
)
from .modelfile import load_bundled, load_model, parse_model_file, serialize_trace
from .scale import NamedScale, build_paper_lattice, format_element, parse_element

__version__ = "0.1.0"
