"""kerrcat: Kerr-medium cat states, Wigner functions, and ion pulse synthesis."""

from .fock import (
    StateVector,
    TruncationReport,
    coherent,
    default_dim,
    fidelity,
    fock,
    inner_product,
    load_state,
    parity_expectation,
    quadrature_moments,
    save_state,
    state_from_json,
    state_to_json,
    truncate,
)
from .kerr import (
    CoherentSuperposition,
    KerrParams,
    kerr_evolve,
    parse_tau,
    quadrature_variances_closed_form,
    reconstruct_superposition,
    revival_decompose,
    variance_curve,
)
from .wigner import (
    SeriesConvergenceError,
    WignerGrid,
    auto_window,
    negativity_volume,
    wigner_fock,
    wigner_grid,
    wigner_kerr_series,
)
from .ionsynth import (
    JointState,
    PhysicalSchedule,
    Pulse,
    SynthesisResult,
    TargetSpec,
    apply_carrier,
    apply_red_sideband,
    schedule_from_json,
    schedule_to_json,
    simulate_schedule,
    synthesize,
    to_physical,
)

__version__ = "0.1.0"

__all__ = [
    "StateVector",
    "TruncationReport",
    "coherent",
    "fock",
    "inner_product",
    "fidelity",
    "truncate",
    "quadrature_moments",
    "parity_expectation",
    "default_dim",
    "state_to_json",
    "state_from_json",
    "save_state",
    "load_state",
    "KerrParams",
    "CoherentSuperposition",
    "kerr_evolve",
    "quadrature_variances_closed_form",
    "variance_curve",
    "revival_decompose",
    "reconstruct_superposition",
    "parse_tau",
    "WignerGrid",
    "SeriesConvergenceError",
    "wigner_fock",
    "wigner_kerr_series",
    "wigner_grid",
    "auto_window",
    "negativity_volume",
    "JointState",
    "Pulse",
    "TargetSpec",
    "PhysicalSchedule",
    "SynthesisResult",
    "apply_carrier",
    "apply_red_sideband",
    "synthesize",
    "to_physical",
    "simulate_schedule",
    "schedule_to_json",
    "schedule_from_json",
    "__version__",
]
