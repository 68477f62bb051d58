"""Computer-assisted uniqueness proofs for radial bound states of ``y'' + (2/t) y' + y^3 - y = 0``."""
from .interval import Interval
from .methods import (
    BOUNDSTATEGOOD,
    FALL,
    INFTYCROSSESMANY,
    MethodResult,
    ProverConfig,
    bound_state_good,
    check_trap,
    fall,
    infty_crosses_many,
)
from .orchestrator import (
    ProofCertificate,
    emit_certificate,
    emit_plot_data,
    emit_table,
    execute,
    recheck_certificate,
    verify_cover,
)
from .planner import ProofPlan, Segment, build_plan, locate_bound_states

__version__ = "0.1.0"

__all__ = [
    "Interval", "BOUNDSTATEGOOD", "FALL", "INFTYCROSSESMANY", "MethodResult", "ProverConfig",
    "bound_state_good", "check_trap", "fall", "infty_crosses_many", "ProofCertificate",
    "emit_certificate", "emit_plot_data", "emit_table", "execute", "recheck_certificate",
    "verify_cover", "ProofPlan", "Segment", "build_plan", "locate_bound_states",
]
