//! Deterministic class-size recurrences and the branching-process coupling
//! used to analyse the subcritical tail.

mod fixed_point;
mod gw;
mod trajectory;

pub use fixed_point::{
    empirical_critical_a, fixed_point_classify, infection_multiplicity, CriticalEstimate,
    RegimeClassification, RegimeLabel,
};
pub use gw::{gw_spec_from_state, gw_total_size, GwEstimate, GwSpec, OffspringClass, GENERATION_CAP};
pub use trajectory::{
    delta_diagnostics, trajectory_eq1, trajectory_eq2, DeltaDiagnostics, Recurrence, Trajectory,
    DEFAULT_ETA,
};
