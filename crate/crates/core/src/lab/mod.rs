//! Scenario construction, operators and the experiments built from them.

pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod init;
pub mod ops;
pub mod scenario;

pub use config::{
    AnnihilationEvent, BitrevSettings, ConservedSet, EngineKind, EquilibriumSettings, ExplicitDisk, InitialCondition,
    Perturbation, Region, Reversal, ScenarioConfig, VerdictThresholds,
};
pub use dynamics::Dynamics;
pub use ensemble::Execution;
pub use init::build_initial;
pub use ops::{apply_annihilation, apply_annihilation_bitrev, perturb, perturb_bitrev, AnnihilationOutcome};
pub use scenario::{
    decide, echo_sweep, entropy_window, equilibrium_reference, run_arrow_experiment, run_ensemble, run_reversed_from,
    run_scenario, run_white_hole_attempt, ArrowPair, EchoDistance, EventSummary, Frame, ScenarioReport, SweepParam,
    SweepPoint, SweepReport, Verdict, WhiteHoleSummary,
};
