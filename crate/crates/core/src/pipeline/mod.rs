//! Symbolic transformers for equation systems and the Lee-word checker.

pub mod lee;
pub mod main_theorem;
pub mod observation;
pub mod sml;

pub use lee::{
    ball_conjugator, check_lee_properties, generates_cyclic, simultaneous_conjugator, LeeReport,
};
pub use main_theorem::{
    build_main_s1, build_main_s2, q_correct, residues, run_main_theorem_round_trip, MainS1,
    RoundTripConfig, RoundTripReport, TemplateTable,
};
pub use observation::{observation_equation, observation_for, Observation};
pub use sml::{build_sml_s1, lee_collapse, LeeCandidate, SmlS1};
