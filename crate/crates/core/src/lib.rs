//! Voice command interpretation for a simulated quadrotor.
//!
//! Hypotheses from a speech provider are mapped onto nine drone actions by
//! comparing them with a bilingual command lexicon, either exactly or by
//! minimum character edit distance. Classified actions drive a kinematic
//! simulator, and an evaluation harness measures recognition accuracy under
//! transcript or waveform degradation.

pub mod action;
pub mod audio;
pub mod controller;
pub mod eval;
pub mod lexicon;
pub mod matcher;
pub mod sim;

pub use action::{ActionClass, Language};
pub use controller::{interpret, replay_log, run_loop, ControllerConfig, InterpretationOutcome};
pub use lexicon::{Lexicon, LexiconEntry, LexiconError};
pub use matcher::{
    levenshtein, match_exact, match_fuzzy, normalize, MatchMode, MatchOptions, MatchResult, NormalizedText,
};
pub use sim::{DroneState, Pose, SimConfig};
