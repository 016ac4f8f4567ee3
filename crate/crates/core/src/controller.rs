//! The interpretation loop: transcribe an utterance, classify the
//! hypothesis, dispatch the action class to the simulator, repeat until an
//! exit instruction arrives.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::Language;
use crate::audio::{Hypothesis, ProviderInput, SpeechProvider};
use crate::lexicon::Lexicon;
use crate::matcher::{classify, normalize, MatchMode, MatchOptions, MatchResult};
use crate::sim::DroneState;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ControllerError {
    #[error("exit surface `{0}` is also a lexicon surface")]
    ExitSurfaceInLexicon(String),
    #[error("exit surface `{0}` is empty after normalization")]
    EmptyExitSurface(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub mode: MatchMode,
    pub language_filter: Option<Language>,
    pub reject_above: Option<usize>,
    pub strip_diacritics: bool,
    exit_surfaces: BTreeSet<String>,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            mode: MatchMode::Fuzzy,
            language_filter: None,
            reject_above: None,
            strip_diacritics: false,
            exit_surfaces: ["exit", "salir"].into_iter().map(String::from).collect(),
        }
    }
}

impl ControllerConfig {
    pub fn with_mode(mode: MatchMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    /// Replaces the exit surfaces; each is normalized.
    pub fn set_exit_surfaces<I, S>(&mut self, surfaces: I) -> Result<(), ControllerError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for s in surfaces {
            let n = normalize(s.as_ref());
            if n.is_empty() {
                return Err(ControllerError::EmptyExitSurface(s.as_ref().to_string()));
            }
            set.insert(n.into_string());
        }
        self.exit_surfaces = set;
        Ok(())
    }

    pub fn exit_surfaces(&self) -> &BTreeSet<String> {
        &self.exit_surfaces
    }

    /// Exit surfaces must not collide with lexicon surfaces.
    pub fn validate(&self, lexicon: &Lexicon) -> Result<(), ControllerError> {
        match self.exit_surfaces.iter().find(|s| lexicon.contains_surface(s)) {
            Some(s) => Err(ControllerError::ExitSurfaceInLexicon(s.clone())),
            None => Ok(()),
        }
    }

    pub fn match_options(&self) -> MatchOptions {
        MatchOptions {
            language: self.language_filter,
            reject_above: self.reject_above,
            strip_diacritics: self.strip_diacritics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationOutcome {
    pub hypothesis: Hypothesis,
    pub mode: MatchMode,
    pub result: Option<MatchResult>,
    pub dispatched: bool,
    pub is_exit: bool,
    /// Set when the provider failed and no hypothesis was produced.
    pub failure: Option<String>,
}

impl InterpretationOutcome {
    /// True when the hypothesis was not mapped to any action class.
    pub fn is_no_class(&self) -> bool {
        !self.is_exit && self.result.is_none()
    }

    fn failed(utterance_id: &str, provider_id: &str, mode: MatchMode, message: String) -> Self {
        Self {
            hypothesis: Hypothesis::new("", provider_id, utterance_id),
            mode,
            result: None,
            dispatched: false,
            is_exit: false,
            failure: Some(message),
        }
    }
}

/// Classifies one hypothesis. Pure: no simulator is touched.
pub fn interpret(hypothesis: &Hypothesis, lexicon: &Lexicon, config: &ControllerConfig) -> InterpretationOutcome {
    let text = normalize(&hypothesis.text);
    if config.exit_surfaces.contains(text.as_str()) {
        return InterpretationOutcome {
            hypothesis: hypothesis.clone(),
            mode: config.mode,
            result: None,
            dispatched: false,
            is_exit: true,
            failure: None,
        };
    }
    let result = classify(&hypothesis.text, lexicon, config.mode, &config.match_options());
    InterpretationOutcome {
        hypothesis: hypothesis.clone(),
        mode: config.mode,
        dispatched: result.is_some(),
        result,
        is_exit: false,
        failure: None,
    }
}

/// Applies an outcome to the simulator: dispatch a classified action, then
/// advance one tick unless the outcome is the exit instruction.
pub fn advance(sim: DroneState, outcome: &InterpretationOutcome) -> DroneState {
    if outcome.is_exit {
        return sim;
    }
    let sim = match &outcome.result {
        Some(r) if outcome.dispatched => sim.apply(r.action_class),
        _ => sim,
    };
    sim.tick()
}

/// Runs the loop over a pre-segmented utterance stream. Provider failures
/// are logged and skipped. Stops after the first exit instruction.
pub fn run_loop<'a, P, I>(
    provider: &P,
    utterances: I,
    sim: &mut DroneState,
    lexicon: &Lexicon,
    config: &ControllerConfig,
) -> Vec<InterpretationOutcome>
where
    P: SpeechProvider + ?Sized,
    I: IntoIterator<Item = ProviderInput<'a>>,
{
    let mut log = Vec::new();
    for input in utterances {
        let outcome = match provider.transcribe(input) {
            Ok(h) => interpret(&h, lexicon, config),
            Err(e) => {
                InterpretationOutcome::failed(input.utterance_id(), provider.provider_id(), config.mode, e.to_string())
            }
        };
        *sim = advance(*sim, &outcome);
        let exit = outcome.is_exit;
        log.push(outcome);
        if exit {
            break;
        }
    }
    log
}

/// Replays a session log against a starting state.
pub fn replay_log(log: &[InterpretationOutcome], start: DroneState) -> DroneState {
    let mut sim = start;
    for outcome in log {
        sim = advance(sim, outcome);
        if outcome.is_exit {
            break;
        }
    }
    sim
}

/// Writes one JSON object per line.
pub fn write_session_log<W: Write>(log: &[InterpretationOutcome], mut out: W) -> std::io::Result<()> {
    for outcome in log {
        serde_json::to_writer(&mut out, outcome)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_session_log(text: &str) -> serde_json::Result<Vec<InterpretationOutcome>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
