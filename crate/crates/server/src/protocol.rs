//! JSON messages exchanged over the websocket, one object per text frame.

use serde::{Deserialize, Serialize};
use voxdrone_core::controller::InterpretationOutcome;
use voxdrone_core::matcher::MatchMode;
use voxdrone_core::{DroneState, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageChoice {
    Es,
    En,
    Both,
}

impl LanguageChoice {
    pub fn filter(self) -> Option<Language> {
        match self {
            LanguageChoice::Es => Some(Language::Spanish),
            LanguageChoice::En => Some(Language::English),
            LanguageChoice::Both => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Command { text: String },
    SetMode { mode: MatchMode },
    SetLanguage { language: LanguageChoice },
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    State {
        x: f64,
        y: f64,
        z: f64,
        yaw: f64,
        active_action: Option<String>,
        tick: u64,
    },
    Interpretation {
        hypothesis: String,
        matched_surface: Option<String>,
        action_class: Option<String>,
        distance: Option<usize>,
        mode: String,
        no_class: bool,
        /// Present only on the exit instruction, after which the server
        /// closes the connection.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        exit: bool,
    },
    Error {
        message: String,
    },
}

impl ServerMessage {
    pub fn state(sim: &DroneState, tick: u64) -> Self {
        let p = sim.pose();
        ServerMessage::State {
            x: p.x,
            y: p.y,
            z: p.z,
            yaw: p.yaw,
            active_action: sim.active_action().map(|c| c.label().to_string()),
            tick,
        }
    }

    pub fn interpretation(outcome: &InterpretationOutcome) -> Self {
        let r = outcome.result.as_ref();
        ServerMessage::Interpretation {
            hypothesis: outcome.hypothesis.text.clone(),
            matched_surface: r.map(|r| r.matched_entry.surface.as_str().to_string()),
            action_class: r.map(|r| r.action_class.label().to_string()),
            distance: r.map(|r| r.distance),
            mode: outcome.mode.label().to_string(),
            no_class: outcome.is_no_class(),
            exit: outcome.is_exit,
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error {
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}
