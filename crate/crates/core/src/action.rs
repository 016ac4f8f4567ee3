//! Action classes the drone understands and the languages commands arrive in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the nine drone commands. Ordinals 1..=9 follow the command table
/// order and are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionClass {
    Up,
    Down,
    GoRight,
    GoLeft,
    GoForward,
    GoBack,
    TurnRight,
    TurnLeft,
    Stop,
}

impl ActionClass {
    pub const ALL: [ActionClass; 9] = [
        ActionClass::Up,
        ActionClass::Down,
        ActionClass::GoRight,
        ActionClass::GoLeft,
        ActionClass::GoForward,
        ActionClass::GoBack,
        ActionClass::TurnRight,
        ActionClass::TurnLeft,
        ActionClass::Stop,
    ];

    /// 1-based ordinal.
    pub fn ordinal(self) -> u8 {
        self.index() as u8 + 1
    }

    /// 0-based position in [`ActionClass::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Self> {
        Self::ALL.get(usize::from(ordinal).checked_sub(1)?).copied()
    }

    /// Label used by the lexicon file, fixtures and the wire protocol.
    pub fn label(self) -> &'static str {
        match self {
            ActionClass::Up => "up",
            ActionClass::Down => "down",
            ActionClass::GoRight => "go_right",
            ActionClass::GoLeft => "go_left",
            ActionClass::GoForward => "go_forward",
            ActionClass::GoBack => "go_back",
            ActionClass::TurnRight => "turn_right",
            ActionClass::TurnLeft => "turn_left",
            ActionClass::Stop => "stop",
        }
    }

    pub fn is_turn(self) -> bool {
        matches!(self, ActionClass::TurnRight | ActionClass::TurnLeft)
    }
}

impl fmt::Display for ActionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for ActionClass {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    #[serde(rename = "es")]
    Spanish,
    #[serde(rename = "en")]
    English,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::Spanish, Language::English];

    pub fn code(self) -> &'static str {
        match self {
            Language::Spanish => "es",
            Language::English => "en",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::Spanish => "Spanish",
            Language::English => "English",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "es" => Ok(Language::Spanish),
            "en" => Ok(Language::English),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinals_follow_table_order() {
        let ordinals: Vec<u8> = ActionClass::ALL.iter().map(|c| c.ordinal()).collect();
        assert_eq!(ordinals, (1..=9).collect::<Vec<_>>());
        assert_eq!(ActionClass::from_ordinal(7), Some(ActionClass::TurnRight));
        assert_eq!(ActionClass::from_ordinal(0), None);
        assert_eq!(ActionClass::from_ordinal(10), None);
    }

    #[test]
    fn labels_round_trip() {
        for class in ActionClass::ALL {
            assert_eq!(class.label().parse::<ActionClass>().unwrap(), class);
            let json = serde_json::to_string(&class).unwrap();
            assert_eq!(json, format!("\"{}\"", class.label()));
        }
        assert!("fly".parse::<ActionClass>().is_err());
        for lang in Language::ALL {
            assert_eq!(lang.code().parse::<Language>().unwrap(), lang);
        }
        assert!("fr".parse::<Language>().is_err());
    }
}
