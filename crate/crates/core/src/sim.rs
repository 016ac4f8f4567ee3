//! Kinematic quadrotor simulator.
//!
//! Translations and vertical motion run continuously until another command
//! replaces them or `Stop` clears them. Descent halts on its own at the floor
//! altitude. Turns are instantaneous quarter turns that leave the drone
//! hovering.
//!
//! Yaw is measured in degrees, counterclockwise from the world +x axis, so
//! heading 0 points along +x and 90 along +y. A clockwise turn subtracts 90.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::ActionClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("time step must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("start altitude {z} m is below the floor at {floor} m")]
    StartBelowFloor { z: f64, floor: f64 },
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Degrees in [0, 360).
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self { x, y, z, yaw }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0)
    }
}

/// Reference frame for horizontal translations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionFrame {
    /// Forward follows the current heading.
    #[default]
    Body,
    /// Forward is always world +x and left is world +y.
    World,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// m/s for forward/back/left/right.
    pub linear_speed: f64,
    /// m/s for up/down.
    pub vertical_speed: f64,
    pub floor_altitude: f64,
    /// Seconds per simulation tick.
    pub tick: f64,
    pub frame: MotionFrame,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            linear_speed: 0.5,
            vertical_speed: 0.5,
            floor_altitude: 0.5,
            tick: 0.05,
            frame: MotionFrame::Body,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let checks = [
            ("linear_speed", self.linear_speed),
            ("vertical_speed", self.vertical_speed),
            ("floor_altitude", self.floor_altitude),
            ("tick", self.tick),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Heading kept as a start angle plus a quarter-turn count, so that any
/// four turns in the same direction restore the yaw bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Heading {
    base: f64,
    quarter_turns: u8,
}

impl Heading {
    fn degrees(&self) -> f64 {
        if self.quarter_turns == 0 {
            self.base
        } else {
            wrap_degrees(self.base + 90.0 * f64::from(self.quarter_turns))
        }
    }

    fn turned(self, counterclockwise: bool) -> Self {
        let delta = if counterclockwise { 1 } else { 3 };
        Self {
            base: self.base,
            quarter_turns: (self.quarter_turns + delta) % 4,
        }
    }
}

fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    x: f64,
    y: f64,
    z: f64,
    heading: Heading,
    active_action: Option<ActionClass>,
    config: SimConfig,
}

/// Fresh hovering state at `start`.
pub fn reset(config: SimConfig, start: Pose) -> Result<DroneState, SimError> {
    DroneState::new(config, start)
}

impl DroneState {
    pub fn new(config: SimConfig, start: Pose) -> Result<Self, SimError> {
        config.validate()?;
        for (name, v) in [("x", start.x), ("y", start.y), ("z", start.z), ("yaw", start.yaw)] {
            if !v.is_finite() {
                return Err(SimError::InvalidPose(format!("{name} is not finite")));
            }
        }
        if start.z < config.floor_altitude {
            return Err(SimError::StartBelowFloor {
                z: start.z,
                floor: config.floor_altitude,
            });
        }
        Ok(Self {
            x: start.x,
            y: start.y,
            z: start.z,
            heading: Heading {
                base: wrap_degrees(start.yaw),
                quarter_turns: 0,
            },
            active_action: None,
            config,
        })
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.z, self.heading.degrees())
    }

    pub fn active_action(&self) -> Option<ActionClass> {
        self.active_action
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn is_hovering(&self) -> bool {
        self.active_action.is_none()
    }

    /// Applies a command. Turns complete at once; other motions become the
    /// active action, replacing any previous one.
    pub fn apply(mut self, class: ActionClass) -> Self {
        match class {
            ActionClass::Stop => self.active_action = None,
            ActionClass::TurnRight => {
                self.heading = self.heading.turned(false);
                self.active_action = None;
            }
            ActionClass::TurnLeft => {
                self.heading = self.heading.turned(true);
                self.active_action = None;
            }
            motion => self.active_action = Some(motion),
        }
        self
    }

    /// Integrates the active action over `dt` seconds.
    pub fn step(mut self, dt: f64) -> Result<Self, SimError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::NonPositiveStep(dt));
        }
        let Some(action) = self.active_action else {
            return Ok(self);
        };
        let vertical = self.config.vertical_speed * dt;
        let linear = self.config.linear_speed * dt;
        match action {
            ActionClass::Up => self.z += vertical,
            ActionClass::Down => {
                let z = self.z - vertical;
                if z <= self.config.floor_altitude {
                    self.z = self.config.floor_altitude;
                    self.active_action = None;
                } else {
                    self.z = z;
                }
            }
            ActionClass::GoForward => self.translate(linear, 0.0),
            ActionClass::GoBack => self.translate(-linear, 0.0),
            ActionClass::GoLeft => self.translate(0.0, linear),
            ActionClass::GoRight => self.translate(0.0, -linear),
            ActionClass::TurnRight | ActionClass::TurnLeft | ActionClass::Stop => {
                unreachable!("never stored as active action")
            }
        }
        Ok(self)
    }

    /// Advances by one configured tick.
    pub fn tick(self) -> Self {
        let dt = self.config.tick;
        self.step(dt).expect("tick validated at construction")
    }

    fn translate(&mut self, forward: f64, left: f64) {
        let (fx, fy) = match self.config.frame {
            MotionFrame::Body => {
                let yaw = self.heading.degrees().to_radians();
                (yaw.cos(), yaw.sin())
            }
            MotionFrame::World => (1.0, 0.0),
        };
        // left is the heading rotated a quarter turn counterclockwise
        self.x += forward * fx - left * fy;
        self.y += forward * fy + left * fx;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hover() -> DroneState {
        reset(SimConfig::default(), Pose::default()).unwrap()
    }

    #[test]
    fn stop_clears_and_keeps_pose() {
        let s = hover().apply(ActionClass::Stop);
        assert_eq!(s.active_action(), None);
        assert_eq!(s.pose(), Pose::default());
        let s = hover().apply(ActionClass::Up).apply(ActionClass::Stop);
        assert_eq!(s.active_action(), None);
    }

    #[test]
    fn turn_right_is_clockwise() {
        let s = hover().apply(ActionClass::GoForward).apply(ActionClass::TurnRight);
        assert_eq!(s.pose().yaw, 270.0);
        assert_eq!(s.active_action(), None);
        let s = hover().apply(ActionClass::TurnLeft);
        assert_eq!(s.pose().yaw, 90.0);
    }

    #[test]
    fn new_command_replaces_active() {
        let s = hover().apply(ActionClass::GoLeft).apply(ActionClass::GoForward);
        assert_eq!(s.active_action(), Some(ActionClass::GoForward));
    }

    #[test]
    fn descent_stops_at_floor() {
        let start = Pose::new(0.0, 0.0, 0.6, 0.0);
        let s = reset(SimConfig::default(), start).unwrap().apply(ActionClass::Down);
        let s = s.step(1.0).unwrap();
        assert_eq!(s.pose().z, 0.5);
        assert_eq!(s.active_action(), None);
    }

    #[test]
    fn forward_moves_along_heading() {
        let s = hover().apply(ActionClass::GoForward).step(2.0).unwrap();
        let p = s.pose();
        assert!((p.x - 1.0).abs() < 1e-12 && p.y.abs() < 1e-12);
        assert_eq!(p.z, 1.0);
        assert_eq!(s.active_action(), Some(ActionClass::GoForward));

        // facing +y after a left turn, forward moves along +y and left along -x
        let s = hover()
            .apply(ActionClass::TurnLeft)
            .apply(ActionClass::GoForward)
            .step(2.0)
            .unwrap();
        assert!((s.pose().y - 1.0).abs() < 1e-12 && s.pose().x.abs() < 1e-12);
        let s = hover()
            .apply(ActionClass::TurnLeft)
            .apply(ActionClass::GoLeft)
            .step(2.0)
            .unwrap();
        assert!((s.pose().x + 1.0).abs() < 1e-12 && s.pose().y.abs() < 1e-12);
        assert_eq!(s.pose().yaw, 90.0);
    }

    #[test]
    fn world_frame_ignores_heading() {
        let config = SimConfig {
            frame: MotionFrame::World,
            ..SimConfig::default()
        };
        let s = reset(config, Pose::default())
            .unwrap()
            .apply(ActionClass::TurnLeft)
            .apply(ActionClass::GoRight)
            .step(2.0)
            .unwrap();
        assert!((s.pose().y + 1.0).abs() < 1e-12 && s.pose().x.abs() < 1e-12);
    }

    #[test]
    fn hover_is_stationary() {
        let s = hover();
        assert_eq!(s.step(10.0).unwrap(), s);
    }

    #[test]
    fn reset_validates() {
        let err = reset(SimConfig::default(), Pose::new(0.0, 0.0, 0.3, 0.0)).unwrap_err();
        assert_eq!(err, SimError::StartBelowFloor { z: 0.3, floor: 0.5 });
        let bad = SimConfig {
            tick: 0.0,
            ..SimConfig::default()
        };
        assert!(matches!(reset(bad, Pose::default()), Err(SimError::InvalidConfig(_))));
        let s = reset(SimConfig::default(), Pose::new(0.0, 0.0, 1.0, -90.0)).unwrap();
        assert_eq!(s.pose().yaw, 270.0);
    }

    #[test]
    fn step_rejects_bad_dt() {
        assert!(hover().step(0.0).is_err());
        assert!(hover().step(-1.0).is_err());
        assert!(hover().step(f64::NAN).is_err());
    }

    #[test]
    fn four_turns_restore_yaw() {
        let s = reset(SimConfig::default(), Pose::new(0.0, 0.0, 1.0, 1e-300)).unwrap();
        let turned = (0..4).fold(s, |s, _| s.apply(ActionClass::TurnRight));
        assert_eq!(turned.pose().yaw.to_bits(), s.pose().yaw.to_bits());
    }
}
