use proptest::prelude::*;
use voxdrone_core::action::ActionClass;
use voxdrone_core::sim::{reset, DroneState, MotionFrame, Pose, SimConfig};

#[derive(Debug, Clone)]
enum Op {
    Command(ActionClass),
    Step(f64),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0u8..9).prop_map(|i| Op::Command(ActionClass::ALL[i as usize])),
        (0.001f64..3.0).prop_map(Op::Step),
    ]
}

fn start() -> impl Strategy<Value = Pose> {
    (-5.0f64..5.0, -5.0f64..5.0, 0.5f64..4.0, 0.0f64..360.0).prop_map(|(x, y, z, yaw)| Pose::new(x, y, z, yaw))
}

fn run(state: DroneState, ops: &[Op]) -> DroneState {
    ops.iter().fold(state, |s, op| match op {
        Op::Command(c) => s.apply(*c),
        Op::Step(dt) => s.step(*dt).unwrap(),
    })
}

proptest! {
    #[test]
    fn never_below_floor(pose in start(), ops in proptest::collection::vec(op(), 0..60)) {
        let mut s = reset(SimConfig::default(), pose).unwrap();
        for op in &ops {
            s = run(s, std::slice::from_ref(op));
            prop_assert!(s.pose().z >= 0.5);
            prop_assert!(!matches!(s.active_action(), Some(ActionClass::TurnLeft | ActionClass::TurnRight)));
            let yaw = s.pose().yaw;
            prop_assert!((0.0..360.0).contains(&yaw));
        }
    }

    #[test]
    fn deterministic(pose in start(), ops in proptest::collection::vec(op(), 0..60)) {
        let a = run(reset(SimConfig::default(), pose).unwrap(), &ops);
        let b = run(reset(SimConfig::default(), pose).unwrap(), &ops);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn left_then_right_cancels(pose in start(), t in 0.01f64..20.0, world: bool) {
        let config = SimConfig {
            frame: if world { MotionFrame::World } else { MotionFrame::Body },
            ..SimConfig::default()
        };
        let s = reset(config, pose).unwrap();
        let end = s.apply(ActionClass::GoLeft).step(t).unwrap().apply(ActionClass::GoRight).step(t).unwrap();
        prop_assert!((end.pose().x - pose.x).abs() <= 1e-9);
        prop_assert!((end.pose().y - pose.y).abs() <= 1e-9);
    }

    #[test]
    fn four_turns_restore_yaw(pose in start(), left: bool) {
        let s = reset(SimConfig::default(), pose).unwrap();
        let turn = if left { ActionClass::TurnLeft } else { ActionClass::TurnRight };
        let end = (0..4).fold(s, |s, _| s.apply(turn));
        prop_assert_eq!(end.pose().yaw.to_bits(), s.pose().yaw.to_bits());
        prop_assert_eq!(end, s);
    }

    #[test]
    fn axes_are_independent(pose in start(), dt in 0.01f64..5.0, class_idx in 0usize..6) {
        let class = ActionClass::ALL[class_idx];
        let s = reset(SimConfig::default(), pose).unwrap();
        let end = s.apply(class).step(dt).unwrap().pose();
        let p = s.pose();
        match class {
            ActionClass::Up | ActionClass::Down => {
                prop_assert_eq!((end.x, end.y, end.yaw), (p.x, p.y, p.yaw));
            }
            _ => {
                prop_assert_eq!(end.z, p.z);
                prop_assert_eq!(end.yaw, p.yaw);
                let moved = ((end.x - p.x).powi(2) + (end.y - p.y).powi(2)).sqrt();
                prop_assert!((moved - 0.5 * dt).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn descent_from_any_height_halts_at_floor() {
    let s = reset(SimConfig::default(), Pose::new(0.0, 0.0, 3.0, 0.0))
        .unwrap()
        .apply(ActionClass::Down);
    let mut s = s;
    for _ in 0..200 {
        s = s.tick();
    }
    assert_eq!(s.pose().z, 0.5);
    assert!(s.is_hovering());
}
