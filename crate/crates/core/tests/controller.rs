use voxdrone_core::action::ActionClass;
use voxdrone_core::audio::{FixtureRecord, ProviderInput, ReplayProvider};
use voxdrone_core::controller::{read_session_log, replay_log, run_loop, write_session_log, ControllerConfig};
use voxdrone_core::lexicon::Lexicon;
use voxdrone_core::matcher::MatchMode;
use voxdrone_core::sim::{reset, Pose, SimConfig};
use voxdrone_core::Language;

fn provider(texts: &[&str]) -> ReplayProvider {
    let records: Vec<FixtureRecord> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| FixtureRecord {
            utterance_id: format!("u{i}"),
            language: Language::English,
            true_class: ActionClass::Stop,
            hypothesis: t.to_string(),
        })
        .collect();
    ReplayProvider::from_records(&records)
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("u{i}")).collect()
}

#[test]
fn exit_ends_the_loop() {
    let lex = Lexicon::builtin();
    let p = provider(&["up", "stop", "salir", "down"]);
    let ids = ids(4);
    let start = reset(SimConfig::default(), Pose::default()).unwrap();
    let mut sim = start;
    let log = run_loop(
        &p,
        ids.iter().map(|i| ProviderInput::Utterance(i)),
        &mut sim,
        &lex,
        &ControllerConfig::default(),
    );
    assert_eq!(log.len(), 3);
    assert!(log[2].is_exit);
    assert_eq!(log[0].result.as_ref().unwrap().action_class, ActionClass::Up);
    assert!(sim.is_hovering());
    // one tick of climbing before stop
    assert!(sim.pose().z > 1.0);
    assert_eq!(replay_log(&log, start), sim);
}

#[test]
fn failures_are_logged_and_skipped() {
    let lex = Lexicon::builtin();
    let p = provider(&["go forward"]);
    let start = reset(SimConfig::default(), Pose::default()).unwrap();
    let mut sim = start;
    let inputs = ["missing", "u0"].map(ProviderInput::Utterance);
    let log = run_loop(&p, inputs, &mut sim, &lex, &ControllerConfig::default());
    assert_eq!(log.len(), 2);
    assert!(log[0].failure.is_some() && log[0].is_no_class() && !log[0].dispatched);
    assert_eq!(sim.active_action(), Some(ActionClass::GoForward));
    assert!(sim.pose().x > 0.0);
}

#[test]
fn empty_stream_leaves_state_untouched() {
    let lex = Lexicon::builtin();
    let p = provider(&[]);
    let start = reset(SimConfig::default(), Pose::default()).unwrap();
    let mut sim = start;
    let log = run_loop(
        &p,
        Vec::<ProviderInput>::new(),
        &mut sim,
        &lex,
        &ControllerConfig::default(),
    );
    assert!(log.is_empty());
    assert_eq!(sim, start);
}

#[test]
fn exact_mode_does_not_dispatch_variants() {
    let lex = Lexicon::builtin();
    let p = provider(&["go forwards", "go to left"]);
    let ids = ids(2);
    let start = reset(SimConfig::default(), Pose::default()).unwrap();
    let mut sim = start;
    let config = ControllerConfig::with_mode(MatchMode::Exact);
    let log = run_loop(
        &p,
        ids.iter().map(|i| ProviderInput::Utterance(i)),
        &mut sim,
        &lex,
        &config,
    );
    assert!(log.iter().all(|o| o.is_no_class()));
    assert_eq!(sim.pose(), start.pose());
}

#[test]
fn session_log_round_trips() {
    let lex = Lexicon::builtin();
    let p = provider(&["sube", "gira a la izquierda", "go to left", "alto", "exit"]);
    let ids = ids(5);
    let start = reset(SimConfig::default(), Pose::new(1.0, -2.0, 2.0, 45.0)).unwrap();
    let mut sim = start;
    let log = run_loop(
        &p,
        ids.iter().map(|i| ProviderInput::Utterance(i)),
        &mut sim,
        &lex,
        &ControllerConfig::default(),
    );
    let mut buf = Vec::new();
    write_session_log(&log, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), log.len());
    let back = read_session_log(&text).unwrap();
    assert_eq!(back, log);
    assert_eq!(replay_log(&back, start), sim);
}
