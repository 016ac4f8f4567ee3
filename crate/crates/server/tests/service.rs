use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio::net::TcpStream;
use tokio::time::timeout;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};
use voxdrone_core::sim::{reset, Pose, SimConfig};
use voxdrone_core::{ActionClass, ControllerConfig, Lexicon, MatchMode};
use voxdrone_server::{serve, ServeError, ServiceHandle};

type Client = WebSocketStream<MaybeTlsStream<TcpStream>>;

async fn start() -> ServiceHandle {
    let sim = reset(SimConfig::default(), Pose::default()).unwrap();
    serve("127.0.0.1:0", sim, Lexicon::builtin(), ControllerConfig::default())
        .await
        .unwrap()
}

async fn connect(handle: &ServiceHandle) -> Client {
    let (ws, _) = connect_async(format!("ws://{}/ws", handle.local_addr())).await.unwrap();
    ws
}

async fn send(ws: &mut Client, value: Value) {
    ws.send(Message::Text(value.to_string().into())).await.unwrap();
}

/// Next text message whose type is `kind`, skipping others.
async fn next_of(ws: &mut Client, kind: &str) -> Value {
    timeout(Duration::from_secs(5), async {
        loop {
            match ws.next().await.expect("stream ended").unwrap() {
                Message::Text(t) => {
                    let v: Value = serde_json::from_str(t.as_str()).unwrap();
                    if v["type"] == kind {
                        return v;
                    }
                }
                Message::Close(_) => panic!("closed while waiting for {kind}"),
                _ => {}
            }
        }
    })
    .await
    .unwrap_or_else(|_| panic!("no {kind} message"))
}

#[tokio::test]
async fn command_moves_the_drone() {
    let handle = start().await;
    let mut ws = connect(&handle).await;
    let first = next_of(&mut ws, "state").await;
    assert_eq!(first["x"], 0.0);

    send(&mut ws, json!({"type":"command","text":"go forward"})).await;
    let i = next_of(&mut ws, "interpretation").await;
    assert_eq!(i["action_class"], "go_forward");
    assert_eq!(i["matched_surface"], "go forward");
    assert_eq!(i["distance"], 0);
    assert_eq!(i["mode"], "fuzzy");
    assert_eq!(i["no_class"], false);
    assert!(i.get("exit").is_none());

    let mut last_x = 0.0;
    for _ in 0..3 {
        let s = next_of(&mut ws, "state").await;
        assert_eq!(s["active_action"], "go_forward");
        let x = s["x"].as_f64().unwrap();
        assert!(x > last_x, "{x} <= {last_x}");
        last_x = x;
    }
    let session = handle.shutdown().await.unwrap();
    assert_eq!(session.log.len(), 1);
    assert_eq!(session.final_state.active_action(), Some(ActionClass::GoForward));
}

#[tokio::test]
async fn state_stream_runs_at_ten_hertz_or_more() {
    let handle = start().await;
    let mut ws = connect(&handle).await;
    let a = next_of(&mut ws, "state").await["tick"].as_u64().unwrap();
    let t0 = std::time::Instant::now();
    let mut b = a;
    while t0.elapsed() < Duration::from_secs(1) {
        b = next_of(&mut ws, "state").await["tick"].as_u64().unwrap();
    }
    let hz = (b - a) as f64 / t0.elapsed().as_secs_f64();
    assert!(hz >= 10.0, "{hz:.1} Hz");
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn malformed_messages_keep_the_session() {
    let handle = start().await;
    let mut ws = connect(&handle).await;
    for bad in ["not json", r#"{"type":"fly"}"#, r#"{"type":"set_mode","mode":"loud"}"#] {
        ws.send(Message::Text(bad.into())).await.unwrap();
        let e = next_of(&mut ws, "error").await;
        assert!(e["message"].as_str().unwrap().contains("malformed"));
    }
    ws.send(Message::Binary(vec![1, 2, 3].into())).await.unwrap();
    next_of(&mut ws, "error").await;

    send(&mut ws, json!({"type":"command","text":"sube"})).await;
    assert_eq!(next_of(&mut ws, "interpretation").await["action_class"], "up");
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn mode_toggle_applies_to_later_commands() {
    let handle = start().await;
    let mut ws = connect(&handle).await;
    send(&mut ws, json!({"type":"set_mode","mode":"exact"})).await;
    send(&mut ws, json!({"type":"command","text":"go forwards"})).await;
    let i = next_of(&mut ws, "interpretation").await;
    assert_eq!(i["no_class"], true);
    assert_eq!(i["mode"], "exact");
    assert!(i["action_class"].is_null() && i["distance"].is_null());
    let s = next_of(&mut ws, "state").await;
    assert!(s["active_action"].is_null());
    assert_eq!(s["x"], 0.0);

    send(&mut ws, json!({"type":"set_mode","mode":"fuzzy"})).await;
    send(&mut ws, json!({"type":"command","text":"go forwards"})).await;
    let i = next_of(&mut ws, "interpretation").await;
    assert_eq!(
        (i["action_class"].clone(), i["distance"].clone()),
        (json!("go_forward"), json!(1))
    );
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn language_filter_and_reset() {
    let handle = start().await;
    let mut ws = connect(&handle).await;
    send(&mut ws, json!({"type":"set_language","language":"en"})).await;
    send(&mut ws, json!({"type":"command","text":"sube"})).await;
    let i = next_of(&mut ws, "interpretation").await;
    let surface = i["matched_surface"].as_str().unwrap().to_string();
    let lex = Lexicon::builtin();
    assert_eq!(lex.entries()[lex.position(&surface).unwrap()].language.code(), "en");

    send(&mut ws, json!({"type":"set_language","language":"both"})).await;
    send(&mut ws, json!({"type":"command","text":"up"})).await;
    next_of(&mut ws, "interpretation").await;
    tokio::time::sleep(Duration::from_millis(200)).await;
    send(&mut ws, json!({"type":"reset"})).await;
    loop {
        let s = next_of(&mut ws, "state").await;
        if s["z"] == 1.0 && s["active_action"].is_null() {
            break;
        }
    }
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn exit_closes_only_that_connection() {
    let handle = start().await;
    let mut quitter = connect(&handle).await;
    let mut watcher = connect(&handle).await;
    send(&mut quitter, json!({"type":"command","text":"salir"})).await;
    let i = next_of(&mut quitter, "interpretation").await;
    assert_eq!(i["exit"], true);
    assert_eq!(i["no_class"], false);
    let closed = timeout(Duration::from_secs(5), async {
        loop {
            match quitter.next().await {
                None | Some(Err(_)) | Some(Ok(Message::Close(_))) => break,
                _ => {}
            }
        }
    })
    .await;
    assert!(closed.is_ok());

    send(&mut watcher, json!({"type":"command","text":"alto"})).await;
    assert_eq!(next_of(&mut watcher, "interpretation").await["action_class"], "stop");
    let session = handle.shutdown().await.unwrap();
    assert_eq!(session.log.len(), 2);
    assert!(session.log[0].is_exit);
}

#[tokio::test]
async fn interpretations_reach_every_client_and_subscribers() {
    let handle = start().await;
    let mut outcomes = handle.subscribe();
    let mut a = connect(&handle).await;
    let mut b = connect(&handle).await;
    send(&mut a, json!({"type":"command","text":"gira a la derecha"})).await;
    assert_eq!(next_of(&mut b, "interpretation").await["action_class"], "turn_right");
    assert_eq!(next_of(&mut a, "interpretation").await["action_class"], "turn_right");
    let o = outcomes.recv().await.unwrap();
    assert_eq!(o.result.unwrap().action_class, ActionClass::TurnRight);
    assert_eq!(o.hypothesis.provider_id, "console");
    let s = next_of(&mut b, "state").await;
    assert_eq!(s["yaw"], 270.0);
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn lexicon_endpoint() {
    let handle = start().await;
    let url = format!("http://{}/lexicon", handle.local_addr());
    let body: Value = reqwest::get(&url).await.unwrap().json().await.unwrap();
    let entries = body["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 48);
    assert_eq!(entries[0]["surface"], Lexicon::builtin().entries()[0].surface.as_str());
    assert!(entries.iter().all(|e| e["language"] == "es" || e["language"] == "en"));
    assert!(body["version"].is_string());
    let back: Lexicon = serde_json::from_value(body).unwrap();
    assert_eq!(back, Lexicon::builtin());
    handle.shutdown().await.unwrap();
}

#[tokio::test]
async fn startup_errors() {
    let first = start().await;
    let sim = reset(SimConfig::default(), Pose::default()).unwrap();
    let taken = first.local_addr().to_string();
    let err = serve(&taken, sim, Lexicon::builtin(), ControllerConfig::default())
        .await
        .err()
        .unwrap();
    assert!(matches!(err, ServeError::Bind { .. }), "{err}");

    let slow = SimConfig {
        tick: 0.5,
        ..SimConfig::default()
    };
    let sim_slow = reset(slow, Pose::default()).unwrap();
    let err = serve("127.0.0.1:0", sim_slow, Lexicon::builtin(), ControllerConfig::default())
        .await
        .err()
        .unwrap();
    assert!(matches!(err, ServeError::TickTooSlow(_)));

    let mut config = ControllerConfig::with_mode(MatchMode::Exact);
    config.set_exit_surfaces(["stop"]).unwrap();
    let err = serve("127.0.0.1:0", sim, Lexicon::builtin(), config)
        .await
        .err()
        .unwrap();
    assert!(matches!(err, ServeError::Config(_)));
    first.shutdown().await.unwrap();
}
