//! Live teleoperation service. One actor task owns the simulator and
//! advances it on a fixed tick; websocket connections submit interpreted
//! commands through a queue and receive every state snapshot.
//!
//! Routes: `GET /ws` upgrades to the message protocol in [`protocol`];
//! `GET /lexicon` returns the loaded lexicon as JSON.

pub mod protocol;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::{Json, Router};
use futures_util::{SinkExt, StreamExt};
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::broadcast::error::RecvError;
use tokio::sync::{broadcast, mpsc, watch};
use tokio::task::JoinHandle;
use tokio::time::{interval_at, Instant, MissedTickBehavior};
use voxdrone_core::audio::Hypothesis;
use voxdrone_core::controller::{interpret, ControllerConfig, ControllerError, InterpretationOutcome};
use voxdrone_core::{DroneState, Lexicon};

pub use protocol::{ClientMessage, LanguageChoice, ServerMessage};

/// Longest tick that still gives a 10 Hz state stream.
pub const MAX_TICK_SECONDS: f64 = 0.1;

/// Provider id recorded on hypotheses typed into the console.
pub const CONSOLE_PROVIDER: &str = "console";

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {address}: {source}")]
    Bind {
        address: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ControllerError),
    #[error("tick of {0} s is longer than {MAX_TICK_SECONDS} s")]
    TickTooSlow(f64),
    #[error("service task failed: {0}")]
    Task(String),
}

/// What the service leaves behind after shutdown.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub log: Vec<InterpretationOutcome>,
    pub final_state: DroneState,
    pub ticks: u64,
}

enum SimCommand {
    Outcome(InterpretationOutcome),
    Reset,
}

struct Shared {
    lexicon: Lexicon,
    config: RwLock<ControllerConfig>,
    commands: mpsc::Sender<SimCommand>,
    events: broadcast::Sender<ServerMessage>,
    stop: watch::Receiver<bool>,
    next_utterance: AtomicU64,
}

pub struct ServiceHandle {
    local_addr: SocketAddr,
    stop: watch::Sender<bool>,
    outcomes: broadcast::Sender<InterpretationOutcome>,
    actor: JoinHandle<Session>,
    server: JoinHandle<std::io::Result<()>>,
}

impl ServiceHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    /// Every outcome the simulator actor records, in order.
    pub fn subscribe(&self) -> broadcast::Receiver<InterpretationOutcome> {
        self.outcomes.subscribe()
    }

    /// Closes all connections, stops the simulator and returns the session.
    pub async fn shutdown(self) -> Result<Session, ServeError> {
        let _ = self.stop.send(true);
        self.server
            .await
            .map_err(|e| ServeError::Task(e.to_string()))?
            .map_err(|e| ServeError::Task(e.to_string()))?;
        self.actor.await.map_err(|e| ServeError::Task(e.to_string()))
    }
}

/// Binds `address` and starts the service. Must be called inside a tokio
/// runtime.
pub async fn serve(
    address: &str,
    sim: DroneState,
    lexicon: Lexicon,
    config: ControllerConfig,
) -> Result<ServiceHandle, ServeError> {
    config.validate(&lexicon)?;
    let tick = sim.config().tick;
    if tick > MAX_TICK_SECONDS {
        return Err(ServeError::TickTooSlow(tick));
    }
    let bind_error = |source| ServeError::Bind {
        address: address.to_string(),
        source,
    };
    let listener = TcpListener::bind(address).await.map_err(bind_error)?;
    let local_addr = listener.local_addr().map_err(bind_error)?;

    let (commands, command_rx) = mpsc::channel(256);
    let (events, _) = broadcast::channel(1024);
    let (outcomes, _) = broadcast::channel(1024);
    let (stop, stop_rx) = watch::channel(false);

    let actor = tokio::spawn(run_actor(
        sim,
        command_rx,
        events.clone(),
        outcomes.clone(),
        stop_rx.clone(),
    ));
    let shared = Arc::new(Shared {
        lexicon,
        config: RwLock::new(config),
        commands,
        events,
        stop: stop_rx.clone(),
        next_utterance: AtomicU64::new(0),
    });
    let app = Router::new()
        .route("/ws", get(upgrade))
        .route("/lexicon", get(lexicon_route))
        .with_state(shared);
    let mut shutdown = stop_rx;
    let server = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                stopped(&mut shutdown).await;
            })
            .await
    });
    Ok(ServiceHandle {
        local_addr,
        stop,
        outcomes,
        actor,
        server,
    })
}

async fn stopped(stop: &mut watch::Receiver<bool>) {
    let _ = stop.wait_for(|s| *s).await;
}

async fn run_actor(
    start: DroneState,
    mut commands: mpsc::Receiver<SimCommand>,
    events: broadcast::Sender<ServerMessage>,
    outcomes: broadcast::Sender<InterpretationOutcome>,
    mut stop: watch::Receiver<bool>,
) -> Session {
    let period = Duration::from_secs_f64(start.config().tick);
    let mut ticker = interval_at(Instant::now() + period, period);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut sim = start;
    let mut ticks = 0u64;
    let mut log = Vec::new();
    loop {
        tokio::select! {
            _ = ticker.tick() => {
                sim = sim.tick();
                ticks += 1;
                let _ = events.send(ServerMessage::state(&sim, ticks));
            }
            command = commands.recv() => match command {
                Some(SimCommand::Outcome(outcome)) => {
                    if let (true, Some(r)) = (outcome.dispatched, &outcome.result) {
                        sim = sim.apply(r.action_class);
                    }
                    // the exit reply goes only to the connection that sent it
                    if !outcome.is_exit {
                        let _ = events.send(ServerMessage::interpretation(&outcome));
                    }
                    let _ = outcomes.send(outcome.clone());
                    log.push(outcome);
                }
                Some(SimCommand::Reset) => {
                    sim = start;
                    let _ = events.send(ServerMessage::state(&sim, ticks));
                }
                None => break,
            },
            _ = stopped(&mut stop) => break,
        }
    }
    Session {
        log,
        final_state: sim,
        ticks,
    }
}

async fn lexicon_route(State(shared): State<Arc<Shared>>) -> Json<Lexicon> {
    Json(shared.lexicon.clone())
}

async fn upgrade(ws: WebSocketUpgrade, State(shared): State<Arc<Shared>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| connection(socket, shared))
}

enum Reply {
    Nothing,
    Send(ServerMessage),
    Exit(ServerMessage),
    Close,
}

async fn connection(socket: WebSocket, shared: Arc<Shared>) {
    let (mut sink, mut stream) = socket.split();
    let mut events = shared.events.subscribe();
    let mut stop = shared.stop.clone();
    loop {
        tokio::select! {
            event = events.recv() => match event {
                Ok(message) => {
                    if sink.send(Message::Text(message.to_json().into())).await.is_err() {
                        break;
                    }
                }
                Err(RecvError::Lagged(_)) => continue,
                Err(RecvError::Closed) => break,
            },
            frame = stream.next() => {
                let Some(Ok(frame)) = frame else { break };
                match handle_frame(frame, &shared).await {
                    Reply::Nothing => {}
                    Reply::Send(message) => {
                        if sink.send(Message::Text(message.to_json().into())).await.is_err() {
                            break;
                        }
                    }
                    Reply::Exit(message) => {
                        let _ = sink.send(Message::Text(message.to_json().into())).await;
                        let _ = sink.send(Message::Close(None)).await;
                        break;
                    }
                    Reply::Close => break,
                }
            }
            _ = stopped(&mut stop) => {
                let _ = sink.send(Message::Close(None)).await;
                break;
            }
        }
    }
}

async fn handle_frame(frame: Message, shared: &Shared) -> Reply {
    let text = match frame {
        Message::Text(t) => t,
        Message::Binary(_) => return Reply::Send(ServerMessage::error("expected a text frame")),
        Message::Close(_) => return Reply::Close,
        Message::Ping(_) | Message::Pong(_) => return Reply::Nothing,
    };
    let message: ClientMessage = match serde_json::from_str(text.as_str()) {
        Ok(m) => m,
        Err(e) => return Reply::Send(ServerMessage::error(format!("malformed message: {e}"))),
    };
    match message {
        ClientMessage::Command { text } => {
            let config = shared.config.read().expect("config lock").clone();
            let id = shared.next_utterance.fetch_add(1, Ordering::Relaxed);
            let hypothesis = Hypothesis::new(text, CONSOLE_PROVIDER, format!("console-{id}"));
            let outcome = interpret(&hypothesis, &shared.lexicon, &config);
            let exit = outcome.is_exit.then(|| ServerMessage::interpretation(&outcome));
            if shared.commands.send(SimCommand::Outcome(outcome)).await.is_err() {
                return Reply::Send(ServerMessage::error("simulator is not running"));
            }
            match exit {
                Some(m) => Reply::Exit(m),
                None => Reply::Nothing,
            }
        }
        ClientMessage::SetMode { mode } => {
            shared.config.write().expect("config lock").mode = mode;
            Reply::Nothing
        }
        ClientMessage::SetLanguage { language } => {
            shared.config.write().expect("config lock").language_filter = language.filter();
            Reply::Nothing
        }
        ClientMessage::Reset => {
            if shared.commands.send(SimCommand::Reset).await.is_err() {
                return Reply::Send(ServerMessage::error("simulator is not running"));
            }
            Reply::Nothing
        }
    }
}
