use std::fs::File;
use std::io::BufWriter;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use cpsim::harness::{scenario_from_catalog, LogWriter, RunLog, ScenarioConfig, Simulation};

use crate::mailbox::Mailbox;
use crate::protocol::{
    encode, parse_client_message, ClientMessage, ScenarioRef, ServerMessage, StateSnapshot, PROTOCOL_VERSION,
};
use crate::transport::{self, Incoming, Transport};
use crate::BridgeError;

/// How the loop advances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pacing {
    /// One tick per interval of wall-clock time.
    Interval(Duration),
    /// As fast as possible.
    Unpaced,
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub pacing: Pacing,
    /// Log of the first session; later sessions (after a reset) go to
    /// `<stem>.<n>.<ext>` next to it.
    pub log_path: Option<PathBuf>,
    /// Stop after this many ticks in total.
    pub max_ticks: Option<u64>,
}

impl ServeOptions {
    /// Wall-clock pacing at the scenario's frame period.
    pub fn live(cfg: &ScenarioConfig<f64>) -> Self {
        Self { pacing: Pacing::Interval(Duration::from_secs_f64(cfg.dt)), log_path: None, max_ticks: None }
    }
}

/// Path of session `n`'s log.
pub fn session_log_path(base: &Path, n: u32) -> PathBuf {
    if n == 0 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{n}"),
    };
    base.with_file_name(name)
}

#[derive(Default)]
struct Shared {
    mailbox: Mutex<Mailbox>,
    subscribers: Mutex<Vec<(u64, Sender<Arc<str>>)>>,
    shutdown: AtomicBool,
}

pub struct Server {
    listener: TcpListener,
    cfg: ScenarioConfig<f64>,
    opts: ServeOptions,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, cfg: ScenarioConfig<f64>, opts: ServeOptions) -> Result<Self, BridgeError> {
        cfg.validate()?;
        let listener = TcpListener::bind(addr)?;
        Ok(Self { listener, cfg, opts })
    }

    pub fn local_addr(&self) -> Result<SocketAddr, BridgeError> {
        Ok(self.listener.local_addr()?)
    }

    /// Starts the loop, fan-out and accept threads.
    pub fn spawn(self) -> Result<ServerHandle, BridgeError> {
        let addr = self.local_addr()?;
        let shared = Arc::new(Shared::default());
        let (snap_tx, snap_rx) = mpsc::channel();

        let fanout = {
            let shared = shared.clone();
            thread::Builder::new().name("bridge-fanout".into()).spawn(move || fan_out(&shared, snap_rx))?
        };
        let accept = {
            let shared = shared.clone();
            self.listener.set_nonblocking(true)?;
            let listener = self.listener;
            thread::Builder::new().name("bridge-accept".into()).spawn(move || accept_loop(&shared, listener))?
        };
        let sim = {
            let shared = shared.clone();
            let (cfg, opts) = (self.cfg, self.opts);
            thread::Builder::new().name("bridge-sim".into()).spawn(move || {
                let out = sim_loop(&shared, cfg, &opts, snap_tx);
                shared.shutdown.store(true, Ordering::SeqCst);
                out
            })?
        };
        log::info!("serving on {addr}");
        Ok(ServerHandle { addr, shared, sim: Some(sim), fanout: Some(fanout), accept: Some(accept) })
    }

    /// Serves until `max_ticks` is reached or the process ends.
    pub fn run(self) -> Result<Vec<RunLog<f64>>, BridgeError> {
        self.spawn()?.join()
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    sim: Option<JoinHandle<Result<Vec<RunLog<f64>>, BridgeError>>>,
    fanout: Option<JoinHandle<()>>,
    accept: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(&self) {
        self.shared.shutdown.store(true, Ordering::SeqCst);
    }

    pub fn is_running(&self) -> bool {
        !self.shared.shutdown.load(Ordering::SeqCst)
    }

    /// Waits for the loop to stop and returns one log per session.
    pub fn join(mut self) -> Result<Vec<RunLog<f64>>, BridgeError> {
        let logs = self.sim.take().expect("joined once").join().map_err(|_| BridgeError::Panicked("simulation"))?;
        self.shutdown();
        for (name, h) in [("fan-out", self.fanout.take()), ("accept", self.accept.take())] {
            if let Some(h) = h {
                h.join().map_err(|_| BridgeError::Panicked(name))?;
            }
        }
        logs
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.shutdown();
    }
}

struct Session {
    sim: Simulation<f64>,
    frames: Vec<cpsim::FrameRecord>,
    writer: Option<LogWriter<BufWriter<File>>>,
}

impl Session {
    fn start(cfg: ScenarioConfig<f64>, log: Option<PathBuf>) -> Result<Self, BridgeError> {
        let sim = Simulation::new_teleop(cfg.clone())?;
        let writer = match log {
            Some(path) => {
                let header = RunLog { meta: cfg.meta(), config: cfg, frames: vec![] }.header();
                Some(LogWriter::new(BufWriter::new(File::create(&path)?), &header)?)
            }
            None => None,
        };
        Ok(Self { sim, frames: Vec::new(), writer })
    }

    fn finish(self) -> Result<RunLog<f64>, BridgeError> {
        if let Some(w) = self.writer {
            w.finish()?;
        }
        let cfg = self.sim.config().clone();
        Ok(RunLog { meta: cfg.meta(), config: cfg, frames: self.frames })
    }
}

fn sim_loop(
    shared: &Shared,
    cfg: ScenarioConfig<f64>,
    opts: &ServeOptions,
    snapshots: Sender<Box<StateSnapshot>>,
) -> Result<Vec<RunLog<f64>>, BridgeError> {
    let log_for = |n: u32| opts.log_path.as_deref().map(|p| session_log_path(p, n));
    let mut logs = Vec::new();
    let mut session_no = 0;
    let mut session = Session::start(cfg, log_for(0))?;
    let mut tick: u64 = 0;
    let mut epoch = (Instant::now(), 0u64);

    while !shared.shutdown.load(Ordering::SeqCst) && opts.max_ticks.is_none_or(|m| tick < m) {
        let (input, reset) = {
            let mut mb = shared.mailbox.lock().expect("mailbox poisoned");
            let reset = mb.take_reset();
            (mb.next_tick(), reset)
        };
        if let Some(cfg) = reset {
            logs.push(std::mem::replace(&mut session, Session::start(cfg, log_for(session_no + 1))?).finish()?);
            session_no += 1;
            log::info!("session {session_no} started at tick {tick}");
        }

        let rec = session.sim.step(Some(input.input))?;
        if let Some(w) = session.writer.as_mut() {
            w.append(&rec)?;
            if matches!(opts.pacing, Pacing::Interval(_)) {
                w.flush()?;
            }
        }
        let snap = StateSnapshot::from_record(tick, session_no, &rec, session.sim.live_metrics(), input.seq);
        session.frames.push(rec);
        // The fan-out thread only exits after this sender is dropped.
        let _ = snapshots.send(Box::new(snap));
        tick += 1;

        if let Pacing::Interval(period) = opts.pacing {
            let due = epoch.0 + period.mul_f64((tick - epoch.1) as f64);
            let now = Instant::now();
            if due > now {
                thread::sleep(due - now);
            } else if now - due > period * 5 {
                // Far behind: re-anchor instead of bursting.
                epoch = (now, tick);
            }
        }
    }
    logs.push(session.finish()?);
    Ok(logs)
}

/// Serializes each snapshot once and hands the text to every subscriber.
fn fan_out(shared: &Shared, rx: Receiver<Box<StateSnapshot>>) {
    for snap in rx {
        let text: Arc<str> = encode(&ServerMessage::Snapshot(snap)).into();
        let mut subs = shared.subscribers.lock().expect("subscriber list poisoned");
        subs.retain(|(_, tx)| tx.send(text.clone()).is_ok());
    }
}

fn accept_loop(shared: &Arc<Shared>, listener: TcpListener) {
    let next_id = AtomicU64::new(1);
    let mut clients: Vec<JoinHandle<()>> = Vec::new();
    while !shared.shutdown.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                let id = next_id.fetch_add(1, Ordering::Relaxed);
                let shared = shared.clone();
                let spawned = thread::Builder::new().name(format!("bridge-client-{id}")).spawn(move || {
                    if let Err(e) = serve_client(&shared, stream, id) {
                        log::warn!("client {id} ({peer}): {e}");
                    }
                    shared.subscribers.lock().expect("subscriber list poisoned").retain(|(c, _)| *c != id);
                    shared.mailbox.lock().expect("mailbox poisoned").forget(id);
                });
                match spawned {
                    Ok(h) => clients.push(h),
                    Err(e) => log::warn!("could not start client thread: {e}"),
                }
                clients.retain(|h| !h.is_finished());
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(5)),
            Err(e) => {
                log::warn!("accept failed: {e}");
                thread::sleep(Duration::from_millis(50));
            }
        }
    }
    for h in clients {
        let _ = h.join();
    }
}

fn resolve(scenario: ScenarioRef) -> Result<ScenarioConfig<f64>, String> {
    let cfg = match scenario {
        ScenarioRef::Catalog(id) => scenario_from_catalog(id).map_err(|e| e.to_string())?,
        ScenarioRef::Config(cfg) => *cfg,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn serve_client(shared: &Shared, stream: TcpStream, id: u64) -> Result<(), BridgeError> {
    stream.set_nonblocking(false)?;
    let mut conn = transport::accept(stream)?;
    log::debug!("client {id} connected over {}", conn.kind());
    let (tx, rx) = mpsc::channel::<Arc<str>>();
    conn.send(&encode(&ServerMessage::Hello { schema_version: PROTOCOL_VERSION }))?;
    let mut subscribed = false;

    let error = |conn: &mut Box<dyn Transport>, reason: String| conn.send(&encode(&ServerMessage::Error { reason }));
    while !shared.shutdown.load(Ordering::SeqCst) {
        while let Ok(text) = rx.try_recv() {
            conn.send(&text)?;
        }
        let text = match conn.recv()? {
            Incoming::Idle => continue,
            Incoming::Closed => break,
            Incoming::Rejected(reason) => {
                error(&mut conn, reason)?;
                continue;
            }
            Incoming::Fatal(reason) => {
                let _ = error(&mut conn, reason);
                break;
            }
            Incoming::Text(t) => t,
        };
        match parse_client_message(&text) {
            Err(reason) => error(&mut conn, reason)?,
            Ok(ClientMessage::Input(cmd)) => {
                if !shared.mailbox.lock().expect("mailbox poisoned").post(id, cmd) {
                    log::debug!("client {id}: dropped repeated client_seq {}", cmd.client_seq);
                }
            }
            Ok(ClientMessage::Subscribe) => {
                if !subscribed {
                    shared.subscribers.lock().expect("subscriber list poisoned").push((id, tx.clone()));
                    subscribed = true;
                }
            }
            Ok(ClientMessage::Unsubscribe) => {
                shared.subscribers.lock().expect("subscriber list poisoned").retain(|(c, _)| *c != id);
                subscribed = false;
                while rx.try_recv().is_ok() {}
            }
            Ok(ClientMessage::Reset { scenario }) => match resolve(scenario) {
                Ok(cfg) => shared.mailbox.lock().expect("mailbox poisoned").request_reset(cfg),
                Err(reason) => error(&mut conn, format!("reset rejected: {reason}"))?,
            },
            Ok(ClientMessage::Hello { schema_version }) if schema_version != PROTOCOL_VERSION => error(
                &mut conn,
                format!("schema_version {schema_version} not supported, server speaks {PROTOCOL_VERSION}"),
            )?,
            Ok(ClientMessage::Hello { .. }) => {}
        }
    }
    Ok(())
}
