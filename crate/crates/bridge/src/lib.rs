//! Live service mode: runs one teleoperated scenario and exposes it over a
//! socket. Clients steer the VRU with input commands and receive a state
//! snapshot every tick. See `PROTOCOL.md` for the wire format.

mod mailbox;
pub mod protocol;
mod server;
mod transport;

pub use mailbox::{Mailbox, TickInput};
pub use protocol::{
    ClientMessage, InputCommand, ScenarioRef, ServerMessage, StateSnapshot, MAX_MESSAGE_BYTES, PROTOCOL_VERSION,
};
pub use server::{session_log_path, Pacing, ServeOptions, Server, ServerHandle};

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sim(#[from] cpsim::Error),
    #[error("websocket handshake failed: {0}")]
    Handshake(String),
    #[error("{0} thread panicked")]
    Panicked(&'static str),
}
