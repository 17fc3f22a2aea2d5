//! Framing for the two accepted transports: newline-delimited JSON over raw
//! TCP and WebSocket text messages. Both are polled with a short read
//! timeout so one thread can interleave reads and snapshot writes.

use std::io::{self, Read, Write};
use std::net::TcpStream;
use std::time::{Duration, Instant};

use tungstenite::protocol::WebSocketConfig;
use tungstenite::{Message, WebSocket};

use crate::protocol::MAX_MESSAGE_BYTES;
use crate::BridgeError;

pub(crate) const POLL: Duration = Duration::from_millis(2);
const SNIFF_TIMEOUT: Duration = Duration::from_millis(200);

pub(crate) enum Incoming {
    Text(String),
    /// Nothing arrived within the poll interval.
    Idle,
    /// Bad frame; the connection stays usable.
    Rejected(String),
    /// Bad frame after which the connection has to be dropped.
    Fatal(String),
    Closed,
}

pub(crate) trait Transport: Send {
    fn recv(&mut self) -> io::Result<Incoming>;
    fn send(&mut self, text: &str) -> io::Result<()>;
    fn kind(&self) -> &'static str;
}

fn timed_out(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}

/// Waits briefly for the first bytes; a WebSocket client always opens with an
/// HTTP `GET`, anything else (including silence) is treated as NDJSON.
pub(crate) fn accept(stream: TcpStream) -> Result<Box<dyn Transport>, BridgeError> {
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(POLL))?;
    let deadline = Instant::now() + SNIFF_TIMEOUT;
    let mut head = [0u8; 4];
    let mut seen = 0;
    while seen < head.len() && Instant::now() < deadline {
        match stream.peek(&mut head) {
            Ok(0) => break,
            Ok(n) => seen = n,
            Err(e) if timed_out(&e) => {}
            Err(e) => return Err(e.into()),
        }
        if seen > 0 && !b"GET ".starts_with(&head[..seen.min(4)]) {
            break;
        }
    }
    if seen == 4 && &head == b"GET " {
        stream.set_read_timeout(Some(Duration::from_secs(5)))?;
        let config = WebSocketConfig {
            max_message_size: Some(MAX_MESSAGE_BYTES),
            max_frame_size: Some(MAX_MESSAGE_BYTES),
            ..WebSocketConfig::default()
        };
        let ws =
            tungstenite::accept_with_config(stream, Some(config)).map_err(|e| BridgeError::Handshake(e.to_string()))?;
        ws.get_ref().set_read_timeout(Some(POLL))?;
        Ok(Box::new(WsTransport { ws }))
    } else {
        Ok(Box::new(LineTransport { stream, buf: Vec::new(), discarding: false }))
    }
}

struct LineTransport {
    stream: TcpStream,
    buf: Vec<u8>,
    /// Skipping the rest of an oversized line.
    discarding: bool,
}

impl LineTransport {
    fn take_line(&mut self) -> Option<Incoming> {
        loop {
            let nl = self.buf.iter().position(|&b| b == b'\n')?;
            let mut line: Vec<u8> = self.buf.drain(..=nl).collect();
            if std::mem::take(&mut self.discarding) {
                return Some(Incoming::Rejected(format!("message exceeds {MAX_MESSAGE_BYTES} bytes")));
            }
            line.pop();
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            if line.len() > MAX_MESSAGE_BYTES {
                return Some(Incoming::Rejected(format!("message exceeds {MAX_MESSAGE_BYTES} bytes")));
            }
            return Some(match String::from_utf8(line) {
                Ok(s) => Incoming::Text(s),
                Err(_) => Incoming::Rejected("message is not UTF-8".into()),
            });
        }
    }
}

impl Transport for LineTransport {
    fn recv(&mut self) -> io::Result<Incoming> {
        if let Some(m) = self.take_line() {
            return Ok(m);
        }
        let mut chunk = [0u8; 4096];
        match self.stream.read(&mut chunk) {
            Ok(0) => Ok(Incoming::Closed),
            Ok(n) => {
                self.buf.extend_from_slice(&chunk[..n]);
                if !self.buf.contains(&b'\n') && self.buf.len() > MAX_MESSAGE_BYTES {
                    self.buf.clear();
                    self.discarding = true;
                }
                Ok(self.take_line().unwrap_or(Incoming::Idle))
            }
            Err(e) if timed_out(&e) => Ok(Incoming::Idle),
            Err(e) if e.kind() == io::ErrorKind::ConnectionReset => Ok(Incoming::Closed),
            Err(e) => Err(e),
        }
    }

    fn send(&mut self, text: &str) -> io::Result<()> {
        let mut line = Vec::with_capacity(text.len() + 1);
        line.extend_from_slice(text.as_bytes());
        line.push(b'\n');
        self.stream.write_all(&line)
    }

    fn kind(&self) -> &'static str {
        "ndjson"
    }
}

struct WsTransport {
    ws: WebSocket<TcpStream>,
}

impl Transport for WsTransport {
    fn recv(&mut self) -> io::Result<Incoming> {
        use tungstenite::Error as E;
        match self.ws.read() {
            Ok(Message::Text(s)) => Ok(Incoming::Text(s)),
            Ok(Message::Binary(b)) => Ok(match String::from_utf8(b) {
                Ok(s) => Incoming::Text(s),
                Err(_) => Incoming::Rejected("binary message is not UTF-8".into()),
            }),
            Ok(Message::Close(_)) => Ok(Incoming::Closed),
            Ok(_) => Ok(Incoming::Idle),
            Err(E::Io(e)) if timed_out(&e) => {
                // Pending pongs and close replies go out here.
                match self.ws.flush() {
                    Ok(()) => Ok(Incoming::Idle),
                    Err(E::Io(e)) if timed_out(&e) => Ok(Incoming::Idle),
                    Err(E::ConnectionClosed | E::AlreadyClosed) => Ok(Incoming::Closed),
                    Err(e) => Err(io::Error::other(e)),
                }
            }
            Err(E::Capacity(e)) => Ok(Incoming::Fatal(format!("message exceeds {MAX_MESSAGE_BYTES} bytes: {e}"))),
            Err(E::ConnectionClosed | E::AlreadyClosed) => Ok(Incoming::Closed),
            Err(E::Protocol(e)) => Ok(Incoming::Fatal(e.to_string())),
            Err(e) => Err(io::Error::other(e)),
        }
    }

    fn send(&mut self, text: &str) -> io::Result<()> {
        self.ws.send(Message::Text(text.to_owned())).map_err(io::Error::other)
    }

    fn kind(&self) -> &'static str {
        "websocket"
    }
}
