use std::collections::HashMap;

use cpsim::harness::{ScenarioConfig, TeleopInput};

use crate::protocol::InputCommand;

/// What the network side hands to the simulation loop. Latest command wins;
/// a gesture is latched until the next tick consumes it.
#[derive(Debug, Default)]
pub struct Mailbox {
    latest: Option<InputCommand>,
    gesture: bool,
    last_seq: HashMap<u64, i64>,
    reset: Option<ScenarioConfig<f64>>,
}

/// Control for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickInput {
    pub input: TeleopInput<f64>,
    pub seq: Option<i64>,
}

impl Mailbox {
    /// Stores a command from `client`. Returns `false` for a repeated or
    /// older `client_seq`, which is dropped.
    pub fn post(&mut self, client: u64, cmd: InputCommand) -> bool {
        if self.last_seq.get(&client).is_some_and(|&s| cmd.client_seq <= s) {
            return false;
        }
        self.last_seq.insert(client, cmd.client_seq);
        self.gesture |= cmd.gesture;
        self.latest = Some(cmd);
        true
    }

    pub fn request_reset(&mut self, cfg: ScenarioConfig<f64>) {
        self.reset = Some(cfg);
    }

    pub fn take_reset(&mut self) -> Option<ScenarioConfig<f64>> {
        self.reset.take()
    }

    /// Drops a disconnected client's sequence state.
    pub fn forget(&mut self, client: u64) {
        self.last_seq.remove(&client);
    }

    /// Input for the next tick; clears the gesture latch.
    pub fn next_tick(&mut self) -> TickInput {
        let mut input = self.latest.map(|c| c.teleop()).unwrap_or_default();
        input.gesture = std::mem::take(&mut self.gesture);
        TickInput { input, seq: self.latest.map(|c| c.client_seq) }
    }
}
