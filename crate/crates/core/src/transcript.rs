//! Ordered record of what happened in a run, written as JSON lines.
//!
//! Every line has the keys `tick`, `actor`, `kind`, `payload` in that order.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::world::WorldEvent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub actor: String,
    pub kind: String,
    pub payload: Value,
}

#[derive(Debug, Clone, Default)]
pub struct Transcript {
    events: Vec<Event>,
    disabled: bool,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    /// A transcript that drops everything; used by search.
    pub fn disabled() -> Self {
        Transcript {
            events: Vec::new(),
            disabled: true,
        }
    }

    pub fn is_recording(&self) -> bool {
        !self.disabled
    }

    pub fn push(&mut self, tick: u64, actor: impl Into<String>, kind: &str, payload: Value) {
        if self.disabled {
            return;
        }
        debug_assert!(self.events.last().is_none_or(|e| e.tick <= tick), "ticks go forward");
        self.events.push(Event {
            tick,
            actor: actor.into(),
            kind: kind.to_string(),
            payload,
        });
    }

    pub fn push_world(&mut self, event: WorldEvent) {
        match event {
            WorldEvent::Moved {
                tick,
                actor,
                objects,
                from,
                to,
            } => self.push(
                tick,
                actor.to_string(),
                "move",
                serde_json::json!({
                    "objects": objects.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                    "from": from.0,
                    "to": to.0,
                }),
            ),
            WorldEvent::Custody { tick, object, from, to } => self.push(
                tick,
                from.to_string(),
                "custody",
                serde_json::json!({ "object": object.to_string(), "to": to.to_string() }),
            ),
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> serde_json::Result<Vec<Event>> {
        text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
    }
}
