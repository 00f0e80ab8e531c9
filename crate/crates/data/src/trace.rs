//! Unit-event traces.
//!
//! A trace file is newline-delimited JSON. The first line is a header,
//! `{"format_version": 1, "catalog_ref": "starcraft-bw"}`, and every following
//! line is one [`TraceEvent`]. Events must be in non-decreasing frame order.
//!
//! | kind          | uid      | other fields                                       |
//! |---------------|----------|----------------------------------------------------|
//! | `spawn`       | new unit | `player`, `type_id`, `pos`; optional `hp`, `shield` |
//! | `move`        | mover    | `pos`; optional `in_transport`                     |
//! | `order_attack`| attacker | `target_uid`                                       |
//! | `damage`      | attacker | `target_uid`, `amount`                             |
//! | `death`       | victim   |                                                    |
//! | `game_end`    | ignored  |                                                    |

use std::io::{BufRead, Write};

use attrition_core::{Position, TypeId, Uid};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Spawn,
    Death,
    OrderAttack,
    Damage,
    Move,
    GameEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub frame: u64,
    pub kind: EventKind,
    #[serde(default)]
    pub uid: Uid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_id: Option<TypeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Position>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_uid: Option<Uid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shield: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_transport: Option<bool>,
}

impl TraceEvent {
    fn bare(frame: u64, kind: EventKind, uid: Uid) -> Self {
        TraceEvent {
            frame,
            kind,
            uid,
            player: None,
            type_id: None,
            pos: None,
            target_uid: None,
            amount: None,
            hp: None,
            shield: None,
            in_transport: None,
        }
    }

    pub fn spawn(frame: u64, uid: Uid, player: u8, type_id: TypeId, pos: Position) -> Self {
        TraceEvent { player: Some(player), type_id: Some(type_id), pos: Some(pos), ..Self::bare(frame, EventKind::Spawn, uid) }
    }

    pub fn with_health(mut self, hp: f64, shield: f64) -> Self {
        self.hp = Some(hp);
        self.shield = Some(shield);
        self
    }

    pub fn move_to(frame: u64, uid: Uid, pos: Position) -> Self {
        TraceEvent { pos: Some(pos), ..Self::bare(frame, EventKind::Move, uid) }
    }

    pub fn order_attack(frame: u64, uid: Uid, target: Uid) -> Self {
        TraceEvent { target_uid: Some(target), ..Self::bare(frame, EventKind::OrderAttack, uid) }
    }

    pub fn damage(frame: u64, attacker: Uid, target: Uid, amount: f64) -> Self {
        TraceEvent { target_uid: Some(target), amount: Some(amount), ..Self::bare(frame, EventKind::Damage, attacker) }
    }

    pub fn death(frame: u64, uid: Uid) -> Self {
        Self::bare(frame, EventKind::Death, uid)
    }

    pub fn game_end(frame: u64) -> Self {
        Self::bare(frame, EventKind::GameEnd, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format_version: u32,
    pub catalog_ref: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(catalog_ref: impl Into<String>, events: Vec<TraceEvent>) -> Self {
        Trace { header: TraceHeader { format_version: TRACE_FORMAT_VERSION, catalog_ref: catalog_ref.into() }, events }
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let header: TraceHeader = match lines.next() {
            Some((_, line)) => serde_json::from_str(&line?)?,
            None => return Err(Error::Invalid("empty trace file".into())),
        };
        if header.format_version != TRACE_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: header.format_version, expected: TRACE_FORMAT_VERSION });
        }
        let mut events = Vec::new();
        for (n, line) in lines {
            let line = line?;
            let ev: TraceEvent =
                serde_json::from_str(&line).map_err(|e| Error::Trace { index: events.len(), frame: 0, message: format!("line {}: {e}", n + 1) })?;
            events.push(ev);
        }
        Ok(Trace { header, events })
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        writeln!(w)?;
        for ev in &self.events {
            serde_json::to_writer(&mut w, ev)?;
            writeln!(w)?;
        }
        Ok(())
    }
}
