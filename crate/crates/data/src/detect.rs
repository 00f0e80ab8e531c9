//! Combat detection over unit-event traces.
//!
//! A combat starts when a free military unit is aggressive (it holds a recent
//! attack order, or sits in a transport) or exposed (an aggressive enemy has it
//! in weapon range). Its participants are the free units within two range hops
//! of the trigger. It ends when one side is wiped out, when nobody has attacked
//! for the peace window, when an outside unit joins the fight, or at game end.
//!
//! Player 0 is army A and player 1 is army B.

use std::collections::{BTreeMap, BTreeSet};

use attrition_core::{Position, Uid, Unit, UnitCatalog};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{CombatRecord, EndReason};
use crate::trace::{EventKind, TraceEvent};

/// 6 seconds at 24 frames per second.
pub const DEFAULT_PEACE_WINDOW: u64 = 144;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub peace_window: u64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig { peace_window: DEFAULT_PEACE_WINDOW }
    }
}

#[derive(Debug, Clone)]
struct Tracked {
    player: u8,
    type_id: usize,
    pos: Position,
    hp: f64,
    shield: f64,
    alive: bool,
    /// Target and frame of the latest attack order.
    order: Option<(Uid, u64)>,
    in_transport: bool,
    combat: Option<usize>,
}

impl Tracked {
    fn snapshot(&self, uid: Uid) -> Unit {
        Unit { uid, type_id: self.type_id, hp: self.hp, shield: self.shield, energy: 0.0, pos: Some(self.pos) }
    }
}

#[derive(Debug)]
struct Open {
    t0: u64,
    members: BTreeSet<Uid>,
    a0: Vec<Unit>,
    b0: Vec<Unit>,
    kills: Vec<(u64, Uid)>,
    last_attack: u64,
    active: BTreeSet<Uid>,
    reinforced: bool,
}

struct Detector<'a> {
    catalog: &'a UnitCatalog,
    cfg: DetectConfig,
    units: BTreeMap<Uid, Tracked>,
    open: BTreeMap<usize, Open>,
    next_id: usize,
    done: Vec<CombatRecord>,
}

/// Scans a frame-ordered trace and returns the combats it contains, in order of closing.
pub fn detect_combats(events: &[TraceEvent], catalog: &UnitCatalog, cfg: &DetectConfig) -> Result<Vec<CombatRecord>> {
    let mut d = Detector { catalog, cfg: *cfg, units: BTreeMap::new(), open: BTreeMap::new(), next_id: 0, done: Vec::new() };
    let mut i = 0;
    let mut last_frame = 0;
    while i < events.len() {
        let frame = events[i].frame;
        if frame < last_frame {
            return Err(Error::Trace { index: i, frame, message: format!("frame goes backwards from {last_frame}") });
        }
        last_frame = frame;
        d.close_peaceful(frame);
        let mut j = i;
        while j < events.len() && events[j].frame == frame {
            d.apply(j, &events[j])?;
            j += 1;
        }
        d.end_of_frame(frame);
        i = j;
    }
    d.close_peaceful(last_frame);
    let ids: Vec<usize> = d.open.keys().copied().collect();
    for id in ids {
        d.close(id, last_frame, EndReason::GameEnd);
    }
    Ok(d.done)
}

impl Detector<'_> {
    fn err(index: usize, ev: &TraceEvent, message: impl Into<String>) -> Error {
        Error::Trace { index, frame: ev.frame, message: message.into() }
    }

    fn apply(&mut self, index: usize, ev: &TraceEvent) -> Result<()> {
        match ev.kind {
            EventKind::Spawn => {
                let (Some(player), Some(type_id), Some(pos)) = (ev.player, ev.type_id, ev.pos) else {
                    return Err(Self::err(index, ev, "spawn needs player, type_id and pos"));
                };
                if player > 1 {
                    return Err(Self::err(index, ev, format!("player {player} (only 0 and 1 are supported)")));
                }
                let Some(stats) = self.catalog.get(type_id) else {
                    return Err(Self::err(index, ev, format!("unknown type_id {type_id}")));
                };
                if self.units.contains_key(&ev.uid) {
                    return Err(Self::err(index, ev, format!("uid {} spawned twice", ev.uid)));
                }
                let t = Tracked {
                    player,
                    type_id,
                    pos,
                    hp: ev.hp.unwrap_or(stats.max_hp),
                    shield: ev.shield.unwrap_or(stats.max_shield),
                    alive: true,
                    order: None,
                    in_transport: false,
                    combat: None,
                };
                self.units.insert(ev.uid, t);
            }
            EventKind::Move => {
                let u = self.living_mut(index, ev, ev.uid)?;
                if let Some(p) = ev.pos {
                    u.pos = p;
                }
                if let Some(t) = ev.in_transport {
                    u.in_transport = t;
                }
            }
            EventKind::OrderAttack => {
                let target = ev.target_uid.ok_or_else(|| Self::err(index, ev, "order_attack needs target_uid"))?;
                self.known(index, ev, target)?;
                self.living_mut(index, ev, ev.uid)?.order = Some((target, ev.frame));
                self.note_attack(ev.uid, target, ev.frame);
            }
            EventKind::Damage => {
                let target = ev.target_uid.ok_or_else(|| Self::err(index, ev, "damage needs target_uid"))?;
                let amount = ev.amount.filter(|a| *a >= 0.0).ok_or_else(|| Self::err(index, ev, "damage needs amount >= 0"))?;
                self.known(index, ev, ev.uid)?;
                let v = self.living_mut(index, ev, target)?;
                let absorbed = amount.min(v.shield);
                v.shield -= absorbed;
                v.hp -= amount - absorbed;
                self.note_attack(ev.uid, target, ev.frame);
            }
            EventKind::Death => {
                let u = self.living_mut(index, ev, ev.uid)?;
                u.alive = false;
                if let Some(c) = u.combat {
                    self.open.get_mut(&c).expect("open combat").kills.push((ev.frame, ev.uid));
                }
            }
            EventKind::GameEnd => {
                let ids: Vec<usize> = self.open.keys().copied().collect();
                for id in ids {
                    self.close(id, ev.frame, EndReason::GameEnd);
                }
                self.units.clear();
            }
        }
        Ok(())
    }

    fn known(&self, index: usize, ev: &TraceEvent, uid: Uid) -> Result<()> {
        if self.units.contains_key(&uid) {
            Ok(())
        } else {
            Err(Self::err(index, ev, format!("unknown uid {uid}")))
        }
    }

    fn living_mut(&mut self, index: usize, ev: &TraceEvent, uid: Uid) -> Result<&mut Tracked> {
        match self.units.get_mut(&uid) {
            Some(u) if u.alive => Ok(u),
            Some(_) => Err(Self::err(index, ev, format!("uid {uid} is already dead"))),
            None => Err(Self::err(index, ev, format!("unknown uid {uid}"))),
        }
    }

    /// Records `attacker` acting against `target`: activity for their combats,
    /// and a reinforcement if the two are not in the same combat.
    fn note_attack(&mut self, attacker: Uid, target: Uid, frame: u64) {
        let ca = self.units[&attacker].combat;
        let ct = self.units[&target].combat;
        if let Some(c) = ca {
            let open = self.open.get_mut(&c).expect("open combat");
            open.active.insert(attacker);
            open.last_attack = frame;
        }
        if let Some(c) = ct {
            self.open.get_mut(&c).expect("open combat").last_attack = frame;
        }
        if ca != ct {
            for c in [ca, ct].into_iter().flatten() {
                self.open.get_mut(&c).expect("open combat").reinforced = true;
            }
        }
    }

    fn close_peaceful(&mut self, frame: u64) {
        let w = self.cfg.peace_window;
        let due: Vec<(usize, u64)> =
            self.open.iter().filter(|(_, o)| o.last_attack + w <= frame).map(|(&id, o)| (id, o.last_attack + w)).collect();
        for (id, tf) in due {
            self.close(id, tf, EndReason::Peace);
        }
    }

    fn end_of_frame(&mut self, frame: u64) {
        let ids: Vec<usize> = self.open.keys().copied().collect();
        for id in ids {
            let o = &self.open[&id];
            let side_dead = |p: u8| o.members.iter().filter(|m| self.units[m].player == p).all(|m| !self.units[m].alive);
            if side_dead(0) || side_dead(1) {
                self.close(id, frame, EndReason::ArmyDestroyed);
            } else if o.reinforced {
                self.close(id, frame, EndReason::Reinforcement);
            }
        }
        self.open_triggered(frame);
    }

    fn close(&mut self, id: usize, tf: u64, reason: EndReason) {
        let o = self.open.remove(&id).expect("open combat");
        let (mut af, mut bf) = (Vec::new(), Vec::new());
        for &m in &o.members {
            let u = self.units.get_mut(&m).expect("member");
            u.combat = None;
            if u.alive {
                if u.player == 0 { &mut af } else { &mut bf }.push(u.snapshot(m));
            }
        }
        let passive = o.members.iter().copied().filter(|m| !o.active.contains(m)).collect();
        self.done.push(CombatRecord { t0: o.t0, tf, reason, a0: o.a0, b0: o.b0, af, bf, kills: o.kills, passive });
    }

    fn is_military(&self, u: &Tracked) -> bool {
        let s = self.catalog.stats(u.type_id);
        s.hits_ground() || s.hits_air() || s.is_detector || s.is_transport
    }

    fn is_aggressive(&self, u: &Tracked, frame: u64) -> bool {
        u.in_transport
            || u.order.is_some_and(|(t, at)| at + self.cfg.peace_window > frame && self.units.get(&t).is_some_and(|t| t.alive))
    }

    fn reach(&self, u: &Tracked) -> f64 {
        let s = self.catalog.stats(u.type_id);
        let g = if s.hits_ground() { s.range_ground } else { 0.0 };
        let a = if s.hits_air() { s.range_air } else { 0.0 };
        g.max(a)
    }

    fn free(&self, uid: Uid) -> Option<&Tracked> {
        self.units.get(&uid).filter(|u| u.alive && u.combat.is_none() && u.hp + u.shield > 0.0)
    }

    fn exposed(&self, u: &Tracked, frame: u64) -> bool {
        self.units.values().any(|e| {
            e.alive
                && e.player != u.player
                && self.is_aggressive(e, frame)
                && self.catalog.can_hit(e.type_id, u.type_id)
                && e.pos.distance(&u.pos) <= self.catalog.stats(e.type_id).range_against(self.catalog.stats(u.type_id))
        })
    }

    /// Free units within range of `uid`, in either direction.
    fn in_range(&self, uid: Uid) -> Vec<Uid> {
        let u = &self.units[&uid];
        let ru = self.reach(u);
        self.units
            .keys()
            .copied()
            .filter(|&v| v != uid)
            .filter_map(|v| self.free(v).map(|t| (v, t)))
            .filter(|(_, t)| u.pos.distance(&t.pos) <= ru.max(self.reach(t)))
            .map(|(v, _)| v)
            .collect()
    }

    fn open_triggered(&mut self, frame: u64) {
        let candidates: Vec<Uid> = self.units.keys().copied().collect();
        for uid in candidates {
            let Some(u) = self.free(uid) else { continue };
            if !self.is_military(u) || !(self.is_aggressive(u, frame) || self.exposed(u, frame)) {
                continue;
            }
            let mut d: BTreeSet<Uid> = BTreeSet::from([uid]);
            for v in self.in_range(uid) {
                d.insert(v);
                d.extend(self.in_range(v));
            }
            let players: BTreeSet<u8> = d.iter().map(|m| self.units[m].player).collect();
            if players.len() < 2 {
                continue;
            }
            let id = self.next_id;
            self.next_id += 1;
            let (mut a0, mut b0) = (Vec::new(), Vec::new());
            let mut active = BTreeSet::new();
            for &m in &d {
                let t = &self.units[&m];
                if t.player == 0 { &mut a0 } else { &mut b0 }.push(t.snapshot(m));
                if self.is_aggressive(t, frame) {
                    active.insert(m);
                }
            }
            for &m in &d {
                self.units.get_mut(&m).expect("member").combat = Some(id);
            }
            self.open.insert(id, Open { t0: frame, members: d, a0, b0, kills: Vec::new(), last_attack: frame, active, reinforced: false });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MARINE: usize = 0;
    const ZEALOT: usize = 11;
    const BARRACKS: usize = 8;

    fn p(x: f64) -> Position {
        Position::new(x, 0.0)
    }

    fn detect(events: Vec<TraceEvent>) -> Vec<CombatRecord> {
        detect_combats(&events, &UnitCatalog::starcraft(), &DetectConfig::default()).unwrap()
    }

    #[test]
    fn empty_trace_has_no_combats() {
        assert!(detect(vec![]).is_empty());
    }

    #[test]
    fn duel_ends_with_army_destroyed() {
        let recs = detect(vec![
            TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)),
            TraceEvent::spawn(0, 2, 1, MARINE, p(100.0)),
            TraceEvent::order_attack(10, 1, 2),
            TraceEvent::order_attack(10, 2, 1),
            TraceEvent::damage(25, 1, 2, 40.0),
            TraceEvent::death(25, 2),
        ]);
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.reason, EndReason::ArmyDestroyed);
        assert_eq!((r.t0, r.tf), (10, 25));
        assert_eq!(r.kills, vec![(25, 2)]);
        assert_eq!(r.af.len(), 1);
        assert!(r.bf.is_empty());
        assert!(r.passive.is_empty());
    }

    #[test]
    fn attacks_stop_then_peace() {
        let recs = detect(vec![
            TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)),
            TraceEvent::spawn(0, 2, 1, MARINE, p(100.0)),
            TraceEvent::order_attack(10, 1, 2),
            TraceEvent::damage(20, 1, 2, 6.0),
            TraceEvent::move_to(30, 1, p(-500.0)),
            TraceEvent::move_to(400, 2, p(120.0)),
        ]);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].reason, EndReason::Peace);
        assert_eq!(recs[0].tf, 20 + 144);
        assert_eq!(recs[0].passive, vec![2]);
        assert_eq!(recs[0].bf[0].hp, 34.0);
    }

    #[test]
    fn newcomer_causes_reinforcement_and_new_combat() {
        let recs = detect(vec![
            TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)),
            TraceEvent::spawn(0, 2, 1, ZEALOT, p(100.0)),
            TraceEvent::spawn(0, 3, 0, MARINE, p(3000.0)),
            TraceEvent::order_attack(10, 1, 2),
            TraceEvent::damage(20, 1, 2, 6.0),
            TraceEvent::move_to(50, 3, p(10.0)),
            TraceEvent::order_attack(50, 3, 2),
            TraceEvent::damage(60, 1, 2, 6.0),
            TraceEvent::damage(60, 3, 2, 6.0),
        ]);
        assert_eq!(recs[0].reason, EndReason::Reinforcement);
        assert_eq!(recs[0].tf, 50);
        assert_eq!(recs[0].a0.iter().map(|u| u.uid).collect::<Vec<_>>(), vec![1]);
        let second = &recs[1];
        assert_eq!(second.t0, 50);
        assert_eq!(second.a0.iter().map(|u| u.uid).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(second.reason, EndReason::GameEnd);
    }

    #[test]
    fn exposed_unit_and_two_hop_closure() {
        // 1 (A) attacks 2 (B). 4 (B) sits near 2 but out of 1's range; 5 (A) is
        // near 4 only, three hops out, so stays outside.
        let recs = detect(vec![
            TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)),
            TraceEvent::spawn(0, 2, 1, MARINE, p(120.0)),
            TraceEvent::spawn(0, 4, 1, MARINE, p(240.0)),
            TraceEvent::spawn(0, 5, 0, MARINE, p(360.0)),
            TraceEvent::spawn(0, 6, 1, BARRACKS, p(5000.0)),
            TraceEvent::order_attack(10, 1, 2),
            TraceEvent::game_end(11),
        ]);
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.reason, EndReason::GameEnd);
        let mut uids: Vec<u32> = r.a0.iter().chain(&r.b0).map(|u| u.uid).collect();
        uids.sort();
        assert_eq!(uids, vec![1, 2, 4]);
    }

    #[test]
    fn one_sided_neighbourhood_opens_nothing() {
        let recs = detect(vec![
            TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)),
            TraceEvent::spawn(0, 2, 1, MARINE, p(5000.0)),
            TraceEvent::order_attack(10, 1, 2),
            TraceEvent::game_end(20),
        ]);
        assert!(recs.is_empty());
    }

    #[test]
    fn malformed_events_name_their_index() {
        let c = UnitCatalog::starcraft();
        let bad = vec![TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)), TraceEvent::order_attack(5, 1, 99)];
        match detect_combats(&bad, &c, &DetectConfig::default()) {
            Err(Error::Trace { index: 1, frame: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        let backwards = vec![TraceEvent::spawn(5, 1, 0, MARINE, p(0.0)), TraceEvent::spawn(4, 2, 1, MARINE, p(0.0))];
        assert!(matches!(detect_combats(&backwards, &c, &DetectConfig::default()), Err(Error::Trace { index: 1, .. })));
        let twice = vec![TraceEvent::spawn(0, 1, 0, MARINE, p(0.0)), TraceEvent::death(1, 1), TraceEvent::death(2, 1)];
        assert!(matches!(detect_combats(&twice, &c, &DetectConfig::default()), Err(Error::Trace { index: 2, .. })));
    }
}
