//! Region-graph maps.
//!
//! A map file lists every region and chokepoint of the decomposition with its
//! center and, optionally, a polygon used for membership. Chokepoints are
//! ordinary nodes of the file; abstractions without chokepoints contract them
//! away, connecting the regions on either side directly.
//!
//! ```json
//! { "format_version": 1, "name": "ring6",
//!   "regions": [ { "region_id": 0, "kind": "region", "center": { "x": 0, "y": 0 } } ],
//!   "edges": [[0, 1]] }
//! ```

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use attrition_core::Position;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAP_FORMAT_VERSION: u32 = 1;

pub type RegionId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Region,
    Chokepoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub region_id: RegionId,
    pub kind: RegionKind,
    pub center: Position,
    /// Simple polygon, vertices in order. Without one, membership falls back to the nearest center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Position>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub format_version: u32,
    pub name: String,
    pub regions: Vec<RegionSpec>,
    pub edges: Vec<(RegionId, RegionId)>,
}

impl MapFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let map: MapFile = serde_json::from_str(text)?;
        map.validate()?;
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serializes")
    }

    /// Six regions in a ring, mirror-symmetric under `0<->5, 1<->4, 2<->3`.
    /// Regions 0 and 5 are the two starting bases.
    pub fn ring6() -> Self {
        Self::from_json(include_str!("../data/ring6.json")).expect("bundled map is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != MAP_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: self.format_version, expected: MAP_FORMAT_VERSION });
        }
        if self.regions.is_empty() {
            return Err(Error::Map("no regions".into()));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.region_id != i {
                return Err(Error::Map(format!("region ids must be dense and ordered; entry {i} has id {}", r.region_id)));
            }
            if !r.center.x.is_finite() || !r.center.y.is_finite() {
                return Err(Error::Map(format!("region {i} has a non-finite center")));
            }
            if let Some(p) = &r.polygon {
                if p.len() < 3 {
                    return Err(Error::Map(format!("region {i} polygon has fewer than 3 vertices")));
                }
            }
        }
        if !self.regions.iter().any(|r| r.kind == RegionKind::Region) {
            return Err(Error::Map("map has only chokepoints".into()));
        }
        let n = self.regions.len();
        for &(u, v) in &self.edges {
            if u >= n || v >= n {
                return Err(Error::Map(format!("edge ({u}, {v}) references an unknown region")));
            }
            if u == v {
                return Err(Error::Map(format!("self-loop on region {u}")));
            }
        }
        Ok(())
    }
}

/// The graph an abstraction plays on.
///
/// Region ids are those of the map file. Chokepoints are absent (inactive)
/// unless the graph was built with them.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGraph {
    pub name: String,
    pub regions: Vec<RegionSpec>,
    active: Vec<bool>,
    adjacency: Vec<Vec<RegionId>>,
    hops: Vec<Vec<u32>>,
}

impl RegionGraph {
    pub fn build(map: &MapFile, with_chokepoints: bool) -> Result<Self> {
        map.validate()?;
        let n = map.regions.len();
        let active: Vec<bool> = map.regions.iter().map(|r| with_chokepoints || r.kind == RegionKind::Region).collect();
        let mut raw = vec![BTreeSet::new(); n];
        for &(u, v) in &map.edges {
            raw[u].insert(v);
            raw[v].insert(u);
        }
        // Contract inactive nodes: an active node's neighbours are the active
        // nodes reachable through inactive ones only.
        let mut adjacency = vec![Vec::new(); n];
        for u in (0..n).filter(|&u| active[u]) {
            let mut seen = vec![false; n];
            seen[u] = true;
            let mut queue: VecDeque<RegionId> = raw[u].iter().copied().collect();
            for &v in &raw[u] {
                seen[v] = true;
            }
            let mut out = BTreeSet::new();
            while let Some(v) = queue.pop_front() {
                if active[v] {
                    out.insert(v);
                    continue;
                }
                for &w in &raw[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            adjacency[u] = out.into_iter().collect();
        }
        let mut g = RegionGraph { name: map.name.clone(), regions: map.regions.clone(), active, adjacency, hops: Vec::new() };
        g.hops = (0..n).map(|s| g.bfs(s)).collect();
        let first = g.active_regions().next().expect("validated: at least one region");
        if g.active_regions().any(|r| g.hops[first][r] == u32::MAX) {
            return Err(Error::Map(format!("map '{}' is not connected", map.name)));
        }
        Ok(g)
    }

    fn bfs(&self, source: RegionId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.regions.len()];
        if !self.active[source] {
            return dist;
        }
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn is_active(&self, r: RegionId) -> bool {
        self.active.get(r).copied().unwrap_or(false)
    }

    pub fn active_regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        (0..self.regions.len()).filter(|&r| self.active[r])
    }

    pub fn neighbors(&self, r: RegionId) -> &[RegionId] {
        &self.adjacency[r]
    }

    pub fn center(&self, r: RegionId) -> Position {
        self.regions[r].center
    }

    pub fn distance(&self, a: RegionId, b: RegionId) -> f64 {
        self.center(a).distance(&self.center(b))
    }

    /// Edge count of the shortest path, `u32::MAX` if unreachable.
    pub fn hops(&self, a: RegionId, b: RegionId) -> u32 {
        self.hops[a][b]
    }

    /// Active region containing `p`, and whether the answer is exact.
    ///
    /// Polygons are tried first (chokepoints before regions, so a chokepoint
    /// carved out of a region wins). Otherwise the nearest active center is
    /// returned; that is inexact only when the map defines polygons at all.
    pub fn locate(&self, p: Position) -> (RegionId, bool) {
        let has_polygons = self.regions.iter().any(|r| r.polygon.is_some());
        for kind in [RegionKind::Chokepoint, RegionKind::Region] {
            for r in self.active_regions() {
                let spec = &self.regions[r];
                if spec.kind == kind && spec.polygon.as_deref().is_some_and(|poly| contains(poly, p)) {
                    return (r, true);
                }
            }
        }
        // A point in an inactive chokepoint belongs to the nearest region.
        let nearest = self
            .active_regions()
            .min_by(|&a, &b| self.center(a).distance(&p).total_cmp(&self.center(b).distance(&p)))
            .expect("graph has an active region");
        let in_inactive = self
            .regions
            .iter()
            .enumerate()
            .any(|(i, r)| !self.active[i] && r.polygon.as_deref().is_some_and(|poly| contains(poly, p)));
        (nearest, !has_polygons || in_inactive)
    }
}

/// Even-odd rule point-in-polygon test.
fn contains(poly: &[Position], p: Position) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}
