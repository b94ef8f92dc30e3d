use serde::Serialize;

use crate::boolcore::VarId;
use crate::error::{Error, Result};

use super::params::{CenterId, GridParams};

/// One connecting path, listed from the top (or left) center `a` to the
/// bottom (or right) center `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtlasPath {
    pub a: CenterId,
    pub b: CenterId,
    pub vertical: bool,
    pub edges: Vec<VarId>,
}

impl AtlasPath {
    /// Edges between position `pos` and the nearer endpoint, with that
    /// endpoint; `None` when both endpoints are equally far.
    pub fn nearest_endpoint(&self, pos: usize) -> Option<(CenterId, usize)> {
        let to_a = pos;
        let to_b = self.edges.len() - 1 - pos;
        match to_a.cmp(&to_b) {
            std::cmp::Ordering::Less => Some((self.a, to_a)),
            std::cmp::Ordering::Greater => Some((self.b, to_b)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn other_end(&self, c: CenterId) -> CenterId {
        if c == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Every path between a center and a center of an adjacent subgrid, with a
/// reverse index from edges to the paths through them.
#[derive(Clone, Debug)]
pub struct PathAtlas {
    params: GridParams,
    paths: Vec<AtlasPath>,
    by_edge: Vec<Vec<(u32, u32)>>,
}

struct Walker {
    n: usize,
    pos: (usize, usize),
    edges: Vec<VarId>,
}

impl Walker {
    fn edge(&self, i: usize, j: usize, d: usize) -> VarId {
        VarId((2 * ((i % self.n) * self.n + (j % self.n)) + d) as u32)
    }

    fn right(&mut self, k: usize) {
        for _ in 0..k {
            let (i, j) = self.pos;
            self.edges.push(self.edge(i, j, 0));
            self.pos = (i, (j + 1) % self.n);
        }
    }

    fn left(&mut self, k: usize) {
        for _ in 0..k {
            let (i, j) = self.pos;
            let j2 = (j + self.n - 1) % self.n;
            self.edges.push(self.edge(i, j2, 0));
            self.pos = (i, j2);
        }
    }

    fn down(&mut self, k: usize) {
        for _ in 0..k {
            let (i, j) = self.pos;
            self.edges.push(self.edge(i, j, 1));
            self.pos = ((i + 1) % self.n, j);
        }
    }

    fn up(&mut self, k: usize) {
        for _ in 0..k {
            let (i, j) = self.pos;
            let i2 = (i + self.n - 1) % self.n;
            self.edges.push(self.edge(i2, j, 1));
            self.pos = (i2, j);
        }
    }

    fn horizontal(&mut self, d: isize) {
        if d >= 0 {
            self.right(d as usize)
        } else {
            self.left(d.unsigned_abs())
        }
    }

    fn vertical(&mut self, d: isize) {
        if d >= 0 {
            self.down(d as usize)
        } else {
            self.up(d.unsigned_abs())
        }
    }
}

/// Routes the path from center `i` of `subgrid` to center `j` of the
/// subgrid below (`vertical`) or to the right. The path leaves `i` sideways
/// by `j + 1` steps, runs to corridor line `lane = i·Δ + j`, crosses to the
/// line `i + 1` steps before center `j`, and enters `j` from the side. The
/// horizontal case is the transpose of the vertical one.
fn route(params: &GridParams, subgrid: usize, vertical: bool, i: usize, j: usize, lane: usize) -> AtlasPath {
    let d = params.delta;
    let t = params.t();
    let (oi, oj) = (params.center_offset(i) as isize, params.center_offset(j) as isize);
    let lane = (params.corridor_offset() + lane) as isize;
    let (i_, j_) = (i as isize, j as isize);
    let a = CenterId { subgrid, k: i };
    let start = params.center_pos(a);
    let mut w = Walker { n: params.n, pos: start, edges: Vec::new() };
    let (row, col) = params.subgrid_origin(subgrid);
    let m = params.m();
    let b_sub = if vertical {
        params.subgrid_at(row / t + 1, col / t)
    } else {
        params.subgrid_at(row / t, col / t + 1)
    };
    let cross = (oj - i_ - 1) - (oi + j_ + 1);
    let into_b = t as isize + oj - lane;
    if vertical {
        w.right(j + 1);
        w.down((lane - oi) as usize);
        w.horizontal(cross);
        w.down(into_b as usize);
        w.right(i + 1);
    } else {
        w.down(j + 1);
        w.right((lane - oi) as usize);
        w.vertical(cross);
        w.right(into_b as usize);
        w.down(i + 1);
    }
    let b = CenterId { subgrid: b_sub, k: j };
    debug_assert_eq!(w.pos, params.center_pos(b), "route must end at the far center (m = {m}, Δ = {d})");
    AtlasPath { a, b, vertical, edges: w.edges }
}

/// Builds every path of the atlas, subgrid-major, vertical before
/// horizontal, then by center pair.
pub fn build_path_atlas(params: &GridParams) -> Result<PathAtlas> {
    let d = params.delta;
    let mut paths = Vec::with_capacity(params.num_subgrids() * 2 * d * d);
    for s in 0..params.num_subgrids() {
        for vertical in [true, false] {
            for i in 0..d {
                for j in 0..d {
                    let p = route(params, s, vertical, i, j, i * d + j);
                    if params.center_pos(p.b) != end_of(params, &p) {
                        return Err(Error::BadGridParams("path does not end at its center".into()));
                    }
                    paths.push(p);
                }
            }
        }
    }
    PathAtlas::from_paths(*params, paths)
}

fn end_of(params: &GridParams, p: &AtlasPath) -> (usize, usize) {
    let n = params.n;
    let (mut i, mut j) = params.center_pos(p.a);
    for e in &p.edges {
        let v = e.index() / 2;
        let (ei, ej) = (v / n, v % n);
        let other = if e.index() % 2 == 0 { (ei, (ej + 1) % n) } else { ((ei + 1) % n, ej) };
        if (i, j) == (ei, ej) {
            (i, j) = other;
        } else {
            (i, j) = (ei, ej);
        }
    }
    (i, j)
}

impl PathAtlas {
    /// An atlas over explicitly given paths.
    pub fn from_paths(params: GridParams, paths: Vec<AtlasPath>) -> Result<Self> {
        let ne = 2 * params.n * params.n;
        let mut by_edge = vec![Vec::new(); ne];
        for (pi, p) in paths.iter().enumerate() {
            for (pos, e) in p.edges.iter().enumerate() {
                if e.index() >= ne {
                    return Err(Error::VarOutOfRange(*e, ne));
                }
                by_edge[e.index()].push((pi as u32, pos as u32));
            }
        }
        Ok(PathAtlas { params, paths, by_edge })
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn paths(&self) -> &[AtlasPath] {
        &self.paths
    }

    pub fn path(&self, idx: usize) -> &AtlasPath {
        &self.paths[idx]
    }

    /// `(path index, position)` for every path through `e`.
    pub fn paths_through(&self, e: VarId) -> &[(u32, u32)] {
        self.by_edge.get(e.index()).map_or(&[], |v| v.as_slice())
    }

    /// Index of the path joining center `i` of `subgrid` to center `j` of
    /// its lower (`vertical`) or right neighbour.
    pub fn path_index(&self, subgrid: usize, vertical: bool, i: usize, j: usize) -> usize {
        let d = self.params.delta;
        ((subgrid * 2 + usize::from(!vertical)) * d + i) * d + j
    }

    /// The pair of adjacent subgrids a path joins, numbered like the new
    /// variable a chosen path of that pair becomes: `2·subgrid + vertical`.
    pub fn slot_of_path(&self, idx: usize) -> usize {
        let d2 = self.params.delta * self.params.delta;
        let subgrid = idx / (2 * d2);
        2 * subgrid + usize::from((idx / d2) % 2 == 0)
    }

    /// A copy with one path rerouted through a different corridor lane, for
    /// checking that [`validate_disjointness`] notices broken atlases.
    pub fn with_rerouted_path(&self, subgrid: usize, vertical: bool, i: usize, j: usize, lane: usize) -> Result<PathAtlas> {
        let d = self.params.delta;
        if subgrid >= self.params.num_subgrids() || i >= d || j >= d || lane >= d * d {
            return Err(Error::BadGridParams("no such path or lane".into()));
        }
        let mut paths = self.paths.clone();
        paths[self.path_index(subgrid, vertical, i, j)] = route(&self.params, subgrid, vertical, i, j, lane);
        PathAtlas::from_paths(self.params, paths)
    }

    /// Whether `e` lies on some path.
    pub fn on_any_path(&self, e: VarId) -> bool {
        !self.paths_through(e).is_empty()
    }
}

/// One edge used by two or more paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedEdge {
    pub edge: VarId,
    pub paths: Vec<usize>,
    /// Common nearest endpoint, if all paths agree on one.
    pub endpoint: Option<CenterId>,
    /// Largest distance from that endpoint over the paths.
    pub distance: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub delta: usize,
    pub num_paths: usize,
    pub shared: Vec<SharedEdge>,
    pub pass: bool,
}

impl DisjointnessReport {
    pub fn violations(&self) -> impl Iterator<Item = &SharedEdge> {
        self.shared.iter().filter(|s| !s.ok)
    }
}

/// Scans every edge: an edge on two or more paths must have the same
/// nearest endpoint on all of them, fewer than `Δ` edges away.
pub fn validate_disjointness(atlas: &PathAtlas) -> DisjointnessReport {
    let delta = atlas.params.delta;
    let mut shared = Vec::new();
    for (e, list) in atlas.by_edge.iter().enumerate() {
        if list.len() < 2 {
            continue;
        }
        let ends: Vec<Option<(CenterId, usize)>> =
            list.iter().map(|&(p, pos)| atlas.paths[p as usize].nearest_endpoint(pos as usize)).collect();
        let first = ends[0].map(|x| x.0);
        let agree = ends.iter().all(|x| x.map(|y| y.0) == first && x.is_some());
        let distance = ends.iter().map(|x| x.map_or(usize::MAX, |y| y.1)).max().unwrap_or(0);
        let ok = agree && distance < delta;
        shared.push(SharedEdge {
            edge: VarId(e as u32),
            paths: list.iter().map(|x| x.0 as usize).collect(),
            endpoint: if agree { first } else { None },
            distance,
            ok,
        });
    }
    let pass = shared.iter().all(|s| s.ok);
    DisjointnessReport { delta, num_paths: atlas.paths.len(), shared, pass }
}

/// The center an edge is associated with, and the far endpoints `S_e` of
/// the paths through it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Association {
    pub center: CenterId,
    pub far: Vec<CenterId>,
}

/// `None` for edges on no path; otherwise the common nearest endpoint of
/// the paths through `e` and their other endpoints.
pub fn associated_center(atlas: &PathAtlas, e: VarId) -> Option<Association> {
    let list = atlas.paths_through(e);
    let &(p0, pos0) = list.first()?;
    let path0 = &atlas.paths[p0 as usize];
    let center = path0.nearest_endpoint(pos0 as usize).map_or(path0.a, |x| x.0);
    let mut far: Vec<CenterId> = list.iter().map(|&(p, _)| atlas.paths[p as usize].other_end(center)).collect();
    far.sort();
    far.dedup();
    Some(Association { center, far })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_end_at_far_center() {
        for d in 1..=4 {
            let p = GridParams::geometry(12 * d * d, d).unwrap();
            let atlas = build_path_atlas(&p).unwrap();
            assert_eq!(atlas.paths().len(), p.num_subgrids() * 2 * d * d);
            for path in atlas.paths() {
                assert_eq!(end_of(&p, path), p.center_pos(path.b));
            }
        }
    }

    #[test]
    fn lanes_biject_with_center_pairs() {
        let p = GridParams::new(108, 3).unwrap();
        let mut lanes: Vec<usize> = (0..3).flat_map(|i| (0..3).map(move |j| i * 3 + j)).collect();
        lanes.sort();
        lanes.dedup();
        assert_eq!(lanes.len(), p.delta * p.delta);
        assert_eq!(p.t() / 4, p.delta * p.delta);
    }

    #[test]
    fn atlas_passes_for_small_deltas() {
        for d in [2, 3, 4] {
            let p = GridParams::new(4 * d * d * 3, d).unwrap();
            let report = validate_disjointness(&build_path_atlas(&p).unwrap());
            assert!(report.pass, "delta {d}: {:?}", report.violations().next());
            assert!(!report.shared.is_empty());
        }
    }

    #[test]
    fn shifted_lane_is_caught() {
        let p = GridParams::new(48, 2).unwrap();
        let atlas = build_path_atlas(&p).unwrap();
        // move the (1, 0) path one row up, onto the lane of (0, 1)
        let idx = atlas.path_index(4, true, 1, 0);
        let bad = atlas.with_rerouted_path(4, true, 1, 0, 1).unwrap();
        let report = validate_disjointness(&bad);
        assert!(!report.pass);
        let v = report.violations().next().unwrap();
        assert!(v.paths.contains(&idx));
    }

    #[test]
    fn endpoint_segments_are_short() {
        let p = GridParams::new(108, 3).unwrap();
        let atlas = build_path_atlas(&p).unwrap();
        for path in atlas.paths() {
            let (ai, aj) = p.center_pos(path.a);
            // the first j+1 edges stay in the center's row (or column)
            let first = path.edges[0].index() / 2;
            if path.vertical {
                assert_eq!(first / p.n, ai);
            } else {
                assert_eq!(first % p.n, aj);
            }
            assert!(path.edges.len() > 2 * p.delta);
        }
    }

    #[test]
    fn associations() {
        let p = GridParams::new(48, 2).unwrap();
        let atlas = build_path_atlas(&p).unwrap();
        assert_eq!(associated_center(&atlas, VarId(0)), None);
        let path = atlas.path(atlas.path_index(0, true, 1, 0));
        let mid = path.edges[path.edges.len() / 2];
        let assoc = associated_center(&atlas, mid).unwrap();
        assert_eq!(assoc.far.len(), 1);
        let first = associated_center(&atlas, path.edges[0]).unwrap();
        assert_eq!(first.center, path.a);
        assert_eq!(first.far.len(), p.delta);
    }

    #[test]
    fn slots_match_new_variables() {
        let p = GridParams::new(48, 2).unwrap();
        let atlas = build_path_atlas(&p).unwrap();
        let m = p.m();
        for a in 0..m {
            for b in 0..m {
                for vertical in [true, false] {
                    let idx = atlas.path_index(p.subgrid_at(a, b), vertical, 1, 0);
                    assert_eq!(atlas.slot_of_path(idx), 2 * (a * m + b) + usize::from(vertical));
                }
            }
        }
        for e in 0..2 * p.n * p.n {
            let through = atlas.paths_through(VarId(e as u32));
            let mut slots: Vec<usize> = through.iter().map(|&(q, _)| atlas.slot_of_path(q as usize)).collect();
            slots.sort();
            slots.dedup();
            assert!(slots.len() <= 1, "edge {e} joins two subgrid pairs");
        }
    }
}
