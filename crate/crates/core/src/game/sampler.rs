use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolcore::{Assign, Restriction, VarId};
use crate::error::{Error, Result};
use crate::gridgraph::{bridge_splits, split, Charge, LiveGraph, TorusGrid};
use crate::restrictions::{associated_center, CenterId, GridParams, GridSampler, PathAtlas};

/// How the sampler settles a submitted edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Resolve the associated center, then the far subgrid; exact.
    I,
    /// A star as soon as the associated center is chosen and some far
    /// endpoint is still possible; stars only become more likely.
    II,
}

impl Strategy {
    /// Residual stars one star may bring along.
    pub fn residual_cap(self) -> usize {
        match self {
            Strategy::I => 6,
            Strategy::II => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarDecision {
    Star,
    Value(bool),
}

/// Why an edge is a star: decided with at least `Δ/2` open centers
/// (good), with fewer (bad), or set as a side effect of choosing centers
/// (residual).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StarTag {
    Good,
    Bad,
    Residual,
}

/// One round of the game, as logged for transcripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub edge: VarId,
    pub decision: StarDecision,
    pub tag: Option<StarTag>,
    pub center: Option<CenterId>,
    /// Centers of the associated subgrid not yet eliminated, before the step.
    pub open_centers: Option<usize>,
    /// Subgrid pairs whose path became live as a side effect.
    pub residual_slots: Vec<usize>,
    pub forced: Vec<(VarId, bool)>,
}

/// The sampler's side of the game: a partial restriction of the big torus
/// plus, per subgrid, the chosen center or the eliminated ones.
#[derive(Clone, Debug)]
pub struct GameState {
    params: GridParams,
    atlas: Arc<PathAtlas>,
    grid: TorusGrid,
    strategy: Strategy,
    chosen: Vec<Option<usize>>,
    eliminated: Vec<Vec<bool>>,
    elim_edges: Vec<Vec<VarId>>,
    values: Vec<Option<Assign>>,
    tags: Vec<Option<StarTag>>,
    slot_star: Vec<bool>,
    graph: LiveGraph,
    charge: Charge,
    steps: Vec<StepRecord>,
    /// Side-effect stars not yet removed from the unset graph.
    pending: Vec<VarId>,
    /// Side-effect stars on the submitted edge's own subgrid pair, tagged
    /// once the edge itself is decided; with whether the pair was new.
    own_path: Option<(usize, bool, Vec<VarId>)>,
}

impl GameState {
    pub fn new(sampler: &GridSampler, strategy: Strategy) -> Self {
        let p = *sampler.params();
        let grid = sampler.grid().clone();
        let ne = grid.graph().num_edges();
        GameState {
            params: p,
            atlas: Arc::clone(sampler.atlas()),
            graph: grid.full(),
            charge: grid.standard_charge(),
            grid,
            strategy,
            chosen: vec![None; p.num_subgrids()],
            eliminated: vec![vec![false; p.delta]; p.num_subgrids()],
            elim_edges: vec![Vec::new(); p.num_subgrids()],
            values: vec![None; ne],
            tags: vec![None; ne],
            slot_star: vec![false; 2 * p.num_subgrids()],
            steps: Vec::new(),
            pending: Vec::new(),
            own_path: None,
        }
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn value(&self, e: VarId) -> Option<Assign> {
        self.values[e.index()]
    }

    pub fn tag(&self, e: VarId) -> Option<StarTag> {
        self.tags[e.index()]
    }

    pub fn chosen(&self) -> &[Option<usize>] {
        &self.chosen
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Centers of `subgrid` not yet eliminated.
    pub fn open_centers(&self, subgrid: usize) -> usize {
        self.eliminated[subgrid].iter().filter(|&&x| !x).count()
    }

    /// Edges whose rounds eliminated centers of `subgrid`.
    pub fn eliminating_edges(&self, subgrid: usize) -> &[VarId] {
        &self.elim_edges[subgrid]
    }

    /// The subgrid pair of the paths through `e`, if any.
    pub fn slot_of(&self, e: VarId) -> Option<usize> {
        self.atlas.paths_through(e).first().map(|&(p, _)| self.atlas.slot_of_path(p as usize))
    }

    /// The partial restriction `ρ̃` set so far.
    pub fn partial(&self) -> Restriction {
        self.values.iter().enumerate().filter_map(|(e, a)| a.map(|a| (VarId(e as u32), a))).collect()
    }

    /// Unset edges in `G_n − supp(ρ̃)`.
    pub fn live_graph(&self) -> &LiveGraph {
        &self.graph
    }

    fn open(&self, subgrid: usize, k: usize) -> bool {
        !self.eliminated[subgrid][k]
    }

    /// Plays one round on `e`. The edge must be unset and not a bridge of
    /// `G_n − supp(ρ̃)`.
    pub fn sampler_step<R: Rng + ?Sized>(&mut self, e: VarId, rng: &mut R) -> Result<StarDecision> {
        self.grid.graph().check_var(e)?;
        if self.values[e.index()].is_some() {
            return Err(Error::Contract(format!("{e:?} is already set")));
        }
        if split(&self.graph, e).is_some() {
            return Err(Error::Contract(format!("{e:?} is a bridge of the unset graph")));
        }
        let mut rec = StepRecord {
            edge: e,
            decision: StarDecision::Value(false),
            tag: None,
            center: None,
            open_centers: None,
            residual_slots: Vec::new(),
            forced: Vec::new(),
        };
        let own_slot = self.slot_of(e);
        let star = match associated_center(&self.atlas, e) {
            None => false,
            Some(assoc) => {
                let a = assoc.center;
                let r = self.open_centers(a.subgrid);
                rec.center = Some(a);
                rec.open_centers = Some(r);
                let a_chosen = match self.chosen[a.subgrid] {
                    Some(k) => k == a.k,
                    None if !self.open(a.subgrid, a.k) => false,
                    None => {
                        if rng.random_range(0..r) == 0 {
                            self.choose(a.subgrid, a.k, e, own_slot, &mut rec);
                            true
                        } else {
                            self.eliminate(a.subgrid, &[a.k], e, own_slot, &mut rec);
                            false
                        }
                    }
                };
                let star = a_chosen && self.far_side_star(&assoc.far, e, own_slot, &mut rec, rng);
                if star {
                    rec.tag = Some(if 2 * r >= self.params.delta { StarTag::Good } else { StarTag::Bad });
                }
                star
            }
        };
        let mut removed = vec![e];
        if star {
            self.values[e.index()] = Some(Assign::Star);
            self.tags[e.index()] = rec.tag;
            rec.decision = StarDecision::Star;
            if let Some(s) = own_slot {
                self.slot_star[s] = true;
            }
        } else {
            let b: bool = rng.random();
            self.set_bit(e, b);
            rec.decision = StarDecision::Value(b);
        }
        if let Some((slot, fresh, edges)) = self.own_path.take() {
            let tag = if star { rec.tag } else { Some(StarTag::Residual) };
            for f in edges {
                self.tags[f.index()] = tag;
            }
            if !star && fresh {
                rec.residual_slots.push(slot);
            }
        }
        removed.append(&mut self.pending);
        self.graph = self.graph.minus(removed)?;
        for s in bridge_splits(&self.graph) {
            let b = self.charge.parity_over(&s.small_side);
            self.set_bit(s.edge, b);
            rec.forced.push((s.edge, b));
        }
        self.graph = self.graph.minus(rec.forced.iter().map(|&(f, _)| f))?;
        if star && rec.residual_slots.len() > self.strategy.residual_cap() {
            return Err(Error::Invariant(format!(
                "{} residual paths after one star, cap {}",
                rec.residual_slots.len(),
                self.strategy.residual_cap()
            )));
        }
        let decision = rec.decision;
        self.steps.push(rec);
        Ok(decision)
    }

    fn far_side_star<R: Rng + ?Sized>(
        &mut self,
        far: &[CenterId],
        e: VarId,
        own_slot: Option<usize>,
        rec: &mut StepRecord,
        rng: &mut R,
    ) -> bool {
        let f = far[0].subgrid;
        let in_far = |k: usize| far.iter().any(|c| c.k == k);
        match self.strategy {
            Strategy::II => far.iter().any(|c| self.open(f, c.k)),
            Strategy::I => {
                let open: Vec<usize> = (0..self.params.delta).filter(|&k| self.open(f, k)).collect();
                let hits = open.iter().filter(|&&k| in_far(k)).count();
                let star = rng.random_range(0..open.len()) < hits;
                let drop: Vec<usize> = open.into_iter().filter(|&k| in_far(k) != star).collect();
                self.eliminate(f, &drop, e, own_slot, rec);
                star
            }
        }
    }

    fn set_bit(&mut self, e: VarId, b: bool) {
        self.values[e.index()] = Some(Assign::bit(b));
        if b {
            let (u, v) = self.grid.graph().ends(e);
            self.charge.toggle(u);
            self.charge.toggle(v);
        }
    }

    fn eliminate(&mut self, subgrid: usize, ks: &[usize], e: VarId, own_slot: Option<usize>, rec: &mut StepRecord) {
        if ks.is_empty() || self.chosen[subgrid].is_some() {
            return;
        }
        for &k in ks {
            self.eliminated[subgrid][k] = true;
        }
        self.elim_edges[subgrid].push(e);
        let open: Vec<usize> = (0..self.params.delta).filter(|&k| self.open(subgrid, k)).collect();
        if let [last] = open[..] {
            self.choose(subgrid, last, e, own_slot, rec);
        }
    }

    fn choose(&mut self, subgrid: usize, k: usize, e: VarId, own_slot: Option<usize>, rec: &mut StepRecord) {
        self.chosen[subgrid] = Some(k);
        for j in 0..self.params.delta {
            if j != k && !self.eliminated[subgrid][j] {
                self.eliminated[subgrid][j] = true;
            }
        }
        let (i, j) = self.params.center_pos(CenterId { subgrid, k });
        self.charge.toggle(self.grid.vertex(i, j));
        let m = self.params.m();
        let (a, b) = (subgrid / m, subgrid % m);
        let pairs = [
            (subgrid, self.params.subgrid_at(a + 1, b), true),
            (subgrid, self.params.subgrid_at(a, b + 1), false),
            (self.params.subgrid_at(a + m - 1, b), subgrid, true),
            (self.params.subgrid_at(a, b + m - 1), subgrid, false),
        ];
        for (upper, lower, vertical) in pairs {
            let (Some(ku), Some(kl)) = (self.chosen[upper], self.chosen[lower]) else { continue };
            let idx = self.atlas.path_index(upper, vertical, ku, kl);
            let slot = self.atlas.slot_of_path(idx);
            let fresh = !self.slot_star[slot];
            self.slot_star[slot] = true;
            let own = Some(slot) == own_slot;
            if !own && fresh {
                rec.residual_slots.push(slot);
            }
            let mut set = Vec::new();
            for &f in &self.atlas.path(idx).edges {
                if self.values[f.index()].is_none() && f != e {
                    self.values[f.index()] = Some(Assign::Star);
                    self.tags[f.index()] = Some(StarTag::Residual);
                    set.push(f);
                }
            }
            self.pending.extend_from_slice(&set);
            if own {
                self.own_path = Some((slot, fresh, set));
            }
        }
    }
}
