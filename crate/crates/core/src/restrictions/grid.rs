use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolcore::{Assign, Restriction, VarId};
use crate::error::{Error, Result};
use crate::gridgraph::{sample_uniform_solution, Charge, TorusGrid, TseitinInstance};

use super::atlas::{build_path_atlas, PathAtlas};
use super::params::{CenterId, GridParams};

/// What a grid restriction does to one original edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridAssign {
    Fixed(bool),
    /// The edge becomes `var` on the `m × m` grid, negated unless `positive`.
    Mapped { var: VarId, positive: bool },
}

/// Atlas and grids shared by every restriction sampled with one set of
/// parameters.
#[derive(Clone, Debug)]
pub struct GridSampler {
    params: GridParams,
    atlas: Arc<PathAtlas>,
    grid: TorusGrid,
    small: TorusGrid,
}

impl GridSampler {
    pub fn new(params: GridParams) -> Result<Self> {
        let params = GridParams::new(params.n, params.delta)?;
        let atlas = Arc::new(build_path_atlas(&params)?);
        Ok(GridSampler { params, atlas, grid: TorusGrid::with_side(params.n)?, small: TorusGrid::with_side(params.m())? })
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn atlas(&self) -> &Arc<PathAtlas> {
        &self.atlas
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GridRestriction> {
        let chosen: Vec<usize> = (0..self.params.num_subgrids()).map(|_| rng.random_range(0..self.params.delta)).collect();
        self.with_centers(chosen, rng)
    }

    /// Samples the edge values for a fixed choice of centers.
    pub fn with_centers<R: Rng + ?Sized>(&self, chosen: Vec<usize>, rng: &mut R) -> Result<GridRestriction> {
        let inst = self.aux_instance(&chosen)?;
        let values = sample_uniform_solution(&inst, rng)?;
        self.assemble(chosen, values)
    }

    /// Tseitin instance with the original charge lowered by one at every
    /// chosen center; even in total because the number of centers is odd.
    pub fn aux_instance(&self, chosen: &[usize]) -> Result<TseitinInstance> {
        if chosen.len() != self.params.num_subgrids() || chosen.iter().any(|&k| k >= self.params.delta) {
            return Err(Error::BadGridParams("one center index below Δ per subgrid".into()));
        }
        let mut charge = self.grid.standard_charge();
        for (s, &k) in chosen.iter().enumerate() {
            let (i, j) = self.params.center_pos(CenterId { subgrid: s, k });
            charge.toggle(self.grid.vertex(i, j));
        }
        TseitinInstance::new(self.grid.full(), charge)
    }

    fn assemble(&self, chosen: Vec<usize>, values: Vec<bool>) -> Result<GridRestriction> {
        let p = &self.params;
        let m = p.m();
        let ne = self.grid.graph().num_edges();
        let mut projection: Vec<Option<(u32, bool)>> = vec![None; ne];
        let mut chosen_paths = vec![usize::MAX; 2 * m * m];
        let mut representative = vec![VarId(0); 2 * m * m];
        for a in 0..m {
            for b in 0..m {
                let s = p.subgrid_at(a, b);
                for vertical in [true, false] {
                    let t = if vertical { p.subgrid_at(a + 1, b) } else { p.subgrid_at(a, b + 1) };
                    let idx = self.atlas.path_index(s, vertical, chosen[s], chosen[t]);
                    let path = self.atlas.path(idx);
                    let var = 2 * (a * m + b) + usize::from(vertical);
                    for &e in &path.edges {
                        if projection[e.index()].is_some() {
                            return Err(Error::Invariant(format!("{e:?} lies on two chosen paths")));
                        }
                        projection[e.index()] = Some((var as u32, !values[e.index()]));
                    }
                    chosen_paths[var] = idx;
                    representative[var] = if p.center_pos(path.a) < p.center_pos(path.b) {
                        path.edges[0]
                    } else {
                        *path.edges.last().expect("paths are nonempty")
                    };
                }
            }
        }
        Ok(GridRestriction {
            params: *p,
            atlas: Arc::clone(&self.atlas),
            small: self.small.clone(),
            chosen,
            values,
            projection,
            chosen_paths,
            representative,
        })
    }
}

/// A sampled full grid restriction.
#[derive(Clone, Debug)]
pub struct GridRestriction {
    params: GridParams,
    atlas: Arc<PathAtlas>,
    small: TorusGrid,
    chosen: Vec<usize>,
    values: Vec<bool>,
    projection: Vec<Option<(u32, bool)>>,
    chosen_paths: Vec<usize>,
    representative: Vec<VarId>,
}

/// Builds the atlas and samples one restriction. Use [`GridSampler`] to
/// share the atlas between samples.
pub fn sample_grid_restriction<R: Rng + ?Sized>(params: GridParams, rng: &mut R) -> Result<GridRestriction> {
    GridSampler::new(params)?.sample(rng)
}

pub fn apply_grid_restriction(rho: &GridRestriction, e: VarId) -> GridAssign {
    rho.apply(e)
}

impl GridRestriction {
    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn atlas(&self) -> &PathAtlas {
        &self.atlas
    }

    /// Chosen center index per subgrid.
    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn chosen_center(&self, subgrid: usize) -> CenterId {
        CenterId { subgrid, k: self.chosen[subgrid] }
    }

    pub fn apply(&self, e: VarId) -> GridAssign {
        match self.projection.get(e.index()).copied().flatten() {
            Some((var, positive)) => GridAssign::Mapped { var: VarId(var), positive },
            None => GridAssign::Fixed(self.values.get(e.index()).copied().unwrap_or(false)),
        }
    }

    pub fn is_live(&self, e: VarId) -> bool {
        matches!(self.projection.get(e.index()), Some(Some(_)))
    }

    /// The new variable a live edge maps to.
    pub fn new_var(&self, e: VarId) -> Option<VarId> {
        self.projection.get(e.index()).copied().flatten().map(|(v, _)| VarId(v))
    }

    /// Value of the auxiliary solution on `e`: final for fixed edges,
    /// suggested for live ones.
    pub fn aux_value(&self, e: VarId) -> bool {
        self.values[e.index()]
    }

    pub fn num_original_edges(&self) -> usize {
        self.values.len()
    }

    pub fn num_new_vars(&self) -> usize {
        self.chosen_paths.len()
    }

    pub fn live_edges(&self) -> impl Iterator<Item = VarId> + '_ {
        self.projection.iter().enumerate().filter(|(_, p)| p.is_some()).map(|(e, _)| VarId(e as u32))
    }

    /// The original edges of the path behind a new variable, in path order.
    pub fn path_of(&self, var: VarId) -> &[VarId] {
        &self.atlas.path(self.chosen_paths[var.index()]).edges
    }

    pub fn path_index_of(&self, var: VarId) -> usize {
        self.chosen_paths[var.index()]
    }

    /// The edge adjacent to the smaller chosen center of the path.
    pub fn representative(&self, var: VarId) -> VarId {
        self.representative[var.index()]
    }

    pub fn small_grid(&self) -> &TorusGrid {
        &self.small
    }

    /// Tseitin on the `m × m` torus with every charge 1.
    pub fn new_instance(&self) -> TseitinInstance {
        TseitinInstance::new(self.small.full(), Charge::ones(self.small.graph().num_vertices()))
            .expect("charge length matches the grid")
    }

    /// The restriction over original edges: fixed edges keep their values,
    /// live edges are stars.
    pub fn as_restriction(&self) -> Restriction {
        (0..self.values.len())
            .map(|e| {
                let a = if self.projection[e].is_some() { Assign::Star } else { Assign::bit(self.values[e]) };
                (VarId(e as u32), a)
            })
            .collect()
    }

    /// An assignment to every original edge from one to the new variables.
    pub fn back_substitute(&self, new_values: &[bool]) -> Vec<bool> {
        (0..self.values.len())
            .map(|e| match self.projection[e] {
                Some((v, positive)) => new_values[v as usize] == positive,
                None => self.values[e],
            })
            .collect()
    }

    pub fn to_doc(&self) -> GridRestrictionDoc {
        GridRestrictionDoc {
            schema: GRID_DOC_SCHEMA.into(),
            n: self.params.n,
            delta: self.params.delta,
            chosen: self.chosen.clone(),
            values: self
                .values
                .iter()
                .zip(&self.projection)
                .map(|(&b, p)| if p.is_some() { '*' } else if b { '1' } else { '0' })
                .collect(),
            projection: self
                .projection
                .iter()
                .enumerate()
                .filter_map(|(e, p)| {
                    p.map(|(var, positive)| ProjectionEntry {
                        edge: e as u32,
                        var,
                        positive,
                        suggested: self.values[e],
                    })
                })
                .collect(),
        }
    }

    /// Rebuilds a restriction from its document, checking that the
    /// projection table agrees with the chosen centers.
    pub fn from_doc(doc: &GridRestrictionDoc, sampler: &GridSampler) -> Result<Self> {
        if sampler.params != (GridParams { n: doc.n, delta: doc.delta }) {
            return Err(Error::Config("document parameters differ from the sampler's".into()));
        }
        let mut values: Vec<bool> = doc.values.chars().map(|c| c == '1').collect();
        if values.len() != 2 * doc.n * doc.n {
            return Err(Error::Config(format!("expected {} edge values", 2 * doc.n * doc.n)));
        }
        for p in &doc.projection {
            let slot = values.get_mut(p.edge as usize).ok_or(Error::VarOutOfRange(VarId(p.edge), 2 * doc.n * doc.n))?;
            *slot = p.suggested;
        }
        let rho = sampler.assemble(doc.chosen.clone(), values)?;
        if rho.to_doc() != *doc {
            return Err(Error::Config("projection table disagrees with the chosen centers".into()));
        }
        Ok(rho)
    }
}

pub const GRID_DOC_SCHEMA: &str = "switchlab.grid-restriction/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionEntry {
    pub edge: u32,
    pub var: u32,
    pub positive: bool,
    pub suggested: bool,
}

/// JSON form: chosen center per subgrid, one character per edge (`0`, `1`
/// or `*`), and the projection of every live edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRestrictionDoc {
    pub schema: String,
    pub n: usize,
    pub delta: usize,
    pub chosen: Vec<usize>,
    pub values: String,
    pub projection: Vec<ProjectionEntry>,
}
