//! Uniform restrictions and grid restrictions with their path atlas.

mod atlas;
mod grid;
mod params;

use rand::Rng;

use crate::boolcore::{Assign, Restriction, VarId};

pub use atlas::{
    associated_center, build_path_atlas, validate_disjointness, Association, AtlasPath, DisjointnessReport, PathAtlas,
    SharedEdge,
};
pub use grid::{
    apply_grid_restriction, sample_grid_restriction, GridAssign, GridRestriction, GridRestrictionDoc, GridSampler,
    ProjectionEntry, GRID_DOC_SCHEMA,
};
pub use params::{layout_centers, CenterId, GridParams};

/// Every variable independently a star with probability `p`, else a fair bit.
pub fn sample_uniform<R: Rng + ?Sized>(vars: impl IntoIterator<Item = VarId>, p: f64, rng: &mut R) -> Restriction {
    let p = p.clamp(0.0, 1.0);
    vars.into_iter()
        .map(|v| {
            let a = if rng.random_bool(p) { Assign::Star } else { Assign::bit(rng.random()) };
            (v, a)
        })
        .collect()
}
