use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of a grid restriction: the `n × n` torus is cut into `m × m`
/// subgrids of side `T = 4Δ²`. Each subgrid has a central square of side
/// `3Δ²` whose diagonal carries `Δ` centers spaced `3Δ` apart; the `Δ²` rows
/// (and columns) between neighbouring central squares form the corridors
/// the connecting paths run through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridParams {
    pub n: usize,
    pub delta: usize,
}

/// Identifies a center: the subgrid `(row, col)` in the `m × m` block grid
/// and the position `k < Δ` along that subgrid's diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CenterId {
    pub subgrid: usize,
    pub k: usize,
}

impl GridParams {
    /// Parameters for sampling restrictions: `T` must divide `n` and
    /// `m = n/T` must be odd and at least 3, so the projected instance is
    /// unsatisfiable.
    pub fn new(n: usize, delta: usize) -> Result<Self> {
        let p = GridParams::geometry(n, delta)?;
        if p.m() % 2 == 0 {
            return Err(Error::BadGridParams(format!("m = n/T = {} must be odd", p.m())));
        }
        Ok(p)
    }

    /// Parameters for path geometry only; `m` may be even.
    pub fn geometry(n: usize, delta: usize) -> Result<Self> {
        if delta < 1 {
            return Err(Error::BadGridParams("delta must be positive".into()));
        }
        let t = 4 * delta * delta;
        if n % t != 0 || n / t < 3 {
            return Err(Error::BadGridParams(format!("n = {n} must be a multiple of T = {t} with n/T ≥ 3")));
        }
        Ok(GridParams { n, delta })
    }

    /// Subgrid side `T = 4Δ²`.
    pub fn t(&self) -> usize {
        4 * self.delta * self.delta
    }

    /// Side of the projected grid.
    pub fn m(&self) -> usize {
        self.n / self.t()
    }

    pub fn num_subgrids(&self) -> usize {
        self.m() * self.m()
    }

    pub fn num_centers(&self) -> usize {
        self.num_subgrids() * self.delta
    }

    /// Side of the central square, `3Δ²`.
    pub fn central_side(&self) -> usize {
        3 * self.delta * self.delta
    }

    /// Offset of the central square inside its subgrid.
    pub fn central_offset(&self) -> usize {
        (self.t() - self.central_side()) / 2
    }

    /// First corridor row (or column) after a subgrid's central square,
    /// relative to the subgrid origin; the corridor has `Δ²` rows.
    pub fn corridor_offset(&self) -> usize {
        self.central_offset() + self.central_side()
    }

    /// Offset of center `k` along the diagonal, relative to the subgrid origin.
    pub fn center_offset(&self, k: usize) -> usize {
        self.central_offset() + (3 * self.delta) / 2 + 3 * self.delta * k
    }

    pub fn subgrid_origin(&self, subgrid: usize) -> (usize, usize) {
        let m = self.m();
        ((subgrid / m) * self.t(), (subgrid % m) * self.t())
    }

    pub fn subgrid_at(&self, row: usize, col: usize) -> usize {
        let m = self.m();
        (row % m) * m + (col % m)
    }

    /// Torus coordinates of a center.
    pub fn center_pos(&self, c: CenterId) -> (usize, usize) {
        let (r, col) = self.subgrid_origin(c.subgrid);
        let o = self.center_offset(c.k);
        (r + o, col + o)
    }
}

/// All centers, subgrid-major.
pub fn layout_centers(params: &GridParams) -> Vec<(CenterId, (usize, usize))> {
    (0..params.num_subgrids())
        .flat_map(|s| (0..params.delta).map(move |k| CenterId { subgrid: s, k }))
        .map(|c| (c, params.center_pos(c)))
        .collect()
}
