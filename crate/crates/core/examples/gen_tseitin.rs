//! Write the Tseitin contradiction of a small torus as DIMACS CNF.
//!
//! cargo run --example gen_tseitin -- 5

use switchlab::gridgraph::{build_grid, dimacs, TseitinInstance};

fn main() -> switchlab::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let grid = build_grid(n)?;
    let inst = TseitinInstance::new(grid.full(), grid.standard_charge())?;
    print!("{}", dimacs(&inst)?);
    Ok(())
}
