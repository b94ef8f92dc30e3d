//! Build the path atlas for a few values of delta and check that paths only
//! share edges close to a common endpoint.

use switchlab::restrictions::{build_path_atlas, validate_disjointness, GridParams};

fn main() -> switchlab::Result<()> {
    for delta in [1, 2, 3] {
        let params = GridParams::geometry(16 * delta * delta * 3, delta)?;
        let report = validate_disjointness(&build_path_atlas(&params)?);
        println!(
            "delta={delta} n={}: {} paths, {} shared edges, {} violations -> {}",
            params.n,
            report.num_paths,
            report.shared.len(),
            report.violations().count(),
            if report.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
