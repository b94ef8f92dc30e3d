//! Play the sampling game for one run of the random-path algorithm on a
//! family of DNFs over the 48 x 48 torus, and print the transcript as JSON.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use switchlab::canonical::IndependentFamily;
use switchlab::game::{run_algorithm_a_tilde, GameState, Strategy, Tilde, Transcript};
use switchlab::lab::{path_edges_around, random_dnf};
use switchlab::restrictions::{GridParams, GridSampler};
use switchlab::treeops::GoodTreeContext;

fn main() -> switchlab::Result<()> {
    let sampler = GridSampler::new(GridParams::new(48, 2)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pool = path_edges_around(&sampler, 0);
    let dnfs = (0..4).map(|_| random_dnf(&pool, 4, 2, &mut rng)).collect::<switchlab::Result<Vec<_>>>()?;
    let view = IndependentFamily { dnfs, ctx: GoodTreeContext::torus(sampler.grid(), usize::MAX) };

    let mut game = GameState::new(&sampler, Strategy::II);
    let y: Vec<bool> = (0..6).map(|_| rng.random()).collect();
    let (out, record) = run_algorithm_a_tilde(&view, Tilde::Grid { game: &mut game }, &y, 1, &mut rng)?;
    eprintln!(
        "|pi|={} after {} iterations, {} sampler steps, residual within cap: {}",
        out.pi_len(),
        out.iterations,
        game.steps().len(),
        record.residual_within_bound()
    );
    let transcript = Transcript::new(out, record, &game);
    println!("{}", serde_json::to_string_pretty(&transcript).expect("transcript serializes"));
    Ok(())
}
