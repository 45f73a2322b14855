// Weighted norms of the Cayley-product kernels against the F envelope, with the tail boundedness test.

use cpsg::kernels::OmegaSequence;
use cpsg::rate_lab::{fnaw_envelope_ratios, tail_bound};
use cpsg::Result;

fn run_example() -> Result<(Vec<(f64, f64)>, bool)> {
    let om = OmegaSequence::constant(1.0)?;
    let ratios = fnaw_envelope_ratios(1.0, 0.5, 1.0, &om, &[8, 16, 32, 64, 128], 1e-8)?;
    let tb = tail_bound(&ratios, 4, 0.05, 0.95)?;
    Ok((ratios.iter().map(|r| (r.param, r.ratio)).collect(), tb.bounded))
}

fn main() -> Result<()> {
    let (rows, bounded) = run_example()?;
    for (n, r) in rows {
        println!("n={n:<5} norm/F = {r:.5}");
    }
    println!("bounded tail: {bounded}");
    Ok(())
}
