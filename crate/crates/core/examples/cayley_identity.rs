// Resolvent identity for the Cayley transform checked on a random dense stable matrix.

use cpsg::rate_lab::cayley_identity_check;
use cpsg::spectral_models::SpectrumModel;
use cpsg::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_example() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = 5;
    let mut m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    // shift into the right half-plane
    for i in 0..d {
        m[(i, i)] += Complex64::new(4.0, 0.0);
    }
    let eta: Vec<f64> = (0..201).map(|i| -1e3 + 10.0 * i as f64).collect();
    cayley_identity_check(&SpectrumModel::matrix(m)?, &eta)
}

fn main() -> Result<()> {
    println!("max relative discrepancy {:.2e}", run_example()?);
    Ok(())
}
