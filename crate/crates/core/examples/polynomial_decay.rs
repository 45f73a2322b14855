// Semigroup, inverse generator and Cayley decay on the polynomial model `k^{-β} + ik`.

use cpsg::norm_engine::dyadic_grid;
use cpsg::rate_lab::{poly_decay_experiment, PolyDecayGrids};
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;

fn run_example() -> Result<Vec<(String, f64, f64)>> {
    let beta = 1.0;
    let model = build_spectrum(&FamilySpec::polynomial_decay(beta, 1000))?;
    let grids =
        PolyDecayGrids { semigroup_t: dyadic_grid(0, 8), inverse_t: dyadic_grid(5, 14), cayley_n: dyadic_grid(5, 14) };
    let fits = poly_decay_experiment(&model, 1.0, beta, &grids, 0.1, 0.07)?;
    Ok(fits
        .iter()
        .map(|e| {
            let f = e.result.fitted.map_or(f64::NAN, |f| f.exponent);
            (e.result.scenario_id.clone(), e.result.predicted_exponent, f)
        })
        .collect())
}

fn main() -> Result<()> {
    for (id, pred, fit) in run_example()? {
        println!("{id:<15} predicted {pred:.4} fitted {fit:.4}");
    }
    Ok(())
}
