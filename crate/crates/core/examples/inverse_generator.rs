// Decay of the semigroup generated by the inverse generator, with its lower-bound probe.

use cpsg::norm_engine::dyadic_grid;
use cpsg::rate_lab::{inverse_gen_experiment, inverse_lower_bound_probe, FitWindow};
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;

fn run_example() -> Result<(f64, f64, f64, f64)> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 4000))?;
    let e = inverse_gen_experiment(&model, 1.0, &dyadic_grid(5, 12), 0.07, FitWindow::full())?;
    let fit = e.result.fitted.map_or(f64::NAN, |f| f.exponent);
    let probe = inverse_lower_bound_probe(&model, 1.0, 200)?;
    Ok((e.result.predicted_exponent, fit, probe.witness, probe.constant.unwrap_or(0.0)))
}

fn main() -> Result<()> {
    let (pred, fit, witness, constant) = run_example()?;
    println!("exponent: predicted {pred:.4} fitted {fit:.4}");
    println!("scaled norm witness {witness:.4} >= closed-form constant {constant:.4}");
    Ok(())
}
