// Crank-Nicolson decay rate on a Crandall-Pazy family, constant and alternating steps.

use cpsg::kernels::OmegaSequence;
use cpsg::norm_engine::dyadic_grid;
use cpsg::rate_lab::{cn_decay_experiment, FitWindow, Verdict};
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;

fn run_example() -> Result<Vec<(String, f64, f64, Verdict)>> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 2000))?;
    let grid = dyadic_grid(4, 11);
    let mut out = Vec::new();
    for (name, om) in
        [("constant", OmegaSequence::constant(1.0)?), ("alternating", OmegaSequence::cyclic(vec![0.5, 2.0])?)]
    {
        let e = cn_decay_experiment(&model, &om, 1.0, &grid, 0.05, FitWindow::full())?;
        let fitted = e.result.fitted.map_or(f64::NAN, |f| f.exponent);
        out.push((name.to_string(), e.result.predicted_exponent, fitted, e.result.verdict));
    }
    Ok(out)
}

fn main() -> Result<()> {
    for (name, pred, fit, v) in run_example()? {
        println!("{name:<12} predicted {pred:.4} fitted {fit:.4} {}", v.as_str());
    }
    Ok(())
}
