// Adaptive quadrature on semi-infinite and full lines, and sup search along a vertical line.

use cpsg::quadrature::{integrate_real_line, integrate_semi_infinite, sup_on_vertical_line, DecayHint, Tolerance};
use cpsg::Result;
use std::f64::consts::PI;

fn run_example() -> Result<[(f64, f64); 3]> {
    // ∫_0^∞ dx/(1+x²) = π/2
    let a = integrate_semi_infinite(|x| 1.0 / (1.0 + x * x), 1e-10)?;
    // ∫_ℝ e^{-x²} dx = √π
    let b = integrate_real_line(|x: f64| (-x * x).exp(), &[0.0], 1.0, Tolerance::relative(1e-10), 100_000)?;
    // sup_η |1/(1+iη-2i)| = 1, at η = 2
    let s = sup_on_vertical_line(|eta| 1.0 / (1.0 + (eta - 2.0).powi(2)).sqrt(), DecayHint::Rational, 1e-6)?;
    Ok([(a.value, PI / 2.0), (b.value, PI.sqrt()), (s, 1.0)])
}

fn main() -> Result<()> {
    for (got, want) in run_example()? {
        println!("{got:.12}  exact {want:.12}  err {:.1e}", (got - want).abs());
    }
    Ok(())
}
