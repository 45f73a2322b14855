// Scaled-norm witnesses showing the Crank-Nicolson rate cannot be improved,
// and the faster rate on a normal sectorial model.

use cpsg::rate_lab::{lower_bound_probe, normal_lower_bound_probe};
use cpsg::spectral_models::{build_spectrum, FamilySpec, SpectrumModel};
use cpsg::Result;
use num_complex::Complex64;

fn run_example() -> Result<[(f64, bool); 2]> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(1.0, 4000))?;
    let cp = lower_bound_probe(&model, 1.0, 60)?;

    let sector: Vec<Complex64> =
        (1..=300).map(|k| Complex64::from_polar(k as f64, 0.3 * (k % 7) as f64 / 7.0)).collect();
    let normal = normal_lower_bound_probe(&SpectrumModel::diagonal(sector)?, 1.0, 1.0, 14)?;
    Ok([(cp.witness, cp.is_stable(0.2)), (normal.witness, normal.is_stable(0.2))])
}

fn main() -> Result<()> {
    let [cp, normal] = run_example()?;
    println!("crandall-pazy witness {:.4} stable={}", cp.0, cp.1);
    println!("normal sector witness {:.4} stable={}", normal.0, normal.1);
    Ok(())
}
