// Apply f(A) to a vector through the B- and D-calculus contour formulas and compare with the spectral values.

use cpsg::functional_calculus_eval::{bcalc_apply, dcalc_apply};
use cpsg::kernels::{Anchor, KernelSpec, OmegaSequence};
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;
use num_complex::Complex64;

fn run_example() -> Result<Vec<(String, f64)>> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 8))?;
    let x = vec![Complex64::new(1.0, 0.0); model.truncation()];
    let om = OmegaSequence::cyclic(vec![0.5, 2.0])?;
    let k = KernelSpec::Fnaw { n: 3, alpha: 1.0, c: 1.0, omegas: om, anchor: Anchor::Min };
    let mut rows = Vec::new();
    let b = bcalc_apply(&model, &k, &x, 1e-10)?;
    rows.push(("B-calculus".to_string(), b.max_componentwise_error));
    for s in [1.0, 2.0] {
        let d = dcalc_apply(&model, &k, s, &x, 1e-10)?;
        rows.push((format!("D-calculus s={s}"), d.max_componentwise_error));
    }
    Ok(rows)
}

fn main() -> Result<()> {
    for (name, err) in run_example()? {
        println!("{name:<18} max componentwise error {err:.2e}");
    }
    Ok(())
}
