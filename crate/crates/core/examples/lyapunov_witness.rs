// Lyapunov forms for a stable diagonal model and the sampled ratio they control.

use cpsg::integral_conditions::{lyapunov_forms, pz_witness};
use cpsg::kernels::OmegaSequence;
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;

fn run_example() -> Result<(f64, u64)> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 200))?;
    let forms = lyapunov_forms(&model, 1.0, 0.9, 1.0, 1.0)?;
    println!("xi_r(0.9) = {:.6}", forms.xi_r);
    for k in 0..3 {
        println!("mode {}: P={:.6} Q={:.6} R={:.6}", k + 1, forms.p_diag[k], forms.q_diag[k], forms.r_diag[k]);
    }
    let om = OmegaSequence::cyclic(vec![0.5, 2.0])?;
    let w = pz_witness(&model, &om, 300, 4096, 7)?;
    Ok((w.max_ratio, w.argmax_n))
}

fn main() -> Result<()> {
    let (ratio, n) = run_example()?;
    println!("largest sampled ratio {ratio:.4} at n = {n}");
    Ok(())
}
