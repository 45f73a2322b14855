// Pointwise values of the scalar kernels at a few spectral points.

use cpsg::kernels::{eval_kernel, eval_kernel_derivative, Anchor, KernelSpec, OmegaSequence};
use cpsg::Result;
use num_complex::Complex64;

fn run_example() -> Result<Vec<(String, Complex64, Complex64)>> {
    let z = Complex64::new(1.0, 2.0);
    let om = OmegaSequence::cyclic(vec![0.5, 1.0, 2.0])?;
    let kernels = vec![
        KernelSpec::resolvent(1.0),
        KernelSpec::cayley(om.clone(), 6),
        KernelSpec::inverse_semigroup(3.0),
        KernelSpec::Fnaw { n: 6, alpha: 0.5, c: 1.0, omegas: om, anchor: Anchor::Min },
        KernelSpec::Fta { t: 4.0, alpha: 1.0 },
    ];
    let mut rows = Vec::new();
    for k in &kernels {
        let d = if k.has_derivative() { eval_kernel_derivative(k, z)? } else { Complex64::new(f64::NAN, 0.0) };
        rows.push((k.name().to_string(), eval_kernel(k, z)?, d));
    }
    Ok(rows)
}

fn main() -> Result<()> {
    for (name, v, d) in run_example()? {
        println!("{name:<18} f={v:.6} f'={d:.6}");
    }
    Ok(())
}
