// Operator norms of kernels on a diagonal model and a dense matrix, plus a norm curve as CSV.

use cpsg::kernels::KernelSpec;
use cpsg::norm_engine::{dyadic_grid, norm_curve, operator_norm};
use cpsg::spectral_models::{build_spectrum, FamilySpec, SpectrumModel};
use cpsg::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn run_example() -> Result<String> {
    let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 400))?;
    let r = operator_norm(&model, &KernelSpec::resolvent(0.5))?;
    println!("|(A+1/2)^-1| = {:.6} at mode {:?}", r.norm, r.argmax_mode);

    // non-normal 2x2: the resolvent norm exceeds 1/dist(-1, spectrum)
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 4.0, 0.0, 2.0].map(|v| Complex64::new(v, 0.0)));
    let dense = SpectrumModel::matrix(m)?;
    let r = operator_norm(&dense, &KernelSpec::resolvent(1.0))?;
    println!("|(B+1)^-1| = {:.6} vs 1/2", r.norm);

    let curve = norm_curve(&model, KernelSpec::inverse_semigroup, &dyadic_grid(0, 6), "t")?;
    Ok(curve.to_csv())
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
