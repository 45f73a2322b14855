//! Operator norms `‖f(A)‖` and norm curves over parameter grids.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{eval_kernel, Anchor, KernelSpec, OmegaSequence};
use crate::linalg::{self, CMatrix};
use crate::spectral_models::SpectrumModel;

const PAR_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub norm: f64,
    /// 1-based index of the mode attaining the sup (diagonal models only).
    pub argmax_mode: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub param: f64,
    pub norm: f64,
    pub argmax_mode: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCurve {
    pub parameter_name: String,
    pub samples: Vec<NormSample>,
    pub model_digest: String,
    pub truncation: usize,
}

impl NormCurve {
    /// Some sample attains its sup at the last retained mode.
    pub fn truncation_hit(&self) -> bool {
        self.samples.iter().any(|s| s.argmax_mode == Some(self.truncation))
    }

    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.param).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm).collect()
    }

    /// CSV with a `#` comment header that gnuplot skips.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# parameter: {}", self.parameter_name);
        let _ = writeln!(out, "# model: {} truncation: {}", self.model_digest, self.truncation);
        if self.truncation_hit() {
            let _ = writeln!(out, "# warning: sup attained at the last retained mode");
        }
        let _ = writeln!(out, "# gnuplot: set datafile separator ','; plot 'file' using 1:2 with linespoints");
        out.push_str("param,norm,argmax_mode\n");
        for s in &self.samples {
            let mode = s.argmax_mode.map(|m| m.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{}", s.param, s.norm, mode);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

fn mode_value(spec: &KernelSpec, i: usize, l: Complex64) -> Result<(usize, f64)> {
    let v = eval_kernel(spec, l)?.norm();
    if v.is_nan() {
        return Err(Error::KernelDomain { kernel: spec.name(), at: l, detail: "non-finite value".into() });
    }
    Ok((i, v))
}

pub fn operator_norm(model: &SpectrumModel, spec: &KernelSpec) -> Result<OperatorNorm> {
    spec.validate()?;
    if let Some(ev) = model.diagonal_eigenvalues() {
        let (idx, norm) = if ev.len() >= PAR_THRESHOLD {
            ev.par_iter()
                .enumerate()
                .map(|(i, &l)| mode_value(spec, i, l))
                .try_reduce(|| (usize::MAX, f64::NEG_INFINITY), |a, b| Ok(better(a, b)))?
        } else {
            ev.iter().enumerate().try_fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, &l)| {
                Ok::<_, Error>(better(acc, mode_value(spec, i, l)?))
            })?
        };
        return Ok(OperatorNorm { norm, argmax_mode: Some(idx + 1) });
    }
    let m = model.matrix_ref().expect("non-diagonal model carries a matrix");
    let fm = assemble(m, spec)?;
    Ok(OperatorNorm { norm: linalg::largest_singular_value(&fm)?, argmax_mode: None })
}

/// `f(M)` as a dense matrix: spectral for normal `M`, rational assembly by
/// linear solves otherwise.
pub fn assemble(m: &CMatrix, spec: &KernelSpec) -> Result<CMatrix> {
    if linalg::is_normal(m) {
        return linalg::normal_function(m, |l| eval_kernel(spec, l));
    }
    rational_assembly(m, spec)
}

fn integer_exponent(name: &'static str, alpha: f64) -> Result<i64> {
    if alpha.fract() != 0.0 || alpha.abs() > 1e6 {
        return Err(Error::Unsupported(format!("{name} with non-integer exponent {alpha} needs a normal matrix")));
    }
    Ok(alpha as i64)
}

/// `(M + s)^{-p}` for integer `p` (negative `p` multiplies).
fn shifted_power(m: &CMatrix, s: Complex64, p: i64, x: CMatrix) -> Result<CMatrix> {
    let mut x = x;
    if p >= 0 {
        if p > 0 {
            let lu = linalg::shifted(m, s).lu();
            for _ in 0..p {
                x = lu.solve(&x).ok_or(Error::SingularShift { shift: s })?;
            }
        }
    } else {
        let a = linalg::shifted(m, s);
        for _ in 0..(-p) {
            x = &a * x;
        }
    }
    Ok(x)
}

/// Apply `∏_{k ≤ n} (M + c − ω_k)(M + c + ω_k)^{-1}` to `x`, factor `k = n`
/// first.
fn apply_cayley(m: &CMatrix, c: f64, omegas: &OmegaSequence, n: u64, x: CMatrix) -> Result<CMatrix> {
    omegas.check_length(n)?;
    let mut cache: HashMap<u64, (nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>, CMatrix)> = HashMap::new();
    let mut x = x;
    for k in (1..=n).rev() {
        let om = omegas.get(k as usize).expect("length checked");
        let entry = cache.entry(om.to_bits()).or_insert_with(|| {
            (linalg::shifted(m, Complex64::new(c + om, 0.0)).lu(), linalg::shifted(m, Complex64::new(c - om, 0.0)))
        });
        let y = entry.0.solve(&x).ok_or(Error::SingularShift { shift: Complex64::new(c + om, 0.0) })?;
        x = &entry.1 * y;
    }
    Ok(x)
}

fn rational_assembly(m: &CMatrix, spec: &KernelSpec) -> Result<CMatrix> {
    let n = m.nrows();
    let eye = linalg::identity(n);
    let c = |v: f64| Complex64::new(v, 0.0);
    match spec {
        KernelSpec::Constant { value } => Ok(eye * *value),
        KernelSpec::Resolvent { z } => shifted_power(m, *z, 1, eye),
        KernelSpec::FracResolvent { alpha, z } => shifted_power(m, *z, integer_exponent(spec.name(), *alpha)?, eye),
        KernelSpec::WKernel { alpha, c: cc } => shifted_power(m, c(*cc), integer_exponent(spec.name(), *alpha)?, eye),
        KernelSpec::VKernel { alpha, c: cc, d } => {
            let p = integer_exponent(spec.name(), *alpha)?;
            let x = shifted_power(m, c(*cc), p, eye)?;
            shifted_power(m, c(*d), -p, x)
        }
        KernelSpec::CayleyProduct { omegas, n: steps } => apply_cayley(m, 0.0, omegas, *steps, eye),
        KernelSpec::Fnaw { n: steps, alpha, c: cc, omegas, anchor } => {
            let p = integer_exponent(spec.name(), *alpha)?;
            let a = match anchor {
                Anchor::Min => omegas.omega_min(),
                Anchor::Max => omegas.omega_max(),
            };
            let x = shifted_power(m, c(cc + a), p, eye)?;
            apply_cayley(m, *cc, omegas, *steps, x)
        }
        KernelSpec::Product(parts) => parts.iter().try_fold(eye, |acc, p| Ok(acc * rational_assembly(m, p)?)),
        _ => Err(Error::Unsupported(format!("{} of a non-normal matrix", spec.name()))),
    }
}

/// `f(A)x`.
pub fn apply_kernel(model: &SpectrumModel, spec: &KernelSpec, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() != model.truncation() {
        return Err(invalid("x", format!("length {} does not match model size {}", x.len(), model.truncation())));
    }
    if let Some(ev) = model.diagonal_eigenvalues() {
        return ev
            .iter()
            .zip(x)
            .map(|(&l, &xi)| if xi == Complex64::new(0.0, 0.0) { Ok(xi) } else { Ok(eval_kernel(spec, l)? * xi) })
            .collect();
    }
    let fm = assemble(model.matrix_ref().expect("matrix model"), spec)?;
    let v = fm * nalgebra::DVector::from_column_slice(x);
    Ok(v.iter().copied().collect())
}

pub fn norm_curve(
    model: &SpectrumModel,
    family: impl Fn(f64) -> KernelSpec + Sync,
    grid: &[f64],
    parameter_name: &str,
) -> Result<NormCurve> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid", "must be strictly increasing"));
    }
    let samples = grid
        .par_iter()
        .map(|&p| {
            operator_norm(model, &family(p))
                .map(|r| NormSample { param: p, norm: r.norm, argmax_mode: r.argmax_mode })
                .map_err(|e| Error::GridPoint { param: p, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormCurve {
        parameter_name: parameter_name.to_string(),
        samples,
        model_digest: model.digest(),
        truncation: model.truncation(),
    })
}

/// `(∏_{k ≤ n} V_{ω_k}(A)) A^{-α}` assembled by LU solves.
pub fn matrix_cayley_apply(model: &SpectrumModel, omegas: &OmegaSequence, n: u64, alpha: f64) -> Result<CMatrix> {
    let m = model.to_matrix()?;
    let dim = m.nrows();
    let x = if alpha.fract() == 0.0 && alpha >= 0.0 {
        shifted_power(&m, Complex64::new(0.0, 0.0), alpha as i64, linalg::identity(dim))?
    } else if linalg::is_normal(&m) {
        linalg::normal_function(&m, |l| eval_kernel(&KernelSpec::frac_power(alpha), l))?
    } else {
        return Err(Error::Unsupported(format!(
            "alpha = {alpha} on a non-normal matrix; only nonnegative integers are allowed"
        )));
    };
    apply_cayley(&m, 0.0, omegas, n, x)
}

/// `‖A^b x‖ / (‖A^a x‖^{(g−b)/(g−a)} ‖A^g x‖^{(b−a)/(g−a)})` for `0 ≤ a < b < g`.
/// At most 1 on normal models.
pub fn moment_inequality_ratio(model: &SpectrumModel, a: f64, b: f64, g: f64, x: &[Complex64]) -> Result<f64> {
    if !(0.0 <= a && a < b && b < g) {
        return Err(invalid("exponents", format!("need 0 <= a < b < g, got ({a}, {b}, {g})")));
    }
    let norm_pow = |p: f64| -> Result<f64> {
        let v = apply_kernel(model, &KernelSpec::frac_power(-p), x)?;
        Ok(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    };
    let lhs = norm_pow(b)?;
    let rhs = norm_pow(a)?.powf((g - b) / (g - a)) * norm_pow(g)?.powf((b - a) / (g - a));
    if rhs == 0.0 {
        return if lhs == 0.0 { Ok(0.0) } else { Err(Error::ZeroDenominator) };
    }
    Ok(lhs / rhs)
}

/// `n_j = 2^lo, …, 2^hi`.
pub fn dyadic_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

/// `count` log-spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..count).map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_models::{build_spectrum, FamilySpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> OmegaSequence {
        OmegaSequence::constant(1.0).unwrap()
    }

    #[test]
    fn single_mode_annihilated() {
        let m = SpectrumModel::from_reals(&[1.0]).unwrap();
        let r = operator_norm(&m, &KernelSpec::cayley(one(), 5)).unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.argmax_mode, Some(1));
    }

    #[test]
    fn generator_semigroup_three_modes() {
        let m = build_spectrum(&FamilySpec::crandall_pazy(1.0, 3)).unwrap();
        let r = operator_norm(&m, &KernelSpec::GeneratorSemigroup { t: 1.0 }).unwrap();
        let oracle = [(2.0f64, 1.0f64), (3.0, 2.0), (4.0, 3.0)]
            .iter()
            .map(|&(a, b)| (a * a + b * b).sqrt() * (-a).exp())
            .fold(0.0, f64::max);
        assert!((r.norm - oracle).abs() < 1e-15);
        assert!((r.norm - 0.30262).abs() < 1e-5);
        assert_eq!(r.argmax_mode, Some(1));
    }

    #[test]
    fn generator_semigroup_large_truncation() {
        let m = build_spectrum(&FamilySpec::crandall_pazy(1.0, 10_000)).unwrap();
        let r = operator_norm(&m, &KernelSpec::GeneratorSemigroup { t: 0.01 }).unwrap();
        let (mut best, mut arg) = (0.0, 0);
        for k in 1..=10_000 {
            let k = k as f64;
            let v = ((k + 1.0).powi(2) + k * k).sqrt() * (-(k + 1.0) * 0.01).exp();
            if v > best {
                best = v;
                arg = k as usize;
            }
        }
        assert!((r.norm - best).abs() <= 1e-12 * best);
        assert_eq!(r.argmax_mode, Some(arg));
        assert!((r.norm - 51.77).abs() < 0.01);
        assert!((99..=101).contains(&arg));
    }

    #[test]
    fn scalar_curve_and_empty_grid() {
        let m = SpectrumModel::from_reals(&[1.0]).unwrap();
        let curve = norm_curve(&m, |t| KernelSpec::Semigroup { t }, &[1.0, 2.0], "t").unwrap();
        assert!((curve.samples[0].norm - (-1f64).exp()).abs() < 1e-16);
        assert!((curve.samples[1].norm - (-2f64).exp()).abs() < 1e-16);
        let empty = norm_curve(&m, |t| KernelSpec::Semigroup { t }, &[], "t").unwrap();
        assert!(empty.samples.is_empty());
        assert!(norm_curve(&m, |t| KernelSpec::Semigroup { t }, &[2.0, 1.0], "t").is_err());
    }

    #[test]
    fn cayley_curve_is_monotone() {
        let m = build_spectrum(&FamilySpec::crandall_pazy(2.0, 2000)).unwrap();
        let curve =
            norm_curve(&m, |n| KernelSpec::cayley_decay(one(), n as u64, 1.0), &dyadic_grid(5, 12), "n").unwrap();
        for w in curve.samples.windows(2) {
            assert!(w[1].norm <= w[0].norm);
        }
        assert!(curve.samples.iter().all(|s| s.argmax_mode.is_some()));
    }

    #[test]
    fn grid_errors_are_tagged() {
        let m = SpectrumModel::from_reals(&[1.0]).unwrap();
        let e = norm_curve(&m, KernelSpec::resolvent, &[-1.0, 0.0], "z").unwrap_err();
        assert!(matches!(e, Error::GridPoint { param, .. } if param == -1.0));
    }

    #[test]
    fn csv_layout() {
        let m = SpectrumModel::from_reals(&[1.0, 2.0]).unwrap();
        let curve = norm_curve(&m, |t| KernelSpec::Semigroup { t }, &[1.0], "t").unwrap();
        let csv = curve.to_csv();
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "param,norm,argmax_mode");
        assert!(data[1].starts_with("1,") && data[1].ends_with(",1"));
    }

    #[test]
    fn matrix_cayley_examples() {
        let m = SpectrumModel::matrix(CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)])).unwrap();
        assert!(matrix_cayley_apply(&m, &one(), 1, 0.0).unwrap()[(0, 0)].norm() < 1e-16);

        let m = SpectrumModel::from_reals(&[1.0, 3.0]).unwrap();
        let r = matrix_cayley_apply(&m, &one(), 1, 0.0).unwrap();
        assert!(r[(0, 0)].norm() < 1e-16 && (r[(1, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(r[(0, 1)].norm() == 0.0 && r[(1, 0)].norm() == 0.0);

        // 2x2 Jordan block, written out by hand
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let model = SpectrumModel::matrix(a.clone()).unwrap();
        let got = matrix_cayley_apply(&model, &one(), 2, 1.0).unwrap();
        let i = CMatrix::identity(2, 2);
        let v = (&a - &i) * (&a + &i).try_inverse().unwrap();
        let oracle = &v * &v * a.try_inverse().unwrap();
        assert!((got - oracle).norm() < 1e-14);
        assert!(matrix_cayley_apply(&model, &one(), 2, 0.5).is_err());
    }

    #[test]
    fn singular_shift_reported() {
        let m = SpectrumModel::matrix(CMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)])).unwrap();
        assert!(matches!(matrix_cayley_apply(&m, &one(), 1, 0.0), Err(Error::SingularShift { .. })));
    }

    #[test]
    fn diagonal_and_matrix_routes_agree() {
        let d = build_spectrum(&FamilySpec::crandall_pazy(1.5, 40)).unwrap();
        let mat = SpectrumModel::matrix(d.to_matrix().unwrap()).unwrap();
        let specs = [
            KernelSpec::cayley_decay(OmegaSequence::cyclic(vec![0.5, 2.0]).unwrap(), 17, 1.0),
            KernelSpec::Semigroup { t: 0.3 },
            KernelSpec::Fta { t: 4.0, alpha: 0.5 },
            KernelSpec::resolvent(1.0),
        ];
        for s in &specs {
            let a = operator_norm(&d, s).unwrap().norm;
            let b = operator_norm(&mat, s).unwrap().norm;
            assert!((a - b).abs() <= 1e-10 * a, "{}: {a} vs {b}", s.name());
        }
        let direct = matrix_cayley_apply(&mat, &one(), 9, 2.0).unwrap();
        let spectral = operator_norm(&d, &KernelSpec::cayley_decay(one(), 9, 2.0)).unwrap().norm;
        let svd = linalg::largest_singular_value(&direct).unwrap();
        assert!((svd - spectral).abs() <= 1e-10 * spectral);
    }

    #[test]
    fn non_normal_rational_route() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let model = SpectrumModel::matrix(a.clone()).unwrap();
        let r = operator_norm(&model, &KernelSpec::resolvent(1.0)).unwrap().norm;
        let inv = (&a + CMatrix::identity(2, 2)).try_inverse().unwrap();
        assert!((r - linalg::largest_singular_value(&inv).unwrap()).abs() < 1e-14);
        assert!(operator_norm(&model, &KernelSpec::Semigroup { t: 1.0 }).is_err());
    }

    #[test]
    fn moment_inequality() {
        let model = build_spectrum(&FamilySpec::crandall_pazy(2.0, 64)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: Vec<Complex64> =
                (0..64).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let a = rng.random_range(0.0..1.0);
            let b = a + rng.random_range(0.01..1.0);
            let g = b + rng.random_range(0.01..1.0);
            let r = moment_inequality_ratio(&model, a, b, g, &x).unwrap();
            assert!(r <= 1.0 + 1e-12, "{r}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn submultiplicative(t in 0.01f64..5.0, n in 1u64..200, alpha in 0.0f64..2.0, gamma in 1.0f64..3.0) {
            let model = build_spectrum(&FamilySpec::crandall_pazy(gamma, 300)).unwrap();
            let f = KernelSpec::cayley(one(), n);
            let g = KernelSpec::Product(vec![KernelSpec::Semigroup { t }, KernelSpec::frac_power(alpha)]);
            let fg = KernelSpec::Product(vec![f.clone(), g.clone()]);
            let lhs = operator_norm(&model, &fg).unwrap().norm;
            let rhs = operator_norm(&model, &f).unwrap().norm * operator_norm(&model, &g).unwrap().norm;
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }
}
