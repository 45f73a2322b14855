//! `f(A)x` through the half-plane integral representations, checked
//! against direct spectral application on diagonal models.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{eval_kernel, eval_kernel_derivative, KernelSpec};
use crate::quadrature::{integrate_from, integrate_real_line, SemiInfiniteOptions, Tolerance, DEFAULT_BUDGET};
use crate::spectral_models::SpectrumModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalcEvalReport {
    pub result_vector: Vec<Complex64>,
    pub reference_vector: Vec<Complex64>,
    pub max_componentwise_error: f64,
    pub evaluations: usize,
}

/// First error raised inside a quadrature callback.
#[derive(Default)]
struct ErrorSlot(Mutex<Option<Error>>);

impl ErrorSlot {
    fn put(&self, e: Error) {
        self.0.lock().expect("poisoned").get_or_insert(e);
    }

    fn take(self) -> Option<Error> {
        self.0.into_inner().expect("poisoned")
    }
}

/// `f(∞)` from the kernel's known limit, validated against `f(10³)` and
/// `f(10⁶)` with one Richardson step.
pub fn checked_limit(spec: &KernelSpec) -> Result<Complex64> {
    let closed = spec.limit_at_infinity()?;
    let (r1, r2) = (1e3, 1e6);
    let f1 = eval_kernel(spec, Complex64::new(r1, 0.0))?;
    let f2 = eval_kernel(spec, Complex64::new(r2, 0.0))?;
    let extrapolated = f2 + (f2 - f1) / (r2 / r1 - 1.0);
    if (extrapolated - closed).norm() > 1e-2 * (1.0 + closed.norm()) {
        return Err(invalid(
            "f(inf)",
            format!("{}: closed limit {closed} disagrees with extrapolation {extrapolated}", spec.name()),
        ));
    }
    Ok(closed)
}

fn diagonal_checks(model: &SpectrumModel, spec: &KernelSpec, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let ev = model.diagonal_eigenvalues().ok_or(Error::WrongModelKind("diagonal"))?.to_vec();
    if x.len() != ev.len() {
        return Err(invalid("x", format!("length {} does not match {} modes", x.len(), ev.len())));
    }
    spec.validate()?;
    if !spec.has_derivative() {
        return Err(Error::Unsupported(format!("{} has no closed-form derivative", spec.name())));
    }
    Ok(ev)
}

/// `∫_0^∞ w(ξ) ∫_ℝ f′(ξ+iη) K(ξ, η) dη dξ` for one mode.
fn nested(
    spec: &KernelSpec,
    lambda: Complex64,
    tol: f64,
    weight: impl Fn(f64) -> f64 + Sync,
    kernel: impl Fn(f64, f64) -> Complex64 + Sync,
) -> Result<(Complex64, usize)> {
    let slot = ErrorSlot::default();
    let evals = AtomicUsize::new(0);
    let mut breaks = spec.feature_heights();
    breaks.push(lambda.im);
    let base_scale = spec.natural_scale();
    let inner = |xi: f64| -> Complex64 {
        let w = weight(xi);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let scale = xi + lambda.re.max(0.0) + base_scale;
        let itol = Tolerance { abs: 1e-3 * tol / (1.0 + xi).powi(2), rel: 1e-3 * tol };
        let r = integrate_real_line(
            |eta: f64| match eval_kernel_derivative(spec, Complex64::new(xi, eta)) {
                Ok(d) => d * kernel(xi, eta),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            },
            &breaks,
            scale,
            itol,
            DEFAULT_BUDGET,
        );
        match r {
            Ok(r) => {
                evals.fetch_add(r.evaluations, Ordering::Relaxed);
                r.value * w
            }
            Err(e) => {
                slot.put(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let outer = integrate_from(
        inner,
        SemiInfiniteOptions::new(Tolerance { abs: 0.1 * tol, rel: 0.1 * tol }).first_panel(lambda.norm().max(1.0)),
    );
    if let Some(e) = slot.take() {
        return Err(e);
    }
    let outer = outer?;
    Ok((outer.value, outer.evaluations + evals.into_inner()))
}

fn finish(
    ev: &[Complex64],
    spec: &KernelSpec,
    x: &[Complex64],
    per_mode: impl Fn(Complex64) -> Result<(Complex64, usize)> + Sync,
) -> Result<CalcEvalReport> {
    let zero = Complex64::new(0.0, 0.0);
    let rows = ev
        .par_iter()
        .zip(x.par_iter())
        .map(|(&l, &xk)| -> Result<(Complex64, Complex64, usize)> {
            if xk == zero {
                return Ok((zero, zero, 0));
            }
            let (v, n) = per_mode(l)?;
            Ok((v * xk, eval_kernel(spec, l)? * xk, n))
        })
        .collect::<Result<Vec<_>>>()?;
    let result_vector: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let reference_vector: Vec<Complex64> = rows.iter().map(|r| r.1).collect();
    let max_componentwise_error =
        result_vector.iter().zip(&reference_vector).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(CalcEvalReport {
        result_vector,
        reference_vector,
        max_componentwise_error,
        evaluations: rows.iter().map(|r| r.2).sum(),
    })
}

/// `f(∞)x − (2/π) ∫_0^∞ ξ ∫_ℝ f′(ξ+iη) (ξ − iη + A)^{-2} x dη dξ`.
pub fn bcalc_apply(model: &SpectrumModel, spec: &KernelSpec, x: &[Complex64], tol: f64) -> Result<CalcEvalReport> {
    let ev = diagonal_checks(model, spec, x)?;
    if let Some(l) = ev.iter().find(|l| l.re <= 0.0) {
        return Err(invalid("model", format!("eigenvalue {l} outside the open right half-plane")));
    }
    let f_inf = checked_limit(spec)?;
    finish(&ev, spec, x, |l| {
        let (integral, n) = nested(
            spec,
            l,
            tol,
            |xi| xi,
            |xi, eta| {
                let w = Complex64::new(xi + l.re, l.im - eta);
                (w * w).inv()
            },
        )?;
        Ok((f_inf - integral * (2.0 / PI), n))
    })
}

/// `f(∞)x − (2^s/π) ∫_0^∞ ξ^s ∫_ℝ f′(ξ+iη) (A + ξ − iη)^{-(s+1)} x dη dξ`.
pub fn dcalc_apply(
    model: &SpectrumModel,
    spec: &KernelSpec,
    s: f64,
    x: &[Complex64],
    tol: f64,
) -> Result<CalcEvalReport> {
    let ev = diagonal_checks(model, spec, x)?;
    if !(s > -1.0) {
        return Err(invalid("s", format!("{s} must exceed -1")));
    }
    if let Some(&l) = ev.iter().find(|l| l.re <= 0.0) {
        return Err(Error::SectorViolation(l));
    }
    let f_inf = checked_limit(spec)?;
    let scale = 2f64.powf(s) / PI;
    finish(&ev, spec, x, |l| {
        let (integral, n) = nested(
            spec,
            l,
            tol,
            |xi| {
                if xi == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    xi.powf(s)
                }
            },
            |xi, eta| {
                let w = Complex64::new(xi + l.re, l.im - eta);
                (w.ln() * -(s + 1.0)).exp()
            },
        )?;
        Ok((f_inf - integral * scale, n))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus_norms::b0_norm;
    use crate::kernels::{Anchor, OmegaSequence};
    use crate::norm_engine::operator_norm;
    use crate::spectral_models::{build_spectrum, FamilySpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e1() -> Vec<Complex64> {
        vec![c(1.0, 0.0)]
    }

    fn one() -> OmegaSequence {
        OmegaSequence::constant(1.0).unwrap()
    }

    #[test]
    fn resolvent_through_b_calculus() {
        let m = SpectrumModel::diagonal(vec![c(1.0, 1.0)]).unwrap();
        let r = bcalc_apply(&m, &KernelSpec::resolvent(2.0), &e1(), 1e-6).unwrap();
        assert!((r.reference_vector[0] - c(0.3, -0.1)).norm() < 1e-15);
        assert!(r.max_componentwise_error <= 1e-5, "{r:?}");
    }

    #[test]
    fn fnaw_through_b_calculus() {
        let m = SpectrumModel::from_reals(&[1.0]).unwrap();
        let k = KernelSpec::Fnaw { n: 1, alpha: 1.0, c: 1.0, omegas: one(), anchor: Anchor::Min };
        let r = bcalc_apply(&m, &k, &e1(), 1e-6).unwrap();
        assert!((r.reference_vector[0] - c(1.0 / 9.0, 0.0)).norm() < 1e-15);
        assert!(r.max_componentwise_error <= 1e-5, "{r:?}");
    }

    #[test]
    fn zero_vector_is_exact() {
        let m = SpectrumModel::from_reals(&[1.0, 2.0]).unwrap();
        let r = bcalc_apply(&m, &KernelSpec::resolvent(1.0), &[c(0.0, 0.0); 2], 1e-6).unwrap();
        assert!(r.result_vector.iter().all(|v| *v == c(0.0, 0.0)));
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn resolvent_through_d_calculus() {
        let m = SpectrumModel::from_reals(&[2.0]).unwrap();
        let r = dcalc_apply(&m, &KernelSpec::resolvent(1.0), 1.0, &e1(), 1e-6).unwrap();
        assert!((r.reference_vector[0].re - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.max_componentwise_error <= 1e-5, "{r:?}");
    }

    #[test]
    fn constant_kernel_is_exact() {
        let m = SpectrumModel::from_reals(&[2.0, 5.0]).unwrap();
        let x = vec![c(1.0, 2.0), c(-3.0, 0.5)];
        let r = dcalc_apply(&m, &KernelSpec::constant(4.0), 0.5, &x, 1e-6).unwrap();
        assert_eq!(r.result_vector, vec![x[0] * 4.0, x[1] * 4.0]);
    }

    #[test]
    fn d_calculus_is_independent_of_s() {
        let m = SpectrumModel::diagonal(vec![c(1.0, 2.0), c(3.0, -1.0)]).unwrap();
        let k = KernelSpec::Fnaw { n: 2, alpha: 0.5, c: 0.5, omegas: one(), anchor: Anchor::Max };
        let x = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let r0 = dcalc_apply(&m, &k, 0.0, &x, 1e-6).unwrap();
        let r1 = dcalc_apply(&m, &k, 1.0, &x, 1e-6).unwrap();
        assert!(r0.max_componentwise_error <= 1e-5, "{r0:?}");
        assert!(r1.max_componentwise_error <= 1e-5, "{r1:?}");
        for (a, b) in r0.result_vector.iter().zip(&r1.result_vector) {
            assert!((a - b).norm() <= 1e-5);
        }
    }

    #[test]
    fn sector_and_kind_violations() {
        let m = SpectrumModel::from_reals(&[-1.0]).unwrap();
        assert!(matches!(
            dcalc_apply(&m, &KernelSpec::resolvent(3.0), 1.0, &e1(), 1e-6),
            Err(Error::SectorViolation(_))
        ));
        let m = SpectrumModel::matrix(nalgebra::DMatrix::from_element(1, 1, c(1.0, 0.0))).unwrap();
        assert!(matches!(bcalc_apply(&m, &KernelSpec::resolvent(1.0), &e1(), 1e-6), Err(Error::WrongModelKind(_))));
    }

    #[test]
    fn homomorphism_spot_check() {
        let m = SpectrumModel::diagonal(vec![c(1.0, 1.0), c(2.0, -3.0)]).unwrap();
        let x = vec![c(1.0, 0.0), c(0.5, 0.5)];
        let tol = 1e-6;
        let prod = KernelSpec::Product(vec![KernelSpec::resolvent(1.0), KernelSpec::resolvent(2.0)]);
        let lhs = bcalc_apply(&m, &prod, &x, tol).unwrap().result_vector;
        let inner = bcalc_apply(&m, &KernelSpec::resolvent(2.0), &x, tol).unwrap().result_vector;
        let outer = bcalc_apply(&m, &KernelSpec::resolvent(1.0), &inner, tol).unwrap().result_vector;
        for (a, b) in lhs.iter().zip(&outer) {
            assert!((a - b).norm() <= 10.0 * tol);
        }
    }

    #[test]
    fn norm_bound_from_b0() {
        let m = build_spectrum(&FamilySpec::crandall_pazy(2.0, 500)).unwrap();
        for k in [
            KernelSpec::Fnaw { n: 6, alpha: 1.0, c: 1.0, omegas: one(), anchor: Anchor::Min },
            KernelSpec::Fta { t: 3.0, alpha: 0.5 },
            KernelSpec::VKernel { alpha: 1.0, c: 2.0, d: 0.5 },
        ] {
            let lhs = operator_norm(&m, &k).unwrap().norm;
            let rhs = k.limit_at_infinity().unwrap().norm() + 2.0 * b0_norm(&k, 1e-8).unwrap().value;
            assert!(lhs <= rhs, "{}: {lhs} > {rhs}", k.name());
        }
    }
}
