//! Power-law fits of norm curves and the rate, characterization and
//! lower-bound experiments built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus_norms::{rate_envelope_eval, weighted_b0_norm, RateEnvelope, WeightPhiQ};
use crate::error::{invalid, Error, Result};
use crate::kernels::{Anchor, KernelSpec, OmegaSequence};
use crate::linalg;
use crate::norm_engine::{log_grid, norm_curve, operator_norm, NormCurve, NormSample};
use crate::spectral_models::{FamilyTag, SpectrumModel};

/// Fits below this r² are not trusted.
pub const MIN_R_SQUARED: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `norm ≈ C·param^{-exponent}`.
    pub exponent: f64,
    pub log_constant: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Inclusive parameter range used by a fit; `None` ends are open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl FitWindow {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn between(lo: f64, hi: f64) -> Self {
        Self { lo: Some(lo), hi: Some(hi) }
    }

    fn contains(&self, p: f64) -> bool {
        self.lo.is_none_or(|lo| p >= lo) && self.hi.is_none_or(|hi| p <= hi)
    }
}

/// Least squares on `(log p, log y)` over the points inside `window`.
pub fn fit_points(params: &[f64], norms: &[f64], window: FitWindow) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> =
        params.iter().zip(norms).filter(|(p, _)| window.contains(**p)).map(|(&p, &y)| (p, y)).collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientSamples(pts.len()));
    }
    if let Some(&(param, norm)) = pts.iter().find(|(p, y)| !(*y > 0.0 && y.is_finite() && *p > 0.0)) {
        return Err(Error::NonPositiveNorm { param, norm });
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("params", "all parameters in the window coincide"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy <= 1e-300 { 1.0 } else { (slope * sxy / syy).clamp(0.0, 1.0) };
    Ok(RateFit { exponent: -slope, log_constant: my - slope * mx, r_squared, window: (pts[0].0, pts[pts.len() - 1].0) })
}

pub fn fit_power_law(curve: &NormCurve, window: FitWindow) -> Result<RateFit> {
    fit_points(&curve.params(), &curve.norms(), window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Fail dominates, then inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario_id: String,
    pub predicted_exponent: f64,
    /// Absent when the curve could not be fitted at all.
    pub fitted: Option<RateFit>,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub truncation_hit: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn judge(fit: &RateFit, predicted: f64, tolerance: f64, truncation_hit: bool) -> Verdict {
    if truncation_hit || fit.r_squared < MIN_R_SQUARED {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool((fit.exponent - predicted).abs() <= tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitExperiment {
    pub result: ScenarioResult,
    pub curve: NormCurve,
}

fn fit_experiment(
    id: &str,
    curve: NormCurve,
    predicted: f64,
    tolerance: f64,
    window: FitWindow,
) -> Result<FitExperiment> {
    let truncation_hit = curve.truncation_hit();
    let mut notes = Vec::new();
    if truncation_hit {
        notes.push(format!("argmax reached the last retained mode K = {}", curve.truncation));
    }
    let (fitted, verdict) = match fit_power_law(&curve, window) {
        Ok(fit) => {
            if fit.r_squared < MIN_R_SQUARED {
                notes.push(format!("r^2 = {:.4} below {MIN_R_SQUARED}", fit.r_squared));
            }
            (Some(fit), judge(&fit, predicted, tolerance, truncation_hit))
        }
        Err(Error::NonPositiveNorm { param, norm }) => {
            notes.push(format!("norm {norm} at {param}: faster than any power law"));
            (None, Verdict::Inconclusive)
        }
        Err(e) => return Err(e),
    };
    Ok(FitExperiment {
        result: ScenarioResult {
            scenario_id: id.to_string(),
            predicted_exponent: predicted,
            fitted,
            verdict,
            tolerance,
            truncation_hit,
            notes,
        },
        curve,
    })
}

fn diagonal(model: &SpectrumModel) -> Result<&[Complex64]> {
    model.diagonal_eigenvalues().ok_or(Error::WrongModelKind("diagonal"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    /// Infinite when the curve is flat (bounded generator).
    pub beta: f64,
    pub fit: RateFit,
    pub truncation_hit: bool,
    pub holomorphic_degenerate: bool,
}

/// β̂ from `‖A e^{-tA}‖ ≈ C t^{-1/β}` on 16 log-spaced `t ∈ [1e-4, 1e-2]`.
pub fn beta_from_smalltime(model: &SpectrumModel) -> Result<BetaEstimate> {
    diagonal(model)?;
    let curve = norm_curve(model, |t| KernelSpec::GeneratorSemigroup { t }, &log_grid(1e-4, 1e-2, 16), "t")?;
    let fit = fit_power_law(&curve, FitWindow::full())?;
    let degenerate = fit.exponent <= 0.05;
    Ok(BetaEstimate {
        beta: if degenerate { f64::INFINITY } else { 1.0 / fit.exponent },
        fit,
        truncation_hit: curve.truncation_hit(),
        holomorphic_degenerate: degenerate,
    })
}

/// `sup_{|η| ∈ [lo, hi]} ‖(iη + A)^{-1}‖` with the index of the nearest mode.
fn banded_resolvent(ev: &[Complex64], lo: f64, hi: f64) -> (f64, usize) {
    // (iη + A)^{-1} blows up where λ = -iη, so measure the distance from λ to ±i[lo, hi]
    let (d, k) = ev
        .par_iter()
        .enumerate()
        .map(|(k, l)| {
            let up = Complex64::new(l.re, l.im - l.im.clamp(lo, hi)).norm();
            let down = Complex64::new(l.re, l.im + (-l.im).clamp(lo, hi)).norm();
            (up.min(down), k)
        })
        .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    (1.0 / d, k + 1)
}

/// β̂ as the decay exponent of the resolvent along `iℝ` over `|η| ∈ [1e2, 1e6]`.
///
/// Each of the 16 log-spaced samples is the sup over a band `[η_j, η_j ρ]`
/// of both half-axes, which follows the envelope rather than the gaps
/// between eigenvalues.
pub fn beta_from_resolvent(model: &SpectrumModel) -> Result<BetaEstimate> {
    let ev = diagonal(model)?;
    let grid = log_grid(1e2, 1e6, 16);
    let rho = grid[1] / grid[0];
    let samples: Vec<NormSample> = grid
        .iter()
        .map(|&eta| {
            let (norm, k) = banded_resolvent(ev, eta, eta * rho);
            NormSample { param: eta, norm, argmax_mode: Some(k) }
        })
        .collect();
    let curve = NormCurve {
        parameter_name: "eta".into(),
        samples,
        model_digest: model.digest(),
        truncation: model.truncation(),
    };
    let fit = fit_power_law(&curve, FitWindow::full())?;
    Ok(BetaEstimate { beta: fit.exponent, fit, truncation_hit: curve.truncation_hit(), holomorphic_degenerate: false })
}

/// β from the family tag, else from the resolvent fit.
pub fn model_beta(model: &SpectrumModel) -> Result<f64> {
    match model.nominal_beta() {
        Some(b) => Ok(b),
        None => Ok(beta_from_resolvent(model)?.beta.min(1.0)),
    }
}

/// `‖(∏_{k≤n} V_{ω_k}(A)) A^{-α}‖` against `n^{-α/(2-β)}`.
pub fn cn_decay_experiment(
    model: &SpectrumModel,
    omegas: &OmegaSequence,
    alpha: f64,
    n_grid: &[f64],
    tolerance: f64,
    window: FitWindow,
) -> Result<FitExperiment> {
    if !model.is_invertible_stable() {
        return Err(invalid("model", "needs Re lambda > 0 for every mode"));
    }
    let beta = model_beta(model)?;
    let curve = norm_curve(model, |n| KernelSpec::cayley_decay(omegas.clone(), n as u64, alpha), n_grid, "n")?;
    fit_experiment("cn_decay", curve, alpha / (2.0 - beta), tolerance, window)
}

/// `‖e^{-tA^{-1}} A^{-α}‖` against `t^{-α/(2-β)}`.
pub fn inverse_gen_experiment(
    model: &SpectrumModel,
    alpha: f64,
    t_grid: &[f64],
    tolerance: f64,
    window: FitWindow,
) -> Result<FitExperiment> {
    if !model.is_invertible_stable() {
        return Err(invalid("model", "needs Re lambda > 0 for every mode"));
    }
    let beta = model_beta(model)?;
    let curve = norm_curve(
        model,
        |t| KernelSpec::Product(vec![KernelSpec::inverse_semigroup(t), KernelSpec::frac_power(alpha)]),
        t_grid,
        "t",
    )?;
    fit_experiment("inverse_gen", curve, alpha / (2.0 - beta), tolerance, window)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyDecayGrids {
    pub semigroup_t: Vec<f64>,
    pub inverse_t: Vec<f64>,
    pub cayley_n: Vec<f64>,
}

impl Default for PolyDecayGrids {
    fn default() -> Self {
        Self {
            semigroup_t: crate::norm_engine::dyadic_grid(0, 10),
            inverse_t: crate::norm_engine::dyadic_grid(5, 20),
            cayley_n: crate::norm_engine::dyadic_grid(5, 20),
        }
    }
}

/// The three fits on a polynomially decaying model: semigroup vs `t^{-1/β}`,
/// inverse generator vs `t^{-α/(2+β)}` and Cayley powers vs `n^{-α/(2+β)}`.
/// The semigroup fit is judged with `semigroup_tolerance`, the other two with `tolerance`.
pub fn poly_decay_experiment(
    model: &SpectrumModel,
    alpha: f64,
    beta: f64,
    grids: &PolyDecayGrids,
    semigroup_tolerance: f64,
    tolerance: f64,
) -> Result<[FitExperiment; 3]> {
    if !(beta > 0.0) {
        return Err(invalid("beta", format!("{beta} must be positive")));
    }
    let one = OmegaSequence::constant(1.0)?;
    let pred = alpha / (2.0 + beta);
    let semigroup = norm_curve(
        model,
        |t| KernelSpec::Product(vec![KernelSpec::Semigroup { t }, KernelSpec::frac_power(1.0)]),
        &grids.semigroup_t,
        "t",
    )?;
    let inverse = norm_curve(
        model,
        |t| KernelSpec::Product(vec![KernelSpec::inverse_semigroup(t), KernelSpec::frac_power(alpha)]),
        &grids.inverse_t,
        "t",
    )?;
    let cayley = norm_curve(model, |n| KernelSpec::cayley_decay(one.clone(), n as u64, alpha), &grids.cayley_n, "n")?;
    Ok([
        fit_experiment("poly_semigroup", semigroup, 1.0 / beta, semigroup_tolerance, FitWindow::full())?,
        fit_experiment("poly_inverse", inverse, pred, tolerance, FitWindow::full())?,
        fit_experiment("poly_cayley", cayley, pred, tolerance, FitWindow::full())?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundProbe {
    /// `(n or t, scaled norm)`.
    pub samples: Vec<(f64, f64)>,
    pub witness: f64,
    /// Max over the first half of the samples.
    pub half_range_witness: f64,
    /// Lower bound for the limsup where one is known in closed form.
    pub constant: Option<f64>,
}

impl LowerBoundProbe {
    fn from_samples(samples: Vec<(f64, f64)>, constant: Option<f64>) -> Self {
        let max = |s: &[(f64, f64)]| s.iter().map(|p| p.1).fold(0.0, f64::max);
        let half = max(&samples[..samples.len().div_ceil(2)]);
        Self { witness: max(&samples), half_range_witness: half, samples, constant }
    }

    /// The witness stays positive and moves by at most `rel` when the sample range doubles.
    pub fn is_stable(&self, rel: f64) -> bool {
        self.half_range_witness > 0.0 && (self.witness - self.half_range_witness) <= rel * self.witness
    }
}

fn cp_gamma(model: &SpectrumModel) -> Result<f64> {
    match model.family() {
        Some(FamilyTag::CrandallPazyExample { gamma, shift: 1.0 }) => Ok(gamma),
        _ => Err(invalid("model", "needs the Crandall-Pazy example family with shift 1")),
    }
}

/// `n^{α/(2-β)} ‖V_1(A)^n (1+A)^{-α}‖` along `n = j^m`, `m = 2γ − 1`, `j = 1..=j_max`.
pub fn lower_bound_probe(model: &SpectrumModel, alpha: f64, j_max: u64) -> Result<LowerBoundProbe> {
    let gamma = cp_gamma(model)?;
    let m = 2.0 * gamma - 1.0;
    if m.fract() != 0.0 || m < 1.0 {
        return Err(invalid("gamma", format!("2*gamma - 1 = {m} must be a positive integer")));
    }
    let beta = 1.0 / gamma;
    let ell = alpha / (2.0 - beta);
    if !(alpha >= 0.0) || (ell - ell.round()).abs() > 1e-12 {
        return Err(invalid("alpha", format!("{alpha} is not a multiple of 2 - beta = {}", 2.0 - beta)));
    }
    let one = OmegaSequence::constant(1.0)?;
    let samples = (1..=j_max)
        .into_par_iter()
        .map(|j| {
            let n = (j as f64).powf(m).round();
            let k = KernelSpec::Product(vec![
                KernelSpec::cayley(one.clone(), n as u64),
                KernelSpec::FracResolvent { alpha, z: Complex64::new(1.0, 0.0) },
            ]);
            Ok((n, n.powf(ell) * operator_norm(model, &k)?.norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowerBoundProbe::from_samples(samples, None))
}

/// `t^{α/(2-β)} ‖e^{-tA^{-1}} A^{-α}‖` at `t_k = αγk/(4γ−2)`, with the closed-form
/// lower bound `5^{-α/2} (αγ/(e(4γ−2)))^{α/(2-β)}` for its limsup.
pub fn inverse_lower_bound_probe(model: &SpectrumModel, alpha: f64, k_max: u64) -> Result<LowerBoundProbe> {
    let gamma = cp_gamma(model)?;
    if !(alpha > 0.0) {
        return Err(invalid("alpha", format!("{alpha} must be positive")));
    }
    let p = alpha / (2.0 - 1.0 / gamma);
    let base = alpha * gamma / (4.0 * gamma - 2.0);
    let constant = 5f64.powf(-alpha / 2.0) * (base / std::f64::consts::E).powf(p);
    let samples = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let t = base * k as f64;
            let spec = KernelSpec::Product(vec![KernelSpec::inverse_semigroup(t), KernelSpec::frac_power(alpha)]);
            Ok((t, t.powf(p) * operator_norm(model, &spec)?.norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowerBoundProbe::from_samples(samples, Some(constant)))
}

/// `n^α ‖V_ω(A)^n A^{-α}‖` at `n = 2^j`, `j = 0..=j_max`, on a normal model
/// whose spectrum lies in a sector of half-angle `< π/2`.
pub fn normal_lower_bound_probe(model: &SpectrumModel, omega: f64, alpha: f64, j_max: u32) -> Result<LowerBoundProbe> {
    if let Some(m) = model.matrix_ref() {
        let defect = linalg::normality_defect(m);
        if defect > 1e-12 {
            return Err(Error::NotNormal { defect });
        }
    }
    let ev = model.eigenvalues();
    let delta = ev.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(invalid("model", "spectrum must lie in Re lambda >= delta > 0"));
    }
    let theta = ev.iter().map(|l| l.arg().abs()).fold(0.0, f64::max);
    if !(theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::SectorViolation(ev[0]));
    }
    let om = OmegaSequence::constant(omega)?;
    let samples = (0..=j_max)
        .into_par_iter()
        .map(|j| {
            let n = 2f64.powi(j as i32);
            let spec = KernelSpec::cayley_decay(om.clone(), n as u64, alpha);
            Ok((n, n.powf(alpha) * operator_norm(model, &spec)?.norm))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowerBoundProbe::from_samples(samples, None))
}

/// Max relative column discrepancy of
/// `(((iη−1)/(iη+1)) − V_1(B))^{-1} = ½(iη+1)(−1 + (iη+1)(iη−B)^{-1})` over the grid.
pub fn cayley_identity_check(model: &SpectrumModel, eta_grid: &[f64]) -> Result<f64> {
    let b = model.to_matrix()?;
    let dim = b.nrows();
    let id = linalg::identity(dim);
    let one = Complex64::new(1.0, 0.0);
    let v1 = linalg::solve_shifted(&b, one, &id).map_err(|_| Error::SingularShift { shift: one })?.transpose();
    // V_1(B) = (B−1)(B+1)^{-1}; the factors commute, so solve from the right via the transpose
    let v1 = (linalg::shifted(&b, -one).transpose() * v1).transpose();
    let worst = eta_grid
        .par_iter()
        .map(|&eta| -> Result<f64> {
            let z = Complex64::new(0.0, eta);
            let mu = (z - one) / (z + one);
            let lhs_m: DMatrix<Complex64> = &id * mu - &v1;
            let lhs = lhs_m.lu().solve(&id).ok_or(Error::SingularShift { shift: mu })?;
            let res = linalg::solve_shifted(&(-&b), z, &id).map_err(|_| Error::SingularShift { shift: z })?;
            let rhs = (-&id + res * (z + one)) * ((z + one) * 0.5);
            let mut worst = 0.0f64;
            for k in 0..dim {
                let diff = (lhs.column(k) - rhs.column(k)).norm();
                let scale = rhs.column(k).norm().max(f64::MIN_POSITIVE);
                worst = worst.max(diff / scale);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRatio {
    pub param: f64,
    pub norm: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Log-log slope of the ratio over the last `last` samples.
pub fn tail_slope(ratios: &[EnvelopeRatio], last: usize) -> Result<f64> {
    let tail = &ratios[ratios.len().saturating_sub(last)..];
    let fit = fit_points(
        &tail.iter().map(|r| r.param).collect::<Vec<_>>(),
        &tail.iter().map(|r| r.ratio).collect::<Vec<_>>(),
        FitWindow::full(),
    )?;
    Ok(-fit.exponent)
}

/// Boundedness verdict for an envelope ratio sampled on a geometric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Log-log slopes between consecutive tail samples.
    pub local_slopes: Vec<f64>,
    /// Largest ratio of consecutive positive slopes, when any slope is above the flat threshold.
    pub contraction: Option<f64>,
    /// Sup of the samples, extended by the geometric series of the remaining slopes.
    pub extrapolated_sup: f64,
    pub bounded: bool,
}

/// The tail of `ratios` counts as bounded when every local slope is at most
/// `flat_slope`, or when the slopes are positive and shrink by at least the
/// factor `max_contraction` per grid step (so their sum converges).
pub fn tail_bound(ratios: &[EnvelopeRatio], last: usize, flat_slope: f64, max_contraction: f64) -> Result<TailBound> {
    let tail = &ratios[ratios.len().saturating_sub(last)..];
    if tail.len() < 3 {
        return Err(Error::InsufficientSamples(tail.len()));
    }
    if let Some(r) = tail.iter().find(|r| !(r.ratio > 0.0 && r.ratio.is_finite() && r.param > 0.0)) {
        return Err(Error::NonPositiveNorm { param: r.param, norm: r.ratio });
    }
    let local_slopes: Vec<f64> =
        tail.windows(2).map(|w| (w[1].ratio / w[0].ratio).ln() / (w[1].param / w[0].param).ln()).collect();
    let sup = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    if local_slopes.iter().all(|s| *s <= flat_slope) {
        return Ok(TailBound { local_slopes, contraction: None, extrapolated_sup: sup, bounded: true });
    }
    let contraction = local_slopes
        .windows(2)
        .map(|w| if w[0] > 0.0 && w[1] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
        .fold(0.0, f64::max);
    let bounded = contraction <= max_contraction;
    let extrapolated_sup = if bounded {
        let s = local_slopes[local_slopes.len() - 1];
        let step = (tail[tail.len() - 1].param / tail[tail.len() - 2].param).ln();
        tail[tail.len() - 1].ratio.max(sup) * (s * step * contraction / (1.0 - contraction)).exp()
    } else {
        f64::INFINITY
    };
    Ok(TailBound { local_slopes, contraction: Some(contraction), extrapolated_sup, bounded })
}

/// `⦀f_{n,α,(ω_k)}⦀ / F_{α,q}(n)` for each `n` in the grid.
pub fn fnaw_envelope_ratios(
    alpha: f64,
    q: f64,
    c: f64,
    omegas: &OmegaSequence,
    n_grid: &[u64],
    tol: f64,
) -> Result<Vec<EnvelopeRatio>> {
    let w = WeightPhiQ::new(q)?;
    let env = RateEnvelope::FAlphaQ { alpha, q };
    n_grid
        .par_iter()
        .map(|&n| {
            let spec = KernelSpec::Fnaw { n, alpha, c, omegas: omegas.clone(), anchor: Anchor::Min };
            let norm = weighted_b0_norm(&spec, w, tol)?.value;
            let envelope = rate_envelope_eval(env, n as f64)?;
            Ok(EnvelopeRatio { param: n as f64, norm, envelope, ratio: norm / envelope })
        })
        .collect()
}

/// `⦀f_{t,α}⦀` and its ratio to the three-regime envelope (`F_{α,q}` evaluated at `t`).
/// The envelope is taken as 1 for `t < 1`.
pub fn fta_envelope_ratios(alpha: f64, q: f64, t_grid: &[f64], tol: f64) -> Result<Vec<EnvelopeRatio>> {
    let w = WeightPhiQ::new(q)?;
    let env = RateEnvelope::FAlphaQ { alpha, q };
    t_grid
        .par_iter()
        .map(|&t| {
            let norm = weighted_b0_norm(&KernelSpec::Fta { t, alpha }, w, tol)?.value;
            let envelope = if t < 1.0 { 1.0 } else { rate_envelope_eval(env, t)? };
            Ok(EnvelopeRatio { param: t, norm, envelope, ratio: norm / envelope })
        })
        .collect()
}

/// `α(c−d)/c² + α(c−d)/((1−q)(1+c)^{1−q})`, an upper bound for `⦀v_{α,c,d}⦀`.
pub fn v_kernel_bound(alpha: f64, c: f64, d: f64, q: f64) -> f64 {
    alpha * (c - d) / (c * c) + alpha * (c - d) / ((1.0 - q) * (1.0 + c).powf(1.0 - q))
}

/// `n^{α/(2-β)} ‖(∏V) A^{-α}‖ / L_{α,β,ε}(n)` along the grid.
pub fn l_envelope_ratios(
    model: &SpectrumModel,
    omegas: &OmegaSequence,
    alpha: f64,
    eps: f64,
    n_grid: &[f64],
) -> Result<Vec<EnvelopeRatio>> {
    let beta = model_beta(model)?;
    let env = RateEnvelope::LAlphaBetaEps { alpha, beta, eps };
    let curve = norm_curve(model, |n| KernelSpec::cayley_decay(omegas.clone(), n as u64, alpha), n_grid, "n")?;
    curve
        .samples
        .iter()
        .map(|s| {
            let envelope = rate_envelope_eval(env, s.param)?;
            let norm = s.norm * s.param.powf(alpha / (2.0 - beta));
            Ok(EnvelopeRatio { param: s.param, norm, envelope, ratio: norm / envelope })
        })
        .collect()
}
