//! Half-plane integral norms of kernels and their closed-form envelopes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::kernels::{eval_kernel, eval_kernel_derivative, KernelSpec};
use crate::quadrature::{
    integrate, integrate_from, sup_on_vertical_line_with, DecayHint, QuadResult, SemiInfiniteOptions, SupOptions,
    Tolerance, DEFAULT_BUDGET,
};

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Tolerance::absolute(abs)
    }
}

const SUP_RATIO: f64 = 1e-9;

/// `φ_q(ξ) = 1` on `(0,1)`, `ξ^q` on `[1,∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPhiQ {
    q: f64,
}

impl WeightPhiQ {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("q", format!("{q} outside (0, 1)")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn value(&self, xi: f64) -> f64 {
        if xi < 1.0 {
            1.0
        } else {
            xi.powf(self.q)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateEnvelope {
    FAlphaQ { alpha: f64, q: f64 },
    LAlphaBetaEps { alpha: f64, beta: f64, eps: f64 },
}

fn require_derivative(spec: &KernelSpec) -> Result<()> {
    spec.validate()?;
    if !spec.has_derivative() {
        return Err(Error::Unsupported(format!("{} has no closed-form derivative", spec.name())));
    }
    Ok(())
}

/// `sup_η |f′(ξ + iη)|`.
pub fn sup_derivative(spec: &KernelSpec, xi: f64) -> Result<f64> {
    let opts = SupOptions::new(DecayHint::Rational, SUP_RATIO)
        .scale(xi + spec.natural_scale())
        .symmetric(spec.is_real_symmetric());
    let r = sup_on_vertical_line_with(
        |eta| eval_kernel_derivative(spec, Complex64::new(xi, eta)).map(|v| v.norm()).unwrap_or(f64::NAN),
        &opts,
    )?;
    Ok(r.value)
}

fn sup_integral(
    spec: &KernelSpec,
    weight: impl Fn(f64) -> f64,
    lo: f64,
    hi: Option<f64>,
    tol: Tolerance,
) -> Result<QuadResult> {
    let integrand = |xi: f64| weight(xi) * sup_derivative(spec, xi).unwrap_or(f64::NAN);
    match hi {
        Some(hi) => integrate(integrand, lo, hi, tol, DEFAULT_BUDGET),
        None => integrate_from(integrand, SemiInfiniteOptions::new(tol).start(lo).first_panel(spec.natural_scale())),
    }
}

fn add(a: QuadResult, b: QuadResult) -> QuadResult {
    QuadResult {
        value: a.value + b.value,
        abs_error_estimate: a.abs_error_estimate + b.abs_error_estimate,
        evaluations: a.evaluations + b.evaluations,
        tail_bound: a.tail_bound + b.tail_bound,
    }
}

/// `‖f‖_{B₀} = ∫_0^∞ sup_η |f′(ξ+iη)| dξ`.
pub fn b0_norm(spec: &KernelSpec, tol: impl Into<Tolerance>) -> Result<QuadResult> {
    require_derivative(spec)?;
    sup_integral(spec, |_| 1.0, 0.0, None, tol.into())
}

/// `⦀f⦀ = ∫_0^∞ φ_q(ξ) sup_η |f′(ξ+iη)| dξ`, split at the kink `ξ = 1`.
pub fn weighted_b0_norm(spec: &KernelSpec, weight: WeightPhiQ, tol: impl Into<Tolerance>) -> Result<QuadResult> {
    require_derivative(spec)?;
    let tol = tol.into();
    let half = Tolerance { abs: tol.abs * 0.5, rel: tol.rel * 0.5 };
    let head = sup_integral(spec, |_| 1.0, 0.0, Some(1.0), half)?;
    let q = weight.q();
    let tail = sup_integral(spec, |xi| xi.powf(q), 1.0, None, half)?;
    Ok(add(head, tail))
}

/// `‖f‖_{D_{s,0}} = ∫_{-π/2}^{π/2} cos^s θ ∫_0^∞ |f′(re^{iθ})| dr dθ`.
pub fn ds_norm(spec: &KernelSpec, s: f64, tol: impl Into<Tolerance>) -> Result<QuadResult> {
    require_derivative(spec)?;
    if !(s > -1.0) {
        return Err(invalid("s", format!("{s} must exceed -1")));
    }
    let tol = tol.into();
    let symmetric = spec.is_real_symmetric();
    let scale = spec.natural_scale();
    let inner_tol = Tolerance { abs: tol.abs * 0.05, rel: tol.rel * 0.05 };
    let inner = |theta: f64| -> Result<QuadResult> {
        let dir = Complex64::from_polar(1.0, theta);
        integrate_from(
            |r: f64| eval_kernel_derivative(spec, dir * r).map(|v| v.norm()).unwrap_or(f64::NAN),
            SemiInfiniteOptions::new(inner_tol).first_panel(scale),
        )
    };
    let failure: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
    let evals = std::sync::atomic::AtomicUsize::new(0);
    let outer = |theta: f64| -> f64 {
        let w = theta.cos().max(0.0).powf(s);
        match inner(theta) {
            Ok(r) => {
                evals.fetch_add(r.evaluations, std::sync::atomic::Ordering::Relaxed);
                w * r.value
            }
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                f64::NAN
            }
        }
    };
    let outer_tol = Tolerance { abs: tol.abs * 0.5, rel: tol.rel * 0.5 };
    let res = if symmetric {
        integrate(outer, 0.0, FRAC_PI_2, Tolerance { abs: outer_tol.abs * 0.5, ..outer_tol }, DEFAULT_BUDGET)
            .map(|r| QuadResult { value: 2.0 * r.value, abs_error_estimate: 2.0 * r.abs_error_estimate, ..r })
    } else {
        integrate(outer, -FRAC_PI_2, FRAC_PI_2, outer_tol, DEFAULT_BUDGET)
    };
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    let mut r = res?;
    r.evaluations += evals.into_inner();
    Ok(r)
}

/// Crossover abscissa `ξ₁(n)` with the quadratic's coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Xi1 {
    pub value: f64,
    /// `B` in `-ξ² + 2Bξ + C = 0`.
    pub linear: f64,
    /// `C` in `-ξ² + 2Bξ + C = 0`.
    pub constant: f64,
    /// `B² + C`.
    pub discriminant: f64,
    /// The quadratic has exactly one positive root.
    pub post_threshold: bool,
}

pub fn xi1(n: u64, alpha: f64, c: f64, omega: f64) -> Xi1 {
    let nf = n as f64;
    let linear = 2.0 * omega * nf / (alpha + 1.0) - c + omega;
    let constant = 4.0 * c * omega * nf / (alpha + 1.0) - (c - omega).powi(2);
    let value = linear + 2.0 * omega * (nf * (nf + alpha + 1.0)).sqrt() / (alpha + 1.0);
    Xi1 {
        value,
        linear,
        constant,
        discriminant: linear * linear + constant,
        post_threshold: constant > 0.0 || (constant == 0.0 && linear > 0.0),
    }
}

/// Smallest `n ≥ 1` past which `ξ₁(n)` is the unique positive root.
pub fn xi1_threshold(alpha: f64, c: f64, omega: f64) -> u64 {
    let bound = (c - omega).powi(2) * (alpha + 1.0) / (4.0 * c * omega);
    let mut n = (bound.floor() as u64).max(1);
    while !xi1(n, alpha, c, omega).post_threshold {
        n += 1;
    }
    while n > 1 && xi1(n - 1, alpha, c, omega).post_threshold {
        n -= 1;
    }
    n
}

/// `sup_{s ≥ 0} ((ξ+c−ω)²+s)^{n/2} / ((ξ+c+ω)²+s)^{(n+α+1)/2}` in closed form.
pub fn g_sup_closed(xi: f64, n: u64, alpha: f64, c: f64, omega: f64) -> Result<f64> {
    if !(xi > 0.0 && alpha > 0.0 && c > 0.0 && omega > 0.0) || n == 0 {
        return Err(invalid("g_sup_closed", "parameters must be positive"));
    }
    let x1 = xi1(n, alpha, c, omega);
    if !x1.post_threshold {
        return Err(Error::PreThreshold { n, threshold: xi1_threshold(alpha, c, omega) });
    }
    let nf = n as f64;
    let m = nf + alpha + 1.0;
    if xi <= x1.value {
        let ln = 0.5 * nf * (nf / m).ln() + 0.5 * (alpha + 1.0) * ((alpha + 1.0) / (4.0 * omega * m)).ln()
            - 0.5 * (alpha + 1.0) * (xi + c).ln();
        Ok(ln.exp())
    } else {
        let ln = nf * (xi + c - omega).abs().ln() - m * (xi + c + omega).ln();
        Ok(ln.exp())
    }
}

/// `sup_{s ≥ 0} e^{-tζ/(ζ²+s)} / (ζ²+s)^{β/2}`.
pub fn fta_sup_closed(zeta: f64, t: f64, beta: f64) -> Result<f64> {
    if !(zeta > 1.0 && beta > 0.0 && t >= 0.0) {
        return Err(invalid("fta_sup_closed", "need zeta > 1, beta > 0, t >= 0"));
    }
    if t <= beta * zeta / 2.0 {
        Ok((-t / zeta).exp() / zeta.powf(beta))
    } else {
        Ok((beta / (2.0 * std::f64::consts::E)).powf(beta / 2.0) * (t * zeta).powf(-beta / 2.0))
    }
}

pub fn beta_function(s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(invalid("beta_function", format!("arguments must be positive, got ({s}, {t})")));
    }
    Ok((ln_gamma(s) + ln_gamma(t) - ln_gamma(s + t)).exp())
}

/// `n^α B(n+1, α)`, which tends to `Γ(α)`.
pub fn stirling_ratio(n: f64, alpha: f64) -> Result<f64> {
    if !(n > 0.0 && alpha > 0.0) {
        return Err(invalid("stirling_ratio", "arguments must be positive"));
    }
    Ok((alpha * n.ln() + ln_gamma(n + 1.0) + ln_gamma(alpha) - ln_gamma(n + 1.0 + alpha)).exp())
}

pub fn rate_envelope_eval(env: RateEnvelope, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("{tau} must be positive")));
    }
    match env {
        RateEnvelope::FAlphaQ { alpha, q } => {
            if !(q > 0.0 && alpha > q) {
                return Err(invalid("F", format!("need alpha > q > 0, got alpha={alpha}, q={q}")));
            }
            if (alpha - 2.0 * q).abs() <= 1e-12 * alpha {
                Ok((tau + 1.0).ln() / tau.powf(q))
            } else if alpha < 2.0 * q {
                Ok(tau.powf(-(alpha - q)))
            } else {
                Ok(tau.powf(-alpha / 2.0))
            }
        }
        RateEnvelope::LAlphaBetaEps { alpha, beta, eps } => {
            if !(alpha > 0.0 && eps > 0.0 && beta > 0.0 && beta <= 1.0) {
                return Err(invalid("L", "need alpha, eps > 0 and beta in (0, 1]"));
            }
            let l = (tau + 1.0).ln();
            if alpha < (2.0 - beta) / 2.0 {
                Ok(l)
            } else {
                Ok(l.powf(2.0 * alpha / (2.0 - beta) + eps))
            }
        }
    }
}

/// `min{ω_min, c²/ω_max}`, which makes `c² ≥ ω̃_min ω_max` hold.
pub fn adjust_omega_min(c: f64, omega_min: f64, omega_max: f64) -> f64 {
    omega_min.min(c * c / omega_max)
}

/// `‖g‖_∞` over `ℂ₊`: the imaginary axis plus a sweep of interior lines.
pub fn sup_norm_estimate(spec: &KernelSpec) -> Result<f64> {
    spec.validate()?;
    let mut best = 0.0f64;
    for xi in [0.0, 0.01, 0.1, 1.0, 10.0] {
        let opts = SupOptions::new(DecayHint::Rational, 1e-12)
            .scale(xi + spec.natural_scale())
            .symmetric(spec.is_real_symmetric());
        let r = sup_on_vertical_line_with(
            |eta| eval_kernel(spec, Complex64::new(xi, eta)).map(|v| v.norm()).unwrap_or(0.0),
            &opts,
        );
        match r {
            Ok(r) => best = best.max(r.value),
            // bounded kernels that do not decay along the line (e.g. v_kernel → 1)
            Err(Error::SupBudget(_)) => {
                let far = eval_kernel(spec, Complex64::new(xi, 1e12))?.norm();
                best = best.max(far);
            }
            Err(e) => return Err(e),
        }
    }
    let at_inf = spec.limit_at_infinity().map(|v| v.norm()).unwrap_or(0.0);
    Ok(best.max(at_inf))
}

/// One JSON line per norm computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub quantity: String,
    pub kernel: KernelSpec,
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub tail_bound: f64,
}

impl AuditRecord {
    pub fn new(quantity: &str, kernel: &KernelSpec, r: &QuadResult) -> Self {
        Self {
            quantity: quantity.to_string(),
            kernel: kernel.clone(),
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
            evaluations: r.evaluations,
            tail_bound: r.tail_bound,
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn append_audit(path: &Path, records: &[AuditRecord]) -> Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in records {
        writeln!(f, "{}", r.to_json_line()?)?;
    }
    Ok(())
}

/// Lower bound `π/2^{(3s+4)/2} · sup_{ξ>0} ξ^n/(ξ+1)^{n+α}` for
/// `‖z^n/(z+1)^{n+α}‖_{D_{s,0}}`.
pub fn ds_lower_bound_example(n: u64, alpha: f64, s: f64) -> f64 {
    let nf = n as f64;
    // the sup sits at ξ = n/α (ξ → ∞ when α = 0)
    let peak = if alpha > 0.0 {
        let x = nf / alpha;
        (nf * x.ln() - (nf + alpha) * (x + 1.0).ln()).exp()
    } else {
        1.0
    };
    PI / 2f64.powf((3.0 * s + 4.0) / 2.0) * peak
}
