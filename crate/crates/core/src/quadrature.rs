//! Adaptive Gauss-Kronrod integration on finite, semi-infinite and
//! doubly infinite intervals, plus sup-search along a half line.
//!
//! The semi-infinite driver integrates over dyadic panels
//! `[s + w 2^(j-1), s + w 2^j]` and stops once the geometric extrapolation
//! of the remaining mass, inflated by a factor of 4, is below half the
//! tolerance. Polynomially decaying integrands are handled without a fixed
//! cutoff.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    const ZERO: Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Integrand for f64 {
    const ZERO: Self = 0.0;
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Integrand for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T = f64> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub tail_bound: f64,
}

/// Mixed absolute/relative target: accept when `err <= max(abs, rel*|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    fn scaled(&self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel * factor }
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
/// Returns `(value, error, |f| mass)`.
pub fn gauss_kronrod_15<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = WGK[7] * fc.magnitude();
    let mut fv1 = [T::ZERO; 7];
    let mut fv2 = [T::ZERO; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let value = kronrod * half;
    let err = rescale_error(((kronrod - gauss) * half).magnitude(), resabs * abs_half, resasc * abs_half);
    (value, err, resabs * abs_half)
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection on `[a, b]`, worst segment first.
pub fn integrate<T: Integrand>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    tol: Tolerance,
    budget: usize,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult { value: T::ZERO, abs_error_estimate: 0.0, evaluations: 0, tail_bound: 0.0 });
    }
    let (value, err, _) = gauss_kronrod_15(&f, a, b);
    let mut evaluations = 15;
    if !value.finite() {
        return Err(Error::QuadratureNonConvergence { partial: f64::NAN, evaluations });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut frozen_value = T::ZERO;
    let mut frozen_err = 0.0;
    let mut total_value = value;
    let mut total_err = err;
    let mut refreshes = 0usize;

    loop {
        if total_err <= tol.target(total_value.magnitude()) || heap.is_empty() {
            break;
        }
        if evaluations + 30 > budget {
            return Err(Error::QuadratureNonConvergence { partial: total_value.magnitude(), evaluations });
        }
        let seg = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (seg.a + seg.b);
        let width = (seg.b - seg.a).abs();
        if width <= 4.0 * f64::EPSILON * seg.a.abs().max(seg.b.abs()).max(f64::MIN_POSITIVE) {
            // cannot bisect further; keep the segment as it is
            frozen_value += seg.value;
            frozen_err += seg.err;
            continue;
        }
        let (v1, e1, _) = gauss_kronrod_15(&f, seg.a, mid);
        let (v2, e2, _) = gauss_kronrod_15(&f, mid, seg.b);
        evaluations += 30;
        if !(v1.finite() && v2.finite()) {
            return Err(Error::QuadratureNonConvergence { partial: total_value.magnitude(), evaluations });
        }
        total_value = total_value + (v1 + v2) - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
        refreshes += 1;
        if refreshes.is_multiple_of(64) {
            // resum to keep the running totals from drifting
            total_value = frozen_value;
            total_err = frozen_err;
            for s in heap.iter() {
                total_value += s.value;
                total_err += s.err;
            }
        }
    }

    let mut value = frozen_value;
    let mut err = frozen_err;
    for s in heap.iter() {
        value += s.value;
        err += s.err;
    }
    Ok(QuadResult { value, abs_error_estimate: err.max(0.0), evaluations, tail_bound: 0.0 })
}

#[derive(Debug, Clone, Copy)]
pub struct SemiInfiniteOptions {
    pub start: f64,
    pub first_panel: f64,
    pub tol: Tolerance,
    pub budget: usize,
}

impl SemiInfiniteOptions {
    pub fn new(tol: Tolerance) -> Self {
        Self { start: 0.0, first_panel: 1.0, tol, budget: DEFAULT_BUDGET }
    }

    pub fn start(mut self, start: f64) -> Self {
        self.start = start;
        self
    }

    pub fn first_panel(mut self, w: f64) -> Self {
        self.first_panel = w;
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// `∫_0^∞ f` to absolute tolerance `tol`.
pub fn integrate_semi_infinite(f: impl Fn(f64) -> f64, tol: f64) -> Result<QuadResult> {
    integrate_from(f, SemiInfiniteOptions::new(Tolerance::absolute(tol)))
}

/// `∫_s^∞ f` over doubling panels with geometric tail extrapolation.
pub fn integrate_from<T: Integrand>(f: impl Fn(f64) -> T, opts: SemiInfiniteOptions) -> Result<QuadResult<T>> {
    const STALL_PANELS: usize = 24;
    const MAX_PANELS: usize = 1000;

    let s = opts.start;
    let w = opts.first_panel;
    let mut sum = T::ZERO;
    let mut err_sum = 0.0;
    let mut evaluations = 0usize;
    let mut prev_mag: Option<f64> = None;
    let mut prev_ratio_ok = false;
    let mut stalled = 0usize;
    let mut zero_run = 0usize;

    for j in 0..MAX_PANELS {
        let (lo, hi) = if j == 0 { (s, s + w) } else { (s + w * 2f64.powi(j as i32 - 1), s + w * 2f64.powi(j as i32)) };
        if !hi.is_finite() {
            break;
        }
        let share = 1.0 / (2.0 * (j as f64 + 1.0) * (j as f64 + 2.0));
        let panel_tol = Tolerance { abs: opts.tol.target(sum.magnitude()) * share, rel: opts.tol.rel * 0.25 };
        let remaining = opts.budget.saturating_sub(evaluations);
        let panel = integrate(&f, lo, hi, panel_tol, remaining).map_err(|e| match e {
            Error::QuadratureNonConvergence { partial, evaluations: ev } => {
                Error::QuadratureNonConvergence { partial: sum.magnitude() + partial, evaluations: evaluations + ev }
            }
            other => other,
        })?;
        evaluations += panel.evaluations;
        sum += panel.value;
        err_sum += panel.abs_error_estimate;
        let mag = panel.value.magnitude();

        if let Some(pm) = prev_mag {
            if mag == 0.0 && pm == 0.0 {
                zero_run += 1;
                if zero_run >= 2 && j >= 3 {
                    return Ok(QuadResult { value: sum, abs_error_estimate: err_sum, evaluations, tail_bound: 0.0 });
                }
            } else {
                zero_run = 0;
            }
            if pm > 0.0 {
                let rho = mag / pm;
                if rho < 1.0 {
                    stalled = 0;
                    let tail = panel.value * (rho / (1.0 - rho));
                    let tail_bound = 4.0 * tail.magnitude();
                    let target = opts.tol.target((sum + tail).magnitude());
                    if prev_ratio_ok && j >= 3 && tail_bound < 0.5 * target {
                        return Ok(QuadResult {
                            value: sum + tail,
                            abs_error_estimate: err_sum + tail_bound,
                            evaluations,
                            tail_bound,
                        });
                    }
                    prev_ratio_ok = true;
                } else {
                    prev_ratio_ok = false;
                    stalled += 1;
                    if stalled >= STALL_PANELS {
                        return Err(Error::Divergent { partial: sum.magnitude(), at: hi });
                    }
                }
            }
        }
        prev_mag = Some(mag);
        if evaluations >= opts.budget {
            break;
        }
    }
    Err(Error::QuadratureNonConvergence { partial: sum.magnitude(), evaluations })
}

/// `∫_{-∞}^{∞} f` split at the given breakpoints; `scale` sets the width of
/// the first tail panel.
pub fn integrate_real_line<T: Integrand>(
    f: impl Fn(f64) -> T,
    breakpoints: &[f64],
    scale: f64,
    tol: Tolerance,
    budget: usize,
) -> Result<QuadResult<T>> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    if pts.is_empty() {
        pts.push(0.0);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    let mut total = QuadResult { value: T::ZERO, abs_error_estimate: 0.0, evaluations: 0, tail_bound: 0.0 };
    let mut accumulate = |r: QuadResult<T>| {
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
        total.tail_bound += r.tail_bound;
    };
    let segs = pts.len() - 1;
    for w in pts.windows(2) {
        let r = integrate(&f, w[0], w[1], tol.scaled(0.5 / segs as f64), budget)?;
        accumulate(r);
    }
    let opts = SemiInfiniteOptions::new(tol.scaled(0.25)).first_panel(scale).budget(budget);
    accumulate(integrate_from(&f, opts.start(hi))?);
    accumulate(integrate_from(|u| f(lo - u), opts)?);
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayHint {
    Rational,
    Exponential,
}

#[derive(Debug, Clone, Copy)]
pub struct SupOptions {
    pub hint: DecayHint,
    pub tol: f64,
    pub scale: f64,
    pub symmetric: bool,
    pub budget: usize,
}

impl SupOptions {
    pub fn new(hint: DecayHint, tol: f64) -> Self {
        Self { hint, tol, scale: 1.0, symmetric: false, budget: 20_000 }
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn symmetric(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub argmax: f64,
    pub evaluations: usize,
}

/// `sup_η g(η)` over the whole line, both signs searched.
pub fn sup_on_vertical_line(g: impl Fn(f64) -> f64, hint: DecayHint, tol: f64) -> Result<f64> {
    Ok(sup_on_vertical_line_with(g, &SupOptions::new(hint, tol))?.value)
}

pub fn sup_on_vertical_line_with(g: impl Fn(f64) -> f64, opts: &SupOptions) -> Result<SupResult> {
    let up = sup_on_half_line(&g, 0.0, opts)?;
    if opts.symmetric {
        return Ok(up);
    }
    let down = sup_on_half_line(|u| g(-u), 0.0, opts)?;
    let mut best = if down.value > up.value { SupResult { argmax: -down.argmax, ..down } } else { up };
    best.evaluations = up.evaluations + down.evaluations;
    Ok(best)
}

/// `sup_{u ≥ origin} h(u)`: logarithmic grid in `u - origin`, grown until the
/// boundary value drops below `tol` times the running max, then golden-section
/// refinement of up to 8 local-max brackets.
pub fn sup_on_half_line(h: impl Fn(f64) -> f64, origin: f64, opts: &SupOptions) -> Result<SupResult> {
    let ratio: f64 = match opts.hint {
        DecayHint::Rational => 2f64.powf(0.25),
        DecayHint::Exponential => 2f64.powf(0.2),
    };
    let lo = opts.scale * 1e-3;
    let mut xs = vec![origin];
    let mut vs = vec![h(origin)];
    let mut best = vs[0];
    let mut best_idx = 0usize;
    let mut u = lo;
    loop {
        let v = h(origin + u);
        if v.is_nan() {
            return Err(Error::SupBudget(xs.len()));
        }
        xs.push(origin + u);
        vs.push(v);
        if v > best {
            best = v;
            best_idx = xs.len() - 1;
        }
        let past_peak = xs.len() > best_idx + 8;
        if u >= 4.0 * opts.scale && past_peak {
            if best == 0.0 && u >= 1e6 * opts.scale {
                break;
            }
            if best > 0.0 && v < opts.tol * best {
                break;
            }
        }
        if u > 1e12 * opts.scale || xs.len() >= opts.budget {
            if best == 0.0 {
                break;
            }
            return Err(Error::SupBudget(xs.len()));
        }
        u *= ratio;
    }
    let mut evaluations = xs.len();
    if best == 0.0 {
        return Ok(SupResult { value: 0.0, argmax: origin, evaluations });
    }

    let n = xs.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || vs[i] >= vs[i - 1];
            let right = i + 1 == n || vs[i] >= vs[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| vs[b].total_cmp(&vs[a]).then(a.cmp(&b)));
    peaks.truncate(8);

    let mut arg = xs[best_idx];
    for &i in &peaks {
        let a = if i == 0 { xs[0] } else { xs[i - 1] };
        let b = if i + 1 == n { xs[i] } else { xs[i + 1] };
        let (x, v, ev) = golden_section_max(&h, a, b);
        evaluations += ev;
        if v > best {
            best = v;
            arg = x;
        }
    }
    Ok(SupResult { value: best, argmax: arg, evaluations })
}

/// Golden-section search for a maximum on `[a, b]`.
pub fn golden_section_max(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = h(c);
    let mut fd = h(d);
    let mut evals = 2;
    while (b - a).abs() > 1e-11 * (a.abs() + b.abs()) + 1e-300 && evals < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d);
        }
        evals += 1;
    }
    if fc > fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

/// Max of `h` on `[lo, hi]`: `points` samples spaced evenly in `ln(1 + s − lo)`,
/// then golden-section refinement around the best sample.
pub fn scan_max(h: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let n = points.max(2);
    let span = (hi - lo).ln_1p();
    let xs: Vec<f64> = (0..=n).map(|i| lo + (span * i as f64 / n as f64).exp_m1()).collect();
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = h(x);
        if v > bv {
            bi = i;
            bv = v;
        }
    }
    let (_, v, _) = golden_section_max(&h, xs[bi.saturating_sub(1)], xs[(bi + 1).min(n)]);
    bv.max(v)
}
