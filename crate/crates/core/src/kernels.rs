//! Scalar holomorphic kernels applied to spectral models.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Step parameters `(ω_k)` with certified bounds `[omega_min, omega_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSequence {
    values: Vec<f64>,
    cyclic: bool,
    omega_min: f64,
    omega_max: f64,
}

impl OmegaSequence {
    pub fn constant(omega: f64) -> Result<Self> {
        Self::cyclic(vec![omega])
    }

    /// Infinite sequence repeating `pattern`.
    pub fn cyclic(pattern: Vec<f64>) -> Result<Self> {
        let (lo, hi) = bounds(&pattern)?;
        Self::build(pattern, true, lo, hi)
    }

    /// Finite sequence; `n` may not exceed its length.
    pub fn finite(values: Vec<f64>) -> Result<Self> {
        let (lo, hi) = bounds(&values)?;
        Self::build(values, false, lo, hi)
    }

    /// Finite or cyclic sequence with wider certified bounds than its values.
    pub fn with_bounds(values: Vec<f64>, cyclic: bool, omega_min: f64, omega_max: f64) -> Result<Self> {
        Self::build(values, cyclic, omega_min, omega_max)
    }

    fn build(values: Vec<f64>, cyclic: bool, omega_min: f64, omega_max: f64) -> Result<Self> {
        if !(omega_min > 0.0 && omega_min <= omega_max && omega_max.is_finite()) {
            return Err(invalid("omegas", format!("bad bounds [{omega_min}, {omega_max}]")));
        }
        if let Some(v) = values.iter().find(|&&v| !(v >= omega_min && v <= omega_max)) {
            return Err(invalid("omegas", format!("{v} outside [{omega_min}, {omega_max}]")));
        }
        Ok(Self { values, cyclic, omega_min, omega_max })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of available terms; `None` for cyclic sequences.
    pub fn len(&self) -> Option<usize> {
        (!self.cyclic).then_some(self.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ω_k` for 1-based `k`.
    pub fn get(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return None;
        }
        if self.cyclic {
            Some(self.values[(k - 1) % self.values.len()])
        } else {
            self.values.get(k - 1).copied()
        }
    }

    pub fn check_length(&self, n: u64) -> Result<()> {
        if !self.cyclic && n > self.values.len() as u64 {
            return Err(invalid("n", format!("{n} exceeds the {} available step parameters", self.values.len())));
        }
        Ok(())
    }

    /// Distinct values among the first `n` terms with multiplicities, in order
    /// of first appearance.
    pub fn groups(&self, n: u64) -> Vec<(f64, u64)> {
        let (src, counts): (&[f64], Vec<u64>) = if self.cyclic {
            let p = self.values.len() as u64;
            let counts = (0..p).map(|i| n / p + u64::from(i < n % p)).collect();
            (&self.values, counts)
        } else {
            let m = (n as usize).min(self.values.len());
            (&self.values[..m], vec![1; m])
        };
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut out: Vec<(f64, u64)> = Vec::new();
        for (&v, &c) in src.iter().zip(&counts) {
            if c == 0 {
                continue;
            }
            match index.get(&v.to_bits()) {
                Some(&i) => out[i].1 += c,
                None => {
                    index.insert(v.to_bits(), out.len());
                    out.push((v, c));
                }
            }
        }
        out
    }
}

fn bounds(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(invalid("omegas", "empty sequence"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(invalid("omegas", "values must be positive and finite"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Constant {
        value: Complex64,
    },
    /// `e^{-tλ}`
    Semigroup {
        t: f64,
    },
    /// `λ e^{-tλ}`
    GeneratorSemigroup {
        t: f64,
    },
    /// `(λ + z)^{-1}`
    Resolvent {
        z: Complex64,
    },
    /// `∏_{k ≤ n} (λ - ω_k)/(λ + ω_k)`
    CayleyProduct {
        omegas: OmegaSequence,
        n: u64,
    },
    /// `e^{-t/(λ + offset)}`; offset 0 is the plain inverse-generator kernel.
    InverseSemigroup {
        t: f64,
        offset: f64,
    },
    /// `(z+c+ω_anchor)^{-α} ∏_{k ≤ n} (z+c-ω_k)/(z+c+ω_k)`
    Fnaw {
        n: u64,
        alpha: f64,
        c: f64,
        omegas: OmegaSequence,
        anchor: Anchor,
    },
    /// `e^{-t/(z+1)} (z+1)^{-α}`
    Fta {
        t: f64,
        alpha: f64,
    },
    /// `((z+d)/(z+c))^α`
    VKernel {
        alpha: f64,
        c: f64,
        d: f64,
    },
    /// `(z+c)^{-α}`
    WKernel {
        alpha: f64,
        c: f64,
    },
    /// `(λ+z)^{-α}`
    FracResolvent {
        alpha: f64,
        z: Complex64,
    },
    Product(Vec<KernelSpec>),
}

impl KernelSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value: Complex64::new(value, 0.0) }
    }

    pub fn resolvent(z: f64) -> Self {
        Self::Resolvent { z: Complex64::new(z, 0.0) }
    }

    pub fn inverse_semigroup(t: f64) -> Self {
        Self::InverseSemigroup { t, offset: 0.0 }
    }

    pub fn frac_power(alpha: f64) -> Self {
        Self::FracResolvent { alpha, z: ZERO }
    }

    pub fn cayley(omegas: OmegaSequence, n: u64) -> Self {
        Self::CayleyProduct { omegas, n }
    }

    /// `∏ V_{ω_k}(λ) · λ^{-α}`
    pub fn cayley_decay(omegas: OmegaSequence, n: u64, alpha: f64) -> Self {
        Self::Product(vec![Self::CayleyProduct { omegas, n }, Self::frac_power(alpha)])
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Semigroup { .. } => "semigroup",
            Self::GeneratorSemigroup { .. } => "generator_semigroup",
            Self::Resolvent { .. } => "resolvent",
            Self::CayleyProduct { .. } => "cayley_product",
            Self::InverseSemigroup { .. } => "inverse_semigroup",
            Self::Fnaw { .. } => "fnaw",
            Self::Fta { .. } => "fta",
            Self::VKernel { .. } => "v_kernel",
            Self::WKernel { .. } => "w_kernel",
            Self::FracResolvent { .. } => "frac_resolvent",
            Self::Product(_) => "product",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { value } => finite_c("value", *value),
            Self::Semigroup { t } | Self::GeneratorSemigroup { t } => nonneg("t", *t),
            Self::Resolvent { z } => finite_c("z", *z),
            Self::CayleyProduct { omegas, n } => omegas.check_length(*n),
            Self::InverseSemigroup { t, offset } => {
                nonneg("t", *t)?;
                finite("offset", *offset)
            }
            Self::Fnaw { n, alpha, c, omegas, .. } => {
                omegas.check_length(*n)?;
                nonneg("alpha", *alpha)?;
                positive("c", *c)
            }
            Self::Fta { t, alpha } => {
                nonneg("t", *t)?;
                positive("alpha", *alpha)
            }
            Self::VKernel { alpha, c, d } => {
                positive("alpha", *alpha)?;
                positive("d", *d)?;
                if c < d {
                    return Err(invalid("c", format!("need c >= d, got c={c}, d={d}")));
                }
                Ok(())
            }
            Self::WKernel { alpha, c } => {
                positive("alpha", *alpha)?;
                positive("c", *c)
            }
            Self::FracResolvent { alpha, z } => {
                finite("alpha", *alpha)?;
                finite_c("z", *z)
            }
            Self::Product(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    /// True when `f(conj z) = conj f(z)`, so sups over vertical lines only
    /// need `η ≥ 0`.
    pub fn is_real_symmetric(&self) -> bool {
        match self {
            Self::Constant { value } => value.im == 0.0,
            Self::Resolvent { z } | Self::FracResolvent { z, .. } => z.im == 0.0,
            Self::Product(parts) => parts.iter().all(|p| p.is_real_symmetric()),
            _ => true,
        }
    }

    /// Whether a closed-form derivative is available.
    pub fn has_derivative(&self) -> bool {
        match self {
            Self::Constant { .. }
            | Self::Resolvent { .. }
            | Self::Fnaw { .. }
            | Self::Fta { .. }
            | Self::VKernel { .. }
            | Self::WKernel { .. }
            | Self::FracResolvent { .. } => true,
            Self::Product(parts) => parts.iter().all(|p| p.has_derivative()),
            _ => false,
        }
    }

    /// Imaginary parts of the kernel's singularities; vertical-line
    /// integrands concentrate near `η = -Im(pole)`.
    pub fn feature_heights(&self) -> Vec<f64> {
        match self {
            Self::Resolvent { z } | Self::FracResolvent { z, .. } => vec![-z.im],
            Self::Product(parts) => parts.iter().flat_map(|p| p.feature_heights()).collect(),
            _ => vec![0.0],
        }
    }

    /// Typical length scale of the kernel's features in `ℂ₊`.
    pub fn natural_scale(&self) -> f64 {
        match self {
            Self::Resolvent { z } | Self::FracResolvent { z, .. } => z.norm().max(1.0),
            Self::Fnaw { c, omegas, .. } => c + omegas.omega_max(),
            Self::VKernel { c, .. } | Self::WKernel { c, .. } => c.max(1.0),
            Self::Fta { t, .. } => 1.0 + t,
            Self::Product(parts) => parts.iter().map(|p| p.natural_scale()).fold(1.0, f64::max),
            _ => 1.0,
        }
    }

    /// `lim f(R)` as `R → +∞` along the real axis, where the library knows it.
    pub fn limit_at_infinity(&self) -> Result<Complex64> {
        match self {
            Self::Constant { value } => Ok(*value),
            Self::Semigroup { t } | Self::GeneratorSemigroup { t } if *t > 0.0 => Ok(ZERO),
            Self::Semigroup { .. } => Ok(ONE),
            Self::Resolvent { .. } | Self::Fta { .. } | Self::WKernel { .. } => Ok(ZERO),
            Self::CayleyProduct { .. } | Self::InverseSemigroup { .. } | Self::VKernel { .. } => Ok(ONE),
            Self::Fnaw { alpha, .. } => Ok(if *alpha > 0.0 { ZERO } else { ONE }),
            Self::FracResolvent { alpha, .. } => Ok(if *alpha > 0.0 {
                ZERO
            } else if *alpha == 0.0 {
                ONE
            } else {
                return Err(Error::Unsupported("frac_resolvent with alpha < 0 is unbounded".into()));
            }),
            Self::Product(parts) => parts.iter().try_fold(ONE, |acc, p| Ok(acc * p.limit_at_infinity()?)),
            Self::GeneratorSemigroup { .. } => {
                Err(Error::Unsupported("generator_semigroup at t = 0 is unbounded".into()))
            }
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        eval_kernel(self, lambda)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        eval_kernel_derivative(self, z)
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is not finite")))
    }
}

fn finite_c(name: &'static str, v: Complex64) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is not finite")))
    }
}

fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be >= 0")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be > 0")))
    }
}

fn domain(kernel: &'static str, at: Complex64, detail: impl Into<String>) -> Error {
    Error::KernelDomain { kernel, at, detail: detail.into() }
}

/// Principal-branch `w^p`, rejecting the closed negative real axis unless
/// `p` is an integer.
fn cpow(kernel: &'static str, w: Complex64, p: f64) -> Result<Complex64> {
    if p == 0.0 {
        return Ok(ONE);
    }
    if w == ZERO {
        return if p > 0.0 { Ok(ZERO) } else { Err(domain(kernel, w, "power of zero")) };
    }
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        return Ok(w.powi(p as i32));
    }
    if w.im == 0.0 && w.re < 0.0 {
        return Err(domain(kernel, w, "branch cut of the principal power"));
    }
    Ok((w.ln() * p).exp())
}

fn recip(kernel: &'static str, w: Complex64, detail: &str) -> Result<Complex64> {
    if w == ZERO {
        Err(domain(kernel, w, detail.to_string()))
    } else {
        Ok(w.inv())
    }
}

/// `∏ ((w-ω)/(w+ω))^m` over the groups, and its derivative in `w` if asked.
fn cayley_groups(
    kernel: &'static str,
    w: Complex64,
    groups: &[(f64, u64)],
    want_derivative: bool,
) -> Result<(Complex64, Complex64)> {
    let mut factors = Vec::with_capacity(groups.len());
    let mut dfactors = Vec::with_capacity(groups.len());
    for &(om, m) in groups {
        let den = w + om;
        if den == ZERO {
            return Err(domain(kernel, w, format!("pole at -omega = {}", -om)));
        }
        let u = (w - om) / den;
        factors.push(upow(u, m));
        if want_derivative {
            let du = Complex64::new(2.0 * om, 0.0) / (den * den);
            dfactors.push(upow(u, m - 1) * du * m as f64);
        }
    }
    let value = factors.iter().fold(ONE, |a, &b| a * b);
    if !want_derivative {
        return Ok((value, ZERO));
    }
    // product rule via prefix/suffix products so that vanishing factors
    // need no division
    let g = factors.len();
    let mut suffix = vec![ONE; g + 1];
    for i in (0..g).rev() {
        suffix[i] = suffix[i + 1] * factors[i];
    }
    let mut prefix = ONE;
    let mut d = ZERO;
    for i in 0..g {
        d += prefix * dfactors[i] * suffix[i + 1];
        prefix *= factors[i];
    }
    Ok((value, d))
}

fn upow(u: Complex64, m: u64) -> Complex64 {
    if m <= u32::MAX as u64 {
        u.powu(m as u32)
    } else {
        let hi = u.powu(u32::MAX);
        hi.powu((m / u32::MAX as u64) as u32) * u.powu((m % u32::MAX as u64) as u32)
    }
}

fn anchor_value(omegas: &OmegaSequence, anchor: Anchor) -> f64 {
    match anchor {
        Anchor::Min => omegas.omega_min(),
        Anchor::Max => omegas.omega_max(),
    }
}

pub fn eval_kernel(spec: &KernelSpec, lambda: Complex64) -> Result<Complex64> {
    let name = spec.name();
    match spec {
        KernelSpec::Constant { value } => Ok(*value),
        KernelSpec::Semigroup { t } => Ok((-lambda * *t).exp()),
        KernelSpec::GeneratorSemigroup { t } => Ok(lambda * (-lambda * *t).exp()),
        KernelSpec::Resolvent { z } => recip(name, lambda + z, "pole of the resolvent"),
        KernelSpec::CayleyProduct { omegas, n } => {
            omegas.check_length(*n)?;
            Ok(cayley_groups(name, lambda, &omegas.groups(*n), false)?.0)
        }
        KernelSpec::InverseSemigroup { t, offset } => {
            if *t == 0.0 {
                return Ok(ONE);
            }
            let r = recip(name, lambda + offset, "essential singularity at 0")?;
            Ok((-r * *t).exp())
        }
        KernelSpec::Fnaw { n, alpha, c, omegas, anchor } => {
            omegas.check_length(*n)?;
            let w = lambda + c;
            let head = cpow(name, w + anchor_value(omegas, *anchor), -alpha)?;
            Ok(head * cayley_groups(name, w, &omegas.groups(*n), false)?.0)
        }
        KernelSpec::Fta { t, alpha } => {
            let w = lambda + 1.0;
            let r = recip(name, w, "pole at -1")?;
            Ok((-r * *t).exp() * cpow(name, w, -alpha)?)
        }
        KernelSpec::VKernel { alpha, c, d } => {
            let den = lambda + c;
            if den == ZERO {
                return Err(domain(name, lambda, "pole at -c"));
            }
            cpow(name, (lambda + d) / den, *alpha)
        }
        KernelSpec::WKernel { alpha, c } => cpow(name, lambda + c, -alpha),
        KernelSpec::FracResolvent { alpha, z } => cpow(name, lambda + z, -alpha),
        KernelSpec::Product(parts) => parts.iter().try_fold(ONE, |acc, p| Ok(acc * eval_kernel(p, lambda)?)),
    }
}

pub fn eval_kernel_derivative(spec: &KernelSpec, z: Complex64) -> Result<Complex64> {
    let name = spec.name();
    match spec {
        KernelSpec::Constant { .. } => Ok(ZERO),
        KernelSpec::Resolvent { z: s } => {
            let r = recip(name, z + s, "pole of the resolvent")?;
            Ok(-r * r)
        }
        KernelSpec::FracResolvent { alpha, z: s } => {
            let w = z + s;
            Ok(-cpow(name, w, -alpha - 1.0)? * *alpha)
        }
        KernelSpec::WKernel { alpha, c } => Ok(-cpow(name, z + c, -alpha - 1.0)? * *alpha),
        KernelSpec::VKernel { alpha, c, d } => {
            let zc = z + c;
            let zd = z + d;
            if zc == ZERO || zd == ZERO {
                return Err(domain(name, z, "pole of the derivative"));
            }
            let v = cpow(name, zd / zc, *alpha)?;
            Ok(v * (*alpha * (c - d)) / (zd * zc))
        }
        KernelSpec::Fta { t, alpha } => {
            let w = z + 1.0;
            let r = recip(name, w, "pole at -1")?;
            let e = (-r * *t).exp();
            let base = e * cpow(name, w, -alpha - 1.0)?;
            Ok(base * r * *t - base * *alpha)
        }
        KernelSpec::Fnaw { n, alpha, c, omegas, anchor } => {
            omegas.check_length(*n)?;
            let w = z + c;
            let a = w + anchor_value(omegas, *anchor);
            let head = cpow(name, a, -alpha)?;
            let dhead = if *alpha == 0.0 { ZERO } else { -cpow(name, a, -alpha - 1.0)? * *alpha };
            let (p, dp) = cayley_groups(name, w, &omegas.groups(*n), true)?;
            Ok(dhead * p + head * dp)
        }
        KernelSpec::Product(parts) => {
            let vals = parts.iter().map(|p| eval_kernel(p, z)).collect::<Result<Vec<_>>>()?;
            let g = vals.len();
            let mut suffix = vec![ONE; g + 1];
            for i in (0..g).rev() {
                suffix[i] = suffix[i + 1] * vals[i];
            }
            let mut prefix = ONE;
            let mut d = ZERO;
            for (i, p) in parts.iter().enumerate() {
                d += prefix * eval_kernel_derivative(p, z)? * suffix[i + 1];
                prefix *= vals[i];
            }
            Ok(d)
        }
        KernelSpec::Semigroup { .. }
        | KernelSpec::GeneratorSemigroup { .. }
        | KernelSpec::CayleyProduct { .. }
        | KernelSpec::InverseSemigroup { .. } => {
            Err(Error::Unsupported(format!("no closed-form derivative for {name}")))
        }
    }
}
