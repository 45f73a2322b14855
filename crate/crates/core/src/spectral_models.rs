//! Concrete operator models: diagonal spectra and small dense matrices.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::linalg;

pub const MAX_MATRIX: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Diagonal,
    Matrix,
}

/// Family parameters remembered by a model built from a named family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    CrandallPazyExample { gamma: f64, shift: f64 },
    PolynomialDecay { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `λ_k = k + shift + i k^γ`
    CrandallPazyExample {
        gamma: f64,
        shift: f64,
    },
    /// `λ_k = k^{-β} + i k`
    PolynomialDecay {
        beta: f64,
    },
    CustomList {
        eigenvalues: Vec<Complex64>,
    },
    MatrixFile {
        n: usize,
        entries: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    /// Truncation for generated families; ignored for lists and matrices.
    pub k: usize,
}

impl FamilySpec {
    pub fn crandall_pazy(gamma: f64, k: usize) -> Self {
        Self { family: Family::CrandallPazyExample { gamma, shift: 1.0 }, k }
    }

    pub fn polynomial_decay(beta: f64, k: usize) -> Self {
        Self { family: Family::PolynomialDecay { beta }, k }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Diagonal(Vec<Complex64>),
    Matrix(DMatrix<Complex64>),
}

/// A generator `-A` given by its spectrum or by a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    repr: Repr,
    growth_bound: f64,
    family: Option<FamilyTag>,
}

impl SpectrumModel {
    pub fn diagonal(eigenvalues: Vec<Complex64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::EmptyModel);
        }
        if eigenvalues.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
            return Err(invalid("eigenvalues", "non-finite entry"));
        }
        let growth_bound = -min_re(&eigenvalues);
        Ok(Self { repr: Repr::Diagonal(eigenvalues), growth_bound, family: None })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::diagonal(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(invalid("matrix", format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyModel);
        }
        if m.nrows() > MAX_MATRIX {
            return Err(Error::MatrixTooLarge(m.nrows()));
        }
        let growth_bound = -min_re(&linalg::eigenvalues(&m));
        Ok(Self { repr: Repr::Matrix(m), growth_bound, family: None })
    }

    pub fn kind(&self) -> ModelKind {
        match self.repr {
            Repr::Diagonal(_) => ModelKind::Diagonal,
            Repr::Matrix(_) => ModelKind::Matrix,
        }
    }

    /// Number of retained modes (diagonal) or matrix size.
    pub fn truncation(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(v) => v.len(),
            Repr::Matrix(m) => m.nrows(),
        }
    }

    pub fn family(&self) -> Option<FamilyTag> {
        self.family
    }

    /// Nominal Crandall-Pazy parameter from the family, if known.
    pub fn nominal_beta(&self) -> Option<f64> {
        match self.family? {
            FamilyTag::CrandallPazyExample { gamma, .. } => Some(1.0 / gamma),
            FamilyTag::PolynomialDecay { .. } => None,
        }
    }

    pub fn diagonal_eigenvalues(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Diagonal(v) => Some(v),
            Repr::Matrix(_) => None,
        }
    }

    pub fn matrix_ref(&self) -> Option<&DMatrix<Complex64>> {
        match &self.repr {
            Repr::Diagonal(_) => None,
            Repr::Matrix(m) => Some(m),
        }
    }

    /// Eigenvalues; computed by a Schur decomposition for matrix models.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match &self.repr {
            Repr::Diagonal(v) => v.clone(),
            Repr::Matrix(m) => linalg::eigenvalues(m),
        }
    }

    /// Dense matrix form; diagonal models become diagonal matrices.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        match &self.repr {
            Repr::Diagonal(v) => {
                if v.len() > MAX_MATRIX {
                    return Err(Error::MatrixTooLarge(v.len()));
                }
                Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v)))
            }
            Repr::Matrix(m) => Ok(m.clone()),
        }
    }

    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    /// Every eigenvalue has positive real part.
    pub fn is_invertible_stable(&self) -> bool {
        self.growth_bound < 0.0
    }

    /// Spectrum in the closed right half-plane.
    pub fn is_stable(&self) -> bool {
        self.growth_bound <= 0.0
    }

    /// Short content hash for provenance in curves and reports.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match &self.repr {
            Repr::Diagonal(v) => {
                h.update(b"diagonal");
                for l in v {
                    h.update(l.re.to_le_bytes());
                    h.update(l.im.to_le_bytes());
                }
            }
            Repr::Matrix(m) => {
                h.update(b"matrix");
                h.update((m.nrows() as u64).to_le_bytes());
                for l in m.iter() {
                    h.update(l.re.to_le_bytes());
                    h.update(l.im.to_le_bytes());
                }
            }
        }
        let mut out = String::with_capacity(16);
        for b in &h.finalize()[..8] {
            let _ = write!(out, "{b:02x}");
        }
        out
    }

    /// `A + s`, i.e. every eigenvalue moved by `s`.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        let out = match &self.repr {
            Repr::Diagonal(v) => Self::diagonal(v.iter().map(|l| l + s).collect())?,
            Repr::Matrix(m) => {
                let n = m.nrows();
                Self::matrix(m + DMatrix::identity(n, n) * Complex64::new(s, 0.0))?
            }
        };
        Ok(out)
    }
}

fn min_re(values: &[Complex64]) -> f64 {
    values.iter().map(|l| l.re).fold(f64::INFINITY, f64::min)
}

pub fn build_spectrum(spec: &FamilySpec) -> Result<SpectrumModel> {
    match &spec.family {
        Family::CrandallPazyExample { gamma, shift } => {
            if spec.k == 0 {
                return Err(invalid("K", "truncation must be at least 1"));
            }
            if !(*gamma >= 1.0) || !gamma.is_finite() {
                return Err(invalid("gamma", format!("{gamma} < 1")));
            }
            if !shift.is_finite() {
                return Err(invalid("shift", "not finite"));
            }
            let ev = (1..=spec.k)
                .map(|k| {
                    let k = k as f64;
                    Complex64::new(k + shift, k.powf(*gamma))
                })
                .collect();
            let mut m = SpectrumModel::diagonal(ev)?;
            m.family = Some(FamilyTag::CrandallPazyExample { gamma: *gamma, shift: *shift });
            Ok(m)
        }
        Family::PolynomialDecay { beta } => {
            if spec.k == 0 {
                return Err(invalid("K", "truncation must be at least 1"));
            }
            if !(*beta > 0.0) || !beta.is_finite() {
                return Err(invalid("beta", format!("{beta} must be > 0")));
            }
            let ev = (1..=spec.k)
                .map(|k| {
                    let k = k as f64;
                    Complex64::new(k.powf(-beta), k)
                })
                .collect();
            let mut m = SpectrumModel::diagonal(ev)?;
            m.family = Some(FamilyTag::PolynomialDecay { beta: *beta });
            Ok(m)
        }
        Family::CustomList { eigenvalues } => SpectrumModel::diagonal(eigenvalues.clone()),
        Family::MatrixFile { n, entries } => {
            if entries.len() != n * n {
                return Err(invalid("matrix", format!("expected {} entries, got {}", n * n, entries.len())));
            }
            SpectrumModel::matrix(DMatrix::from_row_slice(*n, *n, entries))
        }
    }
}

pub fn growth_bound(model: &SpectrumModel) -> f64 {
    model.growth_bound()
}

/// `A^α` by the principal branch (negative `α` gives `A^{-|α|}`).
pub fn fractional_scale(model: &SpectrumModel, alpha: f64) -> Result<SpectrumModel> {
    if !alpha.is_finite() {
        return Err(invalid("alpha", "not finite"));
    }
    let pow = |l: Complex64| -> Result<Complex64> {
        if l.im == 0.0 && l.re <= 0.0 {
            return Err(Error::BranchCut(l));
        }
        Ok((l.ln() * alpha).exp())
    };
    match &model.repr {
        Repr::Diagonal(v) => {
            let ev = v.iter().map(|&l| pow(l)).collect::<Result<Vec<_>>>()?;
            SpectrumModel::diagonal(ev)
        }
        Repr::Matrix(m) => SpectrumModel::matrix(linalg::normal_function(m, pow)?),
    }
}

/// `A^{-1}`.
pub fn invert_spectrum(model: &SpectrumModel) -> Result<SpectrumModel> {
    match &model.repr {
        Repr::Diagonal(v) => {
            if v.iter().any(|l| *l == Complex64::new(0.0, 0.0)) {
                return Err(Error::ZeroEigenvalue);
            }
            SpectrumModel::diagonal(v.iter().map(|l| l.inv()).collect())
        }
        Repr::Matrix(m) => {
            let n = m.nrows();
            let inv = m.clone().lu().solve(&DMatrix::identity(n, n)).ok_or(Error::ZeroEigenvalue)?;
            SpectrumModel::matrix(inv)
        }
    }
}

/// One complex number per line as `re im`; `#` starts a comment.
pub fn parse_custom_list(text: &str, origin: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = strip_comment(line);
        if line.is_empty() {
            continue;
        }
        let nums = parse_floats(line, origin, i + 1)?;
        match nums.as_slice() {
            [re] => out.push(Complex64::new(*re, 0.0)),
            [re, im] => out.push(Complex64::new(*re, *im)),
            _ => {
                return Err(Error::Parse {
                    path: origin.into(),
                    line: i + 1,
                    msg: format!("expected `re im`, found {} numbers", nums.len()),
                })
            }
        }
    }
    Ok(out)
}

/// Header line `n`, then `n*n` complex entries in row-major order as
/// `re im` pairs, any number per line.
pub fn parse_matrix_file(text: &str, origin: &str) -> Result<(usize, Vec<Complex64>)> {
    let mut n: Option<(usize, usize)> = None;
    let mut flat: Vec<(f64, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = strip_comment(line);
        if line.is_empty() {
            continue;
        }
        if n.is_none() {
            let v: usize = line.parse().map_err(|_| Error::Parse {
                path: origin.into(),
                line: i + 1,
                msg: format!("expected matrix size, found `{line}`"),
            })?;
            n = Some((v, i + 1));
            continue;
        }
        flat.extend(parse_floats(line, origin, i + 1)?.into_iter().map(|x| (x, i + 1)));
    }
    let (n, header_line) =
        n.ok_or_else(|| Error::Parse { path: origin.into(), line: 1, msg: "missing size header".into() })?;
    if n == 0 || n > MAX_MATRIX {
        return Err(Error::Parse {
            path: origin.into(),
            line: header_line,
            msg: format!("size {n} outside 1..={MAX_MATRIX}"),
        });
    }
    if flat.len() != 2 * n * n {
        let line = flat.last().map_or(header_line, |x| x.1);
        return Err(Error::Parse {
            path: origin.into(),
            line,
            msg: format!("expected {} numbers, found {}", 2 * n * n, flat.len()),
        });
    }
    let entries = flat.chunks(2).map(|p| Complex64::new(p[0].0, p[1].0)).collect();
    Ok((n, entries))
}

pub fn load_custom_list(path: &Path) -> Result<FamilySpec> {
    let text = std::fs::read_to_string(path)?;
    let eigenvalues = parse_custom_list(&text, &path.display().to_string())?;
    Ok(FamilySpec { k: eigenvalues.len(), family: Family::CustomList { eigenvalues } })
}

pub fn load_matrix_file(path: &Path) -> Result<FamilySpec> {
    let text = std::fs::read_to_string(path)?;
    let (n, entries) = parse_matrix_file(&text, &path.display().to_string())?;
    Ok(FamilySpec { k: n, family: Family::MatrixFile { n, entries } })
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_floats(line: &str, origin: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                path: origin.into(),
                line: lineno,
                msg: format!("not a number: `{s}`"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cp_family_small() {
        let m = build_spectrum(&FamilySpec::crandall_pazy(1.0, 3)).unwrap();
        assert_eq!(m.eigenvalues(), vec![c(2.0, 1.0), c(3.0, 2.0), c(4.0, 3.0)]);
        assert!(m.is_invertible_stable());
        let m = build_spectrum(&FamilySpec::crandall_pazy(2.0, 1)).unwrap();
        assert_eq!(m.eigenvalues(), vec![c(2.0, 1.0)]);
        assert_eq!(m.nominal_beta(), Some(0.5));
    }

    #[test]
    fn rejects_bad_families() {
        assert!(build_spectrum(&FamilySpec::crandall_pazy(1.0, 0)).is_err());
        assert!(build_spectrum(&FamilySpec::crandall_pazy(0.5, 3)).is_err());
    }

    #[test]
    fn growth_bounds() {
        assert_eq!(SpectrumModel::from_reals(&[1.0]).unwrap().growth_bound(), -1.0);
        let m = SpectrumModel::diagonal(vec![c(2.0, 1.0), c(3.0, 2.0)]).unwrap();
        assert_eq!(growth_bound(&m), -2.0);
        let mat = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(5.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let m = SpectrumModel::matrix(mat).unwrap();
        assert!((m.growth_bound() + 1.0).abs() < 1e-14);
        assert!(SpectrumModel::diagonal(vec![]).is_err());
    }

    #[test]
    fn fractional_examples() {
        let f = |v: Complex64, a: f64| {
            fractional_scale(&SpectrumModel::diagonal(vec![v]).unwrap(), a).unwrap().eigenvalues()[0]
        };
        assert!((f(c(4.0, 0.0), 0.5) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((f(c(0.0, 1.0), 2.0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((f(c(2.0, 1.0), -1.0) - c(0.4, -0.2)).norm() < 1e-15);
        let neg = SpectrumModel::from_reals(&[-1.0]).unwrap();
        assert!(matches!(fractional_scale(&neg, 0.5), Err(Error::BranchCut(_))));
    }

    #[test]
    fn fractional_rejects_non_normal_matrix() {
        let mat = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let m = SpectrumModel::matrix(mat).unwrap();
        assert!(matches!(fractional_scale(&m, 0.5), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn fractional_matrix_normal() {
        // symmetric [[2,1],[1,2]] has eigenvalues 1, 3
        let mat = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let m = SpectrumModel::matrix(mat.clone()).unwrap();
        let sq = fractional_scale(&m, 0.5).unwrap();
        let s = sq.matrix_ref().unwrap();
        assert!((s * s - mat).norm() < 1e-13);
    }

    #[test]
    fn inversion_examples() {
        let inv = |v: Complex64| invert_spectrum(&SpectrumModel::diagonal(vec![v]).unwrap()).unwrap().eigenvalues()[0];
        assert_eq!(inv(c(2.0, 0.0)), c(0.5, 0.0));
        assert!((inv(c(1.0, 1.0)) - c(0.5, -0.5)).norm() < 1e-16);
        let cp = build_spectrum(&FamilySpec::crandall_pazy(2.0, 10)).unwrap();
        let g = invert_spectrum(&cp).unwrap().growth_bound();
        // independent oracle: k = 10 gives 11/(121 + 10^4)
        let oracle = -(1..=10)
            .map(|k| {
                let k = k as f64;
                (k + 1.0) / ((k + 1.0).powi(2) + k.powi(4))
            })
            .fold(f64::INFINITY, f64::min);
        assert!((g - oracle).abs() < 1e-18);
        assert!((g + 0.001_086_8).abs() < 1e-6);
        assert!(matches!(
            invert_spectrum(&SpectrumModel::from_reals(&[0.0, 1.0]).unwrap()),
            Err(Error::ZeroEigenvalue)
        ));
    }

    #[test]
    fn file_formats() {
        let v = parse_custom_list("1 0\n# comment\n2.5 -1\n\n3\n", "mem").unwrap();
        assert_eq!(v, vec![c(1.0, 0.0), c(2.5, -1.0), c(3.0, 0.0)]);
        let e = parse_custom_list("1 2 3\n", "mem").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let (n, m) = parse_matrix_file("2\n1 0 5 0\n0 0 2 0\n", "mem").unwrap();
        assert_eq!(n, 2);
        assert_eq!(m[1], c(5.0, 0.0));
        assert!(parse_matrix_file("2\n1 0 5 0\n", "mem").is_err());
    }

    #[test]
    fn digest_is_stable_and_content_based() {
        let a = SpectrumModel::from_reals(&[1.0, 2.0]).unwrap();
        let b = SpectrumModel::from_reals(&[1.0, 2.0]).unwrap();
        let d = SpectrumModel::from_reals(&[1.0, 3.0]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), d.digest());
        assert_eq!(a.digest().len(), 16);
    }

    fn spectrum() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((0.01f64..100.0, -100.0f64..100.0).prop_map(|(r, i)| c(r, i)), 1..20)
    }

    proptest! {
        #[test]
        fn double_inversion(ev in spectrum()) {
            let m = SpectrumModel::diagonal(ev.clone()).unwrap();
            let back = invert_spectrum(&invert_spectrum(&m).unwrap()).unwrap();
            for (a, b) in ev.iter().zip(back.eigenvalues()) {
                prop_assert!((a - b).norm() <= 1e-14 * a.norm());
            }
        }

        #[test]
        fn fractional_exponent_laws(ev in spectrum(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            // principal arguments stay inside (-pi, pi) for |a|, |b| < 2 on the right half-plane
            let m = SpectrumModel::diagonal(ev).unwrap();
            let ma = fractional_scale(&m, a).unwrap();
            let mb = fractional_scale(&m, b).unwrap();
            let sum = fractional_scale(&m, a + b).unwrap();
            for ((x, y), z) in ma.eigenvalues().iter().zip(mb.eigenvalues()).zip(sum.eigenvalues()) {
                prop_assert!((x * y - z).norm() <= 1e-12 * z.norm());
            }
            let ok = m.eigenvalues().iter().all(|l| (a * l.arg()).abs() < std::f64::consts::PI);
            prop_assume!(ok);
            let composed = fractional_scale(&ma, b).unwrap();
            let prod = fractional_scale(&m, a * b).unwrap();
            for (x, y) in composed.eigenvalues().iter().zip(prod.eigenvalues()) {
                prop_assert!((x - y).norm() <= 1e-12 * y.norm());
            }
        }

        #[test]
        fn growth_bound_recomputation(ev in spectrum()) {
            let m = SpectrumModel::diagonal(ev.clone()).unwrap();
            let again = -ev.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(m.growth_bound(), again);
        }

        #[test]
        fn cp_growth_bound_is_minus_two(gamma in 1.0f64..4.0, k in 1usize..200) {
            let m = build_spectrum(&FamilySpec::crandall_pazy(gamma, k)).unwrap();
            prop_assert_eq!(m.growth_bound(), -2.0);
        }
    }
}
