//! Hypergeometric functions of one Hermitian matrix argument.
//!
//! Functions depend on the argument only through its eigenvalues, so every
//! entry point takes an [`EigenSpectrum`]. The general route is the zonal
//! series Σₖ Σ_{κ⊢k} [a]_κ/[b]_κ · C̃_κ(X)/k!, with the complex zonal
//! polynomial written as C̃_κ = f^κ s_κ (Schur polynomial times the number of
//! standard Young tableaux), hence C̃_κ/k! = s_κ/H_κ with H_κ the hook
//! product. For ₁F̃₁ with distinct eigenvalues a determinant of scalar Kummer
//! functions is much cheaper and is exposed separately.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::ln_det_real;
use crate::logval::{LogAccumulator, LogValue};
use crate::special::{is_nonpositive_integer, ln_hyp_0f1, ln_kummer_1f1, log_pochhammer, SeriesPolicy};

/// Highest total weight the zonal series is allowed to reach.
pub const MAX_SERIES_WEIGHT: usize = 120;

/// Minimum relative eigenvalue gap accepted by the determinant-ratio formula.
pub const DETRATIO_MIN_GAP: f64 = 1e-6;

// Consecutive negligible weight groups that end the zonal series.
const SMALL_GROUPS_TO_STOP: usize = 2;

// Bialternant Schur evaluation is used while Π max(|yᵢ|,|yⱼ|)/|yᵢ−yⱼ| stays below this.
const BIALTERNANT_MAX_CONDITION: f64 = 1e3;

/// Integer partition κ = (k₁ ≥ k₂ ≥ … > 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("partition parts must be non-increasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// κ'ⱼ = #{i : kᵢ ≥ j}.
    pub fn conjugate(&self) -> Partition {
        let first = self.parts.first().copied().unwrap_or(0);
        Partition {
            parts: (1..=first).map(|j| self.parts.iter().filter(|&&p| p >= j).count()).collect(),
        }
    }

    /// ln Π over cells of the hook length.
    pub fn ln_hook_product(&self) -> f64 {
        let conj = self.conjugate();
        let mut acc = 0.0;
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                let hook = row - j + conj.parts[j] - i - 1;
                acc += (hook as f64).ln();
            }
        }
        acc
    }

    /// Number of standard Young tableaux, k!/H_κ.
    pub fn standard_tableaux(&self) -> f64 {
        let ln_kfact: f64 = (1..=self.weight()).map(|i| (i as f64).ln()).sum();
        (ln_kfact - self.ln_hook_product()).exp().round()
    }
}

fn fill_partitions(remaining: usize, max_part: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: prefix.clone() });
        return;
    }
    if slots == 0 {
        return;
    }
    for first in (1..=remaining.min(max_part)).rev() {
        // The rest must fit into `slots - 1` parts no larger than `first`.
        if (remaining - first) > first * (slots - 1) {
            break;
        }
        prefix.push(first);
        fill_partitions(remaining - first, first, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// All partitions of `k` with at most `max_parts` parts, in decreasing
/// lexicographic order ({4}, {3,1}, {2,2}, …).
pub fn enumerate_partitions(k: usize, max_parts: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    fill_partitions(k, k, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Real eigenvalues of a Hermitian argument, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("spectrum must be non-empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("spectrum contains non-finite value {v}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(EigenSpectrum { values })
    }

    /// Like [`EigenSpectrum::new`] but also requires every value to be ≥ 0.
    pub fn nonnegative(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values)?;
        if s.values[0] < 0.0 {
            return Err(Error::Domain(format!("Gram spectrum has negative value {}", s.values[0])));
        }
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    /// Spectrum of c·X.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    /// Smallest pairwise gap relative to the larger magnitude of the pair.
    pub fn min_relative_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for w in self.values.windows(2) {
            let scale = w[0].abs().max(w[1].abs());
            let g = if scale == 0.0 { 0.0 } else { (w[1] - w[0]) / scale };
            gap = gap.min(g);
        }
        gap
    }
}

/// Generalized Pochhammer symbol [a]_κ = Πᵢ (a − i + 1)_{kᵢ}.
pub fn complex_pochhammer(a: f64, kappa: &Partition) -> LogValue {
    kappa
        .parts
        .iter()
        .enumerate()
        .fold(LogValue::ONE, |acc, (i, &k)| acc * log_pochhammer(a - i as f64, k))
}

/// Schur polynomial evaluator for one spectrum.
///
/// Values are normalized by ρ = max|xᵢ| and the homogeneity
/// s_κ(x) = ρᵏ s_κ(x/ρ) restores the scale in log form.
struct SchurEvaluator {
    y: Vec<f64>,
    ln_rho: f64,
    bialternant: bool,
    // Complete homogeneous h_k(y) for k = 0..h.len().
    h: Vec<f64>,
}

impl SchurEvaluator {
    fn new(x: &[f64]) -> Self {
        let rho = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let y: Vec<f64> = if rho > 0.0 { x.iter().map(|v| v / rho).collect() } else { x.to_vec() };
        let mut condition = 1.0_f64;
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                let d = (y[i] - y[j]).abs();
                condition *= if d == 0.0 { f64::INFINITY } else { y[i].abs().max(y[j].abs()) / d };
            }
        }
        SchurEvaluator {
            y,
            ln_rho: if rho > 0.0 { rho.ln() } else { f64::NEG_INFINITY },
            bialternant: condition < BIALTERNANT_MAX_CONDITION,
            h: vec![1.0],
        }
    }

    fn ensure_h(&mut self, upto: usize) {
        if self.h.len() > upto {
            return;
        }
        // h_k(y₁..yⱼ) = h_k(y₁..yⱼ₋₁) + yⱼ h_{k−1}(y₁..yⱼ)
        let mut h = vec![0.0; upto + 1];
        h[0] = 1.0;
        for &yj in &self.y {
            for k in 1..=upto {
                h[k] += yj * h[k - 1];
            }
        }
        self.h = h;
    }

    fn jacobi_trudi(&mut self, kappa: &Partition) -> LogValue {
        let l = kappa.len();
        let upto = kappa.parts.first().copied().unwrap_or(0) + l;
        self.ensure_h(upto);
        let h = &self.h;
        let m = DMatrix::from_fn(l, l, |i, j| {
            let idx = kappa.parts[i] as isize - i as isize + j as isize;
            if idx < 0 {
                0.0
            } else {
                h[idx as usize]
            }
        });
        ln_det_real(m)
    }

    fn bialternant_value(&self, kappa: &Partition) -> LogValue {
        let n = self.y.len();
        let exponent = |i: usize| kappa.parts.get(i).copied().unwrap_or(0) + n - 1 - i;
        let num = DMatrix::from_fn(n, n, |i, j| self.y[j].powi(exponent(i) as i32));
        let mut vandermonde = LogValue::ONE;
        for i in 0..n {
            for j in i + 1..n {
                vandermonde = vandermonde * LogValue::from_f64(self.y[i] - self.y[j]);
            }
        }
        ln_det_real(num) / vandermonde
    }

    /// s_κ(x) in log form.
    fn eval(&mut self, kappa: &Partition) -> LogValue {
        if kappa.is_empty() {
            return LogValue::ONE;
        }
        if kappa.len() > self.y.len() || self.ln_rho == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        let normalized = if self.bialternant {
            self.bialternant_value(kappa)
        } else {
            self.jacobi_trudi(kappa)
        };
        normalized * LogValue::from_ln(kappa.weight() as f64 * self.ln_rho)
    }
}

/// Schur polynomial s_κ evaluated at the eigenvalues.
pub fn schur_polynomial(kappa: &Partition, spectrum: &EigenSpectrum) -> f64 {
    SchurEvaluator::new(spectrum.values()).eval(kappa).to_f64()
}

/// Complex zonal polynomial C̃_κ(X) = f^κ s_κ(λ), normalized so that
/// Σ_{κ⊢k} C̃_κ(X) = (tr X)ᵏ.
pub fn zonal_polynomial(kappa: &Partition, spectrum: &EigenSpectrum) -> Result<f64> {
    if kappa.len() > spectrum.len() {
        return Err(Error::Domain(format!(
            "partition with {} parts used with a {}-dimensional argument",
            kappa.len(),
            spectrum.len()
        )));
    }
    Ok(kappa.standard_tableaux() * schur_polynomial(kappa, spectrum))
}

/// Which of the three supported functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HypKind {
    /// ₀F̃₁(b; X)
    ZeroFOne { b: f64 },
    /// ₁F̃₁(a; b; X)
    OneFOne { a: f64, b: f64 },
    /// ₁F̃₀(a; X) = |I − X|^(−a)
    OneFZero { a: f64 },
}

fn check_denominator(b: f64, n: usize) -> Result<()> {
    // [b]_κ contains the factors b, b−1, …, b−n+1 raised to various orders.
    for i in 0..n {
        if is_nonpositive_integer(b - i as f64) {
            return Err(Error::Domain(format!(
                "denominator parameter b = {b} makes [b]_κ vanish for a {n}×{n} argument"
            )));
        }
    }
    Ok(())
}

fn ln_zonal_series(a: Option<f64>, b: f64, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<LogValue> {
    let n = spectrum.len();
    check_denominator(b, n)?;
    let mut schur = SchurEvaluator::new(spectrum.values());
    let mut total = LogAccumulator::new();
    total.push(LogValue::ONE);
    let ln_tol = policy.rel_tolerance.ln();
    let mut small_groups = 0;
    let mut terms = 1;
    for k in 1..=MAX_SERIES_WEIGHT {
        let mut group = LogAccumulator::new();
        for kappa in enumerate_partitions(k, n) {
            let upper = a.map_or(LogValue::ONE, |a| complex_pochhammer(a, &kappa));
            if upper.is_zero() {
                continue;
            }
            let term = upper / complex_pochhammer(b, &kappa) * schur.eval(&kappa)
                / LogValue::from_ln(kappa.ln_hook_product());
            group.push(term);
            terms += 1;
        }
        let g = group.value();
        total.push(g);
        let sum = total.value();
        if !sum.ln_abs.is_finite() && !sum.is_zero() {
            return Err(Error::NonConvergence { context: "zonal series", terms });
        }
        if g.is_zero() || g.ln_abs < sum.ln_abs + ln_tol {
            small_groups += 1;
            if small_groups >= SMALL_GROUPS_TO_STOP {
                return Ok(sum);
            }
        } else {
            small_groups = 0;
        }
        if terms > policy.max_terms {
            break;
        }
    }
    Err(Error::NonConvergence { context: "zonal series", terms })
}

/// Signed log of a matrix-argument hypergeometric function.
pub fn ln_hyp_matrix(kind: HypKind, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<LogValue> {
    let x = spectrum.values();
    match kind {
        HypKind::OneFZero { a } => {
            if spectrum.max() >= 1.0 {
                return Err(Error::Domain(format!(
                    "₁F̃₀ requires eigenvalues < 1, got {}",
                    spectrum.max()
                )));
            }
            let ln_det: f64 = x.iter().map(|v| (1.0 - v).ln()).sum();
            Ok(LogValue::from_ln(-a * ln_det))
        }
        HypKind::ZeroFOne { b } => {
            if x.len() == 1 {
                return ln_hyp_0f1(b, x[0], policy);
            }
            if x.iter().all(|&v| v == 0.0) {
                check_denominator(b, x.len())?;
                return Ok(LogValue::ONE);
            }
            ln_zonal_series(None, b, spectrum, policy)
        }
        HypKind::OneFOne { a, b } => {
            if x.len() == 1 {
                return ln_kummer_1f1(a, b, x[0], policy);
            }
            if x.iter().all(|&v| v == 0.0) {
                check_denominator(b, x.len())?;
                return Ok(LogValue::ONE);
            }
            ln_zonal_series(Some(a), b, spectrum, policy)
        }
    }
}

/// Matrix-argument ₀F̃₁, ₁F̃₁ or ₁F̃₀.
pub fn hyp_matrix(kind: HypKind, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<f64> {
    Ok(ln_hyp_matrix(kind, spectrum, policy)?.to_f64())
}

/// ln ₁F̃₁(a; b; X) via
/// det[ xⱼⁿ⁻ⁱ ₁F₁(a−i+1; b−i+1; xⱼ) ] / det[ xⱼⁿ⁻ⁱ ].
pub fn ln_hyp_1f1_matrix_detratio(a: f64, b: f64, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<LogValue> {
    let x = spectrum.values();
    let n = x.len();
    if n == 1 {
        return ln_kummer_1f1(a, b, x[0], policy);
    }
    let gap = spectrum.min_relative_gap();
    if !(gap > DETRATIO_MIN_GAP) {
        return Err(Error::DegenerateSpectrum(format!(
            "relative eigenvalue gap {gap:e} ≤ {DETRATIO_MIN_GAP:e}"
        )));
    }
    check_denominator(b, n)?;
    let mut ln_entries = vec![vec![LogValue::ZERO; n]; n];
    let mut col_scale = vec![f64::NEG_INFINITY; n];
    for j in 0..n {
        for i in 0..n {
            let f = ln_kummer_1f1(a - i as f64, b - i as f64, x[j], policy)?;
            let e = LogValue::from_f64(x[j]).powf((n - 1 - i) as f64) * f;
            if !e.is_zero() {
                col_scale[j] = col_scale[j].max(e.ln_abs);
            }
            ln_entries[i][j] = e;
        }
        if col_scale[j] == f64::NEG_INFINITY {
            return Ok(LogValue::ZERO);
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| (ln_entries[i][j] / LogValue::from_ln(col_scale[j])).to_f64());
    let mut vandermonde = LogValue::ONE;
    for i in 0..n {
        for j in i + 1..n {
            vandermonde = vandermonde * LogValue::from_f64(x[i] - x[j]);
        }
    }
    let scale: f64 = col_scale.iter().sum();
    Ok(ln_det_real(m) * LogValue::from_ln(scale) / vandermonde)
}

/// ₁F̃₁(a; b; X) by the determinant-ratio formula (distinct eigenvalues only).
pub fn hyp_1f1_matrix_detratio(a: f64, b: f64, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<f64> {
    Ok(ln_hyp_1f1_matrix_detratio(a, b, spectrum, policy)?.to_f64())
}

/// ln ₁F̃₁(a; b; X), by determinant ratio when the spectrum is well separated
/// and by the zonal series otherwise.
pub fn ln_hyp_1f1_matrix(a: f64, b: f64, spectrum: &EigenSpectrum, policy: &SeriesPolicy) -> Result<LogValue> {
    if spectrum.len() > 1 && spectrum.min_relative_gap() > DETRATIO_MIN_GAP {
        ln_hyp_1f1_matrix_detratio(a, b, spectrum, policy)
    } else {
        ln_hyp_matrix(HypKind::OneFOne { a, b }, spectrum, policy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::kummer_1f1;

    fn spec(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum::new(v.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn partitions_small_cases() {
        assert_eq!(enumerate_partitions(0, 3), vec![Partition::empty()]);
        let p4: Vec<Vec<usize>> = enumerate_partitions(4, 4).iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(p4, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn partitions_match_exhaustive_search() {
        for k in 0..=12 {
            for max_parts in 1..=5 {
                let mut brute = Vec::new();
                let mut stack: Vec<Vec<usize>> = vec![vec![]];
                while let Some(p) = stack.pop() {
                    let s: usize = p.iter().sum();
                    if s == k {
                        brute.push(p.clone());
                        continue;
                    }
                    if p.len() == max_parts {
                        continue;
                    }
                    let cap = p.last().copied().unwrap_or(k);
                    for next in 1..=cap.min(k - s) {
                        let mut q = p.clone();
                        q.push(next);
                        stack.push(q);
                    }
                }
                brute.sort();
                brute.reverse();
                let ours: Vec<Vec<usize>> = enumerate_partitions(k, max_parts).iter().map(|p| p.parts().to_vec()).collect();
                assert_eq!(ours, brute, "k={k} max_parts={max_parts}");
            }
        }
        assert_eq!(enumerate_partitions(6, 2).len(), 4);
    }

    #[test]
    fn hooks_and_tableaux() {
        assert_eq!(Partition::new(vec![2, 1]).unwrap().standard_tableaux(), 2.0);
        assert_eq!(Partition::new(vec![3, 2]).unwrap().standard_tableaux(), 5.0);
        assert_eq!(Partition::new(vec![3, 2, 1]).unwrap().standard_tableaux(), 16.0);
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(complex_pochhammer(2.5, &Partition::empty()), LogValue::ONE);
        let v = complex_pochhammer(3.0, &Partition::new(vec![2]).unwrap()).to_f64();
        assert!((v - 12.0).abs() < 1e-12);
        assert!(complex_pochhammer(1.0, &Partition::new(vec![1, 1]).unwrap()).is_zero());
    }

    #[test]
    fn schur_examples() {
        let one = Partition::new(vec![1]).unwrap();
        let two = Partition::new(vec![2]).unwrap();
        let s = spec(&[0.3, 1.1, 2.0]);
        assert!(rel(zonal_polynomial(&one, &s).unwrap(), 3.4) < 1e-14);
        assert!(rel(zonal_polynomial(&two, &spec(&[1.0, 1.0])).unwrap(), 3.0) < 1e-14);
        let (x, y) = (0.7, 1.9);
        assert!(rel(schur_polynomial(&two, &spec(&[x, y])), x * x + x * y + y * y) < 1e-14);
        let k11 = Partition::new(vec![1, 1]).unwrap();
        assert!(rel(schur_polynomial(&k11, &spec(&[x, y])), x * y) < 1e-14);
    }

    #[test]
    fn bialternant_and_jacobi_trudi_agree() {
        let x = [0.2, 0.9, 1.7, 3.1];
        let mut ev = SchurEvaluator::new(&x);
        assert!(ev.bialternant);
        for k in 1..=8 {
            for kappa in enumerate_partitions(k, 4) {
                let a = ev.bialternant_value(&kappa);
                let b = ev.jacobi_trudi(&kappa);
                assert!(rel(a.to_f64(), b.to_f64()) < 1e-11, "{kappa:?}");
            }
        }
    }

    #[test]
    fn zero_argument_gives_one() {
        let z = spec(&[0.0, 0.0, 0.0]);
        let p = SeriesPolicy::default();
        assert_eq!(hyp_matrix(HypKind::OneFOne { a: 2.0, b: 4.0 }, &z, &p).unwrap(), 1.0);
        assert_eq!(hyp_matrix(HypKind::ZeroFOne { b: 4.0 }, &z, &p).unwrap(), 1.0);
    }

    #[test]
    fn scalar_reduction() {
        let p = SeriesPolicy::default();
        let v = hyp_matrix(HypKind::OneFOne { a: 1.5, b: 3.0 }, &spec(&[2.2]), &p).unwrap();
        assert_eq!(v, kummer_1f1(1.5, 3.0, 2.2, &p).unwrap());
        let d = hyp_1f1_matrix_detratio(1.5, 3.0, &spec(&[2.2]), &p).unwrap();
        assert_eq!(d, v);
    }

    #[test]
    fn binomial_determinant_form() {
        let v = hyp_matrix(HypKind::OneFZero { a: 2.0 }, &spec(&[0.5, 0.25]), &SeriesPolicy::default()).unwrap();
        assert!(rel(v, 64.0 / 9.0) < 1e-14);
        assert!(hyp_matrix(HypKind::OneFZero { a: 2.0 }, &spec(&[1.0, 0.25]), &SeriesPolicy::default()).is_err());
    }

    #[test]
    fn kummer_relation_etr() {
        let p = SeriesPolicy::default();
        let s = spec(&[0.4, 2.5, 6.0]);
        let v = hyp_matrix(HypKind::OneFOne { a: 3.3, b: 3.3 }, &s, &p).unwrap();
        assert!(rel(v, s.trace().exp()) < 1e-10, "{v}");
    }

    #[test]
    fn detratio_matches_series() {
        let p = SeriesPolicy::precise();
        for (a, b, x) in [(3.0, 5.0, vec![0.5, 1.5]), (2.5, 4.0, vec![0.1, 0.7, 2.0]), (4.0, 6.0, vec![-1.0, 0.3, 2.5, 4.0])] {
            let s = spec(&x);
            let series = hyp_matrix(HypKind::OneFOne { a, b }, &s, &p).unwrap();
            let det = hyp_1f1_matrix_detratio(a, b, &s, &p).unwrap();
            assert!(rel(det, series) < 1e-10, "{a} {b} {x:?}: {det} vs {series}");
        }
    }

    #[test]
    fn detratio_rejects_close_eigenvalues() {
        let s = spec(&[1.0, 1.0 + 1e-9]);
        assert!(matches!(
            hyp_1f1_matrix_detratio(2.0, 3.0, &s, &SeriesPolicy::default()),
            Err(Error::DegenerateSpectrum(_))
        ));
        let v = ln_hyp_1f1_matrix(2.0, 3.0, &s, &SeriesPolicy::default()).unwrap();
        assert!(v.to_f64().is_finite());
    }

    #[test]
    fn small_argument_limit() {
        let p = SeriesPolicy::default();
        let s = spec(&[0.5, 2.0, 3.5]).scaled(1e-8).unwrap();
        for kind in [HypKind::OneFOne { a: 2.0, b: 4.0 }, HypKind::ZeroFOne { b: 4.0 }, HypKind::OneFZero { a: 2.0 }] {
            assert!((hyp_matrix(kind, &s, &p).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn confluent_limit_is_monotone() {
        let p = SeriesPolicy::default();
        let s = spec(&[0.3, 1.2, 2.0]);
        let target = hyp_matrix(HypKind::ZeroFOne { b: 4.0 }, &s, &p).unwrap();
        let mut prev = f64::INFINITY;
        for a in [10.0, 100.0, 1000.0] {
            let v = hyp_matrix(HypKind::OneFOne { a, b: 4.0 }, &s.scaled(1.0 / a).unwrap(), &p).unwrap();
            let d = (v - target).abs();
            assert!(d < prev, "a={a}: {d} !< {prev}");
            prev = d;
        }
        assert!(prev < 1e-3 * target);
    }
}
