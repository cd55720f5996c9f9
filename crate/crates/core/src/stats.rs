//! Closed-form statistics of the Gram matrix Y = Hᴴ H: the gamma-Wishart
//! density, the MGF, the joint eigenvalue density and the CDF/PDF of the
//! largest eigenvalue under scaled-identity Σ and M, plus the limiting laws
//! the model collapses to.

use nalgebra::DMatrix;

use crate::channel::{GaussianSampler, ModelParams, ScaledIdentityParams, SisoKappaMuParams};
use crate::error::{Error, Result};
use crate::linalg::{
    det_complex, hermitian_eigenvalues, hermitian_pd_inverse, hermitian_sqrt, identity, is_hermitian, ln_det_hermitian_pd,
    scaled_identity, ComplexMatrix, RealLu,
};
use crate::logval::{LogAccumulator, LogValue};
use crate::matrix_hyp::{ln_hyp_1f1_matrix, ln_hyp_matrix, EigenSpectrum, HypKind};
use crate::quadrature::{integrate_pieces, QuadratureTolerance};
use crate::special::{ln_gauss_2f1, ln_humbert_phi1, ln_kummer_1f1, log_gamma, log_multivariate_gamma, SeriesPolicy};

/// Values of the CDF outside [−slack, 1 + slack] are reported as errors.
pub const CDF_SLACK: f64 = 1e-9;

/// Pivot ratio of the equilibrated Υ below which the trace formula for the
/// pdf is abandoned in favour of a finite difference of the CDF.
pub const PDF_PIVOT_THRESHOLD: f64 = 1e-13;

/// Largest relative cancellation tolerated between the two terms of the
/// closed-form Υ bracket before switching to its regrouped series.
pub const CLOSED_FORM_MAX_CANCELLATION: f64 = 1.0 - 1e-4;

fn check_hermitian_input(a: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Domain(format!("{what} must be {n}×{n}, got {}×{}", a.nrows(), a.ncols())));
    }
    if !is_hermitian(a, 1e-10) {
        return Err(Error::Domain(format!("{what} must be Hermitian")));
    }
    Ok(())
}

/// Eigenvalues of K·A for Hermitian PD K, computed from K^{1/2} A K^{1/2}.
fn product_spectrum(k: &ComplexMatrix, a: &ComplexMatrix) -> Result<EigenSpectrum> {
    let root = hermitian_sqrt(k)?;
    let sym = &root * a * &root;
    let v = hermitian_eigenvalues(&sym)?;
    // Round-off can leave tiny negative values for a PSD product.
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    EigenSpectrum::new(v.into_iter().map(|x| if x < 0.0 && x > -1e-12 * scale { 0.0 } else { x }).collect())
}

/// ln of the gamma-Wishart density of Y at the Hermitian PD matrix `a`.
pub fn gamma_wishart_logpdf(a: &ComplexMatrix, params: &ModelParams) -> Result<f64> {
    let n = params.n();
    check_hermitian_input(a, n, "A")?;
    let ln_det_a = ln_det_hermitian_pd(a).map_err(|_| Error::Domain("A must be positive definite".into()))?;
    let p = params.p() as f64;
    let m = params.m();
    let sigma_inv = hermitian_pd_inverse(params.sigma())?;
    let shifted = &sigma_inv + params.rate();
    let k = &sigma_inv * hermitian_pd_inverse(&shifted)? * &sigma_inv;
    let trace = (&sigma_inv * a).trace().re;
    let hyp = ln_hyp_1f1_matrix(m, p, &product_spectrum(&k, a)?, &SeriesPolicy::precise())?;
    Ok(-trace + (p - n as f64) * ln_det_a + m * ln_det_hermitian_pd(params.rate())?
        - log_multivariate_gamma(n, p)?
        - p * ln_det_hermitian_pd(params.sigma())?
        - m * ln_det_hermitian_pd(&shifted)?
        + hyp.ln_abs)
}

/// ln of the central complex Wishart density 𝒲ₙ(p, Σ) at `a`.
pub fn central_wishart_logpdf(a: &ComplexMatrix, p: usize, sigma: &ComplexMatrix) -> Result<f64> {
    let n = sigma.nrows();
    check_hermitian_input(a, n, "A")?;
    let ln_det_a = ln_det_hermitian_pd(a).map_err(|_| Error::Domain("A must be positive definite".into()))?;
    let trace = (hermitian_pd_inverse(sigma)? * a).trace().re;
    Ok(-trace + (p as f64 - n as f64) * ln_det_a
        - log_multivariate_gamma(n, p as f64)?
        - p as f64 * ln_det_hermitian_pd(sigma)?)
}

/// ln of the noncentral complex Wishart density with covariance Σ and LOS
/// Gram Ω̄ (noncentrality Θ = Σ⁻¹Ω̄).
pub fn noncentral_wishart_logpdf(a: &ComplexMatrix, p: usize, sigma: &ComplexMatrix, los_gram: &ComplexMatrix) -> Result<f64> {
    let central = central_wishart_logpdf(a, p, sigma)?;
    let sigma_inv = hermitian_pd_inverse(sigma)?;
    let theta_trace = (&sigma_inv * los_gram).trace().re;
    // eig(Θ Σ⁻¹ A) = eig(Σ⁻¹ Ω̄ Σ⁻¹ A)
    let k = &sigma_inv * los_gram * &sigma_inv;
    let spectrum = product_spectrum(&crate::linalg::hermitian_part(&k), a)?;
    let hyp = ln_hyp_matrix(HypKind::ZeroFOne { b: p as f64 }, &spectrum, &SeriesPolicy::precise())?;
    Ok(central - theta_trace + hyp.ln_abs)
}

fn check_mgf_argument(s: &ComplexMatrix, params: &ModelParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = params.n();
    check_hermitian_input(s, n, "S")?;
    let sigma = params.sigma().clone();
    let outer = &sigma + hermitian_pd_inverse(params.rate())?;
    // E[etr(YS)] is finite iff (Σ + M⁻¹)⁻¹ − S ≻ 0, which implies Σ⁻¹ − S ≻ 0.
    let region = hermitian_pd_inverse(&outer)? - s;
    let smallest = hermitian_eigenvalues(&region)?[0];
    if !(smallest > 0.0) {
        return Err(Error::Domain(format!(
            "MGF argument outside the existence region (Σ + M⁻¹)⁻¹ − S ≻ 0 (smallest eigenvalue {smallest:e})"
        )));
    }
    Ok((sigma, outer))
}

/// E[etr(Y S)] = |I − ΣS|^{m−p} |I − (Σ + M⁻¹)S|^{−m}.
pub fn mgf(s: &ComplexMatrix, params: &ModelParams) -> Result<f64> {
    let (sigma, outer) = check_mgf_argument(s, params)?;
    let n = params.n();
    let d1 = det_complex(&(identity(n) - &sigma * s));
    let d2 = det_complex(&(identity(n) - &outer * s));
    let ln = (params.m() - params.p() as f64) * d1.re.ln() - params.m() * d2.re.ln();
    Ok(ln.exp())
}

/// The MGF written term by term as
/// |Σ⁻¹ − S|^{−p} |M|^m / (|Σ|^p |Σ⁻¹+M|^m) · |I − Σ⁻¹(Σ⁻¹+M)⁻¹Σ⁻¹(Σ⁻¹ − S)⁻¹|^{−m}.
///
/// Kept as a cross-check of [`mgf`], which evaluates the same quantity with
/// fewer inversions.
pub fn mgf_unreduced(s: &ComplexMatrix, params: &ModelParams) -> Result<f64> {
    check_mgf_argument(s, params)?;
    let n = params.n();
    let p = params.p() as f64;
    let m = params.m();
    let sigma_inv = hermitian_pd_inverse(params.sigma())?;
    let shifted = &sigma_inv + params.rate();
    let r = &sigma_inv - s;
    let k = &sigma_inv * hermitian_pd_inverse(&shifted)? * &sigma_inv;
    let inner = det_complex(&(identity(n) - k * hermitian_pd_inverse(&r)?));
    let ln = -p * ln_det_hermitian_pd(&r)? + m * ln_det_hermitian_pd(params.rate())?
        - p * ln_det_hermitian_pd(params.sigma())?
        - m * ln_det_hermitian_pd(&shifted)?
        - m * inner.re.ln();
    Ok(ln.exp())
}

/// Shorthands for the scaled-identity model: s = σ_Σ², t = σ_M²,
/// w = 1/(1 + st) and c = w/s.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    n: usize,
    p: usize,
    m: f64,
    s: f64,
    t: f64,
    w: f64,
    c: f64,
    tau: usize,
}

impl Scaled {
    fn new(params: &ScaledIdentityParams) -> Result<Self> {
        params.validate()?;
        let s = params.sigma2_sigma;
        let t = params.sigma2_m;
        let w = 1.0 / (1.0 + s * t);
        Ok(Scaled {
            n: params.n,
            p: params.p,
            m: params.m,
            s,
            t,
            w,
            c: w / s,
            tau: params.tau(),
        })
    }

    /// ln of π^{n(n−1)} / (s^{pn} Γ̃ₙ(n) Γ̃ₙ(p) (1 + 1/(st))^{nm}).
    fn ln_eigen_constant(&self) -> Result<f64> {
        let (n, p) = (self.n as f64, self.p as f64);
        Ok(n * (n - 1.0) * std::f64::consts::PI.ln()
            - p * n * self.s.ln()
            - log_multivariate_gamma(self.n, n)?
            - log_multivariate_gamma(self.n, p)?
            - n * self.m * (1.0 / (self.s * self.t)).ln_1p())
    }

    /// ln [s(1 + st)].
    fn ln_row_scale(&self) -> f64 {
        self.s.ln() - self.w.ln()
    }
}

/// ln of the joint density of the ordered eigenvalues φ₁ < … < φₙ of Y.
pub fn joint_eigenvalue_logpdf(spectrum: &EigenSpectrum, params: &ScaledIdentityParams) -> Result<f64> {
    let sc = Scaled::new(params)?;
    let phi = spectrum.values();
    if phi.len() != sc.n {
        return Err(Error::Domain(format!("expected {} eigenvalues, got {}", sc.n, phi.len())));
    }
    if phi[0] <= 0.0 {
        return Err(Error::Domain("eigenvalues must be positive".into()));
    }
    if phi.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("eigenvalues must be pairwise distinct".into()));
    }
    let mut ln = sc.ln_eigen_constant()?;
    for i in 0..phi.len() {
        for j in i + 1..phi.len() {
            ln += 2.0 * (phi[j] - phi[i]).ln();
        }
        ln += (sc.p as f64 - sc.n as f64) * phi[i].ln() - phi[i] / sc.s;
    }
    let hyp = ln_hyp_1f1_matrix(sc.m, sc.p as f64, &spectrum.scaled(sc.c)?, &SeriesPolicy::precise())?;
    Ok(ln + hyp.ln_abs)
}

/// How the entries of Υ(x) are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpsilonMethod {
    /// Gauss ₂F₁ and Humbert Φ₁ closed form; needs m < p.
    ClosedForm,
    /// Adaptive quadrature of the integral form; valid for any m > n − 1.
    Quadrature,
}

impl UpsilonMethod {
    /// Closed form when m < p, quadrature otherwise.
    pub fn auto(params: &ScaledIdentityParams) -> Self {
        if params.m < params.p as f64 {
            UpsilonMethod::ClosedForm
        } else {
            UpsilonMethod::Quadrature
        }
    }
}

/// Υ(x) together with the abscissa it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonMatrix {
    pub x: f64,
    pub entries: DMatrix<f64>,
}

fn entry_parameters(sc: &Scaled, i: usize, j: usize) -> Result<(usize, f64, f64)> {
    if i == 0 || j == 0 || i > sc.n || j > sc.n {
        return Err(Error::Domain(format!("Υ indices must lie in 1..={}, got ({i}, {j})", sc.n)));
    }
    let big_n = sc.tau - i - j;
    Ok((big_n, sc.m - i as f64 + 1.0, (sc.p - i + 1) as f64))
}

/// Υ(x) entry and its complement Υ(∞) − Υ(x), each evaluated so that the
/// smaller of the two keeps its relative accuracy.
#[derive(Debug, Clone, Copy)]
struct EntryParts {
    value: LogValue,
    tail: LogValue,
}

/// Υᵢⱼ(∞) = Γ(N+1) s^{p−j+1} w^{n−i} ₂F₁(N+1, a; b; w).
fn upsilon_limit_entry(sc: &Scaled, i: usize, j: usize) -> Result<LogValue> {
    let (big_n, a, b) = entry_parameters(sc, i, j)?;
    let nf = big_n as f64;
    let ln_pref = (sc.p - j + 1) as f64 * sc.s.ln() - (i as f64 - sc.n as f64) * sc.w.ln() + log_gamma(nf + 1.0)?;
    Ok(LogValue::from_ln(ln_pref) * ln_gauss_2f1(nf + 1.0, a, b, sc.w, &SeriesPolicy::precise())?)
}

fn upsilon_closed_form(sc: &Scaled, i: usize, j: usize, x: f64) -> Result<EntryParts> {
    if !(sc.m < sc.p as f64) {
        return Err(Error::Domain(format!(
            "closed-form Υ entries need m < p, got m = {}, p = {}",
            sc.m, sc.p
        )));
    }
    let (big_n, a, b) = entry_parameters(sc, i, j)?;
    let policy = SeriesPolicy::precise();
    let nf = big_n as f64;
    let ln_pref = (sc.p - j + 1) as f64 * sc.s.ln() - (i as f64 - sc.n as f64) * sc.w.ln() + log_gamma(nf + 1.0)?;
    let head = ln_gauss_2f1(nf + 1.0, a, b, sc.w, &policy)?;
    let u = x / sc.s;
    let mut tail = LogAccumulator::new();
    let mut ln_coef = -u;
    for k in 0..=big_n {
        if k > 0 {
            ln_coef += u.ln() - (k as f64).ln();
        }
        let phi = ln_humbert_phi1(a, nf - k as f64 + 1.0, b, sc.w, u * sc.w, &policy)?;
        tail.push(LogValue::from_ln(ln_coef) * phi);
    }
    let tail = tail.value();
    let bracket = head.sub(tail);
    if bracket.sign > 0.0 && tail.ln_abs - head.ln_abs < CLOSED_FORM_MAX_CANCELLATION.ln() {
        return Ok(EntryParts {
            value: LogValue::from_ln(ln_pref) * bracket,
            tail: LogValue::from_ln(ln_pref) * tail,
        });
    }
    let regrouped = ln_regrouped_bracket(big_n, a, b, sc.w, u, &policy)?;
    let value = LogValue::from_ln(ln_pref - log_gamma(nf + 1.0)?) * regrouped;
    Ok(EntryParts {
        value,
        tail: (LogValue::from_ln(ln_pref) * head).sub(value),
    })
}

/// ln γ(s, u), the lower incomplete gamma function, by its power series.
fn ln_lower_gamma(s: f64, u: f64, policy: &SeriesPolicy) -> Result<f64> {
    let (mut term, mut sum) = (1.0 / s, 1.0 / s);
    for k in 1..policy.max_terms {
        term *= u / (s + k as f64);
        sum += term;
        if term < policy.rel_tolerance * sum && k as f64 > u - s {
            return Ok(s * u.ln() - u + sum.ln());
        }
    }
    Err(Error::NonConvergence {
        context: "lower incomplete gamma series",
        terms: policy.max_terms,
    })
}

/// Σ_q (a)_q w^q / ((b)_q q!) · γ(N+q+1, u), the closed-form bracket times
/// Γ(N+1) with the powers of w collected. Every term is positive, so this
/// stays accurate where the difference of the two closed-form terms does not.
fn ln_regrouped_bracket(big_n: usize, a: f64, b: f64, w: f64, u: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    let mut acc = LogAccumulator::new();
    let mut ln_coef = 0.0;
    let mut small = 0;
    for q in 0..policy.max_terms {
        let qf = q as f64;
        if q > 0 {
            ln_coef += (a + qf - 1.0).ln() - (b + qf - 1.0).ln() + w.ln() - qf.ln();
        }
        let ln_term = ln_coef + ln_lower_gamma(big_n as f64 + qf + 1.0, u, policy)?;
        acc.push(LogValue::from_ln(ln_term));
        if ln_term < acc.ln_abs() + policy.rel_tolerance.ln() {
            small += 1;
            if small >= policy.consecutive_small_terms {
                return Ok(acc.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        context: "regrouped Υ bracket",
        terms: policy.max_terms,
    })
}

/// Breakpoints for [0, x] following the natural length scale of the kernel
/// y^N e^{−y/s} ₁F₁(a; b; cy), whose exponential rate is at least t/(1+st).
fn quadrature_breakpoints(scale: f64, x: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut edge = 0.25 * scale;
    while edge < x {
        pts.push(edge);
        edge *= 2.0;
    }
    pts.push(x);
    pts
}

fn ln_upsilon_integrand(sc: &Scaled, big_n: usize, a: f64, b: f64, y: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    if y <= 0.0 {
        return Ok(if big_n == 0 { LogValue::ONE } else { LogValue::ZERO });
    }
    let f = ln_kummer_1f1(a, b, sc.c * y, policy)?;
    Ok(LogValue::from_ln(big_n as f64 * y.ln() - y / sc.s) * f)
}

fn upsilon_quadrature(sc: &Scaled, i: usize, j: usize, x: f64) -> Result<EntryParts> {
    let (big_n, a, b) = entry_parameters(sc, i, j)?;
    let policy = SeriesPolicy::precise();
    let tol = QuadratureTolerance {
        abs: 0.0,
        rel: 1e-12,
        max_subdivisions: 4000,
    };
    let integrand = |y: f64| {
        ln_upsilon_integrand(sc, big_n, a, b, y, &policy)
            .map(|v| v.to_f64())
            .unwrap_or(f64::NAN)
    };
    let ln_pref = (i as f64 - sc.n as f64) * sc.ln_row_scale();
    let (rate, scale) = integrand_scales(sc, big_n, a, b);
    let limit = upsilon_limit_entry(sc, i, j)?;
    if x <= scale {
        let result = integrate_pieces(integrand, &quadrature_breakpoints(scale, x), tol)?;
        let value = LogValue::from_ln(ln_pref) * LogValue::from_f64(result.value);
        return Ok(EntryParts {
            value,
            tail: limit.sub(value),
        });
    }
    // Past the bulk, integrate the upper tail and subtract it from the limit.
    let full = limit / LogValue::from_ln(ln_pref);
    let ln_at_x = ln_upsilon_integrand(sc, big_n, a, b, x, &policy)?.ln_abs;
    let mut breaks = vec![x];
    let mut step = 0.25 * scale;
    loop {
        let edge = x + step;
        breaks.push(edge);
        let ln_edge = ln_upsilon_integrand(sc, big_n, a, b, edge, &policy)?.ln_abs;
        if ln_edge < ln_at_x.max(full.ln_abs + rate.ln()) - 50.0 || breaks.len() > 200 {
            break;
        }
        step *= 2.0;
    }
    let tail = LogValue::from_ln(ln_pref) * LogValue::from_f64(integrate_pieces(integrand, &breaks, tol)?.value);
    Ok(EntryParts {
        value: limit.sub(tail),
        tail,
    })
}

/// Decay rate of the Υ integrand and the rough width of its bulk.
fn integrand_scales(sc: &Scaled, big_n: usize, a: f64, b: f64) -> (f64, f64) {
    let rate = (1.0 / sc.s).min(sc.t * sc.w);
    (rate, (big_n as f64 + 1.0 + (a - b).abs()) / rate)
}

fn upsilon_entry_parts(sc: &Scaled, i: usize, j: usize, x: f64, method: UpsilonMethod) -> Result<EntryParts> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Υ needs finite x ≥ 0, got {x}")));
    }
    entry_parameters(sc, i, j)?;
    if x == 0.0 {
        return Ok(EntryParts {
            value: LogValue::ZERO,
            tail: upsilon_limit_entry(sc, i, j)?,
        });
    }
    match method {
        UpsilonMethod::ClosedForm => upsilon_closed_form(sc, i, j, x),
        UpsilonMethod::Quadrature => upsilon_quadrature(sc, i, j, x),
    }
}

/// Entry (i, j) of Υ(x), 1-based.
pub fn upsilon_entry(i: usize, j: usize, x: f64, params: &ScaledIdentityParams, method: UpsilonMethod) -> Result<f64> {
    let sc = Scaled::new(params)?;
    Ok(upsilon_entry_parts(&sc, i, j, x, method)?.value.to_f64())
}

/// Full Υ(x).
pub fn upsilon_matrix(x: f64, params: &ScaledIdentityParams, method: UpsilonMethod) -> Result<UpsilonMatrix> {
    let sc = Scaled::new(params)?;
    let (entries, _) = upsilon_entries(&sc, x, method)?;
    Ok(UpsilonMatrix { x, entries })
}

/// Υ(x) and Υ(∞) − Υ(x).
fn upsilon_entries(sc: &Scaled, x: f64, method: UpsilonMethod) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = sc.n;
    let mut value = DMatrix::zeros(n, n);
    let mut tail = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let parts = upsilon_entry_parts(sc, i + 1, j + 1, x, method)?;
            value[(i, j)] = parts.value.to_f64();
            tail[(i, j)] = parts.tail.to_f64();
        }
    }
    Ok((value, tail))
}

/// dΥ/dx, i.e. the integrand of each entry evaluated at y = x.
pub fn upsilon_derivative(x: f64, params: &ScaledIdentityParams) -> Result<DMatrix<f64>> {
    let sc = Scaled::new(params)?;
    derivative_entries(&sc, x)
}

fn derivative_entries(sc: &Scaled, x: f64) -> Result<DMatrix<f64>> {
    let n = sc.n;
    let policy = SeriesPolicy::precise();
    let mut out = DMatrix::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            let (big_n, a, b) = entry_parameters(sc, i, j)?;
            let v = ln_upsilon_integrand(sc, big_n, a, b, x, &policy)?;
            let pref = LogValue::from_ln((i as f64 - sc.n as f64) * sc.ln_row_scale());
            out[(i - 1, j - 1)] = (pref * v).to_f64();
        }
    }
    Ok(out)
}

/// Row and column equilibration: the scaled matrix with the row and column
/// factors that were divided out.
fn equilibration(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let mut a = m.clone();
    let mut rows = vec![1.0; a.nrows()];
    let mut cols = vec![1.0; a.ncols()];
    for (i, r) in rows.iter_mut().enumerate() {
        let v = a.row(i).amax();
        if v > 0.0 {
            a.row_mut(i).scale_mut(1.0 / v);
            *r = v;
        }
    }
    for (j, c) in cols.iter_mut().enumerate() {
        let v = a.column(j).amax();
        if v > 0.0 {
            a.column_mut(j).scale_mut(1.0 / v);
            *c = v;
        }
    }
    (a, rows, cols)
}

/// Equilibrated matrix and the ln of the factor removed from its determinant.
fn equilibrate(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let (a, rows, cols) = equilibration(m);
    (a, rows.iter().chain(&cols).map(|v| v.ln()).sum())
}

/// Equilibrated LU of Υ(∞).
#[derive(Debug, Clone)]
struct LimitFactor {
    lu: RealLu,
    rows: Vec<f64>,
    cols: Vec<f64>,
}

impl LimitFactor {
    fn new(limit: &DMatrix<f64>) -> Self {
        let (a, rows, cols) = equilibration(limit);
        LimitFactor {
            lu: RealLu::new(a),
            rows,
            cols,
        }
    }

    /// 1 − det(I − Υ(∞)⁻¹ T) with relative accuracy for small T, or None when
    /// I − Υ(∞)⁻¹ T is far from the identity.
    fn complement(&self, tail: &DMatrix<f64>) -> Option<f64> {
        let n = tail.nrows();
        // Same scaling on both sides keeps Υ(∞)⁻¹ T up to a similarity.
        let scaled = DMatrix::from_fn(n, n, |i, j| tail[(i, j)] / (self.rows[i] * self.cols[j]));
        let mut e = -self.lu.solve(&scaled)?;
        // Elimination on I + e, touching only e so small entries stay exact.
        let mut ln_det = 0.0;
        for k in 0..n {
            let pivot = 1.0 + e[(k, k)];
            if !(pivot > 0.1) {
                return None;
            }
            ln_det += e[(k, k)].ln_1p();
            for i in k + 1..n {
                let l = e[(i, k)] / pivot;
                for j in k + 1..n {
                    e[(i, j)] -= l * e[(k, j)];
                }
            }
        }
        Some(-ln_det.exp_m1())
    }
}

/// One evaluation of C det Υ(x).
struct Evaluation {
    upsilon: DMatrix<f64>,
    lu: RealLu,
    det: LogValue,
    cdf: f64,
}

/// CDF and PDF of the largest eigenvalue of Y for Σ = σ_Σ² I and M = σ_M² I.
#[derive(Debug, Clone)]
pub struct MaxEigDistribution {
    params: ScaledIdentityParams,
    sc: Scaled,
    method: UpsilonMethod,
    ln_c: f64,
    limit: LimitFactor,
}

impl MaxEigDistribution {
    pub fn new(params: &ScaledIdentityParams) -> Result<Self> {
        Self::with_method(params, UpsilonMethod::auto(params))
    }

    pub fn with_method(params: &ScaledIdentityParams, method: UpsilonMethod) -> Result<Self> {
        let sc = Scaled::new(params)?;
        if method == UpsilonMethod::ClosedForm && !(sc.m < sc.p as f64) {
            return Err(Error::Domain(format!(
                "closed-form Υ entries need m < p, got m = {}, p = {}",
                sc.m, sc.p
            )));
        }
        let n = sc.n as f64;
        let ln_c = sc.ln_eigen_constant()? + 0.5 * n * (n - 1.0) * sc.ln_row_scale();
        let mut limit = DMatrix::zeros(sc.n, sc.n);
        for i in 0..sc.n {
            for j in 0..sc.n {
                limit[(i, j)] = upsilon_limit_entry(&sc, i + 1, j + 1)?.to_f64();
            }
        }
        Ok(MaxEigDistribution {
            params: *params,
            sc,
            method,
            ln_c,
            limit: LimitFactor::new(&limit),
        })
    }

    pub fn params(&self) -> &ScaledIdentityParams {
        &self.params
    }

    pub fn method(&self) -> UpsilonMethod {
        self.method
    }

    /// ln C, the constant in front of det Υ.
    pub fn ln_constant(&self) -> f64 {
        self.ln_c
    }

    pub fn upsilon(&self, x: f64) -> Result<UpsilonMatrix> {
        Ok(UpsilonMatrix {
            x,
            entries: upsilon_entries(&self.sc, x, self.method)?.0,
        })
    }

    /// C det Υ(x); above one half the value is rebuilt as 1 − δ from the tail
    /// Υ(∞) − Υ(x) so that it stays monotone up to the last ulp below 1.
    fn evaluate(&self, x: f64) -> Result<Evaluation> {
        let (upsilon, tail) = upsilon_entries(&self.sc, x, self.method)?;
        let (eq, ln_removed) = equilibrate(&upsilon);
        let lu = RealLu::new(eq);
        let det = lu.ln_det() * LogValue::from_ln(self.ln_c + ln_removed);
        let mut cdf = det.to_f64();
        if cdf > 0.5 {
            if let Some(delta) = self.limit.complement(&tail) {
                cdf = 1.0 - delta;
            }
        }
        Ok(Evaluation { upsilon, lu, det, cdf })
    }

    /// C det Υ(x) without clamping.
    pub fn cdf_unclamped(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!("CDF needs finite x ≥ 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(self.evaluate(x)?.cdf)
    }

    /// F(x) = C det Υ(x), clamped to [0, 1] within [`CDF_SLACK`].
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let v = self.cdf_unclamped(x)?;
        if !(-CDF_SLACK..=1.0 + CDF_SLACK).contains(&v) {
            return Err(Error::NumericalConsistency(format!("CDF value {v} at x = {x} outside [0, 1]")));
        }
        Ok(v.clamp(0.0, 1.0))
    }

    /// f(x) = C det Υ(x) tr(Υ⁻¹(x) J(x)), falling back to a central
    /// difference of the CDF where Υ(x) is numerically singular.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("pdf needs finite x, got {x}")));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.cdf_and_pdf(x)?.1)
    }

    /// (F(x), f(x)) sharing one evaluation of Υ(x).
    pub fn cdf_and_pdf(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!("CDF needs finite x ≥ 0, got {x}")));
        }
        if x == 0.0 {
            return Ok((0.0, 0.0));
        }
        let Evaluation { upsilon: ups, lu, det, cdf } = self.evaluate(x)?;
        if !(-CDF_SLACK..=1.0 + CDF_SLACK).contains(&cdf) {
            return Err(Error::NumericalConsistency(format!("CDF value {cdf} at x = {x} outside [0, 1]")));
        }
        let pdf = if lu.pivot_ratio() < PDF_PIVOT_THRESHOLD {
            self.pdf_finite_difference(x)?
        } else {
            let j = derivative_entries(&self.sc, x)?;
            match RealLu::new(ups).solve(&j) {
                Some(s) => (det * LogValue::from_f64(s.trace())).to_f64(),
                None => self.pdf_finite_difference(x)?,
            }
        };
        if pdf < -CDF_SLACK {
            return Err(Error::NumericalConsistency(format!("negative pdf {pdf} at x = {x}")));
        }
        let pdf = pdf.max(0.0);
        Ok((cdf.clamp(0.0, 1.0), pdf))
    }

    /// Central difference of the CDF with step max(1e-6 x, 1e-9).
    pub fn pdf_finite_difference(&self, x: f64) -> Result<f64> {
        let h = (1e-6 * x).max(1e-9);
        let lo = (x - h).max(0.0);
        let hi = x + h;
        let d = (self.cdf_unclamped(hi)? - self.cdf_unclamped(lo)?) / (hi - lo);
        Ok(d.max(0.0))
    }
}

/// Largest-eigenvalue CDF with automatic method selection.
pub fn max_eig_cdf(x: f64, params: &ScaledIdentityParams) -> Result<f64> {
    MaxEigDistribution::new(params)?.cdf(x)
}

/// Largest-eigenvalue PDF with automatic method selection.
pub fn max_eig_pdf(x: f64, params: &ScaledIdentityParams) -> Result<f64> {
    MaxEigDistribution::new(params)?.pdf(x)
}

/// The three limiting regimes of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// M⁻¹ → 0: MIMO Rayleigh with covariance Σ.
    RayleighLimit,
    /// m = p: MIMO Rayleigh with covariance Σ + M⁻¹.
    RayleighMp,
    /// m → ∞ with m M⁻¹ fixed: MIMO Rician.
    RicianLimit,
}

/// A Wishart law the model reduces to.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitingLaw {
    CentralWishart {
        p: usize,
        covariance: ComplexMatrix,
    },
    NoncentralWishart {
        p: usize,
        covariance: ComplexMatrix,
        /// Ω̄ = Ξ̄ᴴ Ξ̄, the Gram of the deterministic LOS component.
        los_gram: ComplexMatrix,
    },
}

impl LimitingLaw {
    /// Sampler of channel matrices whose Gram follows this law.
    pub fn sampler(&self) -> Result<GaussianSampler> {
        match self {
            LimitingLaw::CentralWishart { p, covariance } => GaussianSampler::new(*p, covariance, None),
            LimitingLaw::NoncentralWishart { p, covariance, los_gram } => {
                GaussianSampler::with_los_gram(*p, covariance, los_gram)
            }
        }
    }

    /// Noncentrality Θ = Σ⁻¹ Ω̄ (zero for the central law).
    pub fn noncentrality(&self) -> Result<ComplexMatrix> {
        match self {
            LimitingLaw::CentralWishart { covariance, .. } => Ok(ComplexMatrix::zeros(covariance.nrows(), covariance.ncols())),
            LimitingLaw::NoncentralWishart { covariance, los_gram, .. } => Ok(hermitian_pd_inverse(covariance)? * los_gram),
        }
    }

    pub fn logpdf(&self, a: &ComplexMatrix) -> Result<f64> {
        match self {
            LimitingLaw::CentralWishart { p, covariance } => central_wishart_logpdf(a, *p, covariance),
            LimitingLaw::NoncentralWishart { p, covariance, los_gram } => {
                noncentral_wishart_logpdf(a, *p, covariance, los_gram)
            }
        }
    }
}

/// The limiting law of the given kind for a scaled-identity model.
///
/// For [`ReductionKind::RayleighMp`] the law is exact only when m = p; for
/// [`ReductionKind::RicianLimit`] the preserved LOS Gram is m σ_M⁻² I.
pub fn reduction_params(kind: ReductionKind, params: &ScaledIdentityParams) -> Result<LimitingLaw> {
    params.validate()?;
    let n = params.n;
    let p = params.p;
    Ok(match kind {
        ReductionKind::RayleighLimit => LimitingLaw::CentralWishart {
            p,
            covariance: scaled_identity(n, params.sigma2_sigma),
        },
        ReductionKind::RayleighMp => LimitingLaw::CentralWishart {
            p,
            covariance: scaled_identity(n, params.sigma2_sigma + params.inv_sigma2_m()),
        },
        ReductionKind::RicianLimit => LimitingLaw::NoncentralWishart {
            p,
            covariance: scaled_identity(n, params.sigma2_sigma),
            los_gram: scaled_identity(n, params.m * params.inv_sigma2_m()),
        },
    })
}

/// etr(X) helper for MC estimators: exp(Re tr(X)).
pub fn etr(x: &ComplexMatrix) -> f64 {
    x.trace().re.exp()
}

/// Density of the scalar κ-μ shadowed power γ with integer μ.
pub fn kappa_mu_shadowed_pdf(gamma: f64, params: &SisoKappaMuParams) -> Result<f64> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::Domain(format!("γ must be finite and ≥ 0, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(if params.mu == 1 { kappa_mu_shadowed_pdf_at_zero(params)? } else { 0.0 });
    }
    let SisoKappaMuParams { kappa, mu, m, gamma_bar } = *params;
    let mu = mu as f64;
    let r = gamma / gamma_bar;
    let arg = mu * mu * kappa * (1.0 + kappa) * r / (mu * kappa + m);
    let ln = mu * mu.ln() + m * m.ln() + mu * (1.0 + kappa).ln()
        - log_gamma(mu)?
        - gamma_bar.ln()
        - m * (mu * kappa + m).ln()
        + (mu - 1.0) * r.ln()
        - mu * (1.0 + kappa) * r
        + ln_kummer_1f1(m, mu, arg, &SeriesPolicy::precise())?.ln_abs;
    Ok(ln.exp())
}

fn kappa_mu_shadowed_pdf_at_zero(params: &SisoKappaMuParams) -> Result<f64> {
    let SisoKappaMuParams { kappa, m, gamma_bar, .. } = *params;
    Ok((1.0 + kappa) / gamma_bar * (m / (kappa + m)).powf(m))
}

/// E[e^{sγ}] of the scalar κ-μ shadowed power, defined for
/// s < μ(1+κ)m / (γ̄(μκ+m)).
pub fn kappa_mu_shadowed_mgf(s: f64, params: &SisoKappaMuParams) -> Result<f64> {
    let SisoKappaMuParams { kappa, mu, m, gamma_bar } = *params;
    let mu = mu as f64;
    let rate = mu * (1.0 + kappa) / gamma_bar;
    let outer = (mu * kappa + m) / (rate * m);
    if !(s * outer < 1.0) {
        return Err(Error::Domain(format!("κ-μ shadowed MGF undefined at s = {s}")));
    }
    Ok(((m - mu) * (1.0 - s / rate).ln() - m * (1.0 - s * outer).ln()).exp())
}
