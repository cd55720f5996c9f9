//! Self-check suites run by the command-line `verify` command.
//!
//! Each check reports a metric, a threshold and whether the metric is on the
//! right side of it. Trend checks use the largest ratio between successive
//! errors along a parameter ladder; it must stay below 1.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{map_siso, ScaledIdentityParams, SisoKappaMuParams};
use crate::error::Result;
use crate::linalg::{identity, ln_det_hermitian_pd, scaled_identity, ComplexMatrix};
use crate::matrix_hyp::{
    enumerate_partitions, ln_hyp_1f1_matrix, ln_hyp_1f1_matrix_detratio, ln_hyp_matrix, zonal_polynomial, EigenSpectrum,
    HypKind,
};
use crate::monte_carlo::{
    compare_histogram, estimate_max_eig_samples, histogram, ks_statistic, ks_two_sample, law_max_eig_samples,
    TabulatedCdf,
};
use crate::quadrature::{integrate_pieces, QuadratureTolerance};
use crate::special::{
    gauss_2f1, kummer_1f1, ln_humbert_phi1_integral, ln_humbert_phi1_series, SeriesPolicy,
};
use crate::stats::{
    central_wishart_logpdf, gamma_wishart_logpdf, kappa_mu_shadowed_mgf, kappa_mu_shadowed_pdf, mgf,
    noncentral_wishart_logpdf, reduction_params, MaxEigDistribution, ReductionKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SpecialFunctions,
    Reductions,
    Figures,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::SpecialFunctions => "special_functions",
            Suite::Reductions => "reductions",
            Suite::Figures => "figures",
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `metric ≤ threshold`.
    pub fn at_most(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            metric,
            threshold,
            pass: metric <= threshold,
        }
    }

    /// Passes when `metric ≥ threshold`.
    pub fn at_least(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            metric,
            threshold,
            pass: metric >= threshold,
        }
    }

    /// Passes when the sequence is strictly decreasing; the metric is the
    /// largest successive ratio.
    pub fn decreasing(name: impl Into<String>, values: &[f64]) -> Self {
        let worst = values
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(0.0_f64, |acc, r| if r.is_nan() { f64::INFINITY } else { acc.max(r) });
        Check {
            name: name.into(),
            metric: worst,
            threshold: 1.0,
            pass: worst < 1.0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{:.6e},{:.6e},{}", self.name, self.metric, self.threshold, self.pass)
    }
}

pub fn run(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::SpecialFunctions => special_functions(seed),
        Suite::Reductions => reductions(seed),
        Suite::Figures => figures(seed),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_spectrum(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Result<EigenSpectrum> {
    EigenSpectrum::new((0..n).map(|_| rng.random_range(lo..hi)).collect())
}

/// Random spectrum whose eigenvalues stay `gap` apart.
fn separated_spectrum(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Result<EigenSpectrum> {
    loop {
        let s = random_spectrum(rng, n, lo, hi)?;
        if s.values().windows(2).all(|w| w[1] - w[0] > gap) {
            return Ok(s);
        }
    }
}

fn special_functions(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let policy = SeriesPolicy::precise();
    let mut out = Vec::new();

    let mut worst = 0.0_f64;
    for n in 1..=5 {
        for _ in 0..10 {
            let spec = random_spectrum(&mut rng, n, 0.05, 1.5)?;
            let tr = spec.trace();
            for k in 1..=10 {
                let mut sum = 0.0;
                for kappa in enumerate_partitions(k, n) {
                    sum += zonal_polynomial(&kappa, &spec)?;
                }
                worst = worst.max(rel(sum, tr.powi(k as i32)));
            }
        }
    }
    out.push(Check::at_most("zonal_sum_identity", worst, 1e-9));

    let mut worst = 0.0_f64;
    for _ in 0..40 {
        let n = rng.random_range(1..=4);
        let spec = random_spectrum(&mut rng, n, -3.0, 3.0)?;
        let a = rng.random_range(n as f64 - 0.5..n as f64 + 6.0);
        let v = ln_hyp_1f1_matrix(a, a, &spec, &policy)?;
        let err = if v.sign > 0.0 { (v.ln_abs - spec.trace()).exp_m1().abs() } else { 1.0 };
        worst = worst.max(err);
    }
    out.push(Check::at_most("matrix_kummer_etr", worst, 1e-8));

    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let spec = separated_spectrum(&mut rng, n, -4.0, 4.0, 0.05)?;
        let a = rng.random_range(0.5..6.0);
        let b = rng.random_range(n as f64 - 0.5..8.0);
        let series = ln_hyp_matrix(HypKind::OneFOne { a, b }, &spec, &policy)?;
        let ratio = ln_hyp_1f1_matrix_detratio(a, b, &spec, &policy)?;
        let err = if series.sign == ratio.sign { (series.ln_abs - ratio.ln_abs).exp_m1().abs() } else { 2.0 };
        worst = worst.max(err);
    }
    out.push(Check::at_most("series_vs_detratio", worst, 1e-6));

    let mut worst = 0.0_f64;
    for _ in 0..30 {
        let a = rng.random_range(0.5..4.0);
        let c = a + rng.random_range(0.5..4.0);
        let b = rng.random_range(-2.0..3.0);
        let x = rng.random_range(0.0..0.9);
        let y = rng.random_range(0.0..40.0);
        let on_y = ln_humbert_phi1_integral(a, b, c, 0.0, y)?.to_f64();
        worst = worst.max(rel(on_y, kummer_1f1(a, c, y, &policy)?));
        let on_x = ln_humbert_phi1_integral(a, b, c, x, 0.0)?.to_f64();
        worst = worst.max(rel(on_x, gauss_2f1(a, b, c, x, &policy)?));
        let y = rng.random_range(0.0..20.0);
        let equal = ln_humbert_phi1_series(a, b, a, x, y, &policy)?.to_f64();
        worst = worst.max(rel(equal, y.exp() * (1.0 - x).powf(-b)));
    }
    out.push(Check::at_most("phi1_reductions", worst, 1e-10));

    let spec = EigenSpectrum::new(vec![-0.7, 0.2, 0.8])?;
    for (label, kind) in [
        ("limit_zero_argument_0f1", HypKind::ZeroFOne { b: 4.0 }),
        ("limit_zero_argument_1f1", HypKind::OneFOne { a: 2.0, b: 4.0 }),
        ("limit_zero_argument_1f0", HypKind::OneFZero { a: 2.0 }),
    ] {
        let mut errs = Vec::new();
        for c in [1e-1, 1e-2, 1e-3, 1e-4] {
            let v = ln_hyp_matrix(kind, &spec.scaled(c)?, &policy)?;
            errs.push(v.ln_abs.exp_m1().abs());
        }
        out.push(Check::decreasing(label, &errs));
    }

    let spec = EigenSpectrum::new(vec![0.5, 2.0, 3.5])?;
    let target = ln_hyp_matrix(HypKind::ZeroFOne { b: 4.0 }, &spec, &policy)?.ln_abs;
    let mut errs = Vec::new();
    for a in [10.0, 100.0, 1000.0, 10000.0] {
        let v = ln_hyp_1f1_matrix(a, 4.0, &spec.scaled(1.0 / a)?, &policy)?;
        errs.push((v.ln_abs - target).abs());
    }
    out.push(Check::decreasing("limit_confluent_1f1_to_0f1", &errs));

    let lambda = ComplexMatrix::from_diagonal_element(3, 3, 1.0.into()) * num_complex::Complex64::new(2.5, 0.0)
        + crate::linalg::real_matrix(3, 3, &[0.0, 0.4, 0.1, 0.4, 0.0, -0.2, 0.1, -0.2, 0.0]);
    let target = -lambda.trace().re;
    let mut errs = Vec::new();
    for m in [10.0, 100.0, 1000.0, 10000.0] {
        let ln = -m * ln_det_hermitian_pd(&(identity(3) + &lambda / num_complex::Complex64::new(m, 0.0)))?;
        errs.push((ln - target).abs());
    }
    out.push(Check::decreasing("limit_determinant_to_etr", &errs));

    let params = ScaledIdentityParams::with_inverse_rate(2, 4, 2.0, 1.0, 8.0)?.to_model()?;
    let at_zero = mgf(&ComplexMatrix::zeros(2, 2), &params)?;
    out.push(Check::at_most("mgf_at_zero", (at_zero - 1.0).abs(), 0.0));
    Ok(out)
}

fn reductions(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let draws = 10_000;

    let far = ScaledIdentityParams::new(2, 4, 2.0, 1.0, 1e8)?;
    let model = estimate_max_eig_samples(&far.to_model()?, draws, seed)?;
    let law = law_max_eig_samples(&reduction_params(ReductionKind::RayleighLimit, &far)?, draws, seed ^ 0x5a5a)?;
    out.push(Check::at_most("rayleigh_limit_ks", ks_two_sample(&model, &law), 0.015));

    let mp = ScaledIdentityParams::new(2, 4, 4.0, 1.0, 0.5)?;
    let model = estimate_max_eig_samples(&mp.to_model()?, draws, seed.wrapping_add(1))?;
    let law = law_max_eig_samples(&reduction_params(ReductionKind::RayleighMp, &mp)?, draws, seed.wrapping_add(2))?;
    out.push(Check::at_most("rayleigh_mp_ks", ks_two_sample(&model, &law), 0.015));

    let dist = MaxEigDistribution::new(&mp)?;
    let table = TabulatedCdf::build(0.0, 1.05 * law.sorted_samples()[draws - 1], 400, |x| dist.cdf_and_pdf(x))?;
    out.push(Check::at_most("rayleigh_mp_analytic_ks", ks_statistic(&law, |x| table.eval(x)), 0.015));

    let rician = ScaledIdentityParams::with_inverse_rate(2, 4, 100.0, 1.0, 0.4)?;
    let model = estimate_max_eig_samples(&rician.to_model()?, 100_000, seed.wrapping_add(3))?;
    let law = law_max_eig_samples(&reduction_params(ReductionKind::RicianLimit, &rician)?, 100_000, seed.wrapping_add(4))?;
    out.push(Check::at_most("rician_limit_ks", ks_two_sample(&model, &law), 0.02));

    let mut distances = Vec::new();
    for (k, m) in [10.0, 100.0, 1000.0].into_iter().enumerate() {
        let params = ScaledIdentityParams::with_inverse_rate(2, 4, m, 1.0, 40.0 / m)?;
        let s = seed.wrapping_add(5 + 2 * k as u64);
        let model = estimate_max_eig_samples(&params.to_model()?, 100_000, s)?;
        distances.push(ks_two_sample(&model, &law));
    }
    out.push(Check::decreasing("rician_limit_ks_trend", &distances));

    let a = crate::linalg::real_matrix(2, 2, &[30.0, 4.0, 4.0, 25.0]);
    let mut errs = Vec::new();
    for m in [10.0, 100.0, 1000.0, 10000.0] {
        let params = ScaledIdentityParams::with_inverse_rate(2, 4, m, 1.0, 40.0 / m)?;
        let law = reduction_params(ReductionKind::RicianLimit, &params)?;
        errs.push((gamma_wishart_logpdf(&a, &params.to_model()?)? - law.logpdf(&a)?).abs());
    }
    out.push(Check::decreasing("rician_density_trend", &errs));

    let sigma = scaled_identity(2, 1.0);
    let mut errs = Vec::new();
    for s2m in [1e2, 1e4, 1e6] {
        let params = ScaledIdentityParams::new(2, 4, 2.0, 1.0, s2m)?;
        errs.push((gamma_wishart_logpdf(&a, &params.to_model()?)? - central_wishart_logpdf(&a, 4, &sigma)?).abs());
    }
    out.push(Check::decreasing("rayleigh_density_trend", &errs));

    let lhs = gamma_wishart_logpdf(&a, &mp.to_model()?)?;
    let rhs = central_wishart_logpdf(&a, 4, &scaled_identity(2, 3.0))?;
    out.push(Check::at_most("rayleigh_mp_density", (lhs - rhs).abs(), 1e-10));

    let noncentral = noncentral_wishart_logpdf(&a, 4, &sigma, &ComplexMatrix::zeros(2, 2))?;
    out.push(Check::at_most("noncentral_zero_los", (noncentral - central_wishart_logpdf(&a, 4, &sigma)?).abs(), 1e-12));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pdf_err, mut mgf_err) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let siso = SisoKappaMuParams::new(
            rng.random_range(0.1..10.0),
            rng.random_range(1..=8),
            rng.random_range(0.5..20.0),
            rng.random_range(0.5..5.0),
        )?;
        let model = map_siso(&siso)?.to_model()?;
        for k in 1..=10 {
            let g = siso.gamma_bar * 0.3 * k as f64;
            let lhs = gamma_wishart_logpdf(&scaled_identity(1, g), &model)?.exp();
            pdf_err = pdf_err.max(rel(lhs, kappa_mu_shadowed_pdf(g, &siso)?));
        }
        for s in [-2.0, -0.5, -0.05, 0.05] {
            let s = s / siso.gamma_bar;
            mgf_err = mgf_err.max(rel(mgf(&scaled_identity(1, s), &model)?, kappa_mu_shadowed_mgf(s, &siso)?));
        }
    }
    out.push(Check::at_most("siso_pdf", pdf_err, 1e-9));
    out.push(Check::at_most("siso_mgf", mgf_err, 1e-12));
    Ok(out)
}

/// The four reference CDF parameter sets: (n, m, σ_M⁻², σ_Σ²) with p = 4.
pub const CDF_REFERENCE_SETS: [(usize, f64, f64, f64); 4] =
    [(2, 2.0, 8.0, 1.0), (3, 3.0, 8.0, 1.0), (2, 2.0, 40.0, 1.0), (3, 3.0, 8.0, 4.0)];

/// Shadowing ladder for the convergence check, with m σ_M⁻² = 40.
pub const CONVERGENCE_LADDER: [f64; 5] = [2.0, 4.0, 10.0, 50.0, 100.0];

fn figures(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    for (k, &(n, m, inv, s2s)) in CDF_REFERENCE_SETS.iter().enumerate() {
        let params = ScaledIdentityParams::with_inverse_rate(n, 4, m, s2s, inv)?;
        let samples = estimate_max_eig_samples(&params.to_model()?, 100_000, seed.wrapping_add(k as u64))?;
        let dist = MaxEigDistribution::new(&params)?;
        let top = 1.05 * samples.sorted_samples()[samples.count() - 1];
        let table = TabulatedCdf::build(0.0, top, 1500, |x| dist.cdf_and_pdf(x))?;
        let mut table_err = 0.0_f64;
        for j in 0..50 {
            let x = top * (j as f64 + 0.37) / 50.0;
            table_err = table_err.max((table.eval(x) - dist.cdf(x)?).abs());
        }
        let ks = ks_statistic(&samples, |x| table.eval(x));
        out.push(Check::at_most(format!("cdf_set{}_ks", k + 1), ks + table_err, 0.01));
    }

    let wide = ScaledIdentityParams::with_inverse_rate(3, 4, 3.0, 4.0, 8.0)?;
    let dist = MaxEigDistribution::new(&wide)?;
    let breaks: Vec<f64> = (0..=40).map(|k| 20.0 * k as f64).collect();
    let tol = QuadratureTolerance { abs: 1e-13, rel: 1e-10, max_subdivisions: 2000 };
    let mass = integrate_pieces(|x| dist.pdf(x).unwrap_or(f64::NAN), &breaks, tol)?;
    out.push(Check::at_most("pdf_normalization", (mass.value - 1.0).abs(), 1e-6));

    let samples = estimate_max_eig_samples(&wide.to_model()?, 1_000_000, seed.wrapping_add(10))?;
    let hist = histogram(&samples);
    let cmp = compare_histogram(&hist, |x| dist.cdf(x).unwrap_or(f64::NAN));
    out.push(Check::at_least("pdf_histogram_within_3se", cmp.fraction_within(3.0), 0.95));

    let (distances, _) = convergence_distances(seed.wrapping_add(20), 2_000_000)?;
    out.push(Check::decreasing("convergence_ladder_monotone", &distances));
    out.push(Check::at_most("convergence_m100_sup_distance", distances[distances.len() - 1], 0.003));
    Ok(out)
}

/// Sup-distance between the bin-averaged analytic pdf at each rung of
/// [`CONVERGENCE_LADDER`] and a histogram of the noncentral-Wishart limit.
/// Also returns the histogram's largest standard error.
pub fn convergence_distances(seed: u64, draws: usize) -> Result<(Vec<f64>, f64)> {
    let limit = ScaledIdentityParams::with_inverse_rate(2, 4, 100.0, 1.0, 0.4)?;
    let law = reduction_params(ReductionKind::RicianLimit, &limit)?;
    let reference = law_max_eig_samples(&law, draws, seed)?;
    let hist = histogram(&reference);
    let mut distances = Vec::new();
    for &m in &CONVERGENCE_LADDER {
        let params = ScaledIdentityParams::with_inverse_rate(2, 4, m, 1.0, 40.0 / m)?;
        let dist = MaxEigDistribution::new(&params)?;
        let mut cdf_err = None;
        let cmp = compare_histogram(&hist, |x| {
            dist.cdf(x).unwrap_or_else(|e| {
                cdf_err.get_or_insert(e);
                f64::NAN
            })
        });
        if let Some(e) = cdf_err {
            return Err(e);
        }
        distances.push(cmp.max_abs_difference);
    }
    let noise = hist.std_errors.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok((distances, noise))
}
