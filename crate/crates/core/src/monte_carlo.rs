//! Monte-Carlo estimation and goodness-of-fit tools.
//!
//! Sampling is split into fixed-size chunks. Chunk `c` draws from a ChaCha8
//! generator seeded with the master seed and switched to stream `c`, so the
//! merged output depends only on the seed and the sample count, never on how
//! many worker threads ran the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{gram, max_eigenvalue, ChannelSampler, GaussianSampler, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitian_pd_inverse, ComplexMatrix};
use crate::stats::LimitingLaw;

/// Samples per independently seeded chunk.
pub const CHUNK_SIZE: usize = 4096;

/// Upper limit on the number of histogram bins.
pub const MAX_BINS: usize = 100;

/// Sorted sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empirical distribution needs at least one sample".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("samples must be finite".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted: samples })
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        empirical_cdf(self, x)
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.count() as f64
    }

    /// Linear-interpolated quantile, q ∈ [0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        let pos = q.clamp(0.0, 1.0) * (self.count() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        self.sorted[lo] * (1.0 - frac) + self.sorted[hi] * frac
    }
}

/// Fraction of samples ≤ x.
pub fn empirical_cdf(samples: &EmpiricalDistribution, x: f64) -> f64 {
    samples.sorted.partition_point(|&v| v <= x) as f64 / samples.count() as f64
}

/// sup |F_N − F| evaluated on both sides of every sample.
pub fn ks_statistic<F: FnMut(f64) -> f64>(samples: &EmpiricalDistribution, mut cdf: F) -> f64 {
    let n = samples.count() as f64;
    samples.sorted.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xa, xb) = (&a.sorted, &b.sorted);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0_f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Density histogram with per-bin standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramEstimate {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Number of samples the histogram was built from.
    pub sample_count: usize,
}

impl HistogramEstimate {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.bin_edges[k + 1] - self.bin_edges[k]
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.bin_edges[k] + self.bin_edges[k + 1])
    }

    /// Σ density · width.
    pub fn total_mass(&self) -> f64 {
        (0..self.bins()).map(|k| self.densities[k] * self.width(k)).sum()
    }
}

/// Number of Freedman–Diaconis bins over the sample range, capped at [`MAX_BINS`].
pub fn freedman_diaconis_bins(samples: &EmpiricalDistribution) -> usize {
    let iqr = samples.quantile(0.75) - samples.quantile(0.25);
    let range = samples.sorted[samples.count() - 1] - samples.sorted[0];
    if !(iqr > 0.0 && range > 0.0) {
        return 1;
    }
    let width = 2.0 * iqr / (samples.count() as f64).cbrt();
    ((range / width).ceil() as usize).clamp(1, MAX_BINS)
}

/// Histogram over the sample range with Freedman–Diaconis binning.
pub fn histogram(samples: &EmpiricalDistribution) -> HistogramEstimate {
    let bins = freedman_diaconis_bins(samples);
    let lo = samples.sorted[0];
    let hi = samples.sorted[samples.count() - 1];
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
    histogram_with_edges(samples, &edges)
}

/// Histogram on given ascending edges; densities are normalized by the
/// total sample count, so mass outside the edges is simply lost.
pub fn histogram_with_edges(samples: &EmpiricalDistribution, edges: &[f64]) -> HistogramEstimate {
    let n = samples.count() as f64;
    let bins = edges.len().saturating_sub(1);
    let mut counts = vec![0usize; bins];
    for k in 0..bins {
        let last = k + 1 == bins;
        let start = samples.sorted.partition_point(|&v| v < edges[k]);
        let end = if last {
            samples.sorted.partition_point(|&v| v <= edges[k + 1])
        } else {
            samples.sorted.partition_point(|&v| v < edges[k + 1])
        };
        counts[k] = end - start;
    }
    let mut densities = Vec::with_capacity(bins);
    let mut std_errors = Vec::with_capacity(bins);
    for k in 0..bins {
        let w = edges[k + 1] - edges[k];
        let c = counts[k] as f64;
        let prob = c / n;
        densities.push(prob / w);
        std_errors.push((prob * (1.0 - prob) / n).sqrt() / w);
    }
    HistogramEstimate {
        bin_edges: edges.to_vec(),
        densities,
        std_errors,
        sample_count: samples.count(),
    }
}

/// Per-bin comparison of a histogram against the bin average of an analytic
/// density, (F(b) − F(a)) / (b − a).
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramComparison {
    /// Bin-averaged analytic density.
    pub expected: Vec<f64>,
    /// (density − expected) / σ, where σ is the binomial standard error of
    /// the bin under the analytic density; this keeps sparse tail bins,
    /// including empty ones, on a finite scale.
    pub z_scores: Vec<f64>,
    pub max_abs_difference: f64,
}

impl HistogramComparison {
    /// Fraction of bins whose |z| ≤ k.
    pub fn fraction_within(&self, k: f64) -> f64 {
        let ok = self.z_scores.iter().filter(|z| z.abs() <= k).count();
        ok as f64 / self.z_scores.len().max(1) as f64
    }
}

pub fn compare_histogram<F: FnMut(f64) -> f64>(hist: &HistogramEstimate, mut cdf: F) -> HistogramComparison {
    let cdf_at: Vec<f64> = hist.bin_edges.iter().map(|&x| cdf(x)).collect();
    let mut expected = Vec::with_capacity(hist.bins());
    let mut z_scores = Vec::with_capacity(hist.bins());
    let mut max_abs = 0.0_f64;
    for k in 0..hist.bins() {
        let e = (cdf_at[k + 1] - cdf_at[k]) / hist.width(k);
        let diff = hist.densities[k] - e;
        max_abs = max_abs.max(diff.abs());
        let prob = (e * hist.width(k)).clamp(0.0, 1.0);
        let se = (prob * (1.0 - prob) / hist.sample_count as f64).sqrt() / hist.width(k);
        let z = if diff == 0.0 {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY * diff.signum()
        };
        expected.push(e);
        z_scores.push(z);
    }
    HistogramComparison {
        expected,
        z_scores,
        max_abs_difference: max_abs,
    }
}

/// Runs `draw` `count` times across deterministic chunks and concatenates
/// the results in chunk order.
pub fn sample_chunked<T, F>(count: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn largest(y: &ComplexMatrix) -> f64 {
    max_eigenvalue(y).expect("Gram matrices of finite draws are finite")
}

/// `count` draws of the largest eigenvalue of Y = Hᴴ H under the model.
pub fn estimate_max_eig_samples(params: &ModelParams, count: usize, seed: u64) -> Result<EmpiricalDistribution> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be ≥ 1".into()));
    }
    let sampler = ChannelSampler::new(params)?;
    EmpiricalDistribution::new(sample_chunked(count, seed, |rng| largest(&gram(&sampler.channel(rng)))))
}

/// `count` draws of the largest eigenvalue of Y under a Gaussian sampler.
pub fn gaussian_max_eig_samples(sampler: &GaussianSampler, count: usize, seed: u64) -> Result<EmpiricalDistribution> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be ≥ 1".into()));
    }
    EmpiricalDistribution::new(sample_chunked(count, seed, |rng| largest(&gram(&sampler.sample(rng)))))
}

/// `count` draws of the largest eigenvalue of a limiting Wishart law.
pub fn law_max_eig_samples(law: &LimitingLaw, count: usize, seed: u64) -> Result<EmpiricalDistribution> {
    gaussian_max_eig_samples(&law.sampler()?, count, seed)
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }

    /// |mean − target| in units of the standard error (0 when both vanish).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Monte-Carlo estimate of E[etr(Y S)].
pub fn estimate_mgf(params: &ModelParams, s: &ComplexMatrix, count: usize, seed: u64) -> Result<MeanEstimate> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be ≥ 1".into()));
    }
    let region = hermitian_pd_inverse(params.sigma())? - s;
    if !(hermitian_eigenvalues(&region)?[0] > 0.0) {
        return Err(Error::Domain("Σ⁻¹ − S must be positive definite".into()));
    }
    let sampler = ChannelSampler::new(params)?;
    let values = sample_chunked(count, seed, |rng| {
        let y = gram(&sampler.channel(rng));
        (y * s).trace().re.exp()
    });
    Ok(MeanEstimate::from_values(&values))
}

/// Point of an emitted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub x: f64,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Piecewise cubic Hermite interpolant of a CDF from values and derivatives
/// on a grid; used to evaluate an expensive CDF at many sample points.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedCdf {
    /// `points` must be ascending; values and slopes are F and F′ there.
    pub fn new(xs: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() || xs.len() != slopes.len() {
            return Err(Error::InvalidParameter("table needs ≥ 2 points with matching values and slopes".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("table abscissae must be strictly ascending".into()));
        }
        Ok(TabulatedCdf { xs, values, slopes })
    }

    /// Tabulates `f`, which returns (F(x), F′(x)), on a uniform grid.
    pub fn build<F>(x_min: f64, x_max: f64, points: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(f64, f64)> + Sync,
    {
        let xs: Vec<f64> = (0..points)
            .map(|k| x_min + (x_max - x_min) * k as f64 / (points - 1) as f64)
            .collect();
        let pairs = xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let (values, slopes) = pairs.into_iter().unzip();
        Self::new(xs, values, slopes)
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("non-empty")
    }

    /// Interpolated value; constant extrapolation outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x <= self.xs[0] {
            return self.values[0];
        }
        if x >= self.xs[last] {
            return self.values[last];
        }
        let k = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[k] + h10 * h * self.slopes[k] + h01 * self.values[k + 1] + h11 * h * self.slopes[k + 1]
    }
}
