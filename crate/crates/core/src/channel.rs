//! Channel parameters and exact samplers for H = Ĥ + Ξ, where Ĥ has i.i.d.
//! rows CN(0, Σ) and Ξᴴ Ξ follows the complex matrix gamma law Γₙ(m, M).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, hermitian_part, hermitian_pd_inverse, hermitian_sqrt, is_hermitian, is_positive_definite,
    scaled_identity, ComplexMatrix,
};

/// General model: dimensions, shadowing severity and the two n×n matrices.
///
/// `sigma` is the scattering covariance Σ (power units); `rate` is the
/// shadowing rate matrix M, so the LOS Gram has mean m·M⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    n: usize,
    p: usize,
    m: f64,
    sigma: ComplexMatrix,
    rate: ComplexMatrix,
}

fn check_dimensions(n: usize, p: usize, m: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be a positive integer".into()));
    }
    if p < n {
        return Err(Error::InvalidParameter(format!("p ≥ n required, got p = {p}, n = {n}")));
    }
    if !(m.is_finite() && m > n as f64 - 1.0) {
        return Err(Error::InvalidParameter(format!("m > n − 1 required, got m = {m}, n = {n}")));
    }
    Ok(())
}

fn check_hpd(a: &ComplexMatrix, n: usize, name: &str) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidParameter(format!("{name} must be {n}×{n}")));
    }
    if !is_hermitian(a, 1e-12) {
        return Err(Error::InvalidParameter(format!("{name} must be Hermitian")));
    }
    if !is_positive_definite(a) {
        return Err(Error::InvalidParameter(format!("{name} must be positive definite")));
    }
    Ok(())
}

impl ModelParams {
    pub fn new(n: usize, p: usize, m: f64, sigma: ComplexMatrix, rate: ComplexMatrix) -> Result<Self> {
        check_dimensions(n, p, m)?;
        check_hpd(&sigma, n, "Σ")?;
        check_hpd(&rate, n, "M")?;
        Ok(ModelParams {
            n,
            p,
            m,
            sigma: hermitian_part(&sigma),
            rate: hermitian_part(&rate),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn rate(&self) -> &ComplexMatrix {
        &self.rate
    }

    /// E[Y] = p Σ + m M⁻¹.
    pub fn mean_gram(&self) -> Result<ComplexMatrix> {
        let inv = hermitian_pd_inverse(&self.rate)?;
        Ok(&self.sigma * Complex64::new(self.p as f64, 0.0) + inv * Complex64::new(self.m, 0.0))
    }
}

/// Σ = σ_Σ² Iₙ and M = σ_M² Iₙ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIdentityParams {
    pub n: usize,
    pub p: usize,
    pub m: f64,
    pub sigma2_sigma: f64,
    pub sigma2_m: f64,
}

impl ScaledIdentityParams {
    pub fn new(n: usize, p: usize, m: f64, sigma2_sigma: f64, sigma2_m: f64) -> Result<Self> {
        check_dimensions(n, p, m)?;
        if !(sigma2_sigma.is_finite() && sigma2_sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("σ_Σ² > 0 required, got {sigma2_sigma}")));
        }
        if !(sigma2_m.is_finite() && sigma2_m > 0.0) {
            return Err(Error::InvalidParameter(format!("σ_M² > 0 required, got {sigma2_m}")));
        }
        Ok(ScaledIdentityParams {
            n,
            p,
            m,
            sigma2_sigma,
            sigma2_m,
        })
    }

    /// Same as [`ScaledIdentityParams::new`] but takes σ_M⁻².
    pub fn with_inverse_rate(n: usize, p: usize, m: f64, sigma2_sigma: f64, inv_sigma2_m: f64) -> Result<Self> {
        if !(inv_sigma2_m.is_finite() && inv_sigma2_m > 0.0) {
            return Err(Error::InvalidParameter(format!("σ_M⁻² > 0 required, got {inv_sigma2_m}")));
        }
        Self::new(n, p, m, sigma2_sigma, 1.0 / inv_sigma2_m)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.n, self.p, self.m, self.sigma2_sigma, self.sigma2_m).map(|_| ())
    }

    /// τ = p + n.
    pub fn tau(&self) -> usize {
        self.p + self.n
    }

    pub fn inv_sigma2_m(&self) -> f64 {
        1.0 / self.sigma2_m
    }

    pub fn to_model(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.n,
            self.p,
            self.m,
            scaled_identity(self.n, self.sigma2_sigma),
            scaled_identity(self.n, self.sigma2_m),
        )
    }
}

/// Scalar κ-μ shadowed parameters (μ restricted to integers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SisoKappaMuParams {
    pub kappa: f64,
    pub mu: usize,
    pub m: f64,
    pub gamma_bar: f64,
}

impl SisoKappaMuParams {
    pub fn new(kappa: f64, mu: usize, m: f64, gamma_bar: f64) -> Result<Self> {
        for (name, v) in [("κ", kappa), ("m", m), ("γ̄", gamma_bar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} > 0 required, got {v}")));
            }
        }
        if mu == 0 {
            return Err(Error::InvalidParameter("μ must be a positive integer".into()));
        }
        Ok(SisoKappaMuParams { kappa, mu, m, gamma_bar })
    }
}

/// n = 1 model whose Gram value γ is κ-μ shadowed with the given parameters.
///
/// σ_Σ⁻² = μ(1+κ)/γ̄ and σ_M² = m(1+κ)/(κγ̄); the mean p σ_Σ² + m σ_M⁻² then
/// equals γ̄.
pub fn map_siso(params: &SisoKappaMuParams) -> Result<ScaledIdentityParams> {
    let SisoKappaMuParams { kappa, mu, m, gamma_bar } = *params;
    let sigma2_sigma = gamma_bar / (mu as f64 * (1.0 + kappa));
    let sigma2_m = m * (1.0 + kappa) / (kappa * gamma_bar);
    ScaledIdentityParams::new(1, mu, m, sigma2_sigma, sigma2_m)
}

/// Inverse of [`map_siso`]: κ = m σ_M⁻² / (μ σ_Σ²), γ̄ = μ σ_Σ² + m σ_M⁻².
pub fn siso_from_scaled(params: &ScaledIdentityParams) -> Result<SisoKappaMuParams> {
    if params.n != 1 {
        return Err(Error::InvalidParameter(format!("SISO mapping needs n = 1, got n = {}", params.n)));
    }
    let mu = params.p as f64;
    let los = params.m / params.sigma2_m;
    SisoKappaMuParams::new(los / (mu * params.sigma2_sigma), params.p, params.m, mu * params.sigma2_sigma + los)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// p×n matrix of i.i.d. standard complex normals (variance ½ per real part).
pub fn standard_complex_normal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // Column-major fill order keeps the draw sequence independent of nalgebra internals.
    let mut g = ComplexMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            g[(r, c)] = complex_normal(rng);
        }
    }
    g
}

/// Sampler for Γₙ(β, Ω) via the complex Bartlett construction.
#[derive(Debug, Clone)]
pub struct GammaVariateSampler {
    n: usize,
    diag: Vec<Gamma<f64>>,
    // (Ω⁻¹)^{1/2}
    root: ComplexMatrix,
}

impl GammaVariateSampler {
    pub fn new(n: usize, beta: f64, omega: &ComplexMatrix) -> Result<Self> {
        if n == 0 || !(beta.is_finite() && beta > n as f64 - 1.0) {
            return Err(Error::Domain(format!("gamma-variate shape β > n − 1 required, got β = {beta}, n = {n}")));
        }
        check_hpd(omega, n, "Ω")?;
        let diag = (0..n)
            .map(|i| Gamma::new(beta - i as f64, 1.0).map_err(|e| Error::Domain(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let root = hermitian_sqrt(&hermitian_pd_inverse(omega)?)?;
        Ok(GammaVariateSampler { n, diag, root })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let n = self.n;
        let mut l = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = Complex64::new(self.diag[i].sample(rng).sqrt(), 0.0);
            for j in 0..i {
                l[(i, j)] = complex_normal(rng);
            }
        }
        let cl = &self.root * l;
        hermitian_part(&(&cl * cl.adjoint()))
    }
}

/// One draw B ∼ Γₙ(β, Ω); the mean is β Ω⁻¹.
pub fn sample_gamma_variate<R: Rng + ?Sized>(n: usize, beta: f64, omega: &ComplexMatrix, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(GammaVariateSampler::new(n, beta, omega)?.sample(rng))
}

/// Sampler for Gaussian p×n matrices G Σ^{1/2} + mean, the building block of
/// the model and of its Wishart limits.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    p: usize,
    sigma_root: ComplexMatrix,
    mean: Option<ComplexMatrix>,
}

impl GaussianSampler {
    pub fn new(p: usize, sigma: &ComplexMatrix, mean: Option<ComplexMatrix>) -> Result<Self> {
        let n = sigma.nrows();
        check_hpd(sigma, n, "Σ")?;
        if let Some(mu) = &mean {
            if mu.nrows() != p || mu.ncols() != n {
                return Err(Error::InvalidParameter(format!("mean must be {p}×{n}")));
            }
        }
        Ok(GaussianSampler {
            p,
            sigma_root: hermitian_sqrt(sigma)?,
            mean,
        })
    }

    /// Gaussian with mean [Λ^{1/2}; 0], whose Gram is noncentral Wishart with
    /// LOS Gram Λ.
    pub fn with_los_gram(p: usize, sigma: &ComplexMatrix, los_gram: &ComplexMatrix) -> Result<Self> {
        let mean = embed_los(p, &hermitian_sqrt(los_gram)?);
        Self::new(p, sigma, Some(mean))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let g = standard_complex_normal(self.p, self.sigma_root.nrows(), rng) * &self.sigma_root;
        match &self.mean {
            Some(mu) => g + mu,
            None => g,
        }
    }
}

/// [R; 0] with R on the top n rows of a p×n matrix.
fn embed_los(p: usize, root: &ComplexMatrix) -> ComplexMatrix {
    let n = root.nrows();
    let mut xi = ComplexMatrix::zeros(p, n);
    xi.view_mut((0, 0), (n, n)).copy_from(root);
    xi
}

/// Precomputed square roots for repeated channel draws.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    scattering: GaussianSampler,
    los: GammaVariateSampler,
    p: usize,
}

impl ChannelSampler {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Ok(ChannelSampler {
            scattering: GaussianSampler::new(params.p, &params.sigma, None)?,
            los: GammaVariateSampler::new(params.n, params.m, &params.rate)?,
            p: params.p,
        })
    }

    pub fn scattering<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        self.scattering.sample(rng)
    }

    pub fn los_gram<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        self.los.sample(rng)
    }

    /// H = Ĥ + [B^{1/2}; 0] with B ∼ Γₙ(m, M).
    pub fn channel<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let h = self.scattering(rng);
        let b = self.los_gram(rng);
        let root = hermitian_sqrt(&b).expect("gamma variate is positive semidefinite");
        h + embed_los(self.p, &root)
    }
}

/// Ĥ ∼ CN(0, I_p ⊗ Σ).
pub fn sample_scattering<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(GaussianSampler::new(params.p, &params.sigma, None)?.sample(rng))
}

/// One channel draw H = Ĥ + Ξ.
pub fn sample_channel<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(ChannelSampler::new(params)?.channel(rng))
}

/// Y = Hᴴ H, symmetrized.
pub fn gram(h: &ComplexMatrix) -> ComplexMatrix {
    hermitian_part(&(h.adjoint() * h))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(y: &ComplexMatrix) -> Result<f64> {
    let v = hermitian_eigenvalues(y)?;
    v.last()
        .copied()
        .ok_or_else(|| Error::Domain("empty matrix has no eigenvalues".into()))
}

/// Real diagonal matrix as a complex matrix.
pub fn diagonal(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Haar-distributed p×p unitary via QR of a complex Gaussian matrix with
/// the phases of R's diagonal absorbed.
pub fn random_unitary<R: Rng + ?Sized>(p: usize, rng: &mut R) -> ComplexMatrix {
    let z = standard_complex_normal(p, p, rng);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..p {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..p {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Squared singular values of a real-or-complex matrix, ascending.
pub fn squared_singular_values(h: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = h.clone().svd(false, false).singular_values.iter().map(|v| v * v).collect();
    s.sort_by(f64::total_cmp);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, norm, real_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameter_validation() {
        assert!(ScaledIdentityParams::new(2, 4, 2.0, 1.0, 0.125).is_ok());
        let e = ScaledIdentityParams::new(3, 4, 2.0, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("m > n − 1"));
        assert!(ScaledIdentityParams::new(3, 2, 3.0, 1.0, 1.0).is_err());
        assert!(ScaledIdentityParams::new(2, 4, 2.0, -1.0, 1.0).is_err());
        let bad = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(ModelParams::new(2, 4, 2.0, bad, identity(2)).is_err());
    }

    #[test]
    fn scaled_identity_conversion_is_exact() {
        let s = ScaledIdentityParams::with_inverse_rate(3, 4, 3.0, 4.0, 8.0).unwrap();
        let m = s.to_model().unwrap();
        for i in 0..3 {
            assert_eq!(m.sigma()[(i, i)].re, 4.0);
            assert_eq!(m.rate()[(i, i)].re, 0.125);
        }
        assert_eq!(s.tau(), 7);
    }

    #[test]
    fn siso_mapping_round_trip() {
        let p = map_siso(&SisoKappaMuParams::new(1.0, 2, 3.0, 1.0).unwrap()).unwrap();
        assert_eq!(p.p, 2);
        assert!((1.0 / p.sigma2_sigma - 4.0).abs() < 1e-15);
        assert!((p.sigma2_m - 6.0).abs() < 1e-15);
        let back = siso_from_scaled(&p).unwrap();
        assert!((back.kappa - 1.0).abs() < 1e-15);
        assert!((back.gamma_bar - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram(&ComplexMatrix::zeros(3, 2)), ComplexMatrix::zeros(2, 2));
        assert_eq!(gram(&identity(3)), identity(3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = standard_complex_normal(4, 3, &mut rng);
        let eig = hermitian_eigenvalues(&gram(&h)).unwrap();
        for (a, b) in eig.iter().zip(squared_singular_values(&h)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn max_eigenvalue_examples() {
        assert!((max_eigenvalue(&identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((max_eigenvalue(&diagonal(&[1.0, 2.0, 5.0])).unwrap() - 5.0).abs() < 1e-14);
        let mut nan = identity(2);
        nan[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(max_eigenvalue(&nan).is_err());
    }

    #[test]
    fn gamma_variate_rejects_small_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_gamma_variate(3, 2.0, &identity(3), &mut rng).is_err());
        assert!(sample_gamma_variate(3, 2.5, &identity(3), &mut rng).is_ok());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(4, &mut rng);
        assert!(norm(&(u.adjoint() * &u - identity(4))) < 1e-12);
    }
}
