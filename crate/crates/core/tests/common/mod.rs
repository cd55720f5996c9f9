#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Plain power series of ₁F₁ for x ≥ 0, where every term is positive.
pub fn series_1f1(a: f64, b: f64, x: f64) -> f64 {
    assert!(x >= 0.0 && a > 0.0 && b > 0.0);
    let (mut term, mut sum) = (1.0_f64, 1.0_f64);
    for k in 0..100_000 {
        let k = k as f64;
        term *= (a + k) / (b + k) * x / (k + 1.0);
        sum += term;
        if term < 1e-18 * sum && k > x {
            break;
        }
    }
    sum
}

/// Plain power series of ₂F₁ for |x| ≤ 0.95.
pub fn series_2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    assert!(x.abs() <= 0.95);
    let (mut term, mut sum) = (1.0_f64, 1.0_f64);
    for k in 0..100_000 {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && k > 10.0 {
            break;
        }
    }
    sum
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// κ-μ shadowed power density with integer μ.
pub fn kappa_mu_pdf(g: f64, kappa: f64, mu: usize, m: f64, gbar: f64) -> f64 {
    let muf = mu as f64;
    let r = g / gbar;
    let head = muf.powf(muf) * m.powf(m) * (1.0 + kappa).powf(muf)
        / (factorial(mu - 1) * gbar * (muf * kappa + m).powf(m));
    let kummer = series_1f1(m, muf, muf * muf * kappa * (1.0 + kappa) * r / (muf * kappa + m));
    head * r.powf(muf - 1.0) * (-muf * (1.0 + kappa) * r).exp() * kummer
}

/// E[e^{sγ}] of the κ-μ shadowed power.
pub fn kappa_mu_mgf(s: f64, kappa: f64, mu: usize, m: f64, gbar: f64) -> f64 {
    let muf = mu as f64;
    let a = muf * (1.0 + kappa) / gbar;
    (1.0 - s / a).powf(m - muf) * (1.0 - s * (muf * kappa + m) / (a * m)).powf(-m)
}

/// Largest eigenvalue of a 2×2 Hermitian matrix [[a, b], [b̄, d]].
pub fn max_eig_2x2(a: f64, d: f64, b_re: f64, b_im: f64) -> f64 {
    0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b_re * b_re + b_im * b_im).sqrt()
}

/// Largest eigenvalue of Hᴴ H where H is p×2 with i.i.d. CN(0, σ²) entries
/// plus `los` on the first two diagonal entries.
pub fn wishart_2x2_max_eig<R: Rng>(rng: &mut R, p: usize, sigma2: f64, los: f64) -> f64 {
    let sd = (0.5 * sigma2).sqrt();
    let (mut a, mut d, mut br, mut bi) = (0.0, 0.0, 0.0, 0.0);
    for row in 0..p {
        let mut draw = || -> f64 { sd * rng.sample::<f64, _>(StandardNormal) };
        let (mut x_re, x_im) = (draw(), draw());
        let (mut y_re, y_im) = (draw(), draw());
        if row == 0 {
            x_re += los;
        }
        if row == 1 {
            y_re += los;
        }
        a += x_re * x_re + x_im * x_im;
        d += y_re * y_re + y_im * y_im;
        // (x̄ y) accumulates the off-diagonal entry of Hᴴ H.
        br += x_re * y_re + x_im * y_im;
        bi += x_re * y_im - x_im * y_re;
    }
    max_eig_2x2(a, d, br, bi)
}

pub fn wishart_2x2_samples(seed: u64, count: usize, p: usize, sigma2: f64, los_power: f64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let los = los_power.sqrt();
    let mut v: Vec<f64> = (0..count).map(|_| wishart_2x2_max_eig(&mut rng, p, sigma2, los)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// sup |F_emp − F| over sorted samples, both one-sided gaps.
pub fn ks_one_sample(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance of sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0_f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule over equal panels of [a, b].
pub fn integrate_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        for &(x, w) in rule {
            total += 0.5 * h * w * f(mid + 0.5 * h * x);
        }
    }
    total
}
