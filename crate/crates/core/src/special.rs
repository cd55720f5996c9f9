//! Scalar special functions: gamma family, Pochhammer symbols, Kummer ₁F₁,
//! Gauss ₂F₁ and the Humbert confluent function Φ₁.
//!
//! Every quantity that can overflow is available in [`LogValue`] form. The
//! plain `f64` entry points exponentiate at the very end.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::logval::{LogAccumulator, LogValue};
use crate::quadrature::tanh_sinh;

/// Termination rule shared by every series in the crate.
///
/// A series stops once `consecutive_small_terms` successive terms are each
/// below `rel_tolerance` times the running sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub rel_tolerance: f64,
    pub max_terms: usize,
    pub consecutive_small_terms: usize,
}

impl SeriesPolicy {
    pub fn new(rel_tolerance: f64, max_terms: usize, consecutive_small_terms: usize) -> Result<Self> {
        if !(rel_tolerance > 0.0) {
            return Err(Error::InvalidParameter("rel_tolerance must be > 0".into()));
        }
        if max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be ≥ 1".into()));
        }
        if consecutive_small_terms < 2 {
            return Err(Error::InvalidParameter("consecutive_small_terms must be ≥ 2".into()));
        }
        Ok(SeriesPolicy {
            rel_tolerance,
            max_terms,
            consecutive_small_terms,
        })
    }

    /// Tighter policy used internally where results feed determinants.
    pub fn precise() -> Self {
        SeriesPolicy {
            rel_tolerance: 1e-16,
            max_terms: 20_000,
            consecutive_small_terms: 3,
        }
    }
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tolerance: 1e-12,
            max_terms: 10_000,
            consecutive_small_terms: 3,
        }
    }
}

/// Counts consecutive small terms; only terms past the peak (decreasing
/// magnitude) are allowed to count, so a slowly starting series is not cut.
struct Stopper {
    needed: usize,
    seen: usize,
    tol: f64,
}

impl Stopper {
    fn new(policy: &SeriesPolicy) -> Self {
        Stopper {
            needed: policy.consecutive_small_terms,
            seen: 0,
            tol: policy.rel_tolerance,
        }
    }

    /// `ln_term`, `ln_sum`: log magnitudes; `decreasing`: |t_{k+1}| < |t_k| holds from here on.
    fn done(&mut self, ln_term: f64, ln_sum: f64, decreasing: bool) -> bool {
        if decreasing && ln_term < ln_sum + self.tol.ln() {
            self.seen += 1;
        } else {
            self.seen = 0;
        }
        self.seen >= self.needed
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ζ(k) − 1 for k = 2..=60 via Euler–Maclaurin summation.
fn zeta_minus_one_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Bernoulli numbers B2..B12.
        const B: [f64; 6] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
        ];
        let n_cut = 20.0_f64;
        (0..=60)
            .map(|k| {
                if k < 2 {
                    return f64::NAN;
                }
                let kf = k as f64;
                let mut s: f64 = (2..20).rev().map(|n| (n as f64).powf(-kf)).sum();
                s += n_cut.powf(1.0 - kf) / (kf - 1.0) + 0.5 * n_cut.powf(-kf);
                let mut rising = kf; // (k)_{2j-1}
                let mut fact = 2.0; // (2j)!
                for (j, b) in B.iter().enumerate() {
                    let jj = (j + 1) as f64;
                    s += b / fact * rising * n_cut.powf(-kf - 2.0 * jj + 1.0);
                    rising *= (kf + 2.0 * jj - 1.0) * (kf + 2.0 * jj);
                    fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
                }
                s
            })
            .collect()
    })
}

/// ln Γ(2 + z) for |z| ≤ 0.5 by its Taylor series.
fn ln_gamma_two_plus(z: f64) -> f64 {
    let zeta = zeta_minus_one_table();
    let mut sum = (1.0 - EULER_GAMMA) * z;
    let mut zk = -z;
    for (k, zm1) in zeta.iter().enumerate().skip(2) {
        zk *= -z;
        let term = zm1 * zk / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn ln_gamma_stirling(x: f64) -> f64 {
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in C {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires a finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x
        ln_gamma_pos(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        // ln Γ(1+z) = ln Γ(2+z) − ln(1+z)
        ln_gamma_two_plus(z) - z.ln_1p()
    } else if x < 2.5 {
        ln_gamma_two_plus(x - 2.0)
    } else if x < 12.0 {
        // Shift down into [1.5, 2.5); all factors exceed 1.5, so no cancellation.
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_two_plus(y - 2.0)
    } else {
        ln_gamma_stirling(x)
    }
}

/// ln |Γ(x)| and the sign of Γ(x) for any real x that is not a pole.
pub fn log_gamma_signed(x: f64) -> Result<LogValue> {
    if x > 0.0 {
        return Ok(LogValue::from_ln(ln_gamma_pos(x)));
    }
    if x == x.floor() {
        return Err(Error::Domain(format!("Γ has a pole at {x}")));
    }
    // Reflection: Γ(x) Γ(1−x) = π / sin(πx)
    let s = (PI * x).sin();
    let lg = ln_gamma_pos(1.0 - x);
    Ok(LogValue::new(PI.ln() - s.abs().ln() - lg, s.signum()))
}

/// ln Γ̃ₙ(a) = n(n−1)/2 · ln π + Σᵢ ln Γ(a − i + 1), the complex multivariate gamma.
pub fn log_multivariate_gamma(n: usize, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("multivariate gamma needs n ≥ 1".into()));
    }
    if !(a > n as f64 - 1.0) {
        return Err(Error::Domain(format!("multivariate gamma needs a > n − 1 = {}, got {a}", n - 1)));
    }
    let nf = n as f64;
    let mut acc = nf * (nf - 1.0) / 2.0 * PI.ln();
    for i in 1..=n {
        acc += ln_gamma_pos(a - i as f64 + 1.0);
    }
    Ok(acc)
}

/// Rising factorial (a)ₖ in log-magnitude and sign form.
pub fn log_pochhammer(a: f64, k: usize) -> LogValue {
    if k == 0 {
        return LogValue::ONE;
    }
    let kf = k as f64;
    if a <= 0.0 && a == a.floor() && -a < kf {
        return LogValue::ZERO;
    }
    if k <= 64 {
        let mut ln = 0.0;
        let mut sign = 1.0;
        for i in 0..k {
            let f = a + i as f64;
            ln += f.abs().ln();
            if f < 0.0 {
                sign = -sign;
            }
        }
        return LogValue::new(ln, sign);
    }
    if a > 0.0 {
        return LogValue::from_ln(ln_gamma_pos(a + kf) - ln_gamma_pos(a));
    }
    // Negative non-integer a with many factors: peel the negative factors off.
    let neg = (-a).ceil() as usize;
    let head = log_pochhammer(a, neg.min(k));
    if neg >= k {
        return head;
    }
    head * log_pochhammer(a + neg as f64, k - neg)
}

/// Rising factorial (a)ₖ = a(a+1)…(a+k−1).
pub fn pochhammer(a: f64, k: usize) -> f64 {
    log_pochhammer(a, k).to_f64()
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Sums Σ tₖ with t₀ = 1 and tₖ₊₁ = tₖ · ratio(k), rescaling to stay finite.
///
/// `settled(k)` reports that every parameter factor is positive from index k
/// on, so the ratio no longer changes sign. `limit` is lim |ratio(k)|; the
/// remaining tail is bounded by |t| r/(1 − r) with r = max(|ratio|, limit).
fn hypergeometric_series<R, S>(ratio: R, settled: S, limit: f64, policy: &SeriesPolicy, context: &'static str) -> Result<LogValue>
where
    R: Fn(usize) -> f64,
    S: Fn(usize) -> bool,
{
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut ln_scale = 0.0_f64;
    let mut stop = Stopper::new(policy);
    for k in 0..policy.max_terms {
        term *= ratio(k);
        if term == 0.0 {
            return Ok(LogValue::new(ln_scale + sum.abs().ln(), sum.signum()));
        }
        sum += term;
        if term.abs() > 1e200 || sum.abs() > 1e200 {
            term *= 1e-200;
            sum *= 1e-200;
            ln_scale += 200.0 * std::f64::consts::LN_10;
        }
        if !term.is_finite() || !sum.is_finite() {
            return Err(Error::Domain(format!("{context}: non-finite series term")));
        }
        let r = ratio(k + 1).abs().max(limit);
        let past_peak = r < 1.0 && settled(k + 1);
        let ln_tail = if past_peak {
            term.abs().ln() + r.ln() - (1.0 - r).ln()
        } else {
            term.abs().ln()
        };
        if stop.done(ln_tail, sum.abs().ln(), past_peak) {
            return Ok(LogValue::new(ln_scale + sum.abs().ln(), sum.signum()));
        }
    }
    Err(Error::NonConvergence {
        context,
        terms: policy.max_terms,
    })
}

/// Asymptotic expansion of ₁F₁ for large positive x, valid when the
/// algebraically small companion term is negligible.
fn kummer_asymptotic(a: f64, b: f64, x: f64) -> Option<LogValue> {
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    // Relative size of the dropped Γ(b)/Γ(b−a)·x^{−a} branch.
    if !is_nonpositive_integer(b - a) {
        let g = log_gamma_signed(b - a).ok()?;
        let ln_ratio = ln_gamma_pos(a) - g.ln_abs + (b - 2.0 * a) * x.ln() - x;
        if ln_ratio > (1e-17f64).ln() {
            return None;
        }
    }
    let mut sum = 1.0;
    let mut term = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64;
        term *= (b - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * x);
        // A zero term ends a terminating expansion (integer a or b − a).
        if term != 0.0 {
            if term.abs() > prev {
                return None;
            }
            prev = term.abs();
            sum += term;
        }
        if term == 0.0 || term.abs() < 1e-17 * sum.abs() {
            let ln = ln_gamma_pos(b) - ln_gamma_pos(a) + x + (a - b) * x.ln() + sum.abs().ln();
            return Some(LogValue::new(ln, sum.signum()));
        }
    }
    None
}

/// ln ₁F₁(a; b; x) in signed form.
pub fn ln_kummer_1f1(a: f64, b: f64, x: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    if is_nonpositive_integer(b) && !(is_nonpositive_integer(a) && a > b) {
        return Err(Error::Domain(format!("₁F₁ undefined for b = {b}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("₁F₁ argument must be finite, got {x}")));
    }
    if x == 0.0 || a == 0.0 {
        return Ok(LogValue::ONE);
    }
    if a == b {
        return Ok(LogValue::from_ln(x));
    }
    if x < 0.0 && !is_nonpositive_integer(a) {
        // Kummer transform: positive argument, terms of one sign after a few flips.
        let t = ln_kummer_1f1(b - a, b, -x, policy)?;
        return Ok(LogValue::new(t.ln_abs + x, t.sign));
    }
    if x > 50.0 && !is_nonpositive_integer(a) {
        if let Some(v) = kummer_asymptotic(a, b, x) {
            return Ok(v);
        }
    }
    hypergeometric_series(
        |k| {
            let kf = k as f64;
            (a + kf) * x / ((b + kf) * (kf + 1.0))
        },
        |k| k as f64 + a > 0.0 && k as f64 + b > 0.0 && k as f64 > x.abs(),
        0.0,
        policy,
        "kummer_1f1",
    )
}

/// Confluent hypergeometric ₁F₁(a; b; x).
pub fn kummer_1f1(a: f64, b: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(ln_kummer_1f1(a, b, x, policy)?.to_f64())
}

/// Confluent limit ₀F₁(; b; x), used for the n = 1 Bessel-type reduction.
pub fn ln_hyp_0f1(b: f64, x: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("₀F₁ undefined for b = {b}")));
    }
    hypergeometric_series(
        |k| {
            let kf = k as f64;
            x / ((b + kf) * (kf + 1.0))
        },
        |k| k as f64 + b > 0.0,
        0.0,
        policy,
        "hyp_0f1",
    )
}

/// ln ₂F₁(a, b; c; x) for |x| < 1.
pub fn ln_gauss_2f1(a: f64, b: f64, c: f64, x: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    if !(x.abs() < 1.0) {
        return Err(Error::Domain(format!("₂F₁ series needs |x| < 1, got {x}")));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("₂F₁ undefined for c = {c}")));
    }
    if x == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(LogValue::ONE);
    }
    if x < 0.0 {
        // Pfaff: ₂F₁(a,b;c;x) = (1−x)^{−a} ₂F₁(a, c−b; c; x/(x−1)), argument in (0, 1/2).
        let t = ln_gauss_2f1_series(a, c - b, c, x / (x - 1.0), policy)?;
        return Ok(LogValue::new(t.ln_abs - a * (-x).ln_1p(), t.sign));
    }
    ln_gauss_2f1_series(a, b, c, x, policy)
}

fn ln_gauss_2f1_series(a: f64, b: f64, c: f64, x: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    hypergeometric_series(
        |k| {
            let kf = k as f64;
            (a + kf) * (b + kf) * x / ((c + kf) * (kf + 1.0))
        },
        |k| {
            let kf = k as f64;
            kf + a > 0.0 && kf + b > 0.0 && kf + c > 0.0
        },
        x.abs(),
        policy,
        "gauss_2f1",
    )
}

/// Gauss hypergeometric ₂F₁(a, b; c; x) for |x| < 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(ln_gauss_2f1(a, b, c, x, policy)?.to_f64())
}

/// Above this y-argument Φ₁ switches from the double series to its Euler integral.
pub const PHI1_INTEGRAL_THRESHOLD: f64 = 30.0;

/// ln Φ₁(a, b, c; x, y), the Humbert confluent function
/// Σ_{r,s} (a)_{r+s} (b)_s / ((c)_{r+s} r! s!) yʳ xˢ.
///
/// The ordering pairs `b` with `x`, so Φ₁(a,b,c;x,0) = ₂F₁(a,b;c;x) and
/// Φ₁(a,b,c;0,y) = ₁F₁(a;c;y).
pub fn ln_humbert_phi1(a: f64, b: f64, c: f64, x: f64, y: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    check_phi1_domain(c, x, y)?;
    if y == 0.0 {
        return ln_gauss_2f1(a, b, c, x, policy);
    }
    if x == 0.0 || b == 0.0 {
        return ln_kummer_1f1(a, c, y, policy);
    }
    if y > PHI1_INTEGRAL_THRESHOLD && c > a && a > 0.0 {
        return ln_humbert_phi1_integral(a, b, c, x, y);
    }
    ln_humbert_phi1_series(a, b, c, x, y, policy)
}

/// Humbert Φ₁(a, b, c; x, y); see [`ln_humbert_phi1`].
pub fn humbert_phi1(a: f64, b: f64, c: f64, x: f64, y: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(ln_humbert_phi1(a, b, c, x, y, policy)?.to_f64())
}

fn check_phi1_domain(c: f64, x: f64, y: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("Φ₁ needs 0 ≤ x < 1, got {x}")));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("Φ₁ needs finite y ≥ 0, got {y}")));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("Φ₁ undefined for c = {c}")));
    }
    Ok(())
}

/// Double-series evaluation, organised as Σ_r (a)_r/((c)_r r!) yʳ ₂F₁(a+r, b; c+r; x).
pub fn ln_humbert_phi1_series(a: f64, b: f64, c: f64, x: f64, y: f64, policy: &SeriesPolicy) -> Result<LogValue> {
    check_phi1_domain(c, x, y)?;
    let mut acc = LogAccumulator::new();
    let mut coef = LogValue::ONE;
    let mut stop = Stopper::new(policy);
    let ln_y = y.ln();
    for r in 0..policy.max_terms {
        let rf = r as f64;
        if r > 0 {
            let step = LogValue::from_f64((a + rf - 1.0) / ((c + rf - 1.0) * rf));
            coef = coef * step * LogValue::from_ln(ln_y);
            if coef.is_zero() {
                return Ok(acc.value());
            }
        }
        let inner = ln_gauss_2f1(a + rf, b, c + rf, x, policy)?;
        let term = coef * inner;
        acc.push(term);
        // Past r > y the y-ratio is below one; ₂F₁(a+r,b;c+r;x) tends to (1−x)^{−b}.
        let decreasing = rf > y && rf + a > 0.0 && rf + c > 0.0;
        if stop.done(term.ln_abs, acc.ln_abs(), decreasing) {
            return Ok(acc.value());
        }
    }
    Err(Error::NonConvergence {
        context: "humbert_phi1",
        terms: policy.max_terms,
    })
}

/// Euler-integral evaluation, valid for c > a > 0:
/// Φ₁ = Γ(c)/(Γ(a)Γ(c−a)) ∫₀¹ t^{a−1}(1−t)^{c−a−1}(1−xt)^{−b} e^{yt} dt.
pub fn ln_humbert_phi1_integral(a: f64, b: f64, c: f64, x: f64, y: f64) -> Result<LogValue> {
    check_phi1_domain(c, x, y)?;
    if !(c > a && a > 0.0) {
        return Err(Error::Domain(format!("Φ₁ integral form needs c > a > 0, got a = {a}, c = {c}")));
    }
    // Substitute u = 1 − t and pull e^{y} out: the kernel is then bounded by 1
    // in its exponential part and concentrated on u ≲ 1/y.
    let kernel = |u: f64, one_minus_u: f64| -> f64 {
        let ln = (a - 1.0) * one_minus_u.ln() + (c - a - 1.0) * u.ln() - b * (1.0 - x * one_minus_u).ln() - y * u;
        ln.exp()
    };
    let mut breaks = vec![0.0];
    let mut edge = 1.0 / y.max(1.0);
    while edge < 1.0 {
        breaks.push(edge);
        edge *= 4.0;
    }
    breaks.push(1.0);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let r = tanh_sinh(
            |u, dl, dr| {
                // dl = u − lo, dr = hi − u; recover u and 1 − u accurately at the ends.
                let u_acc = if lo == 0.0 { dl } else { u };
                let one_minus = if hi == 1.0 { dr } else { 1.0 - u };
                kernel(u_acc, one_minus)
            },
            lo,
            hi,
            1e-14,
        )?;
        total += r.value;
    }
    if !(total > 0.0) {
        return Err(Error::Domain("Φ₁ integral underflowed".into()));
    }
    let ln_norm = ln_gamma_pos(c) - ln_gamma_pos(a) - ln_gamma_pos(c - a);
    Ok(LogValue::from_ln(ln_norm + y + total.ln()))
}
