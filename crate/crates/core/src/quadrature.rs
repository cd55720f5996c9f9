//! One-dimensional numerical integration.
//!
//! Two integrators are provided: a globally adaptive Gauss–Kronrod (7/15)
//! rule for smooth integrands on finite intervals, and tanh-sinh
//! (double-exponential) quadrature for integrands with integrable endpoint
//! singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute/relative tolerance pair plus a subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureTolerance {
    fn default() -> Self {
        QuadratureTolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the total
/// estimate drops below `max(tol.abs, tol.rel * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: QuadratureTolerance,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult { value: 0.0, error: 0.0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    for _ in 0..tol.max_subdivisions {
        if !total.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(QuadratureResult { value: total, error: total_err });
        }
        let seg = heap.pop().expect("heap never empties");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval collapsed to machine resolution; cannot refine further.
            heap.push(seg);
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated rounding from the incremental updates.
    let total: f64 = heap.iter().map(|s| s.value).sum();
    let total_err: f64 = heap.iter().map(|s| s.error).sum();
    if total_err <= tol.abs.max(tol.rel * total.abs()) {
        Ok(QuadratureResult { value: total, error: total_err })
    } else {
        Err(Error::Quadrature {
            context: "adaptive Gauss-Kronrod",
            estimate: total_err,
            tolerance: tol.abs.max(tol.rel * total.abs()),
        })
    }
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, each adaptively.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: QuadratureTolerance,
) -> Result<QuadratureResult> {
    let mut out = QuadratureResult { value: 0.0, error: 0.0 };
    for w in breakpoints.windows(2) {
        let r = integrate(&f, w[0], w[1], tol)?;
        out.value += r.value;
        out.error += r.error;
    }
    Ok(out)
}

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` with both endpoint distances
/// computed without cancellation, so kernels such as `t^(α-1) (1-t)^(β-1)`
/// stay accurate right up to the endpoints.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult { value: 0.0, error: 0.0 });
    }
    let half = 0.5 * (b - a);
    let center_value = f(0.5 * (a + b), half, half) * std::f64::consts::FRAC_PI_2;

    // Sum over nodes u = k h for k ≡ offset (mod step), k ≥ 1, both sides.
    let side_sum = |h: f64, start: usize, step: usize| -> f64 {
        let mut acc = 0.0;
        let mut k = start;
        loop {
            let u = k as f64 * h;
            let v = std::f64::consts::FRAC_PI_2 * u.sinh();
            let e = (-2.0 * v).exp();
            // 1 - tanh(v) = 2 e^{-2v} / (1 + e^{-2v})
            let one_minus_t = 2.0 * e / (1.0 + e);
            let w = std::f64::consts::FRAC_PI_2 * u.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            let d = half * one_minus_t;
            if d <= 0.0 || w == 0.0 || !d.is_normal() {
                break;
            }
            let right = f(b - d, b - a - d, d);
            let left = f(a + d, d, b - a - d);
            let contrib = w * (left + right);
            acc += contrib;
            k += step;
            if u > 7.0 {
                break;
            }
        }
        acc
    };

    let mut h = 1.0;
    let mut sum = center_value + side_sum(h, 1, 1);
    let mut estimate = h * sum * half;
    for level in 0..10 {
        h *= 0.5;
        sum += side_sum(h, 1, 2);
        let next = h * sum * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Domain("tanh-sinh integrand produced a non-finite value".into()));
        }
        if level >= 2 && (diff <= rel_tol * estimate.abs() || (estimate == 0.0 && diff == 0.0)) {
            return Ok(QuadratureResult { value: estimate, error: diff });
        }
    }
    Err(Error::Quadrature {
        context: "tanh-sinh",
        estimate: (estimate).abs(),
        tolerance: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_are_exact_for_polynomials() {
        // K15 integrates degree ≤ 22 exactly; G7 degree ≤ 13.
        for deg in 0..=22 {
            let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "deg {deg}: {v} vs {exact}");
        }
        let wsum: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((wsum - 2.0).abs() < 1e-15);
        let gsum: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((gsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let r = integrate(|x| (-(x - 3.0).powi(2) * 50.0).exp(), 0.0, 10.0, QuadratureTolerance::default()).unwrap();
        let exact = (std::f64::consts::PI / 50.0).sqrt();
        assert!((r.value - exact).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 t^{-1/2} (1-t)^{-1/2} dt = π
        let r = tanh_sinh(|_, l, r| 1.0 / (l.sqrt() * r.sqrt()), 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-12, "{}", r.value);
        // ∫_0^2 ln(x) dx = 2 ln 2 - 2
        let r = tanh_sinh(|_, l, _| l.ln(), 0.0, 2.0, 1e-14).unwrap();
        assert!((r.value - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-12);
    }
}
