//! Signed log-magnitude numbers.
//!
//! Several closed forms multiply gamma functions, powers and exponentials
//! whose individual sizes overflow `f64` long before their product does.
//! [`LogValue`] carries `sign * exp(ln_abs)` so those products can be formed
//! safely and only exponentiated at the end.

use std::ops::{Div, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    /// -1, 0 or +1.
    pub sign: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };
    pub const ONE: LogValue = LogValue {
        ln_abs: 0.0,
        sign: 1.0,
    };

    pub fn new(ln_abs: f64, sign: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue {
                ln_abs,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_abs: x.abs().ln(),
                sign: x.signum(),
            }
        }
    }

    /// Positive value from its logarithm.
    pub fn from_ln(ln_abs: f64) -> Self {
        Self::new(ln_abs, 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            return if e > 0.0 { Self::ZERO } else { Self::from_ln(f64::INFINITY) };
        }
        // Negative bases are only meaningful for integer exponents.
        let sign = if self.sign < 0.0 && e.rem_euclid(2.0) == 1.0 { -1.0 } else { 1.0 };
        LogValue::new(self.ln_abs * e, sign)
    }

    /// Sum of two signed log values.
    pub fn add(self, other: LogValue) -> LogValue {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.ln_abs - big.ln_abs).exp() * small.sign * big.sign;
        let s = 1.0 + ratio;
        if s == 0.0 {
            return Self::ZERO;
        }
        LogValue::new(big.ln_abs + s.abs().ln(), big.sign * s.signum())
    }

    pub fn sub(self, other: LogValue) -> LogValue {
        self.add(-other)
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::new(self.ln_abs + rhs.ln_abs, self.sign * rhs.sign)
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        if rhs.is_zero() {
            return LogValue::new(f64::INFINITY, self.sign);
        }
        LogValue::new(self.ln_abs - rhs.ln_abs, self.sign * rhs.sign)
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            ln_abs: self.ln_abs,
            sign: -self.sign,
        }
    }
}

/// Running sum of terms given in log form.
///
/// Keeps a plain `f64` mantissa relative to a reference scale and rescales
/// whenever a term would overflow it.
#[derive(Debug, Clone)]
pub(crate) struct LogAccumulator {
    mantissa: f64,
    scale: f64,
}

impl LogAccumulator {
    pub fn new() -> Self {
        LogAccumulator {
            mantissa: 0.0,
            scale: f64::NEG_INFINITY,
        }
    }

    pub fn push(&mut self, term: LogValue) {
        if term.is_zero() {
            return;
        }
        if self.scale == f64::NEG_INFINITY {
            self.scale = term.ln_abs;
            self.mantissa = term.sign;
            return;
        }
        if term.ln_abs > self.scale + 30.0 {
            self.mantissa *= (self.scale - term.ln_abs).exp();
            self.scale = term.ln_abs;
        }
        self.mantissa += term.sign * (term.ln_abs - self.scale).exp();
    }

    pub fn value(&self) -> LogValue {
        if self.mantissa == 0.0 {
            LogValue::ZERO
        } else {
            LogValue::new(self.scale + self.mantissa.abs().ln(), self.mantissa.signum())
        }
    }

    /// ln |current sum|, or -inf when empty.
    pub fn ln_abs(&self) -> f64 {
        self.value().ln_abs
    }
}
