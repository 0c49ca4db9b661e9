//! Log-domain helpers shared across the crate.

use crate::weight_expr::Rational;

/// A real number stored as `sign * exp(ln)`.
///
/// `sign` is `-1`, `0` or `1`; for zero `ln` is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln: f64::NEG_INFINITY,
    };

    pub fn positive(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign: 1, ln }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x.is_nan() {
            SignedLog { sign: 1, ln: f64::NAN }
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.ln.exp(),
        }
    }

    pub fn neg(self) -> Self {
        SignedLog {
            sign: -self.sign,
            ln: self.ln,
        }
    }

    pub fn mul(self, o: Self) -> Self {
        if self.sign == 0 || o.sign == 0 {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * o.sign,
            ln: self.ln + o.ln,
        }
    }

    pub fn div(self, o: Self) -> Self {
        if o.sign == 0 {
            return SignedLog {
                sign: if self.sign == 0 { 1 } else { self.sign },
                ln: if self.sign == 0 { f64::NAN } else { f64::INFINITY },
            };
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        SignedLog {
            sign: self.sign * o.sign,
            ln: self.ln - o.ln,
        }
    }

    pub fn pow_rational(self, q: Rational) -> Self {
        if q == Rational::ZERO {
            return SignedLog { sign: 1, ln: 0.0 };
        }
        match self.sign {
            0 => {
                if q.numer() > 0 {
                    Self::ZERO
                } else {
                    SignedLog {
                        sign: 1,
                        ln: f64::INFINITY,
                    }
                }
            }
            1 => SignedLog {
                sign: 1,
                ln: self.ln * q.to_f64(),
            },
            _ => {
                if q.denom() % 2 == 0 {
                    // even root of a negative number
                    SignedLog {
                        sign: 1,
                        ln: f64::NAN,
                    }
                } else {
                    SignedLog {
                        sign: if q.numer() % 2 == 0 { 1 } else { -1 },
                        ln: self.ln * q.to_f64(),
                    }
                }
            }
        }
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Signed addition in the log domain.
pub fn ln_add_signed(a: SignedLog, b: SignedLog) -> SignedLog {
    if a.sign == 0 {
        return b;
    }
    if b.sign == 0 {
        return a;
    }
    if a.ln.is_nan() || b.ln.is_nan() {
        return SignedLog { sign: 1, ln: f64::NAN };
    }
    if a.sign == b.sign {
        return SignedLog {
            sign: a.sign,
            ln: ln_add(a.ln, b.ln),
        };
    }
    let (big, small) = if a.ln >= b.ln { (a, b) } else { (b, a) };
    if big.ln == small.ln {
        return SignedLog::ZERO;
    }
    if big.ln == f64::INFINITY {
        return big;
    }
    SignedLog {
        sign: big.sign,
        ln: big.ln + (-(small.ln - big.ln).exp()).ln_1p(),
    }
}

/// `ln(sum_i e^{x_i})`, accumulated in slice order.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    let s: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + s.ln()
}

/// `x * 2^n` for any `n` (two-step scaling keeps intermediate powers finite).
pub fn ldexp(x: f64, n: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut x = x;
    let mut n = n.clamp(-2200, 2200);
    while n > 1000 {
        x *= 2f64.powi(1000);
        n -= 1000;
    }
    while n < -1000 {
        x *= 2f64.powi(-1000);
        n += 1000;
    }
    x * 2f64.powi(n as i32)
}

/// Binary exponent `e` such that `2^e <= |x| < 2^{e+1}`; `x` finite and nonzero.
pub fn ilogb(x: f64) -> i64 {
    debug_assert!(x != 0.0 && x.is_finite());
    let bits = x.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        let scaled = x.abs() * 2f64.powi(64);
        ilogb(scaled) - 64
    } else {
        biased - 1023
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// `ln(n!)` by direct summation.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_add_handles_extremes() {
        assert_eq!(ln_add(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((ln_add(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add(1e6, 0.0), 1e6);
    }

    #[test]
    fn signed_subtraction() {
        let a = SignedLog::from_f64(5.0);
        let b = SignedLog::from_f64(-3.0);
        assert!((ln_add_signed(a, b).to_f64() - 2.0).abs() < 1e-14);
        assert!((ln_add_signed(b.neg().neg(), a.neg()).to_f64() + 8.0).abs() < 1e-13);
        assert_eq!(ln_add_signed(a, a.neg()).sign, 0);
    }

    #[test]
    fn ldexp_and_ilogb() {
        assert_eq!(ldexp(1.5, 3), 12.0);
        assert_eq!(ldexp(ldexp(1.0, 1000), -1000), 1.0);
        assert_eq!(ldexp(ldexp(1.0, -1060), 1060), 1.0);
        assert_eq!(ldexp(3.0, 1500), f64::INFINITY);
        assert_eq!(ilogb(1.0), 0);
        assert_eq!(ilogb(3.9), 1);
        assert_eq!(ilogb(0.3), -2);
        assert_eq!(ilogb(f64::MIN_POSITIVE / 8.0), -1025);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&xs, &ys) - 2.0).abs() < 1e-15);
    }
}
