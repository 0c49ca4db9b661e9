use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::numeric::{ilogb, ldexp};

/// High-dynamic-range complex number `significand * 2^exponent`.
///
/// The significand's modulus is kept in `[1, 2)` (or it is exactly zero),
/// and the exponent is a 64-bit integer, so magnitudes like `e^{e^6}` or
/// `|z|^40 e^{-e^{|z|}}` are representable without overflow.
#[derive(Clone, Copy, PartialEq)]
pub struct Hdr {
    sig: Complex64,
    exp: i64,
}

impl fmt::Debug for Hdr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)*2^{}", self.sig.re, self.sig.im, self.exp)
    }
}

impl Hdr {
    pub const ZERO: Hdr = Hdr {
        sig: Complex64::new(0.0, 0.0),
        exp: 0,
    };

    pub fn one() -> Hdr {
        Hdr::from(Complex64::new(1.0, 0.0))
    }

    /// Builds `sig * 2^exp` and normalizes.
    pub fn from_parts(sig: Complex64, exp: i64) -> Hdr {
        Hdr { sig, exp }.normalized()
    }

    fn normalized(self) -> Hdr {
        let m = self.sig.norm();
        if m == 0.0 {
            return Hdr::ZERO;
        }
        if !m.is_finite() {
            // rescale components first so the modulus is representable
            let k = ilogb(self.sig.re.abs().max(self.sig.im.abs()));
            let s = Complex64::new(ldexp(self.sig.re, -k), ldexp(self.sig.im, -k));
            return Hdr {
                sig: s,
                exp: self.exp + k,
            }
            .normalized();
        }
        let mut k = ilogb(m);
        let mut sig = Complex64::new(ldexp(self.sig.re, -k), ldexp(self.sig.im, -k));
        // rounding in the modulus can leave it a hair outside [1, 2)
        let n = sig.norm();
        if n >= 2.0 {
            sig = sig * 0.5;
            k += 1;
        } else if n < 1.0 {
            sig = sig * 2.0;
            k -= 1;
        }
        Hdr {
            sig,
            exp: self.exp + k,
        }
    }

    pub fn significand(&self) -> Complex64 {
        self.sig
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.sig.re == 0.0 && self.sig.im == 0.0
    }

    /// `ln |self|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.sig.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    /// Converts to an ordinary complex number (may overflow or underflow).
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.sig.re, self.exp), ldexp(self.sig.im, self.exp))
    }

    pub fn scale(&self, c: f64) -> Hdr {
        Hdr::from_parts(self.sig * c, self.exp)
    }
}

impl From<Complex64> for Hdr {
    fn from(z: Complex64) -> Hdr {
        Hdr { sig: z, exp: 0 }.normalized()
    }
}

impl From<f64> for Hdr {
    fn from(x: f64) -> Hdr {
        Hdr::from(Complex64::new(x, 0.0))
    }
}

impl Mul for Hdr {
    type Output = Hdr;
    fn mul(self, o: Hdr) -> Hdr {
        if self.is_zero() || o.is_zero() {
            return Hdr::ZERO;
        }
        Hdr {
            sig: self.sig * o.sig,
            exp: self.exp + o.exp,
        }
        .normalized()
    }
}

impl Add for Hdr {
    type Output = Hdr;
    fn add(self, o: Hdr) -> Hdr {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let shift = big.exp - small.exp;
        if shift > 120 {
            return big;
        }
        let s = Complex64::new(ldexp(small.sig.re, -shift), ldexp(small.sig.im, -shift));
        Hdr {
            sig: big.sig + s,
            exp: big.exp,
        }
        .normalized()
    }
}

impl Neg for Hdr {
    type Output = Hdr;
    fn neg(self) -> Hdr {
        Hdr {
            sig: -self.sig,
            exp: self.exp,
        }
    }
}

impl Sub for Hdr {
    type Output = Hdr;
    fn sub(self, o: Hdr) -> Hdr {
        self + (-o)
    }
}
