//! Arbitrary-precision real and complex carriers.
//!
//! [`Real`] is an MPFR float; it carries its own precision. Arithmetic helpers
//! here produce results at the precision of the coarsest operand unless a
//! precision is given explicitly.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

pub type Real = Float;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;

/// Default precision for oracle computations.
pub const DEFAULT_PRECISION: u32 = 192;

pub fn clamp_prec(prec: u32) -> u32 {
    prec.max(MIN_PRECISION)
}

pub fn real(prec: u32, value: impl Into<f64>) -> Real {
    Float::with_val(clamp_prec(prec), value.into())
}

pub fn real_from_int(prec: u32, value: &Integer) -> Real {
    Float::with_val(clamp_prec(prec), value)
}

pub fn real_from_rational(prec: u32, value: &Rational) -> Real {
    Float::with_val(clamp_prec(prec), value)
}

pub fn pi(prec: u32) -> Real {
    Float::with_val(clamp_prec(prec), Constant::Pi)
}

/// `min(a.prec, b.prec)`
pub fn coarsest(a: &Real, b: &Real) -> u32 {
    a.prec().min(b.prec())
}

/// Renders `x` as a decimal string with roughly as many significant digits as
/// its precision supports.
pub fn decimal_string(x: &Real) -> String {
    let digits = ((x.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Complex number with both parts at a shared precision.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Complex {
    pub fn zero(prec: u32) -> Self {
        Complex {
            re: real(prec, 0.0),
            im: real(prec, 0.0),
        }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Complex { re, im }
    }

    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    /// `i^n`, exact.
    pub fn i_pow(n: i64, prec: u32) -> Self {
        let (re, im) = match n.rem_euclid(4) {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        Complex::new(real(prec, re), real(prec, im))
    }

    /// `exp(i * theta)`
    pub fn expi(theta: &Real) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Complex { re: c, im: s }
    }

    pub fn scale(&self, s: &Real) -> Self {
        let p = self.prec().min(s.prec());
        Complex {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Complex {
            re: Float::with_val(self.im.prec(), -&self.im),
            im: self.re.clone(),
        }
    }

    pub fn abs(&self) -> Real {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let n = Float::with_val(p, self.re.clone().square() + self.im.clone().square());
        Complex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -(&self.im / n)),
        }
    }

    pub fn powi(&self, exp: i64) -> Self {
        let mut base = if exp < 0 { self.recip() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Complex::from_real(Float::with_val(self.prec(), 1));
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let p = self.prec().min(rhs.prec());
        Complex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let p = self.prec().min(rhs.prec());
        Complex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let p = self.prec().min(rhs.prec());
        let rr = Float::with_val(p, &self.re * &rhs.re);
        let ii = Float::with_val(p, &self.im * &rhs.im);
        let ri = Float::with_val(p, &self.re * &rhs.im);
        let ir = Float::with_val(p, &self.im * &rhs.re);
        Complex {
            re: rr - ii,
            im: ri + ir,
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

/// `x^e` for a non-negative integer exponent, at `prec` bits.
pub fn pow_u(x: &Real, e: u32, prec: u32) -> Real {
    Float::with_val(prec, x.pow(e))
}
