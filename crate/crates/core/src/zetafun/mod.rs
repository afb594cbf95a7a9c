//! Arbitrary-precision evaluation of Hurwitz zeta, quadratic Dirichlet
//! L-functions, Dedekind zeta of real quadratic fields and the family zeta
//! values `zeta_{N,D,rho}(k)`.

mod family;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, is_fundamental, kronecker};
use crate::numeric::{self, Real};

pub use family::{count_table, zeta_family_direct, zeta_family_euler, ZetaResult};

/// Bernoulli correction terms in the Euler-Maclaurin formula.
const EM_DEPTH: u32 = 12;
/// Largest shift tried before giving up.
const EM_MAX_SHIFT: u64 = 1 << 24;

/// `s (s+1) ... (s+m-1)`
fn rising(s: u32, m: u32) -> Integer {
    (0..m).map(|i| Integer::from(s + i)).product()
}

/// log2 of the first omitted Euler-Maclaurin term at shift `m`.
fn em_remainder_log2(s: u32, shifted: f64) -> f64 {
    let j = EM_DEPTH + 1;
    let b = bernoulli(2 * j).to_f64().abs();
    let coeff = Rational::from((rising(s, 2 * j - 1), factorial(2 * j))).to_f64();
    (b * coeff).log2() - (s + 2 * j - 1) as f64 * shifted.log2()
}

/// `zeta(s, x) = sum_{n >= 0} (n + x)^{-s}` for integer `s >= 2` and
/// `0 < x <= 1`, together with a bound on its absolute error.
pub fn hurwitz_zeta_bounded(s: u32, x: &Real, prec: u32) -> Result<(Real, Real)> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "Hurwitz zeta needs s >= 2, got {s}"
        )));
    }
    if *x <= 0 || *x > 1 {
        return Err(Error::InvalidArgument(format!(
            "Hurwitz zeta needs 0 < x <= 1, got {}",
            x.to_f64()
        )));
    }
    let prec = numeric::clamp_prec(prec);
    let work = prec + 32;
    let xf = x.to_f64();
    let target = -(prec as f64) - 10.0;
    let mut m = (30.0 - xf).ceil().max(0.0) as u64;
    while em_remainder_log2(s, m as f64 + xf) > target {
        m = 2 * m + 30;
        if m > EM_MAX_SHIFT {
            return Err(Error::PrecisionUnreachable(format!(
                "Hurwitz zeta at s = {s} needs a shift beyond {EM_MAX_SHIFT} for {prec} bits"
            )));
        }
    }
    let x = Real::with_val(work, x);
    let mut sum = Real::new(work);
    for n in (0..m).rev() {
        let base = Real::with_val(work, &x + n);
        sum += base.pow(s).recip();
    }
    let a = Real::with_val(work, &x + m);
    let a_pow = Real::with_val(work, (&a).pow(s));
    sum += Real::with_val(work, &a / &a_pow) / (s - 1);
    sum += Real::with_val(work, a_pow.clone().recip()) / 2u32;
    let a2_inv = Real::with_val(work, a.clone().square()).recip();
    // (M+x)^{-s-2j+1}, starting at j = 1
    let mut power = Real::with_val(work, &a / &a_pow) * &a2_inv;
    for j in 1..=EM_DEPTH {
        let coeff = bernoulli(2 * j) * Rational::from((rising(s, 2 * j - 1), factorial(2 * j)));
        sum += Real::with_val(work, &coeff) * &power;
        power *= &a2_inv;
    }
    let omitted = Real::with_val(work, em_remainder_log2(s, a.to_f64())).exp2();
    let rounding =
        Real::with_val(work, &sum * (m + 8 * EM_DEPTH as u64)) >> (work as i32 - 4);
    let final_rounding = Real::with_val(prec, &sum).abs() >> (prec as i32 - 1);
    let bound = Real::with_val(prec, omitted + rounding.abs()) + final_rounding;
    Ok((Real::with_val(prec, sum), bound))
}

pub fn hurwitz_zeta(s: u32, x: &Real, prec: u32) -> Result<Real> {
    hurwitz_zeta_bounded(s, x, prec).map(|(v, _)| v)
}

/// Riemann zeta at an integer `s >= 2`.
pub fn riemann_zeta(s: u32, prec: u32) -> Result<Real> {
    hurwitz_zeta(s, &Real::with_val(numeric::clamp_prec(prec), 1), prec)
}

/// `L(s, (D/.)) = D^{-s} sum_{r=1}^{D} (D/r) zeta(s, r/D)` for any
/// `D = 0, 1 mod 4`, `D > 0`, where the symbol is periodic modulo `D`.
pub(crate) fn kronecker_l(s: u32, d: i64, prec: u32) -> Result<Real> {
    let prec = numeric::clamp_prec(prec);
    if d == 1 {
        return riemann_zeta(s, prec);
    }
    // The r = 1 term is about D^s; the sum is O(1).
    let work = prec + 32 + (s as f64 * (d as f64).log2()).ceil() as u32;
    let mut acc = Real::new(work);
    for r in 1..=d {
        let chi = kronecker(d, r);
        if chi == 0 {
            continue;
        }
        let x = numeric::real_from_rational(work, &Rational::from((r, d)));
        let h = hurwitz_zeta(s, &x, work)?;
        if chi > 0 {
            acc += h;
        } else {
            acc -= h;
        }
    }
    let scale = Real::with_val(work, Real::with_val(work, d).pow(s)).recip();
    Ok(Real::with_val(prec, acc * scale))
}

/// `L(s, chi_D)` for a fundamental discriminant `D > 0` (`D = 1` gives
/// `zeta(s)`).
pub fn dirichlet_l(s: u32, d: i64, prec: u32) -> Result<Real> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    if s < 2 {
        return Err(Error::InvalidArgument(format!("L-value needs s >= 2, got {s}")));
    }
    kronecker_l(s, d, prec)
}

/// `zeta_K(s) = zeta(s) L(s, chi_D)` for `K = Q(sqrt D)`.
pub fn dedekind_zeta_oracle(d: i64, s: u32, prec: u32) -> Result<Real> {
    let l = dirichlet_l(s, d, prec + 16)?;
    let z = riemann_zeta(s, prec + 16)?;
    Ok(Real::with_val(numeric::clamp_prec(prec), l * z))
}
