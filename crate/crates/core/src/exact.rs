//! Exact integer and rational primitives.

use std::cell::RefCell;
use std::fmt;
use std::sync::RwLock;

use rug::ops::Pow;
use rug::{Complete, Integer, Rational};

use crate::error::{Error, Result};
use crate::numeric::{self, Real};

static BERNOULLI_MEMO: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

thread_local! {
    static BERNOULLI_FAULT: RefCell<Option<(u32, Rational)>> = const { RefCell::new(None) };
}

/// The Bernoulli number `B_n` with `B_1 = -1/2`.
///
/// Values come from the recurrence `sum_{j=0}^{n} C(n+1, j) B_j = 0` in exact
/// arithmetic and are memoized process-wide.
pub fn bernoulli(n: u32) -> Rational {
    if let Some(v) = BERNOULLI_FAULT.with(|f| {
        f.borrow()
            .as_ref()
            .and_then(|(idx, v)| (*idx == n).then(|| v.clone()))
    }) {
        return v;
    }
    let idx = n as usize;
    {
        let memo = BERNOULLI_MEMO.read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = memo.get(idx) {
            return v.clone();
        }
    }
    let mut memo = BERNOULLI_MEMO.write().unwrap_or_else(|e| e.into_inner());
    // Another writer may have extended the table meanwhile; the recurrence is
    // deterministic so continuing from whatever is there is idempotent.
    while memo.len() <= idx {
        let m = memo.len() as u32;
        if m == 0 {
            memo.push(Rational::from(1));
            continue;
        }
        let mut acc = Rational::new();
        for (j, b) in memo.iter().enumerate() {
            let c = Integer::binomial_u(m + 1, j as u32).complete();
            acc += Rational::from(c) * b;
        }
        memo.push(-acc / Rational::from(m + 1));
    }
    memo[idx].clone()
}

/// Runs `f` with `B_n` replaced by `value` on the current thread. Used for
/// fault-injection checks of the verification suite.
pub fn with_bernoulli_override<R>(n: u32, value: Rational, f: impl FnOnce() -> R) -> R {
    struct Reset;
    impl Drop for Reset {
        fn drop(&mut self) {
            BERNOULLI_FAULT.with(|s| *s.borrow_mut() = None);
        }
    }
    BERNOULLI_FAULT.with(|s| *s.borrow_mut() = Some((n, value)));
    let _reset = Reset;
    f()
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::binomial_u(n, k).complete()
}

pub fn factorial(n: u32) -> Integer {
    Integer::factorial(n).complete()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `sigma_ell(n) = sum_{d | n} d^ell`
pub fn sigma_divisor(ell: u32, n: u64) -> Result<Integer> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sigma_divisor is undefined at n = 0".into(),
        ));
    }
    Ok(divisors(n)
        .into_iter()
        .map(|d| Integer::from(d).pow(ell))
        .sum())
}

pub fn is_perfect_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u64);
    r * r == n as u64
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Writes `n = s^2 * f` with `f` squarefree; returns `(s, f)`.
pub fn square_part(n: &Integer) -> (Integer, Integer) {
    let n64 = n
        .to_u64()
        .expect("square_part: surd argument outside the u64 range");
    let mut s = 1u64;
    let mut f = 1u64;
    for (p, e) in factorize(n64) {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
    }
    (Integer::from(s), Integer::from(f))
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Fundamental discriminants of real quadratic fields. `1` is accepted as the
/// discriminant of the trivial character.
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d <= 1 {
        return false;
    }
    let du = d as u64;
    match d % 4 {
        1 => is_squarefree(du),
        0 => {
            let m = du / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Kronecker symbol `(d / n)`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (d / n) for odd positive n.
    let mut a = d.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// A value of the form `q * pi^pi_power / sqrt(d_sqrt)` with `d_sqrt`
/// squarefree. Zero is stored as `q = 0, pi_power = 0, d_sqrt = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactValue {
    q: Rational,
    pi_power: u32,
    d_sqrt: Integer,
}

impl ExactValue {
    pub fn new(q: Rational, pi_power: u32, d_sqrt: Integer) -> Result<Self> {
        if d_sqrt <= 0 {
            return Err(Error::InvalidArgument(format!(
                "surd argument must be positive, got {d_sqrt}"
            )));
        }
        if q == 0 {
            return Ok(Self::zero());
        }
        let (s, f) = square_part(&d_sqrt);
        Ok(ExactValue {
            q: q / Rational::from(s),
            pi_power,
            d_sqrt: f,
        })
    }

    pub fn zero() -> Self {
        ExactValue {
            q: Rational::new(),
            pi_power: 0,
            d_sqrt: Integer::from(1),
        }
    }

    pub fn rational(q: Rational) -> Self {
        Self::new(q, 0, Integer::from(1)).expect("unit surd is valid")
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn pi_power(&self) -> u32 {
        self.pi_power
    }

    pub fn d_sqrt(&self) -> &Integer {
        &self.d_sqrt
    }

    pub fn is_zero(&self) -> bool {
        self.q == 0
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(
            Rational::from(&self.q * r),
            self.pi_power,
            self.d_sqrt.clone(),
        )
        .expect("existing surd is valid")
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    /// Product of two exact values; surds multiply and are re-normalized.
    pub fn mul(&self, other: &ExactValue) -> Self {
        let d = Integer::from(&self.d_sqrt * &other.d_sqrt);
        Self::new(
            Rational::from(&self.q * &other.q),
            self.pi_power + other.pi_power,
            d,
        )
        .expect("product of positive surds is positive")
    }

    /// Sum of two values of the same shape, or `None` when the shapes differ.
    pub fn checked_add(&self, other: &ExactValue) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        (self.pi_power == other.pi_power && self.d_sqrt == other.d_sqrt).then(|| {
            Self::new(
                Rational::from(&self.q + &other.q),
                self.pi_power,
                self.d_sqrt.clone(),
            )
            .expect("existing surd is valid")
        })
    }

    pub fn to_real(&self, prec: u32) -> Real {
        let prec = numeric::clamp_prec(prec);
        let work = prec + 32;
        let mut v = numeric::real_from_rational(work, &self.q);
        if self.pi_power > 0 {
            v *= numeric::pow_u(&numeric::pi(work), self.pi_power, work);
        }
        if self.d_sqrt != 1 {
            v /= numeric::real_from_int(work, &self.d_sqrt).sqrt();
        }
        Real::with_val(prec, v)
    }
}

impl fmt::Display for ExactValue {
    /// `4*pi^4/(51*sqrt(17))`-style rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = self.q.numer();
        let den = self.q.denom();
        let mut head = num.to_string();
        if self.pi_power > 0 {
            let pi = if self.pi_power == 1 {
                "pi".to_string()
            } else {
                format!("pi^{}", self.pi_power)
            };
            head = match num.to_i32() {
                Some(1) => pi,
                Some(-1) => format!("-{pi}"),
                _ => format!("{head}*{pi}"),
            };
        }
        let surd = (self.d_sqrt != 1).then(|| format!("sqrt({})", self.d_sqrt));
        match (*den == 1, surd) {
            (true, None) => write!(f, "{head}"),
            (true, Some(s)) => write!(f, "{head}/{s}"),
            (false, None) => write!(f, "{head}/{den}"),
            (false, Some(s)) => write!(f, "{head}/({den}*{s})"),
        }
    }
}

/// `zeta(two_k)` as `(-1)^{n+1} B_{2n} (2 pi)^{2n} / (2 (2n)!)`, `2n = two_k`.
pub fn zeta_even_exact(two_k: u32) -> Result<ExactValue> {
    if two_k == 0 || two_k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "zeta_even_exact needs a positive even argument, got {two_k}"
        )));
    }
    let n = two_k / 2;
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let two_pow = Integer::from(1) << (two_k - 1);
    let q = bernoulli(two_k) * Rational::from((two_pow * sign, factorial(two_k)));
    ExactValue::new(q, two_k, Integer::from(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_four_matches_zeta_four_partial_sums() {
        // B_4 = (-1)^{n+1} 2 (2n)! zeta(2n) / (2 pi)^{2n} with n = 2, zeta(4)
        // from partial sums plus the integral tail bound.
        let terms = 100_000u64;
        let mut s = 0.0f64;
        for m in (1..=terms).rev() {
            s += (m as f64).powi(-4);
        }
        let tail = (terms as f64).powi(-3) / 3.0;
        let two_pi = 2.0 * std::f64::consts::PI;
        let b4_lo = -2.0 * 24.0 * s / two_pi.powi(4);
        let b4_hi = -2.0 * 24.0 * (s + tail) / two_pi.powi(4);
        let b4 = bernoulli(4).to_f64();
        assert!(b4 <= b4_lo + 1e-15 && b4 >= b4_hi - 1e-15, "{b4} vs [{b4_hi}, {b4_lo}]");
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for m in 1..=15 {
            assert_eq!(bernoulli(2 * m + 1), 0, "B_{}", 2 * m + 1);
        }
    }

    #[test]
    fn bernoulli_override_is_thread_local_and_reset() {
        let tampered = with_bernoulli_override(4, rat(1, 7), || bernoulli(4));
        assert_eq!(tampered, rat(1, 7));
        assert_eq!(bernoulli(4), rat(-1, 30));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_divisor(1, 1).unwrap(), 1);
        let s = sigma_divisor(1, 2).unwrap() + sigma_divisor(1, 1).unwrap();
        assert_eq!(s, 4);
        let s = 2 * sigma_divisor(1, 4).unwrap() + 2 * sigma_divisor(1, 2).unwrap();
        assert_eq!(s, 20);
        assert_eq!(sigma_divisor(0, 12).unwrap(), 6);
        assert!(matches!(sigma_divisor(1, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sigma_multiplicative_on_coprime_pairs() {
        for ell in 0..=6 {
            for m in 1..=40u64 {
                for n in 1..=40u64 {
                    if gcd(m, n) != 1 {
                        continue;
                    }
                    let lhs = sigma_divisor(ell, m * n).unwrap();
                    let rhs = sigma_divisor(ell, m).unwrap() * sigma_divisor(ell, n).unwrap();
                    assert_eq!(lhs, rhs, "ell={ell} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(17, 1), 1);
        assert_eq!(kronecker(5, 4), kronecker(5, 2).pow(2));
        assert_eq!(kronecker(5, 4), 1);
        // 6^2 = 36 = 2 mod 17
        assert!((1..17i64).any(|x| x * x % 17 == 2));
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(12, 5), -1);
    }

    #[test]
    fn kronecker_multiplicative_and_periodic_for_fundamental() {
        for d in [5i64, 8, 12, 13, 17] {
            assert!(is_fundamental(d));
            for n in 1..=d {
                assert_eq!(kronecker(d, n), kronecker(d, n + d), "period d={d} n={n}");
                for m in 1..=d {
                    assert_eq!(
                        kronecker(d, n * m),
                        kronecker(d, n) * kronecker(d, m),
                        "multiplicativity d={d} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_agrees_with_euler_criterion_on_odd_primes() {
        for d in [5i64, 13, 17, 29, 145] {
            for p in [3i64, 7, 11, 19, 23, 31, 37, 41] {
                if d % p == 0 {
                    continue;
                }
                let residue = (1..p).any(|x| (x * x - d).rem_euclid(p) == 0);
                assert_eq!(kronecker(d, p), if residue { 1 } else { -1 }, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let fund: Vec<i64> = (1..=60).filter(|&d| is_fundamental(d)).collect();
        assert_eq!(
            fund,
            vec![1, 5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 57, 60]
        );
        assert!(is_fundamental(145));
        assert!(!is_fundamental(16));
        assert!(!is_fundamental(45));
    }

    #[test]
    fn zeta_even_values() {
        let z4 = zeta_even_exact(4).unwrap();
        assert_eq!(z4, ExactValue::new(rat(1, 90), 4, Integer::from(1)).unwrap());
        let z2 = zeta_even_exact(2).unwrap();
        assert_eq!(z2.q(), &rat(1, 6));
        let z6 = zeta_even_exact(6).unwrap();
        assert_eq!(z6.q(), &rat(1, 945));
        assert!(zeta_even_exact(3).is_err());
        assert!(zeta_even_exact(0).is_err());
    }

    #[test]
    fn zeta_even_matches_partial_sums() {
        // Partial sum S_M plus tail in [M^{1-s}/(s-1) - M^{-s}, M^{1-s}/(s-1)].
        let m = 20_000u64;
        for two_k in [2u32, 4, 6, 8, 10] {
            let prec = 128;
            let mut s = Real::with_val(prec, 0);
            for n in (1..=m).rev() {
                s += Real::with_val(prec, Real::with_val(prec, n).pow(two_k)).recip();
            }
            let mf = Real::with_val(prec, m);
            let upper_tail =
                Real::with_val(prec, mf.clone().pow(1 - two_k as i32)) / (two_k as f64 - 1.0);
            let exact = zeta_even_exact(two_k).unwrap().to_real(prec);
            let gap = Real::with_val(prec, &exact - &s);
            assert!(gap >= 0, "two_k={two_k}");
            assert!(gap <= upper_tail, "two_k={two_k} gap={gap}");
            if two_k == 6 {
                // tail at M = 2e4 is ~6e-23, far under 1e-12
                assert!(gap.to_f64() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_value_normalizes_square_parts() {
        let a = ExactValue::new(rat(4, 51), 4, Integer::from(17)).unwrap();
        let b = ExactValue::new(rat(4 * 3, 51), 4, Integer::from(17 * 9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "4*pi^4/(51*sqrt(17))");
        assert_eq!(
            ExactValue::new(rat(-1, 1), 2, Integer::from(5)).unwrap().to_string(),
            "-pi^2/sqrt(5)"
        );
        assert_eq!(ExactValue::rational(rat(3, 2)).to_string(), "3/2");
        assert_eq!(ExactValue::new(rat(0, 1), 4, Integer::from(17)).unwrap(), ExactValue::zero());
    }

    #[test]
    fn exact_value_numeric() {
        let v = ExactValue::new(rat(4, 51), 4, Integer::from(17)).unwrap();
        let x = v.to_real(128).to_f64();
        let expect = 4.0 * std::f64::consts::PI.powi(4) / (51.0 * 17f64.sqrt());
        assert!((x - expect).abs() < 1e-14 * expect);
    }

    proptest! {
        #[test]
        fn rational_arithmetic_is_exact(a in -10_000i64..10_000, b in 1i64..10_000,
                                        c in -10_000i64..10_000, d in 1i64..10_000) {
            let x = rat(a, b);
            let y = rat(c, d);
            let z = Rational::from(&x + &y) - &y;
            prop_assert_eq!(z, x);
        }

        #[test]
        fn divisors_divide_and_are_complete(n in 1u64..5000) {
            let ds = divisors(n);
            let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            prop_assert_eq!(ds, brute);
        }

        #[test]
        fn sigma_is_multiplicative(m in 1u64..400, n in 1u64..400, ell in 0u32..4) {
            prop_assume!(gcd(m, n) == 1);
            let lhs = sigma_divisor(ell, m * n).unwrap();
            let rhs = sigma_divisor(ell, m).unwrap() * sigma_divisor(ell, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn kronecker_is_multiplicative(m in 1i64..500, n in 1i64..500,
                                       d in prop::sample::select(vec![5i64, 8, 12, 13, 17, 21, 24, 145])) {
            prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }
    }
}
