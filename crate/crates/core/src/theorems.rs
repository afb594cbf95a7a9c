//! Exact evaluators for the odd-weight zeta difference and the Dedekind zeta
//! divisor-sum formula, and drivers comparing them with numerical oracles.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{
    bernoulli, binomial, divisors, factorial, is_fundamental, isqrt, prime_divisors, sigma_divisor, zeta_even_exact,
    ExactValue,
};
use crate::numeric::{self, Real};
use crate::periods::{
    closed_form_identity_component, expected_identity_numeric, identity_combination, period_polynomial_numeric,
    PeriodConfig, PeriodVector, Poly, Variant,
};
use crate::qforms::{enumerate_ac_negative, validate_family, FormFamily};
use crate::zetafun::{dedekind_zeta_oracle, zeta_family_direct, zeta_family_euler};

/// `(2k, N')` pairs with `S_{2k}^+(N') = {0}` on record.
pub const PLUS_SPACE_VANISHING: &[(u32, i64)] = &[(4, 1), (4, 2), (4, 3)];

/// `prod_{p | n} (1 - p^{-2k})`
fn euler_correction(n: i64, k: u32) -> Rational {
    prime_divisors(n as u64)
        .into_iter()
        .map(|p| 1 - Rational::from((1, Integer::from(p).pow(2 * k))))
        .product()
}

/// `D^{1/2 - k}` times `q`, as an exact value.
fn with_surd(q: Rational, pi_power: u32, disc: i64, k: u32) -> ExactValue {
    ExactValue::new(q, pi_power, Integer::from(disc).pow(2 * k - 1)).expect("positive discriminant")
}

/// `sum_{a>0>c} c^{k-1} - sum_{a<0<c} c^{k-1}` over the family.
pub fn signed_c_power_sum(fam: &FormFamily) -> Result<Integer> {
    let k1 = fam.k as u32 - 1;
    let mut s = Integer::new();
    for q in enumerate_ac_negative(fam)? {
        let t = Integer::from((&q.c).pow(k1));
        if q.a > 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    Ok(s)
}

/// The closed expression for `zeta_{N,D,rho}(k) - zeta_{N,D,-rho}(k)`, `k` odd.
pub fn theorem2_difference(k: i64, level: i64, disc: i64, rho: i64) -> Result<ExactValue> {
    let fam = validate_family(k, level, disc, rho, true)?;
    if k % 2 == 0 {
        return Err(Error::EvenWeight(k));
    }
    let k = k as u32;
    let sum = signed_c_power_sum(&fam)?;
    let q = Rational::from(Integer::from(1) << (2 * k - 1))
        * Integer::from(level).pow(k)
        * (2 * k - 1)
        * bernoulli(2 * k)
        / factorial(2 * k)
        * binomial(2 * k - 2, k - 1)
        * euler_correction(level, k)
        * sum;
    Ok(with_surd(q, 2 * k, disc, k))
}

/// Numeric side of the odd-weight difference: the exact right-hand side
/// against the difference of two truncated family zetas.
#[derive(Clone, Debug)]
pub struct Theorem2Report {
    pub exact: ExactValue,
    pub exact_numeric: Real,
    pub direct_rho: Real,
    pub direct_neg_rho: Real,
    pub direct_difference: Real,
    /// Sum of the two heuristic tail estimates.
    pub tail_estimate: Real,
    pub abs_gap: Real,
    pub c_max: u64,
}

pub fn theorem2_report(k: i64, level: i64, disc: i64, rho: i64, c_max: u64, prec: u32) -> Result<Theorem2Report> {
    let exact = theorem2_difference(k, level, disc, rho)?;
    let fam = validate_family(k, level, disc, rho, true)?;
    let prec = numeric::clamp_prec(prec);
    let a = zeta_family_direct(&fam, k as u32, c_max, prec)?;
    let b = zeta_family_direct(&fam.negated(), k as u32, c_max, prec)?;
    let diff = Real::with_val(prec, &a.value - &b.value);
    let exact_numeric = exact.to_real(prec);
    let abs_gap = Real::with_val(prec, &exact_numeric - &diff).abs();
    Ok(Theorem2Report {
        exact,
        exact_numeric,
        direct_difference: diff,
        tail_estimate: Real::with_val(prec, &a.tail_estimate + &b.tail_estimate),
        direct_rho: a.value,
        direct_neg_rho: b.value,
        abs_gap,
        c_max,
    })
}

/// How the plus-space vanishing hypothesis was settled for one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisSource {
    Table,
    Override,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusSpaceAssumption {
    pub two_k: u32,
    pub level: i64,
    pub source: HypothesisSource,
}

/// One `d | N` term of the divisor sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorTerm {
    pub d: u64,
    /// `sum_{|b| < sqrt D, b = 1 mod 2N/d} sigma_{k-1}(d (D - b^2) / 4N)`
    pub sigma_sum: Integer,
    /// `d^{-2k} prod_{p | N/d} (1 - p^{-2k})`
    pub weight: Rational,
}

#[derive(Clone, Debug)]
pub struct Theorem3Report {
    pub exact: ExactValue,
    pub numeric: Real,
    pub oracle: Real,
    pub abs_gap: Real,
    pub assumptions: Vec<PlusSpaceAssumption>,
    pub terms: Vec<DivisorTerm>,
}

/// `zeta_{Q(sqrt D)}(k)` from the divisor-sum formula, `k` even, `D = 1 mod 4N`.
pub fn theorem3_dedekind(k: i64, level: i64, disc: i64, assume_vanishing: bool, prec: u32) -> Result<Theorem3Report> {
    if k < 1 {
        return Err(Error::BadWeight(k));
    }
    if k % 2 == 1 {
        return Err(Error::OddWeight(k));
    }
    if level < 1 {
        return Err(Error::InvalidArgument(format!("level must be positive, got {level}")));
    }
    if disc <= 1 || !is_fundamental(disc) {
        return Err(Error::NotFundamental(disc));
    }
    let modulus = 4 * level;
    if disc.rem_euclid(modulus) != 1 {
        return Err(Error::BadCongruence { d: disc, modulus });
    }
    let k = k as u32;
    let mut assumptions = Vec::new();
    for d in divisors(level as u64) {
        let lvl = level / d as i64;
        let source = if PLUS_SPACE_VANISHING.contains(&(2 * k, lvl)) {
            HypothesisSource::Table
        } else if assume_vanishing {
            HypothesisSource::Override
        } else {
            return Err(Error::HypothesisUnknown {
                two_k: 2 * k as i64,
                level: lvl,
            });
        };
        assumptions.push(PlusSpaceAssumption {
            two_k: 2 * k,
            level: lvl,
            source,
        });
    }
    let root = isqrt(disc as u64) as i64;
    let mut terms = Vec::new();
    let mut total = Rational::new();
    for d in divisors(level as u64) {
        let step = 2 * level / d as i64;
        let mut sigma_sum = Integer::new();
        for b in -root..=root {
            if (b - 1).rem_euclid(step) != 0 {
                continue;
            }
            let num = d as i128 * (disc as i128 - (b * b) as i128);
            let arg = num / (4 * level as i128);
            sigma_sum += sigma_divisor(k - 1, arg as u64)?;
        }
        let weight = Rational::from((1, Integer::from(d).pow(2 * k))) * euler_correction(level / d as i64, k);
        total += Rational::from(&weight * &sigma_sum);
        terms.push(DivisorTerm { d, sigma_sum, weight });
    }
    let zeta = zeta_even_exact(2 * k)?;
    let q = Rational::from(2 * k - 1) * Integer::from(level).pow(k) * binomial(2 * k - 2, k - 1) * total;
    let exact = with_surd(q, 0, disc, k).mul(&zeta);
    let prec = numeric::clamp_prec(prec);
    let numeric = exact.to_real(prec);
    let oracle = dedekind_zeta_oracle(disc, k, prec)?;
    let abs_gap = Real::with_val(prec, &numeric - &oracle).abs();
    Ok(Theorem3Report {
        exact,
        numeric,
        oracle,
        abs_gap,
        assumptions,
        terms,
    })
}

/// Closed and numeric identity components of the period polynomial.
#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub family: FormFamily,
    pub algebraic: Vec<Integer>,
    pub zeta_rho: Real,
    pub zeta_neg_rho: Real,
    pub closed: Poly,
    /// `r^+_{f+}(I) + r^-_{f-}(I)` by quadrature.
    pub numeric: Poly,
    /// What the closed form predicts for `numeric`.
    pub expected: Poly,
    pub max_gap: Real,
    /// Full period vectors of `f` and `f'`, reused by the relation checks.
    pub plain: PeriodVector,
    pub primed: PeriodVector,
}

impl Theorem1Report {
    /// Period vector of `f+ = f + f'`.
    pub fn plus_vector(&self) -> PeriodVector {
        self.plain.zip_with(&self.primed, Poly::add)
    }

    /// `|p_0 + N^{k-1} p_{2k-2}|` for `f+`, where `p_n` is the coefficient of
    /// `X^{2k-2-n}` in `r_{f+}(I)`.
    pub fn coefficient_relation_gap(&self) -> Real {
        let plus = self.plus_vector();
        let p = plus.identity_entry();
        let k = self.family.k as u32;
        let top = &p.coeffs[p.len() - 1];
        let scale = Real::with_val(p.prec(), Real::with_val(p.prec(), self.family.level).pow(k - 1));
        (top + &p.coeffs[0].scale(&scale)).abs()
    }
}

pub fn theorem1_identity_report(k: i64, level: i64, disc: i64, rho: i64, cfg: &PeriodConfig) -> Result<Theorem1Report> {
    let fam = validate_family(k, level, disc, rho, true)?;
    let zprec = numeric::clamp_prec(cfg.prec) + 32;
    let zeta_rho = zeta_family_euler(&fam, k as u32, zprec)?;
    let zeta_neg_rho = zeta_family_euler(&fam.negated(), k as u32, zprec)?;
    let closed = closed_form_identity_component(&fam, &zeta_rho, &zeta_neg_rho)?;
    let plain = period_polynomial_numeric(&fam, Variant::Plain, cfg)?;
    let primed = period_polynomial_numeric(&fam, Variant::Primed, cfg)?;
    let numeric = identity_combination(plain.identity_entry(), primed.identity_entry());
    let expected = expected_identity_numeric(&closed, k as u32);
    let max_gap = numeric.sub(&expected).max_abs();
    Ok(Theorem1Report {
        family: fam,
        algebraic: crate::qforms::algebraic_identity_part(&fam)?,
        zeta_rho,
        zeta_neg_rho,
        closed,
        numeric,
        expected,
        max_gap,
        plain,
        primed,
    })
}
