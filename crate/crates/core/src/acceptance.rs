//! The acceptance suite: nine numbered checks, each reporting pass/fail with
//! the measured gap and runtime.

use std::fmt;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::exact::{bernoulli, gcd, kronecker, prime_divisors, sigma_divisor, zeta_even_exact, ExactValue};
use crate::numeric::Real;
use crate::periods::{period_relation_residuals, PeriodConfig};
use crate::qforms::{
    act, coset_label, coset_reps, enumerate_truncated, fricke, iota, validate_family,
    UnimodularMatrix,
};
use crate::theorems::{theorem1_identity_report, theorem2_difference, theorem2_report, theorem3_dedekind, Theorem1Report};
use crate::zetafun::{dedekind_zeta_oracle, hurwitz_zeta_bounded, zeta_family_direct};

const PREC: u32 = 192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Skips the quadrature criteria 6-8.
    Fast,
    Full,
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

struct Check {
    passed: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            passed: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        self.passed &= ok;
        self.notes.push(note.into());
    }

    fn fail(&mut self, note: impl Into<String>) {
        self.require(false, note);
    }
}

fn timed(id: u32, title: &'static str, limit: f64, body: impl FnOnce(&mut Check)) -> CriterionOutcome {
    let start = Instant::now();
    let mut check = Check::new();
    body(&mut check);
    let seconds = start.elapsed().as_secs_f64();
    if seconds > limit {
        check.fail(format!("runtime {seconds:.1} s over {limit} s"));
    }
    CriterionOutcome {
        id,
        title,
        passed: check.passed,
        detail: check.notes.join("; "),
        seconds,
    }
}

fn sci(x: &Real) -> String {
    format!("{:.3e}", x.to_f64())
}

fn dedekind_example(check: &mut Check, n: i64, d: i64, q: (i64, i64), sums: [i64; 2]) {
    match theorem3_dedekind(2, n, d, false, PREC) {
        Ok(r) => {
            let want = ExactValue::new(Rational::from(q), 4, Integer::from(d)).expect("valid surd");
            check.require(r.exact == want, format!("exact {} (want {want})", r.exact));
            check.require(r.abs_gap.to_f64() < 1e-10, format!("|numeric - oracle| = {}", sci(&r.abs_gap)));
            let got: Vec<Integer> = r.terms.iter().map(|t| t.sigma_sum.clone()).collect();
            check.require(got == sums, format!("sigma sums {got:?}"));
        }
        Err(e) => check.fail(format!("error {}", e.name())),
    }
}

pub fn criterion1() -> CriterionOutcome {
    timed(1, "Dedekind zeta at D = 17, N = 2", 5.0, |c| dedekind_example(c, 2, 17, (4, 51), [4, 20]))
}

pub fn criterion2() -> CriterionOutcome {
    timed(2, "Dedekind zeta at D = 145, N = 3", 5.0, |c| {
        dedekind_example(c, 3, 145, (128, 435), [64, 640])
    })
}

pub fn criterion3() -> CriterionOutcome {
    timed(3, "sigma_1 sums at D = 17, N = 2", 5.0, |c| match theorem3_dedekind(2, 2, 17, false, 64) {
        Ok(r) => {
            let got: Vec<Integer> = r.terms.iter().map(|t| t.sigma_sum.clone()).collect();
            c.require(got == [4, 20], format!("sums {got:?}, want [4, 20]"));
        }
        Err(e) => c.fail(format!("error {}", e.name())),
    })
}

pub fn criterion4() -> CriterionOutcome {
    timed(4, "decomposition identity at D = 17", 60.0, |c| {
        let run = || -> crate::Result<(Real, Real)> {
            let oracle = dedekind_zeta_oracle(17, 2, PREC)?;
            let a = zeta_family_direct(&validate_family(2, 2, 17, 1, true)?, 2, 100_000, PREC)?;
            let b = zeta_family_direct(&validate_family(2, 1, 17, 1, true)?, 2, 100_000, PREC)?;
            let sum = Real::with_val(PREC, &a.value + Real::with_val(PREC, &b.value / 4u32));
            let tails = Real::with_val(PREC, &a.tail_estimate + Real::with_val(PREC, &b.tail_estimate / 4u32));
            Ok((Real::with_val(PREC, oracle - sum).abs(), tails))
        };
        match run() {
            Ok((gap, tails)) => {
                let ok = gap.to_f64() <= tails.to_f64() + 1e-10;
                c.require(ok, format!("gap {} vs tails {} + 1e-10", sci(&gap), sci(&tails)));
            }
            Err(e) => c.fail(format!("error {}", e.name())),
        }
    })
}

pub fn criterion5() -> CriterionOutcome {
    timed(5, "odd-weight zeta difference", 120.0, |c| {
        let mut zero_ok = true;
        for d in [5i64, 8, 12, 13, 17, 21, 24, 28] {
            for k in [3i64, 5, 7] {
                zero_ok &= matches!(theorem2_difference(k, 1, d, d % 2), Ok(v) if v.is_zero());
            }
        }
        c.require(zero_ok, format!("N = 1 zero: {zero_ok}"));
        for (n, d) in [(2i64, 17i64), (3, 13)] {
            let fam = match validate_family(3, n, d, 1, true) {
                Ok(f) => f,
                Err(e) => return c.fail(format!("error {}", e.name())),
            };
            let plus = theorem2_difference(3, n, d, 1);
            let minus = theorem2_difference(3, n, d, fam.negated().rho);
            match (plus, minus) {
                (Ok(p), Ok(m)) => c.require(p == m.neg(), format!("(3,{n},{d}) antisymmetric: {}", p == m.neg())),
                _ => c.fail(format!("(3,{n},{d}) evaluation failed")),
            }
            match theorem2_report(3, n, d, 1, 20_000, PREC) {
                Ok(r) => c.require(
                    r.abs_gap <= r.tail_estimate,
                    format!(
                        "(3,{n},{d}) exact {} direct {} gap {} vs tails {}",
                        r.exact,
                        sci(&r.direct_difference),
                        sci(&r.abs_gap),
                        sci(&r.tail_estimate)
                    ),
                ),
                Err(e) => c.fail(format!("error {}", e.name())),
            }
        }
    })
}

/// `sum_{a>0>c} (NaX^2 - bX + c) - sum_{a<0<c} (...)` at `k = 2`, by scanning a
/// box containing every form with `ac < 0`.
fn brute_force_linear_part(n: i64, d: i64, rho: i64) -> Vec<i64> {
    let mut out = vec![0i64; 3];
    for b in -d..=d {
        if (b - rho).rem_euclid(2 * n) != 0 {
            continue;
        }
        for a in -d..=d {
            for cc in -d..=d {
                if a * cc < 0 && b * b - 4 * n * a * cc == d {
                    let s = a.signum();
                    out[0] += s * cc;
                    out[1] -= s * b;
                    out[2] += s * n * a;
                }
            }
        }
    }
    out
}

fn period_config() -> PeriodConfig {
    PeriodConfig::default()
}

fn criterion6(report: &crate::Result<Theorem1Report>, seconds: f64) -> CriterionOutcome {
    let mut out = timed(6, "period identity component at (2,2,17,1)", 600.0, |c| {
        let oracle = brute_force_linear_part(2, 17, 1);
        c.require(oracle == [-8, 0, 16], format!("enumeration oracle {oracle:?}"));
        match report {
            Ok(r) => {
                let alg: Vec<i64> = r.algebraic.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect();
                c.require(alg == oracle, format!("algebraic part {alg:?}"));
                c.require(r.max_gap.to_f64() < 1e-6, format!("max coefficient gap {}", sci(&r.max_gap)));
            }
            Err(e) => c.fail(format!("error {}", e.name())),
        }
    });
    out.seconds += seconds;
    if out.seconds > 600.0 {
        out.passed = false;
        out.detail.push_str(&format!("; runtime {:.1} s over 600 s", out.seconds));
    }
    out
}

fn criterion7(report: &crate::Result<Theorem1Report>) -> CriterionOutcome {
    timed(7, "coefficient relation for f+ at (2,2,17)", 600.0, |c| match report {
        Ok(r) => {
            let g = r.coefficient_relation_gap();
            c.require(g.to_f64() < 1e-6, format!("|p_0 + N^(k-1) p_(2k-2)| = {}", sci(&g)));
        }
        Err(e) => c.fail(format!("error {}", e.name())),
    })
}

fn criterion8(report: &crate::Result<Theorem1Report>, seconds: f64) -> CriterionOutcome {
    let mut out = timed(8, "period relations for f+ at (2,2,17)", 1200.0, |c| match report {
        Ok(r) => match period_relation_residuals(&r.plus_vector(), 2, 4) {
            Ok(res) => {
                let ok = res.res_s.to_f64() < 1e-5 && res.res_u.to_f64() < 1e-5;
                c.require(ok, format!("res_S {} res_U {}", sci(&res.res_s), sci(&res.res_u)));
            }
            Err(e) => c.fail(format!("error {}", e.name())),
        },
        Err(e) => c.fail(format!("error {}", e.name())),
    });
    out.seconds += seconds;
    out
}

/// Criteria 6-8 share one period computation.
pub fn period_criteria() -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let report = theorem1_identity_report(2, 2, 17, 1, &period_config());
    let seconds = start.elapsed().as_secs_f64();
    vec![criterion6(&report, seconds), criterion7(&report), criterion8(&report, seconds)]
}

fn exact_identities(c: &mut Check) {
    // B_{2n} against zeta(2n) from the Hurwitz evaluator
    let mut ok = true;
    for n in 1..=10u32 {
        let exact = zeta_even_exact(2 * n).map(|z| z.to_real(PREC));
        let numeric = crate::zetafun::riemann_zeta(2 * n, PREC);
        ok &= match (exact, numeric) {
            (Ok(a), Ok(b)) => Real::with_val(PREC, a - b).abs().to_f64() < 1e-45,
            _ => false,
        };
        ok &= bernoulli(2 * n + 1) == 0;
    }
    c.require(ok, format!("zeta(2n) via B_2n, n <= 10: {ok}"));
    let mut mult = true;
    for m in 1..=60u64 {
        for n in 1..=60u64 {
            if gcd(m, n) != 1 {
                continue;
            }
            for ell in 0..=3 {
                let lhs = sigma_divisor(ell, m * n).ok();
                let rhs = sigma_divisor(ell, m).ok().zip(sigma_divisor(ell, n).ok()).map(|(a, b)| a * b);
                mult &= lhs.is_some() && lhs == rhs;
            }
            for d in [5i64, 8, 12, 13, 17, 145] {
                mult &= kronecker(d, (m * n) as i64) == kronecker(d, m as i64) * kronecker(d, n as i64);
            }
        }
    }
    c.require(mult, format!("sigma/Kronecker multiplicativity: {mult}"));
}

fn form_bijections(c: &mut Check) {
    let mut ok = true;
    let mut count = 0usize;
    for (k, n, d, rho) in [(2i64, 2i64, 17i64, 1i64), (2, 3, 145, 1), (2, 5, 21, 1), (3, 4, 33, 1), (2, 6, 73, 5)] {
        let fam = match validate_family(k, n, d, rho, true) {
            Ok(f) => f,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        let neg = fam.negated();
        for q in enumerate_truncated(&fam, 200).unwrap_or_default() {
            count += 1;
            let w = fricke(&q, n).expect("family forms have N | a");
            ok &= neg.contains(&w) && w.disc() == d;
            ok &= fricke(&w, n).map(|back| back == q).unwrap_or(false);
            let j = iota(&q, n).expect("family forms have N | a");
            ok &= fam.contains(&j) && iota(&j, n).map(|back| back == q).unwrap_or(false);
        }
    }
    c.require(ok, format!("Fricke/iota involutions on {count} forms: {ok}"));
}

fn discriminant_invariance(c: &mut Check) {
    let gens = [UnimodularMatrix::s(), UnimodularMatrix::t(), UnimodularMatrix::u()];
    let mut ok = true;
    let mut words = vec![UnimodularMatrix::identity()];
    for _ in 0..4 {
        let mut next = Vec::new();
        for w in &words {
            for g in &gens {
                next.push(w.mul(g));
            }
        }
        words = next;
    }
    for (n, d, rho) in [(2i64, 17i64, 1i64), (3, 13, 1), (4, 17, 1)] {
        let fam = validate_family(2, n, d, rho, true).expect("valid family");
        let forms = enumerate_truncated(&fam, 60).unwrap_or_default();
        for m in &words {
            for q in &forms {
                ok &= act(q, m).disc() == d;
            }
            // Gamma0(N) elements (1, 0; N y, 1) keep the family
            let lower = UnimodularMatrix::new(1, 0, n * (m.alpha.to_i64().unwrap_or(1) % 5), 1).expect("det 1");
            for q in forms.iter().take(20) {
                ok &= fam.contains(&act(q, &lower));
            }
        }
    }
    c.require(ok, format!("discriminant and Gamma0 invariance over {} words: {ok}", words.len()));
}

fn hurwitz_agreement(c: &mut Check) {
    let prec = 128;
    let terms = 20_000u64;
    let mut ok = true;
    for s in [2u32, 3, 4] {
        for (num, den) in [(1i64, 7i64), (1, 3), (1, 2), (5, 6), (1, 1)] {
            let x = Real::with_val(prec, Rational::from((num, den)));
            let (v, err) = match hurwitz_zeta_bounded(s, &x, prec) {
                Ok(p) => p,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let mut partial = Real::new(prec);
            for n in (0..terms).rev() {
                partial += Real::with_val(prec, Real::with_val(prec, &x + n).pow(s)).recip();
            }
            let lo = Real::with_val(prec, Real::with_val(prec, &x + terms).pow(1 - s as i32)) / (s - 1);
            let hi = Real::with_val(prec, Real::with_val(prec, &x + (terms - 1)).pow(1 - s as i32)) / (s - 1);
            let lo = Real::with_val(prec, &partial + &lo) - &err;
            let hi = Real::with_val(prec, &partial + &hi) + &err;
            ok &= v >= lo && v <= hi;
        }
    }
    c.require(ok, format!("Hurwitz zeta inside partial-sum enclosures: {ok}"));
}

fn coset_counts(c: &mut Check) {
    let mut ok = true;
    for n in 1..=60i64 {
        let reps = coset_reps(n);
        let index: u64 = prime_divisors(n as u64)
            .into_iter()
            .fold(n as u64, |acc, p| acc / p * (p + 1));
        ok &= reps.len() as u64 == index;
        for (i, r) in reps.iter().enumerate() {
            ok &= coset_label(r, n) == i;
            let g = UnimodularMatrix::new(1, 1, n, n + 1).expect("det 1");
            ok &= coset_label(&g.mul(r), n) == i;
        }
    }
    c.require(ok, format!("coset counts and labels for N <= 60: {ok}"));
}

pub fn criterion9() -> CriterionOutcome {
    timed(9, "invariant suites", 60.0, |c| {
        exact_identities(c);
        form_bijections(c);
        discriminant_invariance(c);
        hurwitz_agreement(c);
        coset_counts(c);
    })
}

/// Runs the suite in criterion order.
pub fn run_suite(suite: Suite) -> Vec<CriterionOutcome> {
    let mut out = vec![criterion1(), criterion2(), criterion3(), criterion4(), criterion5()];
    if suite == Suite::Full {
        out.extend(period_criteria());
    }
    out.push(criterion9());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::algebraic_identity_part;

    #[test]
    fn brute_force_oracle_agrees_with_enumeration() {
        for (n, d, rho) in [(2i64, 17i64, 1i64), (3, 13, 1), (2, 33, 3)] {
            let fam = validate_family(2, n, d, rho, true).unwrap();
            let alg: Vec<i64> = algebraic_identity_part(&fam)
                .unwrap()
                .iter()
                .map(|x| x.to_i64().unwrap())
                .collect();
            assert_eq!(alg, brute_force_linear_part(n, d, rho));
        }
    }

    #[test]
    fn outcome_line_format() {
        let o = CriterionOutcome {
            id: 3,
            title: "x",
            passed: false,
            detail: "gap 1".into(),
            seconds: 0.5,
        };
        assert_eq!(o.to_string(), "[FAIL] 3. x: gap 1 (0.50 s)");
    }
}
