use super::*;
use crate::qforms::{act, enumerate_truncated, validate_family, QuadForm};
use crate::zetafun::zeta_family_euler;
use rug::Integer;

fn fam(k: i64, n: i64, d: i64, rho: i64) -> FormFamily {
    validate_family(k, n, d, rho, true).unwrap()
}

fn cfg() -> PeriodConfig {
    cfg_for(4)
}

/// Weight 6 converges slowly enough in `|a'|` that a looser tolerance is needed.
fn cfg_for(k: i64) -> PeriodConfig {
    PeriodConfig {
        a_bound_initial: 50,
        series_tol: if k >= 4 { 1e-12 } else { 1e-8 },
        quad_tol: 1e-12,
        prec: 128,
    }
}

fn real(x: f64) -> Real {
    Real::with_val(128, x)
}

/// The defining series truncated at `|b| <= b_bound`, before applying `A`.
fn naive(f: &FormFamily, a: &UnimodularMatrix, t: &Real, b_bound: u64) -> Complex {
    let prec = 160;
    let k = f.k as u32;
    let z = Complex::new(Real::new(prec), Real::with_val(prec, t));
    let z2 = &z * &z;
    let mut acc = Complex::zero(prec);
    for q in enumerate_truncated(f, b_bound).unwrap() {
        let QuadForm { a: qa, b: qb, c: qc } = act(&q, a);
        let val = &(&z2.scale(&numeric::real_from_int(prec, &qa)) + &z.scale(&numeric::real_from_int(prec, &qb)))
            + &Complex::from_real(numeric::real_from_int(prec, &qc));
        acc += &val.powi(-(k as i64));
    }
    let d = Real::with_val(prec, f.disc);
    let pref = Real::with_val(prec, (&d).pow(k)) / d.sqrt()
        / (numeric::pi(prec) * numeric::real_from_int(prec, &binomial(2 * k - 2, k - 1)) * 2u32);
    acc.scale(&pref)
}

fn gap(a: &Complex, b: &Complex) -> f64 {
    (a - b).abs().to_f64()
}

#[test]
fn expansion_matches_defining_series() {
    let cases = [
        (fam(6, 1, 5, 1), 3000u64, 1e-12),
        (fam(4, 2, 17, 1), 4000, 1e-6),
        (fam(4, 2, 17, 3), 4000, 1e-6),
    ];
    for (f, bound, tol) in cases {
        for a in coset_reps(f.level).into_iter().chain([UnimodularMatrix::t(), UnimodularMatrix::u()]) {
            for t in [0.6, 1.0, 1.4] {
                let got = eval_slashed_form(&f, Variant::Plain, &a, &real(t), &cfg()).unwrap();
                let want = naive(&f, &a, &real(t), bound);
                assert!(gap(&got, &want) < tol, "{f:?} A={a} t={t}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn slash_by_s_is_inversion() {
    let f = fam(6, 1, 5, 1);
    for t in [0.7, 1.3] {
        let lhs = eval_slashed_form(&f, Variant::Plain, &UnimodularMatrix::s(), &real(t), &cfg()).unwrap();
        // (it)^{-2k} f(-1/(it)) with -1/(it) = i/t
        let inner = naive(&f, &UnimodularMatrix::identity(), &real(1.0 / t), 3000);
        let scale = Complex::i_pow(-12, 160).scale(&Real::with_val(160, t).pow(-12i32));
        assert!(gap(&lhs, &(&inner * &scale)) < 1e-12, "t={t}");
    }
}

#[test]
fn fricke_swaps_rho() {
    for f in [fam(4, 2, 17, 1), fam(3, 3, 13, 1), fam(4, 3, 13, 1)] {
        let k = f.k as i32;
        let n = f.level as f64;
        let c = cfg_for(f.k);
        let tol = if k >= 4 { 1e-10 } else { 1e-6 };
        for t in [0.8, 1.3] {
            let inner =
                eval_slashed_form(&f, Variant::Plain, &UnimodularMatrix::identity(), &real(1.0 / (n * t)), &c).unwrap();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = inner.scale(&real(sign * n.powi(-k) * t.powi(-2 * k)));
            let rhs =
                eval_slashed_form(&f.negated(), Variant::Plain, &UnimodularMatrix::identity(), &real(t), &c).unwrap();
            let scale = rhs.abs().to_f64().max(1.0);
            assert!(gap(&lhs, &rhs) / scale < tol, "{f:?} t={t}: {lhs:?} vs {rhs:?}");
        }
    }
}

#[test]
fn variants_combine_linearly() {
    let f = fam(4, 2, 17, 1);
    let c = cfg();
    let id = UnimodularMatrix::identity();
    let t = real(1.2);
    let p = eval_slashed_form(&f, Variant::Plain, &id, &t, &c).unwrap();
    let q = eval_slashed_form(&f, Variant::Primed, &id, &t, &c).unwrap();
    let plus = eval_slashed_form(&f, Variant::Plus, &id, &t, &c).unwrap();
    let minus = eval_slashed_form(&f, Variant::Minus, &id, &t, &c).unwrap();
    assert!(gap(&plus, &(&p + &q)) < 1e-20);
    assert!(gap(&minus, &(&p - &q).mul_i()) < 1e-20);
}

#[test]
fn eval_rejects_bad_points() {
    let f = fam(4, 2, 17, 1);
    let id = UnimodularMatrix::identity();
    for t in [0.0, -1.0] {
        assert!(matches!(
            eval_slashed_form(&f, Variant::Plain, &id, &real(t), &cfg()),
            Err(Error::NonPositiveT)
        ));
    }
    let sq = validate_family(2, 1, 9, 1, false).unwrap();
    assert!(matches!(
        eval_slashed_form(&sq, Variant::Plain, &id, &real(1.0), &cfg()),
        Err(Error::SquareDiscriminant(9))
    ));
}

#[test]
fn truncation_to_nothing_gives_zero() {
    let f = fam(2, 2, 17, 1);
    let c = PeriodConfig {
        a_bound_initial: 0,
        ..cfg()
    };
    for n in 0..=2 {
        let r = period_coeff_numeric(&f, Variant::Plus, &UnimodularMatrix::identity(), n, &c).unwrap();
        assert!(r.is_zero());
    }
    assert!(period_coeff_numeric(&f, Variant::Plus, &UnimodularMatrix::identity(), 3, &c).is_err());
}

fn max_abs(p: &Poly) -> f64 {
    p.max_abs().to_f64()
}

#[test]
fn level_one_vector_has_one_entry_and_satisfies_relations() {
    let f = fam(6, 1, 5, 1);
    let pv = period_polynomial_numeric(&f, Variant::Plain, &cfg()).unwrap();
    assert_eq!(pv.entries.len(), 1);
    let r = period_relation_residuals(&pv, 1, 12).unwrap();
    let scale = max_abs(pv.identity_entry());
    assert!(scale > 1e-3);
    assert!(r.res_s.to_f64() / scale < 1e-9 && r.res_u.to_f64() / scale < 1e-9, "{r:?}");
    // even/odd parts recombine
    for (_, p) in &pv.entries {
        let sum = p.even_part().add(&p.odd_part());
        for (x, y) in sum.coeffs.iter().zip(&p.coeffs) {
            assert!(x.re == y.re && x.im == y.im);
        }
    }
}

#[test]
fn level_two_relations() {
    let f = fam(4, 2, 17, 1);
    for variant in [Variant::Plus, Variant::Minus, Variant::Plain] {
        let pv = period_polynomial_numeric(&f, variant, &cfg()).unwrap();
        assert_eq!(pv.entries.len(), 3);
        let scale = pv.entries.iter().map(|(_, p)| max_abs(p)).fold(1.0, f64::max);
        let r = period_relation_residuals(&pv, 2, 8).unwrap();
        assert!(r.res_s.to_f64() / scale < 1e-9 && r.res_u.to_f64() / scale < 1e-9, "{variant:?}: {r:?}");
    }
}

#[test]
fn fricke_invariant_coefficient_relation() {
    // p_n = (-1)^{n+1} N^{k-1-n} p_{2k-2-n} for f+
    let f = fam(4, 2, 17, 1);
    let k = 4i32;
    let n_lev = 2.0f64;
    let pv = period_polynomial_numeric(&f, Variant::Plus, &cfg()).unwrap();
    let p = pv.identity_entry();
    let w = 2 * k as usize - 2;
    let coeff = |n: usize| p.coeffs[w - n].clone();
    let scale = max_abs(p);
    for n in 0..k as usize {
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        let rhs = coeff(w - n).scale(&real(sign * n_lev.powi(k - 1 - n as i32)));
        assert!(gap(&coeff(n), &rhs) / scale < 1e-9, "n={n}");
    }
}

#[test]
fn closed_form_matches_quadrature_on_nonzero_forms() {
    for f in [fam(4, 2, 17, 1), fam(6, 1, 5, 1), fam(3, 3, 13, 1), fam(4, 3, 13, 1)] {
        let c = cfg_for(f.k);
        let plain = period_polynomial_numeric(&f, Variant::Plain, &c).unwrap();
        let primed = period_polynomial_numeric(&f, Variant::Primed, &c).unwrap();
        let numeric_poly = identity_combination(plain.identity_entry(), primed.identity_entry());
        let z1 = zeta_family_euler(&f, f.k as u32, 160).unwrap();
        let z2 = zeta_family_euler(&f.negated(), f.k as u32, 160).unwrap();
        let closed = closed_form_identity_component(&f, &z1, &z2).unwrap();
        let scale = max_abs(&closed).max(1.0);
        let g = identity_gap(&closed, &numeric_poly, f.k as u32).to_f64();
        let tol = if f.k >= 4 { 1e-9 } else { 1e-6 };
        assert!(g / scale < tol, "{f:?}: gap {g} closed {closed:?} numeric {numeric_poly:?}");
    }
}

/// `sum_{a>0>c} (N a X^2 - b X + c)^{k-1} - sum_{a<0<c} (...)` by brute force
/// over a box large enough to contain every form with `ac < 0`.
fn algebraic_oracle(f: &FormFamily) -> Vec<i64> {
    let (n, d, k) = (f.level, f.disc, f.k as u32);
    let mut out = vec![0i64; 2 * k as usize - 1];
    let bmax = (d as f64).sqrt() as i64 + 1;
    for b in -bmax..=bmax {
        if (b - f.rho).rem_euclid(2 * n) != 0 {
            continue;
        }
        for a in -d..=d {
            for c in -d..=d {
                if a == 0 || c == 0 || a.signum() == c.signum() || b * b - 4 * n * a * c != d {
                    continue;
                }
                let sign = if a > 0 { 1 } else { -1 };
                let mut p = vec![1i64];
                for _ in 1..k {
                    let mut next = vec![0i64; p.len() + 2];
                    for (i, x) in p.iter().enumerate() {
                        next[i] += x * c;
                        next[i + 1] += x * -b;
                        next[i + 2] += x * n * a;
                    }
                    p = next;
                }
                for (i, x) in p.iter().enumerate() {
                    out[i] += sign * x;
                }
            }
        }
    }
    out
}

#[test]
fn algebraic_part_matches_enumeration() {
    let f = fam(2, 2, 17, 1);
    assert_eq!(algebraic_oracle(&f), vec![-8, 0, 16]);
    for f in [f, fam(3, 2, 17, 1), fam(4, 3, 13, 1), fam(3, 1, 5, 1), fam(2, 3, 145, 1)] {
        let want: Vec<Integer> = algebraic_oracle(&f).into_iter().map(Integer::from).collect();
        assert_eq!(algebraic_identity_part(&f).unwrap(), want, "{f:?}");
    }
}

#[test]
fn closed_form_vanishes_where_no_cusp_forms_exist() {
    // S_4(Gamma0(2)) = 0
    let f = fam(2, 2, 17, 1);
    let z1 = zeta_family_euler(&f, 2, 192).unwrap();
    let z2 = zeta_family_euler(&f.negated(), 2, 192).unwrap();
    let closed = closed_form_identity_component(&f, &z1, &z2).unwrap();
    assert!(max_abs(&closed) < 1e-40, "{closed:?}");
    assert_eq!(closed.coeffs[1].re, 0);
}

#[test]
fn closed_form_zeta_part_odd_weight_level_one() {
    let f = fam(3, 1, 5, 1);
    let z = zeta_family_euler(&f, 3, 128).unwrap();
    let closed = closed_form_identity_component(&f, &z, &z).unwrap();
    let alg = algebraic_identity_part(&f).unwrap();
    let top = closed.coeffs.len() - 1;
    assert_eq!(closed.coeffs[top].re, numeric::real_from_int(128, &alg[top]));
    for m in 1..top {
        assert_eq!(closed.coeffs[m].re, numeric::real_from_int(128, &alg[m]));
    }
}

#[test]
fn residuals_of_trivial_vectors() {
    let pv = PeriodVector::zero(6, 4, 128);
    let r = period_relation_residuals(&pv, 6, 4).unwrap();
    assert!(r.res_s.is_zero() && r.res_u.is_zero());
    let mut bumped = pv.clone();
    bumped.entries[3].1.coeffs[1] = Complex::from_real(real(1.0));
    let r = period_relation_residuals(&bumped, 6, 4).unwrap();
    assert!(r.res_s.to_f64() >= 1.0 && r.res_u.to_f64() >= 1.0);
    let mut short = pv.clone();
    short.entries.pop();
    assert!(matches!(period_relation_residuals(&short, 6, 4), Err(Error::IncompleteVector(_))));
    assert!(matches!(period_relation_residuals(&pv, 5, 4), Err(Error::IncompleteVector(_))));
}

