//! Period polynomials of the cusp forms attached to a form family.

pub mod expansion;
mod poly;
mod quad;

use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::exact::{binomial, prime_divisors, zeta_even_exact};
use crate::numeric::{self, Complex, Real};
use crate::qforms::{algebraic_identity_part, coset_label, coset_reps, FormFamily, UnimodularMatrix};

pub use expansion::{expansion, Expansion};
pub use poly::{poly_slash, Poly};
pub use quad::{gauss_legendre, integrate_adaptive, GaussRule, GAUSS_ORDER};

/// Which combination of `f = f_{k,N,D,rho}` and `f' = f_{k,N,D,-rho}` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    Primed,
    /// `f + f'`
    Plus,
    /// `i (f - f')`
    Minus,
}

#[derive(Clone, Debug)]
pub struct PeriodConfig {
    /// Starting `|a'|` bound of the Fourier coefficient sums; 0 truncates to
    /// the zero function.
    pub a_bound_initial: u64,
    pub series_tol: f64,
    pub quad_tol: f64,
    pub prec: u32,
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig {
            a_bound_initial: 100,
            series_tol: 1e-7,
            quad_tol: 1e-8,
            prec: 128,
        }
    }
}

/// The representative in [`coset_reps`] of `Gamma0(N) A`.
pub fn canonical_rep(a: &UnimodularMatrix, level: i64) -> UnimodularMatrix {
    coset_reps(level).swap_remove(coset_label(a, level))
}

fn components(fam: &FormFamily, variant: Variant, prec: u32) -> Vec<(FormFamily, Complex)> {
    let one = Complex::from_real(Real::with_val(prec, 1));
    let i = Complex::i_pow(1, prec);
    let primed = fam.negated();
    match variant {
        Variant::Plain => vec![(*fam, one)],
        Variant::Primed => vec![(primed, one)],
        Variant::Plus => vec![(*fam, one.clone()), (primed, one)],
        Variant::Minus => vec![(*fam, i.clone()), (primed, -&i)],
    }
}

/// `(f | A)(i t)` for `t >= 1`, straight from the cached expansions.
fn eval_upper(fam: &FormFamily, variant: Variant, a: &UnimodularMatrix, t: &Real, cfg: &PeriodConfig) -> Result<Complex> {
    let rep = canonical_rep(a, fam.level);
    let mut acc = Complex::zero(numeric::clamp_prec(cfg.prec) + 32);
    for (f, w) in components(fam, variant, cfg.prec + 32) {
        let e = expansion(&f, &rep, cfg.a_bound_initial, cfg.series_tol, cfg.prec)?;
        acc += &(&e.eval(t) * &w);
    }
    Ok(acc)
}

/// `(f | A)(i t)` for the chosen variant. Values with `t < 1` go through
/// `(f|A)(it) = (-1)^k t^{-2k} (f|AS)(i/t)`.
pub fn eval_slashed_form(
    fam: &FormFamily,
    variant: Variant,
    a: &UnimodularMatrix,
    t: &Real,
    cfg: &PeriodConfig,
) -> Result<Complex> {
    fam.ensure_nonsquare()?;
    if *t <= 0 {
        return Err(Error::NonPositiveT);
    }
    let prec = numeric::clamp_prec(cfg.prec);
    let v = if *t >= 1 {
        eval_upper(fam, variant, a, t, cfg)?
    } else {
        let work = prec + 32;
        let inv = Real::with_val(work, t.clone().recip());
        let v = eval_upper(fam, variant, &a.mul(&UnimodularMatrix::s()), &inv, cfg)?;
        let mut scale = Real::with_val(work, (&inv).pow(2 * fam.k as u32));
        if fam.k % 2 == 1 {
            scale = -scale;
        }
        v.scale(&scale)
    };
    Ok(Complex::new(Real::with_val(prec, &v.re), Real::with_val(prec, &v.im)))
}

/// `sup_{s >= t} |(f|A)(i s)| s^m`, bounded termwise from the expansion
/// coefficients; valid once `t >= m w / (2 pi)`.
fn tail_bound(fam: &FormFamily, variant: Variant, a: &UnimodularMatrix, t: f64, m: u32, cfg: &PeriodConfig) -> Result<f64> {
    let rep = canonical_rep(a, fam.level);
    let mut total = 0.0;
    for (f, _) in components(fam, variant, cfg.prec) {
        let e = expansion(&f, &rep, cfg.a_bound_initial, cfg.series_tol, cfg.prec)?;
        let pref = e.prefactor.to_f64().abs();
        for (n, c) in e.coeffs.iter().enumerate() {
            let lam = 2.0 * std::f64::consts::PI * (n + 1) as f64 / e.width as f64;
            total += pref * c.abs().to_f64() * (-lam * t).exp();
        }
    }
    Ok(total * t.powi(m as i32))
}

/// `int_1^inf (f|A)(it) t^m dt` to absolute tolerance `tol`.
fn upper_integral(fam: &FormFamily, variant: Variant, a: &UnimodularMatrix, m: u32, tol: f64, cfg: &PeriodConfig) -> Result<Complex> {
    let rep = canonical_rep(a, fam.level);
    let widest = expansion::cusp_width(fam.level, rep.to_i64().map(|e| e[2]).unwrap_or(0)) as f64;
    let mut cutoff = 2.0f64.max(m as f64 * widest / (2.0 * std::f64::consts::PI) + 1.0);
    while tail_bound(fam, variant, &rep, cutoff, m, cfg)? * cutoff > tol / 10.0 {
        cutoff *= 1.25;
        if cutoff > 1e4 {
            return Err(Error::QuadratureNonConvergent(format!(
                "integrand of r_n({a}) does not decay below {tol:e}"
            )));
        }
    }
    let prec = numeric::clamp_prec(cfg.prec);
    let one = Real::with_val(prec, 1);
    let hi = Real::with_val(prec, cutoff);
    integrate_adaptive(
        |t| {
            let v = eval_upper(fam, variant, &rep, t, cfg)?;
            Ok(v.scale(&Real::with_val(t.prec(), t.pow(m))))
        },
        &one,
        &hi,
        tol,
        prec,
    )
}

/// `r_{n,f}(A) = int_0^inf (f|A)(it) t^n dt`, split at `t = 1`.
pub fn period_coeff_numeric(
    fam: &FormFamily,
    variant: Variant,
    a: &UnimodularMatrix,
    n: u32,
    cfg: &PeriodConfig,
) -> Result<Complex> {
    fam.ensure_nonsquare()?;
    let w = 2 * fam.k as u32 - 2;
    if n > w {
        return Err(Error::InvalidArgument(format!("period index {n} outside 0..={w}")));
    }
    let upper = upper_integral(fam, variant, a, n, cfg.quad_tol / 2.0, cfg)?;
    let lower = upper_integral(fam, variant, &a.mul(&UnimodularMatrix::s()), w - n, cfg.quad_tol / 2.0, cfg)?;
    Ok(if fam.k % 2 == 0 { &upper + &lower } else { &upper - &lower })
}

/// `r_f(A)(X)` from its coefficients: `sum_n i^{1-n} C(2k-2, n) r_n(A) X^{2k-2-n}`.
pub fn assemble_period_poly(r: &[Complex]) -> Poly {
    let w = r.len() - 1;
    let prec = r.iter().map(Complex::prec).min().unwrap_or(numeric::MIN_PRECISION);
    let mut p = Poly::zero(w + 1, prec);
    for (n, rn) in r.iter().enumerate() {
        let b = numeric::real_from_int(prec, &binomial(w as u32, n as u32));
        p.coeffs[w - n] = &Complex::i_pow(1 - n as i64, prec) * &rn.scale(&b);
    }
    p
}

/// One period polynomial per coset of `Gamma0(N) \ SL_2(Z)`, in label order.
#[derive(Clone, Debug)]
pub struct PeriodVector {
    pub level: i64,
    pub two_k: u32,
    pub entries: Vec<(UnimodularMatrix, Poly)>,
}

impl PeriodVector {
    pub fn zero(level: i64, two_k: u32, prec: u32) -> Self {
        PeriodVector {
            level,
            two_k,
            entries: coset_reps(level)
                .into_iter()
                .map(|m| (m, Poly::zero(two_k as usize - 1, prec)))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        PeriodVector {
            level: self.level,
            two_k: self.two_k,
            entries: self.entries.iter().map(|(m, p)| (m.clone(), f(p))).collect(),
        }
    }

    pub fn zip_with(&self, other: &PeriodVector, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        PeriodVector {
            level: self.level,
            two_k: self.two_k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|((m, p), (_, q))| (m.clone(), f(p, q)))
                .collect(),
        }
    }

    pub fn identity_entry(&self) -> &Poly {
        &self.entries[0].1
    }
}

/// Assembles `r_f(A)` over all coset representatives.
pub fn period_polynomial_numeric(fam: &FormFamily, variant: Variant, cfg: &PeriodConfig) -> Result<PeriodVector> {
    fam.ensure_nonsquare()?;
    let w = 2 * fam.k as u32 - 2;
    let mut entries = Vec::new();
    for rep in coset_reps(fam.level) {
        let r: Vec<Complex> = (0..=w)
            .map(|n| period_coeff_numeric(fam, variant, &rep, n, cfg))
            .collect::<Result<_>>()?;
        entries.push((rep, assemble_period_poly(&r)));
    }
    Ok(PeriodVector {
        level: fam.level,
        two_k: 2 * fam.k as u32,
        entries,
    })
}

/// Largest coefficient of `P + P|S` and of `P + P|U + P|U^2` over all cosets.
#[derive(Clone, Debug)]
pub struct Residuals {
    pub res_s: Real,
    pub res_u: Real,
}

pub fn period_relation_residuals(pv: &PeriodVector, level: i64, two_k: u32) -> Result<Residuals> {
    let reps = coset_reps(level);
    if pv.entries.len() != reps.len() {
        return Err(Error::IncompleteVector(format!(
            "{} entries for {} cosets of level {level}",
            pv.entries.len(),
            reps.len()
        )));
    }
    for (i, (m, p)) in pv.entries.iter().enumerate() {
        if coset_label(m, level) != i || p.len() > two_k as usize - 1 {
            return Err(Error::IncompleteVector(format!("entry {i} ({m}) does not match coset {i}")));
        }
    }
    let w = two_k as usize - 2;
    // (P|g)(A) = P(A g^{-1}) |_{2-2k} g
    let act = |a: &UnimodularMatrix, g: &UnimodularMatrix| -> Poly {
        let src = coset_label(&a.mul(&g.inverse()), level);
        poly_slash(&pv.entries[src].1, g, w)
    };
    let s = UnimodularMatrix::s();
    let u = UnimodularMatrix::u();
    let u2 = u.mul(&u);
    let prec = pv.entries.iter().map(|(_, p)| p.prec()).min().unwrap_or(numeric::MIN_PRECISION);
    let mut res_s = Real::new(prec);
    let mut res_u = Real::new(prec);
    for (a, p) in &pv.entries {
        let rs = p.add(&act(a, &s)).max_abs();
        let ru = p.add(&act(a, &u)).add(&act(a, &u2)).max_abs();
        if rs > res_s {
            res_s = rs;
        }
        if ru > res_u {
            res_u = ru;
        }
    }
    Ok(Residuals { res_s, res_u })
}

/// `C(2k-2, k-1) D^{1/2-k} pi`
pub fn c_kd(k: u32, disc: i64, prec: u32) -> Real {
    let d = Real::with_val(prec, disc);
    let dk = Real::with_val(prec, (&d).pow(k)) / d.sqrt();
    numeric::real_from_int(prec, &binomial(2 * k - 2, k - 1)) * numeric::pi(prec) / dk
}

/// The identity component `r^+_{f+}(I) + r^-_{f-}(I)` in closed form, given the
/// family zeta values at `rho` and `-rho`.
pub fn closed_form_identity_component(fam: &FormFamily, zeta_rho: &Real, zeta_neg_rho: &Real) -> Result<Poly> {
    fam.ensure_nonsquare()?;
    let k = fam.k as u32;
    let prec = numeric::coarsest(zeta_rho, zeta_neg_rho);
    let work = prec + 32;
    let algebraic = algebraic_identity_part(fam)?;
    let mut poly = Poly::from_integers(&algebraic, prec);
    let mut denom = zeta_even_exact(2 * k)?.to_real(work);
    for p in prime_divisors(fam.level as u64) {
        let pp = Real::with_val(work, Real::with_val(work, p).pow(2 * k)).recip();
        denom *= Real::with_val(work, 1 - pp);
    }
    let base = Real::with_val(work, numeric::pi(work) / c_kd(k, fam.disc, work)) / (2 * k - 1) / denom;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let top = Real::with_val(work, zeta_rho + Real::with_val(work, zeta_neg_rho * sign));
    let bottom = Real::with_val(work, zeta_neg_rho + Real::with_val(work, zeta_rho * sign));
    let n = Real::with_val(work, fam.level);
    let top = -(Real::with_val(work, &base * top) / &n);
    let bottom = Real::with_val(work, &base * bottom) / Real::with_val(work, (&n).pow(k));
    let last = poly.coeffs.len() - 1;
    poly.coeffs[last] = &poly.coeffs[last] + &Complex::from_real(Real::with_val(prec, top));
    poly.coeffs[0] = &poly.coeffs[0] + &Complex::from_real(Real::with_val(prec, bottom));
    Ok(poly)
}

/// The numeric identity combination predicted by a closed form `P = E + O`
/// (even and odd parts): `(-1)^k (i E + O)`.
pub fn expected_identity_numeric(closed: &Poly, k: u32) -> Poly {
    let prec = closed.prec();
    let i = Complex::i_pow(1, prec);
    let p = closed.even_part().scale(&i).add(&closed.odd_part());
    if k % 2 == 0 {
        p
    } else {
        p.scale(&Complex::i_pow(2, prec))
    }
}

/// Largest coefficient of `numeric - (-1)^k (i E + O)`.
pub fn identity_gap(closed: &Poly, numeric: &Poly, k: u32) -> Real {
    numeric.sub(&expected_identity_numeric(closed, k)).max_abs()
}

/// `r^+_{f+}(I) + r^-_{f-}(I)` from the period polynomials of `f` and `f'` at
/// the identity.
pub fn identity_combination(plain: &Poly, primed: &Poly) -> Poly {
    let prec = plain.prec().min(primed.prec());
    let i = Complex::i_pow(1, prec);
    let plus = plain.add(primed);
    let minus = plain.sub(primed).scale(&i);
    plus.even_part().add(&minus.odd_part())
}

#[cfg(test)]
mod tests;
