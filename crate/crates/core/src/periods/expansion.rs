//! Fourier expansion of `f_{k,N,D,rho} | A` at the cusp `i infinity`.
//!
//! The forms `P = Q o A` split into orbits under `T^w`, `w = N / gcd(N, gamma^2)`.
//! Each orbit sum `sum_j P(z + j w, 1)^{-k}` is a Lipschitz series in
//! `e(z / w)`, so
//!
//! `(f|A)(z) = Pref sum_{n >= 1} C(n) e(n z / w)`,
//! `C(n) = w^{-2k} sum_{a' != 0} a'^{-k} Fhat(n; eta_{a'}) sum_{orbits} e(n b' / (2 a' w))`
//!
//! with `eta = sqrt(D) / (2 |a'| w)`. The outer sum over `a'` is truncated at
//! `|a'| <= a_bound`; that is the only approximation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, gcd};
use crate::numeric::{self, Complex, Real};
use crate::qforms::{sqrt_mod_all, FormFamily, UnimodularMatrix};

/// Largest `|a'|` bound tried before reporting non-convergence.
pub const A_BOUND_CAP: u64 = 1 << 19;

/// `x = 2 pi n eta` below which `Fhat` is summed as a power series.
const SERIES_SWITCH: f64 = 3.0;

/// `Fhat(n; eta) = int_{Im tau = c} (tau^2 - eta^2)^{-k} e(-n tau) d tau`, real.
pub fn fhat(n: u64, eta: &Real, k: u32, prec: u32) -> Real {
    let work = prec + 16;
    let pi = numeric::pi(work);
    let x = Real::with_val(work, &pi * n) * eta * 2u32;
    if x.to_f64() < SERIES_SWITCH {
        fhat_series(n, &x, k, work, prec)
    } else {
        fhat_residues(n, eta, &x, k, work, prec)
    }
}

/// `sum_m C(k+m-1, m) eta^{2m} (-4 pi^2)^{k+m} n^{2k+2m-1} / (2k+2m-1)!`
pub(crate) fn fhat_series(n: u64, x: &Real, k: u32, work: u32, prec: u32) -> Real {
    let work = work + 8;
    let pi = numeric::pi(work);
    let four_pi2 = Real::with_val(work, pi.square_ref()) * 4u32;
    let lead = Real::with_val(work, four_pi2.pow(k))
        * Real::with_val(work, Real::with_val(work, n).pow(2 * k - 1))
        / numeric::real_from_int(work, &factorial(2 * k - 1));
    let lead = if k % 2 == 1 { -lead } else { lead };
    let x2 = Real::with_val(work, x.square_ref());
    let mut term = lead;
    let mut sum = Real::new(work);
    let mut m = 0u32;
    loop {
        sum += &term;
        let ratio = Rational::from((k + m, (m + 1) * (2 * k + 2 * m) * (2 * k + 2 * m + 1)));
        term *= Real::with_val(work, &x2 * numeric::real_from_rational(work, &ratio));
        term = -term;
        m += 1;
        if m > 4 && !term.is_zero() && term.get_exp().unwrap_or(i32::MIN)
            < sum.get_exp().unwrap_or(0) - work as i32
        {
            break;
        }
        if term.is_zero() {
            break;
        }
    }
    Real::with_val(prec, sum)
}

/// Residue evaluation, free of cancellation once `2 pi n eta` is not small.
pub(crate) fn fhat_residues(n: u64, eta: &Real, x: &Real, k: u32, work: u32, prec: u32) -> Real {
    let two_pi = Real::with_val(work, Constant::Pi) * 2u32;
    let (s, c) = x.clone().sin_cos(Real::new(work));
    let two_eta = Real::with_val(work, eta * 2u32);
    let mut sum = Real::new(work);
    for j in 0..k {
        let r = k - j;
        let phi = if r % 2 == 0 {
            let v = Real::with_val(work, &c * 2u32);
            if (r / 2) % 2 == 0 { v } else { -v }
        } else {
            let v = Real::with_val(work, &s * 2u32);
            if ((r - 1) / 2) % 2 == 0 { -v } else { v }
        };
        let rising: Integer = (0..j).map(|i| Integer::from(k + i)).product();
        let mut coeff = numeric::real_from_int(work, &(binomial(k - 1, j) * rising));
        if j % 2 == 1 {
            coeff = -coeff;
        }
        let t = coeff
            * Real::with_val(work, (&two_eta).pow(-((k + j) as i32)))
            * Real::with_val(work, (&two_pi).pow(r))
            * Real::with_val(work, Real::with_val(work, n).pow(r - 1))
            * phi;
        sum += t;
    }
    Real::with_val(prec, sum / numeric::real_from_int(work, &factorial(k - 1)))
}

/// `N / gcd(N, gamma^2)`
pub fn cusp_width(level: i64, gamma: i64) -> u64 {
    let n = level as u64;
    let g2 = ((gamma as i128 * gamma as i128).rem_euclid(n as i128)) as u64;
    n / gcd(n, g2)
}

/// Coefficients `C(1..=n_max)` (without the prefactor) of one slashed family
/// form, together with the truncation data.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub width: u64,
    pub coeffs: Vec<Complex>,
    pub a_bound: u64,
    /// `sum_n |C_{2a}(n) - C_a(n)| e^{-2 pi n / w}` at the final doubling,
    /// prefactor included.
    pub last_change: f64,
    pub prefactor: Real,
}

impl Expansion {
    /// `(f|A)(i t)` for `t > 0` on the expansion's own convergent range; callers
    /// handle `t < 1` through the `S` relation.
    pub fn eval(&self, t: &Real) -> Complex {
        let prec = self.prefactor.prec();
        let pi = numeric::pi(prec);
        let q = Real::with_val(prec, -(Real::with_val(prec, &pi * 2u32) * t) / self.width).exp();
        let mut qn = q.clone();
        let mut acc = Complex::zero(prec);
        for c in &self.coeffs {
            acc += &c.scale(&qn);
            qn *= &q;
        }
        acc.scale(&self.prefactor)
    }

    /// Bound for `|sum_{n > n_max} C(n) e^{-2 pi n t / w}|` is not tracked; the
    /// cutoff is chosen so the terms are far below working precision at t = 1.
    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }
}

/// Number of Fourier terms kept for weight `2k` and width `w`.
pub fn default_n_max(k: u32, width: u64, prec: u32) -> usize {
    // e^{-2 pi n / w} n^{2k-1} below 2^{-prec} with margin
    let bits = prec as f64 + 40.0;
    let mut n = 1usize;
    loop {
        let decay = 2.0 * std::f64::consts::PI * n as f64 / width as f64 * std::f64::consts::LOG2_E;
        if decay - (2 * k - 1) as f64 * (n as f64).log2() > bits {
            return n;
        }
        n += 1;
    }
}

/// Matrix entries and inverse-membership test for the transformed family.
struct Transform {
    alpha: i128,
    beta: i128,
    gamma: i128,
    delta: i128,
    level: i128,
    rho: i128,
}

impl Transform {
    /// Does `[a, b, c] o A^{-1}` belong to `Q_{N,D,rho}`?
    fn pulls_back(&self, a: i128, b: i128, c: i128) -> bool {
        let n = self.level;
        let m = 2 * n;
        let (al, be, ga, de) = (
            self.alpha.rem_euclid(m),
            self.beta.rem_euclid(m),
            self.gamma.rem_euclid(m),
            self.delta.rem_euclid(m),
        );
        let (a, b, c) = (a.rem_euclid(m), b.rem_euclid(m), c.rem_euclid(m));
        let lead = (a * de % m * de - b * ga % m * de + c * ga % m * ga).rem_euclid(m);
        if lead % n != 0 {
            return false;
        }
        let mid = (-2 * a * be % m * de + b * ((al * de + be * ga) % m) - 2 * c * al % m * ga)
            .rem_euclid(m);
        (mid - self.rho).rem_euclid(m) == 0
    }
}

/// Orbit-sum coefficients for `a_lo <= |a'| <= a_hi`, without prefactor.
fn partial_coeffs(
    fam: &FormFamily,
    m: &[i64; 4],
    width: u64,
    a_lo: u64,
    a_hi: u64,
    n_max: usize,
    work: u32,
) -> Vec<Complex> {
    let k = fam.k as u32;
    let tr = Transform {
        alpha: m[0] as i128,
        beta: m[1] as i128,
        gamma: m[2] as i128,
        delta: m[3] as i128,
        level: fam.level as i128,
        rho: fam.rho as i128,
    };
    let d = fam.disc as i128;
    let w = width as i128;
    let sqrt_d = Real::with_val(work, fam.disc).sqrt();
    let two_pi = Real::with_val(work, Constant::Pi) * 2u32;
    let mut out = vec![Complex::zero(work); n_max];
    for aa in a_lo.max(1)..=a_hi {
        let roots: Vec<u64> = sqrt_mod_all(fam.disc, 4 * aa)
            .into_iter()
            .filter(|&r| r < 2 * aa)
            .collect();
        if roots.is_empty() {
            continue;
        }
        // sum over both signs of a' of sign^k e(n b' / (2 a' w)) per n
        let mut ksum = vec![Complex::zero(work); n_max];
        let mut any = false;
        for sign in [1i128, -1] {
            let a = sign * aa as i128;
            for &b0 in &roots {
                for i in 0..w {
                    let b = b0 as i128 + 2 * aa as i128 * i;
                    let c = (b * b - d) / (4 * a);
                    if !tr.pulls_back(a, b, c) {
                        continue;
                    }
                    any = true;
                    let period = 2 * aa as i128 * w;
                    let num = (sign * b).rem_euclid(period);
                    let theta = Real::with_val(work, &two_pi * num as u64) / period as u64;
                    let base = Complex::expi(&theta);
                    let base = if sign < 0 && k % 2 == 1 { -&base } else { base };
                    // e(n theta) by repeated multiplication; sign^k is constant in n
                    let step = Complex::expi(&theta);
                    let mut cur = base;
                    for slot in ksum.iter_mut() {
                        *slot += &cur;
                        cur = &cur * &step;
                    }
                }
            }
        }
        if !any {
            continue;
        }
        let eta = Real::with_val(work, &sqrt_d / (2 * aa * width));
        let scale = Real::with_val(work, Real::with_val(work, aa).pow(k)).recip();
        for (idx, slot) in ksum.iter().enumerate() {
            if slot.is_zero() {
                continue;
            }
            let f = fhat(idx as u64 + 1, &eta, k, work) * &scale;
            out[idx] += &slot.scale(&f);
        }
    }
    out
}

fn change_norm(a: &[Complex], b: &[Complex], width: u64, pref: &Real) -> f64 {
    let mut total = 0.0;
    for (n, (x, y)) in a.iter().zip(b).enumerate() {
        let decay = (-2.0 * std::f64::consts::PI * (n + 1) as f64 / width as f64).exp();
        total += (x - y).abs().to_f64() * decay;
    }
    total * pref.to_f64().abs()
}

/// `D^{k-1/2} / (2 pi C(2k-2, k-1)) * w^{-2k}`
fn prefactor(fam: &FormFamily, width: u64, prec: u32) -> Real {
    let k = fam.k as u32;
    let d = Real::with_val(prec, fam.disc);
    let dk = Real::with_val(prec, (&d).pow(k)) / d.sqrt();
    let den = Real::with_val(prec, Constant::Pi) * 2u32
        * numeric::real_from_int(prec, &binomial(2 * k - 2, k - 1))
        * Real::with_val(prec, Real::with_val(prec, width).pow(2 * k));
    dk / den
}

type CacheKey = (FormFamily, [i64; 4], u32, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Expansion>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Expansion>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Expansion of `f_{fam} | A`, doubling the `|a'|` bound from `a_init` until two
/// successive doublings change the sup over `t >= 1` by less than `series_tol / 4`.
pub fn expansion(
    fam: &FormFamily,
    a: &UnimodularMatrix,
    a_init: u64,
    series_tol: f64,
    prec: u32,
) -> Result<Arc<Expansion>> {
    fam.ensure_nonsquare()?;
    if !(series_tol > 0.0) {
        return Err(Error::InvalidArgument("series tolerance must be positive".into()));
    }
    let m = a.to_i64().ok_or_else(|| {
        Error::InvalidArgument(format!("matrix {a} has entries beyond 64 bits"))
    })?;
    let prec = numeric::clamp_prec(prec);
    let key = (*fam, m, prec, a_init, series_tol.to_bits());
    if let Some(hit) = cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(hit.clone());
    }
    let width = cusp_width(fam.level, m[2]);
    let work = prec + 32;
    let n_max = default_n_max(fam.k as u32, width, prec);
    let pref = prefactor(fam, width, work);
    let result = if a_init == 0 {
        Expansion {
            width,
            coeffs: vec![Complex::zero(work); n_max],
            a_bound: 0,
            last_change: 0.0,
            prefactor: pref,
        }
    } else {
        let mut bound = a_init;
        let mut coeffs = partial_coeffs(fam, &m, width, 1, bound, n_max, work);
        let mut quiet = 0;
        loop {
            if bound * 2 > A_BOUND_CAP {
                return Err(Error::SeriesNonConvergent(format!(
                    "|a'| bound would exceed {A_BOUND_CAP} for k = {}, N = {}, D = {}, A = {a}",
                    fam.k, fam.level, fam.disc
                )));
            }
            let extra = partial_coeffs(fam, &m, width, bound + 1, 2 * bound, n_max, work);
            let next: Vec<Complex> = coeffs.iter().zip(&extra).map(|(x, y)| x + y).collect();
            let change = change_norm(&next, &coeffs, width, &pref);
            coeffs = next;
            bound *= 2;
            quiet = if change < series_tol / 4.0 { quiet + 1 } else { 0 };
            if quiet == 2 {
                break Expansion {
                    width,
                    coeffs,
                    a_bound: bound,
                    last_change: change,
                    prefactor: pref,
                };
            }
        }
    };
    let arc = Arc::new(result);
    cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(key, arc.clone());
    Ok(arc)
}
