//! Adaptive Gauss-Legendre quadrature at MPFR precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::numeric::{self, Complex, Real};

/// Nodes per panel.
pub const GAUSS_ORDER: usize = 20;
/// Panels processed before refinement is declared stalled.
const MAX_PANELS: usize = 1 << 14;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Real::with_val(prec, 1);
    let mut p1 = x.clone();
    for j in 2..=n {
        let a = Real::with_val(prec, x * &p1) * (2 * j - 1) as u32;
        let p2 = (a - Real::with_val(prec, &p0 * (j - 1) as u32)) / j as u32;
        p0 = p1;
        p1 = p2;
    }
    let x2m1 = Real::with_val(prec, x.clone().square() - 1u32);
    let dp = Real::with_val(prec, x * &p1) - &p0;
    let dp = Real::with_val(prec, dp * n as u32) / x2m1;
    (p1, dp)
}

pub fn gauss_legendre(n: usize, prec: u32) -> Arc<GaussRule> {
    static RULES: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussRule>>>> = OnceLock::new();
    let rules = RULES.get_or_init(Default::default);
    if let Some(r) = rules.lock().unwrap_or_else(|e| e.into_inner()).get(&(n, prec)) {
        return r.clone();
    }
    let work = prec + 32;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Real::with_val(work, guess);
        for _ in 0..200 {
            let (p, dp) = legendre(n, &x);
            let step = Real::with_val(work, &p / &dp);
            x -= &step;
            if step.is_zero() || step.get_exp().unwrap_or(i32::MIN) < -(work as i32) + 4 {
                break;
            }
        }
        let (_, dp) = legendre(n, &x);
        let one_minus = Real::with_val(work, 1 - Real::with_val(work, x.clone().square()));
        let w = Real::with_val(work, 2u32) / (one_minus * dp.square());
        nodes.push(Real::with_val(prec, x));
        weights.push(Real::with_val(prec, w));
    }
    let rule = Arc::new(GaussRule { nodes, weights });
    rules
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((n, prec), rule.clone());
    rule
}

fn panel<F>(f: &mut F, lo: &Real, hi: &Real, rule: &GaussRule) -> Result<Complex>
where
    F: FnMut(&Real) -> Result<Complex>,
{
    let prec = lo.prec();
    let half = Real::with_val(prec, hi - lo) / 2u32;
    let mid = Real::with_val(prec, hi + lo) / 2u32;
    let mut acc = Complex::zero(prec);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = Real::with_val(prec, &mid + Real::with_val(prec, &half * x));
        acc += &f(&t)?.scale(w);
    }
    Ok(acc.scale(&half))
}

/// `int_lo^hi f` to absolute tolerance `tol`, by bisecting panels whose
/// estimate moves by more than their share of `tol` when split. Initial panels
/// have unit length.
pub fn integrate_adaptive<F>(mut f: F, lo: &Real, hi: &Real, tol: f64, prec: u32) -> Result<Complex>
where
    F: FnMut(&Real) -> Result<Complex>,
{
    let prec = numeric::clamp_prec(prec);
    let rule = gauss_legendre(GAUSS_ORDER, prec);
    let lo = Real::with_val(prec, lo);
    let hi = Real::with_val(prec, hi);
    let total = Real::with_val(prec, &hi - &lo).to_f64();
    let mut total_acc = Complex::zero(prec);
    if total <= 0.0 {
        return Ok(total_acc);
    }
    let pieces = total.ceil().max(1.0) as usize;
    let mut stack: Vec<(Real, Real, Complex)> = Vec::new();
    for i in (0..pieces).rev() {
        let a = Real::with_val(prec, &lo + i as u32);
        let b = if i + 1 == pieces {
            hi.clone()
        } else {
            Real::with_val(prec, &lo + (i + 1) as u32)
        };
        let v = panel(&mut f, &a, &b, &rule)?;
        stack.push((a, b, v));
    }
    let mut processed = 0usize;
    while let Some((a, b, whole)) = stack.pop() {
        processed += 1;
        if processed > MAX_PANELS {
            return Err(Error::QuadratureNonConvergent(format!(
                "more than {MAX_PANELS} panels on [{}, {}] at tolerance {tol:e}",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        let m = Real::with_val(prec, &a + &b) / 2u32;
        let left = panel(&mut f, &a, &m, &rule)?;
        let right = panel(&mut f, &m, &b, &rule)?;
        let split = &left + &right;
        let len = Real::with_val(prec, &b - &a).to_f64();
        let err = (&split - &whole).abs().to_f64();
        if err <= tol * len / total || len < total * 1e-12 {
            if err > tol * len / total {
                return Err(Error::QuadratureNonConvergent(format!(
                    "panel [{}, {}] stalled with error {err:e}",
                    a.to_f64(),
                    b.to_f64()
                )));
            }
            total_acc += &split;
        } else {
            stack.push((m.clone(), b, right));
            stack.push((a, m, left));
        }
    }
    Ok(total_acc)
}
