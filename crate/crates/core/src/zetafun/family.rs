//! `zeta_{N,D,rho}(k) = zeta(2k) prod_{p | N} (1 - p^{-2k}) sum_c count(c) c^{-k}`,
//! where `count(c)` is the residue solution count of
//! [`crate::qforms::count_b_solutions`].

use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::exact::{kronecker, prime_divisors, zeta_even_exact};
use crate::numeric::{self, Real};
use crate::qforms::{local_root_counts, FormFamily};

use super::{kronecker_l, riemann_zeta};

/// A truncated evaluation `sum_{c <= c_max}`, not tail-corrected.
#[derive(Clone, Debug)]
pub struct ZetaResult {
    pub value: Real,
    /// `zeta(2k) prod (1 - p^{-2k}) * C * c_max^{1-k} / (k-1)`, with `C` the
    /// largest count seen over `(c_max/10, c_max]`. Heuristic: counts are
    /// `O(c^eps)`, not bounded.
    pub tail_estimate: Real,
    pub c_max: u64,
    pub max_recent_count: u64,
    pub heuristic: bool,
}

fn bad_primes(fam: &FormFamily) -> Vec<u64> {
    let mut ps = prime_divisors(2 * fam.level as u64 * fam.disc as u64);
    ps.dedup();
    ps
}

/// `count(c)` for `0 <= c <= c_max` (entry 0 unused), built multiplicatively
/// from prime-power counts.
pub fn count_table(fam: &FormFamily, c_max: u64) -> Vec<u64> {
    let n = c_max as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let bad = bad_primes(fam);
    let mut local_cache: std::collections::HashMap<u64, Vec<u64>> = Default::default();
    let mut table = vec![0u64; n + 1];
    if n >= 1 {
        table[1] = 1;
    }
    for c in 2..=n {
        let p = spf[c] as usize;
        let mut rest = c;
        let mut e = 0u32;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        let local = if bad.contains(&(p as u64)) {
            let counts = local_cache.entry(p as u64).or_insert_with(|| {
                let mut max_e = 0;
                let mut pk = 1u64;
                while pk <= c_max / p as u64 {
                    pk *= p as u64;
                    max_e += 1;
                }
                local_root_counts(fam, p as u64, max_e)
            });
            counts[e as usize]
        } else {
            (1 + kronecker(fam.disc, p as i64)) as u64
        };
        table[c] = local * table[rest];
    }
    table
}

/// `zeta(2k) prod_{p | N} (1 - p^{-2k})`
fn prefactor(level: i64, k: u32, prec: u32) -> Result<Real> {
    let mut v = zeta_even_exact(2 * k)?.to_real(prec);
    for p in prime_divisors(level as u64) {
        let pp = Real::with_val(prec, Real::with_val(prec, p).pow(2 * k)).recip();
        v *= Real::with_val(prec, 1 - pp);
    }
    Ok(v)
}

/// Definition-level truncation of `zeta_{N,D,rho}(k)` at `c <= c_max`.
pub fn zeta_family_direct(fam: &FormFamily, k: u32, c_max: u64, prec: u32) -> Result<ZetaResult> {
    fam.ensure_nonsquare()?;
    if k < 2 {
        return Err(Error::BadWeight(k as i64));
    }
    if c_max == 0 {
        return Err(Error::InvalidArgument("c_max must be positive".into()));
    }
    let prec = numeric::clamp_prec(prec);
    let work = prec + 32;
    let counts = count_table(fam, c_max);
    let mut sum = Real::new(work);
    for c in 1..=c_max {
        let n = counts[c as usize];
        if n == 0 {
            continue;
        }
        let term = Real::with_val(work, Real::with_val(work, c).pow(k)).recip();
        sum += term * n;
    }
    let recent = counts[(c_max / 10 + 1) as usize..=c_max as usize]
        .iter()
        .copied()
        .max()
        .unwrap_or(0);
    let pre = prefactor(fam.level, k, work)?;
    let tail_sum =
        Real::with_val(work, Real::with_val(work, c_max).pow(1 - k as i32)) / (k - 1);
    let tail = Real::with_val(prec, &pre * tail_sum * recent);
    Ok(ZetaResult {
        value: Real::with_val(prec, sum * pre),
        tail_estimate: tail,
        c_max,
        max_recent_count: recent,
        heuristic: true,
    })
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `zeta_{N,D,rho}(k)` through the Euler product of `count`: away from
/// `2ND` the local factors assemble into `zeta(k) L(k, (D/.)) / zeta(2k)`; the
/// finitely many remaining factors are summed from prime-power counts, which
/// are eventually constant.
pub fn zeta_family_euler(fam: &FormFamily, k: u32, prec: u32) -> Result<Real> {
    fam.ensure_nonsquare()?;
    if k < 2 {
        return Err(Error::BadWeight(k as i64));
    }
    let prec = numeric::clamp_prec(prec);
    let work = prec + 32;
    let zk = riemann_zeta(k, work)?;
    let lk = kronecker_l(k, fam.disc, work)?;
    let z2k = zeta_even_exact(2 * k)?.to_real(work);
    let mut dirichlet = Real::with_val(work, &zk * &lk) / &z2k;
    for p in bad_primes(fam) {
        let top = valuation(4 * fam.level as u64 * fam.disc as u64, p) + 4;
        let counts = local_root_counts(fam, p, top);
        let t = top as usize;
        if counts[t] != counts[t - 1] || counts[t] != counts[t - 2] {
            return Err(Error::PrecisionUnreachable(format!(
                "local counts at p = {p} have not stabilised by p^{top}: {counts:?}"
            )));
        }
        let x = Real::with_val(work, Real::with_val(work, p).pow(k)).recip();
        let mut local = Real::new(work);
        let mut xe = Real::with_val(work, 1);
        for &c in &counts[..t] {
            local += Real::with_val(work, &xe * c);
            xe *= &x;
        }
        let one_minus_x = Real::with_val(work, 1 - &x);
        local += Real::with_val(work, &xe * counts[t]) / &one_minus_x;
        let chi = kronecker(fam.disc, p as i64);
        let x2 = Real::with_val(work, x.clone().square());
        let euler_removed =
            one_minus_x * Real::with_val(work, 1 - Real::with_val(work, &x * chi)) / (1 - x2);
        dirichlet *= local * euler_removed;
    }
    let pre = prefactor(fam.level, k, work)?;
    Ok(Real::with_val(prec, dirichlet * pre))
}
