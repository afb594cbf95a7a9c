//! Square roots and polynomial root counts modulo prime powers.

use crate::exact::factorize;

use super::{family_poly, FormFamily};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Square roots of `a` modulo an odd prime `p`, ascending.
fn sqrt_mod_prime(a: u64, p: u64) -> Vec<u64> {
    let a = a % p;
    if a == 0 {
        return vec![0];
    }
    if p < 64 {
        return (0..p).filter(|x| x * x % p == a).collect();
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Vec::new();
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    let mut out = vec![r, p - r];
    out.sort_unstable();
    out
}

/// Roots modulo `p^(i+1)` lying over the given roots modulo `pk = p^i`.
/// `eval(x, m)` returns the polynomial at `x` reduced modulo `m`.
fn lift_step(roots: &[u64], p: u64, pk: u64, eval: &impl Fn(u64, u64) -> u64) -> Vec<u64> {
    let next = pk * p;
    let mut lifted = Vec::new();
    for &r in roots {
        for t in 0..p {
            let x = r + t * pk;
            if eval(x, next) == 0 {
                lifted.push(x);
            }
        }
    }
    lifted
}

fn lift_roots(p: u64, e: u32, base: Vec<u64>, eval: impl Fn(u64, u64) -> u64) -> Vec<u64> {
    let mut roots = base;
    let mut pk = p;
    for _ in 1..e {
        if roots.is_empty() {
            break;
        }
        roots = lift_step(&roots, p, pk, &eval);
        pk *= p;
    }
    roots
}

/// All `x` in `[0, m)` with `x^2 = a mod m`, ascending.
pub fn sqrt_mod_all(a: i64, m: u64) -> Vec<u64> {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return vec![0];
    }
    let mut acc: Vec<u64> = vec![0];
    let mut acc_mod = 1u64;
    for (p, e) in factorize(m) {
        let pe = p.pow(e);
        let a_p = a.rem_euclid(pe as i64) as u64;
        let base = if p == 2 {
            vec![a_p % 2]
        } else {
            sqrt_mod_prime(a_p, p)
        };
        let local = lift_roots(p, e, base, |x, md| {
            (mul_mod(x, x, md) + md - a_p % md) % md
        });
        if local.is_empty() {
            return Vec::new();
        }
        acc = crt_combine(&acc, acc_mod, &local, pe);
        acc_mod *= pe;
    }
    acc.sort_unstable();
    acc
}

fn crt_combine(xs: &[u64], m1: u64, ys: &[u64], m2: u64) -> Vec<u64> {
    // m1, m2 coprime
    let m = m1 * m2;
    let inv = mod_inverse(m1 % m2, m2);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            // x + m1 * ((y - x) * inv mod m2)
            let diff = (y + m2 - x % m2) % m2;
            let t = mul_mod(diff, inv, m2);
            out.push((x + m1 * t) % m);
        }
    }
    out
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// `[count(p^0), count(p^1), ..., count(p^max_e)]` where `count(c)` is the
/// solution count of [`super::count_b_solutions`].
///
/// Counts are roots of `N j^2 + rho j + (rho^2 - D) / 4N` modulo `p^e`.
pub fn local_root_counts(fam: &FormFamily, p: u64, max_e: u32) -> Vec<u64> {
    let (n, r, m0) = family_poly(fam);
    let eval = |x: u64, md: u64| -> u64 {
        let md_i = md as i128;
        let x = x as i128;
        (((n * x % md_i) * x + r * x + m0) % md_i).rem_euclid(md_i) as u64
    };
    let mut out = vec![1u64];
    let mut roots: Vec<u64> = (0..p).filter(|&x| eval(x, p) == 0).collect();
    let mut pk = p;
    for e in 1..=max_e {
        if e > 1 {
            roots = lift_step(&roots, p, pk, &eval);
            pk *= p;
        }
        out.push(roots.len() as u64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::{count_b_solutions, validate_family};

    #[test]
    fn tonelli_matches_brute_force() {
        for p in [67u64, 97, 101, 113, 257, 65537] {
            for a in [2u64, 3, 5, 17, 145, 1234] {
                let brute: Vec<u64> = (0..p).filter(|x| x * x % p == a % p).collect();
                assert_eq!(sqrt_mod_prime(a, p), brute, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn sqrt_mod_all_matches_brute_force() {
        for a in [17i64, 5, 145, 13, 12, 1, 0, -3] {
            for m in 1..=600u64 {
                let brute: Vec<u64> = (0..m)
                    .filter(|&x| (x as i64 * x as i64 - a).rem_euclid(m as i64) == 0)
                    .collect();
                assert_eq!(sqrt_mod_all(a, m), brute, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn local_counts_match_direct_counts() {
        for (n, d, rho) in [(1, 5, 1), (2, 17, 1), (3, 145, 1), (1, 12, 0), (2, 12, 2), (4, 33, 1)] {
            let f = validate_family(2, n, d, rho, true).unwrap();
            for p in [2u64, 3, 5, 7, 11, 29] {
                let counts = local_root_counts(&f, p, 6);
                let mut pe = 1u64;
                for (e, &c) in counts.iter().enumerate() {
                    if pe > 20_000 {
                        break;
                    }
                    assert_eq!(c, count_b_solutions(&f, pe), "N={n} D={d} p={p} e={e}");
                    pe *= p;
                }
            }
        }
    }
}
