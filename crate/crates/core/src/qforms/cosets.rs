//! Right cosets `Gamma0(N) \ SL2(Z)`, labelled by the projective line over
//! `Z/N`.

use rug::Integer;

use crate::exact::gcd;

use super::UnimodularMatrix;

/// Index into [`coset_reps`] for a given level.
pub type P1Label = usize;

/// Canonical points `(c : d)` of `P^1(Z/N)`, in lexicographic order of their
/// first representative in `[0, N)^2`.
fn p1_points(level: u64) -> Vec<(u64, u64)> {
    if level == 1 {
        return vec![(0, 1)];
    }
    let mut pts: Vec<(u64, u64)> = Vec::new();
    for c in 0..level {
        for d in 0..level {
            if gcd(gcd(c, d), level) != 1 {
                continue;
            }
            if !pts.iter().any(|&(c2, d2)| same_point(c, d, c2, d2, level)) {
                pts.push((c, d));
            }
        }
    }
    pts
}

fn same_point(c1: u64, d1: u64, c2: u64, d2: u64, level: u64) -> bool {
    (c1 as i128 * d2 as i128 - c2 as i128 * d1 as i128).rem_euclid(level as i128) == 0
}

/// Lifts a primitive pair modulo `N` to an `SL2(Z)` matrix with that bottom
/// row modulo `N`: the smallest shift `d + tN` coprime to `c`, then the
/// smallest non-negative top-left entry.
fn lift(c: u64, d: u64, level: u64) -> UnimodularMatrix {
    if c == 0 {
        return UnimodularMatrix::identity();
    }
    let mut d = d;
    while gcd(c, d) != 1 {
        d += level;
    }
    // alpha d - beta c = 1 with 0 <= alpha < c
    let alpha = (0..c).find(|a| (a * d) % c == 1 % c).expect("d invertible mod c");
    let beta = (alpha as i128 * d as i128 - 1) / c as i128;
    UnimodularMatrix::from_integers(
        Integer::from(alpha),
        Integer::from(beta),
        Integer::from(c),
        Integer::from(d),
    )
    .expect("determinant one by construction")
}

/// One representative per right coset of `Gamma0(N)` in `SL2(Z)`; the first is
/// the identity. There are `N prod_{p | N} (1 + 1/p)` of them.
pub fn coset_reps(level: i64) -> Vec<UnimodularMatrix> {
    assert!(level >= 1, "level must be positive");
    let n = level as u64;
    p1_points(n).into_iter().map(|(c, d)| lift(c, d, n)).collect()
}

/// Label of the coset `Gamma0(N) M`, i.e. the position in [`coset_reps`] of its
/// representative. Determined by the bottom row of `M` modulo `N`.
pub fn coset_label(m: &UnimodularMatrix, level: i64) -> P1Label {
    let c = m.gamma.mod_u(level as u32) as u64;
    let d = m.delta.mod_u(level as u32) as u64;
    p1_points(level as u64)
        .iter()
        .position(|&(c2, d2)| same_point(c, d, c2, d2, level as u64))
        .expect("bottom row of a unimodular matrix is primitive")
}
