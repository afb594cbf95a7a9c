//! Binary quadratic forms, the families `Q_{N,D,rho}` and the group actions on
//! them.

mod cosets;
mod residues;

use std::fmt;

use rug::{Complete, Integer};

use crate::error::{Error, Result};
use crate::exact::{divisors, is_perfect_square, isqrt};

pub use cosets::{coset_label, coset_reps, P1Label};
pub use residues::{local_root_counts, sqrt_mod_all};

/// An integral `2x2` matrix of determinant one, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodularMatrix {
    pub alpha: Integer,
    pub beta: Integer,
    pub gamma: Integer,
    pub delta: Integer,
}

impl UnimodularMatrix {
    pub fn new(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Result<Self> {
        Self::from_integers(alpha.into(), beta.into(), gamma.into(), delta.into())
    }

    pub fn from_integers(
        alpha: Integer,
        beta: Integer,
        gamma: Integer,
        delta: Integer,
    ) -> Result<Self> {
        let det = Integer::from(&alpha * &delta) - Integer::from(&beta * &gamma);
        if det != 1 {
            return Err(Error::InvalidArgument(format!(
                "matrix ({alpha}, {beta}; {gamma}, {delta}) has determinant {det}"
            )));
        }
        Ok(UnimodularMatrix {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    fn raw(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Self {
        Self::new(alpha, beta, gamma, delta).expect("determinant one by construction")
    }

    pub fn identity() -> Self {
        Self::raw(1, 0, 0, 1)
    }

    /// `(0, -1; 1, 0)`
    pub fn s() -> Self {
        Self::raw(0, -1, 1, 0)
    }

    /// `(1, 1; 0, 1)`
    pub fn t() -> Self {
        Self::raw(1, 1, 0, 1)
    }

    /// `U = T S = (1, -1; 1, 0)`, of order three in `PSL2(Z)`.
    pub fn u() -> Self {
        Self::raw(1, -1, 1, 0)
    }

    pub fn neg(&self) -> Self {
        UnimodularMatrix {
            alpha: (-&self.alpha).complete(),
            beta: (-&self.beta).complete(),
            gamma: (-&self.gamma).complete(),
            delta: (-&self.delta).complete(),
        }
    }

    pub fn mul(&self, o: &UnimodularMatrix) -> Self {
        let e = |x: &Integer, y: &Integer, z: &Integer, w: &Integer| {
            Integer::from(x * y) + Integer::from(z * w)
        };
        UnimodularMatrix {
            alpha: e(&self.alpha, &o.alpha, &self.beta, &o.gamma),
            beta: e(&self.alpha, &o.beta, &self.beta, &o.delta),
            gamma: e(&self.gamma, &o.alpha, &self.delta, &o.gamma),
            delta: e(&self.gamma, &o.beta, &self.delta, &o.delta),
        }
    }

    pub fn inverse(&self) -> Self {
        UnimodularMatrix {
            alpha: self.delta.clone(),
            beta: (-&self.beta).complete(),
            gamma: (-&self.gamma).complete(),
            delta: self.alpha.clone(),
        }
    }

    pub fn in_gamma0(&self, level: i64) -> bool {
        self.gamma.is_divisible(&Integer::from(level))
    }

    /// Entries as `i64`, if they fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([
            self.alpha.to_i64()?,
            self.beta.to_i64()?,
            self.gamma.to_i64()?,
            self.delta.to_i64()?,
        ])
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.alpha, self.beta, self.gamma, self.delta
        )
    }
}

/// The form `A x^2 + B x y + C y^2`, written `[A, B, C]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
}

impl QuadForm {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Self {
        QuadForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn disc(&self) -> Integer {
        Integer::from(self.b.square_ref()) - Integer::from(&self.a * &self.c) * 4u32
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// Parameters `(k, N, D, rho)` of the family `Q_{N,D,rho}` of forms
/// `[N a, b, c]` with `b^2 - 4 N a c = D` and `b = rho mod 2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormFamily {
    pub k: i64,
    pub level: i64,
    pub disc: i64,
    pub rho: i64,
}

impl FormFamily {
    /// The family for `-rho`; its cusp form is the Fricke image.
    pub fn negated(&self) -> FormFamily {
        FormFamily {
            rho: -self.rho,
            ..*self
        }
    }

    pub fn with_level(&self, level: i64, rho: i64) -> Result<FormFamily> {
        validate_family(self.k, level, self.disc, rho, false)
    }

    pub fn contains(&self, q: &QuadForm) -> bool {
        let n = Integer::from(self.level);
        let two_n = Integer::from(2 * self.level);
        q.a.is_divisible(&n)
            && Integer::from(&q.b - self.rho).is_divisible(&two_n)
            && q.disc() == self.disc
    }

    pub fn ensure_nonsquare(&self) -> Result<()> {
        if is_perfect_square(self.disc) {
            Err(Error::SquareDiscriminant(self.disc))
        } else {
            Ok(())
        }
    }

    /// `rho` reduced into `[0, 2N)`.
    pub fn rho_reduced(&self) -> i64 {
        self.rho.rem_euclid(2 * self.level)
    }
}

pub fn validate_family(
    k: i64,
    level: i64,
    disc: i64,
    rho: i64,
    require_nonsquare: bool,
) -> Result<FormFamily> {
    if k < 2 {
        return Err(Error::BadWeight(k));
    }
    if level < 1 {
        return Err(Error::InvalidArgument(format!(
            "level must be positive, got {level}"
        )));
    }
    if disc <= 0 {
        return Err(Error::InvalidArgument(format!(
            "discriminant must be positive, got {disc}"
        )));
    }
    let modulus = 4 * level;
    if (rho as i128 * rho as i128 - disc as i128).rem_euclid(modulus as i128) != 0 {
        return Err(Error::CongruenceViolation {
            rho,
            d: disc,
            modulus,
        });
    }
    let fam = FormFamily {
        k,
        level,
        disc,
        rho,
    };
    if require_nonsquare {
        fam.ensure_nonsquare()?;
    }
    Ok(fam)
}

/// `Q o M`, the form `Q(alpha x + beta y, gamma x + delta y)`.
pub fn act(q: &QuadForm, m: &UnimodularMatrix) -> QuadForm {
    let UnimodularMatrix {
        alpha,
        beta,
        gamma,
        delta,
    } = m;
    let a = Integer::from(alpha.square_ref()) * &q.a
        + Integer::from(&q.b * alpha) * gamma
        + Integer::from(gamma.square_ref()) * &q.c;
    let b = Integer::from(&q.a * alpha) * beta * 2u32
        + Integer::from(&q.b * (Integer::from(alpha * delta) + Integer::from(beta * gamma)))
        + Integer::from(&q.c * gamma) * delta * 2u32;
    let c = Integer::from(beta.square_ref()) * &q.a
        + Integer::from(&q.b * beta) * delta
        + Integer::from(delta.square_ref()) * &q.c;
    QuadForm { a, b, c }
}

fn split_leading(q: &QuadForm, level: i64) -> Result<Integer> {
    let n = Integer::from(level);
    if level < 1 || !q.a.is_divisible(&n) {
        return Err(Error::LevelMismatch {
            level,
            leading: q.a.to_string(),
        });
    }
    Ok(Integer::from(q.a.div_exact_ref(&n)))
}

/// `[N a, b, c] -> [N c, -b, a]`
pub fn fricke(q: &QuadForm, level: i64) -> Result<QuadForm> {
    let a = split_leading(q, level)?;
    Ok(QuadForm {
        a: Integer::from(&q.c * level),
        b: (-&q.b).complete(),
        c: a,
    })
}

/// `[N a, b, c] -> [-N c, b, -a]`
pub fn iota(q: &QuadForm, level: i64) -> Result<QuadForm> {
    let a = split_leading(q, level)?;
    Ok(QuadForm {
        a: Integer::from(&q.c * -level),
        b: q.b.clone(),
        c: -a,
    })
}

/// Forms `[N a, b, c]` with `b^2 - 4 N a c = D`, for one fixed `b`, over all
/// signed factorizations of `(b^2 - D) / 4N`.
fn forms_with_middle(fam: &FormFamily, b: i64, only_ac_negative: bool, out: &mut Vec<QuadForm>) {
    let num = b as i128 * b as i128 - fam.disc as i128;
    let four_n = 4 * fam.level as i128;
    debug_assert_eq!(num % four_n, 0);
    let m = num / four_n;
    if m == 0 {
        return;
    }
    if only_ac_negative && m > 0 {
        return;
    }
    for d in divisors(m.unsigned_abs() as u64) {
        for sign in [1i128, -1] {
            let a = sign * d as i128;
            out.push(QuadForm::new(a * fam.level as i128, b, m / a));
        }
    }
}

fn sort_by_b_then_a(forms: &mut [QuadForm]) {
    forms.sort_by(|x, y| x.b.cmp(&y.b).then_with(|| x.a.cmp(&y.a)));
}

/// All forms of the family with `a c < 0`, sorted by `(b, a)`.
///
/// The set is finite since `a c < 0` forces `b^2 < D`.
pub fn enumerate_ac_negative(fam: &FormFamily) -> Result<Vec<QuadForm>> {
    fam.ensure_nonsquare()?;
    let bmax = isqrt(fam.disc as u64) as i64;
    let mut out = Vec::new();
    for b in residues_in_range(fam.rho, 2 * fam.level, -bmax, bmax) {
        forms_with_middle(fam, b, true, &mut out);
    }
    sort_by_b_then_a(&mut out);
    Ok(out)
}

/// All family forms with `|b| <= b_bound`, sorted by `(b, a)`.
pub fn enumerate_truncated(fam: &FormFamily, b_bound: u64) -> Result<Vec<QuadForm>> {
    fam.ensure_nonsquare()?;
    let bb = b_bound as i64;
    let mut out = Vec::new();
    for b in residues_in_range(fam.rho, 2 * fam.level, -bb, bb) {
        forms_with_middle(fam, b, false, &mut out);
    }
    sort_by_b_then_a(&mut out);
    Ok(out)
}

/// Integers `b` in `[lo, hi]` with `b = r mod m`, ascending.
fn residues_in_range(r: i64, m: i64, lo: i64, hi: i64) -> impl Iterator<Item = i64> {
    let first = lo + (r - lo).rem_euclid(m);
    (0..)
        .map(move |i| first + i * m)
        .take_while(move |&b| b <= hi)
}

/// `#{ b mod 2Nc : b = rho mod 2N, b^2 = D mod 4Nc }`, by direct enumeration.
pub fn count_b_solutions(fam: &FormFamily, c: u64) -> u64 {
    let two_n = 2 * fam.level as i128;
    let modulus = 4 * fam.level as i128 * c as i128;
    let d = fam.disc as i128;
    let mut b = fam.rho_reduced() as i128;
    let end = two_n * c as i128;
    let mut count = 0;
    while b < end {
        if (b * b - d) % modulus == 0 {
            count += 1;
        }
        b += two_n;
    }
    count
}

/// Roots of `g(j) = N j^2 + rho j + (rho^2 - D) / 4N` modulo `c`; equal in
/// number to the solutions counted by [`count_b_solutions`].
pub(crate) fn family_poly(fam: &FormFamily) -> (i128, i128, i128) {
    let r = fam.rho as i128;
    let n = fam.level as i128;
    (n, r, (r * r - fam.disc as i128) / (4 * n))
}

/// The algebraic part of the identity component:
/// `sum_{a>0>c} (N a X^2 - b X + c)^{k-1} - sum_{a<0<c} (...)^{k-1}`,
/// coefficients indexed by degree.
pub fn algebraic_identity_part(fam: &FormFamily) -> Result<Vec<Integer>> {
    let k1 = (fam.k - 1) as usize;
    let mut acc = vec![Integer::new(); 2 * k1 + 1];
    for q in enumerate_ac_negative(fam)? {
        let sign = if q.a > 0 { 1 } else { -1 };
        let quad = [q.c.clone(), (-&q.b).complete(), q.a.clone()];
        let mut p = vec![Integer::from(1)];
        for _ in 0..k1 {
            p = int_poly_mul(&p, &quad);
        }
        for (i, coef) in p.into_iter().enumerate() {
            acc[i] += coef * sign;
        }
    }
    Ok(acc)
}

pub(crate) fn int_poly_mul(x: &[Integer], y: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += Integer::from(a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(k: i64, n: i64, d: i64, rho: i64) -> FormFamily {
        validate_family(k, n, d, rho, true).unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate_family(2, 2, 17, 1, true).is_ok());
        assert_eq!(
            validate_family(2, 2, 17, 2, true),
            Err(Error::CongruenceViolation {
                rho: 2,
                d: 17,
                modulus: 8
            })
        );
        assert_eq!(
            validate_family(2, 1, 16, 0, true),
            Err(Error::SquareDiscriminant(16))
        );
        assert!(validate_family(2, 1, 16, 0, false).is_ok());
        assert_eq!(validate_family(1, 1, 5, 1, true), Err(Error::BadWeight(1)));
    }

    #[test]
    fn act_examples() {
        let q = QuadForm::new(2, 1, -2);
        assert_eq!(act(&q, &UnimodularMatrix::identity()), q);
        let qt = act(&q, &UnimodularMatrix::t());
        assert_eq!(qt, QuadForm::new(2, 5, 1));
        assert_eq!(qt.disc(), 17);
    }

    #[test]
    fn fricke_and_iota_examples() {
        let q = QuadForm::new(2, 1, -2);
        assert_eq!(fricke(&q, 2).unwrap(), QuadForm::new(-4, -1, 1));
        assert_eq!(fricke(&fricke(&q, 2).unwrap(), 2).unwrap(), q);
        assert_eq!(iota(&q, 2).unwrap(), QuadForm::new(4, 1, -1));
        assert_eq!(iota(&iota(&q, 2).unwrap(), 2).unwrap(), q);
        assert!(matches!(
            fricke(&QuadForm::new(3, 1, -1), 2),
            Err(Error::LevelMismatch { level: 2, .. })
        ));
        assert!(matches!(iota(&QuadForm::new(3, 1, -1), 2), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn ac_negative_example() {
        let f = fam(2, 2, 17, 1);
        let forms = enumerate_ac_negative(&f).unwrap();
        let bs: std::collections::BTreeSet<i64> =
            forms.iter().map(|q| q.b.to_i64().unwrap()).collect();
        assert_eq!(bs.into_iter().collect::<Vec<_>>(), vec![-3, 1]);
        assert_eq!(forms.len(), 6);
        assert_eq!(forms.iter().filter(|q| q.a > 0).count(), 3);
        assert!(forms.iter().all(|q| q.c != 0 && f.contains(q)));
        let expect = vec![
            QuadForm::new(-2, -3, 1),
            QuadForm::new(2, -3, -1),
            QuadForm::new(-4, 1, 1),
            QuadForm::new(-2, 1, 2),
            QuadForm::new(2, 1, -2),
            QuadForm::new(4, 1, -1),
        ];
        assert_eq!(forms, expect);
        assert!(matches!(
            enumerate_ac_negative(&validate_family(2, 1, 16, 0, false).unwrap()),
            Err(Error::SquareDiscriminant(16))
        ));
    }

    #[test]
    fn ac_negative_matches_brute_force() {
        // Brute force over a box; a c < 0 bounds |a|, |c| by D / 4N.
        for (n, d, rho) in [(1, 5, 1), (2, 17, 1), (2, 17, 3), (3, 13, 1), (3, 145, 1), (1, 12, 0)] {
            let f = fam(2, n, d, rho);
            let got = enumerate_ac_negative(&f).unwrap();
            let mut want = Vec::new();
            let bound = d;
            for b in -bound..=bound {
                for a in -bound..=bound {
                    for c in -bound..=bound {
                        let q = QuadForm::new(n * a, b, c);
                        if a * c < 0 && f.contains(&q) {
                            want.push(q);
                        }
                    }
                }
            }
            sort_by_b_then_a(&mut want);
            assert_eq!(got, want, "N={n} D={d} rho={rho}");
        }
    }

    #[test]
    fn fricke_maps_family_onto_negated_family() {
        for (n, d, rho) in [(2, 17, 1), (3, 13, 1), (3, 145, 1), (5, 21, 1), (4, 17, 1)] {
            let f = fam(2, n, d, rho);
            let mut image: Vec<QuadForm> = enumerate_ac_negative(&f)
                .unwrap()
                .iter()
                .map(|q| fricke(q, n).unwrap())
                .collect();
            sort_by_b_then_a(&mut image);
            assert_eq!(image, enumerate_ac_negative(&f.negated()).unwrap());
        }
    }

    #[test]
    fn iota_preserves_sign_classes() {
        for (n, d, rho) in [(2, 17, 1), (3, 13, 1), (3, 145, 1), (1, 5, 1)] {
            let f = fam(2, n, d, rho);
            let forms = enumerate_ac_negative(&f).unwrap();
            for positive in [true, false] {
                let mut part: Vec<QuadForm> =
                    forms.iter().filter(|q| (q.a > 0) == positive).cloned().collect();
                let mut image: Vec<QuadForm> =
                    part.iter().map(|q| iota(q, n).unwrap()).collect();
                sort_by_b_then_a(&mut part);
                sort_by_b_then_a(&mut image);
                assert_eq!(image, part);
            }
        }
    }

    #[test]
    fn truncated_enumeration_is_complete_in_box() {
        let f = fam(2, 2, 17, 1);
        let forms = enumerate_truncated(&f, 11).unwrap();
        assert!(forms.iter().all(|q| f.contains(q) && q.b.clone().abs() <= 11));
        // b = 5: (25 - 17) / 8 = 1, so a c = 1 with four... two signed pairs.
        let b5: Vec<_> = forms.iter().filter(|q| q.b == 5).collect();
        assert_eq!(b5.len(), 2);
        let total: usize = [-11i64, -7, -3, 1, 5, 9]
            .iter()
            .map(|&b| 2 * divisors(((b * b - 17) / 8).unsigned_abs()).len())
            .sum();
        assert_eq!(forms.len(), total);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_b_solutions(&fam(2, 1, 5, 1), 1), 1);
        assert_eq!(count_b_solutions(&fam(2, 2, 17, 1), 1), 1);
        // 5 is a non-residue mod 3
        assert_eq!(count_b_solutions(&fam(2, 1, 5, 1), 3), 0);
        assert_eq!(count_b_solutions(&fam(2, 1, 5, 1), 3 * 11), 0);
    }

    #[test]
    fn count_matches_double_loop() {
        for (n, d, rho) in [(1, 5, 1), (2, 17, 1), (2, 17, -1), (3, 13, 1), (1, 12, 0), (3, 145, 1)] {
            let f = fam(2, n, d, rho);
            for c in 1..=200u64 {
                let modulus = 4 * n * c as i64;
                let mut brute = 0;
                for b in 0..2 * n * c as i64 {
                    if (b - rho).rem_euclid(2 * n) == 0 && (b * b - d).rem_euclid(modulus) == 0 {
                        brute += 1;
                    }
                }
                assert_eq!(count_b_solutions(&f, c), brute, "N={n} D={d} rho={rho} c={c}");
            }
        }
    }

    #[test]
    fn count_is_multiplicative() {
        for (n, d, rho) in [(1, 5, 1), (2, 17, 1), (3, 145, 1), (1, 12, 0)] {
            let f = fam(2, n, d, rho);
            for c in 1..=60u64 {
                for e in 1..=60u64 {
                    if crate::exact::gcd(c, e) != 1 {
                        continue;
                    }
                    assert_eq!(
                        count_b_solutions(&f, c * e),
                        count_b_solutions(&f, c) * count_b_solutions(&f, e)
                    );
                }
            }
        }
    }

    #[test]
    fn algebraic_part_example() {
        let p = algebraic_identity_part(&fam(2, 2, 17, 1)).unwrap();
        assert_eq!(p, vec![Integer::from(-8), Integer::new(), Integer::from(16)]);
    }

    fn arb_matrix() -> impl Strategy<Value = UnimodularMatrix> {
        (-50i64..=50, -50i64..=50).prop_filter_map("need a primitive bottom row", |(c, d)| {
            let (g, x, y) = ext_gcd(c, d);
            (g == 1).then(|| UnimodularMatrix::new(y, -x, c, d).unwrap())
        })
    }

    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        // returns (g, x, y) with a x + b y = g >= 0
        if b == 0 {
            (a.abs(), a.signum(), 0)
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn discriminant_invariant(a in -50i64..=50, b in -50i64..=50, c in -50i64..=50, m in arb_matrix()) {
            let q = QuadForm::new(a, b, c);
            prop_assert_eq!(act(&q, &m).disc(), q.disc());
        }

        #[test]
        fn right_action_law(a in -20i64..=20, b in -20i64..=20, c in -20i64..=20,
                            m1 in arb_matrix(), m2 in arb_matrix()) {
            let q = QuadForm::new(a, b, c);
            prop_assert_eq!(act(&act(&q, &m1), &m2), act(&q, &m1.mul(&m2)));
        }

        #[test]
        fn gamma0_preserves_family(word in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..4),
                                   idx in 0usize..1000) {
            let n = 2;
            // products of T^x and (1, 0; N, 1)^y generate a subgroup of Gamma0(N)
            let mut m = UnimodularMatrix::identity();
            for (x, y) in word {
                m = m.mul(&UnimodularMatrix::new(1, x, 0, 1).unwrap());
                m = m.mul(&UnimodularMatrix::new(1, 0, n * y, 1).unwrap());
            }
            prop_assert!(m.in_gamma0(n));
            let f = validate_family(2, n, 17, 1, true).unwrap();
            let forms = enumerate_truncated(&f, 25).unwrap();
            let q = act(&forms[idx % forms.len()], &m);
            prop_assert!(f.contains(&q));
        }

        #[test]
        fn fricke_and_iota_are_involutions(
            fam in prop::sample::select(vec![(2i64, 17i64, 1i64), (3, 13, 1), (5, 21, 1), (4, 33, 1), (6, 73, 5)]),
            idx in 0usize..10_000,
        ) {
            let (n, d, rho) = fam;
            let f = validate_family(2, n, d, rho, true).unwrap();
            let forms = enumerate_truncated(&f, 120).unwrap();
            let q = &forms[idx % forms.len()];
            let w = fricke(q, n).unwrap();
            prop_assert!(f.negated().contains(&w));
            prop_assert_eq!(&fricke(&w, n).unwrap(), q);
            let j = iota(q, n).unwrap();
            prop_assert!(f.contains(&j));
            prop_assert_eq!(&iota(&j, n).unwrap(), q);
        }
    }
}
