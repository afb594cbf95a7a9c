//! Polynomials of bounded degree with complex coefficients and the
//! weight `2 - 2k` slash action of `SL_2(Z)` on them.

use rug::ops::Pow;
use rug::Integer;

use crate::exact::binomial;
use crate::numeric::{self, Complex, Real};
use crate::qforms::UnimodularMatrix;

/// Coefficients indexed by degree.
#[derive(Clone, Debug)]
pub struct Poly {
    pub coeffs: Vec<Complex>,
}

impl Poly {
    pub fn zero(len: usize, prec: u32) -> Self {
        Poly {
            coeffs: vec![Complex::zero(prec); len],
        }
    }

    pub fn from_integers(coeffs: &[Integer], prec: u32) -> Self {
        Poly {
            coeffs: coeffs
                .iter()
                .map(|c| Complex::from_real(numeric::real_from_int(prec, c)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(Complex::prec).min().unwrap_or(numeric::MIN_PRECISION)
    }

    fn zip_with(&self, other: &Poly, f: impl Fn(&Complex, &Complex) -> Complex) -> Poly {
        let len = self.len().max(other.len());
        let prec = self.prec().min(other.prec());
        let zero = Complex::zero(prec);
        Poly {
            coeffs: (0..len)
                .map(|i| f(self.coeffs.get(i).unwrap_or(&zero), other.coeffs.get(i).unwrap_or(&zero)))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Complex) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `P(-X)`
    pub fn reflect(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    fn keep_parity(&self, parity: usize) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == parity { c.clone() } else { Complex::zero(c.prec()) })
                .collect(),
        }
    }

    /// `(P(X) + P(-X)) / 2`
    pub fn even_part(&self) -> Poly {
        self.keep_parity(0)
    }

    /// `(P(X) - P(-X)) / 2`
    pub fn odd_part(&self) -> Poly {
        self.keep_parity(1)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> Real {
        let mut m = Real::new(self.prec());
        for c in &self.coeffs {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn eval(&self, x: &Complex) -> Complex {
        let mut acc = Complex::zero(self.prec());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

/// `(P |_{-w} g)(X) = (cX + d)^w P((aX + b)/(cX + d))` with `w = 2k - 2`.
pub fn poly_slash(p: &Poly, g: &UnimodularMatrix, w: usize) -> Poly {
    let prec = p.prec();
    let mut out = Poly::zero(w + 1, prec);
    let (a, b, c, d) = (&g.alpha, &g.beta, &g.gamma, &g.delta);
    for (j, pj) in p.coeffs.iter().enumerate() {
        if pj.is_zero() {
            continue;
        }
        assert!(j <= w, "degree {j} exceeds {w}");
        // (aX + b)^j (cX + d)^{w-j}
        let first = binomial_expand(a, b, j);
        let second = binomial_expand(c, d, w - j);
        let mut prod = vec![Integer::new(); w + 1];
        for (i, x) in first.iter().enumerate() {
            for (l, y) in second.iter().enumerate() {
                prod[i + l] += Integer::from(x * y);
            }
        }
        for (i, coef) in prod.iter().enumerate() {
            if *coef != 0 {
                let s = numeric::real_from_int(prec, coef);
                out.coeffs[i] += &pj.scale(&s);
            }
        }
    }
    out
}

/// Coefficients of `(uX + v)^e`.
fn binomial_expand(u: &Integer, v: &Integer, e: usize) -> Vec<Integer> {
    (0..=e)
        .map(|i| {
            let up = Integer::from(u.pow(i as u32));
            let vp = Integer::from(v.pow((e - i) as u32));
            binomial(e as u32, i as u32) * up * vp
        })
        .collect()
}
