//! Fixed-point complex embeddings used to guess square roots.
//!
//! Numbers are `BigInt`s scaled by `2^prec`. Nothing here is trusted:
//! every candidate root is re-checked with exact field arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cx {
    pub re: BigInt,
    pub im: BigInt,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Fixed {
    pub prec: u32,
}

impl Fixed {
    pub fn zero(&self) -> Cx {
        Cx {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn int(&self, n: &BigInt) -> Cx {
        Cx {
            re: n << self.prec,
            im: BigInt::zero(),
        }
    }

    pub fn from_f64(&self, z: Complex64) -> Cx {
        let scale = |v: f64| -> BigInt {
            // 2^52 of mantissa headroom, then shift the rest exactly
            let head = (v * 2f64.powi(52)).round();
            let head = BigInt::from(head as i64);
            if self.prec >= 52 {
                head << (self.prec - 52)
            } else {
                head >> (52 - self.prec)
            }
        };
        Cx {
            re: scale(z.re),
            im: scale(z.im),
        }
    }

    pub fn add(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: &a.re + &b.re,
            im: &a.im + &b.im,
        }
    }

    pub fn sub(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: &a.re - &b.re,
            im: &a.im - &b.im,
        }
    }

    pub fn neg(&self, a: &Cx) -> Cx {
        Cx {
            re: -&a.re,
            im: -&a.im,
        }
    }

    pub fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.prec,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.prec,
        }
    }

    pub fn mul_int(&self, a: &Cx, n: &BigInt) -> Cx {
        Cx {
            re: &a.re * n,
            im: &a.im * n,
        }
    }

    pub fn abs2(&self, a: &Cx) -> BigInt {
        &a.re * &a.re + &a.im * &a.im
    }

    pub fn div(&self, a: &Cx, b: &Cx) -> Option<Cx> {
        let den = self.abs2(b);
        if den.is_zero() {
            return None;
        }
        let re = (&a.re * &b.re + &a.im * &b.im) << self.prec;
        let im = (&a.im * &b.re - &a.re * &b.im) << self.prec;
        Some(Cx {
            re: re / &den,
            im: im / &den,
        })
    }

    /// Principal square root.
    pub fn sqrt(&self, a: &Cx) -> Cx {
        let modulus = self.abs2(a).sqrt();
        let half_re = (&modulus + &a.re) >> 1u32;
        let half_im = (&modulus - &a.re) >> 1u32;
        let clamp = |v: BigInt| if v.is_negative() { BigInt::zero() } else { v };
        let re = (clamp(half_re) << self.prec).sqrt();
        let mut im = (clamp(half_im) << self.prec).sqrt();
        if a.im.is_negative() {
            im = -im;
        }
        Cx { re, im }
    }

    /// Nearest integer to the real part.
    pub fn round_re(&self, a: &Cx) -> BigInt {
        let half = BigInt::one() << (self.prec - 1);
        (&a.re + half) >> self.prec
    }

    fn eval(&self, poly: &[BigInt], z: &Cx) -> (Cx, Cx) {
        // Horner for f and f'
        let mut f = self.zero();
        let mut df = self.zero();
        for c in poly.iter().rev() {
            df = self.add(&self.mul(&df, z), &f);
            f = self.add(&self.mul(&f, z), &self.int(c));
        }
        (f, df)
    }

    /// All complex roots of a squarefree integer polynomial.
    pub fn roots(&self, poly: &[BigInt]) -> Vec<Cx> {
        durand_kerner(poly)
            .into_iter()
            .map(|g| {
                let mut z = self.from_f64(g);
                for _ in 0..64 {
                    let (f, df) = self.eval(poly, &z);
                    let Some(step) = self.div(&f, &df) else { break };
                    z = self.sub(&z, &step);
                    if step.re.abs() < BigInt::from(2) && step.im.abs() < BigInt::from(2) {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// Inverse of the matrix `v`, by Gauss–Jordan with partial pivoting.
    pub fn invert(&self, v: &[Vec<Cx>]) -> Option<Vec<Vec<Cx>>> {
        let n = v.len();
        let mut a: Vec<Vec<Cx>> = v.to_vec();
        let mut inv: Vec<Vec<Cx>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { self.int(&BigInt::one()) } else { self.zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).max_by_key(|&r| self.abs2(&a[r][col]))?;
            if self.abs2(&a[piv][col]).is_zero() {
                return None;
            }
            a.swap(piv, col);
            inv.swap(piv, col);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] = self.div(&a[col][c], &p)?;
                inv[col][c] = self.div(&inv[col][c], &p)?;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r][col].clone();
                if factor.re.is_zero() && factor.im.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let s = self.mul(&factor, &a[col][c]);
                    a[r][c] = self.sub(&a[r][c], &s);
                    let s = self.mul(&factor, &inv[col][c]);
                    inv[r][c] = self.sub(&inv[r][c], &s);
                }
            }
        }
        Some(inv)
    }
}

/// Double-precision starting values for every root.
fn durand_kerner(poly: &[BigInt]) -> Vec<Complex64> {
    let m = poly.len() - 1;
    let coeffs: Vec<f64> = poly.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..m).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..m {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifth_roots_of_two() {
        let fx = Fixed { prec: 200 };
        let poly: Vec<BigInt> = [-2, 0, 0, 0, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        let roots = fx.roots(&poly);
        assert_eq!(roots.len(), 5);
        for r in &roots {
            let mut p = fx.int(&BigInt::one());
            for _ in 0..5 {
                p = fx.mul(&p, r);
            }
            let err = fx.sub(&p, &fx.int(&BigInt::from(2)));
            assert!(err.re.abs() < BigInt::one() << 20u32);
            assert!(err.im.abs() < BigInt::one() << 20u32);
        }
    }

    #[test]
    fn sqrt_of_negative_real() {
        let fx = Fixed { prec: 64 };
        let r = fx.sqrt(&fx.int(&BigInt::from(-9)));
        assert_eq!(fx.round_re(&r), BigInt::zero());
        let im = Cx {
            re: r.im.clone(),
            im: BigInt::zero(),
        };
        assert_eq!(fx.round_re(&im), BigInt::from(3));
    }
}
