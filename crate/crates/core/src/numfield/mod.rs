//! Exact arithmetic in small number fields given by a monic integer
//! defining polynomial.
//!
//! Two fields ship: `K = Q(α)` with `α⁵ = 2` and `L = Q(β)` with
//! `β² = β + 1`. Elements are stored as rational coordinates over the power
//! basis `1, θ, …, θ^{m-1}`; for both shipped fields the power basis is an
//! integral basis, so an element is integral exactly when its coordinates
//! are integers.

mod embed;
mod square;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::primes_below;
use crate::error::FieldError;

pub use square::{is_square, ResidueWitness, SquareCertificate, SquareTest};

/// Bound for the witness-prime scan.
pub const WITNESS_PRIME_LIMIT: u64 = 10_000;

/// A number field `Q[x]/(f)` with `f` monic, stored constant-first.
pub struct FieldSpec {
    name: String,
    poly: Vec<BigInt>,
    discriminant: OnceLock<BigInt>,
    split_primes: OnceLock<Vec<(u64, Vec<u64>)>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("name", &self.name)
            .field("poly", &self.poly)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.poly == other.poly
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds a spec from the non-leading coefficients of a monic
    /// polynomial, constant term first.
    pub fn new(name: &str, lower_coeffs: &[i64]) -> Arc<FieldSpec> {
        let mut poly: Vec<BigInt> = lower_coeffs.iter().map(|&c| BigInt::from(c)).collect();
        poly.push(BigInt::one());
        Arc::new(FieldSpec {
            name: name.to_string(),
            poly,
            discriminant: OnceLock::new(),
            split_primes: OnceLock::new(),
        })
    }

    /// `K = Q(α)`, `α⁵ = 2`.
    pub fn k() -> Arc<FieldSpec> {
        static K: OnceLock<Arc<FieldSpec>> = OnceLock::new();
        K.get_or_init(|| FieldSpec::new("K", &[-2, 0, 0, 0, 0])).clone()
    }

    /// `L = Q(β)`, `β² = β + 1`.
    pub fn l() -> Arc<FieldSpec> {
        static L: OnceLock<Arc<FieldSpec>> = OnceLock::new();
        L.get_or_init(|| FieldSpec::new("L", &[-1, -1])).clone()
    }

    pub fn by_name(name: &str) -> Result<Arc<FieldSpec>, FieldError> {
        match name {
            "K" => Ok(FieldSpec::k()),
            "L" => Ok(FieldSpec::l()),
            other => Err(FieldError::UnknownField(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Defining polynomial, constant term first, including the leading 1.
    pub fn defining_poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn eval_poly_mod(&self, x: u64, p: u64) -> u64 {
        let mut acc = 0u64;
        for c in self.poly.iter().rev() {
            acc = (acc * x + reduce_mod(c, p)) % p;
        }
        acc
    }

    /// `disc(f) = (-1)^{m(m-1)/2} N(f'(θ))`.
    pub fn discriminant(self: &Arc<Self>) -> BigInt {
        self.discriminant
            .get_or_init(|| {
                let m = self.degree();
                let deriv: Vec<BigRational> = (0..m)
                    .map(|i| BigRational::from_integer(&self.poly[i + 1] * BigInt::from(i + 1)))
                    .collect();
                let n = FieldElement::from_rationals(self, deriv)
                    .expect("derivative has m coordinates")
                    .norm();
                let sign = if (m * (m - 1) / 2) % 2 == 0 { 1 } else { -1 };
                n.to_integer() * BigInt::from(sign)
            })
            .clone()
    }

    /// Primes below [`WITNESS_PRIME_LIMIT`] not dividing the discriminant,
    /// paired with the roots of the defining polynomial modulo each prime.
    /// Primes without a root are omitted.
    pub fn split_primes(self: &Arc<Self>) -> &[(u64, Vec<u64>)] {
        self.split_primes.get_or_init(|| {
            let disc = self.discriminant();
            primes_below(WITNESS_PRIME_LIMIT)
                .into_iter()
                .filter(|&p| !(&disc % BigInt::from(p)).is_zero())
                .filter_map(|p| {
                    let roots: Vec<u64> = (0..p).filter(|&r| self.eval_poly_mod(r, p) == 0).collect();
                    (!roots.is_empty()).then_some((p, roots))
                })
                .collect()
        })
    }

    /// Irreducibility over Q for degree <= 5: no rational root and, for
    /// degree 4 or 5, no monic integer quadratic factor.
    pub fn is_irreducible(&self) -> bool {
        let m = self.degree();
        if m <= 1 {
            return m == 1;
        }
        let c0 = &self.poly[0];
        if c0.is_zero() {
            return false;
        }
        // monic, so rational roots are integer divisors of c0
        for d in divisors(c0) {
            for r in [d.clone(), -d] {
                if eval_int_poly(&self.poly, &r).is_zero() {
                    return false;
                }
            }
        }
        if m < 4 {
            return true;
        }
        let cauchy: BigInt = self.poly.iter().map(|c| c.abs()).max().unwrap() + 1;
        let a_bound: BigInt = &cauchy * 2;
        let b_bound = &cauchy * &cauchy;
        let mut a = -a_bound.clone();
        while a <= a_bound {
            for d in divisors(c0) {
                if d > b_bound {
                    continue;
                }
                for b in [d.clone(), -d] {
                    let quad = vec![b, a.clone(), BigInt::one()];
                    if poly_rem_is_zero(&self.poly, &quad) {
                        return false;
                    }
                }
            }
            a += 1;
        }
        true
    }
}

fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("residue fits in u64")
}

fn eval_int_poly(poly: &[BigInt], x: &BigInt) -> BigInt {
    poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

/// Whether the monic `divisor` divides `poly` over Z.
fn poly_rem_is_zero(poly: &[BigInt], divisor: &[BigInt]) -> bool {
    let mut rem = poly.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = rem.pop().unwrap();
        let shift = rem.len() - dd;
        for (i, c) in divisor[..dd].iter().enumerate() {
            rem[shift + i] -= &lead * c;
        }
    }
    rem.iter().all(Zero::is_zero)
}

/// An exact element of a [`FieldSpec`] in power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.spec.name, self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.spec.name.as_str() {
            "K" => "α",
            "L" => "β",
            _ => "θ",
        };
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => sym.to_string(),
                _ => format!("{sym}^{i}"),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "({mag}){mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FieldElement {
    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        FieldElement {
            spec: spec.clone(),
            coords: vec![BigRational::zero(); spec.degree()],
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Self::from_rational(spec, BigRational::one())
    }

    /// The generator θ.
    pub fn generator(spec: &Arc<FieldSpec>) -> Self {
        let mut e = Self::zero(spec);
        if spec.degree() == 1 {
            e.coords[0] = BigRational::from_integer(-spec.poly[0].clone());
        } else {
            e.coords[1] = BigRational::one();
        }
        e
    }

    pub fn from_rational(spec: &Arc<FieldSpec>, q: BigRational) -> Self {
        let mut e = Self::zero(spec);
        e.coords[0] = q;
        e
    }

    pub fn from_int(spec: &Arc<FieldSpec>, n: i64) -> Self {
        Self::from_rational(spec, BigRational::from_integer(BigInt::from(n)))
    }

    /// Integer coordinates, constant first. Shorter slices are zero-padded.
    pub fn from_ints(spec: &Arc<FieldSpec>, coords: &[i64]) -> Self {
        assert!(coords.len() <= spec.degree(), "too many coordinates");
        let mut e = Self::zero(spec);
        for (slot, &c) in e.coords.iter_mut().zip(coords) {
            *slot = BigRational::from_integer(BigInt::from(c));
        }
        e
    }

    pub fn from_rationals(spec: &Arc<FieldSpec>, coords: Vec<BigRational>) -> Result<Self, FieldError> {
        if coords.len() != spec.degree() {
            return Err(FieldError::WrongDegree {
                expected: spec.degree(),
                got: coords.len(),
            });
        }
        Ok(FieldElement {
            spec: spec.clone(),
            coords,
        })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// The element as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coords[0].clone())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    fn check_same(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec {
            Ok(())
        } else {
            Err(FieldError::MixedFields(
                self.spec.name.clone(),
                other.spec.name.clone(),
            ))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        Ok(self.add_unchecked(&other.neg_ref()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        FieldElement {
            spec: self.spec.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub(crate) fn neg_ref(&self) -> Self {
        FieldElement {
            spec: self.spec.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let m = self.spec.degree();
        let mut prod = vec![BigRational::zero(); 2 * m - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        // θ^m = -Σ f_i θ^i
        for top in (m..2 * m - 1).rev() {
            let lead = std::mem::take(&mut prod[top]);
            if lead.is_zero() {
                continue;
            }
            for i in 0..m {
                let f = &self.spec.poly[i];
                if !f.is_zero() {
                    prod[top - m + i] -= &lead * BigRational::from_integer(f.clone());
                }
            }
        }
        prod.truncate(m);
        FieldElement {
            spec: self.spec.clone(),
            coords: prod,
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement {
            spec: self.spec.clone(),
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = FieldElement::one(&self.spec);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by `self`; column `j` holds `self·θ^j`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let m = self.spec.degree();
        let theta = FieldElement::generator(&self.spec);
        let mut col = self.clone();
        let mut cols = Vec::with_capacity(m);
        for _ in 0..m {
            cols.push(col.coords.clone());
            col = col.mul_unchecked(&theta);
        }
        (0..m).map(|r| (0..m).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// `N(x) = det(mult-by-x)`.
    pub fn norm(&self) -> BigRational {
        determinant(self.multiplication_matrix())
    }

    pub fn trace(&self) -> BigRational {
        let mat = self.multiplication_matrix();
        (0..mat.len()).map(|i| mat[i][i].clone()).sum()
    }

    /// `x / y` as an exact field element.
    pub fn div(&self, y: &Self) -> Result<Self, FieldError> {
        self.check_same(y)?;
        if y.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let coords = solve(y.multiplication_matrix(), self.coords.clone())
            .ok_or(FieldError::DivisionByZero)?;
        Ok(FieldElement {
            spec: self.spec.clone(),
            coords,
        })
    }

    /// `x / y` when the quotient is integral, `None` otherwise.
    pub fn div_exact(&self, y: &Self) -> Result<Option<Self>, FieldError> {
        let q = self.div(y)?;
        Ok(q.is_integral().then_some(q))
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        FieldElement::one(&self.spec).div(self)
    }

    /// Image under `θ ↦ r` modulo `p`; `None` if a denominator vanishes.
    pub fn reduce_mod(&self, p: u64, r: u64) -> Option<u64> {
        let mut acc = 0u64;
        let mut rpow = 1u64;
        for c in &self.coords {
            let num = reduce_mod(c.numer(), p);
            let den = reduce_mod(c.denom(), p);
            if den == 0 {
                return None;
            }
            let den_inv = crate::arith::pow_mod(den, p - 2, p);
            acc = (acc + num * den_inv % p * rpow) % p;
            rpow = rpow * r % p;
        }
        Some(acc)
    }

    /// Sign-normalized copy: the highest-degree nonzero coordinate is
    /// positive.
    pub fn canonical_sign(&self) -> Self {
        match self.coords.iter().rev().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => self.neg_ref(),
            _ => self.clone(),
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    /// Panics on mixed fields; use [`FieldElement::try_add`] otherwise.
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Binary field operation dispatch.
pub fn nf_arith(op: ArithOp, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
    }
}

/// Fraction-based Gaussian elimination.
pub(crate) fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Solves `a x = b`; `None` when singular.
pub(crate) fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        b.swap(piv, col);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &b[col];
            b[r] -= sub;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let bad = || FieldError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    field: String,
    coords: Vec<String>,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            field: self.spec.name.clone(),
            coords: self.coords.iter().map(format_rational).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ElementRepr::deserialize(deserializer)?;
        let spec = FieldSpec::by_name(&repr.field).map_err(D::Error::custom)?;
        let coords = repr
            .coords
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        FieldElement::from_rationals(&spec, coords).map_err(D::Error::custom)
    }
}
