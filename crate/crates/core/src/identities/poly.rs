//! Dense-enough multivariate polynomials over Q or a number field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::PolyError;
use crate::numfield::{format_rational, FieldElement, FieldSpec};

/// Coefficient ring operations needed by [`MultiPoly`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    type Ring: Clone + PartialEq + fmt::Debug;

    fn ring(&self) -> Self::Ring;
    fn zero_in(ring: &Self::Ring) -> Self;
    fn one_in(ring: &Self::Ring) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, q: &BigRational) -> Self;
}

impl Coefficient for BigRational {
    type Ring = ();

    fn ring(&self) {}
    fn zero_in(_: &()) -> Self {
        BigRational::zero()
    }
    fn one_in(_: &()) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
}

impl Coefficient for FieldElement {
    type Ring = Arc<FieldSpec>;

    fn ring(&self) -> Arc<FieldSpec> {
        self.spec().clone()
    }
    fn zero_in(ring: &Arc<FieldSpec>) -> Self {
        FieldElement::zero(ring)
    }
    fn one_in(ring: &Arc<FieldSpec>) -> Self {
        FieldElement::one(ring)
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    // the polynomial checks ring equality before combining coefficients
    fn add(&self, other: &Self) -> Self {
        self.add_unchecked(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn neg(&self) -> Self {
        self.neg_ref()
    }
    fn scale(&self, q: &BigRational) -> Self {
        FieldElement::scale(self, q)
    }
}

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq)]
pub struct MultiPoly<C: Coefficient> {
    vars: Vec<String>,
    ring: C::Ring,
    terms: BTreeMap<Exponents, C>,
}

pub type QPoly = MultiPoly<BigRational>;
pub type FieldPoly = MultiPoly<FieldElement>;

impl<C: Coefficient> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coefficient> MultiPoly<C> {
    pub fn zero(vars: &[&str], ring: C::Ring) -> Self {
        MultiPoly {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: C) -> Self {
        let mut p = Self::zero(vars, c.ring());
        p.insert(vec![0; vars.len()], c);
        p
    }

    /// `c · Π var_i^{exps_i}`.
    pub fn monomial(vars: &[&str], exps: &[u32], c: C) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent arity");
        let mut p = Self::zero(vars, c.ring());
        p.insert(exps.to_vec(), c);
        p
    }

    pub fn var(vars: &[&str], name: &str, ring: C::Ring) -> Result<Self, PolyError> {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        Ok(Self::monomial(vars, &exps, C::one_in(&ring)))
    }

    fn insert(&mut self, exps: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&C> {
        self.terms.get(exps)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.vars != other.vars {
            return Err(PolyError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        if self.ring != other.ring {
            return Err(PolyError::IncompatibleRing);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = Self {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(e, ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::constant(
            &self.vars.iter().map(String::as_str).collect::<Vec<_>>(),
            C::one_in(&self.ring),
        );
        for _ in 0..exp {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.insert(e.clone(), c.scale(q));
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// Coefficient of `var^k`, as a polynomial in the remaining variables
    /// (the variable list is kept; `var` no longer occurs).
    pub fn coefficient_of(&self, var: &str, k: u32) -> Result<Self, PolyError> {
        let idx = self.var_index(var)?;
        let mut out = Self {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e[idx] == k {
                let mut e2 = e.clone();
                e2[idx] = 0;
                out.insert(e2, c.clone());
            }
        }
        Ok(out)
    }

    /// Replaces `var` by `value` everywhere.
    pub fn substitute(&self, var: &str, value: &Self) -> Result<Self, PolyError> {
        self.check(value)?;
        let idx = self.var_index(var)?;
        let mut out = Self {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[idx] = 0;
            let mono = Self {
                vars: self.vars.clone(),
                ring: self.ring.clone(),
                terms: BTreeMap::from([(rest, c.clone())]),
            };
            out = out.add(&mono.mul(&value.pow(e[idx]))?)?;
        }
        Ok(out)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> C {
        assert_eq!(point.len(), self.vars.len(), "point arity");
        let mut acc = C::zero_in(&self.ring);
        for (e, c) in &self.terms {
            let mut m = BigRational::one();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    m *= x;
                }
            }
            acc = acc.add(&c.scale(&m));
        }
        acc
    }

    pub fn eval_ints(&self, point: &[i64]) -> C {
        let pt: Vec<BigRational> = point
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        self.eval(&pt)
    }

    /// Display form of one monomial, e.g. `-3·u^2·v`.
    pub fn format_term(&self, exps: &[u32], c: &C) -> String {
        let mono: Vec<String> = self
            .vars
            .iter()
            .zip(exps)
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
            .collect();
        if mono.is_empty() {
            format!("{c}")
        } else {
            format!("({c})·{}", mono.join("·"))
        }
    }
}

impl QPoly {
    /// Integer polynomial from `(coefficient, exponents)` pairs.
    pub fn from_terms(vars: &[&str], terms: &[(i64, &[u32])]) -> Self {
        let mut p = Self::zero(vars, ());
        for (c, e) in terms {
            assert_eq!(e.len(), vars.len(), "exponent arity");
            p.insert(e.to_vec(), BigRational::from_integer(BigInt::from(*c)));
        }
        p
    }

    /// Same polynomial with coefficients mapped into a number field.
    pub fn into_field(&self, spec: &Arc<FieldSpec>) -> FieldPoly {
        let mut out = FieldPoly::zero(
            &self.vars.iter().map(String::as_str).collect::<Vec<_>>(),
            spec.clone(),
        );
        for (e, c) in &self.terms {
            out.insert(e.clone(), FieldElement::from_rational(spec, c.clone()));
        }
        out
    }

    /// Evaluation modulo `m` at integer residues; requires integer
    /// coefficients.
    pub fn eval_mod(&self, point: &[u64], m: u64) -> u64 {
        let mb = BigInt::from(m);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            assert!(c.is_integer(), "eval_mod needs integer coefficients");
            let mut term = c.to_integer();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term *= *x;
                }
            }
            acc += term;
        }
        let r = ((acc % &mb) + &mb) % &mb;
        u64::try_from(r).expect("residue fits")
    }
}

impl<C: Coefficient> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| self.format_term(e, c))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Integer coefficient formatting used in reports.
pub fn fmt_q(q: &BigRational) -> String {
    if q.is_negative() {
        format!("-{}", format_rational(&-q))
    } else {
        format_rational(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv() -> (QPoly, QPoly) {
        (
            QPoly::var(&["u", "v"], "u", ()).unwrap(),
            QPoly::var(&["u", "v"], "v", ()).unwrap(),
        )
    }

    #[test]
    fn binomial_fifth_power_of_sum_of_squares() {
        let (u, v) = uv();
        let s = u.mul(&u).unwrap().add(&v.mul(&v).unwrap()).unwrap();
        let p = s.pow(5);
        // (u²+v²)⁵ has the six terms C(5,k) u^{2k} v^{10-2k}
        assert_eq!(p.num_terms(), 6);
        for (k, binom) in [1i64, 5, 10, 10, 5, 1].iter().enumerate() {
            let e = [2 * k as u32, 10 - 2 * k as u32];
            assert_eq!(p.coeff(&e), Some(&BigRational::from_integer(BigInt::from(*binom))));
        }
    }

    #[test]
    fn variable_and_ring_mismatch() {
        let (u, _) = uv();
        let x = QPoly::var(&["x"], "x", ()).unwrap();
        assert!(matches!(u.add(&x), Err(PolyError::VariableMismatch(_, _))));
        let ku = u.into_field(&FieldSpec::k());
        let lu = u.into_field(&FieldSpec::l());
        assert_eq!(ku.mul(&lu).unwrap_err(), PolyError::IncompatibleRing);
        assert!(QPoly::var(&["u"], "w", ()).is_err());
    }

    #[test]
    fn substitution_and_coefficients() {
        let vars = ["x", "y"];
        let x = QPoly::var(&vars, "x", ()).unwrap();
        let y = QPoly::var(&vars, "y", ()).unwrap();
        // x^2 + xy with y := 1 - x  ->  x
        let p = x.mul(&x).unwrap().add(&x.mul(&y).unwrap()).unwrap();
        let one = QPoly::constant(&vars, BigRational::one());
        let q = p.substitute("y", &one.sub(&x).unwrap()).unwrap();
        assert_eq!(q, x);
        assert_eq!(p.coefficient_of("x", 1).unwrap(), y);
    }

    #[test]
    fn modular_evaluation() {
        let (u, v) = uv();
        let p = u.mul(&v).unwrap().scale_int(-3);
        assert_eq!(p.eval_mod(&[1, 1], 4), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_poly() -> impl Strategy<Value = QPoly> {
            proptest::collection::vec((-5i64..=5, 0u32..=3, 0u32..=3), 0..5).prop_map(|ts| {
                let mut p = QPoly::zero(&["u", "v"], ());
                for (c, a, b) in ts {
                    p = p.add(&QPoly::from_terms(&["u", "v"], &[(c, &[a, b])])).unwrap();
                }
                p
            })
        }

        proptest! {
            #[test]
            fn mul_commutes(a in small_poly(), b in small_poly()) {
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            }

            #[test]
            fn mul_associates(a in small_poly(), b in small_poly(), c in small_poly()) {
                let left = a.mul(&b).unwrap().mul(&c).unwrap();
                let right = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn eval_is_a_homomorphism(a in small_poly(), b in small_poly(), x in -9i64..9, y in -9i64..9) {
                let prod = a.mul(&b).unwrap().eval_ints(&[x, y]);
                prop_assert_eq!(prod, a.eval_ints(&[x, y]) * b.eval_ints(&[x, y]));
            }
        }
    }
}
