//! Rational-point computations for the curves behind the pruning rules.
//!
//! Quartic models `λY² = c₄X⁴ + … + c₀` are scanned over rational `X` of
//! bounded height with `Y` in the number field. Two cubic models over Q get
//! exact torsion via Lutz–Nagell. Scans are consistency evidence only: they
//! cannot rule out points of larger height.

mod cubic;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::CurveError;
use crate::numfield::{format_rational, is_square, FieldElement, FieldSpec, ResidueWitness, SquareCertificate, SquareTest};

pub use cubic::{
    family_curve, scan_rational_points_q, torsion_over_q, torsion_to_progression, CubicModelQ, CurvePoint,
    ProgressionCheck, TorsionOutcome, TorsionPoint,
};

pub const MAX_HEIGHT: i64 = 10_000;
/// Split primes used by the quartic sieve.
const SIEVE_PRIMES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceLevel {
    /// Exact substitution into the model.
    Verified,
    /// Bounded search.
    Scan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticModel {
    pub name: String,
    pub field: Arc<FieldSpec>,
    /// `c₀, …, c₄`.
    pub coeffs: Vec<FieldElement>,
    pub lambda: FieldElement,
}

impl QuarticModel {
    /// `α⁴X⁴ + α³X³ + α²X² + αX + 1 = (α-1)Y²` over `Q(α)`, `α⁵ = 2`.
    pub fn c1() -> QuarticModel {
        let k = FieldSpec::k();
        let a = FieldElement::generator(&k);
        QuarticModel {
            name: "C1".into(),
            coeffs: (0..5).map(|i| a.pow(i)).collect(),
            lambda: FieldElement::from_ints(&k, &[-1, 1]),
            field: k,
        }
    }

    /// `α⁴X⁴ - α³X³ + α²X² - αX + 1 = (α⁴-α³+α²-α+1)Y²`.
    pub fn c2() -> QuarticModel {
        let k = FieldSpec::k();
        let a = FieldElement::generator(&k);
        let minus_a = -&a;
        QuarticModel {
            name: "C2".into(),
            coeffs: (0..5).map(|i| minus_a.pow(i)).collect(),
            lambda: FieldElement::from_ints(&k, &[1, -1, 1, -1, 1]),
            field: k,
        }
    }

    /// `X⁴ + (8β-12)X³ + (16β-30)X² + (8β-12)X + 1 = Y²` over `Q(β)`,
    /// `β² = β + 1`.
    pub fn c3() -> QuarticModel {
        let l = FieldSpec::l();
        let e = |c: i64, b: i64| FieldElement::from_ints(&l, &[c, b]);
        QuarticModel {
            name: "C3".into(),
            coeffs: vec![e(1, 0), e(-12, 8), e(-30, 16), e(-12, 8), e(1, 0)],
            lambda: FieldElement::one(&l),
            field: l,
        }
    }

    pub fn by_name(name: &str) -> Option<QuarticModel> {
        match name.to_ascii_uppercase().as_str() {
            "C1" => Some(QuarticModel::c1()),
            "C2" => Some(QuarticModel::c2()),
            "C3" => Some(QuarticModel::c3()),
            _ => None,
        }
    }

    /// `Σ cᵢ Xⁱ`.
    pub fn quartic(&self, x: &BigRational) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::zero(&self.field), |acc, c| &acc.scale(x) + c)
    }

    /// Homogenized `F(p, q) = Σ cᵢ pⁱ q⁴⁻ⁱ`.
    pub fn homogeneous(&self, p: &BigInt, q: &BigInt) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = p.pow(i as u32) * q.pow(4 - i as u32);
            acc = &acc + &c.scale(&BigRational::from_integer(m));
        }
        acc
    }

    /// Exact check of `λY² = quartic(X)`.
    pub fn contains(&self, x: &BigRational, y: &FieldElement) -> bool {
        y.spec() == &self.field && &(&self.lambda * y) * y == self.quartic(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lift {
    /// `Y` (sign-normalized) and `-Y`; equal when `Y = 0`.
    Points(FieldElement, FieldElement),
    NonSquare(ResidueWitness),
}

/// Solves `λY² = quartic(X)` for `Y` in the field.
pub fn quartic_lift(model: &QuarticModel, x: &BigRational) -> Result<Lift, CurveError> {
    let value = model.quartic(x).div(&model.lambda)?;
    match is_square(&value) {
        SquareTest::Certified(SquareCertificate::Root(y)) => {
            let y = y.canonical_sign();
            let neg = -&y;
            Ok(Lift::Points(y, neg))
        }
        SquareTest::Certified(SquareCertificate::NonResidue(w)) => Ok(Lift::NonSquare(w)),
        SquareTest::Undetermined => Err(CurveError::Undetermined(value.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticPoint {
    pub x: BigRational,
    pub y: FieldElement,
}

impl Serialize for QuarticPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuarticPoint", 2)?;
        st.serialize_field("X", &format_rational(&self.x))?;
        let coords: Vec<String> = self.y.coords().iter().map(format_rational).collect();
        st.serialize_field("Y", &coords)?;
        st.end()
    }
}

/// Per-prime images used to reject most `X` without exact arithmetic.
struct Sieve {
    /// `(p, [c₀..c₄ mod 𝔭], λ mod 𝔭)` for degree-one primes `𝔭 = (p, θ - r)`.
    rows: Vec<(u64, [u64; 5], u64)>,
}

impl Sieve {
    fn new(model: &QuarticModel) -> Sieve {
        let mut rows = Vec::new();
        'outer: for (p, roots) in model.field.split_primes() {
            if *p < 3 {
                continue;
            }
            for &r in roots {
                let mut cs = [0u64; 5];
                for (i, c) in model.coeffs.iter().enumerate() {
                    match c.reduce_mod(*p, r) {
                        Some(v) => cs[i] = v,
                        None => continue 'outer,
                    }
                }
                match model.lambda.reduce_mod(*p, r) {
                    Some(l) if l != 0 => rows.push((*p, cs, l)),
                    _ => {}
                }
                if rows.len() >= SIEVE_PRIMES {
                    break 'outer;
                }
            }
        }
        Sieve { rows }
    }

    /// False when `F(p, q)·λ` is a nonresidue at some sieve prime.
    fn passes(&self, num: i64, den: i64) -> bool {
        self.rows.iter().all(|(p, cs, l)| {
            let p = *p;
            let a = num.rem_euclid(p as i64) as u64;
            let b = den.rem_euclid(p as i64) as u64;
            let mut val = 0u64;
            let mut apow = 1u64;
            let mut bpows = [1u64; 5];
            for i in 1..5 {
                bpows[i] = bpows[i - 1] * b % p;
            }
            for i in 0..5 {
                val = (val + cs[i] * apow % p * bpows[4 - i]) % p;
                apow = apow * a % p;
            }
            let v = val * l % p;
            v == 0 || crate::arith::pow_mod(v, (p - 1) / 2, p) == 1
        })
    }
}

/// Every `X = p/q` in lowest terms with `max(|p|, q) ≤ height` for which
/// `λY² = quartic(X)` has a solution, each with both signs of `Y`, sorted
/// by `X`.
pub fn scan_quartic(model: &QuarticModel, height: i64) -> Result<Vec<QuarticPoint>, CurveError> {
    if !(0..=MAX_HEIGHT).contains(&height) {
        return Err(CurveError::HeightTooLarge(height));
    }
    let sieve = Sieve::new(model);
    let candidates: Vec<(i64, i64)> = (1..=height.max(1))
        .into_par_iter()
        .flat_map_iter(|q| {
            let sieve = &sieve;
            (-height..=height)
                .filter(move |p| p.gcd(&q) == 1 && (q == 1 || *p != 0))
                .filter(move |&p| sieve.passes(p, q))
                .map(move |p| (p, q))
        })
        .collect();
    let lifted: Vec<Result<Vec<QuarticPoint>, CurveError>> = candidates
        .into_par_iter()
        .map(|(p, q)| {
            let x = BigRational::new(BigInt::from(p), BigInt::from(q));
            Ok(match quartic_lift(model, &x)? {
                Lift::Points(y, neg) if y == neg => vec![QuarticPoint { x, y }],
                Lift::Points(y, neg) => vec![
                    QuarticPoint { x: x.clone(), y },
                    QuarticPoint { x, y: neg },
                ],
                Lift::NonSquare(_) => Vec::new(),
            })
        })
        .collect();
    let mut out = Vec::new();
    for r in lifted {
        out.extend(r?);
    }
    // stable: the sign-normalized Y stays first
    out.sort_by(|a, b| a.x.cmp(&b.x));
    Ok(out)
}

/// Distinct `X` values of a point list, in order.
pub fn x_values(points: &[QuarticPoint]) -> Vec<BigRational> {
    let mut xs: Vec<BigRational> = points.iter().map(|p| p.x.clone()).collect();
    xs.dedup();
    xs
}

/// Points each quartic is known to carry, with the positive `Y`.
pub fn claimed_points(model: &QuarticModel) -> Vec<QuarticPoint> {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let f = &model.field;
    match model.name.as_str() {
        "C1" => vec![
            QuarticPoint {
                x: q(1, 1),
                y: FieldElement::from_ints(f, &[1, 1, 1, 1, 1]),
            },
            QuarticPoint {
                x: q(-1, 3),
                y: FieldElement::from_ints(f, &[5, 3, -1, 5, 3]).scale(&q(1, 9)),
            },
        ],
        "C2" => vec![QuarticPoint {
            x: q(1, 1),
            y: FieldElement::one(f),
        }],
        "C3" => vec![QuarticPoint {
            x: BigRational::zero(),
            y: FieldElement::one(f),
        }],
        _ => Vec::new(),
    }
}

/// `X` values the quartic scan is expected to return.
pub fn claimed_x_values(model: &QuarticModel) -> Vec<BigRational> {
    let mut xs: Vec<BigRational> = claimed_points(model).into_iter().map(|p| p.x).collect();
    xs.sort();
    xs
}

#[cfg(test)]
fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claimed_points_lie_on_their_curves() {
        for m in [QuarticModel::c1(), QuarticModel::c2(), QuarticModel::c3()] {
            for pt in claimed_points(&m) {
                assert!(m.contains(&pt.x, &pt.y), "{} at {}", m.name, pt.x);
                assert!(m.contains(&pt.x, &-&pt.y));
            }
        }
    }

    #[test]
    fn lift_examples() {
        let c1 = QuarticModel::c1();
        let Lift::Points(y, _) = quartic_lift(&c1, &rational(1, 1)).unwrap() else { panic!() };
        assert_eq!(y, FieldElement::from_ints(&c1.field, &[1, 1, 1, 1, 1]));
        let Lift::Points(y, _) = quartic_lift(&c1, &rational(-1, 3)).unwrap() else { panic!() };
        assert_eq!(y, FieldElement::from_ints(&c1.field, &[5, 3, -1, 5, 3]).scale(&rational(1, 9)));

        let c2 = QuarticModel::c2();
        let Lift::Points(y, _) = quartic_lift(&c2, &rational(1, 1)).unwrap() else { panic!() };
        assert_eq!(y, FieldElement::one(&c2.field));

        let c3 = QuarticModel::c3();
        let Lift::Points(y, _) = quartic_lift(&c3, &rational(0, 1)).unwrap() else { panic!() };
        assert_eq!(y, FieldElement::one(&c3.field));
        // 1 + (8β-12) + (16β-30) + (8β-12) + 1 = 32β - 52
        assert_eq!(c3.quartic(&rational(1, 1)), FieldElement::from_ints(&c3.field, &[-52, 32]));
        let Lift::NonSquare(w) = quartic_lift(&c3, &rational(1, 1)).unwrap() else { panic!() };
        assert!(w.verify(&FieldElement::from_ints(&c3.field, &[-52, 32])));
    }

    #[test]
    fn homogenization_matches() {
        let m = QuarticModel::c1();
        let (p, q) = (BigInt::from(-7), BigInt::from(3));
        let lhs = m.homogeneous(&p, &q);
        let rhs = m.quartic(&rational(-7, 3)).scale(&rational(81, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sieve_never_rejects_a_lift() {
        for m in [QuarticModel::c1(), QuarticModel::c2(), QuarticModel::c3()] {
            let s = Sieve::new(&m);
            assert!(s.rows.len() >= 20);
            for pt in claimed_points(&m) {
                let (n, d) = (pt.x.numer().try_into().unwrap(), pt.x.denom().try_into().unwrap());
                assert!(s.passes(n, d));
            }
        }
    }

    #[test]
    fn small_scans() {
        let xs = x_values(&scan_quartic(&QuarticModel::c1(), 30).unwrap());
        assert_eq!(xs, vec![rational(-1, 3), rational(1, 1)]);
        let pts = scan_quartic(&QuarticModel::c3(), 30).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(matches!(scan_quartic(&QuarticModel::c2(), 10_001), Err(CurveError::HeightTooLarge(_))));
    }

    #[test]
    fn point_json() {
        let pt = &claimed_points(&QuarticModel::c1())[1];
        let v = serde_json::to_value(pt).unwrap();
        assert_eq!(v["X"], "-1/3");
        assert_eq!(v["Y"][0], "5/9");
    }
}
