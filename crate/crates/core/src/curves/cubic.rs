//! Cubic models over Q for four squares in progression at offsets
//! `{0, o₁, o₂, o₃}`.
//!
//! With `x₁² = a` and `X = d/a`, the product `∏(1 + oᵢX)` must be a square.
//! Scaling by `M = o₁o₂o₃` (`u = MX`, `v = MY`) gives the monic model
//! `v² = (u + M/o₁)(u + M/o₂)(u + M/o₃)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{gcd_i128, int_nth_root, is_prime, nontrivial_prime_power_exponent};
use crate::error::CurveError;
use crate::numfield::format_rational;

use super::MAX_HEIGHT;

/// Exponent bound for the non-square positions of the family progressions.
const FAMILY_N_MIN: u32 = 7;
/// Mazur: rational torsion has order at most 12.
const MAX_TORSION_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicModelQ {
    pub name: String,
    /// Positions carrying squares, 0-based.
    pub square_positions: Vec<usize>,
    pub scale: i64,
    /// `v² = u³ + Au² + Bu + C`.
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// The model for squares at `positions` (`{0,1,3,4}` or `{0,1,4,5}`).
pub fn family_curve(positions: &[usize]) -> Result<CubicModelQ, CurveError> {
    let offsets: [i64; 3] = match positions {
        [0, 1, 3, 4] => [1, 3, 4],
        [0, 1, 4, 5] => [1, 4, 5],
        _ => return Err(CurveError::UnsupportedFamily(positions.to_vec())),
    };
    let m: i64 = offsets.iter().product();
    let [r1, r2, r3] = offsets.map(|o| m / o);
    let model = CubicModelQ {
        name: format!("E{}{}{}", offsets[0], offsets[1], offsets[2]),
        square_positions: positions.to_vec(),
        scale: m,
        a: r1 + r2 + r3,
        b: r1 * r2 + r1 * r3 + r2 * r3,
        c: r1 * r2 * r3,
    };
    if model.discriminant() == 0 {
        return Err(CurveError::Singular);
    }
    Ok(model)
}

impl CubicModelQ {
    pub fn discriminant(&self) -> i64 {
        let (a, b, c) = (self.a, self.b, self.c);
        -4 * a.pow(3) * c + a * a * b * b + 18 * a * b * c - 4 * b.pow(3) - 27 * c * c
    }

    /// Progression length covered by the model.
    pub fn length(&self) -> usize {
        self.square_positions.last().map_or(0, |p| p + 1)
    }

    fn rhs(&self, u: &BigRational) -> BigRational {
        let k = |n: i64| BigRational::from_integer(BigInt::from(n));
        ((u + k(self.a)) * u + k(self.b)) * u + k(self.c)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { u, v } => v * v == self.rhs(u),
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { u, v } => CurvePoint::Affine { u: u.clone(), v: -v },
        }
    }

    /// Chord and tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (CurvePoint::Affine { u: u1, v: v1 }, CurvePoint::Affine { u: u2, v: v2 }) = (p, q) else {
            return if p.is_infinity() { q.clone() } else { p.clone() };
        };
        let k = |n: i64| BigRational::from_integer(BigInt::from(n));
        let lambda = if u1 != u2 {
            (v2 - v1) / (u2 - u1)
        } else if v1 == v2 && !v1.is_zero() {
            (k(3) * u1 * u1 + k(2 * self.a) * u1 + k(self.b)) / (k(2) * v1)
        } else {
            return CurvePoint::Infinity;
        };
        let u3 = &lambda * &lambda - k(self.a) - u1 - u2;
        let v3 = -(&lambda * (&u3 - u1) + v1);
        CurvePoint::Affine { u: u3, v: v3 }
    }

    /// Order of `p` if it is at most 12, by repeated addition.
    pub fn torsion_order(&self, p: &CurvePoint) -> Option<usize> {
        let mut acc = p.clone();
        for k in 1..=MAX_TORSION_ORDER {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add(&acc, p);
        }
        None
    }

    /// `#E(F_p)` for a prime of good reduction.
    pub fn count_mod(&self, p: u64) -> u64 {
        let pi = p as i64;
        let red = |n: i64| n.rem_euclid(pi) as u64;
        let (a, b, c) = (red(self.a), red(self.b), red(self.c));
        let mut squares = vec![0u64; p as usize];
        for y in 0..p {
            squares[(y * y % p) as usize] += 1;
        }
        let affine: u64 = (0..p)
            .map(|x| squares[(((x + a) * x % p + b) * x % p + c) as usize % p as usize])
            .sum();
        affine + 1
    }

    /// Two smallest odd primes of good reduction.
    fn good_primes(&self) -> [u64; 2] {
        let disc = self.discriminant();
        let mut it = (3..).filter(|&p| is_prime(p) && disc % p as i64 != 0);
        [it.next().unwrap(), it.next().unwrap()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurvePoint {
    Infinity,
    Affine { u: BigRational, v: BigRational },
}

impl CurvePoint {
    pub fn affine(u: i64, v: i64) -> CurvePoint {
        CurvePoint::Affine {
            u: BigRational::from_integer(u.into()),
            v: BigRational::from_integer(v.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { u, v } => write!(f, "({}, {})", format_rational(u), format_rational(v)),
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Infinity => s.serialize_str("infinity"),
            CurvePoint::Affine { u, v } => {
                use serde::ser::SerializeStruct;
                let mut st = s.serialize_struct("CurvePoint", 2)?;
                st.serialize_field("u", &format_rational(u))?;
                st.serialize_field("v", &format_rational(v))?;
                st.end()
            }
        }
    }
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn integer_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    match int_nth_root(n as u128, 2) {
        Ok((r, true)) => Some(r as i128),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionPoint {
    pub point: CurvePoint,
    pub order: usize,
    pub progression: ProgressionCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionOutcome {
    pub curve: String,
    pub equation: String,
    pub discriminant: i64,
    /// `gcd(#E(F_p), #E(F_q))` for the two smallest odd good primes.
    pub order_bound: u64,
    pub points: Vec<TorsionPoint>,
}

impl TorsionOutcome {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Every torsion point fails to give an admissible progression.
    pub fn all_rejected(&self) -> bool {
        self.points.iter().all(|p| !p.progression.rejections.is_empty())
    }
}

/// Full rational torsion via Lutz–Nagell: torsion points are integral with
/// `v = 0` or `v² | disc`.
pub fn torsion_over_q(model: &CubicModelQ) -> TorsionOutcome {
    let disc = model.discriminant() as i128;
    let (a, b, c) = (model.a as i128, model.b as i128, model.c as i128);
    let f = |u: i128| ((u + a) * u + b) * u + c;
    let mut candidates = Vec::new();
    for v in std::iter::once(0).chain(divisors(disc).into_iter().filter(|d| disc % (d * d) == 0)) {
        // integer roots of f(u) - v²
        let constant = c - v * v;
        let roots: Vec<i128> = if constant == 0 {
            let mut r = vec![0];
            r.extend(divisors(b).into_iter().flat_map(|d| [d, -d]));
            r.push(-a);
            r
        } else {
            divisors(constant).into_iter().flat_map(|d| [d, -d]).collect()
        };
        for u in roots {
            if f(u) == v * v {
                candidates.push(CurvePoint::affine(u as i64, v as i64));
                if v != 0 {
                    candidates.push(CurvePoint::affine(u as i64, -v as i64));
                }
            }
        }
    }
    candidates.sort_by(point_order);
    candidates.dedup();

    let mut points = vec![TorsionPoint {
        point: CurvePoint::Infinity,
        order: 1,
        progression: torsion_to_progression(model, &CurvePoint::Infinity),
    }];
    for p in candidates {
        if let Some(order) = model.torsion_order(&p) {
            let progression = torsion_to_progression(model, &p);
            points.push(TorsionPoint { point: p, order, progression });
        }
    }
    let [p, q] = model.good_primes();
    TorsionOutcome {
        curve: model.name.clone(),
        equation: format!("v^2 = u^3 + {}u^2 + {}u + {}", model.a, model.b, model.c),
        discriminant: model.discriminant(),
        order_bound: model.count_mod(p).gcd(&model.count_mod(q)),
        points,
    }
}

fn point_order(x: &CurvePoint, y: &CurvePoint) -> std::cmp::Ordering {
    match (x, y) {
        (CurvePoint::Infinity, CurvePoint::Infinity) => std::cmp::Ordering::Equal,
        (CurvePoint::Infinity, _) => std::cmp::Ordering::Less,
        (_, CurvePoint::Infinity) => std::cmp::Ordering::Greater,
        (CurvePoint::Affine { u: u1, v: v1 }, CurvePoint::Affine { u: u2, v: v2 }) => {
            u1.cmp(u2).then_with(|| v2.cmp(v1))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgressionCheck {
    /// `X = u/M = d/a`.
    #[serde(rename = "X", serialize_with = "ser_opt_rational")]
    pub x: Option<BigRational>,
    pub terms: Vec<String>,
    /// Empty when the point yields an admissible progression.
    pub rejections: Vec<String>,
}

fn ser_opt_rational<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// Recovers the primitive progression `a, a + d, …` with `d/a = u/M`, `a > 0`,
/// and lists every reason it fails to have squares at the model's square
/// positions and nontrivial n-th powers (`n >= 7`) elsewhere.
pub fn torsion_to_progression(model: &CubicModelQ, point: &CurvePoint) -> ProgressionCheck {
    let CurvePoint::Affine { u, .. } = point else {
        return ProgressionCheck {
            x: None,
            terms: Vec::new(),
            rejections: vec!["point at infinity".into()],
        };
    };
    let x = u / BigRational::from_integer(model.scale.into());
    debug_assert_eq!(&x * BigRational::from_integer(model.scale.into()), *u);
    let (num, den) = (x.numer().clone(), x.denom().clone());
    let mut rejections = Vec::new();
    if num.is_zero() {
        rejections.push("constant progression (d = 0)".into());
    }
    if !num.gcd(&den).is_one() {
        rejections.push("not primitive".into());
    }
    let terms: Vec<BigInt> = (0..model.length()).map(|k| &den + &num * BigInt::from(k)).collect();
    for (k, t) in terms.iter().enumerate() {
        let label = format!("a{} = {t}", k + 1);
        let small = t.to_i128();
        if model.square_positions.contains(&k) {
            if small.and_then(integer_sqrt).is_none() {
                rejections.push(format!("{label} is not a square"));
            }
        } else if small.and_then(|v| nontrivial_prime_power_exponent(v, FAMILY_N_MIN)).is_none() {
            rejections.push(format!("{label} is not a nontrivial n-th power with n >= {FAMILY_N_MIN}"));
        }
    }
    ProgressionCheck {
        x: Some(x),
        terms: terms.iter().map(|t| t.to_string()).collect(),
        rejections,
    }
}

/// Affine rational points `u = p/e²`, `v = r/e³` with `gcd(p, e) = 1` and
/// `max(|p|, e²) <= height`, sorted by `u` then descending `v`.
pub fn scan_rational_points_q(model: &CubicModelQ, height: i64) -> Result<Vec<CurvePoint>, CurveError> {
    if !(0..=MAX_HEIGHT).contains(&height) {
        return Err(CurveError::HeightTooLarge(height));
    }
    let (a, b, c) = (model.a as i128, model.b as i128, model.c as i128);
    let mut out = Vec::new();
    let mut e: i128 = 1;
    while e * e <= height as i128 {
        let (e2, e4, e6) = (e * e, e.pow(4), e.pow(6));
        for p in -(height as i128)..=height as i128 {
            if gcd_i128(p, e) != 1 {
                continue;
            }
            let rhs = p.pow(3) + a * p * p * e2 + b * p * e4 + c * e6;
            if let Some(r) = integer_sqrt(rhs) {
                let u = BigRational::new(p.into(), e2.into());
                let e3 = BigInt::from(e.pow(3));
                out.push(CurvePoint::Affine {
                    u: u.clone(),
                    v: BigRational::new(r.into(), e3.clone()),
                });
                if r != 0 {
                    out.push(CurvePoint::Affine {
                        u,
                        v: BigRational::new((-r).into(), e3),
                    });
                }
            }
        }
        e += 1;
    }
    out.sort_by(point_order);
    debug_assert!(out.iter().all(|p| model.contains(p)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_coefficients() {
        let e = family_curve(&[0, 1, 3, 4]).unwrap();
        assert_eq!((e.scale, e.a, e.b, e.c), (12, 19, 96, 144));
        // roots -3, -4, -12
        assert_eq!(e.discriminant(), (1 * 9 * 8i64).pow(2));
        let e = family_curve(&[0, 1, 4, 5]).unwrap();
        assert_eq!((e.scale, e.a, e.b, e.c), (20, 29, 200, 400));
        assert_eq!(e.discriminant(), (1 * 16 * 15i64).pow(2));
        assert!(matches!(family_curve(&[0, 1, 2, 3]), Err(CurveError::UnsupportedFamily(_))));
    }

    #[test]
    fn group_law() {
        let e = family_curve(&[0, 1, 3, 4]).unwrap();
        let p = CurvePoint::affine(0, 12);
        assert!(e.contains(&p));
        let two_p = e.add(&p, &p);
        assert!(e.contains(&two_p));
        assert_eq!(e.torsion_order(&p), Some(4));
        assert_eq!(e.torsion_order(&CurvePoint::affine(-3, 0)), Some(2));
        assert!(e.add(&p, &e.neg(&p)).is_infinity());
    }

    fn affine_set(out: &TorsionOutcome) -> Vec<(i64, i64)> {
        out.points
            .iter()
            .filter_map(|t| match &t.point {
                CurvePoint::Affine { u, v } => Some((u.to_integer().to_i64().unwrap(), v.to_integer().to_i64().unwrap())),
                CurvePoint::Infinity => None,
            })
            .collect()
    }

    #[test]
    fn torsion_of_both_families() {
        let e = family_curve(&[0, 1, 3, 4]).unwrap();
        let t = torsion_over_q(&e);
        assert_eq!(t.order(), 8);
        assert_eq!(t.order_bound % 8, 0);
        let mut got = affine_set(&t);
        got.sort();
        assert_eq!(got, vec![(-12, 0), (-6, -6), (-6, 6), (-4, 0), (-3, 0), (0, -12), (0, 12)]);
        assert!(t.all_rejected());

        let e = family_curve(&[0, 1, 4, 5]).unwrap();
        let t = torsion_over_q(&e);
        assert_eq!(t.order(), 8);
        let mut got = affine_set(&t);
        got.sort();
        assert_eq!(got, vec![(-20, 0), (-8, -12), (-8, 12), (-5, 0), (-4, 0), (0, -20), (0, 20)]);
        assert!(t.all_rejected());
    }

    #[test]
    fn progression_recovery() {
        let e = family_curve(&[0, 1, 3, 4]).unwrap();
        // u = -3: X = -1/4, progression 4, 3, 2, 1, 0
        let chk = torsion_to_progression(&e, &CurvePoint::affine(-3, 0));
        assert_eq!(chk.terms, vec!["4", "3", "2", "1", "0"]);
        assert_eq!(
            chk.rejections,
            vec!["a2 = 3 is not a square", "a3 = 2 is not a nontrivial n-th power with n >= 7"]
        );
        let chk = torsion_to_progression(&e, &CurvePoint::affine(0, 12));
        assert!(chk.rejections[0].starts_with("constant"));
    }

    #[test]
    fn scan_finds_only_torsion() {
        for pos in [[0, 1, 3, 4], [0, 1, 4, 5]] {
            let e = family_curve(&pos).unwrap();
            let pts = scan_rational_points_q(&e, 200).unwrap();
            let torsion: Vec<CurvePoint> = torsion_over_q(&e).points.into_iter().map(|t| t.point).skip(1).collect();
            assert_eq!(pts, torsion);
        }
    }
}
