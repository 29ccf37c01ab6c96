//! Exact verification of the polynomial identities that the pruning rules
//! and curve models rely on.
//!
//! Each check expands both sides symbolically and compares them term by
//! term. As a redundant second route, both sides are also evaluated at 50
//! pseudo-random integer points from their factored forms.

pub mod poly;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{IdentityError, PolyError};
use crate::numfield::{FieldElement, FieldSpec};
pub use poly::{Coefficient, FieldPoly, MultiPoly, QPoly};

pub const SPOT_CHECKS: usize = 50;
const SPOT_SEED: u64 = 0x5eed_0f_1d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityStatus {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub statement: String,
    pub status: IdentityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.status == IdentityStatus::Holds
    }
}

fn report(id: &str, statement: &str, counterexample: Option<String>) -> IdentityReport {
    IdentityReport {
        id: id.to_string(),
        statement: statement.to_string(),
        status: if counterexample.is_none() {
            IdentityStatus::Holds
        } else {
            IdentityStatus::Fails
        },
        counterexample,
    }
}

/// First offending monomial of `lhs - rhs`, if any.
fn symbolic_mismatch<C: Coefficient>(lhs: &MultiPoly<C>, rhs: &MultiPoly<C>) -> Result<Option<String>, PolyError> {
    let diff = lhs.sub(rhs)?;
    let first = diff
        .terms()
        .next()
        .map(|(e, c)| format!("lhs - rhs has term {}", diff.format_term(e, c)));
    Ok(first)
}

/// Runs `check` at deterministic random points in `[-range, range]^arity`.
fn spot_mismatch(arity: usize, range: i64, check: impl Fn(&[i64]) -> bool) -> Option<String> {
    let mut rng = StdRng::seed_from_u64(SPOT_SEED);
    for _ in 0..SPOT_CHECKS {
        let pt: Vec<i64> = (0..arity).map(|_| rng.gen_range(-range..=range)).collect();
        if !check(&pt) {
            return Some(format!("numeric mismatch at {pt:?}"));
        }
    }
    None
}

fn combine(symbolic: Result<Option<String>, PolyError>, spot: impl FnOnce() -> Option<String>) -> Option<String> {
    match symbolic {
        Err(e) => Some(e.to_string()),
        Ok(Some(m)) => Some(m),
        Ok(None) => spot(),
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn alpha_pows() -> Vec<FieldElement> {
    let k = FieldSpec::k();
    let a = FieldElement::generator(&k);
    (0..5).map(|i| a.pow(i)).collect()
}

/// `(α^i as constant) · b^e1 · c^e2` over K.
fn k_term(vars: &[&str], alpha_exp: u32, sign: i64, exps: &[u32]) -> FieldPoly {
    let a = &alpha_pows()[alpha_exp as usize];
    FieldPoly::monomial(vars, exps, a.scale(&q(sign)))
}

fn k_sum(terms: &[FieldPoly]) -> FieldPoly {
    terms[1..]
        .iter()
        .fold(terms[0].clone(), |acc, t| acc.add(t).expect("same ring"))
}

/// The quartic cofactor `Σ (±1)^i α^{4-i} s^{4-i} t^i` of `α s ∓ t`.
fn k_quartic(vars: &[&str], alternating: bool) -> FieldPoly {
    let terms: Vec<FieldPoly> = (0..=4u32)
        .map(|i| {
            let sign = if alternating && i % 2 == 1 { -1 } else { 1 };
            k_term(vars, 4 - i, sign, &[4 - i, i])
        })
        .collect();
    k_sum(&terms)
}

/// Value of the quartic cofactor at integers, computed directly in K.
fn k_quartic_value(s: i64, t: i64, alternating: bool) -> FieldElement {
    let k = FieldSpec::k();
    let pows = alpha_pows();
    let mut acc = FieldElement::zero(&k);
    for i in 0..=4u32 {
        let sign = if alternating && i % 2 == 1 { -1 } else { 1 };
        let coeff = sign * s.pow(4 - i) * t.pow(i);
        acc = &acc + &pows[(4 - i) as usize].scale(&q(coeff));
    }
    acc
}

/// Checks `(αb - c)·Σ = 2b⁵ - c⁵` and `(αx₁ + x₄)·Σ' = 2x₁⁵ + x₄⁵` over K.
pub fn verify_factorizations() -> Vec<IdentityReport> {
    let k = FieldSpec::k();
    let mut out = Vec::new();

    let vars = ["b", "c"];
    let linear = k_term(&vars, 1, 1, &[1, 0]).add(&k_term(&vars, 0, -1, &[0, 1])).unwrap();
    let lhs = linear.mul(&k_quartic(&vars, false)).unwrap();
    let rhs = QPoly::from_terms(&vars, &[(2, &[5, 0]), (-1, &[0, 5])]).into_field(&k);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 60, |p| {
            let (b, c) = (p[0], p[1]);
            let lin = &alpha_pows()[1].scale(&q(b)) - &FieldElement::from_int(&k, c);
            let prod = &lin * &k_quartic_value(b, c, false);
            prod == FieldElement::from_int(&k, 2 * b.pow(5) - c.pow(5))
        })
    });
    out.push(report(
        "fact",
        "(αb - c)(α⁴b⁴ + α³b³c + α²b²c² + αbc³ + c⁴) = 2b⁵ - c⁵ in K[b,c]",
        bad,
    ));

    let vars = ["x1", "x4"];
    let linear = k_term(&vars, 1, 1, &[1, 0]).add(&k_term(&vars, 0, 1, &[0, 1])).unwrap();
    let lhs = linear.mul(&k_quartic(&vars, true)).unwrap();
    let rhs = QPoly::from_terms(&vars, &[(2, &[5, 0]), (1, &[0, 5])]).into_field(&k);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 60, |p| {
            let (x1, x4) = (p[0], p[1]);
            let lin = &alpha_pows()[1].scale(&q(x1)) + &FieldElement::from_int(&k, x4);
            let prod = &lin * &k_quartic_value(x1, x4, true);
            prod == FieldElement::from_int(&k, 2 * x1.pow(5) + x4.pow(5))
        })
    });
    out.push(report(
        "fact2",
        "(αx₁ + x₄)(α⁴x₁⁴ - α³x₁³x₄ + α²x₁²x₄² - αx₁x₄³ + x₄⁴) = 2x₁⁵ + x₄⁵ in K[x₁,x₄]",
        bad,
    ));
    out
}

const UV: [&str; 2] = ["u", "v"];

/// `x₂(u,v)` of the square-plus-square parametrization.
pub fn param_x2() -> QPoly {
    QPoly::from_terms(
        &UV,
        &[
            (1, &[5, 0]),
            (-5, &[4, 1]),
            (-10, &[3, 2]),
            (10, &[2, 3]),
            (5, &[1, 4]),
            (-1, &[0, 5]),
        ],
    )
}

/// `x₄(u,v)` of the square-plus-square parametrization.
pub fn param_x4() -> QPoly {
    QPoly::from_terms(
        &UV,
        &[
            (1, &[5, 0]),
            (5, &[4, 1]),
            (-10, &[3, 2]),
            (-10, &[2, 3]),
            (5, &[1, 4]),
            (1, &[0, 5]),
        ],
    )
}

/// The octic form `f(u,v)`.
pub fn f_uv() -> QPoly {
    QPoly::from_terms(
        &UV,
        &[
            (1, &[8, 0]),
            (-16, &[7, 1]),
            (-60, &[6, 2]),
            (16, &[5, 3]),
            (134, &[4, 4]),
            (16, &[3, 5]),
            (-60, &[2, 6]),
            (-16, &[1, 7]),
            (1, &[0, 8]),
        ],
    )
}

fn param_x2_value(u: i128, v: i128) -> i128 {
    u.pow(5) - 5 * u.pow(4) * v - 10 * u.pow(3) * v.pow(2) + 10 * u.pow(2) * v.pow(3) + 5 * u * v.pow(4) - v.pow(5)
}

fn param_x4_value(u: i128, v: i128) -> i128 {
    u.pow(5) + 5 * u.pow(4) * v - 10 * u.pow(3) * v.pow(2) - 10 * u.pow(2) * v.pow(3) + 5 * u * v.pow(4) + v.pow(5)
}

pub fn f_value(u: i128, v: i128) -> i128 {
    u.pow(8) - 16 * u.pow(7) * v - 60 * u.pow(6) * v.pow(2) + 16 * u.pow(5) * v.pow(3) + 134 * u.pow(4) * v.pow(4)
        + 16 * u.pow(3) * v.pow(5)
        - 60 * u.pow(2) * v.pow(6)
        - 16 * u * v.pow(7)
        + v.pow(8)
}

fn u2_plus_v2() -> QPoly {
    QPoly::from_terms(&UV, &[(1, &[2, 0]), (1, &[0, 2])])
}

/// `x₂² + x₄² = 2(u² + v²)⁵`.
pub fn verify_square_sum_param() -> IdentityReport {
    let (x2, x4) = (param_x2(), param_x4());
    let lhs = x2.mul(&x2).unwrap().add(&x4.mul(&x4).unwrap()).unwrap();
    let rhs = u2_plus_v2().pow(5).scale_int(2);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 50, |p| {
            let (u, v) = (p[0] as i128, p[1] as i128);
            let (a, b) = (param_x2_value(u, v), param_x4_value(u, v));
            a * a + b * b == 2 * (u * u + v * v).pow(5)
        })
    });
    report("square_sum_param", "x₂(u,v)² + x₄(u,v)² = 2(u² + v²)⁵", bad)
}

/// `3x₂² - x₄² = 2(u² - 4uv + v²) f(u,v)`.
pub fn verify_fact3() -> IdentityReport {
    let (x2, x4) = (param_x2(), param_x4());
    let lhs = x2.mul(&x2).unwrap().scale_int(3).sub(&x4.mul(&x4).unwrap()).unwrap();
    let quad = QPoly::from_terms(&UV, &[(1, &[2, 0]), (-4, &[1, 1]), (1, &[0, 2])]);
    let rhs = quad.mul(&f_uv()).unwrap().scale_int(2);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 40, |p| {
            let (u, v) = (p[0] as i128, p[1] as i128);
            let (a, b) = (param_x2_value(u, v), param_x4_value(u, v));
            3 * a * a - b * b == 2 * (u * u - 4 * u * v + v * v) * f_value(u, v)
        })
    });
    report("fact3", "3x₂(u,v)² - x₄(u,v)² = 2(u² - 4uv + v²)f(u,v)", bad)
}

/// Coefficients `(1, c₃, c₂, c₃, 1)` of a palindromic quartic over L where
/// `c₃ = s₃β + t₃`, `c₂ = s₂β + t₂`.
fn l_palindromic(c3: (i64, i64), c2: (i64, i64)) -> FieldPoly {
    let l = FieldSpec::l();
    let elt = |(s, t): (i64, i64)| FieldElement::from_ints(&l, &[t, s]);
    let one = FieldElement::one(&l);
    let terms = [
        FieldPoly::monomial(&UV, &[4, 0], one.clone()),
        FieldPoly::monomial(&UV, &[3, 1], elt(c3)),
        FieldPoly::monomial(&UV, &[2, 2], elt(c2)),
        FieldPoly::monomial(&UV, &[1, 3], elt(c3)),
        FieldPoly::monomial(&UV, &[0, 4], one),
    ];
    terms[1..].iter().fold(terms[0].clone(), |a, t| a.add(t).unwrap())
}

/// `g(u,v)` over L.
pub fn g_uv() -> FieldPoly {
    l_palindromic((8, -12), (16, -30))
}

/// `h(u,v)` over L, the conjugate of `g`.
pub fn h_uv() -> FieldPoly {
    l_palindromic((-8, -4), (-16, -14))
}

/// `f = g·h` in `L[u,v]`.
pub fn verify_f_split_over_l() -> IdentityReport {
    let l = FieldSpec::l();
    let lhs = g_uv().mul(&h_uv()).unwrap();
    let rhs = f_uv().into_field(&l);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 40, |p| {
            let (u, v) = (p[0], p[1]);
            let quartic = |c3: [i64; 2], c2: [i64; 2]| {
                let c3 = FieldElement::from_ints(&l, &[c3[1], c3[0]]);
                let c2 = FieldElement::from_ints(&l, &[c2[1], c2[0]]);
                let ends = FieldElement::from_int(&l, u.pow(4) + v.pow(4));
                &(&ends + &c3.scale(&q(u.pow(3) * v + u * v.pow(3)))) + &c2.scale(&q(u * u * v * v))
            };
            let g = quartic([8, -12], [16, -30]);
            let h = quartic([-8, -4], [-16, -14]);
            (&g * &h).as_rational() == Some(BigRational::from_integer(BigInt::from(f_value(u as i128, v as i128))))
        })
    });
    report(
        "f_split_L",
        "f(u,v) = g(u,v)h(u,v) with g = (1, 8β-12, 16β-30, 8β-12, 1), h = (1, -8β-4, -16β-14, -8β-4, 1)",
        bad,
    )
}

/// Identities behind the `X³ + Y³ = 2Zⁿ` argument, with `P = Uⁿ` and
/// `Q = Vⁿ` treated as atoms. `n` is only used for the numeric checks.
pub fn verify_discriminant_33n(n: u32) -> Vec<IdentityReport> {
    let mut out = Vec::new();

    let xy = ["X", "Y"];
    let x = QPoly::var(&xy, "X", ()).unwrap();
    let y = QPoly::var(&xy, "Y", ()).unwrap();
    let quad = QPoly::from_terms(&xy, &[(1, &[2, 0]), (-1, &[1, 1]), (1, &[0, 2])]);
    let lhs = x.add(&y).unwrap().mul(&quad).unwrap();
    let rhs = QPoly::from_terms(&xy, &[(1, &[3, 0]), (1, &[0, 3])]);
    let bad = combine(symbolic_mismatch(&lhs, &rhs), || {
        spot_mismatch(2, 1000, |p| {
            let (a, b) = (p[0] as i128, p[1] as i128);
            (a + b) * (a * a - a * b + b * b) == a.pow(3) + b.pow(3)
        })
    });
    out.push(report("disc33n.entry", "(X + Y)(X² - XY + Y²) = X³ + Y³", bad));

    // X + Y = 2P and X² - XY + Y² = Q combine to f(X) = 0
    let vars = ["X", "P", "Q"];
    let xv = QPoly::var(&vars, "X", ()).unwrap();
    let pv = QPoly::var(&vars, "P", ()).unwrap();
    let qv = QPoly::var(&vars, "Q", ()).unwrap();
    let y_sub = pv.scale_int(2).sub(&xv).unwrap();
    let f_x = QPoly::from_terms(&vars, &[(3, &[2, 0, 0]), (-6, &[1, 1, 0]), (4, &[0, 2, 0]), (-1, &[0, 0, 1])]);
    let combined = xv
        .mul(&xv)
        .unwrap()
        .sub(&xv.mul(&y_sub).unwrap())
        .unwrap()
        .add(&y_sub.mul(&y_sub).unwrap())
        .unwrap()
        .sub(&qv)
        .unwrap();
    let bad = combine(symbolic_mismatch(&combined, &f_x), || {
        spot_mismatch(3, 6, |p| {
            let (xx, uu, vv) = (p[0] as i128, p[1] as i128, p[2] as i128);
            let (pp, qq) = (uu.pow(n), vv.pow(n));
            let yy = 2 * pp - xx;
            xx * xx - xx * yy + yy * yy - qq == 3 * xx * xx - 6 * pp * xx + 4 * pp * pp - qq
        })
    });
    out.push(report(
        "disc33n.combine",
        "X + Y = 2Uⁿ, X² - XY + Y² = Vⁿ give f(X) = 3X² - 6UⁿX + 4U²ⁿ - Vⁿ = 0",
        bad,
    ));

    // disc(f) = b² - 4ac with coefficients read off f_x
    let a = f_x.coefficient_of("X", 2).unwrap();
    let b = f_x.coefficient_of("X", 1).unwrap();
    let c = f_x.coefficient_of("X", 0).unwrap();
    let disc = b.mul(&b).unwrap().sub(&a.mul(&c).unwrap().scale_int(4)).unwrap();
    let expected = qv.sub(&pv.mul(&pv).unwrap()).unwrap().scale_int(12);
    let bad = combine(symbolic_mismatch(&disc, &expected), || {
        spot_mismatch(2, 6, |p| {
            let (uu, vv) = (p[0] as i128, p[1] as i128);
            let (pp, qq) = (uu.pow(n), vv.pow(n));
            let d = 36 * pp * pp - 12 * (4 * pp * pp - qq);
            d == 12 * (qq - pp * pp)
        })
    });
    out.push(report("disc33n.discriminant", "disc f = 36U²ⁿ - 12(4U²ⁿ - Vⁿ) = 12(Vⁿ - U²ⁿ)", bad));

    // 12t = s² forces 6 | s, then t = 3(s/6)²
    let forced = (0..6u32).all(|s| (s * s) % 12 != 0 || s % 6 == 0);
    let w = ["W"];
    let wv = QPoly::var(&w, "W", ()).unwrap();
    let s6 = wv.scale_int(6);
    let lhs = s6.mul(&s6).unwrap();
    let rhs = wv.mul(&wv).unwrap().scale_int(3).scale_int(12);
    let bad = if forced {
        symbolic_mismatch(&lhs, &rhs).unwrap_or_else(|e| Some(e.to_string()))
    } else {
        Some("some s with s² ≡ 0 (mod 12) has 6 ∤ s".to_string())
    };
    out.push(report(
        "disc33n.square",
        "s² = 12(Vⁿ - U²ⁿ) forces s = 6W and Vⁿ - U²ⁿ = 3W²",
        bad,
    ));
    out
}

/// AP relation `(k-j)aᵢ - (k-i)aⱼ + (j-i)aₖ = 0` in `Q[a₁, d]`.
fn ap_relation(i: i64, j: i64, k: i64) -> QPoly {
    let vars = ["a1", "d"];
    let term = |idx: i64| QPoly::from_terms(&vars, &[(1, &[1, 0]), (idx - 1, &[0, 1])]);
    term(i)
        .scale_int(k - j)
        .sub(&term(j).scale_int(k - i))
        .unwrap()
        .add(&term(k).scale_int(j - i))
        .unwrap()
}

/// Linear relations among the terms `aᵢ = a₁ + (i-1)d`.
pub fn verify_ap_linear_relations() -> Vec<IdentityReport> {
    let vars = ["a1", "d"];
    let zero = QPoly::zero(&vars, ());
    let mut out = Vec::new();

    let mut bad = None;
    'outer: for i in 1..=7 {
        for j in i + 1..=7 {
            for k in j + 1..=7 {
                if let Some(m) = symbolic_mismatch(&ap_relation(i, j, k), &zero).unwrap() {
                    bad = Some(format!("({i},{j},{k}): {m}"));
                    break 'outer;
                }
            }
        }
    }
    let bad = bad.or_else(|| {
        spot_mismatch(2, 1_000_000, |p| {
            let a = |idx: i64| p[0] as i128 + (idx as i128 - 1) * p[1] as i128;
            (1..=7i64).all(|i| {
                (i + 1..=7).all(|j| {
                    (j + 1..=7).all(|k| (k - j) as i128 * a(i) - (k - i) as i128 * a(j) + (j - i) as i128 * a(k) == 0)
                })
            })
        })
    });
    out.push(report(
        "ap.universal",
        "(k-j)aᵢ - (k-i)aⱼ + (j-i)aₖ = 0 for all 1 ≤ i < j < k ≤ 7",
        bad,
    ));

    // instances written with explicit coefficients (a1, a2, ..., a7)
    let instances: [(&str, &str, [i64; 7]); 4] = [
        ("ap.1_2_3", "a₁ + a₃ = 2a₂", [1, -2, 1, 0, 0, 0, 0]),
        ("ap.1_2_4", "2a₁ - 3a₂ + a₄ = 0", [2, -3, 0, 1, 0, 0, 0]),
        ("ap.1_4_5", "a₁ - 4a₄ + 3a₅ = 0", [1, 0, 0, -4, 3, 0, 0]),
        ("ap.2_3_4", "a₂ + a₄ = 2a₃", [0, 1, -2, 1, 0, 0, 0]),
    ];
    for (id, statement, coeffs) in instances {
        let combo = coeffs.iter().enumerate().fold(zero.clone(), |acc, (idx, &c)| {
            let t = QPoly::from_terms(&vars, &[(1, &[1, 0]), (idx as i64, &[0, 1])]);
            acc.add(&t.scale_int(c)).unwrap()
        });
        let bad = symbolic_mismatch(&combo, &zero).unwrap();
        out.push(report(id, statement, bad));
    }
    out
}

/// Every identity check, sorted by id.
pub fn run_suite() -> Vec<IdentityReport> {
    let jobs: Vec<fn() -> Vec<IdentityReport>> = vec![
        verify_factorizations,
        || vec![verify_square_sum_param()],
        || vec![verify_fact3()],
        || vec![verify_f_split_over_l()],
        || verify_discriminant_33n(5),
        verify_ap_linear_relations,
    ];
    let mut all: Vec<IdentityReport> = jobs.par_iter().flat_map(|job| job()).collect();
    all.sort_by(|a, b| a.id.cmp(&b.id));
    all
}

/// Fails on the first identity that does not hold.
pub fn ensure_all_hold(reports: &[IdentityReport]) -> Result<(), IdentityError> {
    match reports.iter().find(|r| !r.holds()) {
        Some(r) => Err(IdentityError::Mismatch {
            id: r.id.clone(),
            counterexample: r.counterexample.clone().unwrap_or_default(),
        }),
        None => Ok(()),
    }
}
