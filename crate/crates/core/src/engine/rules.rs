use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use super::{Alphabet, AlphabetKind, ExponentSymbol, Pattern};
use crate::arith::is_prime;
use crate::error::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Fixed(u32),
    /// The rule's prime exponent `n`, shared by every `Var` slot.
    Var,
}

/// `c₀·X^{s₀} + c₁·Y^{s₁} = c₂·Z^{s₂}` with positive coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Template {
    pub coeffs: [i64; 3],
    pub slots: [Slot; 3],
}

impl Template {
    /// Coefficient of each slot once everything is moved to the left.
    fn signed(&self) -> [i64; 3] {
        [self.coeffs[0], self.coeffs[1], -self.coeffs[2]]
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: i64, name: &str, s: Slot| {
            let e = match s {
                Slot::Fixed(k) => k.to_string(),
                Slot::Var => "n".to_string(),
            };
            if c == 1 {
                format!("{name}^{e}")
            } else {
                format!("{c}{name}^{e}")
            }
        };
        write!(
            f,
            "{} + {} = {}",
            term(self.coeffs[0], "X", self.slots[0]),
            term(self.coeffs[1], "Y", self.slots[1]),
            term(self.coeffs[2], "Z", self.slots[2])
        )
    }
}

/// Follow-up for rules whose cited result only excludes `3 ∤ Z`: the `Z` term is
/// forced to vanish modulo `modulus` and the whole pattern is then checked
/// for a residue obstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SecondStage {
    pub modulus: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationRule {
    pub id: String,
    pub template: Template,
    pub n_min: u32,
    pub second_stage: Option<SecondStage>,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubpatternKind {
    /// Squares at `i + k·offset` for the given offsets; `strided` allows
    /// any step `k ≥ 1`, otherwise `k = 1`.
    SquarePositions { offsets: Vec<usize>, strided: bool },
    /// A contiguous window of concrete exponents.
    Literal(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubpatternRule {
    pub id: String,
    pub kind: SubpatternKind,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Rule {
    Relation(RelationRule),
    Subpattern(SubpatternRule),
}

impl Rule {
    pub fn id(&self) -> &str {
        match self {
            Rule::Relation(r) => &r.id,
            Rule::Subpattern(r) => &r.id,
        }
    }

    pub fn citation(&self) -> &str {
        match self {
            Rule::Relation(r) => &r.citation,
            Rule::Subpattern(r) => &r.citation,
        }
    }

    /// 1 for plain relation rules, 2 for subpattern rules, 3 for two-stage.
    pub fn phase(&self) -> u8 {
        match self {
            Rule::Relation(r) if r.second_stage.is_some() => 3,
            Rule::Relation(_) => 1,
            Rule::Subpattern(_) => 2,
        }
    }
}

/// `Σ coeffs[t] · a_{positions[t]} = 0` among three progression terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub positions: [usize; 3],
    #[serde(serialize_with = "ser_symbols")]
    pub exponents: [ExponentSymbol; 3],
    pub coeffs: [i64; 3],
}

fn ser_symbols<S: serde::Serializer>(e: &[ExponentSymbol; 3], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(e.iter().map(|x| x.to_string()))
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // p·xᵢ + q·xₖ = r·xⱼ
        let term = |t: usize| {
            let c = self.coeffs[t].abs();
            let body = format!("x{}^{}", self.positions[t], self.exponents[t]);
            if c == 1 {
                body
            } else {
                format!("{c}{body}")
            }
        };
        write!(f, "{} + {} = {}", term(0), term(2), term(1))
    }
}

/// How the three relation terms fill the template slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Substitution {
    /// `slot_of[t]` is 0, 1, 2 for X, Y, Z.
    pub slot_of: [usize; 3],
    /// Term `t` enters with its base negated (odd exponents only).
    pub negated: [bool; 3],
    /// Global sign applied to the relation before matching.
    pub sign: i64,
}

impl Substitution {
    pub fn describe(&self, rel: &Relation) -> String {
        let names = ["X", "Y", "Z"];
        let mut parts: Vec<(usize, String)> = (0..3)
            .map(|t| {
                let neg = if self.negated[t] { "-" } else { "" };
                (
                    self.slot_of[t],
                    format!("{} = {neg}x{}", names[self.slot_of[t]], rel.positions[t]),
                )
            })
            .collect();
        parts.sort();
        parts.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(", ")
    }

    /// Position of the term mapped to slot `slot`.
    pub fn position_of(&self, rel: &Relation, slot: usize) -> usize {
        let t = self.slot_of.iter().position(|&s| s == slot).expect("bijection");
        rel.positions[t]
    }
}

/// The AP relation `(k-j)aᵢ + (j-i)aₖ = (k-i)aⱼ`, reduced by its content.
pub fn derive_relation(pattern: &Pattern, i: usize, j: usize, k: usize) -> Result<Relation, EngineError> {
    let len = pattern.len();
    if !(1 <= i && i < j && j < k && k <= len) {
        return Err(EngineError::BadPositions { i, j, k, len });
    }
    let p = (k - j) as i64;
    let q = (j - i) as i64;
    let r = (k - i) as i64;
    let g = p.gcd(&q);
    Ok(Relation {
        positions: [i, j, k],
        exponents: [pattern.at(i), pattern.at(j), pattern.at(k)],
        coeffs: [p / g, -r / g, q / g],
    })
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

impl RelationRule {
    /// Whether `e` may fill a `Var` slot: a prime at least `n_min`, or a
    /// symbolic `n` whose lower bound already guarantees that.
    fn var_admits(&self, e: ExponentSymbol) -> bool {
        match e {
            ExponentSymbol::Concrete(v) => is_prime(v as u64) && v >= self.n_min,
            ExponentSymbol::Symbolic { min_value } => min_value >= self.n_min,
        }
    }

    pub fn matches(&self, rel: &Relation) -> Option<Substitution> {
        let want = self.template.signed();
        for perm in PERMUTATIONS {
            'sign: for sign in [1i64, -1] {
                let mut negated = [false; 3];
                let mut bound: Option<ExponentSymbol> = None;
                for t in 0..3 {
                    let slot = perm[t];
                    let e = rel.exponents[t];
                    match self.template.slots[slot] {
                        Slot::Fixed(k) => {
                            if e != ExponentSymbol::Concrete(k) {
                                continue 'sign;
                            }
                        }
                        Slot::Var => {
                            if !self.var_admits(e) || bound.is_some_and(|b| b != e) {
                                continue 'sign;
                            }
                            bound = Some(e);
                        }
                    }
                    let have = sign * rel.coeffs[t];
                    if have == want[slot] {
                        continue;
                    }
                    if have == -want[slot] && e.is_odd() {
                        negated[t] = true;
                        continue;
                    }
                    continue 'sign;
                }
                return Some(Substitution {
                    slot_of: perm,
                    negated,
                    sign,
                });
            }
        }
        None
    }
}

impl SubpatternRule {
    /// Position tuples (1-based, lexicographic) where the rule applies.
    pub fn occurrences(&self, pattern: &Pattern) -> Vec<Vec<usize>> {
        let t = pattern.len();
        let mut out = Vec::new();
        match &self.kind {
            SubpatternKind::SquarePositions { offsets, strided } => {
                let span = *offsets.iter().max().unwrap_or(&0);
                if span == 0 {
                    return out;
                }
                let max_step = if *strided { (t - 1) / span } else { 1 };
                for i in 1..=t {
                    for step in 1..=max_step {
                        if i + span * step > t {
                            break;
                        }
                        let pos: Vec<usize> = offsets.iter().map(|o| i + o * step).collect();
                        if pos.iter().all(|&p| pattern.at(p) == ExponentSymbol::Concrete(2)) {
                            out.push(pos);
                        }
                    }
                }
                out.sort();
            }
            SubpatternKind::Literal(lit) => {
                let lit: Vec<ExponentSymbol> = lit.iter().map(|&k| ExponentSymbol::Concrete(k)).collect();
                if lit.len() <= t {
                    for i in 0..=t - lit.len() {
                        if pattern.0[i..i + lit.len()] == lit[..] {
                            out.push((i + 1..=i + lit.len()).collect());
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ruleset {
    pub alphabet: Alphabet,
    /// Sorted by phase, then id.
    pub rules: Vec<Rule>,
}

const LIT_C1: &str = "the quartic α⁴X⁴+α³X³+α²X²+αX+1 = (α-1)Y² over Q(2^(1/5)) has X ∈ {1, -1/3} only \
                      (elliptic Chabauty, p = 3); via 2b⁵-c⁵ = a²";
const LIT_C2: &str = "the quartic α⁴X⁴-α³X³+α²X²-αX+1 = (α⁴-α³+α²-α+1)Y² over Q(2^(1/5)) has X = 1 only \
                      (elliptic Chabauty, p = 7); via 2x₁⁵+x₄⁵ = 3x₂²";
const LIT_C3: &str = "the quartic X⁴+(8β-12)X³+(16β-30)X²+(8β-12)X+1 = Y² over Q(√5) has X = 0 only \
                      (elliptic Chabauty, p = 13); via x₂²+x₄² = 2x₃⁵, the quintic parametrization and a mod 5 argument";

fn relation(id: &str, coeffs: [i64; 3], slots: [Slot; 3], n_min: u32, citation: &str) -> Rule {
    Rule::Relation(RelationRule {
        id: id.to_string(),
        template: Template { coeffs, slots },
        n_min,
        second_stage: None,
        citation: citation.to_string(),
    })
}

fn squares(id: &str, offsets: &[usize], strided: bool, citation: &str) -> Rule {
    Rule::Subpattern(SubpatternRule {
        id: id.to_string(),
        kind: SubpatternKind::SquarePositions {
            offsets: offsets.to_vec(),
            strided,
        },
        citation: citation.to_string(),
    })
}

fn literal(id: &str, lit: &[u32], citation: &str) -> Rule {
    Rule::Subpattern(SubpatternRule {
        id: id.to_string(),
        kind: SubpatternKind::Literal(lit.to_vec()),
        citation: citation.to_string(),
    })
}

impl Ruleset {
    /// The rules used for each alphabet's length bound.
    pub fn standard(alphabet: Alphabet) -> Ruleset {
        use Slot::{Fixed, Var};
        let nn2 = || {
            relation(
                "R1-nn2",
                [1, 1, 2],
                [Var, Var, Fixed(2)],
                5,
                "X^n + Y^n = 2Z^2 has no non-trivial primitive solutions for prime n >= 5 (Bennett-Skinner)",
            )
        };
        let nn2w = || {
            relation(
                "R2-nn2w",
                [1, 4, 3],
                [Var, Var, Fixed(2)],
                7,
                "X^n + 4Y^n = 3Z^2 has no non-trivial primitive solutions for prime n >= 7 (Bennett-Skinner, Bruin)",
            )
        };
        let nnn = || {
            relation(
                "R3-nnn",
                [1, 1, 2],
                [Var, Var, Var],
                3,
                "X^n + Y^n = 2Z^n has no non-trivial primitive solutions for prime n >= 3 (Darmon-Merel)",
            )
        };
        let four_squares = || {
            squares(
                "S1-four-squares",
                &[0, 1, 2, 3],
                true,
                "four distinct squares never form an arithmetic progression (Fermat, Euler)",
            )
        };
        let mut rules = match alphabet.kind {
            AlphabetKind::TwoN => vec![
                nn2(),
                nn2w(),
                nnn(),
                four_squares(),
                squares(
                    "S2-curve145",
                    &[0, 1, 4, 5],
                    false,
                    "(1+X)(1+4X)(1+5X) = Y² has rank 0 and eight torsion points, none giving a progression",
                ),
            ],
            AlphabetKind::TwoFive => vec![
                nn2(),
                nnn(),
                four_squares(),
                literal("S4-c1-2255", &[2, 2, 5, 5], LIT_C1),
                literal("S5-c1-5522", &[5, 5, 2, 2], LIT_C1),
                literal("S6-c1-2552", &[2, 5, 5, 2], LIT_C1),
                literal("S7-c2-5225", &[5, 2, 2, 5], LIT_C2),
                literal("S8-c3-2252", &[2, 2, 5, 2], LIT_C3),
                literal("S9-c3-2522", &[2, 5, 2, 2], LIT_C3),
            ],
            AlphabetKind::ThreeN => vec![
                nnn(),
                relation(
                    "R4-nn3",
                    [1, 1, 2],
                    [Var, Var, Fixed(3)],
                    5,
                    "X^n + Y^n = 2Z^3 has no non-trivial primitive solutions for prime n >= 5 \
                     (Bennett-Vatsal-Yazdani)",
                ),
                Rule::Relation(RelationRule {
                    id: "R5-33n".to_string(),
                    template: Template {
                        coeffs: [1, 1, 2],
                        slots: [Fixed(3), Fixed(3), Var],
                    },
                    n_min: 3,
                    second_stage: Some(SecondStage { modulus: 9 }),
                    citation: "X^3 + Y^3 = 2Z^n has no non-trivial primitive solutions with 3 ∤ Z for prime n >= 3 \
                               (factor X+Y, then V^n - U^2n = 3W^2 contradicts the (n,n,2) results); \
                               so 3 | Z and the progression is checked modulo 9 using x³ ≡ 0, ±1"
                        .to_string(),
                }),
            ],
        };
        rules.sort_by(|a, b| (a.phase(), a.id()).cmp(&(b.phase(), b.id())));
        Ruleset { alphabet, rules }
    }

    /// Squares at `{i, i+1, i+3, i+4}`. Sound, but every length-6 pattern it
    /// would remove from the `{2,n}` enumeration is already removed by the
    /// other rules, so it is not part of the standard set.
    pub fn curve134_rule() -> Rule {
        squares(
            "S3-curve134",
            &[0, 1, 3, 4],
            false,
            "(1+X)(1+3X)(1+4X) = Y² has rank 0 and eight torsion points, none giving a progression",
        )
    }

    /// The ruleset with `rule` added in phase and id order.
    pub fn with_rule(&self, rule: Rule) -> Ruleset {
        let mut out = self.clone();
        out.rules.retain(|r| r.id() != rule.id());
        out.rules.push(rule);
        out.rules.sort_by(|a, b| (a.phase(), a.id()).cmp(&(b.phase(), b.id())));
        out
    }

    pub fn rule_ids(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.id().to_string()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id() == id)
    }

    /// The ruleset with one rule removed.
    pub fn without(&self, id: &str) -> Result<Ruleset, EngineError> {
        self.get(id).ok_or_else(|| EngineError::UnknownRule(id.to_string()))?;
        Ok(Ruleset {
            alphabet: self.alphabet,
            rules: self.rules.iter().filter(|r| r.id() != id).cloned().collect(),
        })
    }

    /// The ruleset with one relation rule's exponent bound replaced.
    pub fn with_n_min(&self, id: &str, n_min: u32) -> Result<Ruleset, EngineError> {
        let mut out = self.clone();
        match out.rules.iter_mut().find(|r| r.id() == id) {
            Some(Rule::Relation(r)) => {
                r.n_min = n_min;
                Ok(out)
            }
            _ => Err(EngineError::UnknownRule(id.to_string())),
        }
    }

    /// Relation rules without a second stage, in id order, for `match_rule`.
    fn plain_relation_rules(&self) -> impl Iterator<Item = &RelationRule> {
        self.rules.iter().filter_map(|r| match r {
            Rule::Relation(rr) if rr.second_stage.is_none() => Some(rr),
            _ => None,
        })
    }
}

/// First relation rule (two-stage ones included) matching `rel`.
pub fn match_rule<'a>(rel: &Relation, ruleset: &'a Ruleset) -> Option<(&'a RelationRule, Substitution)> {
    ruleset
        .plain_relation_rules()
        .chain(ruleset.rules.iter().filter_map(|r| match r {
            Rule::Relation(rr) if rr.second_stage.is_some() => Some(rr),
            _ => None,
        }))
        .find_map(|r| r.matches(rel).map(|s| (r, s)))
}

/// Triples the relation rules are tried on, in lexicographic order: every
/// equally spaced triple, plus any triple spanning at most six steps.
pub(crate) fn candidate_triples(t: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 1..=t {
        for j in i + 1..=t {
            for k in j + 1..=t {
                if j - i == k - j || k - i <= 6 {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str, a: Alphabet) -> Pattern {
        Pattern::parse(s, &a).unwrap()
    }

    #[test]
    fn relation_examples() {
        let a = Alphabet::two_n(7);
        let r = derive_relation(&pat("n2n", a), 1, 2, 3).unwrap();
        assert_eq!(r.coeffs, [1, -2, 1]);
        assert_eq!(r.to_string(), "x1^n + x3^n = 2x2^2");
        let r = derive_relation(&pat("n22n2", a), 1, 4, 5).unwrap();
        assert_eq!(r.coeffs, [1, -4, 3]);
        assert_eq!(r.to_string(), "x1^n + 3x5^2 = 4x4^n");
        let b = Alphabet::two_five();
        let r = derive_relation(&pat("5225", b), 1, 2, 4).unwrap();
        assert_eq!(r.to_string(), "2x1^5 + x4^5 = 3x2^2");
        assert!(derive_relation(&pat("5225", b), 2, 2, 4).is_err());
        assert!(derive_relation(&pat("5225", b), 1, 2, 5).is_err());
    }

    #[test]
    fn weighted_template_absorbs_sign() {
        let a = Alphabet::two_n(7);
        let rs = Ruleset::standard(a);
        // 4x₂ⁿ - x₅ⁿ = 3x₁²
        let rel = derive_relation(&pat("2n22n", a), 1, 2, 5).unwrap();
        let (rule, sub) = match_rule(&rel, &rs).unwrap();
        assert_eq!(rule.id, "R2-nn2w");
        assert_eq!(sub.describe(&rel), "X = -x5, Y = x2, Z = x1");
    }

    #[test]
    fn two_stage_match_marks_z() {
        let a = Alphabet::three_n(5);
        let rs = Ruleset::standard(a);
        let rel = derive_relation(&pat("33nn3", a), 1, 3, 5).unwrap();
        let (rule, sub) = match_rule(&rel, &rs).unwrap();
        assert_eq!(rule.id, "R5-33n");
        assert_eq!(sub.position_of(&rel, 2), 3);
        let rel = derive_relation(&pat("nnn", a), 1, 2, 3).unwrap();
        assert_eq!(match_rule(&rel, &rs).unwrap().0.id, "R3-nnn");
    }

    #[test]
    fn weighted_template_needs_seven() {
        let a = Alphabet::two_n(5);
        let rs = Ruleset::standard(a);
        let rel = derive_relation(&pat("n22n2", a), 1, 4, 5).unwrap();
        assert!(match_rule(&rel, &rs).is_none());
        let rel = derive_relation(&pat("n2n", a), 1, 2, 3).unwrap();
        assert_eq!(match_rule(&rel, &rs).unwrap().0.id, "R1-nn2");
    }

    #[test]
    fn squares_cannot_be_negated() {
        let a = Alphabet::two_n(7);
        let rs = Ruleset::standard(a);
        // x₁² + x₃² = 2x₂ⁿ is not excluded by any rule
        let rel = derive_relation(&pat("2n2", a), 1, 2, 3).unwrap();
        assert!(match_rule(&rel, &rs).is_none());
    }

    #[test]
    fn occurrences_are_lexicographic() {
        let a = Alphabet::two_n(7);
        let rule = SubpatternRule {
            id: "x".into(),
            kind: SubpatternKind::SquarePositions {
                offsets: vec![0, 1, 2, 3],
                strided: true,
            },
            citation: String::new(),
        };
        let occ = rule.occurrences(&pat("2222n2n2n2", a));
        assert_eq!(occ, vec![vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![4, 6, 8, 10]]);
        assert_eq!(candidate_triples(3), vec![[1, 2, 3]]);
        // only the six span-7 triples (1, j, 8) drop out
        assert_eq!(candidate_triples(8).len(), 50);
    }
}
