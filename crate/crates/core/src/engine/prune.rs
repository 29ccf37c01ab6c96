use rayon::prelude::*;
use serde::Serialize;

use super::residue::{exhaustive_residue_check, ResidueOutcome, ResidueProblem};
use super::rules::{candidate_triples, derive_relation, Relation, RelationRule, Rule, Ruleset, SubpatternRule, Substitution};
use super::{Alphabet, Pattern};
use crate::error::EngineError;

pub const MAX_LENGTH: usize = 12;

const RELATION_CAVEAT: &str = "excludes progressions whose terms at these positions are non-trivial; \
                               primitivity gives gcd(a_i, a_j) | (j - i), which the span bound keeps within the \
                               cited result's coprimality hypothesis";
const SUBPATTERN_CAVEAT: &str = "excludes non-constant primitive progressions with these exponents at these positions";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Relation {
        relation: Relation,
        statement: String,
        template: String,
        substitution: Substitution,
    },
    Subpattern {
        description: String,
    },
    TwoStage {
        relation: Relation,
        statement: String,
        template: String,
        substitution: Substitution,
        forced_position: usize,
        residue: ResidueProblem,
        outcome: ResidueOutcome,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneCertificate {
    pub pattern: Pattern,
    pub rule: String,
    pub positions: Vec<usize>,
    pub evidence: Evidence,
    pub citation: String,
    pub caveat: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    Pruned(Box<PruneCertificate>),
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible)
    }

    pub fn certificate(&self) -> Option<&PruneCertificate> {
        match self {
            Verdict::Pruned(c) => Some(c),
            Verdict::Admissible => None,
        }
    }
}

fn relation_evidence(rule: &RelationRule, rel: Relation, sub: Substitution) -> Evidence {
    Evidence::Relation {
        statement: rel.to_string(),
        template: rule.template.to_string(),
        relation: rel,
        substitution: sub,
    }
}

/// Forced divisibility and residue replay for a two-stage match; `None`
/// when the residue system is satisfiable.
fn second_stage(pattern: &Pattern, rule: &RelationRule, rel: Relation, sub: Substitution) -> Option<Evidence> {
    let stage = rule.second_stage?;
    let forced = sub.position_of(&rel, 2);
    let residue = ResidueProblem::for_pattern(pattern, stage.modulus, &[forced]);
    let outcome = exhaustive_residue_check(&residue);
    outcome.is_unsat().then(|| Evidence::TwoStage {
        statement: rel.to_string(),
        template: rule.template.to_string(),
        relation: rel,
        substitution: sub,
        forced_position: forced,
        residue,
        outcome,
    })
}

fn subpattern_description(rule: &SubpatternRule, positions: &[usize]) -> String {
    match &rule.kind {
        super::SubpatternKind::SquarePositions { .. } => format!("squares at positions {positions:?}"),
        super::SubpatternKind::Literal(lit) => format!("window {lit:?} at positions {positions:?}"),
    }
}

fn certificate(pattern: &Pattern, rule: &Rule, positions: Vec<usize>, evidence: Evidence) -> Verdict {
    let caveat = match rule {
        Rule::Relation(_) => RELATION_CAVEAT,
        Rule::Subpattern(_) => SUBPATTERN_CAVEAT,
    };
    Verdict::Pruned(Box::new(PruneCertificate {
        pattern: pattern.clone(),
        rule: rule.id().to_string(),
        positions,
        evidence,
        citation: rule.citation().to_string(),
        caveat: caveat.to_string(),
    }))
}

/// Applies the rules in phase and id order; the first hit wins.
pub fn prune(pattern: &Pattern, ruleset: &Ruleset) -> Verdict {
    let triples = candidate_triples(pattern.len());
    for rule in &ruleset.rules {
        match rule {
            Rule::Relation(rr) => {
                for &[i, j, k] in &triples {
                    let rel = derive_relation(pattern, i, j, k).expect("candidate triples are in range");
                    let Some(sub) = rr.matches(&rel) else { continue };
                    let evidence = if rr.second_stage.is_some() {
                        match second_stage(pattern, rr, rel, sub) {
                            Some(ev) => ev,
                            None => continue,
                        }
                    } else {
                        relation_evidence(rr, rel, sub)
                    };
                    return certificate(pattern, rule, vec![i, j, k], evidence);
                }
            }
            Rule::Subpattern(sr) => {
                if let Some(pos) = sr.occurrences(pattern).into_iter().next() {
                    let description = subpattern_description(sr, &pos);
                    return certificate(pattern, rule, pos, Evidence::Subpattern { description });
                }
            }
        }
    }
    Verdict::Admissible
}

/// Replays a certificate against `ruleset` using only its stored data.
pub fn verify_certificate(cert: &PruneCertificate, ruleset: &Ruleset) -> bool {
    let Some(rule) = ruleset.get(&cert.rule) else {
        return false;
    };
    if rule.citation() != cert.citation || cert.pattern.0.iter().any(|s| !ruleset.alphabet.contains(*s)) {
        return false;
    }
    let replay_relation = |rr: &RelationRule, relation: &Relation, substitution: &Substitution| {
        let [i, j, k] = relation.positions;
        cert.positions == [i, j, k]
            && derive_relation(&cert.pattern, i, j, k).ok().as_ref() == Some(relation)
            && rr.matches(relation).as_ref() == Some(substitution)
    };
    match (rule, &cert.evidence) {
        (
            Rule::Relation(rr),
            Evidence::Relation {
                relation, substitution, ..
            },
        ) => rr.second_stage.is_none() && replay_relation(rr, relation, substitution),
        (
            Rule::Relation(rr),
            Evidence::TwoStage {
                relation,
                substitution,
                forced_position,
                residue,
                outcome,
                ..
            },
        ) => {
            let Some(stage) = rr.second_stage else { return false };
            replay_relation(rr, relation, substitution)
                && substitution.position_of(relation, 2) == *forced_position
                && *residue == ResidueProblem::for_pattern(&cert.pattern, stage.modulus, &[*forced_position])
                && outcome.is_unsat()
                && exhaustive_residue_check(residue) == *outcome
        }
        (Rule::Subpattern(sr), Evidence::Subpattern { .. }) => sr.occurrences(&cert.pattern).contains(&cert.positions),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub alphabet: Alphabet,
    pub length: usize,
    pub survivors: Vec<Pattern>,
    pub pruned: Vec<PruneCertificate>,
}

fn check_length(t: usize) -> Result<(), EngineError> {
    if (1..=MAX_LENGTH).contains(&t) {
        Ok(())
    } else {
        Err(EngineError::LengthOutOfRange(t))
    }
}

/// Every pattern of length `t`, split into survivors and certificates, both
/// in lexicographic pattern order.
pub fn enumerate_with_certificates(ruleset: &Ruleset, t: usize) -> Result<Enumeration, EngineError> {
    check_length(t)?;
    let verdicts: Vec<(Pattern, Verdict)> = (0..1u64 << t)
        .into_par_iter()
        .map(|idx| {
            let p = ruleset.alphabet.pattern_at(t, idx);
            let v = prune(&p, ruleset);
            (p, v)
        })
        .collect();
    let mut survivors = Vec::new();
    let mut pruned = Vec::new();
    for (p, v) in verdicts {
        match v {
            Verdict::Admissible => survivors.push(p),
            Verdict::Pruned(c) => pruned.push(*c),
        }
    }
    Ok(Enumeration {
        alphabet: ruleset.alphabet,
        length: t,
        survivors,
        pruned,
    })
}

pub fn enumerate_admissible(ruleset: &Ruleset, t: usize) -> Result<Vec<Pattern>, EngineError> {
    check_length(t)?;
    Ok((0..1u64 << t)
        .into_par_iter()
        .map(|idx| ruleset.alphabet.pattern_at(t, idx))
        .filter(|p| prune(p, ruleset).is_admissible())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxLength {
    pub length: usize,
    pub survivors: Vec<Pattern>,
    /// Survivors exist at the cap itself, so the true maximum may be larger.
    pub censored: bool,
}

pub fn max_admissible_length(ruleset: &Ruleset, cap: usize) -> Result<MaxLength, EngineError> {
    check_length(cap)?;
    let mut best = MaxLength {
        length: 0,
        survivors: Vec::new(),
        censored: false,
    };
    for t in 1..=cap {
        let survivors = enumerate_admissible(ruleset, t)?;
        if !survivors.is_empty() {
            best = MaxLength {
                length: t,
                censored: t == cap,
                survivors,
            };
        }
    }
    Ok(best)
}
