//! Exponent patterns and the rule engine that prunes them.
//!
//! A pattern `(l₁,…,l_t)` is admissible when no rule in the alphabet's
//! ruleset rules out a primitive progression `x₁^{l₁},…,x_t^{l_t}` with
//! non-trivial terms. Every elimination carries a certificate that can be
//! replayed without trusting the engine.

mod prune;
mod residue;
mod rules;

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::EngineError;

pub use prune::{
    enumerate_admissible, enumerate_with_certificates, max_admissible_length, prune, verify_certificate, Enumeration,
    Evidence, MaxLength, PruneCertificate, Verdict, MAX_LENGTH,
};
pub use residue::{
    exhaustive_residue_check, form_residue_check, power_residues, FormResidueReport, ResidueCase, ResidueOutcome,
    ResidueProblem,
};
pub use rules::{
    derive_relation, match_rule, Relation, RelationRule, Rule, Ruleset, SecondStage, Slot, SubpatternKind,
    SubpatternRule, Substitution, Template,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExponentSymbol {
    Concrete(u32),
    /// A prime `n ≥ min_value`.
    Symbolic { min_value: u32 },
}

impl ExponentSymbol {
    /// True when every exponent the symbol stands for is odd.
    pub fn is_odd(&self) -> bool {
        match self {
            ExponentSymbol::Concrete(k) => k % 2 == 1,
            ExponentSymbol::Symbolic { min_value } => *min_value >= 3,
        }
    }

    pub fn concrete(&self) -> Option<u32> {
        match self {
            ExponentSymbol::Concrete(k) => Some(*k),
            ExponentSymbol::Symbolic { .. } => None,
        }
    }
}

impl fmt::Display for ExponentSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentSymbol::Concrete(k) => write!(f, "{k}"),
            ExponentSymbol::Symbolic { .. } => write!(f, "n"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub Vec<ExponentSymbol>);

impl Pattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> ExponentSymbol {
        self.0[i - 1]
    }

    pub fn reversed(&self) -> Pattern {
        Pattern(self.0.iter().rev().copied().collect())
    }

    pub fn contains_window(&self, other: &Pattern) -> bool {
        other.len() <= self.len() && self.0.windows(other.len()).any(|w| w == other.0.as_slice())
    }

    /// Parses `2,n,n,2`, `(2,n,n,2)` or `2nn2` against an alphabet.
    pub fn parse(s: &str, alphabet: &Alphabet) -> Result<Pattern, EngineError> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let tokens: Vec<String> = if body.contains(',') {
            body.split(',').map(|t| t.trim().to_string()).collect()
        } else {
            body.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_string()).collect()
        };
        if tokens.is_empty() || tokens.iter().any(String::is_empty) {
            return Err(EngineError::BadPattern(s.to_string()));
        }
        let symbols = tokens
            .iter()
            .map(|t| alphabet.symbol(t).ok_or_else(|| EngineError::ForeignSymbol(t.clone(), alphabet.name())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Pattern(symbols))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlphabetKind {
    #[serde(rename = "2n")]
    TwoN,
    #[serde(rename = "25")]
    TwoFive,
    #[serde(rename = "3n")]
    ThreeN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub kind: AlphabetKind,
    /// The two symbols in enumeration order.
    pub symbols: [ExponentSymbol; 2],
}

impl Alphabet {
    pub const DEFAULT_TWO_N_MIN: u32 = 7;
    pub const DEFAULT_THREE_N_MIN: u32 = 5;

    pub fn two_n(n_min: u32) -> Alphabet {
        Alphabet {
            kind: AlphabetKind::TwoN,
            symbols: [ExponentSymbol::Concrete(2), ExponentSymbol::Symbolic { min_value: n_min }],
        }
    }

    pub fn two_five() -> Alphabet {
        Alphabet {
            kind: AlphabetKind::TwoFive,
            symbols: [ExponentSymbol::Concrete(2), ExponentSymbol::Concrete(5)],
        }
    }

    pub fn three_n(n_min: u32) -> Alphabet {
        Alphabet {
            kind: AlphabetKind::ThreeN,
            symbols: [ExponentSymbol::Concrete(3), ExponentSymbol::Symbolic { min_value: n_min }],
        }
    }

    /// `2n`, `25` or `3n`; `nmin` overrides the symbolic bound.
    pub fn by_name(name: &str, nmin: Option<u32>) -> Result<Alphabet, EngineError> {
        match name {
            "2n" => Ok(Alphabet::two_n(nmin.unwrap_or(Self::DEFAULT_TWO_N_MIN))),
            "25" => Ok(Alphabet::two_five()),
            "3n" => Ok(Alphabet::three_n(nmin.unwrap_or(Self::DEFAULT_THREE_N_MIN))),
            other => Err(EngineError::UnknownAlphabet(other.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            AlphabetKind::TwoN => format!("{{2,n>={}}}", self.symbolic_bound().unwrap_or(0)),
            AlphabetKind::TwoFive => "{2,5}".to_string(),
            AlphabetKind::ThreeN => format!("{{3,n>={}}}", self.symbolic_bound().unwrap_or(0)),
        }
    }

    pub fn symbolic_bound(&self) -> Option<u32> {
        self.symbols.iter().find_map(|s| match s {
            ExponentSymbol::Symbolic { min_value } => Some(*min_value),
            ExponentSymbol::Concrete(_) => None,
        })
    }

    pub fn symbol(&self, token: &str) -> Option<ExponentSymbol> {
        self.symbols.iter().copied().find(|s| s.to_string() == token)
    }

    pub fn contains(&self, s: ExponentSymbol) -> bool {
        self.symbols.contains(&s)
    }

    /// Pattern number `index` of length `t` in lexicographic order.
    pub fn pattern_at(&self, t: usize, index: u64) -> Pattern {
        Pattern(
            (0..t)
                .map(|pos| self.symbols[((index >> (t - 1 - pos)) & 1) as usize])
                .collect(),
        )
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let a = Alphabet::two_n(7);
        let p = Pattern::parse("2,n,n,2,2,2", &a).unwrap();
        assert_eq!(p.to_string(), "(2,n,n,2,2,2)");
        assert_eq!(Pattern::parse("(2nn222)", &a).unwrap(), p);
        assert!(matches!(Pattern::parse("2,3", &a), Err(EngineError::ForeignSymbol(..))));
        assert!(matches!(Pattern::parse("", &a), Err(EngineError::BadPattern(_))));
    }

    #[test]
    fn lexicographic_indexing() {
        let a = Alphabet::three_n(5);
        let all: Vec<String> = (0..4).map(|i| a.pattern_at(2, i).to_string()).collect();
        assert_eq!(all, ["(3,3)", "(3,n)", "(n,3)", "(n,n)"]);
    }

    #[test]
    fn alphabet_names() {
        assert_eq!(Alphabet::by_name("2n", None).unwrap().name(), "{2,n>=7}");
        assert_eq!(Alphabet::by_name("3n", Some(7)).unwrap().symbolic_bound(), Some(7));
        assert!(Alphabet::by_name("23", None).is_err());
    }
}
