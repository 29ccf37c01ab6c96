//! Bounded search for primitive arithmetic progressions of perfect powers.
//!
//! All powers up to the bound are tabulated first; each ordered pair of
//! table entries fixes `(a₁, d)` and the progression is extended while its
//! terms stay in the table.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{checked_pow_i128, gcd_i128, is_prime, PowerWitness};
use crate::engine::{prune, Alphabet, ExponentSymbol, Pattern, Ruleset};
use crate::error::SearchError;

pub const MAX_BOUND: i128 = 100_000_000;

/// Concrete exponents to search with, plus the engine alphabet they
/// instantiate (if any).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchAlphabet {
    pub exponents: Vec<u32>,
    pub engine: Option<Alphabet>,
    /// The concrete value standing in for the symbolic `n`.
    pub n_value: Option<u32>,
}

impl SearchAlphabet {
    /// Instantiates an engine alphabet; `n_value` is required exactly when
    /// the alphabet has a symbolic exponent.
    pub fn instantiate(alphabet: Alphabet, n_value: Option<u32>) -> Result<SearchAlphabet, SearchError> {
        let fixed = alphabet.symbols[0].concrete().expect("first symbol is concrete");
        match (alphabet.symbols[1], n_value) {
            (ExponentSymbol::Concrete(k), None) => Ok(SearchAlphabet {
                exponents: vec![fixed, k],
                engine: Some(alphabet),
                n_value: None,
            }),
            (ExponentSymbol::Concrete(k), Some(n)) if n == k => Ok(SearchAlphabet {
                exponents: vec![fixed, k],
                engine: Some(alphabet),
                n_value: None,
            }),
            (ExponentSymbol::Symbolic { min_value }, Some(n)) if is_prime(n as u64) && n >= min_value && n != fixed => {
                Ok(SearchAlphabet {
                    exponents: vec![fixed, n],
                    engine: Some(alphabet),
                    n_value: Some(n),
                })
            }
            (_, n) => Err(SearchError::InvalidAlphabet(format!("{alphabet} with n = {n:?}"))),
        }
    }

    /// A bare list of exponents with no engine counterpart, e.g. `{2}`.
    pub fn plain(exponents: &[u32]) -> Result<SearchAlphabet, SearchError> {
        if exponents.is_empty() || exponents.iter().any(|&e| e < 2) {
            return Err(SearchError::InvalidAlphabet(format!("{exponents:?}")));
        }
        let mut e = exponents.to_vec();
        e.sort_unstable();
        e.dedup();
        Ok(SearchAlphabet {
            exponents: e,
            engine: None,
            n_value: None,
        })
    }

    /// Parses `2n`, `25`, `3n` (needing `n_value`) or a comma-separated
    /// exponent list such as `2` or `3,7`.
    pub fn parse(name: &str, n_value: Option<u32>, nmin: Option<u32>) -> Result<SearchAlphabet, SearchError> {
        match Alphabet::by_name(name, nmin) {
            Ok(a) => SearchAlphabet::instantiate(a, n_value),
            Err(_) => {
                let exps = name
                    .split(',')
                    .map(|t| t.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| SearchError::InvalidAlphabet(name.to_string()))?;
                SearchAlphabet::plain(&exps)
            }
        }
    }

    fn symbol_for(&self, e: u32) -> Option<ExponentSymbol> {
        let alphabet = self.engine?;
        if Some(e) == self.n_value {
            return Some(alphabet.symbols[1]);
        }
        alphabet.symbols.iter().copied().find(|s| *s == ExponentSymbol::Concrete(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub first: i128,
    pub diff: i128,
    pub terms: Vec<i128>,
    /// For each term, its decompositions with exponents from the alphabet.
    pub decompositions: Vec<Vec<PowerWitness>>,
}

impl Progression {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// 1-based positions of terms equal to -1, 0 or 1.
    pub fn trivial_positions(&self) -> Vec<usize> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.abs() <= 1)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Re-checks primitivity, constant difference and every decomposition.
    pub fn is_valid(&self) -> bool {
        self.terms.len() >= 2
            && self.diff != 0
            && self.terms[0] == self.first
            && gcd_i128(self.terms[0], self.terms[1]) == 1
            && self.terms.windows(2).all(|w| w[1] - w[0] == self.diff)
            && self.decompositions.len() == self.terms.len()
            && self
                .decompositions
                .iter()
                .zip(&self.terms)
                .all(|(ds, &t)| !ds.is_empty() && ds.iter().all(|w| w.value == t && w.is_valid()))
    }
}

/// All values `b^e` with `|b^e| ≤ bound`, sorted.
fn power_table(exponents: &[u32], bound: i128) -> Vec<i128> {
    let mut set = BTreeSet::new();
    for &e in exponents {
        let mut b: i128 = 0;
        while let Some(v) = checked_pow_i128(b, e).filter(|v| *v <= bound) {
            set.insert(v);
            if e % 2 == 1 {
                set.insert(-v);
            }
            b += 1;
        }
    }
    set.into_iter().collect()
}

fn decompose(value: i128, exponents: &[u32]) -> Vec<PowerWitness> {
    exponents.iter().filter_map(|&e| PowerWitness::new(value, e)).collect()
}

/// Every maximal primitive non-constant progression of length at least
/// `min_len` whose terms are powers in `alphabet` with absolute value at most
/// `bound`. Only `d > 0` is reported; results are sorted by length
/// (descending), then `a₁`, then `d`.
pub fn find_progressions(alphabet: &SearchAlphabet, bound: i128, min_len: usize) -> Result<Vec<Progression>, SearchError> {
    if bound > MAX_BOUND || bound < 0 {
        return Err(SearchError::BoundTooLarge(bound));
    }
    if min_len < 3 {
        return Err(SearchError::MinLenTooSmall);
    }
    let table = power_table(&alphabet.exponents, bound);
    let members: HashSet<i128> = table.iter().copied().collect();
    let mut found: Vec<Progression> = (0..table.len())
        .into_par_iter()
        .flat_map_iter(|ia| {
            let table = &table;
            let members = &members;
            (ia + 1..table.len()).filter_map(move |ib| {
                let (a, b) = (table[ia], table[ib]);
                let d = b - a;
                if members.contains(&(a - d)) || gcd_i128(a, b) != 1 {
                    return None;
                }
                let mut terms = vec![a, b];
                let mut next = b + d;
                while next <= bound && members.contains(&next) {
                    terms.push(next);
                    next += d;
                }
                (terms.len() >= min_len).then_some(terms)
            })
        })
        .map(|terms| Progression {
            first: terms[0],
            diff: terms[1] - terms[0],
            decompositions: terms.iter().map(|&t| decompose(t, &alphabet.exponents)).collect(),
            terms,
        })
        .collect();
    found.sort_by(|x, y| (y.len(), x.first, x.diff).cmp(&(x.len(), y.first, y.diff)));
    Ok(found)
}

/// Every exponent pattern consistent with the decompositions. Terms -1, 0,
/// 1 admit each exponent they are a power for (-1 only odd ones).
pub fn classify(progression: &Progression) -> Vec<Vec<u32>> {
    let mut patterns: Vec<Vec<u32>> = vec![Vec::new()];
    for ds in &progression.decompositions {
        let mut next = Vec::new();
        for p in &patterns {
            for w in ds {
                let mut q = p.clone();
                q.push(w.exponent);
                next.push(q);
            }
        }
        patterns = next;
    }
    patterns.sort();
    patterns.dedup();
    patterns
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub first: i128,
    pub diff: i128,
    pub terms: Vec<i128>,
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    /// Progressions of length ≥ 4 without trivial terms.
    pub checked: usize,
    /// Progressions of length ≥ 4 skipped because of trivial terms.
    pub skipped_trivial: usize,
    pub violations: Vec<Violation>,
}

impl CrossCheck {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

fn engine_pattern(alphabet: &SearchAlphabet, exps: &[u32]) -> Option<Pattern> {
    exps.iter().map(|&e| alphabet.symbol_for(e)).collect::<Option<Vec<_>>>().map(Pattern)
}

/// Every long non-trivial progression must have at least one pattern the
/// engine admits; otherwise it contradicts a proved length bound. For a plain
/// alphabet with no engine counterpart, any such progression is reported.
pub fn cross_check(results: &[Progression], alphabet: &SearchAlphabet) -> CrossCheck {
    let ruleset = alphabet.engine.map(Ruleset::standard);
    cross_check_impl(results, alphabet, ruleset.as_ref())
}

/// As [`cross_check`], against an explicit ruleset.
pub fn cross_check_against(results: &[Progression], alphabet: &SearchAlphabet, ruleset: &Ruleset) -> CrossCheck {
    cross_check_impl(results, alphabet, Some(ruleset))
}

fn cross_check_impl(results: &[Progression], alphabet: &SearchAlphabet, ruleset: Option<&Ruleset>) -> CrossCheck {
    let mut out = CrossCheck {
        checked: 0,
        skipped_trivial: 0,
        violations: Vec::new(),
    };
    for p in results.iter().filter(|p| p.len() >= 4) {
        if !p.trivial_positions().is_empty() {
            out.skipped_trivial += 1;
            continue;
        }
        out.checked += 1;
        let patterns = classify(p);
        let admitted = match ruleset {
            Some(rs) => patterns
                .iter()
                .filter_map(|e| engine_pattern(alphabet, e))
                .any(|pat| prune(&pat, rs).is_admissible()),
            None => false,
        };
        if !admitted {
            out.violations.push(Violation {
                first: p.first,
                diff: p.diff,
                terms: p.terms.clone(),
                patterns: patterns.iter().map(|e| format_exponents(e)).collect(),
            });
        }
    }
    out
}

pub fn format_exponents(exps: &[u32]) -> String {
    let parts: Vec<String> = exps.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_five() -> SearchAlphabet {
        SearchAlphabet::instantiate(Alphabet::two_five(), Some(5)).unwrap()
    }

    fn has(found: &[Progression], terms: &[i128]) -> bool {
        found.iter().any(|p| p.terms.windows(terms.len()).any(|w| w == terms))
    }

    #[test]
    fn small_examples() {
        let found = find_progressions(&two_five(), 10, 3).unwrap();
        assert!(found.iter().any(|p| p.terms == [-1, 0, 1]));
        let found = find_progressions(&two_five(), 10_000, 3).unwrap();
        let p = found.iter().find(|p| p.terms == [9, 3125, 6241]).unwrap();
        assert_eq!(classify(p), vec![vec![2, 5, 2]]);
        let squares = SearchAlphabet::plain(&[2]).unwrap();
        let found = find_progressions(&squares, 100, 3).unwrap();
        let p = found.iter().find(|p| p.terms == [1, 25, 49]).unwrap();
        assert_eq!(p.diff, 24);
        assert_eq!(classify(p), vec![vec![2, 2, 2]]);
        assert!(found.iter().all(Progression::is_valid));
    }

    #[test]
    fn trivial_terms_admit_many_exponents() {
        let found = find_progressions(&two_five(), 10, 3).unwrap();
        let p = found.iter().find(|p| p.terms == [-1, 0, 1]).unwrap();
        assert_eq!(p.trivial_positions(), vec![1, 2, 3]);
        let pats = classify(p);
        assert!(pats.iter().all(|e| e[0] == 5));
        assert_eq!(pats.len(), 4);
    }

    #[test]
    fn no_four_squares() {
        let squares = SearchAlphabet::plain(&[2]).unwrap();
        assert!(find_progressions(&squares, 1_000_000, 4).unwrap().is_empty());
    }

    #[test]
    fn guards() {
        assert_eq!(find_progressions(&two_five(), MAX_BOUND + 1, 3), Err(SearchError::BoundTooLarge(MAX_BOUND + 1)));
        assert_eq!(find_progressions(&two_five(), 100, 2), Err(SearchError::MinLenTooSmall));
        assert!(SearchAlphabet::instantiate(Alphabet::two_n(7), Some(5)).is_err());
        assert!(SearchAlphabet::instantiate(Alphabet::two_n(7), Some(9)).is_err());
        assert!(SearchAlphabet::instantiate(Alphabet::three_n(5), None).is_err());
        assert!(SearchAlphabet::instantiate(Alphabet::two_five(), Some(7)).is_err());
        assert!(SearchAlphabet::parse("3,7", None, None).unwrap().engine.is_none());
    }

    #[test]
    fn planted_parametrized_progressions_are_found() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let bound = 1_000_000;
        let found = find_progressions(&two_five(), bound, 3).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let mut planted = 0;
        for _ in 0..200 {
            let (u, v): (i128, i128) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6));
            let x3 = u * u + v * v;
            if gcd_i128(u, v) != 1 || (u + v) % 2 == 0 || x3.pow(5) > bound {
                continue;
            }
            let x2 = u.pow(5) - 5 * u.pow(4) * v - 10 * u.pow(3) * v * v + 10 * u * u * v.pow(3) + 5 * u * v.pow(4) - v.pow(5);
            let x4 = u.pow(5) + 5 * u.pow(4) * v - 10 * u.pow(3) * v * v - 10 * u * u * v.pow(3) + 5 * u * v.pow(4) + v.pow(5);
            let mut ap = [x2 * x2, x3.pow(5), x4 * x4];
            ap.sort();
            if ap[0] == ap[2] || gcd_i128(ap[0], ap[1]) != 1 {
                continue;
            }
            assert!(has(&found, &ap), "missing {ap:?} from ({u},{v})");
            planted += 1;
        }
        assert!(planted > 0);
    }

    #[test]
    fn cross_check_flags_contradictions() {
        let a = two_five();
        let fake = Progression {
            first: 4,
            diff: 5,
            terms: vec![4, 9, 14, 19],
            decompositions: vec![
                vec![PowerWitness::new(4, 2).unwrap()],
                vec![PowerWitness::new(9, 2).unwrap()],
                vec![PowerWitness {
                    value: 14,
                    exponent: 2,
                    base: 0,
                }],
                vec![PowerWitness {
                    value: 19,
                    exponent: 2,
                    base: 0,
                }],
            ],
        };
        let cc = cross_check(&[fake.clone()], &a);
        assert_eq!(cc.checked, 1);
        assert_eq!(cc.violations[0].patterns, vec!["(2,2,2,2)"]);
        assert!(cross_check(&[], &a).is_consistent());
        assert!(!fake.is_valid());
    }
}
