//! Exhaustive residue obstructions over `(a₁ mod m, d mod m)`.

use serde::Serialize;

use super::{ExponentSymbol, Pattern};
use crate::identities::QPoly;

/// Distinct values of `x^e mod m`, sorted.
pub fn power_residues(e: u32, m: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..m).map(|x| crate::arith::pow_mod(x, e as u64, m)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn smallest_prime_factor(m: u64) -> u64 {
    (2..=m).find(|p| m % p == 0).unwrap_or(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueProblem {
    pub modulus: u64,
    /// Allowed residues of each term; `None` leaves the term free.
    pub allowed: Vec<Option<Vec<u64>>>,
    /// Excludes `g | a₁` together with `g | d`.
    pub primitivity: Option<u64>,
}

impl ResidueProblem {
    /// Residue sets implied by the concrete exponents of `pattern`, with the
    /// terms at `forced_zero` (1-based) additionally divisible by `modulus`.
    /// Symbolic exponents are left unconstrained.
    pub fn for_pattern(pattern: &Pattern, modulus: u64, forced_zero: &[usize]) -> ResidueProblem {
        let allowed = pattern
            .0
            .iter()
            .enumerate()
            .map(|(idx, s)| {
                let base = match s {
                    ExponentSymbol::Concrete(e) => Some(power_residues(*e, modulus)),
                    ExponentSymbol::Symbolic { .. } => None,
                };
                if forced_zero.contains(&(idx + 1)) {
                    match base {
                        Some(set) => Some(set.into_iter().filter(|&r| r == 0).collect()),
                        None => Some(vec![0]),
                    }
                } else {
                    base
                }
            })
            .collect();
        ResidueProblem {
            modulus,
            allowed,
            primitivity: Some(smallest_prime_factor(modulus)),
        }
    }

    /// First constraint violated by `(a₁, d)`, if any.
    fn violation(&self, a1: u64, d: u64) -> Option<String> {
        let m = self.modulus;
        if let Some(g) = self.primitivity {
            if a1 % g == 0 && d % g == 0 {
                return Some(format!("{g} | a1 and {g} | d"));
            }
        }
        for (idx, allowed) in self.allowed.iter().enumerate() {
            let Some(set) = allowed else { continue };
            let a = (a1 + idx as u64 * d) % m;
            if !set.contains(&a) {
                return Some(format!("a{} = {a} not in {set:?}", idx + 1));
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCase {
    pub a1: u64,
    pub d: u64,
    pub violation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ResidueOutcome {
    Sat { a1: u64, d: u64 },
    Unsat { cases: Vec<ResidueCase> },
}

impl ResidueOutcome {
    pub fn is_unsat(&self) -> bool {
        matches!(self, ResidueOutcome::Unsat { .. })
    }
}

/// Tries every `(a₁, d)` modulo `m` in lexicographic order.
pub fn exhaustive_residue_check(problem: &ResidueProblem) -> ResidueOutcome {
    let m = problem.modulus;
    let mut cases = Vec::with_capacity((m * m) as usize);
    for a1 in 0..m {
        for d in 0..m {
            match problem.violation(a1, d) {
                Some(violation) => cases.push(ResidueCase { a1, d, violation }),
                None => return ResidueOutcome::Sat { a1, d },
            }
        }
    }
    ResidueOutcome::Unsat { cases }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormResidueReport {
    pub modulus: u64,
    /// Every point checked, with the form's value there.
    pub cases: Vec<(Vec<u64>, u64)>,
    pub expected: u64,
    pub holds: bool,
}

/// Evaluates `form` at every point mod `modulus` accepted by `filter` and
/// checks the value is always `expected`.
pub fn form_residue_check(form: &QPoly, modulus: u64, filter: impl Fn(&[u64]) -> bool, expected: u64) -> FormResidueReport {
    let n = form.vars().len() as u32;
    let mut cases = Vec::new();
    for idx in 0..modulus.pow(n) {
        let point: Vec<u64> = (0..n).map(|v| (idx / modulus.pow(n - 1 - v)) % modulus).collect();
        if filter(&point) {
            let value = form.eval_mod(&point, modulus);
            cases.push((point, value));
        }
    }
    let holds = cases.iter().all(|(_, v)| *v == expected);
    FormResidueReport {
        modulus,
        cases,
        expected,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Alphabet;
    use crate::identities::f_uv;

    #[test]
    fn cube_residues_mod_nine() {
        assert_eq!(power_residues(3, 9), vec![0, 1, 8]);
        assert_eq!(power_residues(2, 5), vec![0, 1, 4]);
        assert_eq!(power_residues(2, 4), vec![0, 1]);
    }

    #[test]
    fn forced_cube_patterns_are_unsat() {
        let a = Alphabet::three_n(5);
        for (s, forced) in [("3n33", 2), ("33n3", 3), ("33nn3", 3)] {
            let p = Pattern::parse(s, &a).unwrap();
            let out = exhaustive_residue_check(&ResidueProblem::for_pattern(&p, 9, &[forced]));
            match out {
                ResidueOutcome::Unsat { cases } => assert_eq!(cases.len(), 81, "{s}"),
                other => panic!("{s}: {other:?}"),
            }
        }
    }

    #[test]
    fn unforced_pattern_is_sat() {
        let a = Alphabet::three_n(5);
        let p = Pattern::parse("33nn", &a).unwrap();
        let out = exhaustive_residue_check(&ResidueProblem::for_pattern(&p, 9, &[]));
        assert_eq!(out, ResidueOutcome::Sat { a1: 0, d: 1 });
    }

    #[test]
    fn mod_five_exclusion() {
        // 5 | x₁ in (2,2,5,2): a₁ ≡ 0, a₂ = d and a₄ = 3d must both be squares
        let a = Alphabet::two_five();
        let p = Pattern::parse("2252", &a).unwrap();
        let problem = ResidueProblem::for_pattern(&p, 5, &[1]);
        assert_eq!(problem.allowed[2], Some(vec![0, 1, 2, 3, 4]));
        assert!(exhaustive_residue_check(&problem).is_unsat());
        // without 5 | x₁ there is no obstruction
        assert!(!exhaustive_residue_check(&ResidueProblem::for_pattern(&p, 5, &[])).is_unsat());
    }

    #[test]
    fn octic_is_one_mod_four() {
        let r = form_residue_check(&f_uv(), 4, |p| (p[0] + p[1]) % 2 == 1, 1);
        assert!(r.holds);
        assert_eq!(r.cases.len(), 8);
        // -w² is 0 or 3 mod 4
        assert!(power_residues(2, 4).iter().all(|s| (4 - s) % 4 != 1));
    }
}
