use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use super::hardware::{AdmissibleWord, Hardware};
use super::rule::{apply_rule, ApplyError, CompiledRule, MatchResult, SRule};

/// Hardware plus the positive rules; inverses are generated on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMachine {
    pub name: String,
    pub hardware: Hardware,
    rules: Vec<SRule>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        writeln!(f, "invalid, {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("step {step}: rule {rule}: {result}")]
    NoMatch { step: usize, rule: String, result: MatchResult },
    #[error("step {step}: {source}")]
    Apply { step: usize, source: ApplyError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub words: Vec<AdmissibleWord>,
    pub rules: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reach {
    pub words: BTreeSet<AdmissibleWord>,
    pub truncated: bool,
}

impl SMachine {
    /// Rules given here are the positive rules; a rule named with a `^-1`
    /// suffix is stored under its base name in inverted form, and exact
    /// duplicates are dropped.
    pub fn new(name: impl Into<String>, hardware: Hardware, rules: Vec<SRule>) -> SMachine {
        let mut out: Vec<SRule> = Vec::new();
        for r in rules.into_iter().map(|r| if r.is_negative() { r.inverse() } else { r }) {
            if !out.contains(&r) {
                out.push(r);
            }
        }
        let rules = out;
        SMachine { name: name.into(), hardware, rules }
    }

    pub fn positive_rules(&self) -> &[SRule] {
        &self.rules
    }

    /// Positive rules interleaved with their inverses.
    pub fn all_rules(&self) -> Vec<SRule> {
        self.rules.iter().flat_map(|r| [r.clone(), r.inverse()]).collect()
    }

    pub fn rule(&self, name: &str) -> Option<SRule> {
        let base = name.strip_suffix(super::rule::INVERSE_SUFFIX);
        let r = self.rules.iter().find(|r| r.name == base.unwrap_or(name))?;
        Some(if base.is_some() { r.inverse() } else { r.clone() })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = self.hardware.violations();
        let mut seen = HashSet::new();
        for r in &self.rules {
            if !seen.insert(r.name.as_str()) {
                violations.push(format!("rule {}: duplicate name", r.name));
            }
            if let Err(errs) = r.compile(&self.hardware) {
                violations.extend(errs.iter().map(|e| e.to_string()));
            }
            // the stored inverse must be the componentwise inversion
            if r.inverse().inverse() != *r {
                violations.push(format!("rule {}: inverse is not an involution", r.name));
            }
        }
        ValidationReport { violations }
    }

    pub fn apply(&self, w: &AdmissibleWord, rule: &str) -> Result<AdmissibleWord, RunError> {
        let r = self.rule(rule).ok_or_else(|| RunError::UnknownRule(rule.to_string()))?;
        apply_rule(w, &r, &self.hardware).map_err(|source| match source {
            ApplyError::NoMatch { rule, result } => RunError::NoMatch { step: 0, rule, result },
            other => RunError::Apply { step: 0, source: other },
        })
    }

    pub fn run<S: AsRef<str>>(&self, start: &AdmissibleWord, rules: &[S]) -> Result<Trace, RunError> {
        let mut trace = Trace { words: vec![start.clone()], rules: Vec::new() };
        for (step, name) in rules.iter().enumerate() {
            let name = name.as_ref();
            let r = self.rule(name).ok_or_else(|| RunError::UnknownRule(name.to_string()))?;
            let next = apply_rule(trace.words.last().unwrap(), &r, &self.hardware).map_err(|e| match e {
                ApplyError::NoMatch { rule, result } => RunError::NoMatch { step, rule, result },
                other => RunError::Apply { step, source: other },
            })?;
            trace.words.push(next);
            trace.rules.push(r.name);
        }
        Ok(trace)
    }

    /// All words reachable in at most `max_depth` applications, capped at
    /// `max_states` words. Frontiers are expanded in parallel but merged in
    /// sorted order, so the result (including truncation) is independent of
    /// the thread count.
    pub fn reachable(&self, start: &AdmissibleWord, max_depth: usize, max_states: usize) -> Reach {
        let compiled: Vec<CompiledRule> = self
            .all_rules()
            .iter()
            .filter_map(|r| CompiledRule::new(r, &self.hardware).ok())
            .collect();
        let mut words = BTreeSet::new();
        words.insert(start.clone());
        let mut frontier = vec![start.clone()];
        let mut truncated = false;
        for _ in 0..max_depth {
            if frontier.is_empty() || truncated {
                break;
            }
            let successors: Vec<Vec<AdmissibleWord>> = frontier
                .par_iter()
                .map(|w| compiled.iter().filter_map(|r| r.try_apply(w)).collect())
                .collect();
            let mut next = BTreeSet::new();
            for w in successors.into_iter().flatten() {
                if !words.contains(&w) {
                    next.insert(w);
                }
            }
            for w in next.iter() {
                if words.len() >= max_states {
                    truncated = true;
                    break;
                }
                words.insert(w.clone());
            }
            frontier = next.into_iter().filter(|w| words.contains(w)).collect();
        }
        Reach { words, truncated }
    }
}
