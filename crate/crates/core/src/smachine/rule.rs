//! S-rules `[U_1 → V_1, …, U_m → V_m]` and their application.
//!
//! Matching semantics for tape context inside a component:
//! - state letters of `U_i` must equal the word's state letters at
//!   components `l(i)..=r(i)`;
//! - tape words strictly between two state letters of `U_i` must equal the
//!   whole corresponding segment (this is how `p_1 δ q_1` tests a segment);
//! - context before the first / after the last state letter is applied as a
//!   free-group multiplication on the neighbouring segment: the left segment
//!   `s` becomes `s · prefix(U)^-1 · prefix(V)`, the right segment becomes
//!   `suffix(V) · suffix(U)^-1 · s`. This is what makes every application
//!   undoable by the inverse rule.

use std::fmt;

use thiserror::Error;

use super::hardware::{AdmissibleError, AdmissibleWord, Hardware};
use crate::word::{Letter, Symbol, Word};

pub const INVERSE_SUFFIX: &str = "^-1";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleComponent {
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SRule {
    pub name: String,
    pub components: Vec<RuleComponent>,
}

/// One side of a rule component split around its state letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSide {
    pub prefix: Word,
    pub states: Vec<Symbol>,
    /// Tape words between consecutive state letters.
    pub inner: Vec<Word>,
    pub suffix: Word,
}

impl SplitSide {
    pub fn split(w: &Word, hw: &Hardware) -> SplitSide {
        let mut prefix = Vec::new();
        let mut states = Vec::new();
        let mut inner = Vec::new();
        let mut current: Vec<Letter> = Vec::new();
        for l in w.letters() {
            if hw.is_state(l.symbol) {
                if states.is_empty() {
                    prefix = std::mem::take(&mut current);
                } else {
                    inner.push(Word::reduce(current.drain(..)));
                }
                states.push(l.symbol);
            } else {
                current.push(*l);
            }
        }
        if states.is_empty() {
            prefix = std::mem::take(&mut current);
        }
        SplitSide {
            prefix: Word::reduce(prefix),
            states,
            inner,
            suffix: Word::reduce(current),
        }
    }
}

/// A rule component resolved against a hardware.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledComponent {
    pub left: usize,
    pub right: usize,
    pub lhs: SplitSide,
    pub rhs: SplitSide,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule} component {component}: {reason}")]
    Malformed { rule: String, component: usize, reason: String },
    #[error("rule {rule}: components {first} and {second} violate r(i)<l(j)")]
    Order { rule: String, first: usize, second: usize },
}

impl SRule {
    pub fn new(name: impl Into<String>, components: Vec<(Word, Word)>) -> SRule {
        SRule {
            name: name.into(),
            components: components.into_iter().map(|(lhs, rhs)| RuleComponent { lhs, rhs }).collect(),
        }
    }

    /// Parses `[U1 -> V1 ; U2 -> V2]` (brackets optional).
    pub fn parse(name: &str, text: &str) -> Result<SRule, String> {
        let body = text.trim();
        let body = body.strip_prefix('[').unwrap_or(body);
        let body = body.strip_suffix(']').unwrap_or(body);
        let mut comps = Vec::new();
        for part in body.split(';') {
            if part.trim().is_empty() {
                continue;
            }
            let (l, r) = part.split_once("->").ok_or_else(|| format!("expected `->` in {part:?}"))?;
            let lhs = Word::parse_loose(l).map_err(|e| e.to_string())?;
            let rhs = Word::parse_loose(r).map_err(|e| e.to_string())?;
            comps.push((lhs, rhs));
        }
        if comps.is_empty() {
            return Err("rule has no components".to_string());
        }
        Ok(SRule::new(name, comps))
    }

    pub fn is_inverse_name(name: &str) -> bool {
        name.ends_with(INVERSE_SUFFIX)
    }

    pub fn base_name(&self) -> &str {
        self.name.strip_suffix(INVERSE_SUFFIX).unwrap_or(&self.name)
    }

    pub fn is_negative(&self) -> bool {
        SRule::is_inverse_name(&self.name)
    }

    /// Componentwise `V_i → U_i`; toggles the `^-1` suffix of the name.
    pub fn inverse(&self) -> SRule {
        let name = match self.name.strip_suffix(INVERSE_SUFFIX) {
            Some(base) => base.to_string(),
            None => format!("{}{INVERSE_SUFFIX}", self.name),
        };
        SRule {
            name,
            components: self
                .components
                .iter()
                .map(|c| RuleComponent { lhs: c.rhs.clone(), rhs: c.lhs.clone() })
                .collect(),
        }
    }

    /// Resolves components against `hw`, checking the structural invariants.
    pub fn compile(&self, hw: &Hardware) -> Result<Vec<CompiledComponent>, Vec<RuleError>> {
        let mut errors = Vec::new();
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            let bad = |reason: String| RuleError::Malformed { rule: self.name.clone(), component: ci + 1, reason };
            for l in c.lhs.letters().iter().chain(c.rhs.letters()) {
                if !hw.is_state(l.symbol) && !hw.tapes().iter().any(|y| y.contains(&l.symbol)) {
                    errors.push(bad(format!("letter {} not in hardware", l.symbol)));
                }
            }
            let lhs = SplitSide::split(&c.lhs, hw);
            let rhs = SplitSide::split(&c.rhs, hw);
            if lhs.states.is_empty() {
                errors.push(bad("U has no state letter".into()));
                continue;
            }
            let comps: Vec<usize> = lhs.states.iter().map(|s| hw.component_of(*s).unwrap()).collect();
            let left = comps[0];
            let right = *comps.last().unwrap();
            if comps.iter().enumerate().any(|(k, &j)| j != left + k) {
                errors.push(bad("state letters of U are not consecutive components in order".into()));
                continue;
            }
            let rcomps: Vec<usize> = rhs.states.iter().map(|s| hw.component_of(*s).unwrap()).collect();
            if rcomps.iter().any(|&j| j < left || j > right) {
                errors.push(bad("V has a state letter outside Q_l..Q_r".into()));
                continue;
            }
            if rcomps != comps {
                errors.push(bad("V must carry exactly one state letter per component of U".into()));
                continue;
            }
            if left == 0 && !(lhs.prefix.is_empty() && rhs.prefix.is_empty()) {
                errors.push(bad("context before the first state component".into()));
            }
            if right + 1 == hw.component_count() && !(lhs.suffix.is_empty() && rhs.suffix.is_empty()) {
                errors.push(bad("context after the last state component".into()));
            }
            let on_tape = |w: &Word, seg: usize| w.letters().iter().all(|l| hw.tape(seg).contains(&l.symbol));
            for side in [&lhs, &rhs] {
                if left > 0 && !on_tape(&side.prefix, left - 1) {
                    errors.push(bad(format!("prefix context not over Y {left}")));
                }
                if right < hw.tape_count() && !on_tape(&side.suffix, right) {
                    errors.push(bad(format!("suffix context not over Y {}", right + 1)));
                }
                for (k, w) in side.inner.iter().enumerate() {
                    if !on_tape(w, left + k) {
                        errors.push(bad(format!("inner context not over Y {}", left + k + 1)));
                    }
                }
            }
            out.push(CompiledComponent { left, right, lhs, rhs });
        }
        for (i, pair) in out.windows(2).enumerate() {
            if pair[0].right >= pair[1].left {
                errors.push(RuleError::Order { rule: self.name.clone(), first: i + 1, second: i + 2 });
            }
        }
        if errors.is_empty() {
            Ok(out)
        } else {
            Err(errors)
        }
    }

    /// State components touched by some `U_i`.
    pub fn touched_components(&self, hw: &Hardware) -> Vec<usize> {
        let mut out = Vec::new();
        for c in &self.components {
            let side = SplitSide::split(&c.lhs, hw);
            out.extend(side.states.iter().filter_map(|s| hw.component_of(*s)));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Display for SRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| format!("{} -> {}", c.lhs, c.rhs)).collect();
        write!(f, "[{}]", parts.join(" ; "))
    }
}

/// Region of the word spanned by one rule component (state components).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoMatchReason {
    State { component: usize, expected: Symbol, found: Symbol },
    Segment { segment: usize, expected: Word, found: Word },
    /// The rule does not compile against the hardware.
    IllFormed(String),
}

impl fmt::Display for NoMatchReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoMatchReason::State { component, expected, found } => {
                write!(f, "component {} holds {found}, rule needs {expected}", component + 1)
            }
            NoMatchReason::Segment { segment, expected, found } => {
                write!(f, "segment {} is `{found}`, rule needs `{expected}`", segment + 1)
            }
            NoMatchReason::IllFormed(msg) => write!(f, "ill-formed rule: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchResult {
    Match(Vec<Span>),
    /// `component` indexes the rule's component list.
    NoMatch { component: usize, reason: NoMatchReason },
}

impl MatchResult {
    pub fn is_match(&self) -> bool {
        matches!(self, MatchResult::Match(_))
    }
}

impl fmt::Display for MatchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchResult::Match(spans) => write!(f, "match ({} components)", spans.len()),
            MatchResult::NoMatch { component, reason } => {
                write!(f, "no match at rule component {}: {reason}", component + 1)
            }
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ApplyError {
    #[error("word not admissible: {0}")]
    NotAdmissible(#[from] AdmissibleError),
    #[error("rule {rule} does not apply: {result}")]
    NoMatch { rule: String, result: MatchResult },
}

fn compile_or_nomatch(rule: &SRule, hw: &Hardware) -> Result<Vec<CompiledComponent>, MatchResult> {
    rule.compile(hw).map_err(|errs| MatchResult::NoMatch {
        component: 0,
        reason: NoMatchReason::IllFormed(errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")),
    })
}

fn match_compiled(w: &AdmissibleWord, comps: &[CompiledComponent]) -> MatchResult {
    let mut spans = Vec::with_capacity(comps.len());
    for (ci, c) in comps.iter().enumerate() {
        for (k, &expected) in c.lhs.states.iter().enumerate() {
            let found = w.states[c.left + k];
            if found != expected {
                return MatchResult::NoMatch {
                    component: ci,
                    reason: NoMatchReason::State { component: c.left + k, expected, found },
                };
            }
        }
        for (k, expected) in c.lhs.inner.iter().enumerate() {
            let found = &w.segments[c.left + k];
            if found != expected {
                return MatchResult::NoMatch {
                    component: ci,
                    reason: NoMatchReason::Segment {
                        segment: c.left + k,
                        expected: expected.clone(),
                        found: found.clone(),
                    },
                };
            }
        }
        spans.push(Span { left: c.left, right: c.right });
    }
    MatchResult::Match(spans)
}

fn apply_compiled(w: &AdmissibleWord, comps: &[CompiledComponent]) -> AdmissibleWord {
    let mut out = w.clone();
    for c in comps {
        for (k, s) in c.rhs.states.iter().enumerate() {
            out.states[c.left + k] = *s;
        }
        for (k, seg) in c.rhs.inner.iter().enumerate() {
            out.segments[c.left + k] = seg.clone();
        }
        if c.left > 0 {
            let seg = &out.segments[c.left - 1];
            out.segments[c.left - 1] = seg.multiply(&c.lhs.prefix.inverse()).multiply(&c.rhs.prefix);
        }
        if c.right < out.segments.len() {
            let seg = &out.segments[c.right];
            out.segments[c.right] = c.rhs.suffix.multiply(&c.lhs.suffix.inverse()).multiply(seg);
        }
    }
    out
}

pub fn match_rule(w: &AdmissibleWord, rule: &SRule, hw: &Hardware) -> Result<MatchResult, AdmissibleError> {
    w.check(hw)?;
    Ok(match compile_or_nomatch(rule, hw) {
        Ok(comps) => match_compiled(w, &comps),
        Err(nm) => nm,
    })
}

pub fn apply_rule(w: &AdmissibleWord, rule: &SRule, hw: &Hardware) -> Result<AdmissibleWord, ApplyError> {
    w.check(hw)?;
    let comps = compile_or_nomatch(rule, hw).map_err(|result| ApplyError::NoMatch { rule: rule.name.clone(), result })?;
    match match_compiled(w, &comps) {
        MatchResult::Match(_) => Ok(apply_compiled(w, &comps)),
        nm => Err(ApplyError::NoMatch { rule: rule.name.clone(), result: nm }),
    }
}

/// A rule compiled once for repeated application (search loops).
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub name: String,
    comps: Vec<CompiledComponent>,
}

impl CompiledRule {
    pub fn new(rule: &SRule, hw: &Hardware) -> Result<CompiledRule, Vec<RuleError>> {
        Ok(CompiledRule { name: rule.name.clone(), comps: rule.compile(hw)? })
    }

    /// Applies to an already-validated word, `None` when the rule does not match.
    pub fn try_apply(&self, w: &AdmissibleWord) -> Option<AdmissibleWord> {
        match match_compiled(w, &self.comps) {
            MatchResult::Match(_) => Some(apply_compiled(w, &self.comps)),
            MatchResult::NoMatch { .. } => None,
        }
    }
}
