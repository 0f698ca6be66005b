//! The machines S1–S4 used to build S4(τ) copies.

use std::collections::BTreeSet;

use thiserror::Error;

use super::hardware::Hardware;
use super::machine::SMachine;
use super::rule::SRule;
use crate::word::{special, Symbol, Word};

pub const NAMES: [&str; 4] = ["S1", "S2", "S3", "S4"];

/// States shared by the two copies of S3 inside S4.
pub const SHARED_S4_STATES: [&str; 6] = ["p3", "q3", "r3", "s3", "t3", "u3"];

const LETTERS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuiltinOptions {
    /// Use the printed first component `q_2 → p_1` of S3 rule 5 instead of
    /// `p_2 → p_1`. The printed form does not compile (it moves a state letter
    /// between components); it exists to reproduce the listing verbatim.
    pub literal_s3_rule5: bool,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("unknown built-in machine {0} (expected one of S1, S2, S3, S4)")]
pub struct UnknownMachine(pub String);

pub fn builtin(name: &str) -> Result<SMachine, UnknownMachine> {
    builtin_with(name, BuiltinOptions::default())
}

pub fn builtin_with(name: &str, opts: BuiltinOptions) -> Result<SMachine, UnknownMachine> {
    match name.to_ascii_uppercase().as_str() {
        "S1" => Ok(s1()),
        "S2" => Ok(s2()),
        "S3" => Ok(s3(opts)),
        "S4" => Ok(s4(opts)),
        _ => Err(UnknownMachine(name.to_string())),
    }
}

fn delta_tapes() -> Vec<BTreeSet<Symbol>> {
    vec![BTreeSet::from([special::delta()]); 5]
}

fn indexed_states(indices: &[&str]) -> Vec<BTreeSet<Symbol>> {
    LETTERS
        .iter()
        .map(|l| indices.iter().map(|i| Symbol::intern(&format!("{l}{i}"))).collect())
        .collect()
}

fn rule(name: &str, text: &str) -> SRule {
    SRule::parse(name, text).expect("built-in rule text")
}

fn p1_rules() -> Vec<SRule> {
    vec![
        rule("rule1", "[q1 -> d^-2 q1 d^2 ; r1 -> d^-1 r1 d]"),
        rule("rule2", "[p1 q1 -> p2 q2 ; r1 -> r2 ; s1 -> s2 ; t1 -> t2 ; u1 -> d u2]"),
        rule("rule3", "[p1 d q1 -> p3 d q3 ; r1 -> r3 ; s1 -> s3 ; t1 -> t3 ; u1 -> u3]"),
    ]
}

fn s1() -> SMachine {
    let hw = Hardware::new(delta_tapes(), indexed_states(&["1", "2", "3"]));
    SMachine::new("S1", hw, p1_rules())
}

fn s2() -> SMachine {
    let hw = Hardware::new(delta_tapes(), indexed_states(&["1", "2"]));
    SMachine::new(
        "S2",
        hw,
        vec![
            rule("rule1", "[q2 -> d q2 d^-1 ; s2 -> d^-1 s2 d]"),
            rule("rule2", "[p2 -> p1 ; q2 r2 s2 -> q1 r1 s1 ; t2 -> t1 ; u2 -> u1]"),
        ],
    )
}

fn s3_rules(opts: BuiltinOptions) -> Vec<SRule> {
    let mut rules = p1_rules();
    rules.push(rule("rule4", "[q2 -> d q2 d^-1 ; s2 -> d^-1 s2 d]"));
    let first = if opts.literal_s3_rule5 { "q2 -> p1" } else { "p2 -> p1" };
    rules.push(rule("rule5", &format!("[{first} ; q2 r2 s2 -> q1 r1 s1 ; t2 -> t1 ; u2 -> u1]")));
    rules
}

fn s3(opts: BuiltinOptions) -> SMachine {
    let hw = Hardware::new(delta_tapes(), indexed_states(&["1", "2", "3"]));
    SMachine::new("S3", hw, s3_rules(opts))
}

/// Adds `'` to every state letter except the shared ones.
pub fn prime_state(s: Symbol) -> Symbol {
    if SHARED_S4_STATES.contains(&s.name()) {
        s
    } else {
        Symbol::intern(&format!("{}'", s.name()))
    }
}

fn rename_word(w: &Word, f: &impl Fn(Symbol) -> Symbol, is_state: &impl Fn(Symbol) -> bool) -> Word {
    w.letters()
        .iter()
        .map(|l| if is_state(l.symbol) { crate::word::Letter::new(f(l.symbol), l.positive) } else { *l })
        .collect()
}

/// Renames state letters of a rule; `suffix` is appended to its name.
pub fn rename_rule(
    r: &SRule,
    suffix: &str,
    f: &impl Fn(Symbol) -> Symbol,
    is_state: &impl Fn(Symbol) -> bool,
) -> SRule {
    SRule::new(
        format!("{}{suffix}", r.base_name()),
        r.components
            .iter()
            .map(|c| (rename_word(&c.lhs, f, is_state), rename_word(&c.rhs, f, is_state)))
            .collect(),
    )
}

fn s4(opts: BuiltinOptions) -> SMachine {
    let s3 = s3(opts);
    let hw3 = &s3.hardware;
    let states: Vec<BTreeSet<Symbol>> = hw3
        .states()
        .iter()
        .map(|q| q.iter().flat_map(|s| [*s, prime_state(*s)]).collect())
        .collect();
    let hw = Hardware::new(delta_tapes(), states);
    let is_state = |s: Symbol| hw3.is_state(s);
    let mut rules = s3.positive_rules().to_vec();
    rules.extend(s3.positive_rules().iter().map(|r| rename_rule(r, "'", &prime_state, &is_state)));
    SMachine::new("S4", hw, rules)
}
