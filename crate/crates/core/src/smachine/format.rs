//! Line-oriented machine files.
//!
//! ```text
//! MACHINE S1
//! HARDWARE
//! Y 1: δ
//! Q 1: p1 p2 p3
//! RULES
//! rule rule1: [q1 -> δ^-2 q1 δ^2 ; r1 -> δ^-1 r1 δ]
//! ```
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::hardware::Hardware;
use super::machine::SMachine;
use super::rule::SRule;
use crate::word::Symbol;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

pub fn serialize_machine(m: &SMachine) -> String {
    let mut out = String::new();
    writeln!(out, "MACHINE {}", m.name).unwrap();
    writeln!(out, "HARDWARE").unwrap();
    let join = |set: &BTreeSet<Symbol>| set.iter().map(|s| s.name()).collect::<Vec<_>>().join(" ");
    for (i, y) in m.hardware.tapes().iter().enumerate() {
        writeln!(out, "Y {}: {}", i + 1, join(y)).unwrap();
    }
    for (i, q) in m.hardware.states().iter().enumerate() {
        writeln!(out, "Q {}: {}", i + 1, join(q)).unwrap();
    }
    writeln!(out, "RULES").unwrap();
    for r in m.positive_rules() {
        writeln!(out, "rule {}: {}", r.name, r).unwrap();
    }
    out
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Hardware,
    Rules,
}

fn indexed_set(line: usize, rest: &str, expected: usize) -> Result<BTreeSet<Symbol>, FormatError> {
    let (idx, body) = rest.split_once(':').ok_or_else(|| err(line, "expected `<index>: symbols`"))?;
    let idx: usize = idx.trim().parse().map_err(|_| err(line, format!("bad index {:?}", idx.trim())))?;
    if idx != expected {
        return Err(err(line, format!("expected index {expected}, found {idx}")));
    }
    body.split_whitespace()
        .map(|n| Symbol::try_intern(n).map_err(|e| err(line, e.to_string())))
        .collect()
}

pub fn parse_machine(text: &str) -> Result<SMachine, FormatError> {
    let mut name = String::from("machine");
    let mut section = Section::Preamble;
    let mut tapes = Vec::new();
    let mut states = Vec::new();
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t {
            "HARDWARE" => {
                section = Section::Hardware;
                continue;
            }
            "RULES" => {
                if section != Section::Hardware {
                    return Err(err(line, "RULES before HARDWARE"));
                }
                section = Section::Rules;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble => match t.strip_prefix("MACHINE") {
                Some(n) if !n.trim().is_empty() => name = n.trim().to_string(),
                _ => return Err(err(line, "expected `MACHINE <name>` or `HARDWARE`")),
            },
            Section::Hardware => {
                if let Some(rest) = t.strip_prefix("Y ") {
                    tapes.push(indexed_set(line, rest, tapes.len() + 1)?);
                } else if let Some(rest) = t.strip_prefix("Q ") {
                    states.push(indexed_set(line, rest, states.len() + 1)?);
                } else {
                    return Err(err(line, "expected `Y i: …` or `Q i: …`"));
                }
            }
            Section::Rules => {
                let rest = t.strip_prefix("rule ").ok_or_else(|| err(line, "expected `rule <name>: [...]`"))?;
                let (rname, body) = rest.split_once(':').ok_or_else(|| err(line, "expected `:` after rule name"))?;
                let r = SRule::parse(rname.trim(), body).map_err(|m| err(line, m))?;
                rules.push(r);
            }
        }
    }
    if section != Section::Rules {
        return Err(err(text.lines().count(), "missing RULES section"));
    }
    Ok(SMachine::new(name, Hardware::new(tapes, states), rules))
}
