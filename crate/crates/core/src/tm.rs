//! Multi-tape Turing machines in the normal form required before
//! compilation into an S-machine.
//!
//! Configurations of tape `i` are `E_i v F_q`; a command acts on every tape
//! at once. Per tape an action is one of
//! - `q -> q'` (state change),
//! - `a q -> q'` (erase the letter `a` left of the head, form 1),
//! - `q -> a q'` (the inverse of an erase),
//! - `E q -> E q'` (only at the left marker, form 2).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::word::{special, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    pub alphabet: BTreeSet<Symbol>,
    pub states: BTreeSet<Symbol>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TapeAction {
    Pure { from: Symbol, to: Symbol },
    Consume { letter: Symbol, from: Symbol, to: Symbol },
    Produce { letter: Symbol, from: Symbol, to: Symbol },
    Marker { from: Symbol, to: Symbol },
}

impl TapeAction {
    pub fn inverse(self) -> TapeAction {
        match self {
            TapeAction::Pure { from, to } => TapeAction::Pure { from: to, to: from },
            TapeAction::Consume { letter, from, to } => TapeAction::Produce { letter, from: to, to: from },
            TapeAction::Produce { letter, from, to } => TapeAction::Consume { letter, from: to, to: from },
            TapeAction::Marker { from, to } => TapeAction::Marker { from: to, to: from },
        }
    }

    pub fn states(self) -> (Symbol, Symbol) {
        match self {
            TapeAction::Pure { from, to }
            | TapeAction::Consume { from, to, .. }
            | TapeAction::Produce { from, to, .. }
            | TapeAction::Marker { from, to } => (from, to),
        }
    }

    pub fn is_pure(self) -> bool {
        matches!(self, TapeAction::Pure { .. })
    }
}

impl fmt::Display for TapeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TapeAction::Pure { from, to } => write!(f, "{from} -> {to}"),
            TapeAction::Consume { letter, from, to } => write!(f, "{letter} {from} -> {to}"),
            TapeAction::Produce { letter, from, to } => write!(f, "{from} -> {letter} {to}"),
            TapeAction::Marker { from, to } => write!(f, "E {from} -> E {to}"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Command {
    pub name: String,
    pub polarity: Polarity,
    pub actions: Vec<TapeAction>,
}

impl Command {
    pub fn inverse(&self) -> Command {
        Command {
            name: format!("{}^-1", self.name),
            polarity: self.polarity.flip(),
            actions: self.actions.iter().map(|a| a.inverse()).collect(),
        }
    }

    /// Tape carrying the erase / marker action, if any.
    pub fn active_tape(&self) -> Option<usize> {
        self.actions.iter().position(|a| !a.is_pure())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub name: String,
    pub tapes: Vec<Tape>,
    pub start: Vec<Symbol>,
    pub accept: Vec<Symbol>,
    pub commands: Vec<Command>,
}

/// Per tape: contents `v_i` and current state `q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub tapes: Vec<(Word, Symbol)>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("configuration has {found} tapes, machine has {expected}")]
    TapeCount { expected: usize, found: usize },
    #[error("tape {tape}: letter {letter} not in its alphabet")]
    Letter { tape: usize, letter: String },
    #[error("tape {tape}: {state} is not a state of this tape")]
    State { tape: usize, state: String },
}

impl Configuration {
    pub fn validate(&self, m: &TuringMachine) -> Result<(), ConfigError> {
        if self.tapes.len() != m.tapes.len() {
            return Err(ConfigError::TapeCount { expected: m.tapes.len(), found: self.tapes.len() });
        }
        for (i, ((v, q), tape)) in self.tapes.iter().zip(&m.tapes).enumerate() {
            if let Some(bad) = v.letters().iter().find(|l| !tape.alphabet.contains(&l.symbol)) {
                return Err(ConfigError::Letter { tape: i + 1, letter: bad.to_string() });
            }
            if !tape.states.contains(q) {
                return Err(ConfigError::State { tape: i + 1, state: q.to_string() });
            }
        }
        Ok(())
    }
}

impl TuringMachine {
    pub fn tape_count(&self) -> usize {
        self.tapes.len()
    }

    pub fn positive_commands(&self) -> impl Iterator<Item = &Command> {
        self.commands.iter().filter(|c| c.polarity == Polarity::Positive)
    }

    /// Input on tape 1, every tape in its start state.
    pub fn start_configuration(&self, input: &Word) -> Configuration {
        Configuration {
            tapes: self
                .start
                .iter()
                .enumerate()
                .map(|(i, q)| (if i == 0 { input.clone() } else { Word::empty() }, *q))
                .collect(),
        }
    }

    /// All tapes empty, every tape in its accept state.
    pub fn accept_configuration(&self) -> Configuration {
        Configuration { tapes: self.accept.iter().map(|q| (Word::empty(), *q)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Vec<String>),
    /// Declared by the machine author, not checked.
    Advisory(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Report {
    pub items: Vec<(&'static str, Verdict)>,
}

impl Lemma1Report {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|(_, v)| !matches!(v, Verdict::Fail(_)))
    }

    pub fn verdict(&self, item: &str) -> Option<&Verdict> {
        self.items.iter().find(|(n, _)| *n == item).map(|(_, v)| v)
    }
}

impl fmt::Display for Lemma1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.items {
            match v {
                Verdict::Pass => writeln!(f, "pass {name}")?,
                Verdict::Advisory(msg) => writeln!(f, "advisory {name}: {msg}")?,
                Verdict::Fail(msgs) => {
                    writeln!(f, "FAIL {name}")?;
                    for m in msgs {
                        writeln!(f, "  {m}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub const ITEM_SYMMETRIC: &str = "symmetric";
pub const ITEM_FORMS: &str = "command forms";
pub const ITEM_DISJOINT: &str = "disjoint alphabets";
pub const ITEM_EMPTY_ACCEPT: &str = "accepts only when all tapes are empty";

fn verdict(fails: Vec<String>) -> Verdict {
    if fails.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(fails)
    }
}

pub fn validate_tm(m: &TuringMachine) -> Lemma1Report {
    let k = m.tapes.len();

    let mut symmetry = Vec::new();
    for c in &m.commands {
        let inv = c.inverse();
        if !m.commands.iter().any(|d| d.actions == inv.actions && d.polarity == inv.polarity) {
            symmetry.push(format!("command {} has no inverse", c.name));
        }
    }

    let mut forms = Vec::new();
    for c in &m.commands {
        if c.actions.len() != k {
            forms.push(format!("command {}: {} actions for {k} tapes", c.name, c.actions.len()));
            continue;
        }
        let active: Vec<_> = c.actions.iter().filter(|a| !a.is_pure()).collect();
        if active.len() > 1 {
            forms.push(format!("command {}: more than one tape erases or touches E", c.name));
        }
        for (i, (a, tape)) in c.actions.iter().zip(&m.tapes).enumerate() {
            let (from, to) = a.states();
            for q in [from, to] {
                if !tape.states.contains(&q) {
                    forms.push(format!("command {}: {q} is not a state of tape {}", c.name, i + 1));
                }
            }
            match a {
                TapeAction::Consume { letter, .. } | TapeAction::Produce { letter, .. }
                    if !tape.alphabet.contains(letter) =>
                {
                    forms.push(format!("command {}: {letter} not in alphabet of tape {}", c.name, i + 1));
                }
                _ => {}
            }
            match (a, c.polarity) {
                (TapeAction::Consume { .. }, Polarity::Negative) => {
                    forms.push(format!("command {}: an erase must be positive", c.name))
                }
                (TapeAction::Produce { .. }, Polarity::Positive) => {
                    forms.push(format!("command {}: inverse of an erase must be negative", c.name))
                }
                _ => {}
            }
        }
    }

    let mut disjoint = Vec::new();
    let mut owner: BTreeMap<Symbol, String> = BTreeMap::new();
    let reserved = [special::delta(), special::alpha(), special::omega()];
    for (i, t) in m.tapes.iter().enumerate() {
        for (what, set) in [("alphabet", &t.alphabet), ("states", &t.states)] {
            for s in set {
                let here = format!("{what} {}", i + 1);
                if reserved.contains(s) || special::is_kappa(*s) || s.name() == "E" {
                    disjoint.push(format!("{here}: {s} is a reserved letter"));
                }
                if let Some(prev) = owner.insert(*s, here.clone()) {
                    disjoint.push(format!("{s} appears in {prev} and {here}"));
                }
            }
        }
    }
    for (i, (s, a)) in m.start.iter().zip(&m.accept).enumerate() {
        if i < k && !(m.tapes[i].states.contains(s) && m.tapes[i].states.contains(a)) {
            disjoint.push(format!("start/accept state of tape {} not among its states", i + 1));
        }
    }
    if m.start.len() != k || m.accept.len() != k {
        disjoint.push("START and ACCEPT need one state per tape".to_string());
    }

    Lemma1Report {
        items: vec![
            (ITEM_SYMMETRIC, verdict(symmetry)),
            (ITEM_FORMS, verdict(forms)),
            (ITEM_DISJOINT, verdict(disjoint)),
            (
                ITEM_EMPTY_ACCEPT,
                Verdict::Advisory("declared; the accept configuration is taken with all tapes empty".into()),
            ),
        ],
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TmFormatError {
    pub line: usize,
    pub message: String,
}

fn tm_err(line: usize, message: impl Into<String>) -> TmFormatError {
    TmFormatError { line, message: message.into() }
}

fn symbols(line: usize, text: &str) -> Result<Vec<Symbol>, TmFormatError> {
    text.split_whitespace()
        .map(|n| Symbol::try_intern(n).map_err(|e| tm_err(line, e.to_string())))
        .collect()
}

fn parse_action(line: usize, text: &str) -> Result<TapeAction, TmFormatError> {
    let (l, r) = text.split_once("->").ok_or_else(|| tm_err(line, format!("expected `->` in {text:?}")))?;
    let l = symbols(line, l)?;
    let r = symbols(line, r)?;
    let e = Symbol::intern("E");
    match (l.as_slice(), r.as_slice()) {
        ([m1, from], [m2, to]) if *m1 == e && *m2 == e => Ok(TapeAction::Marker { from: *from, to: *to }),
        ([from], [to]) => Ok(TapeAction::Pure { from: *from, to: *to }),
        ([letter, from], [to]) => Ok(TapeAction::Consume { letter: *letter, from: *from, to: *to }),
        ([from], [letter, to]) => Ok(TapeAction::Produce { letter: *letter, from: *from, to: *to }),
        _ => Err(tm_err(line, format!("unrecognised action {text:?}"))),
    }
}

fn indexed<'a>(line: usize, rest: &'a str, expected: usize) -> Result<&'a str, TmFormatError> {
    let (idx, body) = rest.split_once(':').ok_or_else(|| tm_err(line, "expected `<index>: …`"))?;
    match idx.trim().parse::<usize>() {
        Ok(i) if i == expected => Ok(body),
        _ => Err(tm_err(line, format!("expected index {expected}"))),
    }
}

/// Parses the TM text format (`TAPES`, `ALPHABET i:`, `STATES i:`, `START:`,
/// `ACCEPT:`, `COMMANDS` with `name +|-: act ; act`).
pub fn parse_tm(text: &str) -> Result<TuringMachine, TmFormatError> {
    let mut name = "tm".to_string();
    let mut k = None;
    let mut alphabets = Vec::new();
    let mut states = Vec::new();
    let mut start = Vec::new();
    let mut accept = Vec::new();
    let mut commands = Vec::new();
    let mut in_commands = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if in_commands {
            let (head, body) = t.split_once(':').ok_or_else(|| tm_err(line, "expected `name +|-: actions`"))?;
            let mut head = head.split_whitespace();
            let cname = head.next().ok_or_else(|| tm_err(line, "missing command name"))?;
            let polarity = match head.next() {
                Some("+") => Polarity::Positive,
                Some("-") => Polarity::Negative,
                _ => return Err(tm_err(line, "expected polarity `+` or `-` after the command name")),
            };
            let actions = body.split(';').map(|a| parse_action(line, a)).collect::<Result<Vec<_>, _>>()?;
            commands.push(Command { name: cname.to_string(), polarity, actions });
            continue;
        }
        if let Some(rest) = t.strip_prefix("MACHINE") {
            name = rest.trim().to_string();
        } else if let Some(rest) = t.strip_prefix("TAPES") {
            k = Some(rest.trim().parse::<usize>().map_err(|_| tm_err(line, "bad tape count"))?);
        } else if let Some(rest) = t.strip_prefix("ALPHABET") {
            alphabets.push(symbols(line, indexed(line, rest, alphabets.len() + 1)?)?.into_iter().collect());
        } else if let Some(rest) = t.strip_prefix("STATES") {
            states.push(symbols(line, indexed(line, rest, states.len() + 1)?)?.into_iter().collect());
        } else if let Some(rest) = t.strip_prefix("START:") {
            start = symbols(line, rest)?;
        } else if let Some(rest) = t.strip_prefix("ACCEPT:") {
            accept = symbols(line, rest)?;
        } else if t == "COMMANDS" {
            in_commands = true;
        } else {
            return Err(tm_err(line, format!("unexpected line {t:?}")));
        }
    }
    let k = k.ok_or_else(|| tm_err(1, "missing TAPES"))?;
    if alphabets.len() != k || states.len() != k {
        return Err(tm_err(text.lines().count(), format!("expected {k} ALPHABET and STATES lines")));
    }
    let tapes = alphabets.into_iter().zip(states).map(|(alphabet, states)| Tape { alphabet, states }).collect();
    Ok(TuringMachine { name, tapes, start, accept, commands })
}

pub fn serialize_tm(m: &TuringMachine) -> String {
    let join = |it: &mut dyn Iterator<Item = &Symbol>| it.map(|s| s.name()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    writeln!(out, "MACHINE {}", m.name).unwrap();
    writeln!(out, "TAPES {}", m.tapes.len()).unwrap();
    for (i, t) in m.tapes.iter().enumerate() {
        writeln!(out, "ALPHABET {}: {}", i + 1, join(&mut t.alphabet.iter())).unwrap();
    }
    for (i, t) in m.tapes.iter().enumerate() {
        writeln!(out, "STATES {}: {}", i + 1, join(&mut t.states.iter())).unwrap();
    }
    writeln!(out, "START: {}", join(&mut m.start.iter())).unwrap();
    writeln!(out, "ACCEPT: {}", join(&mut m.accept.iter())).unwrap();
    writeln!(out, "COMMANDS").unwrap();
    for c in &m.commands {
        let acts: Vec<String> = c.actions.iter().map(|a| a.to_string()).collect();
        writeln!(out, "{} {}: {}", c.name, c.polarity.as_str(), acts.join(" ; ")).unwrap();
    }
    out
}

pub mod fixtures {
    //! Bundled machines.

    use super::{parse_tm, TuringMachine};

    pub const UNARY_TEXT: &str = include_str!("../fixtures/unary.tm");
    pub const TWO_TAPE_TEXT: &str = include_str!("../fixtures/two_tape.tm");

    /// One tape over `{a}`: erases `a`'s, accepts at the left marker.
    pub fn unary() -> TuringMachine {
        parse_tm(UNARY_TEXT).expect("bundled fixture")
    }

    pub fn two_tape() -> TuringMachine {
        parse_tm(TWO_TAPE_TEXT).expect("bundled fixture")
    }
}
