//! Derivations by elementary moves and their checker.
//!
//! Words inside a derivation are raw letter sequences: a free insertion
//! creates a cancelling pair, so intermediate words need not be reduced.
//!
//! `RelatorApply { id, rotation, inverted, pos, len }` takes relator `r`,
//! inverts it if asked, rotates it left by `rotation` to get `c`, splits
//! `c = u · v^-1` with `|u| = len`, and replaces the occurrence of `u` at
//! `pos` by `v`.
//!
//! File format: a `START <word>` line followed by one move per line,
//! `INS pos x`, `DEL pos` or `REL id rot inv pos len` (`inv` is 0 or 1).

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::presentation::GroupPresentation;
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Inserts `letter letter^-1` before position `pos`.
    FreeInsert { pos: usize, letter: Letter },
    /// Deletes the cancelling pair at `pos`, `pos + 1`.
    FreeDelete { pos: usize },
    RelatorApply { id: usize, rotation: usize, inverted: bool, pos: usize, len: usize },
}

impl Move {
    pub fn is_relator(&self) -> bool {
        matches!(self, Move::RelatorApply { .. })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::FreeInsert { pos, letter } => write!(f, "INS {pos} {letter}"),
            Move::FreeDelete { pos } => write!(f, "DEL {pos}"),
            Move::RelatorApply { id, rotation, inverted, pos, len } => {
                write!(f, "REL {id} {rotation} {} {pos} {len}", u8::from(inverted))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub start: Word,
    pub moves: Vec<Move>,
}

impl Derivation {
    pub fn new(start: Word) -> Derivation {
        Derivation { start, moves: Vec::new() }
    }

    pub fn area(&self) -> usize {
        self.moves.iter().filter(|m| m.is_relator()).count()
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StepReason {
    #[error("no relator with id {0}")]
    NoRelator(usize),
    #[error("rotation {rotation} or length {len} out of range for a relator of length {relator_len}")]
    BadSplit { rotation: usize, len: usize, relator_len: usize },
    #[error("position {pos} out of range for a word of length {word_len}")]
    OutOfRange { pos: usize, word_len: usize },
    #[error("mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("letters at {0} and {} do not cancel", .0 + 1)]
    NotCancelling(usize),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("move {index}: {reason}")]
pub struct StepError {
    pub index: usize,
    pub reason: StepReason,
}

/// Result of a successful check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checked {
    /// Final raw word.
    pub raw_end: Vec<Letter>,
    /// Final word, freely reduced.
    pub end_word: Word,
    pub area: usize,
    /// Longest raw intermediate word.
    pub max_len: usize,
}

/// `(u, v)` of a relator application.
pub fn relator_pieces(
    p: &GroupPresentation,
    id: usize,
    rotation: usize,
    inverted: bool,
    len: usize,
) -> Result<(Vec<Letter>, Vec<Letter>), StepReason> {
    let r = p.relators.get(id).ok_or(StepReason::NoRelator(id))?;
    let base = if inverted { r.word.inverse() } else { r.word.clone() };
    let l = base.letters();
    if (rotation >= l.len() && !l.is_empty()) || len > l.len() {
        return Err(StepReason::BadSplit { rotation, len, relator_len: l.len() });
    }
    let c: Vec<Letter> = l[rotation..].iter().chain(&l[..rotation]).copied().collect();
    let u = c[..len].to_vec();
    let v = c[len..].iter().rev().map(|x| x.inverse()).collect();
    Ok((u, v))
}

fn flat(letters: &[Letter]) -> String {
    if letters.is_empty() {
        "1".to_string()
    } else {
        letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Applies one move to a raw word in place.
pub fn apply_move(p: &GroupPresentation, word: &mut Vec<Letter>, m: &Move) -> Result<(), StepReason> {
    match *m {
        Move::FreeInsert { pos, letter } => {
            if pos > word.len() {
                return Err(StepReason::OutOfRange { pos, word_len: word.len() });
            }
            word.splice(pos..pos, [letter, letter.inverse()]);
        }
        Move::FreeDelete { pos } => {
            if pos + 1 >= word.len() {
                return Err(StepReason::OutOfRange { pos, word_len: word.len() });
            }
            if !word[pos].cancels(word[pos + 1]) {
                return Err(StepReason::NotCancelling(pos));
            }
            word.drain(pos..pos + 2);
        }
        Move::RelatorApply { id, rotation, inverted, pos, len } => {
            let (u, v) = relator_pieces(p, id, rotation, inverted, len)?;
            if pos + u.len() > word.len() {
                return Err(StepReason::OutOfRange { pos, word_len: word.len() });
            }
            if word[pos..pos + u.len()] != u[..] {
                return Err(StepReason::Mismatch { expected: flat(&u), found: flat(&word[pos..pos + u.len()]) });
            }
            word.splice(pos..pos + u.len(), v);
        }
    }
    Ok(())
}

/// Replays every move, calling `visit` with the index and the word after it.
pub fn replay(
    p: &GroupPresentation,
    d: &Derivation,
    mut visit: impl FnMut(usize, &[Letter]),
) -> Result<Checked, StepError> {
    let mut word = d.start.letters().to_vec();
    let mut max_len = word.len();
    for (index, m) in d.moves.iter().enumerate() {
        apply_move(p, &mut word, m).map_err(|reason| StepError { index, reason })?;
        max_len = max_len.max(word.len());
        visit(index, &word);
    }
    Ok(Checked { end_word: Word::reduce(word.iter().copied()), raw_end: word, area: d.area(), max_len })
}

pub fn check_derivation(p: &GroupPresentation, d: &Derivation) -> Result<Checked, StepError> {
    replay(p, d, |_, _| {})
}

/// `FreeDelete` moves that freely reduce `word`, always removing the
/// leftmost cancelling pair. `word` is reduced in place.
pub fn reduce_moves(word: &mut Vec<Letter>) -> Vec<Move> {
    let mut moves = Vec::new();
    let mut i = 0;
    while i + 1 < word.len() {
        if word[i].cancels(word[i + 1]) {
            moves.push(Move::FreeDelete { pos: i });
            word.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    moves
}

/// `FreeInsert` moves turning `reduce(raw)` into `raw`, positions relative
/// to the start of the reduced word.
pub fn expand_moves(raw: &[Letter]) -> Vec<Move> {
    let mut w = raw.to_vec();
    let mut deletions = Vec::new();
    let mut i = 0;
    while i + 1 < w.len() {
        if w[i].cancels(w[i + 1]) {
            deletions.push(Move::FreeInsert { pos: i, letter: w[i] });
            w.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    deletions.reverse();
    deletions
}

/// Shifts every position in `moves` by `offset`.
pub fn shift_moves(moves: &[Move], offset: usize) -> Vec<Move> {
    moves
        .iter()
        .map(|m| match *m {
            Move::FreeInsert { pos, letter } => Move::FreeInsert { pos: pos + offset, letter },
            Move::FreeDelete { pos } => Move::FreeDelete { pos: pos + offset },
            Move::RelatorApply { id, rotation, inverted, pos, len } => {
                Move::RelatorApply { id, rotation, inverted, pos: pos + offset, len }
            }
        })
        .collect()
}

/// Finds `(id, rotation, inverted)` such that the relator application with
/// `len = u.len()` replaces `u` by `v`.
pub fn find_application(p: &GroupPresentation, u: &[Letter], v: &[Letter]) -> Option<Move> {
    let want: Vec<Letter> = u.iter().copied().chain(v.iter().rev().map(|x| x.inverse())).collect();
    for (id, r) in p.relators.iter().enumerate() {
        if r.word.len() != want.len() {
            continue;
        }
        for inverted in [false, true] {
            for rotation in 0..want.len().max(1) {
                if relator_pieces(p, id, rotation, inverted, u.len()).is_ok_and(|(a, b)| a == u && b == v) {
                    return Some(Move::RelatorApply { id, rotation, inverted, pos: 0, len: u.len() });
                }
            }
        }
    }
    None
}

/// Sets the position of a relator move.
pub fn at(m: Move, at_pos: usize) -> Move {
    match m {
        Move::RelatorApply { id, rotation, inverted, len, .. } => Move::RelatorApply { id, rotation, inverted, pos: at_pos, len },
        Move::FreeInsert { letter, .. } => Move::FreeInsert { pos: at_pos, letter },
        Move::FreeDelete { .. } => Move::FreeDelete { pos: at_pos },
    }
}

/// Rewrites relator ids of `d` (over `from`) into ids of `to`, matching
/// relators by their stored words.
pub fn remap(d: &Derivation, from: &GroupPresentation, to: &GroupPresentation) -> Option<Derivation> {
    let mut moves = Vec::with_capacity(d.moves.len());
    for m in &d.moves {
        moves.push(match *m {
            Move::RelatorApply { id, rotation, inverted, pos, len } => {
                let word = &from.relators.get(id)?.word;
                let id = to.relators.iter().position(|r| &r.word == word)?;
                Move::RelatorApply { id, rotation, inverted, pos, len }
            }
            other => other,
        });
    }
    Some(Derivation { start: d.start.clone(), moves })
}

pub fn serialize(d: &Derivation) -> String {
    let mut out = String::new();
    if d.start.is_empty() {
        out.push_str("START\n");
    } else {
        writeln!(out, "START {}", d.start).unwrap();
    }
    for m in &d.moves {
        writeln!(out, "{m}").unwrap();
    }
    out
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn num(line: usize, tok: Option<&str>, what: &str) -> Result<usize, ParseError> {
    let t = tok.ok_or_else(|| ParseError { line, message: format!("missing {what}") })?;
    t.parse().map_err(|_| ParseError { line, message: format!("bad {what} {t:?}") })
}

pub fn parse(text: &str) -> Result<Derivation, ParseError> {
    let mut start: Option<Word> = None;
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let head = toks.next().unwrap_or_default();
        if start.is_none() {
            if head != "START" {
                return Err(ParseError { line, message: "expected `START <word>`".into() });
            }
            let rest = t["START".len()..].trim();
            let w = Word::parse_loose(rest).map_err(|e| ParseError { line, message: e.to_string() })?;
            start = Some(w);
            continue;
        }
        let m = match head {
            "INS" => {
                let pos = num(line, toks.next(), "position")?;
                let tok = toks.next().ok_or_else(|| ParseError { line, message: "missing letter".into() })?;
                let w = Word::parse_loose(tok).map_err(|e| ParseError { line, message: e.to_string() })?;
                if w.len() != 1 {
                    return Err(ParseError { line, message: format!("expected a single letter, found {tok:?}") });
                }
                Move::FreeInsert { pos, letter: w.letters()[0] }
            }
            "DEL" => Move::FreeDelete { pos: num(line, toks.next(), "position")? },
            "REL" => {
                let id = num(line, toks.next(), "relator id")?;
                let rotation = num(line, toks.next(), "rotation")?;
                let inverted = match num(line, toks.next(), "inversion flag")? {
                    0 => false,
                    1 => true,
                    _ => return Err(ParseError { line, message: "inversion flag must be 0 or 1".into() }),
                };
                let pos = num(line, toks.next(), "position")?;
                let len = num(line, toks.next(), "length")?;
                Move::RelatorApply { id, rotation, inverted, pos, len }
            }
            other => return Err(ParseError { line, message: format!("unknown move {other:?}") }),
        };
        if toks.next().is_some() {
            return Err(ParseError { line, message: "trailing tokens".into() });
        }
        moves.push(m);
    }
    let start = start.ok_or_else(|| ParseError { line: text.lines().count().max(1), message: "missing START line".into() })?;
    Ok(Derivation { start, moves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::s4_fragment;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn empty_derivation() {
        let p = s4_fragment();
        let d = Derivation::new(w("s2 r1"));
        let c = check_derivation(&p, &d).unwrap();
        assert_eq!(c.end_word, w("s2 r1"));
        assert_eq!(c.area, 0);
    }

    #[test]
    fn single_conjugation() {
        let p = s4_fragment();
        let start = w("rule4^-1 s2 rule4");
        let m = find_application(&p, start.letters(), w("d^-1 s2 d").letters()).unwrap();
        let d = Derivation { start, moves: vec![m] };
        let c = check_derivation(&p, &d).unwrap();
        assert_eq!(c.end_word, w("d^-1 s2 d"));
        assert_eq!(c.area, 1);
    }

    #[test]
    fn mismatch_is_reported() {
        let p = s4_fragment();
        let m = find_application(&p, w("rule4^-1 s2 rule4").letters(), w("d^-1 s2 d").letters()).unwrap();
        let d = Derivation { start: w("rule4^-1 r1 rule4"), moves: vec![m] };
        let e = check_derivation(&p, &d).unwrap_err();
        assert_eq!(e.index, 0);
        assert!(matches!(e.reason, StepReason::Mismatch { .. }));
    }

    #[test]
    fn free_moves() {
        let p = s4_fragment();
        let x = w("s2").letters()[0];
        let d = Derivation { start: w("r1"), moves: vec![Move::FreeInsert { pos: 1, letter: x }, Move::FreeDelete { pos: 1 }] };
        assert_eq!(check_derivation(&p, &d).unwrap().raw_end, w("r1").letters());
        let bad = Derivation { start: w("r1 s2"), moves: vec![Move::FreeDelete { pos: 0 }] };
        assert!(matches!(check_derivation(&p, &bad).unwrap_err().reason, StepReason::NotCancelling(0)));
    }

    #[test]
    fn expand_then_reduce() {
        let raw: Vec<Letter> = w("s2 d").letters().iter().chain(w("d^-1 r1 r1^-1").letters()).copied().collect();
        let mut word = Word::reduce(raw.iter().copied()).letters().to_vec();
        let p = GroupPresentation::new();
        for m in expand_moves(&raw) {
            apply_move(&p, &mut word, &m).unwrap();
        }
        assert_eq!(word, raw);
        reduce_moves(&mut word);
        assert_eq!(word, w("s2").letters());
    }

    #[test]
    fn file_round_trip() {
        let d = Derivation {
            start: w("rule4^-1 s2 rule4"),
            moves: vec![
                Move::RelatorApply { id: 3, rotation: 2, inverted: true, pos: 0, len: 3 },
                Move::FreeInsert { pos: 1, letter: w("d").letters()[0].inverse() },
                Move::FreeDelete { pos: 1 },
            ],
        };
        let text = serialize(&d);
        assert_eq!(parse(&text).unwrap(), d);
        assert_eq!(parse("START\n").unwrap(), Derivation::new(Word::empty()));
        assert_eq!(parse("START\nREL 1 2\n").unwrap_err().line, 2);
    }
}
