//! Group presentations of S-machines.
//!
//! Generators are the state letters, tape letters, α/ω/δ, κ_1..κ_2N and one
//! rule letter per positive rule. Relators come in four families: transition
//! `τ^-1 U τ V^-1`, fixed-letter `τ^-1 q τ q^-1`, auxiliary `τ^-1 x τ x^-1`
//! and the hub `K(W0)`. Relators are kept cyclically reduced in canonical
//! rotation.
//!
//! File format:
//! ```text
//! GENERATORS
//! state: p1 p2
//! tape: a
//! special: α δ ω
//! kappa:
//! rule: rule1
//! RELATORS
//! transition: rule1^-1 q1 rule1 δ^-2 q1^-1 δ^2
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::encode::{self, EncodeError};
use crate::smachine::{AdmissibleError, AdmissibleWord, SMachine};
use crate::word::{special, Alphabet, Kind, Letter, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Transition,
    FixedLetter,
    Auxiliary,
    Hub,
}

impl Tag {
    pub const ALL: [Tag; 4] = [Tag::Transition, Tag::FixedLetter, Tag::Auxiliary, Tag::Hub];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Transition => "transition",
            Tag::FixedLetter => "fixed-letter",
            Tag::Auxiliary => "auxiliary",
            Tag::Hub => "hub",
        }
    }

    pub fn from_name(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relator {
    pub word: Word,
    pub tag: Tag,
}

/// Generator classes in file order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GenClass {
    State,
    Tape,
    Special,
    Kappa,
    Rule,
}

impl GenClass {
    pub const ALL: [GenClass; 5] = [GenClass::State, GenClass::Tape, GenClass::Special, GenClass::Kappa, GenClass::Rule];

    pub fn as_str(self) -> &'static str {
        match self {
            GenClass::State => "state",
            GenClass::Tape => "tape",
            GenClass::Special => "special",
            GenClass::Kappa => "kappa",
            GenClass::Rule => "rule",
        }
    }

    fn kind(self) -> Kind {
        match self {
            GenClass::State => Kind::State,
            GenClass::Tape => Kind::Tape,
            GenClass::Special | GenClass::Kappa => Kind::Special,
            GenClass::Rule => Kind::Rule,
        }
    }

    pub fn of(s: Symbol, kind: Kind) -> GenClass {
        match kind {
            Kind::State => GenClass::State,
            Kind::Tape => GenClass::Tape,
            Kind::Rule => GenClass::Rule,
            Kind::Special if special::is_kappa(s) => GenClass::Kappa,
            Kind::Special => GenClass::Special,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Alphabet,
    pub relators: Vec<Relator>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("W0 is not admissible: {0}")]
    NotAdmissible(#[from] AdmissibleError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
}

/// Least rotation of `w` or `w^-1` in letter order. `w` must be cyclically
/// reduced.
pub fn canonical_rotation(w: &Word) -> Word {
    let mut best: Option<Vec<Letter>> = None;
    for cand in [w.clone(), w.inverse()] {
        let l = cand.letters();
        for k in 0..l.len().max(1) {
            let rot: Vec<Letter> = l[k..].iter().chain(&l[..k]).copied().collect();
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    Word::reduce(best.unwrap_or_default())
}

fn normalize(w: Word) -> Word {
    canonical_rotation(&w.cyclic_reduce())
}

pub fn rule_symbol(name: &str) -> Symbol {
    Symbol::intern(name)
}

impl GroupPresentation {
    pub fn new() -> GroupPresentation {
        GroupPresentation::default()
    }

    pub fn generators_of(&self, class: GenClass) -> Vec<Symbol> {
        self.generators.symbols().filter(|(s, k)| GenClass::of(*s, *k) == class).map(|(s, _)| s).collect()
    }

    pub fn count(&self, tag: Tag) -> usize {
        self.relators.iter().filter(|r| r.tag == tag).count()
    }

    /// Index of a relator equal to `w` up to rotation and inversion.
    pub fn find(&self, w: &Word) -> Option<usize> {
        let c = normalize(w.clone());
        self.relators.iter().position(|r| normalize(r.word.clone()) == c)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.find(w).is_some()
    }

    /// Relators whose letters all lie in `letters`, with the generators they
    /// use; relator order is kept.
    pub fn restrict(&self, letters: &[Symbol]) -> GroupPresentation {
        let mut out = GroupPresentation::new();
        for (s, k) in self.generators.symbols().filter(|(s, _)| letters.contains(s)) {
            out.generators.register(s, k).expect("same kinds");
        }
        out.relators =
            self.relators.iter().filter(|r| r.word.letters().iter().all(|l| letters.contains(&l.symbol))).cloned().collect();
        out
    }

    /// Checks the stated invariants: reduced relators over registered letters.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, r) in self.relators.iter().enumerate() {
            if !r.word.is_cyclically_reduced() {
                out.push(format!("relator {i} is not cyclically reduced"));
            }
            if let Err(e) = self.generators.check(&r.word) {
                out.push(format!("relator {i}: {e}"));
            }
        }
        out
    }
}

/// `G_N(S)`; with `w0 = None` the κ letters and the hub are left out.
pub fn build_presentation(
    s: &SMachine,
    n: usize,
    w0: Option<&AdmissibleWord>,
) -> Result<GroupPresentation, PresentationError> {
    let report = s.validate();
    if !report.is_valid() {
        return Err(PresentationError::InvalidMachine(report.to_string()));
    }
    let hw = &s.hardware;
    let mut gens = hw.alphabet();
    for x in [special::alpha(), special::omega(), special::delta()] {
        gens.register(x, Kind::Special).expect("special letter");
    }
    let rules: Vec<Symbol> = s.positive_rules().iter().map(|r| rule_symbol(&r.name)).collect();
    for t in &rules {
        gens.register(*t, Kind::Rule).map_err(|e| PresentationError::InvalidMachine(e.to_string()))?;
    }
    let mut relators = Vec::new();
    let mut push = |word: Word, tag| relators.push(Relator { word: normalize(word), tag });
    for (rule, t) in s.positive_rules().iter().zip(&rules) {
        let tw = Word::letter(t.pos());
        let ti = tw.inverse();
        for c in &rule.components {
            push(ti.multiply(&c.lhs).multiply(&tw).multiply(&c.rhs.inverse()), Tag::Transition);
        }
        let touched = rule.touched_components(hw);
        for (j, q) in hw.states().iter().enumerate() {
            if touched.contains(&j) {
                continue;
            }
            for letter in q {
                let l = Word::letter(letter.pos());
                push(ti.multiply(&l).multiply(&tw).multiply(&l.inverse()), Tag::FixedLetter);
            }
        }
    }
    let mut aux: Vec<Symbol> = vec![special::alpha(), special::omega(), special::delta()];
    aux.extend(hw.tape_letters());
    aux.sort();
    aux.dedup();
    for t in &rules {
        let tw = Word::letter(t.pos());
        for x in &aux {
            let l = Word::letter(x.pos());
            push(tw.inverse().multiply(&l).multiply(&tw).multiply(&l.inverse()), Tag::Auxiliary);
        }
    }
    if let Some(w0) = w0 {
        w0.check(hw)?;
        let hub = encode::hub_word(&w0.to_word(), n)?;
        for j in 1..=2 * n {
            gens.register(special::kappa(j), Kind::Special).expect("kappa letter");
        }
        push(hub, Tag::Hub);
    }
    Ok(GroupPresentation { generators: gens, relators })
}

/// The presentation of S4 without hub, used for the band experiments.
pub fn s4_fragment() -> GroupPresentation {
    let s4 = crate::smachine::builtin("S4").expect("S4");
    build_presentation(&s4, 0, None).expect("S4 is valid")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub state_components: usize,
    pub tapes: usize,
    pub positive_rules: usize,
    pub generators: BTreeMap<GenClass, usize>,
    pub relators: BTreeMap<Tag, usize>,
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "state components: {}", self.state_components)?;
        writeln!(f, "tapes: {}", self.tapes)?;
        writeln!(f, "positive rules: {}", self.positive_rules)?;
        for c in GenClass::ALL {
            writeln!(f, "generators {}: {}", c.as_str(), self.generators.get(&c).copied().unwrap_or(0))?;
        }
        for t in Tag::ALL {
            writeln!(f, "relators {}: {}", t, self.relators.get(&t).copied().unwrap_or(0))?;
        }
        Ok(())
    }
}

pub fn component_census(s: &SMachine) -> Census {
    let p = build_presentation(s, 0, None).unwrap_or_default();
    let mut generators = BTreeMap::new();
    for c in GenClass::ALL {
        generators.insert(c, p.generators_of(c).len());
    }
    let relators = Tag::ALL.into_iter().map(|t| (t, p.count(t))).collect();
    Census {
        state_components: s.hardware.component_count(),
        tapes: s.hardware.tape_count(),
        positive_rules: s.positive_rules().len(),
        generators,
        relators,
    }
}

pub fn serialize(p: &GroupPresentation) -> String {
    let mut out = String::from("GENERATORS\n");
    for c in GenClass::ALL {
        let names: Vec<&str> = p.generators_of(c).iter().map(|s| s.name()).collect();
        if names.is_empty() {
            writeln!(out, "{}:", c.as_str()).unwrap();
        } else {
            writeln!(out, "{}: {}", c.as_str(), names.join(" ")).unwrap();
        }
    }
    out.push_str("RELATORS\n");
    for r in &p.relators {
        writeln!(out, "{}: {}", r.tag, r.word).unwrap();
    }
    out
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: expected {expected}, found {found:?}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

fn perr(line: usize, column: usize, expected: impl Into<String>, found: &str) -> ParseError {
    ParseError { line, column, expected: expected.into(), found: found.to_string() }
}

/// Whitespace-separated tokens of `s` with their 1-based character columns,
/// `offset` characters into the line.
fn tokens(s: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = offset;
    for (i, ch) in s.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((c, b)) = start.take() {
                out.push((c, &s[b..i]));
            }
        } else if start.is_none() {
            start = Some((col, i));
        }
    }
    if let Some((c, b)) = start {
        out.push((c, &s[b..]));
    }
    out
}

fn class_from_name(s: &str) -> Option<GenClass> {
    GenClass::ALL.into_iter().find(|c| c.as_str() == s)
}

pub fn parse(text: &str) -> Result<GroupPresentation, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let last = text.lines().count().max(1);
    match lines.next() {
        Some((_, l)) if l.trim() == "GENERATORS" => {}
        Some((n, l)) => return Err(perr(n, 1, "GENERATORS", l.trim())),
        None => return Err(perr(last, 1, "GENERATORS", "")),
    }
    let mut p = GroupPresentation::new();
    let mut in_relators = false;
    for (n, raw) in lines {
        let line = raw.trim_end();
        let indent = line.chars().take_while(|c| c.is_whitespace()).count();
        let body = line.trim_start();
        if body == "RELATORS" && !in_relators {
            in_relators = true;
            continue;
        }
        let Some((head, rest)) = body.split_once(':') else {
            let what = if in_relators { "`<tag>: <word>`" } else { "`<class>: <generators>`" };
            return Err(perr(n, indent + 1, what, body));
        };
        let rest_col = indent + head.chars().count() + 1;
        if in_relators {
            let tag = Tag::from_name(head.trim())
                .ok_or_else(|| perr(n, indent + 1, "one of transition, fixed-letter, auxiliary, hub", head.trim()))?;
            let mut raw_letters = Vec::new();
            for (col, tok) in tokens(rest, rest_col) {
                let w = Word::parse_loose(tok).map_err(|e| perr(n, col, format!("word token ({e})"), tok))?;
                if let Some(bad) = w.letters().iter().find(|l| !p.generators.contains(l.symbol)) {
                    return Err(perr(n, col, "a declared generator", bad.symbol.name()));
                }
                raw_letters.extend_from_slice(w.letters());
            }
            p.relators.push(Relator { word: Word::reduce(raw_letters), tag });
        } else {
            let class = class_from_name(head.trim())
                .ok_or_else(|| perr(n, indent + 1, "one of state, tape, special, kappa, rule, or RELATORS", head.trim()))?;
            for (col, tok) in tokens(rest, rest_col) {
                let s = Symbol::try_intern(tok).map_err(|_| perr(n, col, "a generator name", tok))?;
                if (class == GenClass::Kappa) != special::is_kappa(s) {
                    return Err(perr(n, col, format!("a {} generator", class.as_str()), tok));
                }
                p.generators.register(s, class.kind()).map_err(|e| perr(n, col, format!("a fresh name ({e})"), tok))?;
            }
        }
    }
    if !in_relators {
        return Err(perr(last, 1, "RELATORS", ""));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smachine::builtin;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn s4_fragment_relations() {
        let p = s4_fragment();
        assert!(p.violations().is_empty(), "{:?}", p.violations());
        let tr = p.find(&w("rule1^-1 q1 rule1 d^-2 q1^-1 d^2")).unwrap();
        assert_eq!(p.relators[tr].tag, Tag::Transition);
        for fixed in ["rule1^-1 s2 rule1 s2^-1", "rule4^-1 r1 rule4 r1^-1"] {
            let i = p.find(&w(fixed)).unwrap();
            assert_eq!(p.relators[i].tag, Tag::FixedLetter);
        }
        assert!(p.contains(&w("rule4^-1 s2 rule4 d^-1 s2^-1 d")));
        assert!(p.contains(&w("rule1^-1 r1 rule1 d^-1 r1^-1 d")));
        assert!(p.contains(&w("rule4^-1 q2 rule4 d q2^-1 d^-1")));
        assert!(p.contains(&w("rule1 d rule1^-1 d^-1")));
        assert!(p.generators_of(GenClass::Kappa).is_empty());
        assert_eq!(p.count(Tag::Hub), 0);
    }

    #[test]
    fn auxiliary_family_size() {
        for name in builtin::NAMES {
            let m = builtin(name).unwrap();
            let p = build_presentation(&m, 0, None).unwrap();
            assert_eq!(p.count(Tag::Auxiliary), m.positive_rules().len() * 3);
        }
    }

    #[test]
    fn canonical_rotation_is_least() {
        let r = canonical_rotation(&w("d q1 d^-1 q1^-1"));
        assert_eq!(canonical_rotation(&r.rotate(1)), r);
        assert_eq!(canonical_rotation(&r.inverse()), r);
    }

    #[test]
    fn inverse_closure_gives_same_presentation() {
        let m = builtin("S4").unwrap();
        let closed = SMachine::new("S4", m.hardware.clone(), m.all_rules());
        assert_eq!(build_presentation(&m, 0, None).unwrap(), build_presentation(&closed, 0, None).unwrap());
    }

    #[test]
    fn census_counts() {
        let c = component_census(&builtin("S1").unwrap());
        assert_eq!(c.state_components, 6);
        assert_eq!(c.generators[&GenClass::Rule], 3);
        for m in [crate::tm::fixtures::unary(), crate::tm::fixtures::two_tape()] {
            let c = component_census(&encode::skeleton_machine(&m));
            assert_eq!(c.state_components, 17 * m.tape_count() + 6);
        }
    }

    #[test]
    fn hub_mode() {
        let m = builtin("S1").unwrap();
        let w0 = AdmissibleWord::parse("p1 q1 r1 s1 t1 u1", &m.hardware).unwrap();
        let p = build_presentation(&m, 2, Some(&w0)).unwrap();
        assert_eq!(p.generators_of(GenClass::Kappa).len(), 4);
        assert_eq!(p.count(Tag::Hub), 1);
        assert!(p.violations().is_empty());
        let bad = AdmissibleWord::parse("p1 q1", &builtin("S1").unwrap().hardware);
        if let Ok(bad) = bad {
            assert!(build_presentation(&m, 1, Some(&bad)).is_err());
        }
    }

    #[test]
    fn file_round_trip() {
        let empty = GroupPresentation::new();
        let text = serialize(&empty);
        assert_eq!(parse(&text).unwrap(), empty);
        for name in builtin::NAMES {
            let p = build_presentation(&builtin(name).unwrap(), 0, None).unwrap();
            let text = serialize(&p);
            assert_eq!(parse(&text).unwrap(), p);
        }
    }

    #[test]
    fn parse_errors_locate_the_problem() {
        let text = serialize(&s4_fragment()).replacen("auxiliary:", "auxilary:", 1);
        let line = text.lines().position(|l| l.starts_with("auxilary")).unwrap() + 1;
        let e = parse(&text).unwrap_err();
        assert_eq!((e.line, e.column), (line, 1));
        assert!(e.expected.contains("auxiliary"));

        let e = parse("GENERATORS\nstate: p\nRELATORS\nhub: p zz\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 8));
        assert!(parse("RELATORS\n").is_err());
    }
}
