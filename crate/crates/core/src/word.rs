//! Free-group words over interned generator symbols.
//!
//! Every other module speaks in [`Word`]s. A word is always freely reduced;
//! raw letter sequences only exist transiently (see [`Word::reduce`]) or inside
//! derivation replay, where non-reduced intermediate sequences are explicit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

/// An interned generator name. Cheap to copy and compare for equality;
/// ordering follows the name so that sorted output never depends on
/// interning order.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

#[derive(Default)]
struct Interner {
    ids: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl Symbol {
    /// Interns `name`. Panics on names that cannot round-trip through the
    /// word syntax; use [`Symbol::try_intern`] for untrusted input.
    pub fn intern(name: &str) -> Symbol {
        Symbol::try_intern(name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_intern(name: &str) -> Result<Symbol, WordError> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '^' || c == '#') {
            return Err(WordError::BadSymbol(name.to_string()));
        }
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Ok(Symbol(id));
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Ok(Symbol(id));
        }
        let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Ok(Symbol(id))
    }

    pub fn name(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }

    pub fn pos(self) -> Letter {
        Letter::new(self, true)
    }

    pub fn neg(self) -> Letter {
        Letter::new(self, false)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            return std::cmp::Ordering::Equal;
        }
        self.name().cmp(other.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Canonical names of the special generators.
pub mod special {
    use super::Symbol;

    pub const DELTA: &str = "δ";
    pub const ALPHA: &str = "α";
    pub const OMEGA: &str = "ω";

    pub fn delta() -> Symbol {
        Symbol::intern(DELTA)
    }
    pub fn alpha() -> Symbol {
        Symbol::intern(ALPHA)
    }
    pub fn omega() -> Symbol {
        Symbol::intern(OMEGA)
    }
    /// κ_j, 1-based.
    pub fn kappa(j: usize) -> Symbol {
        Symbol::intern(&format!("κ{j}"))
    }
    pub fn is_kappa(s: Symbol) -> bool {
        s.name()
            .strip_prefix('κ')
            .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
    }
}

/// Resolves the ASCII aliases `d`, `al`, `om` and `k<j>`.
fn canonical_name(token: &str) -> std::borrow::Cow<'_, str> {
    match token {
        "d" => special::DELTA.into(),
        "al" => special::ALPHA.into(),
        "om" => special::OMEGA.into(),
        _ => match token.strip_prefix('k') {
            Some(rest) if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) => {
                format!("κ{rest}").into()
            }
            _ => token.into(),
        },
    }
}

/// Generator classes. A symbol's kind never changes once registered.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Tape,
    State,
    Rule,
    /// α, ω, δ and the κ_j.
    Special,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Tape => "tape",
            Kind::State => "state",
            Kind::Rule => "rule",
            Kind::Special => "special",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: Symbol,
    pub positive: bool,
}

impl Letter {
    pub fn new(symbol: Symbol, positive: bool) -> Letter {
        Letter { symbol, positive }
    }

    pub fn inverse(self) -> Letter {
        Letter { symbol: self.symbol, positive: !self.positive }
    }

    pub fn sign(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.symbol == other.symbol && self.positive != other.positive
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Positive letters sort before their inverses; otherwise by name.
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbol.cmp(&other.symbol).then(other.positive.cmp(&self.positive))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "{}^-1", self.symbol)
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid symbol name {0:?}")]
    BadSymbol(String),
    #[error("invalid exponent in token {0:?}")]
    BadExponent(String),
    #[error("unregistered symbol {0}")]
    Unregistered(String),
    #[error("symbol {symbol} already registered as {existing}, not {requested}")]
    KindConflict { symbol: String, existing: &'static str, requested: &'static str },
}

/// A freely reduced word. Immutable; clones share the letter buffer.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Arc<[Letter]>);

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn letter(l: Letter) -> Word {
        Word(Arc::from(vec![l]))
    }

    /// `x^k` for a signed exponent.
    pub fn power(s: Symbol, k: i64) -> Word {
        let l = Letter::new(s, k >= 0);
        Word(std::iter::repeat(l).take(k.unsigned_abs() as usize).collect())
    }

    /// Free reduction of an arbitrary letter sequence (stack based, linear).
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        Word(reduce_letters(raw).into())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            out.extend_from_slice(base.letters());
        }
        Word::reduce(out)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.positive)
    }

    /// Sum of the signs of all letters.
    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().map(|l| l.sign()).sum()
    }

    pub fn count_symbol(&self, s: Symbol) -> usize {
        self.0.iter().filter(|l| l.symbol == s).count()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) if self.len() > 1 => !a.cancels(*b),
            _ => true,
        }
    }

    /// Strips `x ... x^-1` wrappers; returns `(conjugator, core)` with
    /// `self = conjugator · core · conjugator^-1`.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k].cancels(self.0[n - 1 - k]) {
            k += 1;
        }
        (Word(self.0[..k].into()), Word(self.0[k..n - k].into()))
    }

    pub fn cyclic_reduce(&self) -> Word {
        self.cyclic_split().1
    }

    /// Rotation starting at letter `k` (taken mod length).
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        Word(self.0[k..].iter().chain(self.0[..k].iter()).copied().collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].into())
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn ends_with(&self, suffix: &Word) -> bool {
        self.0.ends_with(&suffix.0)
    }

    /// Parses the word syntax without consulting a registry: tokens are
    /// whitespace separated, `x^k` is a power, aliases are resolved.
    pub fn parse_loose(text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = split_token(token)?;
            let sym = Symbol::try_intern(&canonical_name(name))?;
            let l = Letter::new(sym, exp >= 0);
            raw.extend(std::iter::repeat(l).take(exp.unsigned_abs() as usize));
        }
        Ok(Word::reduce(raw))
    }

    /// Renders with every letter spelled out (`x x^-1` style), no powers.
    pub fn to_flat_string(&self) -> String {
        self.0.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
    }
}

pub(crate) fn reduce_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        match out.last() {
            Some(top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

fn split_token(token: &str) -> Result<(&str, i64), WordError> {
    match token.rfind('^') {
        None => Ok((token, 1)),
        Some(i) => {
            let exp = token[i + 1..]
                .parse::<i64>()
                .map_err(|_| WordError::BadExponent(token.to_string()))?;
            Ok((&token[..i], exp))
        }
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word::reduce(iter)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse_loose(s)
    }
}

/// Runs of equal letters are printed as powers, e.g. `p1 δ^-2 q1 δ^2`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let exp = run * l.sign();
            if exp == 1 {
                write!(f, "{}", l.symbol)?;
            } else {
                write!(f, "{}^{}", l.symbol, exp)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Registry of declared generators and their kinds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    kinds: BTreeMap<Symbol, Kind>,
}

impl Alphabet {
    pub fn new() -> Alphabet {
        Alphabet::default()
    }

    pub fn register(&mut self, s: Symbol, kind: Kind) -> Result<(), WordError> {
        match self.kinds.get(&s) {
            Some(&existing) if existing != kind => Err(WordError::KindConflict {
                symbol: s.name().to_string(),
                existing: existing.as_str(),
                requested: kind.as_str(),
            }),
            _ => {
                self.kinds.insert(s, kind);
                Ok(())
            }
        }
    }

    pub fn kind(&self, s: Symbol) -> Option<Kind> {
        self.kinds.get(&s).copied()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.kinds.contains_key(&s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Symbol, Kind)> + '_ {
        self.kinds.iter().map(|(s, k)| (*s, *k))
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Free reduction that rejects letters outside the registry.
    pub fn free_reduce(&self, raw: &[Letter]) -> Result<Word, WordError> {
        if let Some(bad) = raw.iter().find(|l| !self.contains(l.symbol)) {
            return Err(WordError::Unregistered(bad.symbol.name().to_string()));
        }
        Ok(Word::reduce(raw.iter().copied()))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let w = Word::parse_loose(text)?;
        self.check(&w)?;
        Ok(w)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|l| !self.contains(l.symbol)) {
            Some(bad) => Err(WordError::Unregistered(bad.symbol.name().to_string())),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        let d = special::delta();
        let s2 = Symbol::intern("s2");
        assert_eq!(Word::reduce([]), Word::empty());
        assert_eq!(Word::reduce([d.pos(), d.neg()]), Word::empty());
        assert_eq!(Word::reduce([d.pos(), d.pos(), d.neg(), s2.pos()]), w("δ s2"));
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w("d").multiply(&w("d^-1")), Word::empty());
        assert_eq!(w("d^2").multiply(&w("d^-1 r1")), w("δ r1"));
        let x = w("p1 d^-2 q1");
        assert_eq!(x.multiply(&Word::empty()), x);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(w("d s2").inverse(), w("s2^-1 δ^-1"));
    }

    #[test]
    fn positivity() {
        assert!(Word::empty().is_positive());
        assert!(w("d d").is_positive());
        assert!(!w("d^-1 s2").is_positive());
    }

    #[test]
    fn syntax_and_aliases() {
        let x = w("p1 d^-2 q1 d^2 al om^3 k2");
        assert_eq!(x.to_string(), "p1 δ^-2 q1 δ^2 α ω^3 κ2");
        assert_eq!(w(&x.to_string()), x);
        assert_eq!(w("a^0 b a^-1 a"), w("b"));
        assert!(Word::parse_loose("x^y").is_err());
    }

    #[test]
    fn registry_rejects_unknown() {
        let mut a = Alphabet::new();
        a.register(special::delta(), Kind::Special).unwrap();
        let err = a.free_reduce(&[Symbol::intern("zz").pos()]).unwrap_err();
        assert_eq!(err, WordError::Unregistered("zz".into()));
        assert!(a.register(special::delta(), Kind::State).is_err());
        assert!(a.parse_word("d d^-1 d").is_ok());
    }

    #[test]
    fn cyclic_helpers() {
        let x = w("a b c a^-1");
        let (c, core) = x.cyclic_split();
        assert_eq!(c, w("a"));
        assert_eq!(core, w("b c"));
        assert_eq!(w("a b c").rotate(1), w("b c a"));
        assert!(special::is_kappa(special::kappa(12)));
        assert!(!special::is_kappa(Symbol::intern("κ")));
    }
}
