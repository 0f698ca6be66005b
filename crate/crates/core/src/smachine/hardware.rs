use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::word::{special, Alphabet, Kind, Letter, Symbol, Word};

/// Tape alphabets `Y_1..Y_n` and state components `Q_1..Q_{n+1}`.
///
/// Construction never fails; [`Hardware::violations`] lists what is wrong
/// with a hardware so that validation can report every problem at once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hardware {
    tapes: Vec<BTreeSet<Symbol>>,
    states: Vec<BTreeSet<Symbol>>,
    component: HashMap<Symbol, usize>,
}

impl Hardware {
    pub fn new(tapes: Vec<BTreeSet<Symbol>>, states: Vec<BTreeSet<Symbol>>) -> Hardware {
        let mut component = HashMap::new();
        for (i, q) in states.iter().enumerate() {
            for s in q {
                component.entry(*s).or_insert(i);
            }
        }
        Hardware { tapes, states, component }
    }

    pub fn from_names(tapes: &[&[&str]], states: &[&[&str]]) -> Hardware {
        let conv = |v: &[&[&str]]| -> Vec<BTreeSet<Symbol>> {
            v.iter().map(|set| set.iter().map(|n| Symbol::intern(n)).collect()).collect()
        };
        Hardware::new(conv(tapes), conv(states))
    }

    /// Number of tape segments `n`.
    pub fn tape_count(&self) -> usize {
        self.tapes.len()
    }

    pub fn component_count(&self) -> usize {
        self.states.len()
    }

    pub fn tape(&self, i: usize) -> &BTreeSet<Symbol> {
        &self.tapes[i]
    }

    pub fn tapes(&self) -> &[BTreeSet<Symbol>] {
        &self.tapes
    }

    pub fn states(&self) -> &[BTreeSet<Symbol>] {
        &self.states
    }

    pub fn component_of(&self, s: Symbol) -> Option<usize> {
        self.component.get(&s).copied()
    }

    pub fn is_state(&self, s: Symbol) -> bool {
        self.component.contains_key(&s)
    }

    pub fn tape_letters(&self) -> BTreeSet<Symbol> {
        self.tapes.iter().flatten().copied().collect()
    }

    pub fn state_letters(&self) -> BTreeSet<Symbol> {
        self.states.iter().flatten().copied().collect()
    }

    /// Registry for this hardware; α, ω, δ are registered as special letters.
    pub fn alphabet(&self) -> Alphabet {
        let mut a = Alphabet::new();
        for s in self.state_letters() {
            let _ = a.register(s, Kind::State);
        }
        for s in self.tape_letters() {
            let _ = a.register(s, tape_kind(s));
        }
        a
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.states.len() != self.tapes.len() + 1 {
            out.push(format!(
                "hardware: {} tape alphabets need {} state components, found {}",
                self.tapes.len(),
                self.tapes.len() + 1,
                self.states.len()
            ));
        }
        for (i, q) in self.states.iter().enumerate() {
            if q.is_empty() {
                out.push(format!("Q {}: empty state component", i + 1));
            }
            for s in q {
                let home = self.component[s];
                if home != i {
                    out.push(format!("Q {} and Q {}: both contain {s} (Q_i not disjoint)", home + 1, i + 1));
                }
            }
        }
        for (i, y) in self.tapes.iter().enumerate() {
            for s in y {
                if let Some(j) = self.component_of(*s) {
                    out.push(format!("Y {} and Q {}: {s} in both (Y∩Q nonempty)", i + 1, j + 1));
                }
            }
        }
        out
    }
}

pub(crate) fn tape_kind(s: Symbol) -> Kind {
    if [special::delta(), special::alpha(), special::omega()].contains(&s) || special::is_kappa(s) {
        Kind::Special
    } else {
        Kind::Tape
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AdmissibleError {
    #[error("expected a state letter of component {component}, found {found}")]
    WrongState { component: usize, found: String },
    #[error("state letter {0} must occur with exponent +1")]
    NegativeState(String),
    #[error("letter {letter} is not in tape alphabet {segment}")]
    OffTape { letter: String, segment: usize },
    #[error("expected {expected} state letters, found {found}")]
    StateCount { expected: usize, found: usize },
    #[error("tape letter {0} before the first state letter")]
    LeadingTape(String),
    #[error("segment {0} is not freely reduced")]
    Unreduced(usize),
    #[error(transparent)]
    Word(#[from] crate::word::WordError),
}

/// `q_1 u_1 q_2 … u_n q_{n+1}` with `q_i ∈ Q_i` and `u_i` over `Y_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleWord {
    pub states: Vec<Symbol>,
    pub segments: Vec<Word>,
}

impl AdmissibleWord {
    pub fn new(states: Vec<Symbol>, segments: Vec<Word>) -> AdmissibleWord {
        AdmissibleWord { states, segments }
    }

    pub fn from_word(w: &Word, hw: &Hardware) -> Result<AdmissibleWord, AdmissibleError> {
        let mut states = Vec::new();
        let mut segments = Vec::new();
        let mut current: Vec<Letter> = Vec::new();
        for l in w.letters() {
            if hw.is_state(l.symbol) {
                if !l.positive {
                    return Err(AdmissibleError::NegativeState(l.symbol.to_string()));
                }
                if !states.is_empty() {
                    segments.push(Word::reduce(current.drain(..)));
                }
                states.push(l.symbol);
            } else if states.is_empty() {
                return Err(AdmissibleError::LeadingTape(l.to_string()));
            } else {
                current.push(*l);
            }
        }
        if !current.is_empty() {
            if states.len() == hw.component_count() {
                return Err(AdmissibleError::OffTape { letter: current[0].to_string(), segment: states.len() });
            }
            segments.push(Word::reduce(current));
        }
        let aw = AdmissibleWord { states, segments };
        aw.check(hw)?;
        Ok(aw)
    }

    pub fn parse(text: &str, hw: &Hardware) -> Result<AdmissibleWord, AdmissibleError> {
        let w = hw.alphabet().parse_word(text)?;
        AdmissibleWord::from_word(&w, hw)
    }

    pub fn check(&self, hw: &Hardware) -> Result<(), AdmissibleError> {
        if self.states.len() != hw.component_count() || self.segments.len() + 1 != self.states.len() {
            return Err(AdmissibleError::StateCount { expected: hw.component_count(), found: self.states.len() });
        }
        for (i, s) in self.states.iter().enumerate() {
            if hw.component_of(*s) != Some(i) {
                return Err(AdmissibleError::WrongState { component: i + 1, found: s.to_string() });
            }
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if Word::reduce(seg.letters().iter().copied()) != *seg {
                return Err(AdmissibleError::Unreduced(i + 1));
            }
            if let Some(bad) = seg.letters().iter().find(|l| !hw.tape(i).contains(&l.symbol)) {
                return Err(AdmissibleError::OffTape { letter: bad.to_string(), segment: i + 1 });
            }
        }
        Ok(())
    }

    pub fn to_word(&self) -> Word {
        let mut raw = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            raw.push(s.pos());
            if let Some(seg) = self.segments.get(i) {
                raw.extend_from_slice(seg.letters());
            }
        }
        Word::reduce(raw)
    }

    pub fn len(&self) -> usize {
        self.states.len() + self.segments.iter().map(Word::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}
