//! The conjugation identity
//! `σ1^-n σ4^-n (s2 r1)^n σ4^n σ1^n = δ^-n (s2 r1)^n δ^n` in the S4
//! presentation, the loops `u_n` built from it, and the small
//! sub-presentation those words live in.
//!
//! σ1 and σ4 are the rule letters `rule1` and `rule4`.

use std::collections::HashMap;

use crate::derivation::{self, find_application, reduce_moves, Derivation, Move};
use crate::presentation::{self, GroupPresentation};
use crate::word::{special, Letter, Symbol, Word};

pub fn sigma1() -> Symbol {
    Symbol::intern("rule1")
}

pub fn sigma4() -> Symbol {
    Symbol::intern("rule4")
}

pub fn s2() -> Symbol {
    Symbol::intern("s2")
}

pub fn r1() -> Symbol {
    Symbol::intern("r1")
}

fn pw(s: Symbol, k: i64) -> Word {
    Word::power(s, k)
}

/// `(s2 r1)^n`.
pub fn middle(n: usize) -> Word {
    Word::reduce([s2().pos(), r1().pos()]).pow(n as i64)
}

/// `σ1^-n σ4^-n (s2 r1)^n σ4^n σ1^n`.
pub fn lemma3_start(n: usize) -> Word {
    let k = n as i64;
    pw(sigma1(), -k).multiply(&pw(sigma4(), -k)).multiply(&middle(n)).multiply(&pw(sigma4(), k)).multiply(&pw(sigma1(), k))
}

/// `δ^-n (s2 r1)^n δ^n`.
pub fn lemma3_end(n: usize) -> Word {
    let k = n as i64;
    pw(special::delta(), -k).multiply(&middle(n)).multiply(&pw(special::delta(), k))
}

/// `(δ^-n s2 δ^n r1)^n`, the word between the σ1 letters once every σ4
/// has been pushed through.
pub fn sigma4_stage_middle(n: usize) -> Word {
    let k = n as i64;
    let d = special::delta();
    pw(d, -k).multiply(&Word::letter(s2().pos())).multiply(&pw(d, k)).multiply(&Word::letter(r1().pos())).pow(k)
}

/// `u_n = A · B^-1` with `A` the start and `B` the end of the identity.
pub fn loop_word(n: usize) -> Word {
    lemma3_start(n).multiply(&lemma3_end(n).inverse())
}

/// The relators over σ1, σ4, s2, r1 and δ.
pub fn core_presentation() -> GroupPresentation {
    presentation::s4_fragment().restrict(&[sigma1(), sigma4(), s2(), r1(), special::delta()])
}

/// Image of a positive letter under conjugation by `τ`: `τ^-1 x τ`.
fn image(tau: Symbol, x: Symbol) -> Word {
    let d = special::delta();
    if (tau == sigma4() && x == s2()) || (tau == sigma1() && x == r1()) {
        Word::reduce([d.neg(), x.pos(), d.pos()])
    } else {
        Word::letter(x.pos())
    }
}

fn image_letter(tau: Symbol, l: Letter) -> Word {
    let w = image(tau, l.symbol);
    if l.positive {
        w
    } else {
        w.inverse()
    }
}

struct Builder<'a> {
    p: &'a GroupPresentation,
    word: Vec<Letter>,
    moves: Vec<Move>,
    cache: HashMap<(Vec<Letter>, Vec<Letter>), Move>,
}

impl<'a> Builder<'a> {
    fn new(p: &'a GroupPresentation, start: &Word) -> Builder<'a> {
        Builder { p, word: start.letters().to_vec(), moves: Vec::new(), cache: HashMap::new() }
    }

    fn rel(&mut self, pos: usize, ulen: usize, v: Vec<Letter>) {
        let u = self.word[pos..pos + ulen].to_vec();
        let key = (u, v);
        let m = match self.cache.get(&key) {
            Some(m) => *m,
            None => {
                let m = find_application(self.p, &key.0, &key.1)
                    .unwrap_or_else(|| panic!("no relator for {:?} -> {:?}", key.0, key.1));
                self.cache.insert(key.clone(), m);
                m
            }
        };
        let m = derivation::at(m, pos);
        derivation::apply_move(self.p, &mut self.word, &m).expect("prepared move");
        self.moves.push(m);
    }

    /// Moves the letter `τ^-1` at `pos` rightwards until it meets `τ`,
    /// conjugating every letter it passes, then cancels the pair and
    /// reduces.
    fn push_right(&mut self, mut pos: usize) {
        let t = self.word[pos];
        debug_assert!(!t.positive);
        while !self.word[pos + 1].cancels(t) {
            let x = self.word[pos + 1];
            let mut v = image_letter(t.symbol, x).letters().to_vec();
            let shift = v.len();
            v.push(t);
            self.rel(pos, 2, v);
            pos += shift;
        }
        self.moves.push(Move::FreeDelete { pos });
        self.word.drain(pos..pos + 2);
        let more = reduce_moves(&mut self.word);
        self.moves.extend(more);
    }
}

fn build(p: &GroupPresentation, n: usize, sigma1_stage: bool) -> Derivation {
    let start = lemma3_start(n);
    let mut b = Builder::new(p, &start);
    for k in 0..n {
        b.push_right(2 * n - k - 1);
    }
    if sigma1_stage {
        for k in 0..n {
            b.push_right(n - k - 1);
        }
    }
    Derivation { start, moves: b.moves }
}

/// A derivation of the identity over `p`, which must contain the S4
/// conjugation, fixed-letter and δ-commutation relators.
pub fn lemma3_derivation_in(p: &GroupPresentation, n: usize) -> Derivation {
    build(p, n, true)
}

/// The derivation over the S4 presentation.
pub fn lemma3_derivation(n: usize) -> Derivation {
    lemma3_derivation_in(&presentation::s4_fragment(), n)
}

/// Only the σ4 pushes; ends at `σ1^-n (δ^-n s2 δ^n r1)^n σ1^n`.
pub fn sigma4_stage(p: &GroupPresentation, n: usize) -> Derivation {
    build(p, n, false)
}

/// Derivation from `loop_word(n)` to the empty word: the identity applied to
/// the `A` prefix, followed by cancelling `B · B^-1`.
pub fn closed_filling_in(p: &GroupPresentation, n: usize) -> Derivation {
    let d = lemma3_derivation_in(p, n);
    let mut word: Vec<Letter> = lemma3_end(n).letters().to_vec();
    word.extend(lemma3_end(n).inverse().letters());
    let mut moves = d.moves;
    moves.extend(reduce_moves(&mut word));
    Derivation { start: loop_word(n), moves }
}

pub fn closed_filling(n: usize) -> Derivation {
    closed_filling_in(&presentation::s4_fragment(), n)
}

/// Area of the derivation from `lemma3_derivation`: `n²(n+1)` σ4 cells plus
/// the σ1 cells.
pub fn lemma3_area(n: usize) -> usize {
    lemma3_derivation(n).area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_cases() {
        let p = presentation::s4_fragment();
        let d0 = lemma3_derivation(0);
        assert!(d0.start.is_empty() && d0.moves.is_empty());
        let c = check_derivation(&p, &lemma3_derivation(1)).unwrap();
        assert_eq!(c.end_word, w("d^-1 s2 r1 d"));
        assert_eq!(c.raw_end, w("d^-1 s2 r1 d").letters());
        assert_eq!(c.area, 6);
    }

    #[test]
    fn sigma4_stage_display() {
        let p = presentation::s4_fragment();
        let c = check_derivation(&p, &sigma4_stage(&p, 2)).unwrap();
        let want = pw(sigma1(), -2).multiply(&sigma4_stage_middle(2)).multiply(&pw(sigma1(), 2));
        assert_eq!(c.end_word, want);
        assert_eq!(sigma4_stage_middle(2), w("d^-2 s2 d^2 r1 d^-2 s2 d^2 r1"));
    }

    #[test]
    fn loop_words() {
        assert_eq!(loop_word(1), w("rule1^-1 rule4^-1 s2 r1 rule4 rule1 d^-1 r1^-1 s2^-1 d"));
        for n in 1..6 {
            assert_eq!(loop_word(n).len(), 10 * n);
        }
    }

    #[test]
    fn fillings_close_up() {
        let p = presentation::s4_fragment();
        for n in 0..5 {
            let c = check_derivation(&p, &closed_filling(n)).unwrap();
            assert!(c.raw_end.is_empty());
            assert_eq!(c.area, lemma3_area(n));
        }
    }

    #[test]
    fn core_is_a_subset() {
        let core = core_presentation();
        assert_eq!(core.relators.len(), 6);
        let full = presentation::s4_fragment();
        let d = closed_filling_in(&core, 2);
        let mapped = derivation::remap(&d, &core, &full).unwrap();
        assert!(check_derivation(&full, &mapped).unwrap().raw_end.is_empty());
    }
}
