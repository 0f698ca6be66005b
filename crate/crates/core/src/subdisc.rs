//! Bounded search for a subdivision of a filled loop into at most `k`
//! subdiscs of perimeter at most `perim_bound`.
//!
//! A split cuts the cyclic loop `w` at boundary vertices `i < j` with a chord
//! word `c`: the piece `w[i..j] · c^-1` is filled on its own and the piece
//! `c · w[j..] w[..i]` is split further with one piece fewer. Every piece is
//! filled with [`bounded_area`], so a verdict is only as strong as the caps.

use std::fmt;

use rayon::prelude::*;

use crate::area::{bounded_area, Exhausted};
use crate::presentation::GroupPresentation;
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubdiscLimits {
    pub max_chord_len: usize,
    /// Area cap per piece.
    pub max_area: usize,
    /// Length cap handed to the area oracle.
    pub max_len: usize,
    pub threads: usize,
}

impl Default for SubdiscLimits {
    fn default() -> SubdiscLimits {
        SubdiscLimits { max_chord_len: 2, max_area: 64, max_len: 64, threads: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub word: Word,
    pub perimeter: usize,
    pub area: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chord {
    /// The loop being cut, its cut vertices and the chord word.
    pub cut: Word,
    pub from: usize,
    pub to: usize,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Found { pieces: Vec<Piece>, chords: Vec<Chord> },
    NotFoundWithinLimits { caps: Vec<String> },
}

impl Verdict {
    pub fn is_found(&self) -> bool {
        matches!(self, Verdict::Found { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Found { pieces, chords } => {
                writeln!(f, "found {} piece(s)", pieces.len())?;
                for c in chords {
                    writeln!(f, "chord {}..{} [{}] on [{}]", c.from, c.to, c.word, c.cut)?;
                }
                for p in pieces {
                    writeln!(f, "piece perimeter={} area={} [{}]", p.perimeter, p.area, p.word)?;
                }
                Ok(())
            }
            Verdict::NotFoundWithinLimits { caps } => {
                write!(f, "not found within limits")?;
                if !caps.is_empty() {
                    write!(f, " (caps hit: {})", caps.join(", "))?;
                }
                writeln!(f)
            }
        }
    }
}

#[derive(Default)]
struct Caps {
    area: bool,
    length: bool,
    states: bool,
}

impl Caps {
    fn merge(&mut self, o: &Caps) {
        self.area |= o.area;
        self.length |= o.length;
        self.states |= o.states;
    }
}

struct Search<'a> {
    p: &'a GroupPresentation,
    bound: usize,
    limits: SubdiscLimits,
    chords: Vec<Word>,
}

type Outcome = (Option<(Vec<Piece>, Vec<Chord>)>, Caps);

impl Search<'_> {
    fn fill(&self, w: &Word, perimeter: usize, caps: &mut Caps) -> Option<Piece> {
        if perimeter > self.bound {
            return None;
        }
        match bounded_area(self.p, w, self.limits.max_area, self.limits.max_len) {
            Ok(f) => Some(Piece { word: w.clone(), perimeter, area: f.area }),
            Err(Exhausted::AreaCap) => {
                caps.area = true;
                None
            }
            Err(Exhausted::LengthCap) => {
                caps.length = true;
                None
            }
            Err(Exhausted::StateCap) => {
                caps.states = true;
                None
            }
            Err(_) => None,
        }
    }

    /// `w` is a loop as a letter sequence (not necessarily reduced), `k`
    /// the number of pieces still allowed.
    fn run(&self, w: &[Letter], k: usize) -> Outcome {
        let mut caps = Caps::default();
        let word = Word::reduce(w.iter().copied());
        if let Some(piece) = self.fill(&word, w.len(), &mut caps) {
            return (Some((vec![piece], vec![])), caps);
        }
        if k < 2 {
            return (None, caps);
        }
        let n = w.len();
        let cands: Vec<(usize, usize, &Word)> = (0..n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .flat_map(|(i, j)| self.chords.iter().map(move |c| (i, j, c)))
            .filter(|(i, j, c)| j - i + c.len() <= self.bound && (j - i, c.len()) != (n, 0))
            .collect();
        let attempt = |&(i, j, c): &(usize, usize, &Word)| -> Outcome {
            let mut caps = Caps::default();
            let mut first: Vec<Letter> = w[i..j].to_vec();
            first.extend(c.inverse().letters());
            let Some(piece) = self.fill(&Word::reduce(first.iter().copied()), first.len(), &mut caps) else {
                return (None, caps);
            };
            let mut rest: Vec<Letter> = c.letters().to_vec();
            rest.extend_from_slice(&w[j..]);
            rest.extend_from_slice(&w[..i]);
            let (found, sub) = self.run(&rest, k - 1);
            caps.merge(&sub);
            let found = found.map(|(mut pieces, mut chords)| {
                pieces.insert(0, piece);
                chords.insert(0, Chord { cut: Word::reduce(w.iter().copied()), from: i, to: j, word: c.clone() });
                (pieces, chords)
            });
            (found, caps)
        };
        let results: Vec<Outcome> = cands.par_iter().map(attempt).collect();
        for (found, sub) in results {
            caps.merge(&sub);
            if found.is_some() {
                return (found, caps);
            }
        }
        (None, caps)
    }
}

/// Reduced words over the generators of length at most `max`, in
/// length-then-letter order.
fn chord_words(p: &GroupPresentation, max: usize) -> Vec<Word> {
    let letters: Vec<Letter> = p
        .generators
        .symbols()
        .flat_map(|(s, _)| [s.pos(), s.neg()])
        .collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.letters().last().is_some_and(|x| x.cancels(l)) {
                    continue;
                }
                next.push(w.multiply(&Word::letter(l)));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Searches for a decomposition of a filling of `loop_word` into at most
/// `k` pieces of perimeter at most `perim_bound`. The verdict does not
/// depend on `limits.threads`.
pub fn subdisc_search(p: &GroupPresentation, loop_word: &Word, k: usize, perim_bound: usize, limits: SubdiscLimits) -> Verdict {
    let search = Search { p, bound: perim_bound, limits, chords: chord_words(p, limits.max_chord_len) };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(limits.threads.max(1)).build().expect("thread pool");
    let (found, caps) = pool.install(|| search.run(loop_word.letters(), k.max(1)));
    match found {
        Some((pieces, chords)) => Verdict::Found { pieces, chords },
        None => {
            let mut hit = Vec::new();
            if k >= 2 {
                hit.push(format!("chord length <= {}", limits.max_chord_len));
            }
            if caps.area {
                hit.push(format!("piece area <= {}", limits.max_area));
            }
            if caps.length {
                hit.push(format!("word length <= {}", limits.max_len));
            }
            if caps.states {
                hit.push("search states".to_string());
            }
            Verdict::NotFoundWithinLimits { caps: hit }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemma3;

    #[test]
    fn single_relator_is_one_piece() {
        let p = lemma3::core_presentation();
        for r in &p.relators {
            let v = subdisc_search(&p, &r.word, 1, r.word.len(), SubdiscLimits::default());
            match v {
                Verdict::Found { pieces, chords } => {
                    assert_eq!(pieces.len(), 1);
                    assert_eq!(pieces[0].area, 1);
                    assert!(chords.is_empty());
                }
                other => panic!("{other}"),
            }
        }
    }

    #[test]
    fn pigeonhole() {
        let p = lemma3::core_presentation();
        let v = subdisc_search(&p, &lemma3::loop_word(2), 1, 5, SubdiscLimits::default());
        assert!(!v.is_found());
    }

    #[test]
    fn loop_two_regression() {
        let p = lemma3::core_presentation();
        let run = |k, perim, chord, threads| {
            let limits = SubdiscLimits { max_chord_len: chord, threads, ..SubdiscLimits::default() };
            subdisc_search(&p, &lemma3::loop_word(2), k, perim, limits)
        };
        let one = run(2, 12, 2, 1);
        assert_eq!(one, Verdict::NotFoundWithinLimits { caps: vec!["chord length <= 2".to_string()] });
        assert_eq!(run(2, 12, 2, 4), one);
        match run(2, 20, 1, 4) {
            Verdict::Found { pieces, .. } => {
                assert_eq!(pieces.len(), 1);
                assert_eq!(pieces[0].area, 34);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn chord_words_are_reduced() {
        let p = lemma3::core_presentation();
        let c = chord_words(&p, 2);
        assert_eq!(c.len(), 1 + 10 + 10 * 9);
        assert!(c.iter().all(|w| w.len() <= 2));
    }
}
