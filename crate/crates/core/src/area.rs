//! Bounded computation of the area of a word: the least number of relator
//! applications in a derivation to the empty word.
//!
//! Two exact methods:
//!
//! * [`Method::Bands`] applies when every relator reads `τ^-1 x τ = φ_τ(x)`
//!   for a rule letter `τ`, a single base letter `x`, and `φ_τ` an
//!   automorphism of the free group on the base letters. Every cell then
//!   sits on a τ-band, a minimal diagram has no annuli, and a band whose
//!   domain side reads `A` has exactly `|A|` cells. The minimum is taken over
//!   all non-crossing pairings of the rule letters of the word.
//! * [`Method::Search`] is a level-synchronised breadth-first search over
//!   freely reduced words, where one step replaces a subword `u` (possibly
//!   wrapping around the end) by `v` for some cyclic form `u v^-1` of a
//!   relator or its inverse.
//!
//! Both return a witness derivation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::derivation::{self, expand_moves, find_application, reduce_moves, shift_moves, Derivation, Move};
use crate::presentation::GroupPresentation;
use crate::word::{Kind, Letter, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Bands,
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_area: usize,
    pub max_len: usize,
    /// Cap on visited words for [`Method::Search`].
    pub max_states: usize,
}

impl Limits {
    pub fn new(max_area: usize, max_len: usize) -> Limits {
        Limits { max_area, max_len, max_states: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exhausted {
    AreaCap,
    LengthCap,
    StateCap,
    /// The word has no filling at all (only reported by the band method,
    /// which is complete).
    NotTrivial,
    /// A letter of the word is not a generator.
    ForeignLetter(String),
}

impl fmt::Display for Exhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exhausted::AreaCap => f.write_str("area cap reached"),
            Exhausted::LengthCap => f.write_str("length cap reached"),
            Exhausted::StateCap => f.write_str("state cap reached"),
            Exhausted::NotTrivial => f.write_str("word is not trivial in the group"),
            Exhausted::ForeignLetter(s) => write!(f, "letter {s} is not a generator"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filling {
    pub area: usize,
    pub witness: Derivation,
    pub method: Method,
}

pub type AreaResult = Result<Filling, Exhausted>;

/// Area of `w` within the caps, by the band method when the presentation
/// allows it and by search otherwise.
pub fn bounded_area(p: &GroupPresentation, w: &Word, max_area: usize, max_len: usize) -> AreaResult {
    bounded_area_with(p, w, Limits::new(max_area, max_len))
}

pub fn bounded_area_with(p: &GroupPresentation, w: &Word, limits: Limits) -> AreaResult {
    match ConjugationSystem::detect(p) {
        Some(sys) => band_area(p, &sys, w, limits),
        None => search_area(p, w, limits),
    }
}

fn foreign(p: &GroupPresentation, w: &Word) -> Option<Exhausted> {
    w.letters().iter().find(|l| !p.generators.contains(l.symbol)).map(|l| Exhausted::ForeignLetter(l.symbol.to_string()))
}

/// The maps `φ_τ` of a presentation whose relators are all of the form
/// `τ^-1 x τ φ_τ(x)^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationSystem {
    pub rules: BTreeSet<Symbol>,
    pub base: BTreeSet<Symbol>,
    forward: BTreeMap<(Symbol, Symbol), Word>,
    backward: BTreeMap<(Symbol, Symbol), Word>,
}

fn apply_map(map: &BTreeMap<(Symbol, Symbol), Word>, tau: Symbol, w: &[Letter]) -> Vec<Letter> {
    let mut raw = Vec::new();
    for l in w {
        let img = &map[&(tau, l.symbol)];
        if l.positive {
            raw.extend_from_slice(img.letters());
        } else {
            raw.extend(img.inverse().letters());
        }
    }
    raw
}

impl ConjugationSystem {
    pub fn detect(p: &GroupPresentation) -> Option<ConjugationSystem> {
        let rules: BTreeSet<Symbol> = p.generators.symbols().filter(|(_, k)| *k == Kind::Rule).map(|(s, _)| s).collect();
        let base: BTreeSet<Symbol> = p.generators.symbols().filter(|(_, k)| *k != Kind::Rule).map(|(s, _)| s).collect();
        let mut forward = BTreeMap::new();
        for r in &p.relators {
            let l = r.word.letters();
            let idx: Vec<usize> = (0..l.len()).filter(|&i| rules.contains(&l[i].symbol)).collect();
            if idx.len() != 2 || l[idx[0]].symbol != l[idx[1]].symbol || l[idx[0]].positive == l[idx[1]].positive {
                return None;
            }
            let start = if l[idx[0]].positive { idx[1] } else { idx[0] };
            let c: Vec<Letter> = l[start..].iter().chain(&l[..start]).copied().collect();
            let tau = c[0].symbol;
            let k = c.iter().position(|x| x.symbol == tau && x.positive)?;
            if k != 2 {
                return None;
            }
            let mut x = c[1];
            let mut y = Word::reduce(c[3..].iter().copied()).inverse();
            if !x.positive {
                x = x.inverse();
                y = y.inverse();
            }
            match forward.get(&(tau, x.symbol)) {
                Some(old) if *old != y => return None,
                _ => {
                    forward.insert((tau, x.symbol), y);
                }
            }
        }
        for t in &rules {
            for x in &base {
                if !forward.contains_key(&(*t, *x)) {
                    return None;
                }
            }
        }
        let mut backward = BTreeMap::new();
        for t in &rules {
            for x in &base {
                backward.insert((*t, *x), preimage(&forward, &base, *t, *x)?);
            }
        }
        Some(ConjugationSystem { rules, base, forward, backward })
    }

    pub fn image(&self, tau: Symbol, w: &[Letter]) -> Word {
        Word::reduce(apply_map(&self.forward, tau, w))
    }

    pub fn preimage(&self, tau: Symbol, w: &[Letter]) -> Word {
        Word::reduce(apply_map(&self.backward, tau, w))
    }
}

/// A word `z` with `φ_τ(z) = x`. Tries `g x g^-1` when `φ_τ(x) = g^-1 x g`
/// with `g` fixed, then a short exhaustive search.
fn preimage(forward: &BTreeMap<(Symbol, Symbol), Word>, base: &BTreeSet<Symbol>, tau: Symbol, x: Symbol) -> Option<Word> {
    let target = Word::letter(x.pos());
    let phi = |z: &Word| Word::reduce(apply_map(forward, tau, z.letters()));
    let img = &forward[&(tau, x)];
    let l = img.letters();
    if l.len() % 2 == 1 && l[l.len() / 2] == x.pos() {
        let g = Word::reduce(l[l.len() / 2 + 1..].iter().copied());
        let cand = g.multiply(&target).multiply(&g.inverse());
        if phi(&cand) == target {
            return Some(cand);
        }
    }
    let letters: Vec<Letter> = base.iter().flat_map(|s| [s.pos(), s.neg()]).collect();
    let mut layer = vec![Word::empty()];
    for _ in 0..5 {
        let mut next = Vec::new();
        for z in &layer {
            for &a in &letters {
                if z.letters().last().is_some_and(|b| b.cancels(a)) {
                    continue;
                }
                let cand = z.multiply(&Word::letter(a));
                if phi(&cand) == target {
                    return Some(cand);
                }
                next.push(cand);
            }
        }
        if next.len() > 200_000 {
            return None;
        }
        layer = next;
    }
    None
}

#[derive(Clone, Debug)]
struct Band {
    i: usize,
    j: usize,
    inner: Vec<Band>,
}

type Options = BTreeMap<Vec<Letter>, (usize, Vec<Band>)>;

struct BandSolver<'a> {
    sys: &'a ConjugationSystem,
    w: &'a [Letter],
    cap: usize,
    memo: HashMap<(usize, usize), Options>,
}

impl BandSolver<'_> {
    fn is_rule(&self, i: usize) -> bool {
        self.sys.rules.contains(&self.w[i].symbol)
    }

    /// Far side value and cell count of a band over inner value `a`.
    fn band(&self, open: Letter, a: &[Letter]) -> (Vec<Letter>, usize) {
        if open.positive {
            let c = self.sys.preimage(open.symbol, a);
            let n = c.len();
            (c.letters().to_vec(), n)
        } else {
            (self.sys.image(open.symbol, a).letters().to_vec(), a.len())
        }
    }

    fn options(&mut self, a: usize, b: usize) -> Options {
        if let Some(o) = self.memo.get(&(a, b)) {
            return o.clone();
        }
        let mut out = Options::new();
        match (a..b).find(|&i| self.is_rule(i)) {
            None => {
                out.insert(Word::reduce(self.w[a..b].iter().copied()).letters().to_vec(), (0, Vec::new()));
            }
            Some(i) => {
                for j in i + 1..b {
                    if self.w[j] != self.w[i].inverse() {
                        continue;
                    }
                    let inner = self.options(i + 1, j);
                    if inner.is_empty() {
                        continue;
                    }
                    let rest = self.options(j + 1, b);
                    for (av, (c1, p1)) in &inner {
                        let (far, cells) = self.band(self.w[i], av);
                        for (rv, (c2, p2)) in &rest {
                            let cost = c1 + cells + c2;
                            if cost > self.cap {
                                continue;
                            }
                            let value =
                                Word::reduce(self.w[a..i].iter().chain(&far).chain(rv).copied()).letters().to_vec();
                            if out.get(&value).is_some_and(|(c, _)| *c <= cost) {
                                continue;
                            }
                            let mut plan = vec![Band { i, j, inner: p1.clone() }];
                            plan.extend(p2.iter().cloned());
                            out.insert(value, (cost, plan));
                        }
                    }
                }
            }
        }
        self.memo.insert((a, b), out.clone());
        out
    }
}

struct Emitter<'a> {
    p: &'a GroupPresentation,
    sys: &'a ConjugationSystem,
    word: Vec<Letter>,
    moves: Vec<Move>,
    cache: HashMap<(Vec<Letter>, Vec<Letter>), Move>,
}

impl Emitter<'_> {
    fn push(&mut self, m: Move) {
        derivation::apply_move(self.p, &mut self.word, &m).expect("band witness move");
        self.moves.push(m);
    }

    fn rel(&mut self, pos: usize, ulen: usize, v: Vec<Letter>) {
        let key = (self.word[pos..pos + ulen].to_vec(), v);
        let m = match self.cache.get(&key) {
            Some(m) => *m,
            None => {
                let m = find_application(self.p, &key.0, &key.1).expect("band relator");
                self.cache.insert(key, m);
                m
            }
        };
        self.push(derivation::at(m, pos));
    }

    fn reduce_span(&mut self, from: usize, to: usize) -> usize {
        let mut span = self.word[from..to].to_vec();
        let moves = reduce_moves(&mut span);
        self.moves.extend(shift_moves(&moves, from));
        let n = span.len();
        self.word.splice(from..to, span);
        n
    }

    /// Fills the original segment `[a, b)` that now starts at `pos`; returns
    /// its new length.
    fn segment(&mut self, pos: usize, a: usize, b: usize, plan: &[Band]) -> usize {
        let mut cur = pos;
        let mut orig = a;
        for band in plan {
            cur += band.i - orig;
            let inner = self.segment(cur + 1, band.i + 1, band.j, &band.inner);
            cur += self.band(cur, inner);
            orig = band.j + 1;
        }
        cur += b - orig;
        self.reduce_span(pos, cur)
    }

    fn band(&mut self, at: usize, inner: usize) -> usize {
        let t = self.word[at];
        let a = self.word[at + 1..at + 1 + inner].to_vec();
        let mut pos = at;
        if t.positive {
            let c = self.sys.preimage(t.symbol, &a);
            let images: Vec<Word> =
                c.letters().iter().map(|l| Word::reduce(apply_map(&self.sys.forward, t.symbol, &[*l]))).collect();
            let raw: Vec<Letter> = images.iter().flat_map(|w| w.letters().iter().copied()).collect();
            for m in shift_moves(&expand_moves(&raw), at + 1) {
                self.push(m);
            }
            for (l, img) in c.letters().iter().zip(&images) {
                self.rel(pos, img.len() + 1, vec![*l, t]);
                pos += 1;
            }
        } else {
            for l in a {
                let img = Word::reduce(apply_map(&self.sys.forward, t.symbol, &[l]));
                let mut v = img.letters().to_vec();
                let shift = v.len();
                v.push(t);
                self.rel(pos, 2, v);
                pos += shift;
            }
        }
        self.push(Move::FreeDelete { pos });
        self.reduce_span(at, pos)
    }
}

/// The band method; see the module docs.
pub fn band_area(p: &GroupPresentation, sys: &ConjugationSystem, w: &Word, limits: Limits) -> AreaResult {
    if let Some(e) = foreign(p, w) {
        return Err(e);
    }
    let letters = w.letters();
    let mut solver = BandSolver { sys, w: letters, cap: usize::MAX, memo: HashMap::new() };
    let opts = solver.options(0, letters.len());
    let Some((area, plan)) = opts.get(&Vec::new()).cloned() else {
        return Err(Exhausted::NotTrivial);
    };
    if area > limits.max_area {
        return Err(Exhausted::AreaCap);
    }
    let mut em = Emitter { p, sys, word: letters.to_vec(), moves: Vec::new(), cache: HashMap::new() };
    em.segment(0, 0, letters.len(), &plan);
    let witness = Derivation { start: w.clone(), moves: em.moves };
    let checked = derivation::check_derivation(p, &witness).expect("band witness replays");
    debug_assert!(checked.raw_end.is_empty() && checked.area == area);
    if checked.max_len > limits.max_len {
        return Err(Exhausted::LengthCap);
    }
    Ok(Filling { area, witness, method: Method::Bands })
}

/// One search step: the relator move applied to a state word.
#[derive(Clone, Copy, Debug)]
struct Step {
    id: usize,
    rotation: usize,
    inverted: bool,
    len: usize,
    /// Start of `u`; when `wrap > 0` the last `wrap` letters of the word
    /// are the first letters of `u`.
    pos: usize,
    wrap: usize,
}

struct Variant {
    id: usize,
    rotation: usize,
    inverted: bool,
    cyclic: Vec<Letter>,
}

fn variants(p: &GroupPresentation) -> Vec<Variant> {
    let mut out = Vec::new();
    for (id, r) in p.relators.iter().enumerate() {
        for inverted in [false, true] {
            let base = if inverted { r.word.inverse() } else { r.word.clone() };
            let l = base.letters();
            for rotation in 0..l.len() {
                let cyclic = l[rotation..].iter().chain(&l[..rotation]).copied().collect();
                out.push(Variant { id, rotation, inverted, cyclic });
            }
        }
    }
    out
}

fn inverse_of(v: &[Letter]) -> Vec<Letter> {
    v.iter().rev().map(|l| l.inverse()).collect()
}

fn successors(w: &[Letter], vars: &[Variant], max_len: usize) -> Vec<(Vec<Letter>, Step)> {
    let mut out = Vec::new();
    let n = w.len();
    for var in vars {
        let c = &var.cyclic;
        for len in 1..=c.len() {
            let u = &c[..len];
            let v = inverse_of(&c[len..]);
            let step = |pos, wrap| Step { id: var.id, rotation: var.rotation, inverted: var.inverted, len, pos, wrap };
            if len <= n {
                for pos in 0..=n - len {
                    if &w[pos..pos + len] == u {
                        let next = Word::reduce(w[..pos].iter().chain(&v).chain(&w[pos + len..]).copied());
                        if next.len() <= max_len {
                            out.push((next.letters().to_vec(), step(pos, 0)));
                        }
                    }
                }
            }
            for wrap in 1..len {
                let head = len - wrap;
                if wrap + head > n || w[n - wrap..] != u[..wrap] || w[..head] != u[wrap..] {
                    continue;
                }
                let tail = &u[..wrap];
                let raw: Vec<Letter> =
                    inverse_of(tail).into_iter().chain(v.iter().copied()).chain(w[head..n - wrap].iter().copied()).chain(tail.iter().copied()).collect();
                let next = Word::reduce(raw);
                if next.len() <= max_len {
                    out.push((next.letters().to_vec(), step(0, wrap)));
                }
            }
        }
    }
    out
}

fn step_moves(p: &GroupPresentation, w: &[Letter], s: Step) -> Vec<Move> {
    let mut word = w.to_vec();
    let mut moves = Vec::new();
    let mut pos = s.pos;
    if s.wrap > 0 {
        let tail = &w[w.len() - s.wrap..];
        let raw: Vec<Letter> = inverse_of(tail).into_iter().chain(tail.iter().copied()).chain(w.iter().copied()).collect();
        moves.extend(expand_moves(&raw));
        word = raw;
        pos = s.wrap;
    }
    let m = Move::RelatorApply { id: s.id, rotation: s.rotation, inverted: s.inverted, pos, len: s.len };
    derivation::apply_move(p, &mut word, &m).expect("search step");
    moves.push(m);
    moves.extend(reduce_moves(&mut word));
    moves
}

/// Breadth-first search; see the module docs. The result does not depend
/// on the number of rayon threads.
pub fn search_area(p: &GroupPresentation, w: &Word, limits: Limits) -> AreaResult {
    if let Some(e) = foreign(p, w) {
        return Err(e);
    }
    if w.len() > limits.max_len {
        return Err(Exhausted::LengthCap);
    }
    let vars = variants(p);
    let start = w.letters().to_vec();
    let mut parent: HashMap<Vec<Letter>, Option<(Vec<Letter>, Step)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut frontier = vec![start];
    let mut found = frontier[0].is_empty();
    let mut level = 0;
    while !found {
        if frontier.is_empty() {
            // every word within the length cap has been seen
            return Err(Exhausted::LengthCap);
        }
        if level == limits.max_area {
            return Err(Exhausted::AreaCap);
        }
        let expanded: Vec<Vec<(Vec<Letter>, Step)>> =
            frontier.par_iter().map(|s| successors(s, &vars, limits.max_len)).collect();
        let mut next = Vec::new();
        for (s, succ) in frontier.iter().zip(expanded) {
            for (t, step) in succ {
                if parent.contains_key(&t) {
                    continue;
                }
                if parent.len() >= limits.max_states {
                    return Err(Exhausted::StateCap);
                }
                found |= t.is_empty();
                parent.insert(t.clone(), Some((s.clone(), step)));
                next.push(t);
            }
        }
        frontier = next;
        level += 1;
    }
    let mut path = Vec::new();
    let mut cur: Vec<Letter> = Vec::new();
    while let Some(Some((prev, step))) = parent.get(&cur) {
        path.push((prev.clone(), *step));
        cur = prev.clone();
    }
    path.reverse();
    let mut moves = Vec::new();
    for (word, step) in &path {
        moves.extend(step_moves(p, word, *step));
    }
    let witness = Derivation { start: w.clone(), moves };
    Ok(Filling { area: level, witness, method: Method::Search })
}
