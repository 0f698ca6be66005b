//! Van Kampen diagrams built from derivations, x-bands and DOT export.
//!
//! The construction keeps the current word as a path of directed edges.
//! A relator application adds one cell and new edges for `v`; a free
//! insertion adds a spike; a free deletion folds two edges together (or
//! retracts a spike). The boundary of the result is the start path followed
//! by the reversed final path.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::derivation::{relator_pieces, Derivation, Move, StepError, StepReason};
use crate::presentation::GroupPresentation;
use crate::word::{Letter, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub symbol: Symbol,
    pub tail: usize,
    pub head: usize,
}

/// An edge traversed forwards (reading `symbol`) or backwards (reading
/// `symbol^-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub relator: usize,
    pub inverted: bool,
    pub rotation: usize,
    /// Boundary read from the start of `u`.
    pub boundary: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
    pub boundary: Vec<Step>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn add(&mut self) -> usize {
        self.0.push(self.0.len());
        self.0.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.0[hi] = lo;
        }
    }
}

struct Builder {
    verts: UnionFind,
    edge_uf: UnionFind,
    edges: Vec<Edge>,
    cells: Vec<Cell>,
    path: Vec<Step>,
    start_vertex: usize,
}

impl Builder {
    fn new_edge(&mut self, l: Letter, from: usize, to: usize) -> Step {
        let id = self.edge_uf.add();
        let (tail, head) = if l.positive { (from, to) } else { (to, from) };
        self.edges.push(Edge { symbol: l.symbol, tail, head });
        Step { edge: id, forward: l.positive }
    }

    fn start_of(&self, s: Step) -> usize {
        let e = self.edges[s.edge];
        if s.forward {
            e.tail
        } else {
            e.head
        }
    }

    fn end_of(&self, s: Step) -> usize {
        let e = self.edges[s.edge];
        if s.forward {
            e.head
        } else {
            e.tail
        }
    }

    /// Vertex before position `pos` of the current path.
    fn vertex_at(&self, pos: usize) -> usize {
        if pos < self.path.len() {
            self.start_of(self.path[pos])
        } else if let Some(last) = self.path.last() {
            self.end_of(*last)
        } else {
            self.start_vertex
        }
    }

    /// A new path of fresh edges reading `word` from `from` to `to`.
    fn fresh_path(&mut self, word: &[Letter], from: usize, to: usize) -> Vec<Step> {
        if word.is_empty() {
            self.verts.union(from, to);
            return Vec::new();
        }
        let mut out = Vec::with_capacity(word.len());
        let mut cur = from;
        for (i, l) in word.iter().enumerate() {
            let next = if i + 1 == word.len() { to } else { self.verts.add() };
            out.push(self.new_edge(*l, cur, next));
            cur = next;
        }
        out
    }

    fn apply(&mut self, p: &GroupPresentation, m: &Move) -> Result<(), StepReason> {
        match *m {
            Move::FreeInsert { pos, letter } => {
                if pos > self.path.len() {
                    return Err(StepReason::OutOfRange { pos, word_len: self.path.len() });
                }
                let v = self.vertex_at(pos);
                let w = self.verts.add();
                let s = self.new_edge(letter, v, w);
                self.path.splice(pos..pos, [s, Step { edge: s.edge, forward: !s.forward }]);
            }
            Move::FreeDelete { pos } => {
                if pos + 1 >= self.path.len() {
                    return Err(StepReason::OutOfRange { pos, word_len: self.path.len() });
                }
                let (a, b) = (self.path[pos], self.path[pos + 1]);
                let (ea, eb) = (self.edges[a.edge], self.edges[b.edge]);
                if ea.symbol != eb.symbol || a.forward == b.forward {
                    return Err(StepReason::NotCancelling(pos));
                }
                let (x, z) = (self.start_of(a), self.end_of(b));
                self.verts.union(x, z);
                self.edge_uf.union(a.edge, b.edge);
                self.path.drain(pos..pos + 2);
            }
            Move::RelatorApply { id, rotation, inverted, pos, len } => {
                let (u, v) = relator_pieces(p, id, rotation, inverted, len)?;
                if pos + len > self.path.len() {
                    return Err(StepReason::OutOfRange { pos, word_len: self.path.len() });
                }
                let found: Vec<Letter> = self.path[pos..pos + len].iter().map(|s| self.letter(*s)).collect();
                if found != u {
                    let show = |w: &[Letter]| Word::reduce(w.iter().copied()).to_string();
                    return Err(StepReason::Mismatch { expected: show(&u), found: show(&found) });
                }
                let from = self.vertex_at(pos);
                let to = self.vertex_at(pos + len);
                let new = self.fresh_path(&v, from, to);
                let mut boundary: Vec<Step> = self.path[pos..pos + len].to_vec();
                boundary.extend(new.iter().rev().map(|s| Step { edge: s.edge, forward: !s.forward }));
                self.cells.push(Cell { relator: id, inverted, rotation, boundary });
                self.path.splice(pos..pos + len, new);
            }
        }
        Ok(())
    }

    fn letter(&self, s: Step) -> Letter {
        Letter::new(self.edges[s.edge].symbol, s.forward)
    }
}

pub fn diagram_from_derivation(p: &GroupPresentation, d: &Derivation) -> Result<Diagram, StepError> {
    let mut b = Builder {
        verts: UnionFind(Vec::new()),
        edge_uf: UnionFind(Vec::new()),
        edges: Vec::new(),
        cells: Vec::new(),
        path: Vec::new(),
        start_vertex: 0,
    };
    b.start_vertex = b.verts.add();
    let start: Vec<Letter> = d.start.letters().to_vec();
    let end_vertex = if start.is_empty() { b.start_vertex } else { b.verts.add() };
    let sv = b.start_vertex;
    b.path = b.fresh_path(&start, sv, end_vertex);
    let start_path = b.path.clone();
    for (index, m) in d.moves.iter().enumerate() {
        b.apply(p, m).map_err(|reason| StepError { index, reason })?;
    }
    let mut boundary = start_path;
    boundary.extend(b.path.iter().rev().map(|s| Step { edge: s.edge, forward: !s.forward }));
    Ok(compact(b, boundary))
}

/// Replaces union-find classes by dense indices in order of first use.
fn compact(mut b: Builder, boundary: Vec<Step>) -> Diagram {
    let mut vmap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut emap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for e in 0..b.edges.len() {
        let root = b.edge_uf.find(e);
        if emap.contains_key(&root) {
            continue;
        }
        let edge = b.edges[root];
        let mut vid = |v: usize, vmap: &mut BTreeMap<usize, usize>| {
            let r = b.verts.find(v);
            let n = vmap.len();
            *vmap.entry(r).or_insert(n)
        };
        let tail = vid(edge.tail, &mut vmap);
        let head = vid(edge.head, &mut vmap);
        emap.insert(root, edges.len());
        edges.push(Edge { symbol: edge.symbol, tail, head });
    }
    let mut map_step = |s: Step| Step { edge: emap[&b.edge_uf.find(s.edge)], forward: s.forward };
    let boundary = boundary.into_iter().map(&mut map_step).collect();
    let cells = b
        .cells
        .iter()
        .map(|c| Cell { relator: c.relator, inverted: c.inverted, rotation: c.rotation, boundary: c.boundary.iter().map(|s| map_step(*s)).collect() })
        .collect();
    Diagram { vertex_count: vmap.len().max(1), edges, cells, boundary }
}

impl Diagram {
    pub fn area(&self) -> usize {
        self.cells.len()
    }

    pub fn perimeter(&self) -> usize {
        self.boundary.len()
    }

    pub fn letter(&self, s: Step) -> Letter {
        Letter::new(self.edges[s.edge].symbol, s.forward)
    }

    pub fn read(&self, path: &[Step]) -> Vec<Letter> {
        path.iter().map(|s| self.letter(*s)).collect()
    }

    pub fn boundary_label(&self) -> Vec<Letter> {
        self.read(&self.boundary)
    }

    pub fn cell_label(&self, c: usize) -> Vec<Letter> {
        self.read(&self.cells[c].boundary)
    }

    /// Checks that every cell reads its relator application and that the
    /// boundary reads `label`; returns the problems found.
    pub fn violations(&self, p: &GroupPresentation, label: &[Letter]) -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            match relator_pieces(p, c.relator, c.rotation, c.inverted, 0) {
                Ok((_, v)) => {
                    let want: Vec<Letter> = v.iter().rev().map(|l| l.inverse()).collect();
                    if self.cell_label(i) != want {
                        out.push(format!("cell {i} does not read its relator"));
                    }
                }
                Err(e) => out.push(format!("cell {i}: {e}")),
            }
        }
        if self.boundary_label() != label {
            out.push("boundary label differs".to_string());
        }
        out
    }

    fn boundary_index(&self) -> BTreeMap<usize, usize> {
        let mut idx = BTreeMap::new();
        for (k, s) in self.boundary.iter().enumerate() {
            idx.entry(s.edge).or_insert(k);
        }
        idx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The side through the tails of the band's x-edges.
    Top,
    /// The side through the heads of the band's x-edges.
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Band {
    pub letter: Symbol,
    pub cells: Vec<usize>,
    /// x-edges in band order; one more than `cells` unless the band is an
    /// annulus.
    pub edges: Vec<usize>,
    pub annulus: bool,
    pub top: Vec<Step>,
    pub bottom: Vec<Step>,
}

impl Band {
    pub fn start_edge(&self) -> Option<usize> {
        (!self.annulus).then(|| self.edges[0])
    }

    pub fn end_edge(&self) -> Option<usize> {
        (!self.annulus).then(|| *self.edges.last().expect("band has an edge"))
    }
}

fn reversed(path: &[Step]) -> Vec<Step> {
    path.iter().rev().map(|s| Step { edge: s.edge, forward: !s.forward }).collect()
}

/// All maximal x-bands. Cells with exactly two x-edge occurrences are band
/// cells; x-edges on no band cell form bands without cells.
pub fn trace_bands(dg: &Diagram, x: Symbol) -> Vec<Band> {
    let mut pairs: Vec<Option<(usize, usize)>> = Vec::new();
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (ci, c) in dg.cells.iter().enumerate() {
        let occ: Vec<usize> = (0..c.boundary.len()).filter(|&k| dg.edges[c.boundary[k].edge].symbol == x).collect();
        if occ.len() == 2 {
            pairs.push(Some((occ[0], occ[1])));
            for k in &occ {
                incident.entry(c.boundary[*k].edge).or_default().push(ci);
            }
        } else {
            pairs.push(None);
        }
    }
    let xedges: Vec<usize> = (0..dg.edges.len()).filter(|&e| dg.edges[e].symbol == x).collect();
    let bidx = dg.boundary_index();
    let mut order = xedges.clone();
    // ends first: edges on fewer than two band cells, boundary edges by position
    order.sort_by_key(|e| {
        let deg = incident.get(e).map_or(0, |v| v.len());
        (deg >= 2, bidx.get(e).copied().unwrap_or(usize::MAX), *e)
    });
    let mut used_edges = BTreeSet::new();
    let mut used_cells = BTreeSet::new();
    let mut bands = Vec::new();
    for start in order {
        if used_edges.contains(&start) {
            continue;
        }
        let mut band = Band { letter: x, cells: vec![], edges: vec![start], annulus: false, top: vec![], bottom: vec![] };
        used_edges.insert(start);
        let mut cur = start;
        loop {
            let next_cell = incident.get(&cur).and_then(|cs| cs.iter().find(|c| !used_cells.contains(*c)).copied());
            let Some(ci) = next_cell else { break };
            used_cells.insert(ci);
            let c = &dg.cells[ci];
            let (p, q) = pairs[ci].expect("band cell");
            let (a, b) = if c.boundary[p].edge == cur { (p, q) } else { (q, p) };
            let n = c.boundary.len();
            let arc1: Vec<Step> = (1..(b + n - a) % n).map(|k| c.boundary[(a + k) % n]).collect();
            let arc2: Vec<Step> = (1..(a + n - b) % n).map(|k| c.boundary[(b + k) % n]).collect();
            if c.boundary[a].forward {
                band.bottom.extend(arc1);
                band.top.extend(reversed(&arc2));
            } else {
                band.top.extend(arc1);
                band.bottom.extend(reversed(&arc2));
            }
            band.cells.push(ci);
            let exit = c.boundary[b].edge;
            if used_edges.contains(&exit) {
                band.annulus = exit == start;
                break;
            }
            used_edges.insert(exit);
            band.edges.push(exit);
            cur = exit;
        }
        bands.push(band);
    }
    bands
}

/// Freely reduced label of one side, read from the start edge to the end edge.
pub fn band_side_label(dg: &Diagram, b: &Band, side: Side) -> Word {
    let path = match side {
        Side::Top => &b.top,
        Side::Bottom => &b.bottom,
    };
    Word::reduce(dg.read(path))
}

/// Position of an edge on the boundary cycle, if it lies there.
pub fn boundary_position(dg: &Diagram, edge: usize) -> Option<usize> {
    dg.boundary.iter().position(|s| s.edge == edge)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT text: boundary vertices `b<k>` joined in boundary order, one node
/// `c<i>` per cell, dual links between cells sharing an edge, and dotted
/// links from cells to the boundary edges they contain.
pub fn export_dot(dg: &Diagram) -> String {
    let mut out = String::from("graph diagram {\n");
    writeln!(out, "  // area {} perimeter {}", dg.area(), dg.perimeter()).unwrap();
    let n = dg.boundary.len();
    for k in 0..n {
        writeln!(out, "  b{k} [shape=point];").unwrap();
    }
    for (k, s) in dg.boundary.iter().enumerate() {
        let label = dot_escape(&dg.letter(*s).to_string());
        writeln!(out, "  b{k} -- b{} [label=\"{label}\", penwidth=2, boundary=true];", (k + 1) % n).unwrap();
    }
    for (i, c) in dg.cells.iter().enumerate() {
        writeln!(out, "  c{i} [shape=box, label=\"c{i} r{}\"];", c.relator).unwrap();
    }
    let mut on_cells: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, c) in dg.cells.iter().enumerate() {
        for s in &c.boundary {
            on_cells.entry(s.edge).or_default().insert(i);
        }
    }
    for (e, cells) in &on_cells {
        let cells: Vec<usize> = cells.iter().copied().collect();
        let label = dot_escape(dg.edges[*e].symbol.name());
        for (x, a) in cells.iter().enumerate() {
            for b in &cells[x + 1..] {
                writeln!(out, "  c{a} -- c{b} [label=\"e{e} {label}\", style=dashed];").unwrap();
            }
        }
    }
    for (k, s) in dg.boundary.iter().enumerate() {
        if let Some(cells) = on_cells.get(&s.edge) {
            for c in cells {
                writeln!(out, "  c{c} -- b{k} [style=dotted];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::find_application;
    use crate::lemma3;
    use crate::presentation::s4_fragment;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn zero_cell_diagram() {
        let p = s4_fragment();
        let d = Derivation::new(w("s2 r1"));
        let dg = diagram_from_derivation(&p, &d).unwrap();
        assert_eq!(dg.area(), 0);
        assert_eq!(dg.perimeter(), 4);
        assert_eq!(Word::reduce(dg.boundary_label()), Word::empty());
        assert!(export_dot(&dg).contains("b3 -- b0"));
    }

    #[test]
    fn one_cell_band() {
        let p = s4_fragment();
        let start = w("rule4^-1 s2 rule4");
        let m = find_application(&p, start.letters(), w("d^-1 s2 d").letters()).unwrap();
        let d = Derivation { start: start.clone(), moves: vec![m] };
        let dg = diagram_from_derivation(&p, &d).unwrap();
        assert_eq!(dg.area(), 1);
        let label: Vec<Letter> = start.letters().iter().copied().chain(w("d^-1 s2 d").inverse().letters().iter().copied()).collect();
        assert!(dg.violations(&p, &label).is_empty());
        let bands = trace_bands(&dg, lemma3::sigma4());
        assert_eq!(bands.len(), 1);
        let b = &bands[0];
        assert_eq!(b.cells, vec![0]);
        assert!(boundary_position(&dg, b.start_edge().unwrap()).is_some());
        assert!(boundary_position(&dg, b.end_edge().unwrap()).is_some());
        assert_eq!(band_side_label(&dg, b, Side::Top), w("s2"));
        assert_eq!(band_side_label(&dg, b, Side::Bottom), w("d^-1 s2 d"));
        assert!(trace_bands(&dg, Symbol::intern("rule1")).is_empty());
        assert_eq!(export_dot(&dg).matches("[shape=box").count(), 1);
    }

    #[test]
    fn delta_one() {
        let p = s4_fragment();
        let d = lemma3::closed_filling(1);
        let dg = diagram_from_derivation(&p, &d).unwrap();
        assert_eq!(dg.perimeter(), 10);
        assert_eq!(dg.area(), d.area());
        assert!(dg.violations(&p, lemma3::loop_word(1).letters()).is_empty());
        assert_eq!(export_dot(&dg), export_dot(&diagram_from_derivation(&p, &d).unwrap()));
    }
}
