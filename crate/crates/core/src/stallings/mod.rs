//! Stallings automata of finitely generated subgroups of free groups.
//!
//! A [`StallingsGraph`] is a folded, connected, based graph whose edges carry
//! positive generator labels. Reading a reduced word along it from the base
//! (inverse letters traverse edges backwards) returns to the base exactly when
//! the word lies in the subgroup.
//!
//! Vertices are numbered in breadth-first discovery order from the base,
//! visiting letters in the order `1, -1, 2, -2, ...`. Since the graph is folded
//! this numbering is canonical: two graphs are labelled-isomorphic as based
//! graphs iff their adjacency tables coincide.

mod pullback;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

pub use pullback::{intersection, pullback, DoubleCosetComponent};

#[inline]
pub(crate) fn slot(l: Letter) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

#[inline]
pub(crate) fn slot_letter(s: usize) -> Letter {
    let g = (s / 2 + 1) as Letter;
    if s % 2 == 0 {
        g
    } else {
        -g
    }
}

/// A labelled graph that may still need folding.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    num_vertices: usize,
    base: usize,
    edges: Vec<(usize, Letter, usize)>,
    identify: Vec<(usize, usize)>,
}

impl LabeledGraph {
    /// A graph with a single vertex, which is the base.
    pub fn new(alphabet: Alphabet) -> Self {
        LabeledGraph {
            alphabet,
            num_vertices: 1,
            base: 0,
            edges: Vec::new(),
            identify: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn set_base(&mut self, v: usize) {
        assert!(v < self.num_vertices);
        self.base = v;
    }

    pub fn add_vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    /// Adds an edge `u --label--> v`; a negative label is stored reversed.
    pub fn add_edge(&mut self, u: usize, label: Letter, v: usize) -> Result<()> {
        self.alphabet.check(&[label])?;
        assert!(u < self.num_vertices && v < self.num_vertices);
        if label > 0 {
            self.edges.push((u, label, v));
        } else {
            self.edges.push((v, -label, u));
        }
        Ok(())
    }

    /// Adds a path reading `letters` from `from`. It ends at `to` when given,
    /// otherwise at a fresh vertex. Returns the endpoint.
    pub fn add_path(&mut self, from: usize, letters: &[Letter], to: Option<usize>) -> Result<usize> {
        self.alphabet.check(letters)?;
        if letters.is_empty() {
            if let Some(t) = to {
                if t != from {
                    self.identify.push((from, t));
                }
                return Ok(t);
            }
            return Ok(from);
        }
        let mut cur = from;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                to.unwrap_or_else(|| self.add_vertex())
            } else {
                self.add_vertex()
            };
            self.add_edge(cur, l, next)?;
            cur = next;
        }
        Ok(cur)
    }

    /// Adds a closed path at the base reading `word`.
    pub fn add_loop(&mut self, word: &[Letter]) -> Result<()> {
        if !word.is_empty() {
            self.add_path(self.base, word, Some(self.base))?;
        }
        Ok(())
    }

    /// Glues a copy of `g` so that its base is identified with `at`. Returns
    /// the vertex offset of the copy (vertex `v` of `g` becomes `offset + v`,
    /// except the base which becomes `at`).
    pub fn attach(&mut self, g: &StallingsGraph, at: usize) -> Result<usize> {
        if g.alphabet != self.alphabet {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet.rank(),
                found: g.alphabet.rank(),
            });
        }
        let offset = self.num_vertices;
        self.num_vertices += g.num_vertices();
        let map = |v: usize| if v == g.base() { at } else { offset + v };
        for (u, l, v) in g.edges() {
            self.edges.push((map(u), l, map(v)));
        }
        Ok(offset)
    }

    /// Folds the graph; the result is not trimmed.
    pub fn fold(&self) -> StallingsGraph {
        self.fold_tracking(&[]).0
    }

    /// Folds and reports where each of `tracked` ends up in the folded graph.
    pub fn fold_tracking(&self, tracked: &[usize]) -> (StallingsGraph, Vec<usize>) {
        let (adj, find) = fold_adjacency(self);
        let base = find[self.base];
        let alive: Vec<bool> = (0..adj.len()).map(|v| find[v] == v).collect();
        let (g, renumber) = StallingsGraph::canonical(self.alphabet, &adj, &alive, base);
        let out = tracked
            .iter()
            .map(|&t| renumber[find[t]].expect("tracked vertex disconnected from base"))
            .collect();
        (g, out)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Union-find folding. Returns the adjacency of representative vertices (with
/// targets resolved to representatives) and the representative of every vertex.
fn fold_adjacency(g: &LabeledGraph) -> (Vec<Vec<Option<usize>>>, Vec<usize>) {
    let n = g.num_vertices;
    let slots = 2 * g.alphabet.rank();
    let mut adj = vec![vec![None; slots]; n];
    let mut uf = UnionFind::new(n);
    let mut pending: Vec<(usize, usize)> = g.identify.clone();

    let link = |adj: &mut Vec<Vec<Option<usize>>>, u: usize, s: usize, v: usize, pending: &mut Vec<(usize, usize)>| {
        match adj[u][s] {
            Some(w) => pending.push((w, v)),
            None => adj[u][s] = Some(v),
        }
    };
    for &(u, l, v) in &g.edges {
        link(&mut adj, u, slot(l), v, &mut pending);
        link(&mut adj, v, slot(-l), u, &mut pending);
    }
    while let Some((a, b)) = pending.pop() {
        let (a, b) = (uf.find(a), uf.find(b));
        if a == b {
            continue;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        uf.parent[gone] = keep;
        let moved = std::mem::take(&mut adj[gone]);
        for (s, target) in moved.into_iter().enumerate() {
            if let Some(x) = target {
                match adj[keep][s] {
                    Some(y) => pending.push((x, y)),
                    None => adj[keep][s] = Some(x),
                }
            }
        }
    }
    let find: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    for v in 0..n {
        if find[v] != v {
            adj[v] = vec![None; slots];
            continue;
        }
        for s in 0..slots {
            if let Some(x) = adj[v][s] {
                adj[v][s] = Some(find[x]);
            }
        }
    }
    (adj, find)
}

/// Marks the vertices surviving repeated removal of degree ≤ 1 vertices among
/// `alive`, never removing the vertices in `keep`.
pub(crate) fn trim(adj: &[Vec<Option<usize>>], alive: &[bool], keep: &[usize]) -> Vec<bool> {
    let mut alive = alive.to_vec();
    let mut degree: Vec<usize> = adj
        .iter()
        .enumerate()
        .map(|(v, row)| {
            if alive[v] {
                row.iter().filter(|t| t.is_some()).count()
            } else {
                0
            }
        })
        .collect();
    let mut stack: Vec<usize> = (0..adj.len())
        .filter(|&v| alive[v] && degree[v] <= 1 && !keep.contains(&v))
        .collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for x in adj[v].iter().flatten() {
            let x = *x;
            if x != v && alive[x] {
                degree[x] -= 1;
                if degree[x] <= 1 && !keep.contains(&x) {
                    stack.push(x);
                }
            }
        }
    }
    alive
}

/// Index of a subgroup in the ambient free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupIndex {
    Finite(usize),
    Infinite,
}

impl SubgroupIndex {
    pub fn finite(self) -> Option<usize> {
        match self {
            SubgroupIndex::Finite(n) => Some(n),
            SubgroupIndex::Infinite => None,
        }
    }
}

impl Serialize for SubgroupIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SubgroupIndex::Finite(n) => s.serialize_u64(*n as u64),
            SubgroupIndex::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Folded, connected, based Stallings graph. The base is vertex 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StallingsGraph {
    alphabet: Alphabet,
    adj: Vec<Vec<Option<usize>>>,
}

impl StallingsGraph {
    /// The graph of the trivial subgroup: a single vertex.
    pub fn trivial(alphabet: Alphabet) -> Self {
        StallingsGraph {
            alphabet,
            adj: vec![vec![None; 2 * alphabet.rank()]],
        }
    }

    /// The rose: the whole free group.
    pub fn rose(alphabet: Alphabet) -> Self {
        StallingsGraph {
            alphabet,
            adj: vec![vec![Some(0); 2 * alphabet.rank()]],
        }
    }

    /// Renumbers the vertices of `adj` reachable from `base` among `alive`.
    /// Returns the graph and the new number of every old vertex.
    pub(crate) fn canonical(
        alphabet: Alphabet,
        adj: &[Vec<Option<usize>>],
        alive: &[bool],
        base: usize,
    ) -> (Self, Vec<Option<usize>>) {
        let slots = 2 * alphabet.rank();
        let mut renumber = vec![None; adj.len()];
        let mut order = vec![base];
        renumber[base] = Some(0);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for s in 0..slots {
                if let Some(x) = adj[v][s] {
                    if alive[x] && renumber[x].is_none() {
                        renumber[x] = Some(order.len());
                        order.push(x);
                    }
                }
            }
        }
        let new_adj = order
            .iter()
            .map(|&v| {
                (0..slots)
                    .map(|s| adj[v][s].and_then(|x| if alive[x] { renumber[x] } else { None }))
                    .collect()
            })
            .collect();
        (
            StallingsGraph {
                alphabet,
                adj: new_adj,
            },
            renumber,
        )
    }

    /// Folded core of the subgroup generated by `gens`.
    pub fn from_generators(gens: &[Word], alphabet: Alphabet) -> Result<Self> {
        let mut g = LabeledGraph::new(alphabet);
        for w in gens {
            g.add_loop(w.letters())?;
        }
        Ok(g.fold().core())
    }

    /// Parses generators in the ASCII syntax, one per entry.
    pub fn from_ascii(gens: &[&str], alphabet: Alphabet) -> Result<Self> {
        let words = gens
            .iter()
            .map(|s| alphabet.parse_word(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&words, alphabet)
    }

    /// Removes hanging trees, keeping the base.
    pub fn core(&self) -> StallingsGraph {
        let alive = trim(&self.adj, &vec![true; self.adj.len()], &[0]);
        Self::canonical(self.alphabet, &self.adj, &alive, 0).0
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn base(&self) -> usize {
        0
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj
            .iter()
            .map(|row| row.iter().step_by(2).filter(|t| t.is_some()).count())
            .sum()
    }

    /// Edges `(source, generator, target)` ordered by source then generator.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Letter, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(v, row)| {
            row.iter()
                .enumerate()
                .step_by(2)
                .filter_map(move |(s, t)| t.map(|t| (v, slot_letter(s), t)))
        })
    }

    pub(crate) fn adjacency(&self) -> &[Vec<Option<usize>>] {
        &self.adj
    }

    pub fn follow(&self, v: usize, l: Letter) -> Option<usize> {
        if !self.alphabet.contains(l) {
            return None;
        }
        self.adj[v][slot(l)]
    }

    /// Endpoint of the path reading `letters` from `v`, if it exists.
    pub fn trace(&self, v: usize, letters: &[Letter]) -> Option<usize> {
        letters.iter().try_fold(v, |cur, &l| self.follow(cur, l))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|t| t.is_some()).count()
    }

    /// Every vertex other than the base has degree at least 2.
    pub fn is_core(&self) -> bool {
        (1..self.num_vertices()).all(|v| self.degree(v) >= 2)
    }

    fn check_alphabet(&self, w: &Word) -> Result<()> {
        if w.max_generator() > self.alphabet.rank() {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet.rank(),
                found: w.max_generator(),
            });
        }
        Ok(())
    }

    pub fn membership(&self, w: &Word) -> Result<bool> {
        self.check_alphabet(w)?;
        Ok(self.contains(w))
    }

    /// Like [`membership`](Self::membership) but letters outside the alphabet
    /// simply fail to be read.
    pub fn contains(&self, w: &Word) -> bool {
        self.trace(0, w.letters()) == Some(0)
    }

    /// `E - V + 1`, the rank of the subgroup.
    pub fn rank(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    /// `max(rank - 1, 0)`, the reduced Euler characteristic of the subgroup.
    pub fn reduced_rank(&self) -> usize {
        self.rank().saturating_sub(1)
    }

    pub fn index_in_ambient(&self) -> SubgroupIndex {
        if self.adj.iter().all(|row| row.iter().all(|t| t.is_some())) {
            SubgroupIndex::Finite(self.num_vertices())
        } else {
            SubgroupIndex::Infinite
        }
    }

    /// Breadth-first spanning tree: for every vertex, the tree word from the
    /// base and the slot of the tree edge used to reach it.
    pub(crate) fn tree_paths(&self) -> (Vec<Word>, Vec<Option<(usize, usize)>>) {
        let n = self.num_vertices();
        let mut words: Vec<Option<Word>> = vec![None; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        words[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for s in 0..self.adj[v].len() {
                if let Some(x) = self.adj[v][s] {
                    if words[x].is_none() {
                        let w = words[v].as_ref().unwrap().mul(&Word::generator(slot_letter(s)));
                        words[x] = Some(w);
                        parent[x] = Some((v, s));
                        queue.push_back(x);
                    }
                }
            }
        }
        (words.into_iter().map(|w| w.expect("connected")).collect(), parent)
    }

    /// Free basis read off the breadth-first spanning tree, one word per
    /// non-tree edge in edge order.
    pub fn basis(&self) -> Vec<Word> {
        let (words, parent) = self.tree_paths();
        let is_tree = |u: usize, l: Letter, v: usize| {
            parent[v] == Some((u, slot(l))) || parent[u] == Some((v, slot(-l)))
        };
        self.edges()
            .filter(|&(u, l, v)| !is_tree(u, l, v))
            .map(|(u, l, v)| {
                words[u]
                    .mul(&Word::generator(l))
                    .mul(&words[v].inverse())
            })
            .collect()
    }

    /// Graph of `t⁻¹ H t` where `H` is the subgroup of `self`.
    pub fn conjugate(&self, t: &Word) -> Result<StallingsGraph> {
        self.check_alphabet(t)?;
        if t.is_identity() {
            return Ok(self.clone());
        }
        let mut g = LabeledGraph::new(self.alphabet);
        g.attach(self, 0)?;
        let end = g.add_path(0, t.letters(), None)?;
        g.set_base(end);
        Ok(g.fold().core())
    }

    /// Labelled isomorphism of based graphs, checked by a simultaneous walk.
    pub fn is_isomorphic(&self, other: &StallingsGraph) -> bool {
        if self.alphabet != other.alphabet
            || self.num_vertices() != other.num_vertices()
            || self.num_edges() != other.num_edges()
        {
            return false;
        }
        let n = self.num_vertices();
        let mut map: Vec<Option<usize>> = vec![None; n];
        let mut used = vec![false; n];
        map[0] = Some(0);
        used[0] = true;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            let w = map[v].unwrap();
            for s in 0..self.adj[v].len() {
                match (self.adj[v][s], other.adj[w][s]) {
                    (None, None) => {}
                    (Some(x), Some(y)) => match map[x] {
                        Some(m) if m == y => {}
                        Some(_) => return false,
                        None => {
                            if used[y] {
                                return false;
                            }
                            map[x] = Some(y);
                            used[y] = true;
                            stack.push(x);
                        }
                    },
                    _ => return false,
                }
            }
        }
        map.iter().all(|m| m.is_some())
    }

    /// Graphviz rendering; the base is drawn as a double circle.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph stallings {\n  rankdir=LR;\n  node [shape=circle];\n");
        for v in 0..self.num_vertices() {
            if v == 0 {
                let _ = writeln!(
                    s,
                    "  {v} [shape=doublecircle, style=filled, fillcolor=lightgray];"
                );
            } else {
                let _ = writeln!(s, "  {v};");
            }
        }
        for (u, l, v) in self.edges() {
            let _ = writeln!(s, "  {u} -> {v} [label=\"{}\"];", self.alphabet.format(&[l]));
        }
        s.push_str("}\n");
        s
    }
}

/// A subgroup given by generators, as read from a subgroup file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub alphabet: Alphabet,
    pub generators: Vec<Word>,
}

impl SubgroupSpec {
    /// Parses the subgroup file format: a header line `alphabet: <rank>`
    /// followed by one word per line. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut generators = Vec::new();
        let mut offset = 0;
        for (i, raw_line) in text.split_inclusive('\n').enumerate() {
            let line_start = offset;
            offset += raw_line.len();
            let content = raw_line.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            match alphabet {
                None => {
                    let rest = trimmed.strip_prefix("alphabet:").ok_or_else(|| {
                        Error::parse_at(text, line_start, trimmed, "expected `alphabet: <rank>` header")
                    })?;
                    let rank: usize = rest.trim().parse().map_err(|_| {
                        Error::parse_at(text, line_start, rest.trim(), "rank must be a positive integer")
                    })?;
                    alphabet = Some(Alphabet::new(rank).map_err(|_| {
                        Error::parse_at(text, line_start, rest.trim(), "rank must be a positive integer")
                    })?);
                }
                Some(a) => {
                    let w = a
                        .parse_word(content)
                        .map_err(|e| match e {
                            Error::Parse { .. } => e.relocate(i + 1, line_start),
                            Error::LetterOutOfRange { letter, rank } => Error::parse_at(
                                text,
                                line_start,
                                trimmed,
                                format!("letter {letter} outside alphabet of rank {rank}"),
                            ),
                            other => other,
                        })?;
                    generators.push(w);
                }
            }
        }
        let alphabet = alphabet
            .ok_or_else(|| Error::parse_at(text, 0, "", "missing `alphabet: <rank>` header"))?;
        Ok(SubgroupSpec {
            alphabet,
            generators,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("alphabet: {}\n", self.alphabet.rank());
        for w in &self.generators {
            s.push_str(&self.alphabet.format(w.letters()));
            s.push('\n');
        }
        s
    }

    pub fn graph(&self) -> Result<StallingsGraph> {
        StallingsGraph::from_generators(&self.generators, self.alphabet)
    }
}
