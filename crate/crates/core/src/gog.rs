//! Finite graphs of free groups with infinite cyclic or trivial edge groups.
//!
//! A vertex group is `F_r`, recorded only by its rank; attaching words for an
//! edge are written over the alphabet of the respective endpoint. The JSON
//! form is
//!
//! ```json
//! {
//!   "alphabet_ranks": { "u": 2, "v": 2 },
//!   "edges": [
//!     { "id": "e", "from": "u", "to": "v", "word_from": "abAB", "word_to": "abAB" },
//!     { "id": "f", "from": "u", "to": "v", "trivial": true }
//!   ]
//! }
//! ```

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{format_letters, parse_letters, Letter, Word};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GogVertex {
    pub id: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeGroup {
    Trivial,
    /// Images of a generator of `Z` in the origin and terminus vertex groups.
    /// Stored as given; [`GraphOfGroups::validate`] checks they are reduced.
    Cyclic {
        word_from: Vec<Letter>,
        word_to: Vec<Letter>,
    },
}

impl EdgeGroup {
    pub fn is_trivial(&self) -> bool {
        matches!(self, EdgeGroup::Trivial)
    }

    /// Euler characteristic of the edge group.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            EdgeGroup::Trivial => 1,
            EdgeGroup::Cyclic { .. } => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GogEdge {
    pub id: String,
    pub from: VertexId,
    pub to: VertexId,
    pub group: EdgeGroup,
}

impl GogEdge {
    pub fn word_from(&self) -> Option<Word> {
        match &self.group {
            EdgeGroup::Cyclic { word_from, .. } => Some(Word::from_raw(word_from.iter().copied())),
            EdgeGroup::Trivial => None,
        }
    }

    pub fn word_to(&self) -> Option<Word> {
        match &self.group {
            EdgeGroup::Cyclic { word_to, .. } => Some(Word::from_raw(word_to.iter().copied())),
            EdgeGroup::Trivial => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertices: Vec<GogVertex>,
    edges: Vec<GogEdge>,
}

/// Which end of an edge an attaching word belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    From,
    To,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoVertices,
    Disconnected { unreachable: Vec<String> },
    DuplicateVertexId { id: String },
    DuplicateEdgeId { id: String },
    EmptyAttachingWord { edge: String, end: End },
    NotReduced { edge: String, end: End },
    LetterOutOfRange { edge: String, end: End, letter: Letter, rank: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraphOfGroups(
                serde_json::to_string(&self.violations).unwrap_or_default(),
            ))
        }
    }
}

/// A generator of a presentation of the fundamental group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationGenerator {
    /// The `index`-th (1-based) generator of a vertex group.
    Vertex { vertex: VertexId, index: usize },
    /// Stable letter of an edge outside the spanning tree.
    Stable { edge: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

/// Presentation of the fundamental group relative to a spanning tree. Words
/// are over the alphabet whose `i`-th letter is `generators[i - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<PresentationGenerator>,
    pub names: Vec<String>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    fn render(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".into();
        }
        let letters = w.letters();
        let mut parts = Vec::new();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * i64::from(l.signum());
            let name = &self.names[l.unsigned_abs() as usize - 1];
            parts.push(if run == 1 {
                name.clone()
            } else {
                format!("{name}^{run}")
            });
            i = j;
        }
        parts.join(" ")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.names.join(", "))?;
        if !self.relations.is_empty() {
            f.write_str(" | ")?;
            let rels: Vec<String> = self
                .relations
                .iter()
                .map(|r| format!("{} = {}", self.render(&r.lhs), self.render(&r.rhs)))
                .collect();
            f.write_str(&rels.join(", "))?;
        }
        f.write_str(">")
    }
}

/// Basis for the vanishing of the second Betti number in
/// [`L2Prediction`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum B2Status {
    /// The group is free (or trivial): the classifying space is a graph.
    Unconditional,
    /// Weighted graph is balanced and solvable.
    RelHypCertified,
    /// No certificate; vanishing is assumed.
    Assumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct L2Prediction {
    pub b0: u64,
    pub b1: u64,
    pub b2: u64,
    pub b2_status: B2Status,
    /// `b1` depends on the assumption `b2 = 0`.
    pub conditional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProductDecomposition {
    /// Components left after deleting trivial-edge-group edges.
    pub factors: Vec<GraphOfGroups>,
    /// Ids of the deleted edges.
    pub removed_edges: Vec<String>,
    /// Rank of the free factor contributed by deleted edges beyond those
    /// needed to reconnect the factors.
    pub free_rank: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGog {
    alphabet_ranks: IndexMap<String, usize>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    id: String,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word_to: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    trivial: bool,
}

impl GraphOfGroups {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, rank: usize) -> VertexId {
        self.vertices.push(GogVertex {
            id: id.into(),
            rank,
        });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, id: impl Into<String>, from: VertexId, to: VertexId, group: EdgeGroup) -> EdgeId {
        assert!(from < self.vertices.len() && to < self.vertices.len());
        self.edges.push(GogEdge {
            id: id.into(),
            from,
            to,
            group,
        });
        self.edges.len() - 1
    }

    /// Adds an edge with group `Z`, attaching words in the ASCII syntax.
    pub fn add_cyclic_edge(
        &mut self,
        id: impl Into<String>,
        from: VertexId,
        to: VertexId,
        word_from: &str,
        word_to: &str,
    ) -> Result<EdgeId> {
        let group = EdgeGroup::Cyclic {
            word_from: parse_letters(word_from)?,
            word_to: parse_letters(word_to)?,
        };
        Ok(self.add_edge(id, from, to, group))
    }

    pub fn add_trivial_edge(&mut self, id: impl Into<String>, from: VertexId, to: VertexId) -> EdgeId {
        self.add_edge(id, from, to, EdgeGroup::Trivial)
    }

    pub fn vertices(&self) -> &[GogVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GogEdge] {
        &self.edges
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn has_trivial_edges(&self) -> bool {
        self.edges.iter().any(|e| e.group.is_trivial())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.vertices.is_empty() {
            violations.push(Violation::NoVertices);
        }
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                violations.push(Violation::DuplicateVertexId { id: v.id.clone() });
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert(e.id.as_str()) {
                violations.push(Violation::DuplicateEdgeId { id: e.id.clone() });
            }
        }
        if !self.vertices.is_empty() {
            let reach = self.reachable_from(0, |_| true);
            let unreachable: Vec<String> = self
                .vertices
                .iter()
                .zip(&reach)
                .filter(|(_, &r)| !r)
                .map(|(v, _)| v.id.clone())
                .collect();
            if !unreachable.is_empty() {
                violations.push(Violation::Disconnected { unreachable });
            }
        }
        for e in &self.edges {
            let EdgeGroup::Cyclic { word_from, word_to } = &e.group else {
                continue;
            };
            for (end, word, vertex) in [(End::From, word_from, e.from), (End::To, word_to, e.to)] {
                let rank = self.vertices[vertex].rank;
                if word.is_empty() {
                    violations.push(Violation::EmptyAttachingWord {
                        edge: e.id.clone(),
                        end,
                    });
                    continue;
                }
                if let Some(&letter) = word
                    .iter()
                    .find(|&&l| l == 0 || l.unsigned_abs() as usize > rank)
                {
                    violations.push(Violation::LetterOutOfRange {
                        edge: e.id.clone(),
                        end,
                        letter,
                        rank,
                    });
                }
                if word.windows(2).any(|p| p[0] == -p[1]) {
                    violations.push(Violation::NotReduced {
                        edge: e.id.clone(),
                        end,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Vertices reachable from `start` through edges accepted by `use_edge`.
    fn reachable_from(&self, start: VertexId, use_edge: impl Fn(&GogEdge) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| use_edge(e)) {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen
    }

    /// Breadth-first spanning tree from the first vertex, scanning edges in
    /// order.
    pub fn default_spanning_tree(&self) -> Vec<EdgeId> {
        let mut seen = vec![false; self.vertices.len()];
        let mut tree = Vec::new();
        if self.vertices.is_empty() {
            return tree;
        }
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        tree.push(i);
                        queue.push_back(b);
                    }
                }
            }
        }
        tree
    }

    fn check_spanning_tree(&self, tree: &[EdgeId]) -> Result<()> {
        let n = self.vertices.len();
        if tree.iter().any(|&e| e >= self.edges.len()) {
            return Err(Error::NotSpanningTree("edge index out of range".into()));
        }
        let set: HashSet<EdgeId> = tree.iter().copied().collect();
        if set.len() != tree.len() {
            return Err(Error::NotSpanningTree("repeated edge".into()));
        }
        if n == 0 || tree.len() != n - 1 {
            return Err(Error::NotSpanningTree(format!(
                "{} edges for {} vertices",
                tree.len(),
                n
            )));
        }
        let reach = self.reachable_from(0, |e| {
            let i = self.edges.iter().position(|x| std::ptr::eq(x, e)).unwrap();
            set.contains(&i)
        });
        if reach.iter().all(|&r| r) {
            Ok(())
        } else {
            Err(Error::NotSpanningTree("does not reach every vertex".into()))
        }
    }

    /// Presentation of `π₁` relative to the spanning tree `tree`: vertex
    /// generators plus a stable letter `t_e` per edge outside the tree, and a
    /// relation `t_e·φ_o(x)·t_e⁻¹ = φ_t(x)` per cyclic edge (`t_e = 1` on
    /// the tree).
    pub fn presentation_rel_tree(&self, tree: &[EdgeId]) -> Result<Presentation> {
        self.check_spanning_tree(tree)?;
        let in_tree: HashSet<EdgeId> = tree.iter().copied().collect();
        let mut generators = Vec::new();
        let mut offsets = Vec::with_capacity(self.vertices.len());
        for (v, vert) in self.vertices.iter().enumerate() {
            offsets.push(generators.len());
            for index in 1..=vert.rank {
                generators.push(PresentationGenerator::Vertex { vertex: v, index });
            }
        }
        let vertex_gens = generators.len();
        let mut stable = vec![None; self.edges.len()];
        for e in 0..self.edges.len() {
            if !in_tree.contains(&e) {
                generators.push(PresentationGenerator::Stable { edge: e });
                stable[e] = Some(generators.len() as Letter);
            }
        }
        let stable_count = generators.len() - vertex_gens;

        let skip_t = stable_count > 0;
        let mut names = Vec::with_capacity(generators.len());
        let letters: Vec<char> = ('a'..='z').filter(|&c| !(skip_t && c == 't')).collect();
        for i in 0..vertex_gens {
            if vertex_gens <= letters.len() {
                names.push(letters[i].to_string());
            } else {
                names.push(format!("x{}", i + 1));
            }
        }
        for k in 0..stable_count {
            names.push(if stable_count == 1 {
                "t".to_string()
            } else {
                format!("t{}", k + 1)
            });
        }

        let global = |v: VertexId, w: &[Letter]| {
            Word::from_raw(w.iter().map(|&l| {
                let g = (offsets[v] + l.unsigned_abs() as usize) as Letter;
                g * l.signum()
            }))
        };
        let mut relations = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let EdgeGroup::Cyclic { word_from, word_to } = &e.group else {
                continue;
            };
            let mut lhs = global(e.from, word_from);
            if let Some(t) = stable[i] {
                lhs = Word::generator(t).mul(&lhs).mul(&Word::generator(-t));
            }
            relations.push(Relation {
                lhs,
                rhs: global(e.to, word_to),
            });
        }
        Ok(Presentation {
            generators,
            names,
            relations,
        })
    }

    pub fn presentation(&self) -> Result<Presentation> {
        self.presentation_rel_tree(&self.default_spanning_tree())
    }

    /// `Σ_v (1 − rank_v) − Σ_e χ(G_e)`.
    pub fn euler_characteristic(&self) -> i64 {
        let vertices: i64 = self.vertices.iter().map(|v| 1 - v.rank as i64).sum();
        let edges: i64 = self.edges.iter().map(|e| e.group.euler_characteristic()).sum();
        vertices - edges
    }

    /// The fundamental group is trivial.
    pub fn is_trivial_group(&self) -> bool {
        self.vertices.iter().all(|v| v.rank == 0)
            && self.edges.iter().all(|e| e.group.is_trivial())
            && self.edges.len() + 1 == self.vertices.len()
    }

    pub fn predicted_l2_betti(&self) -> L2Prediction {
        if self.is_trivial_group() {
            return L2Prediction {
                b0: 1,
                b1: 0,
                b2: 0,
                b2_status: B2Status::Unconditional,
                conditional: false,
            };
        }
        let b2_status = if self.edges.iter().all(|e| e.group.is_trivial()) {
            B2Status::Unconditional
        } else if crate::phi::classify(self).map(|r| r.rel_hyp_virt_abelian).unwrap_or(false) {
            B2Status::RelHypCertified
        } else {
            B2Status::Assumed
        };
        L2Prediction {
            b0: 0,
            b1: (-self.euler_characteristic()).max(0) as u64,
            b2: 0,
            b2_status,
            conditional: b2_status != B2Status::Unconditional,
        }
    }

    /// Deletes edges with trivial edge group and returns the remaining
    /// components.
    pub fn free_product_decompose(&self) -> FreeProductDecomposition {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let reach = self.reachable_from(s, |e| !e.group.is_trivial());
            for v in 0..n {
                if reach[v] {
                    comp[v] = count;
                }
            }
            count += 1;
        }
        let mut factors: Vec<GraphOfGroups> = vec![GraphOfGroups::new(); count];
        let mut local = vec![0; n];
        for v in 0..n {
            let f = &mut factors[comp[v]];
            local[v] = f.add_vertex(self.vertices[v].id.clone(), self.vertices[v].rank);
        }
        let mut removed_edges = Vec::new();
        for e in &self.edges {
            if e.group.is_trivial() {
                removed_edges.push(e.id.clone());
            } else {
                factors[comp[e.from]].add_edge(e.id.clone(), local[e.from], local[e.to], e.group.clone());
            }
        }
        let free_rank = (removed_edges.len() + 1).saturating_sub(count);
        FreeProductDecomposition {
            factors,
            removed_edges,
            free_rank,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: JsonGog = serde_json::from_str(text)?;
        let mut g = GraphOfGroups::new();
        for (id, &rank) in &raw.alphabet_ranks {
            g.add_vertex(id.clone(), rank);
        }
        let lookup = |g: &GraphOfGroups, id: &str, edge: &str| {
            g.vertex_by_id(id).ok_or_else(|| {
                Error::InvalidGraphOfGroups(format!("edge {edge:?} refers to unknown vertex {id:?}"))
            })
        };
        for e in raw.edges {
            let from = lookup(&g, &e.from, &e.id)?;
            let to = lookup(&g, &e.to, &e.id)?;
            let group = match (e.trivial, e.word_from, e.word_to) {
                (true, None, None) => EdgeGroup::Trivial,
                (false, Some(wf), Some(wt)) => EdgeGroup::Cyclic {
                    word_from: parse_letters(&wf)?,
                    word_to: parse_letters(&wt)?,
                },
                _ => {
                    return Err(Error::InvalidGraphOfGroups(format!(
                        "edge {:?} needs both attaching words or `\"trivial\": true`",
                        e.id
                    )))
                }
            };
            g.add_edge(e.id, from, to, group);
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let raw = JsonGog {
            alphabet_ranks: self.vertices.iter().map(|v| (v.id.clone(), v.rank)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    let (word_from, word_to, trivial) = match &e.group {
                        EdgeGroup::Trivial => (None, None, true),
                        EdgeGroup::Cyclic { word_from, word_to } => (
                            Some(self.format_word(e.from, word_from)),
                            Some(self.format_word(e.to, word_to)),
                            false,
                        ),
                    };
                    JsonEdge {
                        id: e.id.clone(),
                        from: self.vertices[e.from].id.clone(),
                        to: self.vertices[e.to].id.clone(),
                        word_from,
                        word_to,
                        trivial,
                    }
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("serializable");
        s.push('\n');
        s
    }

    fn format_word(&self, v: VertexId, letters: &[Letter]) -> String {
        if letters.is_empty() {
            return String::new();
        }
        format_letters(letters, self.vertices[v].rank > 26)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph graph_of_groups {\n  node [shape=ellipse];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label=\"{} : F{}\"];", escape(&v.id), v.rank);
        }
        for e in &self.edges {
            let label = match &e.group {
                EdgeGroup::Trivial => "1".to_string(),
                EdgeGroup::Cyclic { word_from, word_to } => format!(
                    "{} / {}",
                    self.format_word(e.from, word_from),
                    self.format_word(e.to, word_to)
                ),
            };
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}: {}\"];",
                e.from,
                e.to,
                escape(&e.id),
                escape(&label)
            );
        }
        s.push_str("}\n");
        s
    }

    /// Whether every vertex group is `Z` and every edge group is `Z`: the
    /// graph of groups of a generalised Baumslag–Solitar group.
    pub fn is_gbs(&self) -> bool {
        self.vertices.iter().all(|v| v.rank == 1) && !self.has_trivial_edges()
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
