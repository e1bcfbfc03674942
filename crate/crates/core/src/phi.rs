//! Weighted graphs attached to graphs of free groups with cyclic edge groups.
//!
//! Each vertex of the weighted graph stands for a conjugacy class of maximal
//! cyclic subgroups (a primitive root up to rotation and inversion) in one
//! vertex group; each edge of the graph of groups becomes an edge whose end
//! weights are the exponents of its attaching words over those roots.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! vertex v
//! vertex w u abAB        # optional tag: graph-of-groups vertex and root
//! edge e v 2 v -3
//! ```

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gog::{escape, EdgeGroup, GraphOfGroups};
use crate::words::{format_letters, is_cyclically_reduced, parse_letters, primitive_root, CyclicWord, Word};

pub type Gain = Ratio<BigInt>;

/// Where a weighted-graph vertex comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTag {
    pub gamma_vertex: String,
    /// Canonical representative of the root class; its orientation is the
    /// positive one.
    pub root: CyclicWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiVertex {
    pub id: String,
    pub tag: Option<PhiTag>,
    /// Several attaching words share this root class but not all of them are
    /// cyclically reduced, so their images are immersed rather than equal
    /// circles.
    pub mixed_attachments: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEdge {
    /// Id of the source edge of the graph of groups when built by
    /// [`build_phi`].
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub weight_from: i64,
    pub weight_to: i64,
}

impl PhiEdge {
    /// Whether both end weights are ±1.
    pub fn is_unimodular(&self) -> bool {
        self.weight_from.abs() == 1 && self.weight_to.abs() == 1
    }

    /// Product of the signs of the two end weights.
    pub fn sign(&self) -> i64 {
        self.weight_from.signum() * self.weight_to.signum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    vertices: Vec<PhiVertex>,
    edges: Vec<PhiEdge>,
}

/// One edge traversal of a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStep {
    pub edge: String,
    /// Traversed from its `from` end to its `to` end.
    pub forward: bool,
}

fn serialize_gain<S: Serializer>(g: &Gain, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&g.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub cycle: Vec<CycleStep>,
    #[serde(serialize_with = "serialize_gain")]
    pub gain: Gain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub balanced: bool,
    /// First fundamental cycle whose gain is not ±1.
    pub witness: Option<CycleWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    OToT,
    TToO,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedEdge {
    pub edge: String,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolvabilityReport {
    pub solvable: bool,
    /// Orientation in which every vertex is the tail of at most one edge and
    /// every head end has weight ±1.
    pub orientation: Option<Vec<OrientedEdge>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Torus,
    Klein,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KleinTorusLoop {
    pub cycle: Vec<CycleStep>,
    pub kind: LoopKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    /// Index of the free factor this component belongs to.
    pub factor: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub balanced: bool,
    pub solvable: bool,
    pub unbalanced_cycle: Option<CycleWitness>,
    pub orientation: Option<Vec<OrientedEdge>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub balanced: bool,
    pub solvable: bool,
    pub lerf: bool,
    #[serde(rename = "rf")]
    pub residually_finite: bool,
    pub rel_hyp_virt_abelian: bool,
    /// Conjectural: predicted from solvability, not decided.
    pub l2_hall_predicted: bool,
    pub components: Vec<ComponentReport>,
    /// Vertices whose identification merged immersed attaching circles.
    pub mixed_attachments: Vec<String>,
}

/// Spanning forest used to extract fundamental cycles.
struct Forest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    in_tree: Vec<bool>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> usize {
        self.vertices.push(PhiVertex {
            id: id.into(),
            tag: None,
            mixed_attachments: false,
        });
        self.vertices.len() - 1
    }

    pub fn add_tagged_vertex(&mut self, id: impl Into<String>, tag: PhiTag) -> usize {
        let v = self.add_vertex(id);
        self.vertices[v].tag = Some(tag);
        v
    }

    /// Adds an edge; weights must be nonzero.
    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        from: usize,
        weight_from: i64,
        to: usize,
        weight_to: i64,
    ) -> Result<usize> {
        let id = id.into();
        if weight_from == 0 || weight_to == 0 {
            return Err(Error::InvalidGraphOfGroups(format!("edge {id:?} has weight 0")));
        }
        if from >= self.vertices.len() || to >= self.vertices.len() {
            return Err(Error::InvalidGraphOfGroups(format!(
                "edge {id:?} refers to a missing vertex"
            )));
        }
        self.edges.push(PhiEdge {
            id,
            from,
            to,
            weight_from,
            weight_to,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn vertices(&self) -> &[PhiVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[PhiEdge] {
        &self.edges
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Appends a copy of `other`; ids are kept as they are.
    pub fn extend_disjoint(&mut self, other: &WeightedGraph) {
        let offset = self.vertices.len();
        self.vertices.extend(other.vertices.iter().cloned());
        self.edges.extend(other.edges.iter().map(|e| PhiEdge {
            from: e.from + offset,
            to: e.to + offset,
            ..e.clone()
        }));
    }

    /// Same graph with the roles of the two ends of edge `e` exchanged.
    pub fn with_edge_reversed(&self, e: usize) -> WeightedGraph {
        let mut g = self.clone();
        let edge = &mut g.edges[e];
        std::mem::swap(&mut edge.from, &mut edge.to);
        std::mem::swap(&mut edge.weight_from, &mut edge.weight_to);
        g
    }

    /// Incident `(edge, other end, traversed forward)` triples per vertex.
    fn incidence(&self, mask: impl Fn(usize) -> bool) -> Vec<Vec<(usize, usize, bool)>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if !mask(i) {
                continue;
            }
            inc[e.from].push((i, e.to, true));
            if e.from != e.to {
                inc[e.to].push((i, e.from, false));
            }
        }
        inc
    }

    /// Connected components, in order of their least vertex.
    pub fn components(&self) -> Vec<Component> {
        let inc = self.incidence(|_| true);
        let mut comp = vec![usize::MAX; self.vertices.len()];
        let mut out: Vec<Component> = Vec::new();
        for s in 0..self.vertices.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut vertices = vec![s];
            let mut head = 0;
            while head < vertices.len() {
                let v = vertices[head];
                head += 1;
                for &(_, w, _) in &inc[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        vertices.push(w);
                    }
                }
            }
            vertices.sort_unstable();
            out.push(Component {
                vertices,
                edges: Vec::new(),
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            out[comp[e.from]].edges.push(i);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Breadth-first spanning forest of the edges accepted by `mask`.
    fn bfs_forest(&self, mask: impl Fn(usize) -> bool + Copy) -> Forest {
        let n = self.vertices.len();
        let inc = self.incidence(mask);
        let mut forest = Forest {
            parent: vec![None; n],
            depth: vec![0; n],
            in_tree: vec![false; self.edges.len()],
        };
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(e, w, _) in &inc[v] {
                    if !seen[w] {
                        seen[w] = true;
                        forest.parent[w] = Some((v, e));
                        forest.depth[w] = forest.depth[v] + 1;
                        forest.in_tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        forest
    }

    /// Forest built from the given tree edges; they must form a spanning
    /// tree of every component.
    fn forest_from(&self, tree: &[usize]) -> Result<Forest> {
        if tree.iter().any(|&e| e >= self.edges.len()) {
            return Err(Error::NotSpanningTree("edge index out of range".into()));
        }
        let set: HashSet<usize> = tree.iter().copied().collect();
        let n_components = self.components().len();
        if set.len() != tree.len() || tree.len() + n_components != self.vertices.len() {
            return Err(Error::NotSpanningTree(format!(
                "{} edges cannot span {} vertices in {} components",
                tree.len(),
                self.vertices.len(),
                n_components
            )));
        }
        let forest = self.bfs_forest(|e| set.contains(&e));
        if forest.in_tree.iter().filter(|&&t| t).count() != tree.len() {
            return Err(Error::NotSpanningTree("tree edges contain a cycle".into()));
        }
        Ok(forest)
    }

    fn fundamental_cycle(&self, forest: &Forest, e: usize) -> Vec<CycleStep> {
        let edge = &self.edges[e];
        let up_step = |x: usize| {
            let (p, pe) = forest.parent[x].expect("non-root");
            let forward = self.edges[pe].from == x && self.edges[pe].to == p;
            (p, pe, forward)
        };
        let (mut a, mut b) = (edge.from, edge.to);
        let mut from_o = Vec::new();
        let mut from_t = Vec::new();
        while forest.depth[a] > forest.depth[b] {
            let (p, pe, f) = up_step(a);
            from_o.push((pe, f));
            a = p;
        }
        while forest.depth[b] > forest.depth[a] {
            let (p, pe, f) = up_step(b);
            from_t.push((pe, f));
            b = p;
        }
        while a != b {
            let (p, pe, f) = up_step(a);
            from_o.push((pe, f));
            a = p;
            let (p, pe, f) = up_step(b);
            from_t.push((pe, f));
            b = p;
        }
        let step = |(pe, forward): (usize, bool)| CycleStep {
            edge: self.edges[pe].id.clone(),
            forward,
        };
        let mut cycle: Vec<CycleStep> = from_o
            .into_iter()
            .rev()
            .map(|(pe, f)| step((pe, !f)))
            .collect();
        cycle.push(step((e, true)));
        cycle.extend(from_t.into_iter().map(step));
        cycle
    }

    /// Gain of a cycle: traversing an edge from end `x` to end `y`
    /// contributes `weight_y / weight_x`.
    pub fn cycle_gain(&self, cycle: &[CycleStep]) -> Gain {
        let index: HashMap<&str, &PhiEdge> = self.edges.iter().map(|e| (e.id.as_str(), e)).collect();
        let mut gain = Gain::one();
        for s in cycle {
            let e = index[s.edge.as_str()];
            let (x, y) = if s.forward {
                (e.weight_from, e.weight_to)
            } else {
                (e.weight_to, e.weight_from)
            };
            gain *= Gain::new(BigInt::from(y), BigInt::from(x));
        }
        gain
    }

    fn balance_with(&self, forest: &Forest, edges: impl Iterator<Item = usize>) -> BalanceReport {
        for e in edges {
            if forest.in_tree[e] {
                continue;
            }
            let cycle = self.fundamental_cycle(forest, e);
            let gain = self.cycle_gain(&cycle);
            if !gain.abs().is_one() {
                return BalanceReport {
                    balanced: false,
                    witness: Some(CycleWitness { cycle, gain }),
                };
            }
        }
        BalanceReport {
            balanced: true,
            witness: None,
        }
    }

    /// Every fundamental cycle of a breadth-first spanning forest has gain ±1.
    pub fn is_balanced(&self) -> BalanceReport {
        let forest = self.bfs_forest(|_| true);
        self.balance_with(&forest, 0..self.edges.len())
    }

    /// [`is_balanced`](Self::is_balanced) relative to a chosen spanning
    /// forest, given by edge indices.
    pub fn is_balanced_with_tree(&self, tree: &[usize]) -> Result<BalanceReport> {
        let forest = self.forest_from(tree)?;
        Ok(self.balance_with(&forest, 0..self.edges.len()))
    }

    fn balance_of(&self, c: &Component) -> BalanceReport {
        let forest = self.bfs_forest(|_| true);
        self.balance_with(&forest, c.edges.iter().copied())
    }

    /// Assigns each edge a tail end so that its head weight is ±1 and no
    /// vertex is the tail of two edges, by augmenting-path matching of edges
    /// to tail vertices.
    pub fn is_solvable(&self) -> SolvabilityReport {
        self.solve(&(0..self.edges.len()).collect::<Vec<_>>())
    }

    fn solve(&self, edges: &[usize]) -> SolvabilityReport {
        // candidate (tail vertex, direction) pairs per edge
        let candidates: Vec<Vec<(usize, Direction)>> = edges
            .iter()
            .map(|&i| {
                let e = &self.edges[i];
                let mut c = Vec::new();
                if e.weight_to.abs() == 1 {
                    c.push((e.from, Direction::OToT));
                }
                if e.weight_from.abs() == 1 && !(e.from == e.to && !c.is_empty()) {
                    c.push((e.to, Direction::TToO));
                }
                c
            })
            .collect();
        let mut owner: Vec<Option<usize>> = vec![None; self.vertices.len()];
        let mut choice: Vec<Option<usize>> = vec![None; edges.len()];

        fn augment(
            k: usize,
            candidates: &[Vec<(usize, Direction)>],
            owner: &mut [Option<usize>],
            choice: &mut [Option<usize>],
            visited: &mut [bool],
        ) -> bool {
            for (ci, &(v, _)) in candidates[k].iter().enumerate() {
                if visited[v] {
                    continue;
                }
                visited[v] = true;
                let free = match owner[v] {
                    None => true,
                    Some(other) => augment(other, candidates, owner, choice, visited),
                };
                if free {
                    owner[v] = Some(k);
                    choice[k] = Some(ci);
                    return true;
                }
            }
            false
        }

        for k in 0..edges.len() {
            let mut visited = vec![false; self.vertices.len()];
            if !augment(k, &candidates, &mut owner, &mut choice, &mut visited) {
                return SolvabilityReport {
                    solvable: false,
                    orientation: None,
                };
            }
        }
        let orientation = edges
            .iter()
            .zip(&choice)
            .zip(&candidates)
            .map(|((&i, c), cand)| OrientedEdge {
                edge: self.edges[i].id.clone(),
                direction: cand[c.expect("matched")].1,
            })
            .collect();
        SolvabilityReport {
            solvable: true,
            orientation: Some(orientation),
        }
    }

    /// Fundamental cycles of the subgraph of edges with both weights ±1,
    /// classified by the product of end-weight signs around the cycle.
    pub fn detect_klein_torus_loops(&self) -> Vec<KleinTorusLoop> {
        let unimodular = |e: usize| self.edges[e].is_unimodular();
        let forest = self.bfs_forest(unimodular);
        let index: HashMap<&str, &PhiEdge> = self.edges.iter().map(|e| (e.id.as_str(), e)).collect();
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            if !unimodular(e) || forest.in_tree[e] {
                continue;
            }
            let cycle = self.fundamental_cycle(&forest, e);
            let sign: i64 = cycle.iter().map(|s| index[s.edge.as_str()].sign()).product();
            out.push(KleinTorusLoop {
                cycle,
                kind: if sign > 0 { LoopKind::Torus } else { LoopKind::Klein },
            });
        }
        out
    }

    /// Degree-2 cover defined by the homomorphism sending a cycle to the
    /// product of its end-weight signs. Copies of vertex `v` are `v.0` and
    /// `v.1`, copies of edge `e` are `e.0` (leaving `v.0`) and `e.1`.
    pub fn orientation_double_cover(&self) -> Result<WeightedGraph> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.vertices.len();
        let mut cover = WeightedGraph::new();
        for sheet in 0..2 {
            for v in &self.vertices {
                cover.add_vertex(format!("{}.{sheet}", v.id));
            }
        }
        for sheet in 0..2 {
            for e in &self.edges {
                let target = if e.sign() > 0 { sheet } else { 1 - sheet };
                cover.add_edge(
                    format!("{}.{sheet}", e.id),
                    sheet * n + e.from,
                    e.weight_from,
                    target * n + e.to,
                    e.weight_to,
                )?;
            }
        }
        Ok(cover)
    }

    /// Generalised Baumslag–Solitar graph of groups: a copy of `Z` per
    /// vertex, and attaching words `a^weight` at each end of every edge.
    pub fn gbs_complex(&self) -> Result<GraphOfGroups> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut g = GraphOfGroups::new();
        for v in &self.vertices {
            g.add_vertex(v.id.clone(), 1);
        }
        let power = |w: i64| vec![w.signum() as i32; w.unsigned_abs() as usize];
        for e in &self.edges {
            g.add_edge(
                e.id.clone(),
                e.from,
                e.to,
                EdgeGroup::Cyclic {
                    word_from: power(e.weight_from),
                    word_to: power(e.weight_to),
                },
            );
        }
        Ok(g)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut g = WeightedGraph::new();
        let mut edge_ids = HashSet::new();
        let mut line_start = 0;
        for (n, raw) in text.split('\n').enumerate() {
            let start = line_start;
            line_start += raw.len() + 1;
            let line = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut pos = 0;
            for tok in line.split_whitespace() {
                let off = line[pos..].find(tok).expect("token") + pos;
                pos = off + tok.len();
                tokens.push((off, tok));
            }
            let err = |off: usize, tok: &str, msg: &str| Error::parse_at(text, start + off, tok, msg);
            let Some(&(off0, head)) = tokens.first() else {
                continue;
            };
            match head {
                "vertex" => {
                    if tokens.len() != 2 && tokens.len() != 4 {
                        return Err(err(off0, raw.trim(), "expected `vertex <id> [<gamma-vertex> <root>]`"));
                    }
                    let (off, id) = tokens[1];
                    if g.vertex_by_id(id).is_some() {
                        return Err(err(off, id, "duplicate vertex id"));
                    }
                    if tokens.len() == 4 {
                        let (roff, root) = tokens[3];
                        let letters = parse_letters(root).map_err(|e| e.relocate(n + 1, start + roff))?;
                        let root = CyclicWord::new(letters)
                            .ok()
                            .filter(|r| !r.is_empty())
                            .ok_or_else(|| err(roff, root, "root must be a nonempty cyclically reduced word"))?;
                        g.add_tagged_vertex(
                            id,
                            PhiTag {
                                gamma_vertex: tokens[2].1.to_string(),
                                root,
                            },
                        );
                    } else {
                        g.add_vertex(id);
                    }
                }
                "edge" => {
                    if tokens.len() != 6 {
                        return Err(err(off0, raw.trim(), "expected `edge <id> <v1> <w1> <v2> <w2>`"));
                    }
                    let (off, id) = tokens[1];
                    if !edge_ids.insert(id.to_string()) {
                        return Err(err(off, id, "duplicate edge id"));
                    }
                    let vertex = |(off, tok): (usize, &str)| {
                        g.vertex_by_id(tok).ok_or_else(|| err(off, tok, "unknown vertex"))
                    };
                    let weight = |(off, tok): (usize, &str)| match tok.parse::<i64>() {
                        Ok(0) => Err(err(off, tok, "weight must be nonzero")),
                        Ok(w) => Ok(w),
                        Err(_) => Err(err(off, tok, "weight must be an integer")),
                    };
                    let (v1, w1) = (vertex(tokens[2])?, weight(tokens[3])?);
                    let (v2, w2) = (vertex(tokens[4])?, weight(tokens[5])?);
                    g.add_edge(id, v1, w1, v2, w2)?;
                }
                other => return Err(err(off0, other, "expected `vertex` or `edge`")),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            match &v.tag {
                Some(t) => {
                    let indexed = t.root.letters().iter().any(|l| l.unsigned_abs() > 26);
                    let _ = writeln!(
                        s,
                        "vertex {} {} {}",
                        v.id,
                        t.gamma_vertex,
                        format_letters(t.root.letters(), indexed)
                    );
                }
                None => {
                    let _ = writeln!(s, "vertex {}", v.id);
                }
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "edge {} {} {} {} {}",
                e.id, self.vertices[e.from].id, e.weight_from, self.vertices[e.to].id, e.weight_to
            );
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph phi {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label=\"{}\"];", escape(&v.id));
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}\", taillabel=\"{}\", headlabel=\"{}\"];",
                e.from,
                e.to,
                escape(&e.id),
                e.weight_from,
                e.weight_to
            );
        }
        s.push_str("}\n");
        s
    }
}

fn token(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join("_")
}

/// Builds the weighted graph of a graph of groups all of whose edge groups
/// are infinite cyclic. Vertex ids are `<gamma-vertex>:<canonical root>`.
pub fn build_phi(g: &GraphOfGroups) -> Result<WeightedGraph> {
    g.validate().into_result()?;
    if let Some(e) = g.edges().iter().find(|e| e.group.is_trivial()) {
        return Err(Error::TrivialEdgeGroup(e.id.clone()));
    }
    let mut phi = WeightedGraph::new();
    let mut index: HashMap<(usize, CyclicWord), usize> = HashMap::new();
    // attaching words per weighted-graph vertex, for the mixed flag
    let mut attached: Vec<Vec<Word>> = Vec::new();
    let mut end = |gv: usize, w: Word, phi: &mut WeightedGraph| -> Result<(usize, i64)> {
        let (root, k) = primitive_root(&w)?;
        let canon = root.canonical();
        let sign = if root.is_rotation_of(&canon) { 1 } else { -1 };
        let v = *index.entry((gv, canon.clone())).or_insert_with(|| {
            let gamma = &g.vertices()[gv];
            let indexed = gamma.rank > 26;
            attached.push(Vec::new());
            phi.add_tagged_vertex(
                format!("{}:{}", token(&gamma.id), format_letters(canon.letters(), indexed)),
                PhiTag {
                    gamma_vertex: token(&gamma.id),
                    root: canon,
                },
            )
        });
        attached[v].push(w);
        Ok((v, sign * k as i64))
    };
    for e in g.edges() {
        let (o, wo) = end(e.from, e.word_from().expect("cyclic"), &mut phi)?;
        let (t, wt) = end(e.to, e.word_to().expect("cyclic"), &mut phi)?;
        phi.add_edge(token(&e.id), o, wo, t, wt)?;
    }
    for (v, words) in attached.iter().enumerate() {
        phi.vertices[v].mixed_attachments =
            words.len() > 1 && words.iter().any(|w| !is_cyclically_reduced(w.letters()));
    }
    Ok(phi)
}

/// Weighted graphs of the free factors left after deleting trivial edges,
/// side by side.
pub fn build_phi_factors(g: &GraphOfGroups) -> Result<WeightedGraph> {
    g.validate().into_result()?;
    let mut out = WeightedGraph::new();
    for f in g.free_product_decompose().factors {
        if !f.edges().is_empty() {
            out.extend_disjoint(&build_phi(&f)?);
        }
    }
    Ok(out)
}

/// Balanced and solvable flags per component, and the group properties
/// they decide or predict.
pub fn classify(g: &GraphOfGroups) -> Result<ClassReport> {
    g.validate().into_result()?;
    let decomposition = g.free_product_decompose();
    let mut components = Vec::new();
    let mut mixed_attachments = Vec::new();
    for (factor, f) in decomposition.factors.iter().enumerate() {
        if f.edges().is_empty() {
            continue;
        }
        let phi = build_phi(f)?;
        mixed_attachments.extend(
            phi.vertices()
                .iter()
                .filter(|v| v.mixed_attachments)
                .map(|v| v.id.clone()),
        );
        for c in phi.components() {
            let balance = phi.balance_of(&c);
            let solve = phi.solve(&c.edges);
            components.push(ComponentReport {
                factor,
                vertices: c.vertices.iter().map(|&v| phi.vertices[v].id.clone()).collect(),
                edges: c.edges.iter().map(|&e| phi.edges[e].id.clone()).collect(),
                balanced: balance.balanced,
                solvable: solve.solvable,
                unbalanced_cycle: balance.witness,
                orientation: solve.orientation,
            });
        }
    }
    let balanced = components.iter().all(|c| c.balanced);
    let solvable = components.iter().all(|c| c.solvable);
    Ok(ClassReport {
        balanced,
        solvable,
        lerf: balanced,
        residually_finite: components.iter().all(|c| c.balanced || c.solvable),
        rel_hyp_virt_abelian: balanced && solvable,
        l2_hall_predicted: solvable,
        components,
        mixed_attachments,
    })
}
