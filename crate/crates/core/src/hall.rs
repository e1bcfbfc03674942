//! Marshall Hall completions and structural certificates of L²-independence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{EdgeGroup, GraphOfGroups};
use crate::stallings::{intersection, slot, slot_letter, StallingsGraph};
use crate::words::{Letter, Word};

/// Where the input graph sits inside its completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddedCore {
    /// Cover vertex of each input vertex.
    pub vertex_map: Vec<usize>,
    /// Cover edge `(source, generator, target)` of each input edge, in the
    /// input's edge order.
    pub edge_map: Vec<(usize, Letter, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallCompletion {
    pub cover: StallingsGraph,
    pub index: usize,
    pub embedded_core: EmbeddedCore,
    /// Words of the added edges read through a spanning tree of the input;
    /// together with a basis of the input they form a basis of the cover.
    pub complement_basis: Vec<Word>,
}

/// Completes every generator's partial permutation of the vertices. For each
/// generator the vertices lacking an outgoing edge and those lacking an
/// incoming edge are paired in index order.
pub fn hall_completion(g: &StallingsGraph) -> HallCompletion {
    let alphabet = g.alphabet();
    let n = g.num_vertices();
    let mut adj: Vec<Vec<Option<usize>>> = (0..n)
        .map(|v| (0..2 * alphabet.rank()).map(|s| g.follow(v, slot_letter(s))).collect())
        .collect();
    let (tree_words, _) = g.tree_paths();
    let mut complement_basis = Vec::new();
    for x in alphabet.letters() {
        let (out, inc) = (slot(x), slot(-x));
        let sources: Vec<usize> = (0..n).filter(|&v| adj[v][out].is_none()).collect();
        let targets: Vec<usize> = (0..n).filter(|&v| adj[v][inc].is_none()).collect();
        for (&p, &q) in sources.iter().zip(&targets) {
            adj[p][out] = Some(q);
            adj[q][inc] = Some(p);
            complement_basis.push(
                tree_words[p]
                    .mul(&Word::generator(x))
                    .mul(&tree_words[q].inverse()),
            );
        }
    }
    let (cover, renumber) = StallingsGraph::canonical(alphabet, &adj, &vec![true; n], 0);
    let vertex_map: Vec<usize> = renumber.into_iter().map(|v| v.expect("connected")).collect();
    let edge_map = g
        .edges()
        .map(|(u, l, v)| (vertex_map[u], l, vertex_map[v]))
        .collect();
    HallCompletion {
        cover,
        index: n,
        embedded_core: EmbeddedCore {
            vertex_map,
            edge_map,
        },
        complement_basis,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    FreeFactor,
    MvSubgraph,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The subgroup is a free factor of a subgroup of the given index, with
    /// the given complementary basis words.
    FreeFactor {
        index: usize,
        complement_basis: Vec<Word>,
    },
    /// Every vertex subgroup is a free factor of its ambient vertex group and
    /// all edge groups agree.
    MvSubgraph { vertex_complements: Vec<Vec<Word>> },
    None { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceCertificate {
    pub kind: CertificateKind,
    pub witness: Witness,
}

impl IndependenceCertificate {
    fn none(reason: impl Into<String>) -> Self {
        IndependenceCertificate {
            kind: CertificateKind::None,
            witness: Witness::None {
                reason: reason.into(),
            },
        }
    }
}

pub fn free_factor_certificate(h: &StallingsGraph) -> IndependenceCertificate {
    let c = hall_completion(h);
    IndependenceCertificate {
        kind: CertificateKind::FreeFactor,
        witness: Witness::FreeFactor {
            index: c.index,
            complement_basis: c.complement_basis,
        },
    }
}

/// Subgroup `H_v` of the ambient vertex group of `ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubVertex {
    pub ambient: usize,
    pub group: StallingsGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubEdgeGroup {
    Trivial,
    /// `H_e = ⟨g^exponent⟩` for a generator `g` of the ambient edge group,
    /// with the sub-edge's own attaching words for `g^exponent`.
    Cyclic {
        exponent: u32,
        word_from: Word,
        word_to: Word,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubEdge {
    pub ambient: usize,
    /// Indices into the sub-vertices.
    pub from: usize,
    pub to: usize,
    pub group: SubEdgeGroup,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubgraphOfGroups {
    pub vertices: Vec<SubVertex>,
    pub edges: Vec<SubEdge>,
}

impl SubgraphOfGroups {
    /// The whole of `amb` as a subgraph of itself.
    pub fn whole(amb: &GraphOfGroups) -> Result<Self> {
        let vertices = amb
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let alphabet = crate::words::Alphabet::new(v.rank.max(1))?;
                let group = if v.rank == 0 {
                    StallingsGraph::trivial(alphabet)
                } else {
                    StallingsGraph::rose(alphabet)
                };
                Ok(SubVertex { ambient: i, group })
            })
            .collect::<Result<_>>()?;
        let edges = amb
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| SubEdge {
                ambient: i,
                from: e.from,
                to: e.to,
                group: match &e.group {
                    EdgeGroup::Trivial => SubEdgeGroup::Trivial,
                    EdgeGroup::Cyclic { .. } => SubEdgeGroup::Cyclic {
                        exponent: 1,
                        word_from: e.word_from().expect("cyclic"),
                        word_to: e.word_to().expect("cyclic"),
                    },
                },
            })
            .collect();
        Ok(SubgraphOfGroups { vertices, edges })
    }

    /// `Σ_v (1 − rank H_v) − Σ_e χ(H_e)`.
    pub fn euler_characteristic(&self) -> i64 {
        let v: i64 = self.vertices.iter().map(|v| 1 - v.group.rank() as i64).sum();
        let e: i64 = self
            .edges
            .iter()
            .map(|e| match e.group {
                SubEdgeGroup::Trivial => 1,
                SubEdgeGroup::Cyclic { .. } => 0,
            })
            .sum();
        v - e
    }
}

/// Outcome of each defining condition of a subgraph of groups.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubgraphReport {
    /// The underlying graph maps injectively, compatibly with endpoints.
    pub injection: bool,
    /// Edge subgroups map into the vertex subgroups.
    pub inclusions: bool,
    /// `H_e = H_{o(e)} ∩ G_e` and `H_e = H_{t(e)} ∩ G_e`.
    pub intersections: bool,
    /// Sub attaching maps are restrictions of the ambient ones.
    pub commutation: bool,
    pub failures: Vec<String>,
}

impl SubgraphReport {
    pub fn holds(&self) -> bool {
        self.injection && self.inclusions && self.intersections && self.commutation
    }
}

/// Least `m ≥ 0` with `H ∩ ⟨w⟩ = ⟨w^m⟩`, `w` nontrivial.
fn intersection_exponent(h: &StallingsGraph, w: &Word) -> Result<u32> {
    let cyclic = StallingsGraph::from_generators(std::slice::from_ref(w), h.alphabet())?;
    let i = intersection(h, &cyclic)?;
    let Some(b) = i.basis().into_iter().next() else {
        return Ok(0);
    };
    (1..=b.len() as i64)
        .find(|&m| w.pow(m) == b || w.pow(-m) == b)
        .map(|m| m as u32)
        .ok_or_else(|| Error::MalformedInjection("intersection is not a power of the edge word".into()))
}

pub fn is_subgraph_of_groups(sub: &SubgraphOfGroups, amb: &GraphOfGroups) -> Result<SubgraphReport> {
    let mut r = SubgraphReport {
        injection: true,
        inclusions: true,
        intersections: true,
        commutation: true,
        failures: Vec::new(),
    };
    for (i, v) in sub.vertices.iter().enumerate() {
        let Some(a) = amb.vertices().get(v.ambient) else {
            return Err(Error::MalformedInjection(format!(
                "sub-vertex {i} maps to missing vertex {}",
                v.ambient
            )));
        };
        if v.group.alphabet().rank() != a.rank.max(1) {
            return Err(Error::MalformedInjection(format!(
                "sub-vertex {i} has alphabet rank {}, ambient vertex {:?} has rank {}",
                v.group.alphabet().rank(),
                a.id,
                a.rank
            )));
        }
        if a.rank == 0 && v.group.num_vertices() != 1 {
            return Err(Error::MalformedInjection(format!("sub-vertex {i} of a trivial vertex group")));
        }
        if sub.vertices[..i].iter().any(|u| u.ambient == v.ambient) {
            r.injection = false;
            r.failures.push(format!("vertex {:?} is hit twice", a.id));
        }
    }
    for (i, e) in sub.edges.iter().enumerate() {
        let Some(a) = amb.edges().get(e.ambient) else {
            return Err(Error::MalformedInjection(format!(
                "sub-edge {i} maps to missing edge {}",
                e.ambient
            )));
        };
        if e.from >= sub.vertices.len() || e.to >= sub.vertices.len() {
            return Err(Error::MalformedInjection(format!("sub-edge {i} has a missing endpoint")));
        }
        if sub.edges[..i].iter().any(|f| f.ambient == e.ambient) {
            r.injection = false;
            r.failures.push(format!("edge {:?} is hit twice", a.id));
        }
        if sub.vertices[e.from].ambient != a.from || sub.vertices[e.to].ambient != a.to {
            r.injection = false;
            r.failures.push(format!("edge {:?} endpoints do not match", a.id));
            continue;
        }
        let (h_o, h_t) = (&sub.vertices[e.from].group, &sub.vertices[e.to].group);
        match (&a.group, &e.group) {
            (EdgeGroup::Trivial, SubEdgeGroup::Trivial) => {}
            (EdgeGroup::Trivial, SubEdgeGroup::Cyclic { .. }) => {
                r.inclusions = false;
                r.failures.push(format!("edge {:?}: cyclic sub-edge group in a trivial one", a.id));
            }
            (EdgeGroup::Cyclic { .. }, group) => {
                let (w_o, w_t) = (a.word_from().expect("cyclic"), a.word_to().expect("cyclic"));
                let k = match group {
                    SubEdgeGroup::Trivial => 0,
                    SubEdgeGroup::Cyclic {
                        exponent,
                        word_from,
                        word_to,
                    } => {
                        let k = *exponent;
                        if k == 0 {
                            return Err(Error::MalformedInjection(format!(
                                "sub-edge {i} has exponent 0; use a trivial sub-edge group"
                            )));
                        }
                        let (p_o, p_t) = (w_o.pow(k.into()), w_t.pow(k.into()));
                        if *word_from != p_o || *word_to != p_t {
                            r.commutation = false;
                            r.failures.push(format!(
                                "edge {:?}: attaching words are not restrictions",
                                a.id
                            ));
                        }
                        if !h_o.contains(&p_o) || !h_t.contains(&p_t) {
                            r.inclusions = false;
                            r.failures.push(format!(
                                "edge {:?}: edge subgroup not inside the vertex subgroups",
                                a.id
                            ));
                        }
                        k
                    }
                };
                for (end, h, w) in [("origin", h_o, &w_o), ("terminus", h_t, &w_t)] {
                    let m = intersection_exponent(h, w)?;
                    if m != k {
                        r.intersections = false;
                        r.failures.push(format!(
                            "edge {:?}: H_e = <g^{k}> but the {end} subgroup meets G_e in <g^{m}>",
                            a.id
                        ));
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Certificate that the sub is L²-independent through the Mayer–Vietoris
/// sequence: every vertex subgroup is a free factor of its ambient vertex
/// group (a completion of index 1) and every sub-edge group is the whole
/// ambient edge group. Edges of `amb` outside the sub have trivial or cyclic
/// groups, which is all that is needed of them.
pub fn mv_certificate(sub: &SubgraphOfGroups, amb: &GraphOfGroups) -> Result<IndependenceCertificate> {
    let report = is_subgraph_of_groups(sub, amb)?;
    if !report.holds() {
        return Ok(IndependenceCertificate::none(format!(
            "not a subgraph of groups: {}",
            report.failures.join("; ")
        )));
    }
    let mut vertex_complements = Vec::with_capacity(sub.vertices.len());
    for v in &sub.vertices {
        let c = hall_completion(&v.group);
        if c.index != 1 {
            return Ok(IndependenceCertificate::none(format!(
                "subgroup at vertex {:?} is a free factor only in an index-{} subgroup",
                amb.vertices()[v.ambient].id,
                c.index
            )));
        }
        vertex_complements.push(c.complement_basis);
    }
    for e in &sub.edges {
        let full = match (&amb.edges()[e.ambient].group, &e.group) {
            (EdgeGroup::Trivial, _) => true,
            (EdgeGroup::Cyclic { .. }, SubEdgeGroup::Cyclic { exponent, .. }) => *exponent == 1,
            (EdgeGroup::Cyclic { .. }, SubEdgeGroup::Trivial) => false,
        };
        if !full {
            return Ok(IndependenceCertificate::none(format!(
                "edge {:?} has a proper sub-edge group",
                amb.edges()[e.ambient].id
            )));
        }
    }
    Ok(IndependenceCertificate {
        kind: CertificateKind::MvSubgraph,
        witness: Witness::MvSubgraph { vertex_complements },
    })
}
