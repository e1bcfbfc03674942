//! Property definitions shared by the per-module suites and the acceptance
//! run. Each `check_*` runs a deterministic proptest runner for `cases`
//! cases and returns the first minimized failure.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ghnclab::ghnc::{
    ghnc_check_graphs, oracle_agrees, reduced_words, DoubleCoset,
};
use ghnclab::gog::{EdgeGroup, GraphOfGroups};
use ghnclab::hall::{
    free_factor_certificate, hall_completion, mv_certificate, CertificateKind, SubEdge, SubEdgeGroup,
    SubVertex, SubgraphOfGroups,
};
use ghnclab::phi::{build_phi, classify, LoopKind, WeightedGraph};
use ghnclab::stallings::{intersection, pullback, LabeledGraph, StallingsGraph};
use ghnclab::words::{
    cyclic_equal_up_to_inversion, cyclic_reduce, primitive_root, Alphabet, CyclicWord, Letter, Word,
};

pub const CASES: u32 = 1000;

pub type Check = fn(u32) -> Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

macro_rules! property {
    ($name:ident, $strategy:expr, |$arg:pat_param| $body:block) => {
        pub fn $name(cases: u32) -> Result<(), String> {
            runner(cases)
                .run(&$strategy, |$arg| {
                    $body
                    Ok(())
                })
                .map_err(|e| e.to_string())
        }
    };
}

// ---------------------------------------------------------------- strategies

pub fn raw_letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    let r = rank as Letter;
    prop::collection::vec((1..=r, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g }), 0..=max_len)
}

pub fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    raw_letters(rank, max_len).prop_map(Word::from_raw)
}

pub fn nontrivial_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(rank, max_len).prop_filter("nontrivial", |w| !w.is_identity())
}

pub fn generators(rank: usize, max_gens: usize, max_len: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(nontrivial_word(rank, max_len), 1..=max_gens)
}

pub fn subgroup(rank: usize, max_gens: usize, max_len: usize) -> impl Strategy<Value = StallingsGraph> {
    generators(rank, max_gens, max_len)
        .prop_map(move |g| StallingsGraph::from_generators(&g, Alphabet::new(rank).unwrap()).unwrap())
}

/// Subgroups of F₂ or F₃, biased towards short generators so finite index
/// turns up.
pub fn any_subgroup() -> impl Strategy<Value = StallingsGraph> {
    prop_oneof![subgroup(2, 4, 4), subgroup(2, 3, 8), subgroup(3, 4, 5)]
}

pub fn subgroup_pair(rank: usize) -> impl Strategy<Value = (StallingsGraph, StallingsGraph)> {
    (subgroup(rank, 3, 6), subgroup(rank, 3, 6))
}

pub fn cyclic_word(rank: usize, max_len: usize) -> impl Strategy<Value = CyclicWord> {
    nontrivial_word(rank, max_len)
        .prop_map(|w| cyclic_reduce(&w).1)
        .prop_filter("nontrivial", |c| !c.is_empty())
}

/// Random weighted graph on `1..=max_v` vertices, connected by a random tree
/// plus extra edges (loops allowed).
pub fn weighted_graph(max_v: usize, max_extra: usize) -> impl Strategy<Value = WeightedGraph> {
    let weight = prop_oneof![-4i64..=-1, 1i64..=4];
    (1..=max_v)
        .prop_flat_map(move |n| {
            let tree = prop::collection::vec((any::<prop::sample::Index>(), weight.clone(), weight.clone()), n - 1);
            let extra = prop::collection::vec((0..n, 0..n, weight.clone(), weight.clone()), 0..=max_extra);
            (Just(n), tree, extra)
        })
        .prop_filter("at least one edge", |(_, t, x)| !t.is_empty() || !x.is_empty())
        .prop_map(|(n, tree, extra)| {
            let mut w = WeightedGraph::new();
            for i in 0..n {
                w.add_vertex(format!("v{i}"));
            }
            let mut k = 0;
            for (i, (p, a, b)) in tree.into_iter().enumerate() {
                w.add_edge(format!("e{k}"), p.index(i + 1), a, i + 1, b).unwrap();
                k += 1;
            }
            for (x, y, a, b) in extra {
                w.add_edge(format!("e{k}"), x, a, y, b).unwrap();
                k += 1;
            }
            w
        })
}

/// Connected graph of free groups with trivial and cyclic edge groups.
pub fn graph_of_groups() -> impl Strategy<Value = GraphOfGroups> {
    (1..=4usize)
        .prop_flat_map(|n| {
            let ranks = prop::collection::vec(0..=3usize, n);
            let tree = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = prop::collection::vec((0..n, 0..n), 0..=2);
            let words = prop::collection::vec((any::<bool>(), raw_letters(3, 5), raw_letters(3, 5)), n + 2);
            (ranks, tree, extra, words)
        })
        .prop_map(|(ranks, tree, extra, words)| {
            let mut g = GraphOfGroups::new();
            for (i, &r) in ranks.iter().enumerate() {
                g.add_vertex(format!("v{i}"), r);
            }
            let ends: Vec<(usize, usize)> = tree
                .iter()
                .enumerate()
                .map(|(i, p)| (p.index(i + 1), i + 1))
                .chain(extra)
                .collect();
            for (k, ((a, b), (cyclic, wa, wb))) in ends.into_iter().zip(words).enumerate() {
                let fit = |w: &[Letter], r: usize| -> Option<Vec<Letter>> {
                    if r == 0 {
                        return None;
                    }
                    let w = Alphabet::new(r)
                        .unwrap()
                        .reduce(&w.iter().map(|&l| l.signum() * ((l.abs() - 1) % r as Letter + 1)).collect::<Vec<_>>())
                        .unwrap();
                    (!w.is_identity()).then(|| w.into_letters())
                };
                match (cyclic, fit(&wa, ranks[a]), fit(&wb, ranks[b])) {
                    (true, Some(x), Some(y)) => {
                        g.add_edge(format!("e{k}"), a, b, EdgeGroup::Cyclic { word_from: x, word_to: y });
                    }
                    _ => {
                        g.add_trivial_edge(format!("e{k}"), a, b);
                    }
                }
            }
            g
        })
}

pub fn show(g: &StallingsGraph) -> String {
    let a = g.alphabet();
    g.basis().iter().map(|w| a.format(w.letters())).collect::<Vec<_>>().join(",")
}

fn chi_bar(chi: i64) -> i64 {
    (-chi).max(0)
}

// -------------------------------------------------------------------- words

property!(check_reduce_idempotent, raw_letters(3, 30), |raw| {
    let a = Alphabet::new(3).unwrap();
    let once = a.reduce(&raw).unwrap();
    prop_assert_eq!(a.reduce(once.letters()).unwrap(), once);
});

property!(check_word_times_inverse, word(3, 30), |w| {
    prop_assert!(w.mul(&w.inverse()).is_identity());
    prop_assert!(w.inverse().mul(&w).is_identity());
});

property!(check_root_exponent_scales, (nontrivial_word(3, 12), 1usize..=5), |(w, k)| {
    let (_, e) = primitive_root(&w).unwrap();
    let (_, ek) = primitive_root(&w.pow(k as i64)).unwrap();
    prop_assert_eq!(ek, k * e);
});

property!(check_root_is_primitive, nontrivial_word(3, 24), |w| {
    let (root, _) = primitive_root(&w).unwrap();
    let s = root.letters();
    let n = s.len();
    for d in 1..n {
        if n % d == 0 {
            prop_assert!((0..n).any(|i| s[i] != s[(i + d) % n]), "root {:?} has period {}", s, d);
        }
    }
});

fn scramble(c: &CyclicWord, rot: usize, inv: bool) -> (CyclicWord, i8) {
    let r = c.rotate(rot % c.len());
    if inv {
        (r.inverse(), -1)
    } else {
        (r, 1)
    }
}

property!(
    check_cyclic_equality_composes,
    (cyclic_word(3, 12), any::<usize>(), any::<bool>(), any::<usize>(), any::<bool>(), cyclic_word(3, 12)),
    |(c, r1, i1, r2, i2, other)| {
        let (x, _) = scramble(&c, r1, i1);
        let (y, _) = scramble(&x, r2, i2);
        let cc = cyclic_equal_up_to_inversion(&c, &c);
        prop_assert!(cc.equal && cc.orientation == 1);
        let cx = cyclic_equal_up_to_inversion(&c, &x);
        let xc = cyclic_equal_up_to_inversion(&x, &c);
        let xy = cyclic_equal_up_to_inversion(&x, &y);
        let cy = cyclic_equal_up_to_inversion(&c, &y);
        prop_assert!(cx.equal && xc.equal && xy.equal && cy.equal);
        prop_assert_eq!(cx.orientation, xc.orientation);
        prop_assert_eq!(cy.orientation, cx.orientation * xy.orientation);
        let co = cyclic_equal_up_to_inversion(&c, &other);
        let oc = cyclic_equal_up_to_inversion(&other, &c);
        prop_assert_eq!(co.equal, oc.equal);
        if co.equal {
            prop_assert_eq!(co.orientation, oc.orientation);
        }
    }
);

// ---------------------------------------------------------------- stallings

/// Folds the wedge of generator loops added in a shuffled order.
pub fn fold_shuffled(gens: &[Word], rank: usize, rng: &mut ChaCha8Rng) -> StallingsGraph {
    let mut order: Vec<&Word> = gens.iter().collect();
    order.shuffle(rng);
    let mut g = LabeledGraph::new(Alphabet::new(rank).unwrap());
    for w in order {
        g.add_loop(w.letters()).unwrap();
    }
    g.fold()
}

property!(check_folding_confluence, (generators(3, 4, 8), any::<u64>()), |(gens, seed)| {
    let reference = StallingsGraph::from_generators(&gens, Alphabet::new(3).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        prop_assert!(fold_shuffled(&gens, 3, &mut rng).is_isomorphic(&reference));
    }
});

property!(check_nielsen_schreier, any_subgroup(), |g| {
    let r = g.alphabet().rank();
    if let Some(n) = g.index_in_ambient().finite() {
        prop_assert_eq!(g.rank() - 1, n * (r - 1));
    }
    let cover = hall_completion(&g).cover;
    let n = cover.index_in_ambient().finite().unwrap();
    prop_assert_eq!(cover.rank() - 1, n * (r - 1));
});

property!(check_pullback_symmetry, subgroup_pair(2), |(u, v)| {
    let ranks = |a: &StallingsGraph, b: &StallingsGraph| {
        let mut r: Vec<usize> = pullback(a, b).unwrap().iter().map(|c| c.reduced_rank).collect();
        r.sort_unstable();
        r
    };
    prop_assert_eq!(ranks(&u, &v), ranks(&v, &u));
});

property!(check_generators_are_members, (1..=3usize).prop_flat_map(|r| (Just(r), generators(r, 4, 10))), |(r, gens)| {
    let g = StallingsGraph::from_generators(&gens, Alphabet::new(r).unwrap()).unwrap();
    for s in &gens {
        prop_assert!(g.contains(s));
    }
});

pub fn words_f2_len8() -> &'static [Word] {
    static W: OnceLock<Vec<Word>> = OnceLock::new();
    W.get_or_init(|| reduced_words(Alphabet::new(2).unwrap(), 8))
}

property!(check_intersection_membership, subgroup_pair(2), |(u, v)| {
    let i = intersection(&u, &v).unwrap();
    for w in words_f2_len8() {
        prop_assert_eq!(i.contains(w), u.contains(w) && v.contains(w), "word {:?}", w);
    }
});

property!(check_double_coset_soundness, subgroup_pair(2), |(u, v)| {
    let comps = pullback(&u, &v).unwrap();
    for c in &comps {
        for x in c.intersection.basis() {
            prop_assert!(u.contains(&x));
            prop_assert!(v.contains(&x.conjugate_by(&c.representative)));
        }
    }
    let keys: Vec<DoubleCoset> = comps
        .iter()
        .map(|c| DoubleCoset::new(&u, &v, &c.representative).unwrap())
        .collect();
    for (i, k) in keys.iter().enumerate() {
        for (j, c) in comps.iter().enumerate() {
            prop_assert_eq!(k.contains(&c.representative), i == j);
        }
    }
});

// --------------------------------------------------------------------- hall

property!(check_hall_rank_identity, any_subgroup(), |g| {
    let r = g.alphabet().rank();
    let c = hall_completion(&g);
    prop_assert_eq!(c.cover.rank(), 1 + c.index * (r - 1));
    prop_assert_eq!(c.cover.index_in_ambient().finite(), Some(c.index));
});

property!(check_hall_embedding, any_subgroup(), |g| {
    let c = hall_completion(&g);
    let mut seen = c.embedded_core.vertex_map.clone();
    seen.sort_unstable();
    seen.dedup();
    prop_assert_eq!(seen.len(), g.num_vertices());
    let mut edges = c.embedded_core.edge_map.clone();
    for &(s, l, t) in &edges {
        prop_assert_eq!(c.cover.follow(s, l), Some(t));
    }
    edges.sort_unstable();
    edges.dedup();
    prop_assert_eq!(edges.len(), g.num_edges());
    for w in g.basis() {
        prop_assert!(c.cover.contains(&w));
    }
});

property!(check_hall_free_factor_identity, any_subgroup(), |g| {
    let c = hall_completion(&g);
    prop_assert_eq!(g.rank() + c.complement_basis.len(), c.cover.rank());
    for w in &c.complement_basis {
        prop_assert!(c.cover.contains(w));
    }
    let mut all = g.basis();
    all.extend(c.complement_basis.iter().cloned());
    let regenerated = StallingsGraph::from_generators(&all, g.alphabet()).unwrap();
    prop_assert!(regenerated.is_isomorphic(&c.cover));
});

/// Ambient path of rank-1..3 vertices joined along their first generators,
/// with a sub-vertex group per vertex and sub-edges of exponent 1 or 2.
pub fn certificate_instance() -> impl Strategy<Value = (GraphOfGroups, SubgraphOfGroups)> {
    (1..=3usize)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1..=3usize, n),
                prop::collection::vec(any::<bool>(), n - 1),
                prop::collection::vec(1..=2u32, n - 1),
                prop::collection::vec((0..3u8, generators(3, 3, 4)), n),
            )
        })
        .prop_map(|(ranks, cyclic, exps, choices)| {
            let mut amb = GraphOfGroups::new();
            for (i, &r) in ranks.iter().enumerate() {
                amb.add_vertex(format!("v{i}"), r);
            }
            for i in 0..ranks.len() - 1 {
                if cyclic[i] {
                    amb.add_edge(format!("e{i}"), i, i + 1, EdgeGroup::Cyclic { word_from: vec![1], word_to: vec![1] });
                } else {
                    amb.add_trivial_edge(format!("e{i}"), i, i + 1);
                }
            }
            let vertices = ranks
                .iter()
                .zip(choices)
                .enumerate()
                .map(|(i, (&r, (kind, gens)))| {
                    let a = Alphabet::new(r).unwrap();
                    let group = match kind {
                        0 => StallingsGraph::rose(a),
                        1 => {
                            let subset: Vec<Word> = (1..=r as Letter)
                                .filter(|g| *g == 1 || gens.len() % 2 == 0)
                                .map(Word::generator)
                                .collect();
                            StallingsGraph::from_generators(&subset, a).unwrap()
                        }
                        _ => {
                            let folded: Vec<Word> = gens
                                .iter()
                                .map(|w| a.reduce(&w.letters().iter().map(|&l| l.signum() * ((l.abs() - 1) % r as Letter + 1)).collect::<Vec<_>>()).unwrap())
                                .filter(|w| !w.is_identity())
                                .collect();
                            StallingsGraph::from_generators(&folded, a).unwrap()
                        }
                    };
                    SubVertex { ambient: i, group }
                })
                .collect();
            let edges = (0..ranks.len() - 1)
                .map(|i| SubEdge {
                    ambient: i,
                    from: i,
                    to: i + 1,
                    group: if cyclic[i] {
                        let w = Word::generator(1).pow(exps[i] as i64);
                        SubEdgeGroup::Cyclic { exponent: exps[i], word_from: w.clone(), word_to: w }
                    } else {
                        SubEdgeGroup::Trivial
                    },
                })
                .collect();
            (amb, SubgraphOfGroups { vertices, edges })
        })
}

property!(check_certificate_soundness, certificate_instance(), |(amb, sub)| {
    let cert = mv_certificate(&sub, &amb).unwrap();
    if cert.kind != CertificateKind::None {
        prop_assert!(chi_bar(sub.euler_characteristic()) <= chi_bar(amb.euler_characteristic()));
    }
    for v in &sub.vertices {
        let c = free_factor_certificate(&v.group);
        prop_assert_eq!(c.kind, CertificateKind::FreeFactor);
        let cover_rank = v.group.rank() + match &c.witness {
            ghnclab::hall::Witness::FreeFactor { complement_basis, .. } => complement_basis.len(),
            _ => unreachable!(),
        };
        let r = v.group.alphabet().rank();
        let index = hall_completion(&v.group).index;
        prop_assert_eq!(cover_rank, 1 + index * (r - 1));
    }
});

// ---------------------------------------------------------------------- gog

property!(check_chi_additivity, graph_of_groups(), |g| {
    prop_assert!(g.validate().is_valid(), "{:?}", g.validate());
    let d = g.free_product_decompose();
    let sum: i64 = d.factors.iter().map(|f| f.euler_characteristic()).sum();
    prop_assert_eq!(sum - d.removed_edges.len() as i64, g.euler_characteristic());
});

property!(check_presentation_counts, graph_of_groups(), |g| {
    let p = g.presentation().unwrap();
    let ranks: usize = g.vertices().iter().map(|v| v.rank).sum();
    let off_tree = g.edges().len() + 1 - g.vertices().len();
    prop_assert_eq!(p.generators.len(), ranks + off_tree);
    prop_assert_eq!(p.names.len(), p.generators.len());
    let cyclic = g.edges().iter().filter(|e| !e.group.is_trivial()).count();
    prop_assert_eq!(p.relations.len(), cyclic);
});

property!(check_bs_euler_zero, (prop_oneof![-9i64..=-1, 1i64..=9], prop_oneof![-9i64..=-1, 1i64..=9]), |(m, n)| {
    let mut w = WeightedGraph::new();
    let v = w.add_vertex("v");
    w.add_edge("e", v, m, v, n).unwrap();
    prop_assert_eq!(w.gbs_complex().unwrap().euler_characteristic(), 0);
});

property!(check_free_b1, 2..=40usize, |r| {
    let mut g = GraphOfGroups::new();
    g.add_vertex("v", r);
    let p = g.predicted_l2_betti();
    prop_assert_eq!(p.b1, r as u64 - 1);
    prop_assert!(!p.conditional);
});

// ---------------------------------------------------------------------- phi

property!(check_balance_orientation_independent, (weighted_graph(5, 4), any::<prop::sample::Index>()), |(w, e)| {
    let e = e.index(w.edges().len());
    prop_assert_eq!(w.with_edge_reversed(e).is_balanced().balanced, w.is_balanced().balanced);
});

/// Spanning forest from a shuffled edge order.
pub fn random_spanning_forest(w: &WeightedGraph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.edges().len()).collect();
    order.shuffle(rng);
    let mut parent: Vec<usize> = (0..w.vertices().len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut tree = Vec::new();
    for e in order {
        let (a, b) = (find(&mut parent, w.edges()[e].from), find(&mut parent, w.edges()[e].to));
        if a != b {
            parent[a] = b;
            tree.push(e);
        }
    }
    tree
}

property!(check_balance_tree_independent, (weighted_graph(5, 4), any::<u64>()), |(w, seed)| {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = w.is_balanced();
    let single_cycle = w.edges().len() == w.vertices().len();
    for _ in 0..50 {
        let tree = random_spanning_forest(&w, &mut rng);
        let r = w.is_balanced_with_tree(&tree).unwrap();
        prop_assert_eq!(r.balanced, reference.balanced);
        if let (true, Some(a), Some(b)) = (single_cycle, &r.witness, &reference.witness) {
            prop_assert!(a.gain == b.gain || a.gain == b.gain.recip());
        }
        if let Some(x) = &r.witness {
            prop_assert_eq!(&w.cycle_gain(&x.cycle), &x.gain);
        }
    }
});

property!(check_gbs_idempotent, weighted_graph(5, 3), |w| {
    let phi = build_phi(&w.gbs_complex().unwrap()).unwrap();
    prop_assert_eq!(phi.vertices().len(), w.vertices().len());
    let ids: HashMap<String, String> = phi
        .vertices()
        .iter()
        .map(|v| (v.id.clone(), v.tag.as_ref().unwrap().gamma_vertex.clone()))
        .collect();
    let key = |g: &WeightedGraph, map: &dyn Fn(&str) -> String| {
        let mut e: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.id.clone(), map(&g.vertices()[e.from].id), e.weight_from, map(&g.vertices()[e.to].id), e.weight_to))
            .collect();
        e.sort();
        e
    };
    prop_assert_eq!(key(&phi, &|id| ids[id].clone()), key(&w, &|id| id.to_string()));
});

property!(check_double_cover, weighted_graph(4, 3), |w| {
    let cover = w.orientation_double_cover().unwrap();
    prop_assert!(cover.detect_klein_torus_loops().iter().all(|l| l.kind != LoopKind::Klein));
    let chi = w.gbs_complex().unwrap().euler_characteristic();
    if cover.is_connected() {
        prop_assert_eq!(cover.gbs_complex().unwrap().euler_characteristic(), 2 * chi);
    }
    prop_assert_eq!(cover.vertices().len(), 2 * w.vertices().len());
    prop_assert_eq!(cover.edges().len(), 2 * w.edges().len());
});

property!(check_classify_consistency, prop_oneof![weighted_graph(5, 3).prop_map(|w| w.gbs_complex().unwrap()), graph_of_groups()], |g| {
    let r = classify(&g).unwrap();
    if r.rel_hyp_virt_abelian {
        prop_assert!(r.lerf && r.residually_finite && r.l2_hall_predicted);
    }
    prop_assert_eq!(r.rel_hyp_virt_abelian, r.balanced && r.solvable);
});

// --------------------------------------------------------------------- ghnc

property!(check_ghnc_holds, prop_oneof![subgroup_pair(2), subgroup_pair(3)], |(u, v)| {
    let r = ghnc_check_graphs(&u, &v).unwrap();
    prop_assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs);
});

property!(check_classical_holds, prop_oneof![subgroup_pair(2), subgroup_pair(3)], |(u, v)| {
    let r = ghnc_check_graphs(&u, &v).unwrap();
    prop_assert!(r.classical_holds, "lhs {} rhs {}", r.classical_lhs, r.classical_rhs);
});

property!(check_lhs_dominates_base_term, prop_oneof![subgroup_pair(2), subgroup_pair(3)], |(u, v)| {
    let r = ghnc_check_graphs(&u, &v).unwrap();
    prop_assert!(r.lhs >= intersection(&u, &v).unwrap().reduced_rank());
});

/// Pairs in F₂ whose cores have at most 12 vertices.
pub fn small_pair() -> impl Strategy<Value = (StallingsGraph, StallingsGraph)> {
    (subgroup(2, 3, 5), subgroup(2, 3, 5))
        .prop_filter("cores of at most 12 vertices", |(u, v)| u.num_vertices() <= 12 && v.num_vertices() <= 12)
}

property!(check_oracle_agreement, small_pair(), |(u, v)| {
    let s = oracle_agrees(&u, &v, 8).unwrap();
    prop_assert!(s.agree, "{:?} U={} V={}", s, show(&u), show(&v));
});

property!(check_monotone_under_completion, prop_oneof![subgroup_pair(2), subgroup_pair(3)], |(u, v)| {
    let before = ghnc_check_graphs(&u, &v).unwrap();
    let cover = hall_completion(&u).cover;
    let after = ghnc_check_graphs(&cover, &v).unwrap();
    prop_assert!(cover.rank() >= u.rank());
    prop_assert!(after.rhs >= before.rhs);
    prop_assert!(after.holds);
});

/// Every property with its name, module by module.
pub fn all_checks() -> Vec<(&'static str, &'static str, Check)> {
    vec![
        ("words", "reduce idempotent", check_reduce_idempotent),
        ("words", "w w^-1 = 1", check_word_times_inverse),
        ("words", "root exponent scales", check_root_exponent_scales),
        ("words", "root has no proper period", check_root_is_primitive),
        ("words", "cyclic equality composes", check_cyclic_equality_composes),
        ("stallings", "folding confluence", check_folding_confluence),
        ("stallings", "nielsen-schreier", check_nielsen_schreier),
        ("stallings", "pullback symmetry", check_pullback_symmetry),
        ("stallings", "generators are members", check_generators_are_members),
        ("stallings", "intersection membership", check_intersection_membership),
        ("stallings", "double-coset soundness", check_double_coset_soundness),
        ("hall", "rank identity", check_hall_rank_identity),
        ("hall", "embedding", check_hall_embedding),
        ("hall", "free-factor identity", check_hall_free_factor_identity),
        ("hall", "certificate soundness", check_certificate_soundness),
        ("gog", "chi additivity", check_chi_additivity),
        ("gog", "presentation counts", check_presentation_counts),
        ("gog", "BS euler zero", check_bs_euler_zero),
        ("gog", "free b1", check_free_b1),
        ("phi", "balance orientation independent", check_balance_orientation_independent),
        ("phi", "balance tree independent", check_balance_tree_independent),
        ("phi", "gbs idempotent", check_gbs_idempotent),
        ("phi", "double cover", check_double_cover),
        ("phi", "classify consistency", check_classify_consistency),
        ("ghnc", "ghnc holds", check_ghnc_holds),
        ("ghnc", "classical holds", check_classical_holds),
        ("ghnc", "lhs dominates base term", check_lhs_dominates_base_term),
        ("ghnc", "oracle agreement", check_oracle_agreement),
        ("ghnc", "monotone under completion", check_monotone_under_completion),
    ]
}
