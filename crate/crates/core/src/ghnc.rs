//! The Geometric Hanna Neumann inequality for free groups
//!
//! ```text
//! Σ_{t ∈ U\F/V} χ̄(U ∩ tVt⁻¹) ≤ χ̄(U)·χ̄(V),      χ̄(H) = max(rank H − 1, 0)
//! ```
//!
//! checked through fiber products, a brute-force oracle that never builds a
//! product graph, and a seeded batch harness.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stallings::{pullback, trim, DoubleCosetComponent, LabeledGraph, StallingsGraph};
use crate::words::{Alphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub representative: Word,
    pub rank: usize,
    pub reduced_rank: usize,
    pub degenerate: bool,
    pub contains_base: bool,
}

impl From<&DoubleCosetComponent> for ComponentSummary {
    fn from(c: &DoubleCosetComponent) -> Self {
        ComponentSummary {
            representative: c.representative.clone(),
            rank: c.rank,
            reduced_rank: c.reduced_rank,
            degenerate: c.degenerate,
            contains_base: c.contains_base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhncReport {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    pub u_rank: usize,
    pub v_rank: usize,
    pub components: Vec<ComponentSummary>,
    /// Reduced rank of `U ∩ V`.
    pub classical_lhs: usize,
    pub classical_rhs: usize,
    pub classical_holds: bool,
}

impl GhncReport {
    /// Whether both sides are positive and equal.
    pub fn is_equality(&self) -> bool {
        self.rhs > 0 && self.lhs == self.rhs
    }
}

pub fn ghnc_check_graphs(gu: &StallingsGraph, gv: &StallingsGraph) -> Result<GhncReport> {
    let comps = pullback(gu, gv)?;
    let lhs = comps.iter().map(|c| c.reduced_rank).sum();
    let rhs = gu.reduced_rank() * gv.reduced_rank();
    let classical_lhs = comps
        .iter()
        .find(|c| c.contains_base)
        .map_or(0, |c| c.reduced_rank);
    Ok(GhncReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
        u_rank: gu.rank(),
        v_rank: gv.rank(),
        components: comps.iter().map(ComponentSummary::from).collect(),
        classical_lhs,
        classical_rhs: 2 * rhs,
        classical_holds: classical_lhs <= 2 * rhs,
    })
}

/// Both inequalities for the subgroups generated by `u` and `v`; an empty
/// list generates the trivial subgroup.
pub fn ghnc_check(u: &[Word], v: &[Word], alphabet: Alphabet) -> Result<GhncReport> {
    ghnc_check_graphs(
        &StallingsGraph::from_generators(u, alphabet)?,
        &StallingsGraph::from_generators(v, alphabet)?,
    )
}

/// `χ̄(U ∩ V) ≤ 2·χ̄(U)·χ̄(V)`.
pub fn classical_hn_check(u: &[Word], v: &[Word], alphabet: Alphabet) -> Result<bool> {
    let gu = StallingsGraph::from_generators(u, alphabet)?;
    let gv = StallingsGraph::from_generators(v, alphabet)?;
    let i = crate::stallings::intersection(&gu, &gv)?;
    Ok(i.reduced_rank() <= 2 * gu.reduced_rank() * gv.reduced_rank())
}

/// Invariant of the double coset `UtV`: the folded graph of `U` at `x` and
/// `V` at `y` joined by a path reading `t`, with hanging trees away from `x`
/// and `y` removed, numbered breadth-first from `x`. Equal double cosets give
/// equal keys and every member of `UtV` labels an `x → y` path, but the
/// paths spell all of `⟨U, tVt⁻¹⟩·t`, so neither converse holds in general.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DoubleCosetKey {
    graph: StallingsGraph,
    target: usize,
}

impl DoubleCosetKey {
    pub fn new(gu: &StallingsGraph, gv: &StallingsGraph, t: &Word) -> Result<Self> {
        let alphabet = gu.alphabet();
        let mut lg = LabeledGraph::new(alphabet);
        lg.attach(gu, 0)?;
        let y = lg.add_vertex();
        lg.attach(gv, y)?;
        lg.add_path(0, t.letters(), Some(y))?;
        let (folded, ends) = lg.fold_tracking(&[0, y]);
        let adj = folded.adjacency();
        let alive = trim(adj, &vec![true; adj.len()], &ends);
        let (graph, renumber) = StallingsGraph::canonical(alphabet, adj, &alive, ends[0]);
        Ok(DoubleCosetKey {
            graph,
            target: renumber[ends[1]].expect("joined by the path"),
        })
    }

    /// Necessary condition for `w ∈ UtV`.
    pub fn admits(&self, w: &Word) -> bool {
        self.graph.trace(0, w.letters()) == Some(self.target)
    }
}

/// The double coset `UtV` with an exact membership test: `w ∈ UtV` iff the
/// cosets `Ut` and `wV` meet, i.e. the product of their folded graphs joins
/// `(base, start of w)` to `(end of t, base)`.
#[derive(Clone, Debug)]
pub struct DoubleCoset {
    key: DoubleCosetKey,
    u: StallingsGraph,
    v: StallingsGraph,
    t: Word,
}

impl DoubleCoset {
    pub fn new(gu: &StallingsGraph, gv: &StallingsGraph, t: &Word) -> Result<Self> {
        if gu.alphabet() != gv.alphabet() {
            return Err(Error::AlphabetMismatch {
                expected: gu.alphabet().rank(),
                found: gv.alphabet().rank(),
            });
        }
        gu.alphabet().check(t.letters())?;
        Ok(DoubleCoset {
            key: DoubleCosetKey::new(gu, gv, t)?,
            u: gu.clone(),
            v: gv.clone(),
            t: t.clone(),
        })
    }

    pub fn key(&self) -> &DoubleCosetKey {
        &self.key
    }

    /// Whether `w` lies in the double coset.
    pub fn contains(&self, w: &Word) -> bool {
        if !self.key.admits(w) {
            return false;
        }
        let ut = Tailed::new(&self.u, self.t.letters());
        // reduced paths from the end of the hung w⁻¹ to the base spell w·V
        let w_inv = w.inverse();
        let wv = Tailed::new(&self.v, w_inv.letters());
        let m = wv.n + wv.tail.len();
        let letters: Vec<Letter> = self.u.alphabet().letters().collect();
        let target = (ut.end(), 0);
        let mut seen = vec![false; (ut.n + ut.tail.len()) * m];
        let start = (0, wv.end());
        seen[start.1] = true;
        let mut stack = vec![start];
        while let Some((a, b)) = stack.pop() {
            if (a, b) == target {
                return true;
            }
            for &l in &letters {
                if let (Some(x), Some(y)) = (ut.follow(a, l), wv.follow(b, l)) {
                    if !seen[x * m + y] {
                        seen[x * m + y] = true;
                        stack.push((x, y));
                    }
                }
            }
        }
        false
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleBucket {
    /// Shortlex-least member of length at most `max_len`.
    pub representative: Word,
    /// Number of enumerated words in the bucket.
    pub members: usize,
    /// Every nontrivial `x ∈ U` with `|x| ≤ max_len` and
    /// `representative⁻¹·x·representative ∈ V`, in shortlex order. Only
    /// filled for nontrivial buckets.
    pub intersection_words: Vec<Word>,
    /// Shortest nontrivial `x ∈ U` with `representative⁻¹·x·representative ∈ V`,
    /// of any length.
    pub witness: Option<Word>,
}

impl OracleBucket {
    pub fn is_nontrivial(&self) -> bool {
        self.witness.is_some()
    }
}

/// Where a word falls: `t = p·m·s` with `p` the longest prefix read in `U`
/// (ending at `α`) and `s` the longest suffix read backwards in `V` (ending
/// at `β`). With `m` nonempty the graph `U —m— V` is already folded, so
/// `(α, m, β)` is a canonical form of `UtV`. Otherwise `U` and `V` fold
/// together and only the exact test tells those double cosets apart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Placement {
    Bridged(usize, Vec<Letter>, usize),
    Merged,
}

fn placement(u: &StallingsGraph, v: &StallingsGraph, t: &Word) -> Placement {
    let letters = t.letters();
    let (i, alpha) = readable_prefix(u, letters);
    let (j, beta) = readable_prefix(v, t.inverse().letters());
    if i + j < letters.len() {
        Placement::Bridged(alpha, letters[i..letters.len() - j].to_vec(), beta)
    } else {
        Placement::Merged
    }
}

/// Double cosets met by words of length at most `max_len`. Complete only
/// relative to that bound: a double coset without short members, or an
/// intersection without short elements, is invisible.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub max_len: usize,
    pub buckets: Vec<OracleBucket>,
    #[serde(skip)]
    bridged: HashMap<Placement, usize>,
    #[serde(skip)]
    merged: Vec<(usize, DoubleCoset)>,
    #[serde(skip)]
    u: StallingsGraph,
    #[serde(skip)]
    v: StallingsGraph,
}

impl OracleResult {
    fn locate(&self, t: &Word) -> Option<usize> {
        match placement(&self.u, &self.v, t) {
            Placement::Merged => self.merged.iter().find(|(_, c)| c.contains(t)).map(|&(b, _)| b),
            p => self.bridged.get(&p).copied(),
        }
    }

    /// Bucket of the double coset of `t`, if the enumeration met it.
    pub fn bucket_of(&self, t: &Word) -> Result<Option<usize>> {
        self.u.alphabet().check(t.letters())?;
        Ok(self.locate(t))
    }

    pub fn nontrivial_count(&self) -> usize {
        self.buckets.iter().filter(|b| b.is_nontrivial()).count()
    }

    /// Nontrivial `x ∈ U` with `|x| ≤ max_len` and `t⁻¹xt ∈ V`, by
    /// membership tests alone.
    pub fn intersection_words_at(&self, t: &Word) -> Vec<Word> {
        closed_words(&self.u, self.max_len)
            .into_iter()
            .filter(|x| self.v.contains(&x.conjugate_by(t)))
            .collect()
    }
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn reduced_words(alphabet: Alphabet, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut out = vec![Word::identity()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(&-l) {
                    let mut x = w.clone();
                    x.push(l);
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().map(|w| Word::from_raw(w.iter().copied())));
        layer = next;
    }
    out
}

/// Labels of nontrivial reduced closed paths at the base of length at most
/// `max_len`, in shortlex order.
pub fn closed_words(g: &StallingsGraph, max_len: usize) -> Vec<Word> {
    fn walk(g: &StallingsGraph, v: usize, path: &mut Vec<Letter>, max_len: usize, out: &mut Vec<Word>) {
        if v == 0 && !path.is_empty() {
            out.push(Word::from_raw(path.iter().copied()));
        }
        if path.len() == max_len {
            return;
        }
        for l in g.alphabet().letters() {
            if path.last() == Some(&-l) {
                continue;
            }
            if let Some(x) = g.follow(v, l) {
                path.push(l);
                walk(g, x, path, max_len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, 0, &mut Vec::new(), max_len, &mut out);
    out.sort_by(|a, b| a.cmp_shortlex(b));
    out
}

/// Length of the longest prefix of `letters` readable from the base of `g`,
/// and the vertex it ends at.
fn readable_prefix(g: &StallingsGraph, letters: &[Letter]) -> (usize, usize) {
    let mut v = 0;
    for (i, &l) in letters.iter().enumerate() {
        match g.follow(v, l) {
            Some(x) => v = x,
            None => return (i, v),
        }
    }
    (letters.len(), v)
}

/// `g` with a path reading `w` hung from the base, without copying `g`:
/// vertices `0..n` are those of `g`, `n + i` is the end of the `i`-th hung
/// letter. Reduced paths from the base to [`end`](Self::end) spell `H·w`.
struct Tailed<'a> {
    g: &'a StallingsGraph,
    n: usize,
    /// Where the hung part starts.
    root: usize,
    tail: &'a [Letter],
}

impl<'a> Tailed<'a> {
    fn new(g: &'a StallingsGraph, w: &'a [Letter]) -> Self {
        let (i, root) = readable_prefix(g, w);
        Tailed {
            g,
            n: g.num_vertices(),
            root,
            tail: &w[i..],
        }
    }

    fn end(&self) -> usize {
        if self.tail.is_empty() {
            self.root
        } else {
            self.n + self.tail.len() - 1
        }
    }

    fn follow(&self, x: usize, l: Letter) -> Option<usize> {
        if x < self.n {
            if x == self.root && self.tail.first() == Some(&l) {
                return Some(self.n);
            }
            return self.g.follow(x, l);
        }
        let i = x - self.n;
        if self.tail.get(i + 1) == Some(&l) {
            Some(x + 1)
        } else if self.tail[i] == -l {
            Some(if i == 0 { self.root } else { x - 1 })
        } else {
            None
        }
    }
}

/// The shortest nontrivial `x ∈ U` with `t⁻¹xt ∈ V`, if any: a breadth-first
/// search for a reduced closed path at the base of `U` that also closes up at
/// the base of the graph of `tVt⁻¹`. The state space is finite, so the search
/// is exact.
fn shortest_conjugate_in(u: &StallingsGraph, v: &StallingsGraph, t: &Word) -> Option<Word> {
    // closed paths at the end of the hung t⁻¹ spell tVt⁻¹
    let t_inv = t.inverse();
    let tvt = Tailed::new(v, t_inv.letters());
    let base = (0, tvt.end());
    let letters: Vec<Letter> = u.alphabet().letters().collect();
    // state: product vertex and the last letter read (0 before the first)
    let mut parent: HashMap<(usize, usize, Letter), (usize, usize, Letter)> = HashMap::new();
    let mut queue = VecDeque::from([(base.0, base.1, 0)]);
    while let Some(s @ (a, b, last)) = queue.pop_front() {
        for &l in &letters {
            if l == -last {
                continue;
            }
            let (Some(x), Some(y)) = (u.follow(a, l), tvt.follow(b, l)) else {
                continue;
            };
            let next = (x, y, l);
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, s);
            if (x, y) == base {
                let mut path = Vec::new();
                let mut cur = next;
                while cur.2 != 0 {
                    path.push(cur.2);
                    cur = parent[&cur];
                }
                path.reverse();
                return Some(Word::from_raw(path));
            }
            queue.push_back(next);
        }
    }
    None
}

/// Buckets every reduced word of length at most `max_len` by double coset
/// and collects, per bucket, the short elements of `U ∩ tVt⁻¹`.
pub fn oracle_double_cosets(u: &StallingsGraph, v: &StallingsGraph, max_len: usize) -> Result<OracleResult> {
    if u.alphabet() != v.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: u.alphabet().rank(),
            found: v.alphabet().rank(),
        });
    }
    let mut o = OracleResult {
        max_len,
        buckets: Vec::new(),
        bridged: HashMap::new(),
        merged: Vec::new(),
        u: u.clone(),
        v: v.clone(),
    };
    for t in reduced_words(u.alphabet(), max_len) {
        match o.locate(&t) {
            Some(b) => o.buckets[b].members += 1,
            None => {
                let b = o.buckets.len();
                match placement(u, v, &t) {
                    Placement::Merged => o.merged.push((b, DoubleCoset::new(u, v, &t)?)),
                    p => {
                        o.bridged.insert(p, b);
                    }
                }
                let witness = shortest_conjugate_in(u, v, &t);
                o.buckets.push(OracleBucket {
                    representative: t,
                    members: 1,
                    intersection_words: Vec::new(),
                    witness,
                });
            }
        }
    }
    let u_words = closed_words(u, max_len);
    for b in o.buckets.iter_mut().filter(|b| b.is_nontrivial()) {
        b.intersection_words = u_words
            .iter()
            .filter(|x| v.contains(&x.conjugate_by(&b.representative)))
            .cloned()
            .collect();
    }
    Ok(o)
}

/// Parameters of one random subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomModel {
    pub seed: u64,
    pub ambient_rank: usize,
    pub num_generators: usize,
    /// Maximum word length; each length is uniform in `1..=word_length`.
    pub word_length: usize,
}

/// Uniformly random reduced word of length exactly `len`.
pub fn random_reduced_word<R: Rng + ?Sized>(rng: &mut R, rank: usize, len: usize) -> Word {
    let all: Vec<Letter> = (1..=rank as Letter).flat_map(|g| [g, -g]).collect();
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        let allowed: Vec<Letter> = match letters.last() {
            Some(&p) => all.iter().copied().filter(|&l| l != -p).collect(),
            None => all.clone(),
        };
        letters.push(allowed[rng.random_range(0..allowed.len())]);
    }
    Word::from_raw(letters)
}

fn random_generators<R: Rng + ?Sized>(rng: &mut R, rank: usize, k: usize, max_len: usize) -> Vec<Word> {
    (0..k)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            random_reduced_word(rng, rank, len)
        })
        .collect()
}

pub fn random_subgroup(model: &RandomModel) -> Result<Vec<Word>> {
    if model.ambient_rank == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if model.word_length == 0 && model.num_generators > 0 {
        return Err(Error::Config("word_length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    Ok(random_generators(
        &mut rng,
        model.ambient_rank,
        model.num_generators,
        model.word_length,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: bool,
    pub max_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub seed: u64,
    pub instances: usize,
    pub ambient_rank: usize,
    pub max_generators: usize,
    pub max_word_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    /// JSONL output path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl BatchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: BatchConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ambient_rank == 0 {
            return Err(Error::Config("ambient_rank must be positive".into()));
        }
        if self.max_word_length == 0 {
            return Err(Error::Config("max_word_length must be positive".into()));
        }
        if let Some(o) = &self.oracle {
            if o.enabled && o.max_len == 0 {
                return Err(Error::Config("oracle.max_len must be positive".into()));
            }
        }
        Ok(())
    }

    /// Generators of `U` and `V` for instance `index`, drawn from a stream
    /// seeded with `seed ^ index`. Each side gets `0..=max_generators`
    /// generators, so trivial and cyclic subgroups are included.
    pub fn instance(&self, index: usize) -> (Vec<Word>, Vec<Word>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ index as u64);
        let side = |rng: &mut ChaCha8Rng| {
            let k = rng.random_range(0..=self.max_generators);
            random_generators(rng, self.ambient_rank, k, self.max_word_length)
        };
        let u = side(&mut rng);
        let v = side(&mut rng);
        (u, v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub max_len: usize,
    pub nontrivial_buckets: usize,
    pub nontrivial_components: usize,
    /// Every nontrivial double coset has a member of length at most
    /// `max_len`, so the oracle enumerates it.
    pub resolved: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub index: usize,
    pub seed: u64,
    pub u: Vec<String>,
    pub v: Vec<String>,
    pub u_rank: usize,
    pub v_rank: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    pub classical_lhs: usize,
    pub classical_rhs: usize,
    pub classical_holds: bool,
    pub components: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    /// Wall-clock time of the check in microseconds; varies between runs.
    pub elapsed_us: u64,
}

impl BatchRecord {
    /// The record without its timing, for comparisons across runs.
    pub fn without_timing(&self) -> BatchRecord {
        BatchRecord {
            elapsed_us: 0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub instances: usize,
    pub violations: usize,
    pub classical_violations: usize,
    /// Disagreements on instances the oracle resolves.
    pub oracle_disagreements: usize,
    /// Instances with a nontrivial double coset that has no member within the
    /// oracle's length bound.
    pub oracle_unresolved: usize,
    /// Largest `lhs / rhs` over instances with `rhs > 0`, as `"p/q"`.
    pub max_ratio: Option<String>,
    pub max_ratio_value: Option<f64>,
    pub equality_attained: bool,
    pub timing_us: Percentiles,
}

fn percentile(sorted: &[u64], p: usize) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    // nearest rank
    let rank = (p * sorted.len()).div_ceil(100).max(1);
    sorted[rank - 1]
}

impl Aggregate {
    pub fn from_records(records: &[BatchRecord]) -> Aggregate {
        let mut best: Option<(usize, usize)> = None;
        for r in records.iter().filter(|r| r.rhs > 0) {
            match best {
                Some((l, h)) if r.lhs * h <= l * r.rhs => {}
                _ => best = Some((r.lhs, r.rhs)),
            }
        }
        let mut times: Vec<u64> = records.iter().map(|r| r.elapsed_us).collect();
        times.sort_unstable();
        let reduce = |(l, h): (usize, usize)| {
            let g = gcd(l, h);
            (l / g.max(1), h / g.max(1))
        };
        Aggregate {
            instances: records.len(),
            violations: records.iter().filter(|r| !r.holds).count(),
            classical_violations: records.iter().filter(|r| !r.classical_holds).count(),
            oracle_disagreements: records
                .iter()
                .filter(|r| r.oracle.as_ref().is_some_and(|o| o.resolved && !o.agree))
                .count(),
            oracle_unresolved: records
                .iter()
                .filter(|r| r.oracle.as_ref().is_some_and(|o| !o.resolved))
                .count(),
            max_ratio: best.map(|b| {
                let (l, h) = reduce(b);
                format!("{l}/{h}")
            }),
            max_ratio_value: best.map(|(l, h)| l as f64 / h as f64),
            equality_attained: records.iter().any(|r| r.rhs > 0 && r.lhs == r.rhs),
            timing_us: Percentiles {
                p50: percentile(&times, 50),
                p90: percentile(&times, 90),
                p99: percentile(&times, 99),
                max: times.last().copied().unwrap_or(0),
            },
        }
    }

    /// Recomputes the aggregate from a JSONL stream.
    pub fn from_jsonl(text: &str) -> Result<Aggregate> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<Vec<BatchRecord>, _>>()?;
        Ok(Aggregate::from_records(&records))
    }

    pub fn has_violation(&self) -> bool {
        self.violations > 0 || self.classical_violations > 0
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Compares pullback components against the oracle: equal counts of
/// nontrivial double cosets, each nontrivial component in its own nontrivial
/// bucket, and identical membership of every reduced word of length at most
/// `max_len` in each component's intersection. Agreement is only meaningful
/// when `resolved` holds.
pub fn oracle_agrees(gu: &StallingsGraph, gv: &StallingsGraph, max_len: usize) -> Result<OracleSummary> {
    let comps = pullback(gu, gv)?;
    let oracle = oracle_double_cosets(gu, gv, max_len)?;
    let nontrivial: Vec<&DoubleCosetComponent> = comps.iter().filter(|c| !c.degenerate).collect();
    let buckets = nontrivial
        .iter()
        .map(|c| oracle.bucket_of(&c.representative))
        .collect::<Result<Vec<_>>>()?;
    let resolved = buckets.iter().all(Option::is_some);
    let mut agree = nontrivial.len() == oracle.nontrivial_count();
    let mut seen = Vec::new();
    let all = reduced_words(gu.alphabet(), max_len);
    for (c, b) in nontrivial.iter().zip(buckets) {
        if !agree {
            break;
        }
        match b {
            Some(b) if oracle.buckets[b].is_nontrivial() && !seen.contains(&b) => seen.push(b),
            _ => agree = false,
        }
        let t = &c.representative;
        agree &= all
            .iter()
            .all(|w| c.intersection.contains(w) == (gu.contains(w) && gv.contains(&w.conjugate_by(t))));
    }
    Ok(OracleSummary {
        max_len,
        nontrivial_buckets: oracle.nontrivial_count(),
        nontrivial_components: nontrivial.len(),
        resolved,
        agree,
    })
}

fn run_instance(config: &BatchConfig, index: usize, alphabet: Alphabet) -> Result<BatchRecord> {
    let (u, v) = config.instance(index);
    let start = Instant::now();
    let gu = StallingsGraph::from_generators(&u, alphabet)?;
    let gv = StallingsGraph::from_generators(&v, alphabet)?;
    let report = ghnc_check_graphs(&gu, &gv)?;
    let elapsed_us = start.elapsed().as_micros() as u64;
    let oracle = match &config.oracle {
        Some(o) if o.enabled => Some(oracle_agrees(&gu, &gv, o.max_len)?),
        _ => None,
    };
    let fmt = |ws: &[Word]| ws.iter().map(|w| alphabet.format(w.letters())).collect();
    Ok(BatchRecord {
        index,
        seed: config.seed ^ index as u64,
        u: fmt(&u),
        v: fmt(&v),
        u_rank: report.u_rank,
        v_rank: report.v_rank,
        lhs: report.lhs,
        rhs: report.rhs,
        holds: report.holds,
        classical_lhs: report.classical_lhs,
        classical_rhs: report.classical_rhs,
        classical_holds: report.classical_holds,
        components: report.components.len(),
        oracle,
        elapsed_us,
    })
}

#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub records: Vec<BatchRecord>,
    pub aggregate: Aggregate,
}

/// Runs every instance, in parallel on up to `threads` threads (all cores
/// when `None`), and writes the records in index order to `config.out`.
pub fn batch_run(config: &BatchConfig, threads: Option<usize>) -> Result<BatchOutcome> {
    config.validate()?;
    let alphabet = Alphabet::new(config.ambient_rank)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        (0..config.instances)
            .into_par_iter()
            .map(|i| run_instance(config, i, alphabet))
            .collect::<Result<Vec<_>>>()
    })?;
    if let Some(path) = &config.out {
        write_jsonl(path, &records)?;
    }
    let aggregate = Aggregate::from_records(&records);
    Ok(BatchOutcome { records, aggregate })
}

fn write_jsonl(path: &Path, records: &[BatchRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(r: usize) -> Alphabet {
        Alphabet::new(r).unwrap()
    }

    fn words(ws: &[&str], r: usize) -> Vec<Word> {
        ws.iter().map(|w| alpha(r).parse_word(w).unwrap()).collect()
    }

    fn graph(ws: &[&str], r: usize) -> StallingsGraph {
        StallingsGraph::from_generators(&words(ws, r), alpha(r)).unwrap()
    }

    #[test]
    fn check_examples() {
        let r = ghnc_check(&words(&["a", "b"], 2), &words(&["a", "b"], 2), alpha(2)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (1, 1, true));
        assert!(r.is_equality());
        let r = ghnc_check(&words(&["a"], 2), &words(&["b"], 2), alpha(2)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0, 0, true));
        let r = ghnc_check(&[], &words(&["a", "b"], 2), alpha(2)).unwrap();
        assert_eq!((r.lhs, r.rhs), (0, 0));
        assert!(classical_hn_check(&words(&["a"], 2), &words(&["a"], 2), alpha(2)).unwrap());
        assert!(ghnc_check(&words(&["a"], 1), &words(&["a"], 1), alpha(2)).is_ok());
    }

    #[test]
    fn a2b_a3b() {
        let (u, v) = (graph(&["aa", "b"], 2), graph(&["aaa", "b"], 2));
        let r = ghnc_check_graphs(&u, &v).unwrap();
        assert!(r.holds && r.classical_holds);
        let s = oracle_agrees(&u, &v, 8).unwrap();
        assert!(s.agree, "{s:?}");
        assert_eq!(s.nontrivial_components, r.components.iter().filter(|c| !c.degenerate).count());
    }

    #[test]
    fn oracle_examples() {
        let a = graph(&["a"], 2);
        let o = oracle_double_cosets(&a, &a, 4).unwrap();
        assert_eq!(o.nontrivial_count(), 1);
        let nontrivial: Vec<_> = o.buckets.iter().filter(|b| b.is_nontrivial()).collect();
        assert!(nontrivial[0].representative.is_identity());
        let reps: Vec<String> = o.buckets.iter().take(3).map(|b| b.representative.to_string()).collect();
        assert_eq!(reps, ["1", "b", "B"]);

        let f = StallingsGraph::rose(alpha(2));
        assert_eq!(oracle_double_cosets(&f, &f, 2).unwrap().buckets.len(), 1);
    }

    #[test]
    fn double_coset_keys() {
        let (u, v) = (graph(&["aa", "b"], 2), graph(&["aaa", "b"], 2));
        let w = |s: &str| alpha(2).parse_word(s).unwrap();
        let k = |s: &str| DoubleCosetKey::new(&u, &v, &w(s)).unwrap();
        // a = a⁻²·a³ and b ∈ U, so both lie in U·V
        assert_eq!(k("a"), k(""));
        assert_eq!(k("b"), k(""));
        let uv = DoubleCoset::new(&u, &v, &Word::identity()).unwrap();
        assert!(uv.contains(&w("a")));
        assert!(uv.contains(&w("bAAAb")));
        // ⟨U, V⟩ = F₂ admits abab, but no u·v spells it
        assert!(uv.key().admits(&w("abab")));
        assert!(!uv.contains(&w("abab")));
    }

    #[test]
    fn double_coset_exact_where_key_is_coarse() {
        // ⟨U, V⟩ is all of F₂ but U·V is not
        let (u, v) = (graph(&["Abb", "babab"], 2), graph(&["b", "aa", "abbA"], 2));
        let w = |s: &str| alpha(2).parse_word(s).unwrap();
        let uv = DoubleCoset::new(&u, &v, &Word::identity()).unwrap();
        assert!(uv.key().admits(&w("BA")));
        assert!(!uv.contains(&w("BA")));
        for x in ["Abb", "b", "Abbb", "bababb"] {
            assert!(uv.contains(&w(x)), "{x}");
        }
        let o = oracle_double_cosets(&u, &v, 8).unwrap();
        assert_eq!(o.nontrivial_count(), 2);
        assert_ne!(o.bucket_of(&w("BA")).unwrap(), o.bucket_of(&w("")).unwrap());
    }

    #[test]
    fn reduced_word_enumeration() {
        let ws = reduced_words(alpha(2), 3);
        assert_eq!(ws.len(), 1 + 4 + 12 + 36);
        assert!(ws.windows(2).all(|p| p[0].cmp_shortlex(&p[1]).is_lt()));
        let cw = closed_words(&graph(&["aa", "b"], 2), 3);
        let names: Vec<String> = cw.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["b", "B", "aa", "AA", "bb", "BB", "aab", "aaB", "AAb", "AAB", "baa", "bAA", "bbb", "Baa", "BAA", "BBB"]);
    }

    #[test]
    fn random_models() {
        let m = RandomModel {
            seed: 0,
            ambient_rank: 2,
            num_generators: 3,
            word_length: 8,
        };
        assert_eq!(random_subgroup(&m).unwrap(), random_subgroup(&m).unwrap());
        let none = RandomModel {
            num_generators: 0,
            ..m
        };
        assert!(random_subgroup(&none).unwrap().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let w = random_reduced_word(&mut rng, 3, 7);
            assert_eq!(w.len(), 7);
        }
    }

    #[test]
    fn empty_batch() {
        let c = BatchConfig {
            seed: 1,
            instances: 0,
            ambient_rank: 2,
            max_generators: 3,
            max_word_length: 8,
            oracle: None,
            out: None,
        };
        let out = batch_run(&c, Some(1)).unwrap();
        assert_eq!(out.aggregate.instances, 0);
        assert!(!out.aggregate.has_violation());
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            BatchConfig::from_json(r#"{"seed":1,"instances":1,"ambient_rank":0,"max_generators":1,"max_word_length":1}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(BatchConfig::from_json("{"), Err(Error::Json(_))));
        assert!(BatchConfig::from_json(r#"{"seed":1,"instances":1,"ambient_rank":2,"max_generators":1,"max_word_length":1,"bogus":1}"#).is_err());
    }
}
