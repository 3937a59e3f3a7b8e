//! Instance transformations between colorful and uncolored counting, onto
//! random bipartite graphs, from k-OV and cliques, and detection via parity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{aut_count, Count, MAX_PATTERN_VERTICES};
use crate::error::{Error, Result};
use crate::graphs::{tensor_product, BipartiteGraph, ColoredInstance, Domain, PatternGraph, SimpleGraph};
use crate::oracle::{Oracle, PatternQuery};

/// The uncolored host graph on the vertices of the kept color classes,
/// vertex (i, u) numbered by its position among kept classes.
fn classes_graph(x: &ColoredInstance, keep: u64) -> SimpleGraph {
    let n = x.n();
    let kept: Vec<usize> = (0..x.pattern().k()).filter(|&i| keep >> i & 1 == 1).collect();
    let mut slot = vec![usize::MAX; x.pattern().k()];
    for (pos, &i) in kept.iter().enumerate() {
        slot[i] = pos;
    }
    let mut g = SimpleGraph::empty(kept.len() * n);
    for (e, &(i, j)) in x.pattern().edges().iter().enumerate() {
        if slot[i] == usize::MAX || slot[j] == usize::MAX {
            continue;
        }
        for u in 0..n {
            for v in 0..n {
                if x.get(e, u, v) != 0 {
                    g.add_edge(slot[i] * n + u, slot[j] * n + v);
                }
            }
        }
    }
    g
}

fn signed(total: i128, what: &str) -> Result<Count> {
    u128::try_from(total).map_err(|_| Error::Oracle(format!("{what}: oracle answers give a negative total")))
}

/// Colorful count from an uncolored embedding oracle by inclusion–exclusion
/// over color classes.
///
/// The alternating sum counts embeddings whose color map is a bijection of
/// V(H); such a map is an automorphism, and each automorphism class has
/// exactly embcol members, so the sum is |Aut(H)| · embcol.
pub fn embcol_via_emb<O>(x: &ColoredInstance, emb_oracle: &O) -> Result<Count>
where
    O: Oracle<PatternQuery, Answer = Count> + ?Sized,
{
    if !x.is_binary() {
        return Err(Error::Precondition("embcol_via_emb needs a binary instance".into()));
    }
    let h = x.pattern();
    let k = h.k();
    let mut total: i128 = 0;
    for keep in 0..(1u64 << k) {
        let query = PatternQuery { pattern: h.clone(), graph: classes_graph(x, keep) };
        let ans = emb_oracle.query(&query)? as i128;
        if (k - keep.count_ones() as usize).is_multiple_of(2) {
            total += ans;
        } else {
            total -= ans;
        }
    }
    let total = signed(total, "embcol_via_emb")?;
    let aut = aut_count(h)?;
    if total % aut != 0 {
        return Err(Error::Oracle("inclusion–exclusion total not divisible by |Aut(H)|".into()));
    }
    Ok(total / aut)
}

/// A partition of V(H) into independent sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndependentPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl IndependentPartition {
    /// H/π: one vertex per block, adjacent when some H-edge joins the blocks.
    pub fn quotient(&self, h: &PatternGraph) -> PatternGraph {
        let mut block_of = vec![0; h.k()];
        for (b, blk) in self.blocks.iter().enumerate() {
            for &v in blk {
                block_of[v] = b;
            }
        }
        PatternGraph::new(self.blocks.len(), h.edges().iter().map(|&(u, v)| (block_of[u], block_of[v])))
            .expect("independent blocks never create loops")
    }

    /// Π_B (|B| − 1)!
    pub fn factorial_weight(&self) -> Count {
        self.blocks.iter().map(|b| (1..b.len() as Count).product::<Count>()).product()
    }
}

/// All partitions of V(H) whose blocks are independent sets, each once.
pub fn enumerate_independent_partitions(h: &PatternGraph) -> Result<Vec<IndependentPartition>> {
    if h.k() > MAX_PATTERN_VERTICES {
        return Err(Error::Guard(format!("pattern has {} > {MAX_PATTERN_VERTICES} vertices", h.k())));
    }
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn go(v: usize, h: &PatternGraph, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<IndependentPartition>) {
        if v == h.k() {
            out.push(IndependentPartition { blocks: blocks.clone() });
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].iter().all(|&u| !h.has_edge(u, v)) {
                blocks[b].push(v);
                go(v + 1, h, blocks, out);
                blocks[b].pop();
            }
        }
        blocks.push(vec![v]);
        go(v + 1, h, blocks, out);
        blocks.pop();
    }
    go(0, h, &mut blocks, &mut out);
    Ok(out)
}

/// emb(H → G) = Σ_π (−1)^{|V(H)|−|π|} Π_B (|B|−1)! · hom(H/π → G).
pub fn lovasz_emb_via_hom<O>(h: &PatternGraph, g: &SimpleGraph, hom_oracle: &O) -> Result<Count>
where
    O: Oracle<PatternQuery, Answer = Count> + ?Sized,
{
    let mut total: i128 = 0;
    for pi in enumerate_independent_partitions(h)? {
        let hom = hom_oracle.query(&PatternQuery { pattern: pi.quotient(h), graph: g.clone() })?;
        let term = (pi.factorial_weight() * hom) as i128;
        if (h.k() - pi.blocks.len()).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    signed(total, "lovasz_emb_via_hom")
}

/// hom(H → G) = embcol(H → G × H), one oracle call.
pub fn hom_via_embcol<O>(h: &PatternGraph, g: &SimpleGraph, embcol_oracle: &O) -> Result<Count>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
{
    embcol_oracle.query(&tensor_product(g, h))
}

/// Embed a colorful K_{c,d} instance into a colorful K_{a,b} instance with the
/// same count. Each added class gets one live vertex (index 0) joined to every
/// vertex of every opposite class.
pub fn pad_kcd_to_kab(x: &ColoredInstance, a: usize, b: usize) -> Result<ColoredInstance> {
    let (c, d) = x
        .pattern()
        .as_biclique()
        .ok_or_else(|| Error::Precondition("padding needs a K_{c,d} instance in canonical layout".into()))?;
    if c > a || d > b {
        return Err(Error::Precondition(format!("cannot pad K_{{{c},{d}}} into K_{{{a},{b}}}")));
    }
    let n = x.n();
    if n == 0 {
        return Err(Error::Precondition("empty instance".into()));
    }
    let target = PatternGraph::biclique(a, b);
    let mut out = ColoredInstance::zeros(target.clone(), n, x.domain());
    for (e, &(i, jj)) in target.edges().iter().enumerate() {
        let j = jj - a;
        let block = out.block_mut(e);
        match (i < c, j < d) {
            (true, true) => {
                let src = x.pattern().edge_index(i, c + j).expect("edge of K_{c,d}");
                block.copy_from_slice(x.block(src));
            }
            (false, true) => block[..n].fill(1),
            (true, false) => {
                for u in 0..n {
                    block[u * n] = 1;
                }
            }
            (false, false) => block[0] = 1,
        }
    }
    Ok(out)
}

/// emb(K_{a,b} → G) from a colorful K_{a,b} oracle alone: the Lovász sum over
/// quotients K_{c,d}, each hom evaluated as a colorful count on G × K_{c,d}
/// padded up to K_{a,b}.
pub fn emb_kab_via_colorful_kab<O>(a: usize, b: usize, g: &SimpleGraph, kab_oracle: &O) -> Result<Count>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
{
    let h = PatternGraph::biclique(a, b);
    let hom = crate::oracle::FnOracle(|pq: &PatternQuery| {
        let (c, d) = pq
            .pattern
            .biclique_shape()
            .ok_or_else(|| Error::Precondition("quotient of a biclique is not a biclique".into()))?;
        let padded = pad_kcd_to_kab(&tensor_product(&pq.graph, &PatternGraph::biclique(c, d)), a, b)?;
        kab_oracle.query(&padded)
    });
    lovasz_emb_via_hom(&h, g, &hom)
}

/// Colorful K_{a,b} count from an oracle for emb(K_{a,b} → ·) on bipartite
/// graphs, by inclusion–exclusion over deleted color classes.
pub fn embcol_kab_via_bipartite<O>(x: &ColoredInstance, kab_oracle: &O) -> Result<Count>
where
    O: Oracle<BipartiteGraph, Answer = Count> + ?Sized,
{
    let (a, b) = x
        .pattern()
        .as_biclique()
        .ok_or_else(|| Error::Precondition("needs a K_{a,b} instance in canonical layout".into()))?;
    if !x.is_binary() {
        return Err(Error::Precondition("needs a binary instance".into()));
    }
    let aut = aut_count(x.pattern())?;
    let n = x.n();
    let k = a + b;
    let mut total: i128 = 0;
    for dropped in 0..(1u64 << k) {
        let left: Vec<usize> = (0..a).filter(|&i| dropped >> i & 1 == 0).collect();
        let right: Vec<usize> = (a..k).filter(|&j| dropped >> j & 1 == 0).collect();
        let mut g = BipartiteGraph::empty(left.len() * n, right.len() * n);
        for (li, &i) in left.iter().enumerate() {
            for (ri, &j) in right.iter().enumerate() {
                let e = x.pattern().edge_index(i, j).expect("K_{a,b} edge");
                for u in 0..n {
                    for v in 0..n {
                        if x.get(e, u, v) != 0 {
                            g.set_edge(li * n + u, ri * n + v, true);
                        }
                    }
                }
            }
        }
        let emb = kab_oracle.query(&g)?;
        if emb % aut != 0 {
            return Err(Error::Oracle("embedding count not divisible by |Aut(K_{a,b})|".into()));
        }
        let subgraphs = (emb / aut) as i128;
        if dropped.count_ones() % 2 == 0 {
            total += subgraphs;
        } else {
            total -= subgraphs;
        }
    }
    signed(total, "embcol_kab_via_bipartite")
}

/// k sets of d-bit vectors; coordinate t of a vector is bit t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    pub k: usize,
    pub d: usize,
    pub sets: Vec<Vec<u64>>,
    pub block_size: usize,
}

#[derive(Serialize, Deserialize)]
struct OvRepr {
    k: usize,
    d: usize,
    sets: Vec<Vec<String>>,
    block_size: usize,
}

impl OvInstance {
    pub fn new(k: usize, d: usize, sets: Vec<Vec<u64>>, block_size: usize) -> Result<Self> {
        if sets.len() != k || k == 0 {
            return Err(Error::Malformed(format!("expected {k} sets, got {}", sets.len())));
        }
        if d == 0 || d > 63 || block_size == 0 || block_size > d {
            return Err(Error::Malformed(format!("need 1 <= block_size <= d <= 63, got s={block_size}, d={d}")));
        }
        let n = sets[0].len();
        if sets.iter().any(|s| s.len() != n) {
            return Err(Error::Malformed("all sets must hold the same number of vectors".into()));
        }
        if sets.iter().flatten().any(|&v| v >> d != 0) {
            return Err(Error::Malformed("vector longer than d".into()));
        }
        Ok(OvInstance { k, d, sets, block_size })
    }

    pub fn n(&self) -> usize {
        self.sets[0].len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: OvRepr = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("OV JSON: {e}")))?;
        let parse = |s: &String| -> Result<u64> {
            if s.len() != r.d {
                return Err(Error::Malformed(format!("vector {s:?} is not {} bits", r.d)));
            }
            s.chars().enumerate().try_fold(0u64, |acc, (t, ch)| match ch {
                '0' => Ok(acc),
                '1' => Ok(acc | 1 << t),
                _ => Err(Error::Malformed(format!("bad bit {ch:?} in {s:?}"))),
            })
        };
        let sets = r.sets.iter().map(|set| set.iter().map(parse).collect()).collect::<Result<_>>()?;
        OvInstance::new(r.k, r.d, sets, r.block_size)
    }

    pub fn to_json(&self) -> String {
        let show = |v: u64| (0..self.d).map(|t| if v >> t & 1 == 1 { '1' } else { '0' }).collect::<String>();
        let r = OvRepr {
            k: self.k,
            d: self.d,
            sets: self.sets.iter().map(|s| s.iter().map(|&v| show(v)).collect()).collect(),
            block_size: self.block_size,
        };
        serde_json::to_string(&r).expect("OV serializes")
    }

    /// Coordinate ranges P_0..P_{C−1}; the last one may be short.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        (0..self.d).step_by(self.block_size).map(|lo| (lo, (lo + self.block_size).min(self.d))).collect()
    }

    /// Brute force: some tuple with empty common support.
    pub fn has_orthogonal_tuple(&self) -> bool {
        fn go(i: usize, acc: u64, sets: &[Vec<u64>]) -> bool {
            if i == sets.len() {
                return acc == 0;
            }
            sets[i].iter().any(|&v| go(i + 1, acc & v, sets))
        }
        go(0, u64::MAX, &self.sets)
    }
}

/// Output of the k-OV construction.
#[derive(Clone, Debug)]
pub struct KovReduction {
    pub instance: ColoredInstance,
    /// Live vertices: kn vector vertices plus the materialised block tuples.
    pub vertex_count: usize,
    pub tuple_counts: Vec<usize>,
}

const MAX_TUPLE_BITS: usize = 16;
const MAX_KOV_SLOTS: usize = 50_000_000;

/// k-OV → colorful K_{k,C} detection. Classes 0..k hold one vertex per vector
/// of A_i; class k+j holds every k-tuple of subsets of P_j with empty common
/// intersection, adjacent to vector a ∈ A_i iff a ∩ P_j equals the tuple's
/// i-th entry.
pub fn kov_to_colorful_kab(ov: &OvInstance) -> Result<KovReduction> {
    let blocks = ov.blocks();
    let c = blocks.len();
    let k = ov.k;
    let mut tuples: Vec<Vec<Vec<u64>>> = Vec::with_capacity(c);
    for &(lo, hi) in &blocks {
        let s = hi - lo;
        if s * k > MAX_TUPLE_BITS {
            return Err(Error::Guard(format!("2^{} candidate tuples per block", s * k)));
        }
        let mut valid = Vec::new();
        for code in 0u64..(1 << (s * k)) {
            let entries: Vec<u64> = (0..k).map(|i| ((code >> (i * s)) & ((1 << s) - 1)) << lo).collect();
            if entries.iter().fold(u64::MAX, |acc, &y| acc & y) == 0 {
                valid.push(entries);
            }
        }
        tuples.push(valid);
    }
    let tuple_counts: Vec<usize> = tuples.iter().map(Vec::len).collect();
    let size = tuple_counts.iter().copied().chain([ov.n(), 1]).max().unwrap_or(1);
    let pattern = PatternGraph::biclique(k, c);
    if pattern.num_edges() * size * size > MAX_KOV_SLOTS {
        return Err(Error::Guard(format!("{} edge slots", pattern.num_edges() * size * size)));
    }
    let vertex_count = k * ov.n() + tuple_counts.iter().sum::<usize>();
    let mut x = ColoredInstance::zeros(pattern.clone(), size, Domain::Binary);
    if tuple_counts.contains(&0) {
        return Ok(KovReduction { instance: x, vertex_count, tuple_counts });
    }
    for i in 0..k {
        for (j, &(lo, hi)) in blocks.iter().enumerate() {
            let mask = ((1u64 << (hi - lo)) - 1) << lo;
            let e = pattern.edge_index(i, k + j).expect("K_{k,C} edge");
            for (a_idx, &a) in ov.sets[i].iter().enumerate() {
                for (z, tuple) in tuples[j].iter().enumerate() {
                    if a & mask == tuple[i] {
                        x.set(e, a_idx, z, 1);
                    }
                }
            }
        }
    }
    Ok(KovReduction { instance: x, vertex_count, tuple_counts })
}

/// K_a in g → colorful K_{a,a}. Left class i and right class a+k are both
/// copies of V(g); (i, j) ~ (a+k, l) iff i = k and j = l, or i ≠ k and
/// {j, l} ∈ E(g).
pub fn ka_to_kaa(g: &SimpleGraph, a: usize) -> Result<ColoredInstance> {
    if a < 2 {
        return Err(Error::Precondition(format!("need a >= 2, got {a}")));
    }
    let n = g.n();
    let pattern = PatternGraph::biclique(a, a);
    let mut x = ColoredInstance::zeros(pattern.clone(), n, Domain::Binary);
    for (e, &(i, kk)) in pattern.edges().iter().enumerate() {
        let k = kk - a;
        for j in 0..n {
            for l in 0..n {
                let on = if i == k { j == l } else { g.has_edge(j, l) };
                x.set(e, j, l, on as u64);
            }
        }
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Detection {
    Yes,
    No,
}

/// m = 100 · 2^{|E(H)|}.
pub fn default_parity_trials(h: &PatternGraph) -> u64 {
    100u64 << h.num_edges().min(40)
}

/// H-subgraph detection from a parity oracle: query the parity on `trials`
/// uniformly random edge subsets of g and answer YES if any is odd.
pub fn detect_via_parity<O, R>(g: &SimpleGraph, parity_oracle: &O, trials: u64, rng: &mut R) -> Result<Detection>
where
    O: Oracle<SimpleGraph, Answer = bool> + ?Sized,
    R: Rng + ?Sized,
{
    let edges = g.edges();
    for _ in 0..trials {
        let mut sub = SimpleGraph::empty(g.n());
        for &(u, v) in &edges {
            if rng.gen_bool(0.5) {
                sub.add_edge(u, v);
            }
        }
        if parity_oracle.query(&sub)? {
            return Ok(Detection::Yes);
        }
    }
    Ok(Detection::No)
}
