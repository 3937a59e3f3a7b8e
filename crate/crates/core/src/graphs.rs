//! Pattern graphs, host graphs, colored instances on K_n × H, generators and
//! structural operators.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeModulus};
use crate::rng::hash_words;

/// The fixed pattern H. Vertices double as colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct PatternGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<PatternRepr> for PatternGraph {
    type Error = Error;
    fn try_from(r: PatternRepr) -> Result<Self> {
        PatternGraph::new(r.k, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<PatternGraph> for PatternRepr {
    fn from(p: PatternGraph) -> Self {
        PatternRepr { k: p.k, edges: p.edges.iter().map(|&(i, j)| [i, j]).collect() }
    }
}

impl PatternGraph {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(k: usize, edges: I) -> Result<Self> {
        let mut es = Vec::new();
        for (a, b) in edges {
            if a == b || a >= k || b >= k {
                return Err(Error::Malformed(format!("bad pattern edge ({a},{b}) for k={k}")));
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        es.dedup();
        Ok(PatternGraph { k, edges: es })
    }

    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        PatternGraph { k, edges }
    }

    /// K_{a,b} with left vertices 0..a and right vertices a..a+b.
    pub fn biclique(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))).collect();
        PatternGraph { k: a + b, edges }
    }

    /// Parse a short name: `k3` is a triangle, `k22` or `k2,2` is K_{2,2}.
    pub fn parse(name: &str) -> Result<Self> {
        let body = name
            .strip_prefix('k')
            .or_else(|| name.strip_prefix('K'))
            .ok_or_else(|| Error::Malformed(format!("unknown pattern {name:?}")))?;
        let bad = || Error::Malformed(format!("unknown pattern {name:?}"));
        if let Some((a, b)) = body.split_once(',') {
            let a = a.parse().map_err(|_| bad())?;
            let b = b.parse().map_err(|_| bad())?;
            return Ok(PatternGraph::biclique(a, b));
        }
        let digits: Vec<usize> = body.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(bad)?;
        match digits.as_slice() {
            [a] if *a >= 1 => Ok(PatternGraph::complete(*a)),
            [a, b] if *a >= 1 && *b >= 1 => Ok(PatternGraph::biclique(*a, *b)),
            _ => Err(bad()),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// If this is exactly `biclique(a, b)` for some a, b ≥ 1, return (a, b).
    pub fn as_biclique(&self) -> Option<(usize, usize)> {
        (1..self.k).map(|a| (a, self.k - a)).find(|&(a, b)| *self == PatternGraph::biclique(a, b))
    }

    pub fn to_simple(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.k, self.edges.iter().copied()).expect("pattern edges are valid")
    }

    /// If the graph is complete bipartite under some labelling, its side
    /// sizes (smaller first).
    pub fn biclique_shape(&self) -> Option<(usize, usize)> {
        if self.k < 2 {
            return None;
        }
        let mut side = vec![None; self.k];
        side[0] = Some(false);
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for w in 0..self.k {
                if self.has_edge(u, w) {
                    match side[w] {
                        None => {
                            side[w] = side[u].map(|s: bool| !s);
                            stack.push(w);
                        }
                        Some(s) if Some(s) == side[u] => return None,
                        _ => {}
                    }
                }
            }
        }
        let sides: Option<Vec<bool>> = side.into_iter().collect();
        let sides = sides?;
        let left = sides.iter().filter(|&&s| !s).count();
        let right = self.k - left;
        if right == 0 || self.edges.len() != left * right {
            return None;
        }
        Some((left.min(right), left.max(right)))
    }
}

/// Undirected simple graph with a dense adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SimpleRepr", into = "SimpleRepr")]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SimpleRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<SimpleRepr> for SimpleGraph {
    type Error = Error;
    fn try_from(r: SimpleRepr) -> Result<Self> {
        SimpleGraph::from_edges(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<SimpleGraph> for SimpleRepr {
    fn from(g: SimpleGraph) -> Self {
        SimpleRepr { n: g.n, edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect() }
    }
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, adj: vec![false; n * n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = SimpleGraph::empty(n);
        for (u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::Malformed(format!("bad edge ({u},{v}) for n={n}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// G(n, p) with independent edges.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = false;
        self.adj[v * self.n + u] = false;
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(u, v))
    }

    /// Subgraph induced on `keep`, relabelled in the given order.
    pub fn induced(&self, keep: &[usize]) -> SimpleGraph {
        let mut g = SimpleGraph::empty(keep.len());
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }
}

/// Bipartite graph given by its left × right biadjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub n_left: usize,
    pub n_right: usize,
    adj: Vec<bool>,
}

impl BipartiteGraph {
    pub fn empty(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph { n_left, n_right, adj: vec![false; n_left * n_right] }
    }

    #[inline]
    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l * self.n_right + r]
    }

    pub fn set_edge(&mut self, l: usize, r: usize, on: bool) {
        self.adj[l * self.n_right + r] = on;
    }

    /// Left vertices become 0..n_left, right vertices follow.
    pub fn to_simple(&self) -> SimpleGraph {
        let mut g = SimpleGraph::empty(self.n_left + self.n_right);
        for l in 0..self.n_left {
            for r in 0..self.n_right {
                if self.has_edge(l, r) {
                    g.add_edge(l, self.n_left + r);
                }
            }
        }
        g
    }

    pub fn fingerprint(&self, salt: u64) -> u64 {
        hash_words(
            salt,
            [self.n_left as u64, self.n_right as u64].into_iter().chain(self.adj.iter().map(|&b| b as u64)),
        )
    }
}

/// Weights are either bits or elements of a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Binary,
    Field(PrimeModulus),
}

/// A weight assignment on the edge slots of K_n × H. Block `e` belongs to
/// pattern edge `edges[e] = (i, j)` with i < j; entry `u * n + v` weighs the
/// edge between (i, u) and (j, v).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredInstance {
    pattern: PatternGraph,
    n: usize,
    domain: Domain,
    blocks: Vec<Vec<u64>>,
}

impl ColoredInstance {
    pub fn zeros(pattern: PatternGraph, n: usize, domain: Domain) -> Self {
        let blocks = vec![vec![0; n * n]; pattern.num_edges()];
        ColoredInstance { pattern, n, domain, blocks }
    }

    pub fn from_blocks(pattern: PatternGraph, n: usize, domain: Domain, blocks: Vec<Vec<u64>>) -> Result<Self> {
        if blocks.len() != pattern.num_edges() || blocks.iter().any(|b| b.len() != n * n) {
            return Err(Error::Malformed("block count or shape does not match pattern".into()));
        }
        let bound = match domain {
            Domain::Binary => 2,
            Domain::Field(q) => q.q(),
        };
        if blocks.iter().flatten().any(|&w| w >= bound) {
            return Err(Error::Malformed("weight outside the instance domain".into()));
        }
        Ok(ColoredInstance { pattern, n, domain, blocks })
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_binary(&self) -> bool {
        self.domain == Domain::Binary
    }

    pub fn modulus(&self) -> Option<PrimeModulus> {
        match self.domain {
            Domain::Field(q) => Some(q),
            Domain::Binary => None,
        }
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    pub fn block(&self, e: usize) -> &[u64] {
        &self.blocks[e]
    }

    pub fn block_mut(&mut self, e: usize) -> &mut [u64] {
        &mut self.blocks[e]
    }

    #[inline]
    pub fn get(&self, e: usize, u: usize, v: usize) -> u64 {
        self.blocks[e][u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, e: usize, u: usize, v: usize, w: u64) {
        self.blocks[e][u * self.n + v] = w;
    }

    /// Weight of the slot between (i, u) and (j, v) in either orientation.
    pub fn weight(&self, i: usize, u: usize, j: usize, v: usize) -> Option<u64> {
        let e = self.pattern.edge_index(i, j)?;
        Some(if i < j { self.get(e, u, v) } else { self.get(e, v, u) })
    }

    /// Reinterpret the weights in F_q.
    pub fn to_field(&self, q: PrimeModulus) -> ColoredInstance {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&w| q.elem(w).value()).collect()).collect();
        ColoredInstance { pattern: self.pattern.clone(), n: self.n, domain: Domain::Field(q), blocks }
    }

    pub fn field_entry(&self, e: usize, u: usize, v: usize) -> FieldElem {
        let q = self.modulus().expect("field instance");
        q.elem(self.get(e, u, v))
    }

    /// Deterministic salted hash of the whole instance.
    pub fn fingerprint(&self, salt: u64) -> u64 {
        let dom = match self.domain {
            Domain::Binary => 0,
            Domain::Field(q) => q.q(),
        };
        let head = [self.pattern.k as u64, self.n as u64, dom];
        let edges = self.pattern.edges.iter().map(|&(i, j)| ((i as u64) << 32) | j as u64);
        if self.is_binary() {
            // pack bits so hashing binary instances stays cheap
            let packed = self.blocks.iter().flat_map(|b| {
                b.chunks(64).map(|c| c.iter().enumerate().fold(0u64, |acc, (s, &w)| acc | (w << s)))
            });
            hash_words(salt, head.into_iter().chain(edges).chain(packed))
        } else {
            hash_words(salt, head.into_iter().chain(edges).chain(self.blocks.iter().flatten().copied()))
        }
    }

    /// The half-size instance on edge set E_η: block (i, j) keeps the
    /// sub-block in row half η(i) and column half η(j).
    pub fn restrict_half(&self, eta: u64) -> Result<ColoredInstance> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::OddSize(self.n));
        }
        let h = self.n / 2;
        let mut out = ColoredInstance::zeros(self.pattern.clone(), h, self.domain);
        for (e, &(i, j)) in self.pattern.edges.iter().enumerate() {
            let ro = ((eta >> i) & 1) as usize * h;
            let co = ((eta >> j) & 1) as usize * h;
            for u in 0..h {
                for v in 0..h {
                    out.blocks[e][u * h + v] = self.get(e, ro + u, co + v);
                }
            }
        }
        Ok(out)
    }

    /// Embed into a larger class size; new slots are zero.
    pub fn pad_to(&self, size: usize) -> Result<ColoredInstance> {
        if size < self.n {
            return Err(Error::Precondition(format!("cannot pad size {} down to {size}", self.n)));
        }
        let mut out = ColoredInstance::zeros(self.pattern.clone(), size, self.domain);
        for e in 0..self.blocks.len() {
            for u in 0..self.n {
                for v in 0..self.n {
                    out.blocks[e][u * size + v] = self.get(e, u, v);
                }
            }
        }
        Ok(out)
    }

    pub fn pad_to_power_of_two(&self) -> ColoredInstance {
        let target = self.n.max(1).next_power_of_two();
        if target == self.n {
            self.clone()
        } else {
            self.pad_to(target).expect("padding grows the instance")
        }
    }

    /// Entrywise XOR of two binary instances of the same shape.
    pub fn xor(&self, other: &ColoredInstance) -> Result<ColoredInstance> {
        if !self.is_binary() || !other.is_binary() || self.n != other.n || self.pattern != other.pattern {
            return Err(Error::Precondition("xor needs binary instances of equal shape".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x ^ y).collect())
            .collect();
        Ok(ColoredInstance { pattern: self.pattern.clone(), n: self.n, domain: Domain::Binary, blocks })
    }

    /// Read the instance JSON format.
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let repr: InstanceRepr =
            serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(format!("instance JSON: {e}")))?;
        repr.try_into()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(InstanceRepr::from(self)).expect("instance serializes")
    }
}

impl Serialize for ColoredInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        InstanceRepr::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    pattern: PatternGraph,
    n: usize,
    q: String,
    blocks: BTreeMap<String, Vec<Vec<Weight>>>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Weight {
    Int(u64),
    #[serde(with = "decimal")]
    Str(u64),
}

mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};
    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Weight {
    fn value(self) -> u64 {
        match self {
            Weight::Int(v) | Weight::Str(v) => v,
        }
    }
}

impl From<&ColoredInstance> for InstanceRepr {
    fn from(x: &ColoredInstance) -> Self {
        let (q, wrap): (String, fn(u64) -> Weight) = match x.domain {
            Domain::Binary => ("binary".into(), Weight::Int),
            Domain::Field(q) => (q.to_string(), Weight::Str),
        };
        let blocks = x
            .pattern
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| {
                let rows = (0..x.n).map(|u| (0..x.n).map(|v| wrap(x.get(e, u, v))).collect()).collect();
                (format!("{i}-{j}"), rows)
            })
            .collect();
        InstanceRepr { pattern: x.pattern.clone(), n: x.n, q, blocks }
    }
}

impl TryFrom<InstanceRepr> for ColoredInstance {
    type Error = Error;
    fn try_from(r: InstanceRepr) -> Result<Self> {
        let domain = if r.q == "binary" {
            Domain::Binary
        } else {
            let q: u64 = r.q.parse().map_err(|_| Error::Malformed(format!("bad modulus {:?}", r.q)))?;
            Domain::Field(PrimeModulus::new(q)?)
        };
        let n = r.n;
        let mut blocks = Vec::with_capacity(r.pattern.num_edges());
        for &(i, j) in r.pattern.edges() {
            let rows = r
                .blocks
                .get(&format!("{i}-{j}"))
                .ok_or_else(|| Error::Malformed(format!("missing block {i}-{j}")))?;
            if rows.len() != n || rows.iter().any(|row| row.len() != n) {
                return Err(Error::Malformed(format!("block {i}-{j} is not {n}x{n}")));
            }
            blocks.push(rows.iter().flatten().map(|w| w.value()).collect());
        }
        if r.blocks.len() != blocks.len() {
            return Err(Error::Malformed("blocks present for non-edges of the pattern".into()));
        }
        ColoredInstance::from_blocks(r.pattern, n, domain, blocks)
    }
}

/// Uniform binary instance: every slot an independent fair bit.
pub fn rand_colored<R: Rng + ?Sized>(pattern: &PatternGraph, n: usize, rng: &mut R) -> ColoredInstance {
    let mut x = ColoredInstance::zeros(pattern.clone(), n, Domain::Binary);
    for b in x.blocks.iter_mut() {
        for w in b.iter_mut() {
            *w = rng.gen_range(0..2);
        }
    }
    x
}

/// Number of structured families cycled by [`structured_instance`].
pub const STRUCTURED_FAMILIES: usize = 8;

/// Worst-case style binary inputs far from the uniform distribution, family
/// `index mod 8`: empty, full, diagonal, one corner slot, sparse (p = 0.1),
/// dense (p = 0.9), checkerboard, top half full.
pub fn structured_instance<R: Rng + ?Sized>(pattern: &PatternGraph, n: usize, index: usize, rng: &mut R) -> ColoredInstance {
    let mut x = ColoredInstance::zeros(pattern.clone(), n, Domain::Binary);
    let family = index % STRUCTURED_FAMILIES;
    for b in x.blocks.iter_mut() {
        for (slot, w) in b.iter_mut().enumerate() {
            let (u, v) = (slot / n, slot % n);
            let on = match family {
                0 => false,
                1 => true,
                2 => u == v,
                3 => slot == 0,
                4 => rng.gen_bool(0.1),
                5 => rng.gen_bool(0.9),
                6 => (u + v) % 2 == 0,
                _ => 2 * u < n,
            };
            *w = on as u64;
        }
    }
    x
}

/// Uniform instance over F_q.
pub fn rand_field<R: Rng + ?Sized>(pattern: &PatternGraph, n: usize, q: PrimeModulus, rng: &mut R) -> ColoredInstance {
    let mut x = ColoredInstance::zeros(pattern.clone(), n, Domain::Field(q));
    for b in x.blocks.iter_mut() {
        for w in b.iter_mut() {
            *w = rng.gen_range(0..q.q());
        }
    }
    x
}

/// Random bipartite graph with α, β uniform in 1..=a and 1..=b and nα × nβ
/// fair-coin adjacency.
pub fn rand_bipartite<R: Rng + ?Sized>(a: usize, b: usize, n: usize, rng: &mut R) -> (usize, usize, BipartiteGraph) {
    let alpha = rng.gen_range(1..=a);
    let beta = rng.gen_range(1..=b);
    let mut g = BipartiteGraph::empty(n * alpha, n * beta);
    for w in g.adj.iter_mut() {
        *w = rng.gen_bool(0.5);
    }
    (alpha, beta, g)
}

/// G × H as a colored instance: slot ((i,u),(j,v)) is present iff uv ∈ E(G).
pub fn tensor_product(g: &SimpleGraph, h: &PatternGraph) -> ColoredInstance {
    let n = g.n();
    let mut x = ColoredInstance::zeros(h.clone(), n, Domain::Binary);
    for b in x.blocks.iter_mut() {
        for u in 0..n {
            for v in 0..n {
                b[u * n + v] = g.has_edge(u, v) as u64;
            }
        }
    }
    x
}

/// A graph read from a file: either an uncolored host graph or a colored instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphInput {
    Simple(SimpleGraph),
    Colored(ColoredInstance),
}

impl GraphInput {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("JSON: {e}")))?;
        if v.get("pattern").is_some() {
            Ok(GraphInput::Colored(ColoredInstance::from_json_value(&v)?))
        } else {
            serde_json::from_value(v).map(GraphInput::Simple).map_err(|e| Error::Malformed(format!("graph JSON: {e}")))
        }
    }
}

pub trait DisjointUnion: Sized {
    fn disjoint_union(items: &[Self]) -> Result<Self>;
}

impl DisjointUnion for SimpleGraph {
    fn disjoint_union(items: &[Self]) -> Result<Self> {
        let total = items.iter().map(|g| g.n).sum();
        let mut out = SimpleGraph::empty(total);
        let mut off = 0;
        for g in items {
            for (u, v) in g.edges() {
                out.add_edge(off + u, off + v);
            }
            off += g.n;
        }
        Ok(out)
    }
}

impl DisjointUnion for ColoredInstance {
    fn disjoint_union(items: &[Self]) -> Result<Self> {
        let first = items.first().ok_or_else(|| Error::Precondition("empty union".into()))?;
        if items.iter().any(|x| x.pattern != first.pattern || x.domain != first.domain) {
            return Err(Error::Heterogeneous);
        }
        let total: usize = items.iter().map(|x| x.n).sum();
        let mut out = ColoredInstance::zeros(first.pattern.clone(), total, first.domain);
        let mut off = 0;
        for x in items {
            for e in 0..x.blocks.len() {
                for u in 0..x.n {
                    for v in 0..x.n {
                        out.blocks[e][(off + u) * total + off + v] = x.get(e, u, v);
                    }
                }
            }
            off += x.n;
        }
        Ok(out)
    }
}

impl DisjointUnion for GraphInput {
    fn disjoint_union(items: &[Self]) -> Result<Self> {
        let simple: Option<Vec<SimpleGraph>> = items
            .iter()
            .map(|g| match g {
                GraphInput::Simple(s) => Some(s.clone()),
                GraphInput::Colored(_) => None,
            })
            .collect();
        if let Some(gs) = simple {
            return SimpleGraph::disjoint_union(&gs).map(GraphInput::Simple);
        }
        let colored: Option<Vec<ColoredInstance>> = items
            .iter()
            .map(|g| match g {
                GraphInput::Colored(c) => Some(c.clone()),
                GraphInput::Simple(_) => None,
            })
            .collect();
        colored
            .ok_or(Error::Heterogeneous)
            .and_then(|cs| ColoredInstance::disjoint_union(&cs))
            .map(GraphInput::Colored)
    }
}
