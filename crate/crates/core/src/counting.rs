//! Exact counters: embeddings, homomorphisms, colorful embeddings, the
//! EMBCOLPOLY evaluator, automorphisms, parities and a matrix-product K_{a,b}
//! counter.

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeModulus};
use crate::graphs::{ColoredInstance, PatternGraph, SimpleGraph};

pub type Count = u128;

pub const MAX_PATTERN_VERTICES: usize = 8;
pub const MAX_ENUMERATION: u128 = 100_000_000;
const MAX_SUBSET_ROWS: u128 = 1 << 14;

fn guard_pattern(h: &PatternGraph) -> Result<()> {
    if h.k() > MAX_PATTERN_VERTICES {
        return Err(Error::Guard(format!("pattern has {} > {MAX_PATTERN_VERTICES} vertices", h.k())));
    }
    Ok(())
}

fn guard_enumeration(x: &ColoredInstance) -> Result<()> {
    guard_pattern(x.pattern())?;
    let total = (x.n() as u128).checked_pow(x.pattern().k() as u32);
    if total.is_none_or(|t| t > MAX_ENUMERATION) {
        return Err(Error::Guard(format!("{}^{} tuples exceed {MAX_ENUMERATION}", x.n(), x.pattern().k())));
    }
    Ok(())
}

/// For pattern vertex i, the edges (j, i) with j < i, as (block, j).
fn back_edges(h: &PatternGraph) -> Vec<Vec<(usize, usize)>> {
    let mut back = vec![Vec::new(); h.k()];
    for (e, &(j, i)) in h.edges().iter().enumerate() {
        back[i].push((e, j));
    }
    back
}

fn map_count(h: &PatternGraph, g: &SimpleGraph, injective: bool) -> Result<Count> {
    guard_pattern(h)?;
    let adj: Vec<Vec<usize>> = (0..h.k()).map(|i| (0..i).filter(|&j| h.has_edge(i, j)).collect()).collect();
    let mut image = vec![0usize; h.k()];
    fn go(i: usize, adj: &[Vec<usize>], g: &SimpleGraph, injective: bool, image: &mut [usize]) -> Count {
        if i == adj.len() {
            return 1;
        }
        let mut total = 0;
        'cand: for v in 0..g.n() {
            if injective && image[..i].contains(&v) {
                continue;
            }
            for &j in &adj[i] {
                if !g.has_edge(image[j], v) {
                    continue 'cand;
                }
            }
            image[i] = v;
            total += go(i + 1, adj, g, injective, image);
        }
        total
    }
    Ok(go(0, &adj, g, injective, &mut image))
}

/// Number of injective homomorphisms H → G.
pub fn emb_count(h: &PatternGraph, g: &SimpleGraph) -> Result<Count> {
    map_count(h, g, true)
}

/// Number of homomorphisms H → G.
pub fn hom_count(h: &PatternGraph, g: &SimpleGraph) -> Result<Count> {
    map_count(h, g, false)
}

/// |Aut(H)|, i.e. emb(H → H).
pub fn aut_count(h: &PatternGraph) -> Result<Count> {
    emb_count(h, &h.to_simple())
}

/// Number of H-subgraphs of G.
pub fn subgraph_count(h: &PatternGraph, g: &SimpleGraph) -> Result<Count> {
    Ok(emb_count(h, g)? / aut_count(h)?)
}

/// Colorful embedding count of a binary instance.
pub fn embcol_count(x: &ColoredInstance) -> Result<Count> {
    if !x.is_binary() {
        return Err(Error::Precondition("embcol_count needs a binary instance".into()));
    }
    guard_enumeration(x)?;
    let back = back_edges(x.pattern());
    let n = x.n();
    let mut choice = vec![0usize; x.pattern().k()];
    fn go(i: usize, x: &ColoredInstance, back: &[Vec<(usize, usize)>], n: usize, choice: &mut [usize]) -> Count {
        if i == back.len() {
            return 1;
        }
        let mut total = 0;
        'cand: for u in 0..n {
            for &(e, j) in &back[i] {
                if x.block(e)[choice[j] * n + u] == 0 {
                    continue 'cand;
                }
            }
            choice[i] = u;
            total += go(i + 1, x, back, n, choice);
        }
        total
    }
    Ok(go(0, x, &back, n, &mut choice))
}

/// EMBCOLPOLY over F_q: the sum over color-respecting tuples of the product
/// of the weights on the pattern's edges. Binary instances need `q`.
pub fn embcolpoly_eval(x: &ColoredInstance, q: Option<PrimeModulus>) -> Result<FieldElem> {
    let q = x
        .modulus()
        .or(q)
        .ok_or_else(|| Error::Precondition("binary instance needs an explicit modulus".into()))?;
    guard_enumeration(x)?;
    let back = back_edges(x.pattern());
    let n = x.n();
    let mut choice = vec![0usize; x.pattern().k()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        acc: FieldElem,
        x: &ColoredInstance,
        q: PrimeModulus,
        back: &[Vec<(usize, usize)>],
        n: usize,
        choice: &mut [usize],
    ) -> FieldElem {
        if i == back.len() {
            return acc;
        }
        let mut total = FieldElem::ZERO;
        for u in 0..n {
            let mut p = acc;
            for &(e, j) in &back[i] {
                p = q.mul(p, q.elem(x.block(e)[choice[j] * n + u]));
                if p.is_zero() {
                    break;
                }
            }
            if p.is_zero() {
                continue;
            }
            choice[i] = u;
            total = q.add(total, go(i + 1, p, x, q, back, n, choice));
        }
        total
    }
    Ok(go(0, FieldElem::ONE, x, q, &back, n, &mut choice))
}

/// What a parity is taken of.
#[derive(Clone, Copy, Debug)]
pub enum ParityTarget<'a> {
    Emb(&'a PatternGraph, &'a SimpleGraph),
    Embcol(&'a ColoredInstance),
    Subgraph(&'a PatternGraph, &'a SimpleGraph),
}

pub fn parity_count(target: ParityTarget<'_>) -> Result<bool> {
    let c = match target {
        ParityTarget::Emb(h, g) => emb_count(h, g)?,
        ParityTarget::Embcol(x) => embcol_count(x)?,
        ParityTarget::Subgraph(h, g) => subgraph_count(h, g)?,
    };
    Ok(c % 2 == 1)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank of a k-subset (bitmask) in colex order.
pub fn colex_rank(mask: u64) -> u128 {
    let mut rank = 0;
    let mut i = 0u128;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as u128;
        i += 1;
        rank += binomial(v, i);
        m &= m - 1;
    }
    rank
}

/// Inverse of [`colex_rank`] for subsets of size `k`.
pub fn colex_unrank(mut rank: u128, k: u32) -> u64 {
    let mut mask = 0u64;
    for i in (1..=k as u128).rev() {
        let mut v = i - 1;
        while binomial(v + 1, i) <= rank {
            v += 1;
        }
        rank -= binomial(v, i);
        mask |= 1 << v;
    }
    mask
}

/// Number of K_{a,b} subgraphs of g (2 ≤ a ≤ b) from common-neighbourhood
/// counts W = B·Bᵀ, where B has one row per ⌊a/2⌋-subset (colex order) and
/// B[S][v] = 1 iff v is adjacent to all of S.
///
/// Every K_{a,b} with left side L is seen once per ordered split of L into
/// two halves (and, for odd a, per choice of the extra vertex u ∈ L), and
/// twice as often when a = b since either side can play L.
pub fn count_kab_fast(a: usize, b: usize, g: &SimpleGraph) -> Result<Count> {
    if a < 2 || b < a {
        return Err(Error::Precondition(format!("need 2 <= a <= b, got a={a}, b={b}")));
    }
    let n = g.n();
    if n > 64 {
        return Err(Error::Guard("count_kab_fast supports at most 64 vertices".into()));
    }
    let half = a / 2;
    let rows = binomial(n as u128, half as u128);
    if rows > MAX_SUBSET_ROWS {
        return Err(Error::Guard(format!("{rows} subset rows exceed {MAX_SUBSET_ROWS}")));
    }
    let subsets: Vec<u64> = (0..rows).map(|r| colex_unrank(r, half as u32)).collect();
    let nbr_mask: Vec<u64> = (0..n).map(|v| g.neighbors(v).fold(0u64, |m, u| m | (1 << u))).collect();
    let bmat: Vec<Vec<u8>> = subsets
        .iter()
        .map(|&s| (0..n).map(|v| (nbr_mask[v] & s == s) as u8).collect())
        .collect();
    let bn = b as u128;
    let mut total: u128 = 0;
    let mut divisor = binomial(2 * half as u128, half as u128);
    if a.is_multiple_of(2) {
        let w = gram(&bmat, None);
        accumulate(&subsets, &w, 0, bn, &mut total)?;
    } else {
        divisor *= a as u128;
        for u in 0..n {
            let w = gram(&bmat, Some(&nbr_mask_row(nbr_mask[u], n)));
            accumulate(&subsets, &w, 1 << u, bn, &mut total)?;
        }
    }
    if a == b {
        divisor *= 2;
    }
    debug_assert_eq!(total % divisor, 0);
    Ok(total / divisor)
}

fn nbr_mask_row(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|v| ((mask >> v) & 1) as u8).collect()
}

fn accumulate(subsets: &[u64], w: &[Vec<u32>], exclude: u64, b: u128, total: &mut u128) -> Result<()> {
    for (i, &s1) in subsets.iter().enumerate() {
        if s1 & exclude != 0 {
            continue;
        }
        for (j, &s2) in subsets.iter().enumerate() {
            if s1 & s2 != 0 || s2 & exclude != 0 {
                continue;
            }
            *total = total
                .checked_add(binomial(w[i][j] as u128, b))
                .ok_or_else(|| Error::Guard("K_{a,b} count overflowed 128 bits".into()))?;
        }
    }
    Ok(())
}

const TILE: usize = 32;

/// B·diag(d)·Bᵀ with a tiled triple loop.
fn gram(bm: &[Vec<u8>], diag: Option<&[u8]>) -> Vec<Vec<u32>> {
    let r = bm.len();
    let n = bm.first().map_or(0, |row| row.len());
    let scaled: Vec<Vec<u8>> = match diag {
        Some(d) => bm.iter().map(|row| row.iter().zip(d).map(|(x, y)| x * y).collect()).collect(),
        None => bm.to_vec(),
    };
    let mut w = vec![vec![0u32; r]; r];
    for i0 in (0..r).step_by(TILE) {
        for j0 in (0..r).step_by(TILE) {
            for k0 in (0..n).step_by(TILE) {
                for i in i0..(i0 + TILE).min(r) {
                    for j in j0..(j0 + TILE).min(r) {
                        let mut acc = 0u32;
                        for k in k0..(k0 + TILE).min(n) {
                            acc += (scaled[i][k] & bm[j][k]) as u32;
                        }
                        w[i][j] += acc;
                    }
                }
            }
        }
    }
    w
}
