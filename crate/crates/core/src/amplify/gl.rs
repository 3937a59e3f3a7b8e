//! List decoding Π^{2k} from an oracle with a small advantage on ⊕_k Π.
//!
//! A 2k-bit vector r of weight k names the XOR of the answers at its set
//! positions, so the oracle gives noisy access to the Hadamard encoding of
//! the answer vector. Queries at r ⊕ e_l for pairwise independent r, each
//! paired with a guess of ⟨answers, r⟩ taken from advice bits, vote on
//! coordinate l.

use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::DistributionalProblem;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::rng::hash_words;

/// Largest advice length accepted; the vote table has 2k · 2^ℓ entries.
pub const MAX_SEEDS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlConfig {
    pub k: usize,
    pub epsilon: f64,
    /// Caps the votes per coordinate below the default.
    pub max_queries: Option<usize>,
}

impl GlConfig {
    pub fn new(k: usize, epsilon: f64) -> Self {
        GlConfig { k, epsilon, max_queries: None }
    }

    /// Smallest ℓ with 24k/ε² ≤ 2^ℓ.
    pub fn seed_count(&self) -> u32 {
        let m = 24.0 * self.k as f64 / (self.epsilon * self.epsilon);
        let mut ell = 0;
        while ((1u64 << ell) as f64) < m {
            ell += 1;
        }
        ell
    }

    /// 96 k^{1.5} / ε².
    pub fn nominal_queries(&self) -> usize {
        (96.0 * (self.k as f64).powf(1.5) / (self.epsilon * self.epsilon)).ceil() as usize
    }

    /// Votes per coordinate actually used: the nominal count, capped by the
    /// 2^ℓ − 1 distinct nonempty seed subsets and by `max_queries`.
    pub fn queries(&self) -> usize {
        let distinct = (1usize << self.seed_count()) - 1;
        let q = self.nominal_queries().min(distinct);
        self.max_queries.map_or(q, |cap| q.min(cap)).max(1)
    }
}

/// Decoder state shared by all candidates: the seeds s^(1..ℓ), the subsets
/// T_i, the derived vectors r^(i) = ⊕_{j∈T_i} s^(j), and a coin tape.
pub struct GlDecoder<'a, P, O> {
    problem: &'a P,
    oracle: O,
    k: usize,
    ell: u32,
    seeds: Vec<u64>,
    subsets: Vec<u64>,
    r_vectors: Vec<u64>,
    tape: u64,
}

pub fn gl_decode<'a, P, O>(oracle: O, problem: &'a P, cfg: &GlConfig, rng: &mut dyn RngCore) -> Result<GlDecoder<'a, P, O>>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
{
    if cfg.k == 0 || cfg.k > 32 {
        return Err(Error::Precondition(format!("k = {} outside 1..=32", cfg.k)));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5) {
        return Err(Error::Precondition(format!("advantage {} outside (0, 1/2]", cfg.epsilon)));
    }
    let ell = cfg.seed_count();
    if ell > MAX_SEEDS {
        return Err(Error::Guard(format!("2^{ell} advice strings")));
    }
    let width = 2 * cfg.k;
    let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    let seeds: Vec<u64> = (0..ell).map(|_| rng.gen::<u64>() & mask).collect();
    let subsets: Vec<u64> = (1..=cfg.queries() as u64).collect();
    let r_vectors = subsets.iter().map(|&t| subset_xor(&seeds, t)).collect();
    Ok(GlDecoder { problem, oracle, k: cfg.k, ell, seeds, subsets, r_vectors, tape: rng.gen() })
}

fn subset_xor(seeds: &[u64], t: u64) -> u64 {
    seeds.iter().enumerate().filter(|(j, _)| (t >> j) & 1 == 1).fold(0, |acc, (_, s)| acc ^ s)
}

fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

/// In-place Walsh–Hadamard transform: f̂(w) = Σ_T f(T)(−1)^{|w∧T|}.
fn fwht(f: &mut [i64]) {
    let mut h = 1;
    while h < f.len() {
        for i in (0..f.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (f[j], f[j + h]);
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl<'a, P, O> GlDecoder<'a, P, O>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
{
    pub fn seed_count(&self) -> u32 {
        self.ell
    }

    pub fn candidate_count(&self) -> usize {
        1 << self.ell
    }

    pub fn queries(&self) -> usize {
        self.subsets.len()
    }

    pub fn r_vectors(&self) -> &[u64] {
        &self.r_vectors
    }

    /// The advice that matches the true answers: bit j is ⟨Π(x), s^(j)⟩.
    pub fn true_advice(&self, xs: &[P::Instance]) -> Result<u64> {
        let answers = xs.iter().enumerate().try_fold(0u64, |acc, (l, x)| Ok(acc | (self.problem.truth(x)? as u64) << l))?;
        Ok(self.seeds.iter().enumerate().fold(0, |acc, (j, &s)| acc | (parity(answers & s) as u64) << j))
    }

    /// The XOR oracle on the sub-tuple selected by r when |r| = k, a tape
    /// coin otherwise.
    fn probe(&self, xs: &[P::Instance], fp: u64, r: u64) -> Result<bool> {
        if r.count_ones() as usize == self.k {
            let sub: Vec<P::Instance> = (0..2 * self.k).filter(|l| (r >> l) & 1 == 1).map(|l| xs[l].clone()).collect();
            self.oracle.query(&sub)
        } else {
            Ok(hash_words(self.tape, [fp, r]) & 1 == 1)
        }
    }

    /// probe(r^(i) ⊕ e_l) for every coordinate l and subset i, shared by all
    /// candidates.
    fn probes(&self, xs: &[P::Instance]) -> Result<Vec<Vec<bool>>> {
        if xs.len() != 2 * self.k {
            return Err(Error::Precondition(format!("expected a {}-tuple, got {}", 2 * self.k, xs.len())));
        }
        let fp = self.problem.tuple_fingerprint(xs, self.tape);
        (0..2 * self.k)
            .map(|l| self.r_vectors.iter().map(|&r| self.probe(xs, fp, r ^ (1 << l))).collect())
            .collect()
    }

    fn vote(&self, probes: &[bool], advice: u64) -> i64 {
        self.subsets.iter().zip(probes).map(|(&t, &o)| if o ^ parity(advice & t) { -1 } else { 1 }).sum()
    }

    /// The answers candidate `advice` gives on xs.
    pub fn decode_with(&self, xs: &[P::Instance], advice: u64) -> Result<Vec<bool>> {
        Ok(self.probes(xs)?.iter().map(|p| self.vote(p, advice) < 0).collect())
    }

    /// Vote totals for every advice string, one row per coordinate.
    pub fn vote_table(&self, xs: &[P::Instance]) -> Result<Vec<Vec<i64>>> {
        let probes = self.probes(xs)?;
        Ok(probes
            .iter()
            .map(|p| {
                let mut f = vec![0i64; 1 << self.ell];
                for (&t, &o) in self.subsets.iter().zip(p) {
                    f[t as usize] = if o { -1 } else { 1 };
                }
                fwht(&mut f);
                f
            })
            .collect())
    }

    /// Answers from the advice string with the `rank`-th largest total vote
    /// margin Σ_l |votes_l(w)| on xs.
    pub fn decode_ranked(&self, xs: &[P::Instance], rank: usize) -> Result<Vec<bool>> {
        let table = self.vote_table(xs)?;
        let mut order: Vec<(i64, usize)> = (0..1usize << self.ell)
            .map(|w| (-table.iter().map(|row| row[w].abs()).sum::<i64>(), w))
            .collect();
        order.sort_unstable();
        let w = order[rank.min(order.len() - 1)].1;
        Ok(table.iter().map(|row| row[w] < 0).collect())
    }

    pub fn candidates(self: &Arc<Self>) -> Vec<GlCandidate<'a, P, O>> {
        (0..self.candidate_count() as u64).map(|advice| GlCandidate { decoder: Arc::clone(self), advice }).collect()
    }

    pub fn ranked(self: &Arc<Self>, rank: usize) -> SpectralCandidate<'a, P, O> {
        SpectralCandidate { decoder: Arc::clone(self), rank }
    }
}

/// The candidate with fixed advice w.
pub struct GlCandidate<'a, P, O> {
    decoder: Arc<GlDecoder<'a, P, O>>,
    pub advice: u64,
}

impl<P, O> Oracle<[P::Instance]> for GlCandidate<'_, P, O>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
{
    type Answer = Vec<bool>;
    fn query(&self, xs: &[P::Instance]) -> Result<Vec<bool>> {
        self.decoder.decode_with(xs, self.advice)
    }
}

/// Picks its advice per input from the vote spectrum, by rank.
pub struct SpectralCandidate<'a, P, O> {
    decoder: Arc<GlDecoder<'a, P, O>>,
    pub rank: usize,
}

impl<P, O> Clone for SpectralCandidate<'_, P, O> {
    fn clone(&self) -> Self {
        SpectralCandidate { decoder: Arc::clone(&self.decoder), rank: self.rank }
    }
}

impl<P, O> Oracle<[P::Instance]> for SpectralCandidate<'_, P, O>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
{
    type Answer = Vec<bool>;
    fn query(&self, xs: &[P::Instance]) -> Result<Vec<bool>> {
        self.decoder.decode_ranked(xs, self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{EmbcolParityProblem, ExactDp, ExactXor, NoisyXor};
    use super::*;
    use crate::graphs::PatternGraph;
    use crate::rng;

    fn problem() -> EmbcolParityProblem {
        EmbcolParityProblem { pattern: PatternGraph::biclique(1, 1), n: 3 }
    }

    #[test]
    fn advice_length_is_minimal() {
        for (k, eps) in [(4, 0.2), (4, 0.5), (6, 0.25), (1, 0.5), (3, 0.1)] {
            let cfg = GlConfig::new(k, eps);
            let ell = cfg.seed_count();
            let m = 24.0 * k as f64 / (eps * eps);
            assert!(m <= (1u64 << ell) as f64);
            assert!(ell == 0 || m > (1u64 << (ell - 1)) as f64);
        }
        let cfg = GlConfig::new(4, 0.2);
        assert_eq!(cfg.seed_count(), 12);
        assert_eq!(cfg.queries(), 4095);
        assert_eq!(GlConfig { max_queries: Some(100), ..cfg }.queries(), 100);
    }

    #[test]
    fn fwht_matches_direct_sum() {
        let f0: Vec<i64> = vec![1, -1, 0, 1, 1, 1, -1, 0];
        let mut f = f0.clone();
        fwht(&mut f);
        for (w, got) in f.iter().enumerate() {
            let want: i64 = f0.iter().enumerate().map(|(t, v)| if parity((w & t) as u64) { -v } else { *v }).sum();
            assert_eq!(*got, want);
        }
    }

    #[test]
    fn exact_oracle_true_advice_recovers_everything() {
        let p = problem();
        let xor = ExactXor { problem: &p, k: 4 };
        let mut r = rng::stream(1);
        let dec = Arc::new(gl_decode(&xor, &p, &GlConfig { max_queries: Some(255), ..GlConfig::new(4, 0.5) }, &mut r).unwrap());
        assert_eq!(dec.candidate_count(), 1 << dec.seed_count());
        let exact = ExactDp { problem: &p, k: 8 };
        for _ in 0..20 {
            let xs = p.sample_tuple(8, &mut r);
            let w = dec.true_advice(&xs).unwrap();
            let truth = exact.query(&xs).unwrap();
            assert_eq!(dec.decode_with(&xs, w).unwrap(), truth);
            assert_eq!(dec.candidates()[w as usize].query(&xs).unwrap(), truth);
        }
    }

    #[test]
    fn even_arity_cannot_tell_complements_apart() {
        // an even number of flips leaves every k-wise XOR unchanged, so the
        // top of the spectrum is the answer vector or its complement
        let p = problem();
        let xor = ExactXor { problem: &p, k: 6 };
        let mut r = rng::stream(5);
        let dec = Arc::new(gl_decode(&xor, &p, &GlConfig { max_queries: Some(511), ..GlConfig::new(6, 0.25) }, &mut r).unwrap());
        let exact = ExactDp { problem: &p, k: 12 };
        for _ in 0..10 {
            let xs = p.sample_tuple(12, &mut r);
            let truth = exact.query(&xs).unwrap();
            let got = dec.ranked(0).query(&xs).unwrap();
            assert!(got == truth || got.iter().zip(&truth).all(|(a, b)| a != b));
            let flipped: Vec<bool> = truth.iter().map(|b| !b).collect();
            let w = dec.true_advice(&xs).unwrap();
            assert_eq!(dec.decode_with(&xs, w).unwrap(), truth);
            assert_eq!(xor.query(&xs[..6]).unwrap(), flipped[..6].iter().fold(false, |a, &b| a ^ b));
        }
    }

    #[test]
    fn noisy_oracle_true_advice_mostly_recovers() {
        let p = problem();
        let xor = NoisyXor { problem: &p, k: 3, advantage: 0.3, salt: 9 };
        let mut r = rng::stream(2);
        let dec = gl_decode(&xor, &p, &GlConfig::new(3, 0.3), &mut r).unwrap();
        let exact = ExactDp { problem: &p, k: 6 };
        let trials = 30;
        let hits = (0..trials)
            .filter(|_| {
                let xs = p.sample_tuple(6, &mut r);
                let w = dec.true_advice(&xs).unwrap();
                dec.decode_with(&xs, w).unwrap() == exact.query(&xs).unwrap()
            })
            .count();
        assert!(hits as f64 >= 2.0 / 3.0 * trials as f64, "{hits}/{trials}");
    }

    #[test]
    fn r_vectors_are_pairwise_independent() {
        // ℓ = 3 seeds over 4-bit vectors: seven nonempty subsets
        let p = problem();
        let xor = ExactXor { problem: &p, k: 2 };
        let cfg = GlConfig { max_queries: Some(7), ..GlConfig::new(2, 0.5) };
        let draws = 10_000;
        let mut r = rng::stream(3);
        // joint counts of (bit of r_i, bit of r_j), pooled over the 4 bits
        let mut counts = std::collections::HashMap::<(usize, usize, u8), u32>::new();
        let mut q = 0;
        for _ in 0..draws {
            let dec = gl_decode(&xor, &p, &cfg, &mut r).unwrap();
            let rv = dec.r_vectors();
            q = rv.len();
            for i in 0..q {
                for j in i + 1..q {
                    for b in 0..4 {
                        let cell = (((rv[i] >> b) & 1) << 1 | ((rv[j] >> b) & 1)) as u8;
                        *counts.entry((i, j, cell)).or_default() += 1;
                    }
                }
            }
        }
        assert_eq!(q, 7);
        let samples = 4.0 * draws as f64;
        let sd = (samples * 0.25 * 0.75).sqrt();
        for ((i, j, cell), c) in counts {
            let dev = (c as f64 - samples / 4.0).abs();
            assert!(dev <= 3.0 * sd, "pair ({i},{j}) cell {cell}: {c}");
        }
    }
}
