//! Decoding a single-instance solver from a direct-product oracle that is
//! right on only an ε fraction of k-tuples.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::DistributionalProblem;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::rng::{self, hash_words};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IjkwConfig {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Candidates returned: ⌈list_constant / ε⌉.
    pub list_constant: f64,
    /// Tuples tried per evaluation: ⌈repeat_constant · ln(2/δ) / ε⌉.
    pub repeat_constant: f64,
}

impl IjkwConfig {
    pub fn new(k: usize, epsilon: f64, delta: f64) -> Self {
        IjkwConfig { k, epsilon, delta, list_constant: 3.0, repeat_constant: 2.0 }
    }

    pub fn list_size(&self) -> usize {
        (self.list_constant / self.epsilon).ceil().max(1.0) as usize
    }

    pub fn repeats(&self) -> usize {
        (self.repeat_constant * (2.0 / self.delta).ln() / self.epsilon).ceil().max(1.0) as usize
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || !(self.epsilon > 0.0 && self.epsilon <= 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Precondition(format!(
                "need k ≥ 1, ε ∈ (0, 1], δ ∈ (0, 1); got k = {}, ε = {}, δ = {}",
                self.k, self.epsilon, self.delta
            )));
        }
        Ok(())
    }
}

/// M_{A,v}: answers anchors from v, and any other x by embedding A and x in
/// fresh k-tuples until the oracle's answers on A match v.
pub struct CandidateAlgorithm<'a, P: DistributionalProblem, O> {
    problem: &'a P,
    oracle: O,
    k: usize,
    anchors: Vec<P::Instance>,
    values: Vec<P::Answer>,
    repeats: usize,
    tape: u64,
}

impl<P: DistributionalProblem, O> CandidateAlgorithm<'_, P, O> {
    pub fn anchors(&self) -> &[P::Instance] {
        &self.anchors
    }

    pub fn values(&self) -> &[P::Answer] {
        &self.values
    }

    pub fn repeats(&self) -> usize {
        self.repeats
    }
}

impl<P, O> Oracle<P::Instance> for CandidateAlgorithm<'_, P, O>
where
    P: DistributionalProblem,
    O: Oracle<[P::Instance], Answer = Vec<P::Answer>>,
{
    type Answer = P::Answer;

    fn query(&self, x: &P::Instance) -> Result<P::Answer> {
        if let Some(i) = self.anchors.iter().position(|a| a == x) {
            return Ok(self.values[i]);
        }
        let mut r = rng::stream(hash_words(self.tape, [self.problem.fingerprint(x, self.tape)]));
        let h = self.anchors.len();
        // slot s < h is anchor s, slot h is x, the rest are fresh draws
        let mut order: Vec<usize> = (0..self.k).collect();
        let mut at = vec![0; self.k];
        let mut last = None;
        for _ in 0..self.repeats {
            order.shuffle(&mut r);
            let fresh = self.problem.sample_tuple(self.k - h - 1, &mut r);
            let tuple: Vec<P::Instance> = order
                .iter()
                .map(|&s| match s.cmp(&h) {
                    std::cmp::Ordering::Less => self.anchors[s].clone(),
                    std::cmp::Ordering::Equal => x.clone(),
                    std::cmp::Ordering::Greater => fresh[s - h - 1].clone(),
                })
                .collect();
            let ans = self.oracle.query(&tuple)?;
            if ans.len() != self.k {
                return Err(Error::Oracle(format!("direct-product oracle returned {} answers", ans.len())));
            }
            for (pos, &s) in order.iter().enumerate() {
                at[s] = pos;
            }
            if (0..h).all(|s| ans[at[s]] == self.values[s]) {
                return Ok(ans[at[h]]);
            }
            last = Some(ans[at[h]]);
        }
        Ok(last.expect("at least one repeat"))
    }
}

/// ⌈c/ε⌉ candidates, each from one oracle call on a random k-tuple B₀ with a
/// random ordered half of B₀ as anchors.
pub fn ijkw_decode<'a, P, O>(
    oracle: O,
    problem: &'a P,
    cfg: &IjkwConfig,
    rng: &mut dyn RngCore,
) -> Result<Vec<CandidateAlgorithm<'a, P, O>>>
where
    P: DistributionalProblem,
    O: Oracle<[P::Instance], Answer = Vec<P::Answer>> + Clone,
{
    cfg.validate()?;
    let k = cfg.k;
    (0..cfg.list_size())
        .map(|_| {
            let b0 = problem.sample_tuple(k, rng);
            let ans = oracle.query(&b0)?;
            if ans.len() != k {
                return Err(Error::Oracle(format!("direct-product oracle returned {} answers", ans.len())));
            }
            let picks = rand::seq::index::sample(rng, k, k / 2);
            Ok(CandidateAlgorithm {
                problem,
                oracle: oracle.clone(),
                k,
                anchors: picks.iter().map(|i| b0[i].clone()).collect(),
                values: picks.iter().map(|i| ans[i]).collect(),
                repeats: cfg.repeats(),
                tape: rng.gen(),
            })
        })
        .collect()
}
