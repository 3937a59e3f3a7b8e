//! Hardness amplification as executable decoders: direct-product decoding,
//! XOR (Hadamard) list decoding, combining candidate lists with a selector,
//! and the end-to-end pipelines, all run against synthetic oracles.

mod gl;
mod ijkw;
mod pipeline;
mod select;

use rand::RngCore;
use rayon::prelude::*;

use crate::counting::{embcol_count, Count};
use crate::error::{Error, Result};
use crate::graphs::{rand_colored, ColoredInstance, PatternGraph};
use crate::oracle::Oracle;
use crate::rng::{self, hash_words, unit_interval};

pub use gl::{gl_decode, GlCandidate, GlConfig, GlDecoder, SpectralCandidate};
pub use ijkw::{ijkw_decode, CandidateAlgorithm, IjkwConfig};
pub use pipeline::{dpt_pipeline, xor_pipeline, DptSolver, WorstCaseSolver, XorConfig, XorSolver};
pub use select::{solve_by_selector, AnswerOracle, CountingSelector, ParitySelector, Selector, SolveConfig};

/// A problem paired with an input distribution.
pub trait DistributionalProblem: Send + Sync {
    type Instance: Clone + PartialEq + Send + Sync;
    type Answer: Copy + Eq + std::hash::Hash + std::fmt::Debug + Send + Sync;

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Instance;
    fn truth(&self, x: &Self::Instance) -> Result<Self::Answer>;
    fn fingerprint(&self, x: &Self::Instance, salt: u64) -> u64;
    /// Some answer other than `answer`, chosen by `salt`.
    fn perturb(&self, answer: Self::Answer, salt: u64) -> Self::Answer;

    /// A draw from D^k: k independent draws from D.
    fn sample_tuple(&self, k: usize, rng: &mut dyn RngCore) -> Vec<Self::Instance> {
        (0..k).map(|_| self.sample(rng)).collect()
    }

    fn tuple_fingerprint(&self, xs: &[Self::Instance], salt: u64) -> u64 {
        hash_words(salt, xs.iter().map(|x| self.fingerprint(x, salt)))
    }
}

/// #EMBcol on uniform binary instances of class size n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbcolProblem {
    pub pattern: PatternGraph,
    pub n: usize,
}

impl DistributionalProblem for EmbcolProblem {
    type Instance = ColoredInstance;
    type Answer = Count;

    fn sample(&self, rng: &mut dyn RngCore) -> ColoredInstance {
        rand_colored(&self.pattern, self.n, rng)
    }
    fn truth(&self, x: &ColoredInstance) -> Result<Count> {
        embcol_count(x)
    }
    fn fingerprint(&self, x: &ColoredInstance, salt: u64) -> u64 {
        x.fingerprint(salt)
    }
    fn perturb(&self, answer: Count, salt: u64) -> Count {
        answer + 1 + (salt % 13) as Count
    }
}

/// ⊕EMBcol: the parity of the colorful count, same distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbcolParityProblem {
    pub pattern: PatternGraph,
    pub n: usize,
}

impl DistributionalProblem for EmbcolParityProblem {
    type Instance = ColoredInstance;
    type Answer = bool;

    fn sample(&self, rng: &mut dyn RngCore) -> ColoredInstance {
        rand_colored(&self.pattern, self.n, rng)
    }
    fn truth(&self, x: &ColoredInstance) -> Result<bool> {
        Ok(embcol_count(x)? % 2 == 1)
    }
    fn fingerprint(&self, x: &ColoredInstance, salt: u64) -> u64 {
        x.fingerprint(salt)
    }
    fn perturb(&self, answer: bool, _salt: u64) -> bool {
        !answer
    }
}

fn check_arity(len: usize, k: usize) -> Result<()> {
    if len != k {
        return Err(Error::Precondition(format!("expected a {k}-tuple, got {len} instances")));
    }
    Ok(())
}

/// Π^k answered exactly.
pub struct ExactDp<'a, P> {
    pub problem: &'a P,
    pub k: usize,
}

impl<P: DistributionalProblem> Oracle<[P::Instance]> for ExactDp<'_, P> {
    type Answer = Vec<P::Answer>;
    fn query(&self, xs: &[P::Instance]) -> Result<Vec<P::Answer>> {
        check_arity(xs.len(), self.k)?;
        xs.iter().map(|x| self.problem.truth(x)).collect()
    }
}

/// Correct on the tuples whose salted hash falls below ε. Elsewhere each
/// coordinate is wrong with probability 1/2 (keyed by the tuple), with at
/// least one wrong coordinate.
pub struct CorruptDp<'a, P> {
    pub problem: &'a P,
    pub k: usize,
    pub epsilon: f64,
    pub salt: u64,
}

impl<P: DistributionalProblem> CorruptDp<'_, P> {
    pub fn is_correct_on(&self, xs: &[P::Instance]) -> bool {
        unit_interval(self.problem.tuple_fingerprint(xs, self.salt)) < self.epsilon
    }
}

impl<P: DistributionalProblem> Oracle<[P::Instance]> for CorruptDp<'_, P> {
    type Answer = Vec<P::Answer>;
    fn query(&self, xs: &[P::Instance]) -> Result<Vec<P::Answer>> {
        check_arity(xs.len(), self.k)?;
        let h = self.problem.tuple_fingerprint(xs, self.salt);
        let mut out: Vec<P::Answer> = xs.iter().map(|x| self.problem.truth(x)).collect::<Result<_>>()?;
        if unit_interval(h) < self.epsilon {
            return Ok(out);
        }
        let mut wrong: Vec<bool> = (0..self.k).map(|i| hash_words(h, [i as u64]) & 1 == 1).collect();
        if !wrong.iter().any(|&w| w) {
            wrong[(h % self.k as u64) as usize] = true;
        }
        for (i, a) in out.iter_mut().enumerate() {
            if wrong[i] {
                *a = self.problem.perturb(*a, hash_words(h, [i as u64, 1]));
            }
        }
        Ok(out)
    }
}

/// ⊕_k Π answered exactly.
pub struct ExactXor<'a, P> {
    pub problem: &'a P,
    pub k: usize,
}

impl<P: DistributionalProblem<Answer = bool>> Oracle<[P::Instance]> for ExactXor<'_, P> {
    type Answer = bool;
    fn query(&self, xs: &[P::Instance]) -> Result<bool> {
        check_arity(xs.len(), self.k)?;
        xs.iter().try_fold(false, |acc, x| Ok(acc ^ self.problem.truth(x)?))
    }
}

/// ⊕_k Π answered correctly on a 1/2 + advantage fraction of tuples (by
/// salted hash) and flipped elsewhere.
pub struct NoisyXor<'a, P> {
    pub problem: &'a P,
    pub k: usize,
    pub advantage: f64,
    pub salt: u64,
}

impl<P: DistributionalProblem<Answer = bool>> Oracle<[P::Instance]> for NoisyXor<'_, P> {
    type Answer = bool;
    fn query(&self, xs: &[P::Instance]) -> Result<bool> {
        let exact = ExactXor { problem: self.problem, k: self.k }.query(xs)?;
        let h = self.problem.tuple_fingerprint(xs, self.salt);
        Ok(exact ^ (unit_interval(h) >= 0.5 + self.advantage))
    }
}

/// Fraction of `samples` fresh draws from D on which `candidate` is right.
/// Draw i uses stream i under a seed taken from `rng`.
pub fn measure_success<P, C>(problem: &P, candidate: &C, samples: usize, rng: &mut dyn RngCore) -> Result<f64>
where
    P: DistributionalProblem,
    C: Oracle<P::Instance, Answer = P::Answer> + ?Sized,
{
    let seed = rng.next_u64();
    let hits = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = problem.sample(&mut rng::trial_stream(seed, i));
            Ok((candidate.query(&x)? == problem.truth(&x)?) as usize)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / samples.max(1) as f64)
}
