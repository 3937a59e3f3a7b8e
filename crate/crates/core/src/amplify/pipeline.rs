//! End-to-end solvers: decode candidates from a weak oracle, then combine
//! them with a selector on each input.

use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::gl::{gl_decode, GlConfig, GlDecoder, SpectralCandidate};
use super::ijkw::{ijkw_decode, CandidateAlgorithm, IjkwConfig};
use super::select::{solve_by_selector, AnswerOracle, Selector, SolveConfig};
use super::DistributionalProblem;
use crate::error::Result;
use crate::oracle::Oracle;

/// A solver meant for every input, not just typical ones.
pub trait WorstCaseSolver<P: DistributionalProblem> {
    fn solve(&self, x: &P::Instance, rng: &mut dyn RngCore) -> Result<Option<P::Answer>>;
    fn candidates(&self) -> Vec<&AnswerOracle<'_, P>>;
}

pub struct DptSolver<'a, P: DistributionalProblem, O, S> {
    candidates: Vec<CandidateAlgorithm<'a, P, O>>,
    selector: S,
    solve: SolveConfig,
}

/// Direct-product decoding followed by the selector scan.
pub fn dpt_pipeline<'a, P, O, S>(
    problem: &'a P,
    dp_oracle: O,
    selector: S,
    ijkw: &IjkwConfig,
    solve: SolveConfig,
    rng: &mut dyn RngCore,
) -> Result<DptSolver<'a, P, O, S>>
where
    P: DistributionalProblem,
    O: Oracle<[P::Instance], Answer = Vec<P::Answer>> + Clone,
{
    let candidates = ijkw_decode(dp_oracle, problem, ijkw, rng)?;
    Ok(DptSolver { candidates, selector, solve })
}

impl<P, O, S> WorstCaseSolver<P> for DptSolver<'_, P, O, S>
where
    P: DistributionalProblem,
    O: Oracle<[P::Instance], Answer = Vec<P::Answer>>,
    S: Selector<P>,
{
    fn solve(&self, x: &P::Instance, rng: &mut dyn RngCore) -> Result<Option<P::Answer>> {
        solve_by_selector(&self.candidates(), &self.selector, x, &self.solve, rng)
    }

    fn candidates(&self) -> Vec<&AnswerOracle<'_, P>> {
        self.candidates.iter().map(|c| c as &AnswerOracle<'_, P>).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XorConfig {
    pub gl: GlConfig,
    /// Spectral candidates kept from the XOR decoder (ranks 0..gl_ranks).
    pub gl_ranks: usize,
    /// Direct-product decoding of each kept candidate, arity 2k.
    pub ijkw: IjkwConfig,
    pub solve: SolveConfig,
}

impl XorConfig {
    pub fn new(k: usize, advantage: f64, delta: f64) -> Self {
        XorConfig {
            gl: GlConfig::new(k, advantage),
            gl_ranks: 1,
            ijkw: IjkwConfig::new(2 * k, 0.4, delta),
            solve: SolveConfig::for_delta(delta),
        }
    }
}

pub struct XorSolver<'a, P: DistributionalProblem, O, S> {
    decoder: Arc<GlDecoder<'a, P, O>>,
    candidates: Vec<CandidateAlgorithm<'a, P, SpectralCandidate<'a, P, O>>>,
    selector: S,
    solve: SolveConfig,
}

impl<'a, P: DistributionalProblem, O, S> XorSolver<'a, P, O, S> {
    pub fn decoder(&self) -> &GlDecoder<'a, P, O> {
        &self.decoder
    }
}

/// XOR decoding to Π^{2k}, direct-product decoding of each kept candidate,
/// and the selector scan over the flattened list.
pub fn xor_pipeline<'a, P, O, S>(
    problem: &'a P,
    xor_oracle: O,
    selector: S,
    cfg: &XorConfig,
    rng: &mut dyn RngCore,
) -> Result<XorSolver<'a, P, O, S>>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
{
    let decoder = Arc::new(gl_decode(xor_oracle, problem, &cfg.gl, rng)?);
    let mut candidates = Vec::new();
    for rank in 0..cfg.gl_ranks.max(1) {
        candidates.extend(ijkw_decode(decoder.ranked(rank), problem, &cfg.ijkw, rng)?);
    }
    Ok(XorSolver { decoder, candidates, selector, solve: cfg.solve })
}

impl<P, O, S> WorstCaseSolver<P> for XorSolver<'_, P, O, S>
where
    P: DistributionalProblem<Answer = bool>,
    O: Oracle<[P::Instance], Answer = bool>,
    S: Selector<P>,
{
    fn solve(&self, x: &P::Instance, rng: &mut dyn RngCore) -> Result<Option<bool>> {
        solve_by_selector(&self.candidates(), &self.selector, x, &self.solve, rng)
    }

    fn candidates(&self) -> Vec<&AnswerOracle<'_, P>> {
        self.candidates.iter().map(|c| c as &AnswerOracle<'_, P>).collect()
    }
}
