//! Round-polynomial producers: honest ones backed by different evaluators and
//! adversaries for soundness experiments.

use rayon::prelude::*;

use super::round_degree;
use super::xtilde::xtilde_at;
use crate::counting::{embcolpoly_eval, Count};
use crate::error::{Error, Result};
use crate::ffield::{interpolate, FieldElem, PrimeModulus, UniPoly};
use crate::graphs::ColoredInstance;
use crate::oracle::Oracle;
use crate::rng::{self, hash_words};
use crate::wta::{local_decode, ExpansionEvaluator};

/// Sends the round polynomial for the verifier's current instance and claim,
/// as exactly D + 1 coefficients.
pub trait Prover {
    fn round_poly(&mut self, round: usize, x: &ColoredInstance, claim: FieldElem) -> Result<Vec<FieldElem>>;
}

impl<P: Prover + ?Sized> Prover for Box<P> {
    fn round_poly(&mut self, round: usize, x: &ColoredInstance, claim: FieldElem) -> Result<Vec<FieldElem>> {
        (**self).round_poly(round, x, claim)
    }
}

/// Brute-force EMBCOLPOLY over the instance's field.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactPoly;

impl Oracle<ColoredInstance> for ExactPoly {
    type Answer = FieldElem;
    fn query(&self, x: &ColoredInstance) -> Result<FieldElem> {
        embcolpoly_eval(x, None)
    }
}

/// G(z) = EMBCOLPOLY(x̃(z)) on the nodes 0..=D, each value from `evaluator`.
pub fn honest_values<E>(x: &ColoredInstance, evaluator: &E) -> Result<(PrimeModulus, Vec<(FieldElem, FieldElem)>)>
where
    E: Oracle<ColoredInstance, Answer = FieldElem> + ?Sized,
{
    let q = x.modulus().ok_or_else(|| Error::Precondition("prover needs a field instance".into()))?;
    let d = round_degree(x.pattern());
    let points = (0..=d as u64)
        .into_par_iter()
        .map(|z| {
            let z = q.elem(z);
            Ok((z, evaluator.query(&xtilde_at(x, z)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((q, points))
}

fn honest_poly<E>(x: &ColoredInstance, evaluator: &E) -> Result<(PrimeModulus, UniPoly)>
where
    E: Oracle<ColoredInstance, Answer = FieldElem> + ?Sized,
{
    let (q, points) = honest_values(x, evaluator)?;
    Ok((q, interpolate(&points, q)?))
}

/// Honest prover whose evaluations of the half-size polynomial come from `E`.
pub struct PolyProver<E> {
    pub evaluator: E,
}

impl<E: Oracle<ColoredInstance, Answer = FieldElem>> Prover for PolyProver<E> {
    fn round_poly(&mut self, _round: usize, x: &ColoredInstance, _claim: FieldElem) -> Result<Vec<FieldElem>> {
        let (_, g) = honest_poly(x, &self.evaluator)?;
        Ok(g.padded(round_degree(x.pattern()) + 1))
    }
}

pub type HonestExact = PolyProver<ExactPoly>;

impl HonestExact {
    pub fn new() -> Self {
        PolyProver { evaluator: ExactPoly }
    }
}

impl Default for HonestExact {
    fn default() -> Self {
        Self::new()
    }
}

/// Prover that only has a counting oracle on binary instances; each field
/// value comes from exact-length binary expansions (t = ⌈log₂ q⌉).
pub type OracleProver<O> = PolyProver<ExpansionEvaluator<O>>;

impl<O: Oracle<ColoredInstance, Answer = Count>> OracleProver<O> {
    pub fn from_oracle(oracle: O, q: PrimeModulus, seed: u64) -> Self {
        PolyProver { evaluator: ExpansionEvaluator { oracle, t: q.bits(), seed } }
    }
}

/// Each field evaluation locally decoded from an average-case binary oracle.
pub struct DecodingEvaluator<O> {
    pub inner: ExpansionEvaluator<O>,
    pub degree: usize,
    pub m: usize,
    pub seed: u64,
}

impl<O: Oracle<ColoredInstance, Answer = Count>> Oracle<ColoredInstance> for DecodingEvaluator<O> {
    type Answer = FieldElem;
    fn query(&self, x: &ColoredInstance) -> Result<FieldElem> {
        let mut r = rng::stream(hash_words(self.seed, [x.fingerprint(self.seed)]));
        local_decode(x, &self.inner, self.degree, self.m, &mut r)
    }
}

pub type HonestAvg<O> = PolyProver<DecodingEvaluator<O>>;

impl<O: Oracle<ColoredInstance, Answer = Count>> HonestAvg<O> {
    /// `t` is the expansion length and `m` the curve point count; q must
    /// exceed m and 12·|E(H)|.
    pub fn with_oracle(oracle: O, degree: usize, t: u32, m: usize, seed: u64) -> Self {
        PolyProver {
            evaluator: DecodingEvaluator {
                inner: ExpansionEvaluator { oracle, t, seed: seed ^ 0x9e37_79b9 },
                degree,
                m,
                seed,
            },
        }
    }
}

/// Adds c · Π_j (z − r_j) to the honest polynomial, with D roots r_j off the
/// summation grid and c fixed so the round check passes. The lie survives a
/// round unless the challenge hits a root, and a true claim gets c = 0.
pub struct OptimalCheat<E = ExactPoly> {
    pub evaluator: E,
}

impl OptimalCheat {
    pub fn new() -> Self {
        OptimalCheat { evaluator: ExactPoly }
    }
}

impl Default for OptimalCheat {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: Oracle<ColoredInstance, Answer = FieldElem>> Prover for OptimalCheat<E> {
    fn round_poly(&mut self, _round: usize, x: &ColoredInstance, claim: FieldElem) -> Result<Vec<FieldElem>> {
        let (q, g) = honest_poly(x, &self.evaluator)?;
        let d = round_degree(x.pattern());
        let grid = 1u64 << x.pattern().k();
        let roots: Vec<FieldElem> = (0..d as u64).map(|j| q.elem(grid + j)).collect();
        let shift = UniPoly::from_roots(q, &roots);
        let sum = |p: &UniPoly| q.sum((0..grid).map(|z| p.eval(q, q.elem(z))));
        let gap = q.sub(claim, sum(&g));
        let c = q
            .div(gap, sum(&shift))
            .ok_or_else(|| Error::Precondition(format!("shift polynomial sums to zero mod {q}")))?;
        Ok(g.add(q, &shift.scale(q, c)).padded(d + 1))
    }
}

/// Sends one coefficient too few.
pub struct MalformedProver;

impl Prover for MalformedProver {
    fn round_poly(&mut self, _round: usize, x: &ColoredInstance, _claim: FieldElem) -> Result<Vec<FieldElem>> {
        Ok(vec![FieldElem::ZERO; round_degree(x.pattern())])
    }
}
