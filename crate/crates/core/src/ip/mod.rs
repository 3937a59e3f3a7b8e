//! A log₂ n-round interactive proof that EMBCOLPOLY(x) = C, the instance
//! checker and selectors built on it, and a line-delimited JSON wire format.

mod checker;
mod prover;
mod verifier;
pub mod wire;
mod xtilde;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{checked_pow, sample_prime_between, FieldElem, PrimeModulus};
use crate::graphs::{ColoredInstance, PatternGraph};

pub use checker::{instance_check, select, select_basic, CheckOutcome, FailReason, SelectConfig, WorstCaseOracle};
pub use prover::{
    DecodingEvaluator, ExactPoly, HonestAvg, HonestExact, MalformedProver, OptimalCheat, OracleProver, PolyProver,
    Prover,
};
pub use verifier::{replay, run_ip, run_ip_with_stats, Verifier, VerifierStats};
pub use xtilde::{build_xtilde, half_weights, xtilde_at, xtilde_cost, XTilde};

/// Degree of every round polynomial: |E(H)| · (2^{|V(H)|} − 1).
pub fn round_degree(pattern: &PatternGraph) -> usize {
    pattern.num_edges() * ((1 << pattern.k()) - 1)
}

/// A prime in (L, 2L) with L = max(n^{|V(H)|}, floor, D + 2^{|V(H)|}), so
/// that round polynomials interpolate and have room off the summation grid.
pub fn session_modulus<R: Rng + ?Sized>(pattern: &PatternGraph, n: usize, floor: u64, rng: &mut R) -> Result<PrimeModulus> {
    let nk = checked_pow(n as u64, pattern.k() as u32)
        .filter(|&v| v < 1 << 61)
        .ok_or_else(|| Error::Precondition(format!("{n}^{} is too large for the field", pattern.k())))?;
    let room = (round_degree(pattern) + (1 << pattern.k())) as u64;
    let lo = nk.max(floor).max(room);
    sample_prime_between(lo, 2 * lo, rng)
}

/// Public input of a session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub pattern: PatternGraph,
    pub n0: usize,
    pub q: PrimeModulus,
    pub claim: FieldElem,
    pub instance: ColoredInstance,
}

impl Session {
    pub fn new(instance: ColoredInstance, claim: FieldElem) -> Result<Self> {
        let q = instance
            .modulus()
            .ok_or_else(|| Error::Precondition("a session needs a field instance".into()))?;
        if !instance.n().is_power_of_two() {
            return Err(Error::Precondition(format!("n = {} is not a power of two", instance.n())));
        }
        if claim.value() >= q.q() {
            return Err(Error::Precondition(format!("claim {claim} is not reduced mod {q}")));
        }
        Ok(Session { pattern: instance.pattern().clone(), n0: instance.n(), q, claim, instance })
    }

    pub fn interactive_rounds(&self) -> usize {
        self.n0.trailing_zeros() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum RejectReason {
    SumMismatch,
    Malformed,
    FinalMismatch,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RejectReason::SumMismatch => "SUM-MISMATCH",
            RejectReason::Malformed => "MALFORMED",
            RejectReason::FinalMismatch => "FINAL-MISMATCH",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum Verdict {
    Accept,
    Reject { round: usize, reason: RejectReason },
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RoundEntry {
    /// A round that passed its sum check.
    Interactive { poly: Vec<FieldElem>, challenge: FieldElem, claim_after: FieldElem },
    /// The message that caused a rejection.
    Rejected { poly: Vec<FieldElem> },
    /// The n = 1 evaluation.
    Final { value: FieldElem },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub session: Session,
    pub rounds: Vec<RoundEntry>,
    pub verdict: Verdict,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("transcript JSON: {e}")))
    }
}
