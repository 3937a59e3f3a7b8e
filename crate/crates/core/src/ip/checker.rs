//! Instance checking with the oracle as prover, and selectors over oracle
//! lists.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prover::OracleProver;
use super::verifier::run_ip;
use super::{session_modulus, Session, Verdict};
use crate::counting::Count;
use crate::error::{Error, Result};
use crate::graphs::ColoredInstance;
use crate::oracle::{CountOracle, Oracle};
use crate::rng::{self, hash_words};
use crate::wta::{worst_to_avg, WtaConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    /// The oracle's claim does not fit the field.
    ClaimOutOfRange,
    Rejected,
    OracleError,
    /// No unanimous row in the consistency matrix.
    NoConsensus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum CheckOutcome {
    Count { value: Count },
    Fail { reason: FailReason },
}

impl CheckOutcome {
    pub fn count(&self) -> Option<Count> {
        match *self {
            CheckOutcome::Count { value } => Some(value),
            CheckOutcome::Fail { .. } => None,
        }
    }

    fn fail(reason: FailReason) -> Self {
        CheckOutcome::Fail { reason }
    }
}

/// Ask the oracle for embcol(x), then make it prove the answer. Returns the
/// answer on ACCEPT and FAIL otherwise.
pub fn instance_check<O, R>(x: &ColoredInstance, oracle: &O, rng: &mut R) -> Result<CheckOutcome>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
    R: Rng + ?Sized,
{
    if !x.is_binary() {
        return Err(Error::Precondition("instance_check needs a binary instance".into()));
    }
    let padded = x.pad_to_power_of_two();
    let q = session_modulus(x.pattern(), padded.n(), 0, rng)?;
    let claim = match oracle.query(x) {
        Ok(c) => c,
        Err(_) => return Ok(CheckOutcome::fail(FailReason::OracleError)),
    };
    if claim >= q.q() as Count {
        return Ok(CheckOutcome::fail(FailReason::ClaimOutOfRange));
    }
    let session = Session::new(padded.to_field(q), q.from_u128(claim))?;
    let mut prover = OracleProver::from_oracle(oracle, q, rng.gen());
    let verifier_rng = rng::stream(rng.gen());
    Ok(match run_ip(session, &mut prover, verifier_rng) {
        Ok(t) if t.verdict == Verdict::Accept => CheckOutcome::Count { value: claim },
        Ok(_) => CheckOutcome::fail(FailReason::Rejected),
        Err(_) => CheckOutcome::fail(FailReason::OracleError),
    })
}

/// R^A: answers every binary instance through the worst-case to average-case
/// reduction over `inner`. Randomness is keyed by the instance.
pub struct WorstCaseOracle<O> {
    pub inner: O,
    pub cfg: WtaConfig,
    pub seed: u64,
}

impl<O: Oracle<ColoredInstance, Answer = Count>> Oracle<ColoredInstance> for WorstCaseOracle<O> {
    type Answer = Count;
    fn query(&self, x: &ColoredInstance) -> Result<Count> {
        let mut r = rng::stream(hash_words(self.seed, [x.fingerprint(self.seed)]));
        worst_to_avg(x, &self.inner, &self.cfg, &mut r).map(|run| run.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub wta: WtaConfig,
    /// Outer repeats of the consistency-matrix scan.
    pub repeats: u32,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig { wta: WtaConfig::default(), repeats: 3 }
    }
}

/// Check x against each oracle in turn, each lifted to worst case, and
/// return the first answer that survives.
pub fn select_basic<R: Rng + ?Sized>(
    x: &ColoredInstance,
    oracles: &[&CountOracle<'_>],
    cfg: &SelectConfig,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let mut last = CheckOutcome::fail(FailReason::Rejected);
    for oracle in oracles {
        let lifted = WorstCaseOracle { inner: *oracle, cfg: cfg.wta, seed: rng.gen() };
        last = instance_check(x, &lifted, rng)?;
        if last.count().is_some() {
            return Ok(last);
        }
    }
    Ok(last)
}

/// Selector over a list of oracles. Two or fewer go straight to
/// [`select_basic`]; longer lists fill the pairwise matrix
/// c_ij = select_basic(A_i, A_j) row by row and return the first row whose
/// entries agree.
pub fn select<R: Rng + ?Sized>(
    x: &ColoredInstance,
    oracles: &[&CountOracle<'_>],
    cfg: &SelectConfig,
    rng: &mut R,
) -> Result<CheckOutcome> {
    if oracles.is_empty() {
        return Err(Error::Precondition("select needs at least one oracle".into()));
    }
    if oracles.len() <= 2 {
        return select_basic(x, oracles, cfg, rng);
    }
    for _ in 0..cfg.repeats.max(1) {
        'rows: for i in 0..oracles.len() {
            let mut agreed: Option<CheckOutcome> = None;
            for j in 0..oracles.len() {
                if i == j {
                    continue;
                }
                let c = select_basic(x, &[oracles[i], oracles[j]], cfg, rng)?;
                match agreed {
                    None => agreed = Some(c),
                    Some(prev) if prev == c => {}
                    Some(_) => continue 'rows,
                }
            }
            if let Some(CheckOutcome::Count { value }) = agreed {
                return Ok(CheckOutcome::Count { value });
            }
        }
    }
    Ok(CheckOutcome::fail(FailReason::NoConsensus))
}
