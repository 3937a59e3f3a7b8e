//! Selectors for two oracles, and turning a candidate list into a solver by
//! scanning the pairwise selector matrix.

use std::collections::HashMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{DistributionalProblem, EmbcolParityProblem, EmbcolProblem};
use crate::error::{Error, Result};
use crate::graphs::{rand_colored, ColoredInstance};
use crate::ip::{select_basic, SelectConfig};
use crate::oracle::Oracle;
use crate::rng::{self, Stream};

pub type AnswerOracle<'a, P> =
    dyn Oracle<<P as DistributionalProblem>::Instance, Answer = <P as DistributionalProblem>::Answer> + 'a;

/// Solves Π on every input given two oracles, at least one of which solves
/// (Π, D) with good success. `None` is FAIL.
pub trait Selector<P: DistributionalProblem>: Send + Sync {
    fn select(
        &self,
        x: &P::Instance,
        first: &AnswerOracle<'_, P>,
        second: &AnswerOracle<'_, P>,
        rng: &mut Stream,
    ) -> Result<Option<P::Answer>>;
}

/// The #EMBcol selector: worst-case lifting plus instance checking.
#[derive(Clone, Copy, Debug, Default)]
pub struct CountingSelector {
    pub cfg: SelectConfig,
}

impl Selector<EmbcolProblem> for CountingSelector {
    fn select(
        &self,
        x: &ColoredInstance,
        first: &AnswerOracle<'_, EmbcolProblem>,
        second: &AnswerOracle<'_, EmbcolProblem>,
        rng: &mut Stream,
    ) -> Result<Option<u128>> {
        Ok(select_basic(x, &[first, second], &self.cfg, rng)?.count())
    }
}

/// The ⊕EMBcol selector over F_2.
///
/// The parity is a degree-|E(H)| polynomial over F_2 in the edge bits, so its
/// value at y is the sum of its values at y + Σ_{i∈S} r_i over nonempty
/// S ⊆ [|E(H)| + 1], each a uniform point. Majorities of such sums give each
/// oracle a self-corrected value. When the two disagree, the instance is
/// split into its 2^{|V(H)|} half-size parts, whose parities sum to the
/// parent's; an oracle whose parts do not add up loses, and otherwise the
/// search follows a part on which they disagree, down to size 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParitySelector {
    /// Self-correction samples per value (odd).
    pub repeats: usize,
}

impl Default for ParitySelector {
    fn default() -> Self {
        ParitySelector { repeats: 5 }
    }
}

/// Guard on the 2^{|E(H)|+1} − 1 queries per corrected value.
const MAX_SHIFTS: usize = 12;

impl ParitySelector {
    /// Self-corrected value of `oracle` at y, queried at size n.
    pub fn corrected(&self, oracle: &AnswerOracle<'_, EmbcolParityProblem>, y: &ColoredInstance, rng: &mut Stream) -> Result<bool> {
        let shifts = y.pattern().num_edges() + 1;
        if shifts > MAX_SHIFTS {
            return Err(Error::Guard(format!("{} self-correction shifts", shifts)));
        }
        let mut ones = 0;
        for _ in 0..self.repeats.max(1) {
            let rs: Vec<ColoredInstance> = (0..shifts).map(|_| rand_colored(y.pattern(), y.n(), rng)).collect();
            // Gray-code walk over nonempty subsets: one xor per query
            let mut z = y.clone();
            let mut acc = false;
            for step in 1u32..(1 << shifts) {
                z = z.xor(&rs[step.trailing_zeros() as usize])?;
                acc ^= oracle.query(&z)?;
            }
            ones += acc as usize;
        }
        Ok(2 * ones > self.repeats.max(1))
    }

    /// Index (0 or 1) of the oracle whose claim on y holds up.
    fn descend(
        &self,
        oracles: [&AnswerOracle<'_, EmbcolParityProblem>; 2],
        y: &ColoredInstance,
        claims: [bool; 2],
        n: usize,
        rng: &mut Stream,
    ) -> Result<Option<usize>> {
        if y.n() == 1 {
            let truth = crate::counting::embcol_count(y)? % 2 == 1;
            return Ok(claims.iter().position(|&c| c == truth));
        }
        let parts = (0..1u64 << y.pattern().k()).map(|eta| y.restrict_half(eta)).collect::<Result<Vec<_>>>()?;
        let mut values = [Vec::new(), Vec::new()];
        for part in &parts {
            let query = part.pad_to(n)?;
            for b in 0..2 {
                values[b].push(self.corrected(oracles[b], &query, rng)?);
            }
        }
        let consistent: Vec<bool> = (0..2).map(|b| values[b].iter().fold(false, |a, &v| a ^ v) == claims[b]).collect();
        match (consistent[0], consistent[1]) {
            (true, false) => Ok(Some(0)),
            (false, true) => Ok(Some(1)),
            (false, false) => Ok(None),
            (true, true) => {
                let i = (0..parts.len()).find(|&i| values[0][i] != values[1][i]).expect("claims differ, so some part does");
                self.descend(oracles, &parts[i], [values[0][i], values[1][i]], n, rng)
            }
        }
    }
}

impl Selector<EmbcolParityProblem> for ParitySelector {
    fn select(
        &self,
        x: &ColoredInstance,
        first: &AnswerOracle<'_, EmbcolParityProblem>,
        second: &AnswerOracle<'_, EmbcolParityProblem>,
        rng: &mut Stream,
    ) -> Result<Option<bool>> {
        if !x.is_binary() {
            return Err(Error::Precondition("the parity selector needs a binary instance".into()));
        }
        let claims = [self.corrected(first, x, rng)?, self.corrected(second, x, rng)?];
        if claims[0] == claims[1] {
            return Ok(Some(claims[0]));
        }
        let padded = x.pad_to_power_of_two();
        Ok(self.descend([first, second], &padded, claims, x.n(), rng)?.map(|b| claims[b]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Passes over the matrix before giving up.
    pub outer_repeats: usize,
    /// Selector runs per matrix entry, combined by plurality.
    pub boost: usize,
}

impl SolveConfig {
    /// ⌈log₂(1/δ)⌉ passes.
    pub fn for_delta(delta: f64) -> Self {
        SolveConfig { outer_repeats: (1.0 / delta).log2().ceil().max(1.0) as usize, boost: 1 }
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { outer_repeats: 3, boost: 1 }
    }
}

fn boosted<P, S>(
    selector: &S,
    x: &P::Instance,
    a: &AnswerOracle<'_, P>,
    b: &AnswerOracle<'_, P>,
    boost: usize,
    rng: &mut Stream,
) -> Result<Option<P::Answer>>
where
    P: DistributionalProblem,
    S: Selector<P> + ?Sized,
{
    if boost <= 1 {
        return selector.select(x, a, b, rng);
    }
    let mut tally: HashMap<Option<P::Answer>, usize> = HashMap::new();
    let mut first_seen = Vec::new();
    for _ in 0..boost {
        let c = selector.select(x, a, b, rng)?;
        let e = tally.entry(c).or_insert(0);
        if *e == 0 {
            first_seen.push(c);
        }
        *e += 1;
    }
    let mut best = first_seen[0];
    for c in first_seen {
        if tally[&c] > tally[&best] {
            best = c;
        }
    }
    Ok(best)
}

/// Fill c_ij = S^{M_i, M_j}(x) row by row and return the value of the first
/// row whose entries all agree on an answer. `None` if no row does within
/// the allowed passes.
pub fn solve_by_selector<P, S>(
    candidates: &[&AnswerOracle<'_, P>],
    selector: &S,
    x: &P::Instance,
    cfg: &SolveConfig,
    rng: &mut dyn RngCore,
) -> Result<Option<P::Answer>>
where
    P: DistributionalProblem,
    S: Selector<P> + ?Sized,
{
    if candidates.is_empty() {
        return Err(Error::Precondition("no candidates to select from".into()));
    }
    let mut r = rng::stream(rng.next_u64());
    for _ in 0..cfg.outer_repeats.max(1) {
        'rows: for a in candidates {
            let mut agreed = None;
            for b in candidates {
                match boosted(selector, x, *a, *b, cfg.boost, &mut r)? {
                    None => continue 'rows,
                    Some(c) if agreed.is_none_or(|v| v == c) => agreed = Some(c),
                    Some(_) => continue 'rows,
                }
            }
            return Ok(agreed);
        }
    }
    Ok(None)
}
