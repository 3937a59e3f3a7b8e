//! Query interfaces for counting oracles and the hash-keyed test doubles.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::counting::{embcol_count, emb_count, hom_count, Count};
use crate::error::{Error, Result};
use crate::graphs::{ColoredInstance, PatternGraph, SimpleGraph};
use crate::rng::unit_interval;

/// Anything that answers queries of type `Q`.
pub trait Oracle<Q: ?Sized>: Send + Sync {
    type Answer;
    fn query(&self, q: &Q) -> Result<Self::Answer>;
}

impl<Q: ?Sized, O: Oracle<Q> + ?Sized> Oracle<Q> for &O {
    type Answer = O::Answer;
    fn query(&self, q: &Q) -> Result<O::Answer> {
        (**self).query(q)
    }
}

impl<Q: ?Sized, O: Oracle<Q> + ?Sized> Oracle<Q> for Box<O> {
    type Answer = O::Answer;
    fn query(&self, q: &Q) -> Result<O::Answer> {
        (**self).query(q)
    }
}

impl<Q: ?Sized, O: Oracle<Q> + ?Sized> Oracle<Q> for std::sync::Arc<O> {
    type Answer = O::Answer;
    fn query(&self, q: &Q) -> Result<O::Answer> {
        (**self).query(q)
    }
}

/// A colorful-count oracle on binary instances.
pub type CountOracle<'a> = dyn Oracle<ColoredInstance, Answer = Count> + 'a;

/// Oracle backed by a closure.
pub struct FnOracle<F>(pub F);

impl<Q: ?Sized, A, F: Fn(&Q) -> Result<A> + Send + Sync> Oracle<Q> for FnOracle<F> {
    type Answer = A;
    fn query(&self, q: &Q) -> Result<A> {
        (self.0)(q)
    }
}

/// Counts the queries passed through to an inner oracle.
pub struct CallCounter<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O> CallCounter<O> {
    pub fn new(inner: O) -> Self {
        CallCounter { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<Q: ?Sized, O: Oracle<Q>> Oracle<Q> for CallCounter<O> {
    type Answer = O::Answer;
    fn query(&self, q: &Q) -> Result<O::Answer> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.query(q)
    }
}

/// The pattern and host graph of an uncolored counting query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternQuery {
    pub pattern: PatternGraph,
    pub graph: SimpleGraph,
}

/// Exact emb(H → G).
pub struct ExactEmb;

impl Oracle<PatternQuery> for ExactEmb {
    type Answer = Count;
    fn query(&self, q: &PatternQuery) -> Result<Count> {
        emb_count(&q.pattern, &q.graph)
    }
}

/// Exact hom(H → G).
pub struct ExactHom;

impl Oracle<PatternQuery> for ExactHom {
    type Answer = Count;
    fn query(&self, q: &PatternQuery) -> Result<Count> {
        hom_count(&q.pattern, &q.graph)
    }
}

/// Exact colorful count.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactEmbcol;

impl Oracle<ColoredInstance> for ExactEmbcol {
    type Answer = Count;
    fn query(&self, x: &ColoredInstance) -> Result<Count> {
        embcol_count(x)
    }
}

/// Answers a wrong value on the instances whose salted hash falls below δ,
/// and the exact count elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct CorruptEmbcol {
    pub delta: f64,
    pub salt: u64,
}

impl CorruptEmbcol {
    pub fn is_corrupted(&self, x: &ColoredInstance) -> bool {
        unit_interval(x.fingerprint(self.salt)) < self.delta
    }
}

impl Oracle<ColoredInstance> for CorruptEmbcol {
    type Answer = Count;
    fn query(&self, x: &ColoredInstance) -> Result<Count> {
        let truth = embcol_count(x)?;
        let h = x.fingerprint(self.salt);
        if unit_interval(h) < self.delta {
            Ok(truth + 1 + (h % 97) as Count)
        } else {
            Ok(truth)
        }
    }
}

/// Larger than any count the enumeration guard lets through, hence always wrong.
pub const WRONG_CONSTANT: Count = 1_000_000_007;

/// Answers the same value to every query.
#[derive(Clone, Copy, Debug)]
pub struct ConstantOracle(pub Count);

impl Default for ConstantOracle {
    fn default() -> Self {
        ConstantOracle(WRONG_CONSTANT)
    }
}

impl Oracle<ColoredInstance> for ConstantOracle {
    type Answer = Count;
    fn query(&self, _: &ColoredInstance) -> Result<Count> {
        Ok(self.0)
    }
}

/// Oracle that is never reachable.
pub struct Unavailable;

impl<Q: ?Sized> Oracle<Q> for Unavailable {
    type Answer = Count;
    fn query(&self, _: &Q) -> Result<Count> {
        Err(Error::Oracle("oracle unavailable".into()))
    }
}

/// Parsed form of the `exact | corrupt:δ | constant[:v]` oracle flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleSpec {
    Exact,
    Corrupt { delta: f64 },
    Constant { value: u64 },
}

impl OracleSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("unknown oracle spec {s:?}"));
        match s.split_once(':') {
            None if s == "exact" => Ok(OracleSpec::Exact),
            None if s == "constant" => Ok(OracleSpec::Constant { value: WRONG_CONSTANT as u64 }),
            Some(("corrupt", d)) => {
                let delta: f64 = d.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&delta) {
                    return Err(bad());
                }
                Ok(OracleSpec::Corrupt { delta })
            }
            Some(("constant", v)) => Ok(OracleSpec::Constant { value: v.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }

    pub fn build(self, salt: u64) -> Box<CountOracle<'static>> {
        match self {
            OracleSpec::Exact => Box::new(ExactEmbcol),
            OracleSpec::Corrupt { delta } => Box::new(CorruptEmbcol { delta, salt }),
            OracleSpec::Constant { value } => Box::new(ConstantOracle(value as Count)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::rand_colored;
    use crate::rng;

    #[test]
    fn corruption_measure_tracks_delta() {
        let h = PatternGraph::biclique(1, 1);
        let o = CorruptEmbcol { delta: 0.1, salt: 3 };
        let mut r = rng::stream(1);
        let trials = 20_000;
        let mut wrong = 0;
        for _ in 0..trials {
            let x = rand_colored(&h, 4, &mut r);
            let truth = embcol_count(&x).unwrap();
            let ans = o.query(&x).unwrap();
            assert_eq!(ans != truth, o.is_corrupted(&x));
            assert_eq!(ans, o.query(&x).unwrap());
            wrong += (ans != truth) as u32;
        }
        let rate = wrong as f64 / trials as f64;
        assert!((rate - 0.1).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn spec_parsing_and_counting() {
        assert_eq!(OracleSpec::parse("exact").unwrap(), OracleSpec::Exact);
        assert_eq!(OracleSpec::parse("corrupt:0.01").unwrap(), OracleSpec::Corrupt { delta: 0.01 });
        assert_eq!(OracleSpec::parse("constant:5").unwrap(), OracleSpec::Constant { value: 5 });
        assert!(OracleSpec::parse("corrupt:2").is_err());
        let c = CallCounter::new(ExactEmbcol);
        let x = rand_colored(&PatternGraph::biclique(1, 1), 2, &mut rng::stream(0));
        c.query(&x).unwrap();
        c.query(&x).unwrap();
        assert_eq!(c.calls(), 2);
    }
}
