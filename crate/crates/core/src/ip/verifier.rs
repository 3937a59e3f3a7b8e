//! The verifier as a state machine, the in-process driver and replay.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prover::Prover;
use super::xtilde::{xtilde_at, xtilde_cost};
use super::{round_degree, RejectReason, RoundEntry, Session, Transcript, Verdict};
use crate::error::{Error, Result};
use crate::ffield::{FieldElem, PrimeModulus, UniPoly};
use crate::graphs::ColoredInstance;

/// Field operations the verifier performed, per interactive round plus the
/// final check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierStats {
    pub round_ops: Vec<u64>,
    pub final_ops: u64,
}

/// Verifier side of one session.
pub struct Verifier<R> {
    session: Session,
    q: PrimeModulus,
    degree: usize,
    x: ColoredInstance,
    claim: FieldElem,
    rounds: Vec<RoundEntry>,
    verdict: Option<Verdict>,
    stats: VerifierStats,
    rng: R,
}

/// n = 1: the single colorful tuple's weight product.
fn direct_value(x: &ColoredInstance, q: PrimeModulus) -> (FieldElem, u64) {
    debug_assert_eq!(x.n(), 1);
    let value = (0..x.pattern().num_edges()).fold(FieldElem::ONE, |acc, e| q.mul(acc, x.field_entry(e, 0, 0)));
    (value, x.pattern().num_edges() as u64)
}

/// Σ_{z < 2^k} G(z) and its cost.
fn grid_sum(poly: &UniPoly, q: PrimeModulus, k: usize) -> (FieldElem, u64) {
    let nodes = 1u64 << k;
    let sum = q.sum((0..nodes).map(|z| poly.eval(q, q.elem(z))));
    (sum, nodes * 2 * poly.coeffs().len().max(1) as u64)
}

impl<R: Rng> Verifier<R> {
    pub fn new(session: Session, rng: R) -> Self {
        Verifier {
            q: session.q,
            degree: round_degree(&session.pattern),
            x: session.instance.clone(),
            claim: session.claim,
            session,
            rounds: Vec::new(),
            verdict: None,
            stats: VerifierStats::default(),
            rng,
        }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// The instance and claim the next round polynomial must address.
    pub fn current(&self) -> (&ColoredInstance, FieldElem) {
        (&self.x, self.claim)
    }

    pub fn round(&self) -> usize {
        self.rounds.len()
    }

    pub fn awaiting_poly(&self) -> bool {
        self.verdict.is_none() && self.x.n() > 1
    }

    fn reject(&mut self, reason: RejectReason, poly: Vec<FieldElem>) {
        let round = self.round();
        self.rounds.push(RoundEntry::Rejected { poly });
        self.verdict = Some(Verdict::Reject { round, reason });
    }

    /// Check one round polynomial. Returns the challenge if the round passes.
    pub fn receive(&mut self, coeffs: Vec<FieldElem>) -> Option<FieldElem> {
        assert!(self.awaiting_poly(), "no round polynomial expected");
        let q = self.q;
        if coeffs.len() != self.degree + 1 || coeffs.iter().any(|c| c.value() >= q.q()) {
            self.reject(RejectReason::Malformed, coeffs);
            return None;
        }
        let poly = UniPoly::new(coeffs.clone());
        let (sum, mut ops) = grid_sum(&poly, q, self.x.pattern().k());
        if sum != self.claim {
            self.stats.round_ops.push(ops);
            self.reject(RejectReason::SumMismatch, coeffs);
            return None;
        }
        let challenge = q.random(&mut self.rng);
        let next = xtilde_at(&self.x, challenge).expect("power-of-two sizes halve cleanly");
        ops += xtilde_cost(self.x.pattern(), self.x.n()) + 2 * coeffs.len() as u64;
        self.stats.round_ops.push(ops);
        self.claim = poly.eval(q, challenge);
        self.x = next;
        self.rounds.push(RoundEntry::Interactive { poly: coeffs, challenge, claim_after: self.claim });
        Some(challenge)
    }

    /// Run the final check if no verdict has been reached yet.
    pub fn finish(mut self) -> (Transcript, VerifierStats) {
        if self.verdict.is_none() {
            assert_eq!(self.x.n(), 1, "rounds remain");
            let (value, ops) = direct_value(&self.x, self.q);
            self.stats.final_ops = ops;
            let round = self.round();
            self.rounds.push(RoundEntry::Final { value });
            self.verdict = Some(if value == self.claim {
                Verdict::Accept
            } else {
                Verdict::Reject { round, reason: RejectReason::FinalMismatch }
            });
        }
        let transcript =
            Transcript { session: self.session, rounds: self.rounds, verdict: self.verdict.expect("verdict set") };
        (transcript, self.stats)
    }
}

/// Run a session in process.
pub fn run_ip<P: Prover + ?Sized, R: Rng>(session: Session, prover: &mut P, rng: R) -> Result<Transcript> {
    run_ip_with_stats(session, prover, rng).map(|(t, _)| t)
}

pub fn run_ip_with_stats<P: Prover + ?Sized, R: Rng>(
    session: Session,
    prover: &mut P,
    rng: R,
) -> Result<(Transcript, VerifierStats)> {
    let mut verifier = Verifier::new(session, rng);
    while verifier.awaiting_poly() {
        let (x, claim) = verifier.current();
        let poly = prover.round_poly(verifier.round(), x, claim)?;
        verifier.receive(poly);
    }
    Ok(verifier.finish())
}

/// Re-derive the verdict of a stored transcript from its recorded challenges.
/// A transcript whose recorded values do not follow from its messages is
/// malformed.
pub fn replay(t: &Transcript) -> Result<Verdict> {
    let s = &t.session;
    let q = s.q;
    if s.instance.modulus() != Some(q) || s.instance.n() != s.n0 || s.instance.pattern() != &s.pattern {
        return Err(Error::Malformed("session fields disagree with the instance".into()));
    }
    let degree = round_degree(&s.pattern);
    let mut x = s.instance.clone();
    let mut claim = s.claim;
    let bad = |msg: &str| Err(Error::Malformed(format!("transcript: {msg}")));
    for (round, entry) in t.rounds.iter().enumerate() {
        let is_last = round + 1 == t.rounds.len();
        match entry {
            RoundEntry::Interactive { poly, challenge, claim_after } => {
                if x.n() == 1 || poly.len() != degree + 1 || poly.iter().any(|c| c.value() >= q.q()) {
                    return bad("interactive round after the base case or with a malformed message");
                }
                let g = UniPoly::new(poly.clone());
                if grid_sum(&g, q, s.pattern.k()).0 != claim {
                    return bad("accepted round fails its sum check");
                }
                if g.eval(q, *challenge) != *claim_after {
                    return bad("claim does not follow from the challenge");
                }
                x = xtilde_at(&x, *challenge)?;
                claim = *claim_after;
            }
            RoundEntry::Rejected { poly } => {
                if !is_last {
                    return bad("rounds continue after a rejection");
                }
                let reason = if poly.len() != degree + 1 || poly.iter().any(|c| c.value() >= q.q()) {
                    RejectReason::Malformed
                } else if grid_sum(&UniPoly::new(poly.clone()), q, s.pattern.k()).0 != claim {
                    RejectReason::SumMismatch
                } else {
                    return bad("recorded rejection of a passing message");
                };
                return Ok(Verdict::Reject { round, reason });
            }
            RoundEntry::Final { value } => {
                if !is_last || x.n() != 1 {
                    return bad("final check out of place");
                }
                let (direct, _) = direct_value(&x, q);
                if direct != *value {
                    return bad("recorded final value is not the instance's value");
                }
                return Ok(if direct == claim {
                    Verdict::Accept
                } else {
                    Verdict::Reject { round, reason: RejectReason::FinalMismatch }
                });
            }
        }
    }
    bad("no terminal entry")
}

#[cfg(test)]
mod tests {
    use super::super::prover::{HonestExact, MalformedProver, OptimalCheat};
    use super::super::session_modulus;
    use super::*;
    use crate::counting::embcolpoly_eval;
    use crate::graphs::{rand_field, PatternGraph};
    use crate::rng;

    fn session(h: &PatternGraph, n: usize, seed: u64, lie: bool) -> Session {
        let mut r = rng::stream(seed);
        let q = session_modulus(h, n, 0, &mut r).unwrap();
        let x = rand_field(h, n, q, &mut r);
        let mut c = embcolpoly_eval(&x, None).unwrap();
        if lie {
            c = q.add(c, FieldElem::ONE);
        }
        Session::new(x, c).unwrap()
    }

    #[test]
    fn honest_sessions_accept() {
        for h in [PatternGraph::biclique(1, 1), PatternGraph::biclique(1, 2)] {
            for n in [1, 2, 4, 8] {
                for seed in 0..5 {
                    let s = session(&h, n, seed, false);
                    let (t, stats) = run_ip_with_stats(s, &mut HonestExact::new(), rng::stream(seed)).unwrap();
                    assert_eq!(t.verdict, Verdict::Accept);
                    assert_eq!(t.rounds.len(), n.trailing_zeros() as usize + 1);
                    assert_eq!(replay(&t).unwrap(), Verdict::Accept);
                    let bound = |m: usize| (m * m * (1 << h.k()) * h.num_edges()) as u64 * 16 + (1 << (2 * h.k())) + 64;
                    let mut size = n;
                    for ops in stats.round_ops {
                        assert!(ops <= bound(size), "{ops} > {}", bound(size));
                        size /= 2;
                    }
                }
            }
        }
    }

    #[test]
    fn honest_round_sums_match_claims() {
        let s = session(&PatternGraph::biclique(1, 2), 8, 3, false);
        let t = run_ip(s.clone(), &mut HonestExact::new(), rng::stream(3)).unwrap();
        let mut claim = s.claim;
        for entry in &t.rounds {
            if let RoundEntry::Interactive { poly, claim_after, .. } = entry {
                assert_eq!(grid_sum(&UniPoly::new(poly.clone()), s.q, 3).0, claim);
                claim = *claim_after;
            }
        }
    }

    #[test]
    fn lies_and_malformed_messages_are_rejected() {
        let h = PatternGraph::biclique(1, 2);
        let s = session(&h, 4, 9, true);
        let t = run_ip(s.clone(), &mut HonestExact::new(), rng::stream(0)).unwrap();
        assert_eq!(t.verdict, Verdict::Reject { round: 0, reason: RejectReason::SumMismatch });
        assert_eq!(replay(&t).unwrap(), t.verdict);
        let t = run_ip(s.clone(), &mut MalformedProver, rng::stream(0)).unwrap();
        assert_eq!(t.verdict, Verdict::Reject { round: 0, reason: RejectReason::Malformed });
        let t = run_ip(s, &mut OptimalCheat::new(), rng::stream(0)).unwrap();
        assert!(matches!(t.verdict, Verdict::Reject { reason: RejectReason::FinalMismatch, .. }));
        assert_eq!(replay(&t).unwrap(), t.verdict);
        let base = session(&h, 1, 2, true);
        let t = run_ip(base, &mut HonestExact::new(), rng::stream(0)).unwrap();
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.verdict, Verdict::Reject { round: 0, reason: RejectReason::FinalMismatch });
    }

    #[test]
    fn average_case_prover_is_accepted() {
        use super::super::prover::HonestAvg;
        use crate::oracle::CorruptEmbcol;
        use crate::wta::default_bits;
        let h = PatternGraph::biclique(1, 1);
        let m = 20;
        let mut r = rng::stream(21);
        let q = session_modulus(&h, 4, m as u64, &mut r).unwrap();
        let x = crate::graphs::rand_colored(&h, 4, &mut r).to_field(q);
        let claim = embcolpoly_eval(&x, None).unwrap();
        let oracle = CorruptEmbcol { delta: 0.01, salt: 1 };
        let mut prover = HonestAvg::with_oracle(oracle, 1, default_bits(q, 1, 4), m, 5);
        let t = run_ip(Session::new(x, claim).unwrap(), &mut prover, rng::stream(2)).unwrap();
        assert_eq!(t.verdict, Verdict::Accept);
    }

    #[test]
    fn transcripts_are_deterministic_and_tamper_evident() {
        let s = session(&PatternGraph::biclique(1, 1), 8, 5, false);
        let a = run_ip(s.clone(), &mut HonestExact::new(), rng::stream(11)).unwrap();
        let b = run_ip(s, &mut HonestExact::new(), rng::stream(11)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = Transcript::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        let mut forged = a.clone();
        if let RoundEntry::Interactive { claim_after, .. } = &mut forged.rounds[0] {
            *claim_after = forged.session.q.add(*claim_after, FieldElem::ONE);
        }
        assert!(replay(&forged).is_err());
    }
}
