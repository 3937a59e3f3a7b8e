//! Worst-case to average-case reduction for colorful counting: local decoding
//! of the counting polynomial along random quadratic curves, and evaluation
//! over F_q from a binary-input oracle via sampled binary expansions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::Count;
use crate::error::{Error, Result};
use crate::ffield::{berlekamp_welch, checked_pow, sample_prime_between, FieldElem, PrimeModulus};
use crate::graphs::{rand_field, ColoredInstance, Domain, PatternGraph};
use crate::oracle::{CallCounter, Oracle};
use crate::rng::{self, hash_words};

/// Upper bound on t^{|E(H)|} binary queries per field evaluation.
pub const MAX_EXPANSION_QUERIES: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtaConfig {
    /// Curve points per unit of curve degree: m = multiplier · 2·deg.
    pub curve_points_multiplier: u64,
    /// Expansion length; `None` picks [`default_bits`].
    pub bits: Option<u32>,
    pub majority_repeats: u32,
    /// Pins the field instead of sampling a fresh prime.
    pub modulus: Option<PrimeModulus>,
}

impl Default for WtaConfig {
    fn default() -> Self {
        WtaConfig { curve_points_multiplier: 100, bits: None, majority_repeats: 1, modulus: None }
    }
}

/// Concrete parameters of one reduction run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtaParams {
    pub q: PrimeModulus,
    pub t: u32,
    pub m: usize,
    /// Total degree of the counting polynomial, |E(H)|.
    pub degree: usize,
}

impl WtaParams {
    /// Binary queries per field evaluation, t^{|E(H)|}.
    pub fn expansion_queries(&self) -> u64 {
        (self.t as u64).pow(self.degree as u32)
    }

    pub fn queries_per_decode(&self) -> u64 {
        self.m as u64 * self.expansion_queries()
    }
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// ⌈log₂ q⌉ + 32 + ⌈log₂(|E(H)|·n²)⌉, capped at 127.
pub fn default_bits(q: PrimeModulus, num_edges: usize, n: usize) -> u32 {
    (q.bits() + 32 + ceil_log2((num_edges * n * n) as u64)).min(127)
}

impl WtaConfig {
    pub fn curve_points(&self, degree: usize) -> Result<usize> {
        let m = self.curve_points_multiplier as usize * 2 * degree;
        if m < 2 * degree + 1 {
            return Err(Error::Precondition(format!(
                "{m} curve points cannot decode a degree-{} restriction",
                2 * degree
            )));
        }
        Ok(m)
    }

    /// Fix q, t and m for a pattern and class size. A sampled q lies in
    /// (L, 2L) with L = max(n^{|V(H)|}, m, 12·deg).
    pub fn resolve<R: Rng + ?Sized>(&self, pattern: &PatternGraph, n: usize, rng: &mut R) -> Result<WtaParams> {
        let degree = pattern.num_edges();
        if degree == 0 {
            return Err(Error::Precondition("pattern has no edges".into()));
        }
        let m = self.curve_points(degree)?;
        let nk = checked_pow(n as u64, pattern.k() as u32)
            .filter(|&v| v < 1 << 61)
            .ok_or_else(|| Error::Precondition(format!("{n}^{} is too large for the field", pattern.k())))?;
        let floor = nk.max(m as u64).max(12 * degree as u64);
        let q = match self.modulus {
            Some(q) => q,
            None => sample_prime_between(floor, 2 * floor, rng)?,
        };
        if q.q() <= floor {
            return Err(Error::Precondition(format!("pinned q = {q} must exceed {floor}")));
        }
        let t = self.bits.unwrap_or_else(|| default_bits(q, degree, n));
        if t > 127 || (1u128 << t) <= q.q() as u128 {
            return Err(Error::Precondition(format!("t = {t} must satisfy q < 2^t <= 2^127")));
        }
        let params = WtaParams { q, t, m, degree };
        if params.expansion_queries() > MAX_EXPANSION_QUERIES {
            return Err(Error::Guard(format!("{}^{degree} binary queries per evaluation", t)));
        }
        Ok(params)
    }
}

/// A uniform L ≡ x (mod q) in [0, 2^t): L = Kq + x with K uniform in
/// [0, ⌊(2^t − x − 1)/q⌋]. Bit i of the result is bit i of L.
pub fn binary_expansion_sample<R: Rng + ?Sized>(x: FieldElem, q: PrimeModulus, t: u32, rng: &mut R) -> Result<u128> {
    if t > 127 || (1u128 << t) <= q.q() as u128 {
        return Err(Error::Precondition(format!("2^{t} must exceed q = {q}")));
    }
    let top = ((1u128 << t) - x.value() as u128 - 1) / q.q() as u128;
    let k = rng.gen_range(0..=top);
    let l = k * q.q() as u128 + x.value() as u128;
    assert_eq!(l % q.q() as u128, x.value() as u128, "binary expansion lost its residue");
    Ok(l)
}

/// Sampled expansions of every edge slot of a field instance.
#[derive(Clone, Debug)]
pub struct BinaryExpansion {
    pattern: PatternGraph,
    n: usize,
    t: u32,
    values: Vec<Vec<u128>>,
}

impl BinaryExpansion {
    pub fn sample<R: Rng + ?Sized>(x: &ColoredInstance, t: u32, rng: &mut R) -> Result<Self> {
        let q = x.modulus().ok_or_else(|| Error::Precondition("expansion needs a field instance".into()))?;
        let values = (0..x.pattern().num_edges())
            .map(|e| x.block(e).iter().map(|&w| binary_expansion_sample(q.elem(w), q, t, rng)).collect())
            .collect::<Result<_>>()?;
        Ok(BinaryExpansion { pattern: x.pattern().clone(), n: x.n(), t, values })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// χ^{(a)}: slot (u, v) of pattern edge e takes bit a[e] of its expansion.
    pub fn chi(&self, a: &[u32]) -> ColoredInstance {
        let blocks = self
            .values
            .iter()
            .zip(a)
            .map(|(block, &bit)| block.iter().map(|&l| (l >> bit & 1) as u64).collect())
            .collect();
        ColoredInstance::from_blocks(self.pattern.clone(), self.n, Domain::Binary, blocks)
            .expect("expansion keeps the block layout")
    }
}

/// Digits of `index` in base t, one per pattern edge.
fn digits(mut index: u64, t: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (index % t as u64) as u32;
            index /= t as u64;
            d
        })
        .collect()
}

/// EMBCOLPOLY(x) over F_q as Σ_a 2^{Σ a} · oracle(χ^{(a)}), with exactly
/// t^{|E(H)|} oracle calls.
pub fn fq_to_binary<O, R>(x: &ColoredInstance, oracle: &O, t: u32, rng: &mut R) -> Result<FieldElem>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
    R: Rng + ?Sized,
{
    let q = x.modulus().ok_or_else(|| Error::Precondition("fq_to_binary needs a field instance".into()))?;
    let expansion = BinaryExpansion::sample(x, t, rng)?;
    let edges = x.pattern().num_edges();
    let total = (t as u64)
        .checked_pow(edges as u32)
        .filter(|&c| c <= MAX_EXPANSION_QUERIES)
        .ok_or_else(|| Error::Guard(format!("{t}^{edges} binary queries")))?;
    let two = q.elem(2);
    (0..total)
        .into_par_iter()
        .map(|index| {
            let a = digits(index, t, edges);
            let answer = q.from_u128(oracle.query(&expansion.chi(&a))?);
            let shift: u64 = a.iter().map(|&d| d as u64).sum();
            Ok(q.mul(q.pow(two, shift), answer))
        })
        .try_reduce(|| FieldElem::ZERO, |u, v| Ok(q.add(u, v)))
}

/// Field-instance evaluator backed by [`fq_to_binary`]. Randomness for each
/// query is keyed by the instance, so parallel evaluation is reproducible.
pub struct ExpansionEvaluator<O> {
    pub oracle: O,
    pub t: u32,
    pub seed: u64,
}

impl<O: Oracle<ColoredInstance, Answer = Count>> Oracle<ColoredInstance> for ExpansionEvaluator<O> {
    type Answer = FieldElem;
    fn query(&self, x: &ColoredInstance) -> Result<FieldElem> {
        let mut r = rng::stream(hash_words(self.seed, [x.fingerprint(self.seed)]));
        fq_to_binary(x, &self.oracle, self.t, &mut r)
    }
}

/// Local decoding of a degree-`degree` polynomial at y from an evaluator that
/// is right on most of F_q^N: restrict to y + z₁s + z₂s², read s = 1..m,
/// Berlekamp–Welch with degree 2·degree, return the value at s = 0.
pub fn local_decode<E, R>(y: &ColoredInstance, evaluator: &E, degree: usize, m: usize, rng: &mut R) -> Result<FieldElem>
where
    E: Oracle<ColoredInstance, Answer = FieldElem> + ?Sized,
    R: Rng + ?Sized,
{
    let q = y.modulus().ok_or_else(|| Error::Precondition("local_decode needs a field instance".into()))?;
    if q.q() <= 12 * degree as u64 || q.q() <= m as u64 {
        return Err(Error::Precondition(format!("q = {q} must exceed both 12·{degree} and m = {m}")));
    }
    let z1 = rand_field(y.pattern(), y.n(), q, rng);
    let z2 = rand_field(y.pattern(), y.n(), q, rng);
    let points = (1..=m as u64)
        .into_par_iter()
        .map(|s| {
            let s = q.elem(s);
            let s2 = q.mul(s, s);
            let mut point = y.clone();
            for e in 0..y.pattern().num_edges() {
                let block = point.block_mut(e);
                for (slot, w) in block.iter_mut().enumerate() {
                    let lin = q.mul(q.elem(z1.block(e)[slot]), s);
                    let quad = q.mul(q.elem(z2.block(e)[slot]), s2);
                    *w = q.add(q.add(q.elem(*w), lin), quad).value();
                }
            }
            Ok((s, evaluator.query(&point)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = berlekamp_welch(&points, 2 * degree, q)?;
    Ok(f.eval(q, FieldElem::ZERO))
}

/// Result of one worst-case evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtaRun {
    pub count: Count,
    pub params: WtaParams,
    pub oracle_calls: u64,
    pub failed_repeats: u32,
}

/// embcol of an arbitrary binary instance from an oracle that is only right
/// on most random binary instances.
pub fn worst_to_avg<O, R>(x: &ColoredInstance, oracle: &O, cfg: &WtaConfig, rng: &mut R) -> Result<WtaRun>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
    R: Rng + ?Sized,
{
    if !x.is_binary() {
        return Err(Error::Precondition("worst_to_avg needs a binary instance".into()));
    }
    let params = cfg.resolve(x.pattern(), x.n(), rng)?;
    worst_to_avg_with(x, oracle, &params, cfg.majority_repeats.max(1), rng)
}

/// [`worst_to_avg`] with the field and lengths already fixed.
pub fn worst_to_avg_with<O, R>(
    x: &ColoredInstance,
    oracle: &O,
    params: &WtaParams,
    repeats: u32,
    rng: &mut R,
) -> Result<WtaRun>
where
    O: Oracle<ColoredInstance, Answer = Count> + ?Sized,
    R: Rng + ?Sized,
{
    let y = x.to_field(params.q);
    let evaluator = ExpansionEvaluator { oracle: CallCounter::new(oracle), t: params.t, seed: rng.gen() };
    let mut votes: Vec<(FieldElem, u32)> = Vec::new();
    let mut failed = 0;
    let mut last_err = None;
    for _ in 0..repeats {
        let before = evaluator.oracle.calls();
        let decoded = local_decode(&y, &evaluator, params.degree, params.m, rng);
        match decoded {
            Ok(v) => {
                assert_eq!(evaluator.oracle.calls() - before, params.queries_per_decode());
                match votes.iter_mut().find(|(w, _)| *w == v) {
                    Some((_, c)) => *c += 1,
                    None => votes.push((v, 1)),
                }
            }
            Err(e @ Error::DecodeFailure(_)) => {
                failed += 1;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    let (value, _) = votes
        .into_iter()
        .max_by_key(|&(v, c)| (c, std::cmp::Reverse(v.value())))
        .ok_or_else(|| last_err.unwrap_or(Error::DecodeFailure("no decode attempts")))?;
    Ok(WtaRun {
        count: value.value() as Count,
        params: *params,
        oracle_calls: evaluator.oracle.calls(),
        failed_repeats: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{embcol_count, embcolpoly_eval};
    use crate::graphs::rand_colored;
    use crate::oracle::{ConstantOracle, CorruptEmbcol, ExactEmbcol, FnOracle};
    use crate::rng::unit_interval;

    fn field_poly() -> impl Oracle<ColoredInstance, Answer = FieldElem> {
        FnOracle(|x: &ColoredInstance| embcolpoly_eval(x, None))
    }

    fn k11() -> PatternGraph {
        PatternGraph::biclique(1, 1)
    }

    #[test]
    fn expansion_example_and_congruence() {
        let q = PrimeModulus::new(5).unwrap();
        let mut r = rng::stream(1);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..300 {
            seen.insert(binary_expansion_sample(q.elem(3), q, 4, &mut r).unwrap());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![3, 8, 13]);
        assert_eq!(8u128 >> 3 & 1, 1);
        for qq in [5u64, 7, 101] {
            let q = PrimeModulus::new(qq).unwrap();
            for _ in 0..100_000 / 3 {
                let x = q.random(&mut r);
                let l = binary_expansion_sample(x, q, 12, &mut r).unwrap();
                assert_eq!(l % qq as u128, x.value() as u128);
                assert!(l < 1 << 12);
            }
        }
        assert!(binary_expansion_sample(q.elem(1), q, 2, &mut r).is_err());
    }

    #[test]
    fn expansion_bits_are_nearly_fair() {
        let q = PrimeModulus::new(5).unwrap();
        let mut r = rng::stream(2);
        let draws = 100_000;
        let mut ones = [0u32; 12];
        for _ in 0..draws {
            let l = binary_expansion_sample(q.random(&mut r), q, 12, &mut r).unwrap();
            for (i, c) in ones.iter_mut().enumerate() {
                *c += (l >> i & 1) as u32;
            }
        }
        for c in ones {
            let tv = (c as f64 / draws as f64 - 0.5).abs();
            assert!(tv <= 0.01, "bit bias {tv}");
        }
    }

    #[test]
    fn expansion_identity_exhaustive() {
        let mut r = rng::stream(3);
        let q = PrimeModulus::new(13).unwrap();
        for n in 1..=4 {
            for t in 4..=4 {
                let x = rand_field(&k11(), n, q, &mut r);
                let exp = BinaryExpansion::sample(&x, t, &mut r).unwrap();
                let mut total = FieldElem::ZERO;
                for a in 0..t {
                    let chi = exp.chi(&[a]).to_field(q);
                    total = q.add(total, q.mul(q.pow(q.elem(2), a as u64), embcolpoly_eval(&chi, None).unwrap()));
                }
                assert_eq!(total, embcolpoly_eval(&x, None).unwrap());
            }
        }
        let h = PatternGraph::biclique(1, 2);
        for _ in 0..5 {
            let x = rand_field(&h, 3, q, &mut r);
            let exp = BinaryExpansion::sample(&x, 4, &mut r).unwrap();
            let mut total = FieldElem::ZERO;
            for a0 in 0..4 {
                for a1 in 0..4 {
                    let chi = exp.chi(&[a0, a1]).to_field(q);
                    let w = q.pow(q.elem(2), (a0 + a1) as u64);
                    total = q.add(total, q.mul(w, embcolpoly_eval(&chi, None).unwrap()));
                }
            }
            assert_eq!(total, embcolpoly_eval(&x, None).unwrap());
        }
    }

    #[test]
    fn fq_to_binary_exact() {
        let mut r = rng::stream(4);
        let cfg = WtaConfig::default();
        let p = cfg.resolve(&k11(), 4, &mut r).unwrap();
        for _ in 0..100 {
            let x = rand_field(&k11(), 4, p.q, &mut r);
            assert_eq!(fq_to_binary(&x, &ExactEmbcol, p.t, &mut r).unwrap(), embcolpoly_eval(&x, None).unwrap());
        }
        let h = PatternGraph::biclique(1, 2);
        let p = cfg.resolve(&h, 4, &mut r).unwrap();
        for _ in 0..30 {
            let x = rand_field(&h, 4, p.q, &mut r);
            let counter = CallCounter::new(ExactEmbcol);
            assert_eq!(fq_to_binary(&x, &counter, p.t, &mut r).unwrap(), embcolpoly_eval(&x, None).unwrap());
            assert_eq!(counter.calls(), (p.t as u64).pow(2));
        }
        let x = rand_field(&k11(), 4, p.q, &mut r);
        assert!(fq_to_binary(&x, &ExactEmbcol, p.q.bits() - 1, &mut r).is_err());
    }

    #[test]
    fn local_decode_exact_and_noisy() {
        let mut r = rng::stream(5);
        let p = WtaConfig::default().resolve(&k11(), 4, &mut r).unwrap();
        let adversarial = [
            ColoredInstance::zeros(k11(), 4, Domain::Binary),
            {
                let mut x = ColoredInstance::zeros(k11(), 4, Domain::Binary);
                x.block_mut(0).fill(1);
                x
            },
        ];
        for i in 0..100 {
            let y = if i < 2 { adversarial[i].clone() } else { rand_colored(&k11(), 4, &mut r) };
            let yq = y.to_field(p.q);
            let v = local_decode(&yq, &field_poly(), 1, p.m, &mut r).unwrap();
            assert_eq!(v, embcolpoly_eval(&yq, None).unwrap());
        }
        let noisy = FnOracle(|x: &ColoredInstance| {
            let v = embcolpoly_eval(x, None)?;
            let q = x.modulus().unwrap();
            Ok(if unit_interval(x.fingerprint(77)) < 0.01 { q.add(v, FieldElem::ONE) } else { v })
        });
        let mut good = 0;
        for _ in 0..200 {
            let yq = rand_colored(&k11(), 4, &mut r).to_field(p.q);
            good += (local_decode(&yq, &noisy, 1, p.m, &mut r).ok() == Some(embcolpoly_eval(&yq, None).unwrap())) as u32;
        }
        assert!(good >= 180, "{good}/200");
        let zero = FnOracle(|_: &ColoredInstance| Ok(FieldElem::ZERO));
        let yq = rand_colored(&k11(), 4, &mut r).to_field(p.q);
        assert_eq!(local_decode(&yq, &zero, 1, p.m, &mut r).unwrap(), FieldElem::ZERO);
    }

    #[test]
    fn worst_case_exact_oracle() {
        let mut r = rng::stream(6);
        let cfg = WtaConfig { curve_points_multiplier: 10, ..WtaConfig::default() };
        for n in [2usize, 4, 8] {
            let mut inputs = vec![ColoredInstance::zeros(k11(), n, Domain::Binary)];
            let mut full = ColoredInstance::zeros(k11(), n, Domain::Binary);
            full.block_mut(0).fill(1);
            inputs.push(full);
            let mut star = ColoredInstance::zeros(k11(), n, Domain::Binary);
            for v in 0..n {
                star.set(0, 0, v, 1);
            }
            inputs.push(star);
            for _ in 0..3 {
                inputs.push(rand_colored(&k11(), n, &mut r));
            }
            for x in inputs {
                let run = worst_to_avg(&x, &ExactEmbcol, &cfg, &mut r).unwrap();
                assert_eq!(run.count, embcol_count(&x).unwrap());
                assert_eq!(run.oracle_calls, run.params.queries_per_decode());
            }
        }
    }

    #[test]
    fn worst_case_degenerate_oracles() {
        let mut r = rng::stream(7);
        let cfg = WtaConfig { curve_points_multiplier: 10, ..WtaConfig::default() };
        let x = rand_colored(&k11(), 4, &mut r);
        let truth = embcol_count(&x).unwrap();
        // a constant answer decodes to a constant mod q, right only by coincidence
        let full = WtaConfig::default();
        let mut wrong = 0;
        for _ in 0..20 {
            let run = worst_to_avg(&x, &ConstantOracle::default(), &full, &mut r);
            wrong += run.map_or(true, |run| run.count != truth) as u32;
        }
        assert!(wrong >= 18, "{wrong}/20");
        let corrupt = CorruptEmbcol { delta: 0.01, salt: 5 };
        let mut ok = 0;
        for _ in 0..10 {
            ok += worst_to_avg(&x, &corrupt, &cfg, &mut r).is_ok_and(|run| run.count == truth) as u32;
        }
        assert!(ok >= 7, "{ok}/10");
    }

    #[test]
    fn parameter_checks() {
        let mut r = rng::stream(8);
        let cfg = WtaConfig::default();
        let p = cfg.resolve(&PatternGraph::biclique(1, 2), 5, &mut r).unwrap();
        assert_eq!(p.m, 400);
        assert!(p.q.q() > 400 && p.q.q() < 800);
        assert!(p.t >= p.q.bits() + 32);
        let tiny = WtaConfig { curve_points_multiplier: 0, ..cfg };
        assert!(tiny.resolve(&k11(), 4, &mut r).is_err());
        let pinned = WtaConfig { modulus: Some(PrimeModulus::new(7).unwrap()), ..cfg };
        assert!(pinned.resolve(&k11(), 4, &mut r).is_err());
        assert_eq!(digits(11, 3, 3), vec![2, 0, 1]);
    }
}
