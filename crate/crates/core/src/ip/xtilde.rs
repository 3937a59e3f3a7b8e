//! The curve through the 2^k half-size restrictions of an instance.

use crate::error::{Error, Result};
use crate::ffield::{interpolate, lagrange_basis_at, FieldElem, PrimeModulus, UniPoly};
use crate::graphs::{ColoredInstance, Domain, PatternGraph};

fn field_of(x: &ColoredInstance) -> Result<PrimeModulus> {
    x.modulus().ok_or_else(|| Error::Precondition("the curve lives over a field instance".into()))
}

/// For each pattern edge (i, j), the four sums Σ_{η: η(i)=bi, η(j)=bj} δ_η(z),
/// indexed by 2·bi + bj.
pub fn half_weights(pattern: &PatternGraph, q: PrimeModulus, z: FieldElem) -> Vec<[FieldElem; 4]> {
    let k = pattern.k();
    let delta = lagrange_basis_at(q, 1 << k, z);
    pattern
        .edges()
        .iter()
        .map(|&(i, j)| {
            let mut w = [FieldElem::ZERO; 4];
            for (eta, &d) in delta.iter().enumerate() {
                let slot = 2 * (eta >> i & 1) + (eta >> j & 1);
                w[slot] = q.add(w[slot], d);
            }
            w
        })
        .collect()
}

/// x̃(z) = Σ_η δ_η(z) · x[E_η] for a field instance of even size.
pub fn xtilde_at(x: &ColoredInstance, z: FieldElem) -> Result<ColoredInstance> {
    let q = field_of(x)?;
    if !x.n().is_multiple_of(2) {
        return Err(Error::OddSize(x.n()));
    }
    let h = x.n() / 2;
    let weights = half_weights(x.pattern(), q, z);
    let mut out = ColoredInstance::zeros(x.pattern().clone(), h, Domain::Field(q));
    for (e, w) in weights.iter().enumerate() {
        let block = out.block_mut(e);
        for u in 0..h {
            for v in 0..h {
                let mut acc = FieldElem::ZERO;
                for (slot, &wt) in w.iter().enumerate() {
                    if !wt.is_zero() {
                        let (bi, bj) = (slot >> 1, slot & 1);
                        acc = q.add(acc, q.mul(wt, x.field_entry(e, bi * h + u, bj * h + v)));
                    }
                }
                block[u * h + v] = acc.value();
            }
        }
    }
    Ok(out)
}

/// Field operations [`xtilde_at`] performs: the basis plus four
/// multiply-adds per output slot.
pub fn xtilde_cost(pattern: &PatternGraph, n: usize) -> u64 {
    let nodes = 1u64 << pattern.k();
    let slots = (pattern.num_edges() * (n / 2) * (n / 2)) as u64;
    nodes * nodes + nodes * pattern.num_edges() as u64 + 8 * slots
}

/// x̃ as explicit per-slot polynomials of degree ≤ 2^k − 1.
#[derive(Clone, Debug)]
pub struct XTilde {
    pattern: PatternGraph,
    q: PrimeModulus,
    half: usize,
    polys: Vec<Vec<UniPoly>>,
}

impl XTilde {
    pub fn poly(&self, e: usize, u: usize, v: usize) -> &UniPoly {
        &self.polys[e][u * self.half + v]
    }

    pub fn eval(&self, z: FieldElem) -> ColoredInstance {
        let mut out = ColoredInstance::zeros(self.pattern.clone(), self.half, Domain::Field(self.q));
        for (e, polys) in self.polys.iter().enumerate() {
            for (slot, p) in polys.iter().enumerate() {
                out.block_mut(e)[slot] = p.eval(self.q, z).value();
            }
        }
        out
    }
}

/// Interpolate every slot through its values on the restrictions x[E_η].
pub fn build_xtilde(x: &ColoredInstance) -> Result<XTilde> {
    let q = field_of(x)?;
    let nodes = 1u64 << x.pattern().k();
    let halves = (0..nodes).map(|eta| x.restrict_half(eta)).collect::<Result<Vec<_>>>()?;
    let half = x.n() / 2;
    let polys = (0..x.pattern().num_edges())
        .map(|e| {
            (0..half * half)
                .map(|slot| {
                    let points: Vec<_> =
                        halves.iter().enumerate().map(|(eta, y)| (q.elem(eta as u64), q.elem(y.block(e)[slot]))).collect();
                    interpolate(&points, q)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(XTilde { pattern: x.pattern().clone(), q, half, polys })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::rand_field;
    use crate::rng;

    fn field() -> PrimeModulus {
        PrimeModulus::new(1_000_003).unwrap()
    }

    #[test]
    fn restrictions_on_the_grid() {
        let q = field();
        let mut r = rng::stream(1);
        let h12 = PatternGraph::biclique(1, 2);
        let x = rand_field(&h12, 4, q, &mut r);
        let zero = xtilde_at(&x, FieldElem::ZERO).unwrap();
        assert_eq!(zero.blocks(), x.restrict_half(0).unwrap().blocks());
        let h11 = PatternGraph::biclique(1, 1);
        for _ in 0..20 {
            let x = rand_field(&h11, 2, q, &mut r);
            for eta in 0..4 {
                assert_eq!(xtilde_at(&x, q.elem(eta)).unwrap().blocks(), x.restrict_half(eta).unwrap().blocks());
            }
        }
    }

    #[test]
    fn explicit_and_direct_curves_agree() {
        let q = field();
        let mut r = rng::stream(2);
        for h in [PatternGraph::biclique(1, 1), PatternGraph::biclique(1, 2)] {
            let x = rand_field(&h, 4, q, &mut r);
            let xt = build_xtilde(&x).unwrap();
            for e in 0..h.num_edges() {
                for slot in 0..4 {
                    assert!(xt.poly(e, slot / 2, slot % 2).degree().unwrap_or(0) < 1 << h.k());
                }
            }
            for _ in 0..10 {
                let z = q.random(&mut r);
                assert_eq!(xt.eval(z), xtilde_at(&x, z).unwrap());
            }
        }
    }

    #[test]
    fn constant_instance_gives_constant_curves() {
        let q = field();
        let h = PatternGraph::biclique(1, 2);
        let mut x = ColoredInstance::zeros(h.clone(), 4, Domain::Field(q));
        for e in 0..h.num_edges() {
            x.block_mut(e).fill(42);
        }
        let xt = build_xtilde(&x).unwrap();
        for e in 0..h.num_edges() {
            for slot in 0..4 {
                assert_eq!(xt.poly(e, slot / 2, slot % 2), &UniPoly::constant(q.elem(42)));
            }
        }
        assert!(xtilde_at(&ColoredInstance::zeros(h, 3, Domain::Field(q)), FieldElem::ONE).is_err());
    }
}
