//! Prime-field arithmetic, univariate polynomials, interpolation and
//! Berlekamp–Welch decoding.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MAX_PRIME_DRAWS: u64 = 1_000_000;

/// An element of F_q, stored reduced. The modulus travels separately.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<u64>()
            .map(FieldElem)
            .map_err(|e| serde::de::Error::custom(format!("bad field element {s:?}: {e}")))
    }
}

/// A prime modulus below 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeModulus(u64);

impl Serialize for PrimeModulus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for PrimeModulus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let q = s
            .parse::<u64>()
            .map_err(|e| serde::de::Error::custom(format!("bad modulus {s:?}: {e}")))?;
        PrimeModulus::new(q).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PrimeModulus {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 63 {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeModulus(q))
    }

    pub fn q(self) -> u64 {
        self.0
    }

    /// Number of bits needed to write q, so that 2^bits > q.
    pub fn bits(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    pub fn elem(self, v: u64) -> FieldElem {
        FieldElem(v % self.0)
    }

    pub fn from_u128(self, v: u128) -> FieldElem {
        FieldElem((v % self.0 as u128) as u64)
    }

    pub fn from_i64(self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.0 as i64) as u64)
    }

    /// Interpret a raw value that must already be reduced.
    pub fn checked(self, v: u64) -> Result<FieldElem> {
        if v < self.0 {
            Ok(FieldElem(v))
        } else {
            Err(Error::Malformed(format!("{v} is not reduced mod {}", self.0)))
        }
    }

    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.0))
    }

    #[inline]
    pub fn add(self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a.0 + b.0;
        FieldElem(if s >= self.0 { s - self.0 } else { s })
    }

    #[inline]
    pub fn sub(self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.0 - b.0 })
    }

    #[inline]
    pub fn neg(self, a: FieldElem) -> FieldElem {
        FieldElem(if a.0 == 0 { 0 } else { self.0 - a.0 })
    }

    #[inline]
    pub fn mul(self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(mulmod(a.0, b.0, self.0))
    }

    pub fn pow(self, a: FieldElem, e: u64) -> FieldElem {
        FieldElem(powmod(a.0, e, self.0))
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.0 - 2))
        }
    }

    pub fn div(self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn sum<I: IntoIterator<Item = FieldElem>>(self, it: I) -> FieldElem {
        it.into_iter().fold(FieldElem::ZERO, |acc, x| self.add(acc, x))
    }
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniformly drawn prime strictly between `lo` and `hi`.
pub fn sample_prime_between<R: Rng + ?Sized>(lo: u64, hi: u64, rng: &mut R) -> Result<PrimeModulus> {
    if hi >= 1 << 63 {
        return Err(Error::ModulusTooLarge(hi));
    }
    if hi <= lo + 1 {
        return Err(Error::PrimeSearchExhausted { lo, hi, draws: 0 });
    }
    for _ in 0..MAX_PRIME_DRAWS {
        let r = rng.gen_range(lo + 1..hi);
        if is_prime(r) {
            return Ok(PrimeModulus(r));
        }
    }
    Err(Error::PrimeSearchExhausted { lo, hi, draws: MAX_PRIME_DRAWS })
}

/// A prime q with `lower < q < 2·lower`.
pub fn sample_prime_above<R: Rng + ?Sized>(lower: u64, rng: &mut R) -> Result<PrimeModulus> {
    if lower >= 1 << 62 {
        return Err(Error::Precondition(format!("lower bound {lower} must be below 2^62")));
    }
    sample_prime_between(lower, 2 * lower, rng)
}

/// A prime q with n^k < q < 2·n^k.
pub fn sample_prime_for<R: Rng + ?Sized>(n: u64, k: u32, rng: &mut R) -> Result<PrimeModulus> {
    if n < 2 || k < 1 {
        return Err(Error::Precondition(format!("need n >= 2 and k >= 1, got n={n}, k={k}")));
    }
    let nk = checked_pow(n, k)
        .filter(|&v| v < 1 << 62)
        .ok_or_else(|| Error::Precondition(format!("{n}^{k} must be below 2^62")))?;
    sample_prime_above(nk, rng)
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Univariate polynomial, coefficients low to high, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniPoly {
    coeffs: Vec<FieldElem>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficients padded with zeros to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<FieldElem> {
        let mut c = self.coeffs.clone();
        c.resize(len.max(c.len()), FieldElem::ZERO);
        c
    }

    pub fn eval(&self, q: PrimeModulus, x: FieldElem) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| q.add(q.mul(acc, x), c))
    }

    pub fn add(&self, q: PrimeModulus, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &UniPoly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        UniPoly::new((0..n).map(|i| q.add(get(self, i), get(other, i))).collect())
    }

    pub fn scale(&self, q: PrimeModulus, c: FieldElem) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&a| q.mul(a, c)).collect())
    }

    pub fn mul(&self, q: PrimeModulus, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = q.add(out[i + j], q.mul(a, b));
            }
        }
        UniPoly::new(out)
    }

    /// Quotient and remainder; `None` when dividing by zero.
    pub fn divrem(&self, q: PrimeModulus, divisor: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let dd = divisor.degree()?;
        let lead_inv = q.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((UniPoly::zero(), UniPoly::new(rem)));
        }
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = q.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = q.sub(rem[i + j], q.mul(c, dc));
            }
        }
        rem.truncate(dd);
        Some((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// Product of (z − r) over the given roots.
    pub fn from_roots(q: PrimeModulus, roots: &[FieldElem]) -> UniPoly {
        let mut c = vec![FieldElem::ONE];
        for &r in roots {
            let mut next = vec![FieldElem::ZERO; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] = q.add(next[i + 1], a);
                next[i] = q.sub(next[i], q.mul(a, r));
            }
            c = next;
        }
        UniPoly::new(c)
    }
}

/// The unique polynomial of degree < len(points) through all points.
pub fn interpolate(points: &[(FieldElem, FieldElem)], q: PrimeModulus) -> Result<UniPoly> {
    let m = points.len();
    if m == 0 || m as u64 > q.q() {
        return Err(Error::Precondition(format!("cannot interpolate {m} points over F_{q}")));
    }
    let mut seen = std::collections::HashSet::with_capacity(m);
    for &(x, _) in points {
        if !seen.insert(x) {
            return Err(Error::DuplicateNode(x.value()));
        }
    }
    let xs: Vec<FieldElem> = points.iter().map(|p| p.0).collect();
    let master = UniPoly::from_roots(q, &xs);
    let mut acc = vec![FieldElem::ZERO; m];
    for &(xi, yi) in points {
        // master / (z - xi) by synthetic division
        let mc = master.coeffs();
        let mut basis = vec![FieldElem::ZERO; m];
        let mut carry = FieldElem::ZERO;
        for j in (0..m).rev() {
            carry = q.add(mc[j + 1], q.mul(carry, xi));
            basis[j] = carry;
        }
        let denom = UniPoly::new(basis.clone()).eval(q, xi);
        let w = q.div(yi, denom).expect("distinct nodes give a nonzero denominator");
        if w.is_zero() {
            continue;
        }
        for (a, b) in acc.iter_mut().zip(&basis) {
            *a = q.add(*a, q.mul(w, *b));
        }
    }
    Ok(UniPoly::new(acc))
}

/// Values of all Lagrange basis polynomials for nodes 0..count at `z`.
pub fn lagrange_basis_at(q: PrimeModulus, count: usize, z: FieldElem) -> Vec<FieldElem> {
    let nodes: Vec<FieldElem> = (0..count as u64).map(|i| q.elem(i)).collect();
    if let Some(pos) = nodes.iter().position(|&x| x == z) {
        let mut out = vec![FieldElem::ZERO; count];
        out[pos] = FieldElem::ONE;
        return out;
    }
    let diffs: Vec<FieldElem> = nodes.iter().map(|&x| q.sub(z, x)).collect();
    let full = diffs.iter().fold(FieldElem::ONE, |acc, &d| q.mul(acc, d));
    (0..count)
        .map(|i| {
            // denominator: prod_{j != i} (i - j) = (-1)^(count-1-i) i! (count-1-i)!
            let mut denom = FieldElem::ONE;
            for j in 0..count {
                if j != i {
                    denom = q.mul(denom, q.sub(nodes[i], nodes[j]));
                }
            }
            let num = q.div(full, diffs[i]).expect("z is off the node set");
            q.div(num, denom).expect("nodes are distinct mod q")
        })
        .collect()
}

/// Berlekamp–Welch: recover the degree-≤d polynomial agreeing with all but at
/// most ⌊(m−d−1)/2⌋ of the points.
pub fn berlekamp_welch(points: &[(FieldElem, FieldElem)], d: usize, q: PrimeModulus) -> Result<UniPoly> {
    let m = points.len();
    if m < d + 1 {
        return Err(Error::Precondition(format!("{m} points cannot determine degree {d}")));
    }
    let e = (m - d - 1) / 2;
    // unknowns: Q_0..Q_{e+d}, then E_0..E_{e-1}; E is monic of degree e
    let nq = e + d + 1;
    let cols = nq + e;
    let mut rows: Vec<Vec<FieldElem>> = Vec::with_capacity(m);
    for &(x, y) in points {
        let mut row = Vec::with_capacity(cols + 1);
        let mut pw = FieldElem::ONE;
        let mut powers = Vec::with_capacity(nq);
        for _ in 0..nq {
            powers.push(pw);
            pw = q.mul(pw, x);
        }
        row.extend_from_slice(&powers);
        for p in powers.iter().take(e) {
            row.push(q.neg(q.mul(y, *p)));
        }
        row.push(q.mul(y, q.pow(x, e as u64)));
        rows.push(row);
    }
    let sol = solve_linear(q, rows, cols).ok_or(Error::DecodeFailure("inconsistent key equation"))?;
    let qpoly = UniPoly::new(sol[..nq].to_vec());
    let mut ecoef = sol[nq..].to_vec();
    ecoef.push(FieldElem::ONE);
    let epoly = UniPoly::new(ecoef);
    let (p, r) = qpoly.divrem(q, &epoly).expect("monic error locator");
    if !r.is_zero() {
        return Err(Error::DecodeFailure("error locator does not divide"));
    }
    if p.degree().unwrap_or(0) > d {
        return Err(Error::DecodeFailure("quotient degree too high"));
    }
    let agree = points.iter().filter(|&&(x, y)| p.eval(q, x) == y).count();
    if agree < m - e {
        return Err(Error::DecodeFailure("too few agreeing points"));
    }
    Ok(p)
}

/// Gaussian elimination on an augmented matrix; free variables are set to zero.
fn solve_linear(q: PrimeModulus, mut a: Vec<Vec<FieldElem>>, cols: usize) -> Option<Vec<FieldElem>> {
    let nrows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = q.inv(a[r][c]).expect("pivot is nonzero");
        for v in a[r][c..].iter_mut() {
            *v = q.mul(*v, inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c];
            for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *v = q.sub(*v, q.mul(f, pv));
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![FieldElem::ZERO; cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = a[i][cols];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};

    fn fe(q: PrimeModulus, v: u64) -> FieldElem {
        q.elem(v)
    }

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn sampled_primes_land_in_range() {
        let mut r = rng::stream(1);
        let q = sample_prime_for(4, 3, &mut r).unwrap();
        assert!(q.q() > 64 && q.q() < 128);
        let q = sample_prime_for(2, 2, &mut r).unwrap();
        assert!(q.q() == 5 || q.q() == 7);
        let q = sample_prime_for(16, 4, &mut r).unwrap();
        assert!(q.q() > 65_536 && q.q() < 131_072);
        assert!(trial_division(q.q()));
        assert!(sample_prime_for(1, 3, &mut r).is_err());
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        let mut r = rng::stream(2);
        for &qv in &[5u64, 101, 65_537, (1 << 61) - 1] {
            let q = PrimeModulus::new(qv).unwrap();
            for _ in 0..10_000 {
                let (a, b, c) = (q.random(&mut r), q.random(&mut r), q.random(&mut r));
                assert_eq!(q.mul(q.mul(a, b), c), q.mul(a, q.mul(b, c)));
                assert_eq!(q.mul(a, q.add(b, c)), q.add(q.mul(a, b), q.mul(a, c)));
                if !a.is_zero() {
                    assert_eq!(q.mul(a, q.inv(a).unwrap()), FieldElem::ONE);
                }
                assert_eq!(q.add(a, q.neg(a)), FieldElem::ZERO);
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let q = PrimeModulus::new(7).unwrap();
        let pts = [(fe(q, 0), fe(q, 1)), (fe(q, 1), fe(q, 2)), (fe(q, 2), fe(q, 3))];
        assert_eq!(interpolate(&pts, q).unwrap().coeffs(), &[fe(q, 1), fe(q, 1)]);
        assert_eq!(interpolate(&[(fe(q, 5), fe(q, 3))], q).unwrap().coeffs(), &[fe(q, 3)]);
        let dup = [(fe(q, 1), fe(q, 2)), (fe(q, 1), fe(q, 3))];
        assert_eq!(interpolate(&dup, q), Err(Error::DuplicateNode(1)));
    }

    #[test]
    fn interpolation_round_trips_random_quartic() {
        let q = PrimeModulus::new(101).unwrap();
        let mut r = rng::stream(3);
        for _ in 0..50 {
            let p = UniPoly::new((0..5).map(|_| q.random(&mut r)).collect());
            let pts: Vec<_> = (10..15).map(|x| (fe(q, x), p.eval(q, fe(q, x)))).collect();
            assert_eq!(interpolate(&pts, q).unwrap(), p);
        }
    }

    #[test]
    fn lagrange_basis_matches_interpolation() {
        let q = PrimeModulus::new(10_007).unwrap();
        let mut r = rng::stream(4);
        let vals: Vec<FieldElem> = (0..8).map(|_| q.random(&mut r)).collect();
        let pts: Vec<_> = vals.iter().enumerate().map(|(i, &v)| (fe(q, i as u64), v)).collect();
        let p = interpolate(&pts, q).unwrap();
        for _ in 0..20 {
            let z = q.random(&mut r);
            let basis = lagrange_basis_at(q, 8, z);
            let direct = q.sum(basis.iter().zip(&vals).map(|(&b, &v)| q.mul(b, v)));
            assert_eq!(direct, p.eval(q, z));
        }
    }

    #[test]
    fn berlekamp_welch_examples() {
        let q = PrimeModulus::new(13).unwrap();
        let line = UniPoly::new(vec![fe(q, 1), fe(q, 1)]);
        let mut pts: Vec<_> = (1..=7).map(|t| (fe(q, t), line.eval(q, fe(q, t)))).collect();
        assert_eq!(berlekamp_welch(&pts, 1, q).unwrap(), line);
        pts[1].1 = q.add(pts[1].1, fe(q, 5));
        pts[4].1 = q.add(pts[4].1, fe(q, 9));
        assert_eq!(berlekamp_welch(&pts, 1, q).unwrap(), line);
        let cubic = UniPoly::new(vec![fe(q, 2), fe(q, 0), fe(q, 3), fe(q, 1)]);
        let pts: Vec<_> = (1..=7).map(|t| (fe(q, t), cubic.eval(q, fe(q, t)))).collect();
        assert!(matches!(berlekamp_welch(&pts, 1, q), Err(Error::DecodeFailure(_))));
    }

    /// Every polynomial, every error pattern within the radius, small fields.
    #[test]
    fn berlekamp_welch_exhaustive_small() {
        for &qv in &[11u64, 31] {
            let q = PrimeModulus::new(qv).unwrap();
            let mut r = rng::stream(qv);
            for m in 1..=9usize {
                for d in 0..=2usize.min(m - 1) {
                    let e = (m - d - 1) / 2;
                    for _ in 0..6 {
                        let p = UniPoly::new((0..=d).map(|_| q.random(&mut r)).collect());
                        let clean: Vec<_> =
                            (1..=m as u64).map(|t| (fe(q, t), p.eval(q, fe(q, t)))).collect();
                        for mask in 0u32..(1 << m) {
                            if mask.count_ones() as usize > e {
                                continue;
                            }
                            let mut pts = clean.clone();
                            for (i, pt) in pts.iter_mut().enumerate() {
                                if mask >> i & 1 == 1 {
                                    let off = 1 + r.gen_range(0..qv - 1);
                                    pt.1 = q.add(pt.1, fe(q, off));
                                }
                            }
                            assert_eq!(berlekamp_welch(&pts, d, q).unwrap(), p, "m={m} d={d} mask={mask:b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn field_elements_serialize_as_strings() {
        let q = PrimeModulus::new(1_000_003).unwrap();
        let s = serde_json::to_string(&fe(q, 999_999)).unwrap();
        assert_eq!(s, "\"999999\"");
        let back: FieldElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back.value(), 999_999);
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"1000003\"");
    }

    proptest! {
        #[test]
        fn interpolation_reproduces_points(ys in proptest::collection::vec(0u64..65_537, 1..20)) {
            let q = PrimeModulus::new(65_537).unwrap();
            let pts: Vec<_> = ys.iter().enumerate().map(|(i, &y)| (fe(q, 3 * i as u64 + 1), fe(q, y))).collect();
            let p = interpolate(&pts, q).unwrap();
            prop_assert!(p.degree().map_or(true, |d| d < pts.len()));
            for &(x, y) in &pts {
                prop_assert_eq!(p.eval(q, x), y);
            }
        }

        #[test]
        fn divrem_reconstructs(a in proptest::collection::vec(0u64..97, 0..10), b in proptest::collection::vec(0u64..97, 1..6)) {
            let q = PrimeModulus::new(97).unwrap();
            let pa = UniPoly::new(a.into_iter().map(|v| fe(q, v)).collect());
            let pb = UniPoly::new(b.into_iter().map(|v| fe(q, v)).collect());
            prop_assume!(!pb.is_zero());
            let (quo, rem) = pa.divrem(q, &pb).unwrap();
            prop_assert_eq!(quo.mul(q, &pb).add(q, &rem), pa);
            prop_assert!(rem.degree().map_or(true, |d| d < pb.degree().unwrap()));
        }
    }
}
