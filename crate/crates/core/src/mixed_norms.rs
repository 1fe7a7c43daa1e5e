//! Nested mixed `ℓ_q` norms of coefficient tensors.
//!
//! An [`ExponentTuple`] is a sequence of blocks `(n_j, q_j)`. Block `j` covers
//! `n_j` consecutive slots which all share one summation index `i_j`, so the
//! blocked coefficient is `U(e_{i1}, …, e_{i1}, e_{i2}, …, e_{ik})`. The norm
//! is evaluated from the innermost block outwards:
//!
//! ```text
//! ( Σ_{i1} ( Σ_{i2} ( … ( Σ_{ik} |U|^{qk} )^{q(k-1)/qk} … )^{q2/q3} )^{q1/q2} )^{1/q1}
//! ```
//!
//! With every block of size one this is the plain nested norm with one index
//! per slot.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::MultilinearForm;
use crate::numeric::lp_norm;

/// Slack on the admissibility inequality so that boundary tuples pass.
pub const ADMISSIBLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub size: usize,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTuple {
    blocks: Vec<Block>,
}

/// Serialized in the text syntax accepted by [`FromStr`].
impl Serialize for ExponentTuple {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl ExponentTuple {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidExponents("at least one block is required".into()));
        }
        for (j, b) in blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(Error::InvalidExponents(format!("block {} has size 0", j + 1)));
            }
            if !(b.exponent.is_finite() && b.exponent >= 1.0) {
                return Err(Error::InvalidExponents(format!(
                    "block {} has exponent {}; exponents must be finite and ≥ 1",
                    j + 1,
                    b.exponent
                )));
            }
        }
        Ok(Self { blocks })
    }

    /// One block of size one per exponent.
    pub fn unblocked(exponents: &[f64]) -> Result<Self> {
        Self::new(
            exponents
                .iter()
                .map(|&exponent| Block { size: 1, exponent })
                .collect(),
        )
    }

    pub fn blocked(blocks: &[(usize, f64)]) -> Result<Self> {
        Self::new(
            blocks
                .iter()
                .map(|&(size, exponent)| Block { size, exponent })
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of blocks `k`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total degree `m = Σ n_j`.
    pub fn degree(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn exponents(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.exponent).collect()
    }

    pub fn is_unblocked(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    /// Replaces the exponent of block `j`.
    pub fn with_exponent(&self, j: usize, exponent: f64) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks[j].exponent = exponent;
        Self::new(blocks)
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.is_unblocked() { "," } else { "|" };
        for (j, b) in self.blocks.iter().enumerate() {
            if j > 0 {
                f.write_str(sep)?;
            }
            if self.is_unblocked() {
                write!(f, "{}", b.exponent)?;
            } else {
                write!(f, "{}:{}", b.size, b.exponent)?;
            }
        }
        Ok(())
    }
}

/// Parses a real number, also accepting a fraction `a/b`.
pub fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    let err = |reason: &str| Error::ExponentParse {
        token: t.to_owned(),
        reason: reason.to_owned(),
    };
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| err("bad numerator"))?;
            let den: f64 = den.trim().parse().map_err(|_| err("bad denominator"))?;
            if den == 0.0 {
                return Err(err("zero denominator"));
            }
            num / den
        }
        None => t.parse().map_err(|_| err("not a number"))?,
    };
    if !value.is_finite() {
        return Err(err("not finite"));
    }
    Ok(value)
}

/// `"q1,q2,...,qk"` (unblocked) or `"n1:q1|n2:q2|..."` (blocked).
impl FromStr for ExponentTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::ExponentParse {
                token: String::new(),
                reason: "empty exponent tuple".into(),
            });
        }
        if s.contains(':') || s.contains('|') {
            let mut blocks = Vec::new();
            for part in s.split('|') {
                let (n, q) = part.split_once(':').ok_or_else(|| Error::ExponentParse {
                    token: part.trim().to_owned(),
                    reason: "expected `size:exponent`".into(),
                })?;
                let size: usize = n.trim().parse().map_err(|_| Error::ExponentParse {
                    token: n.trim().to_owned(),
                    reason: "block size must be a positive integer".into(),
                })?;
                blocks.push((size, parse_number(q)?));
            }
            Self::blocked(&blocks)
        } else {
            let qs = s.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
            Self::unblocked(&qs)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedNorm {
    pub value: f64,
    /// Set when some block covers slots of unequal support; its index then
    /// ranges over the smallest of them.
    pub ragged: bool,
}

pub fn mixed_norm(form: &MultilinearForm, exps: &ExponentTuple) -> Result<MixedNorm> {
    if exps.degree() != form.degree() {
        return Err(Error::DegreeMismatch {
            form: form.degree(),
            exponents: exps.degree(),
        });
    }
    let dims = form.dims();
    let mut ranges = Vec::with_capacity(exps.len());
    let mut ragged = false;
    let mut slot = 0;
    for b in exps.blocks() {
        let covered = &dims[slot..slot + b.size];
        let r = *covered.iter().min().expect("block is nonempty");
        ragged |= covered.iter().any(|&d| d != r);
        ranges.push(r);
        slot += b.size;
    }

    // gather the blocked coefficient tensor of shape `ranges`
    let total: usize = ranges.iter().product();
    let mut blocked = Vec::with_capacity(total);
    let mut bidx = vec![0usize; ranges.len()];
    let mut full = Vec::with_capacity(form.degree());
    for _ in 0..total {
        full.clear();
        for (b, &i) in exps.blocks().iter().zip(&bidx) {
            full.extend(std::iter::repeat_n(i, b.size));
        }
        blocked.push(form.get(&full));
        for j in (0..bidx.len()).rev() {
            bidx[j] += 1;
            if bidx[j] < ranges[j] {
                break;
            }
            bidx[j] = 0;
        }
    }

    // reduce from the innermost block outwards
    let mut level = blocked;
    for (b, &r) in exps.blocks().iter().zip(&ranges).rev() {
        level = level.chunks_exact(r).map(|row| lp_norm(row, b.exponent)).collect();
    }
    debug_assert_eq!(level.len(), 1);
    Ok(MixedNorm {
        value: level[0],
        ragged,
    })
}

/// The Bohnenblust–Hille exponent `2m/(m+1)` repeated over `m` slots.
pub fn bh_exponents(m: usize) -> Result<ExponentTuple> {
    if m == 0 {
        return Err(Error::InvalidExponents("degree must be at least 1".into()));
    }
    let q = 2.0 * m as f64 / (m as f64 + 1.0);
    ExponentTuple::unblocked(&vec![q; m])
}

/// Whether `Σ 1/q_j ≤ (k+1)/2`, the condition under which a uniform constant
/// exists. Exponents must lie in `[1, 2]`.
pub fn admissible(exps: &ExponentTuple) -> Result<bool> {
    for b in exps.blocks() {
        if !(1.0..=2.0).contains(&b.exponent) {
            return Err(Error::OutOfDomain {
                what: "exponent",
                value: b.exponent,
                range: "[1, 2]",
            });
        }
    }
    let k = exps.len() as f64;
    let sum: f64 = exps.blocks().iter().map(|b| 1.0 / b.exponent).sum();
    Ok(sum <= (k + 1.0) / 2.0 + ADMISSIBLE_SLACK)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinkowskiPair {
    /// `ℓ_p` over the first index outside, `ℓ_q` over the second inside.
    pub value_pq: f64,
    /// Same exponent per index, nesting reversed: `ℓ_q` over the second
    /// index outside, `ℓ_p` over the first inside.
    pub value_qp: f64,
}

/// Both nesting orders of a bilinear mixed norm. For `p ≤ q` Minkowski's
/// inequality gives `value_qp ≤ value_pq`.
pub fn minkowski_compare(form: &MultilinearForm, p: f64, q: f64) -> Result<MinkowskiPair> {
    if form.degree() != 2 {
        return Err(Error::DegreeMismatch {
            form: form.degree(),
            exponents: 2,
        });
    }
    if p > q {
        return Err(Error::InvalidExponents(format!(
            "outer exponent {p} exceeds inner exponent {q}"
        )));
    }
    let value_pq = mixed_norm(form, &ExponentTuple::unblocked(&[p, q])?)?.value;
    let value_qp = mixed_norm(&form.transpose()?, &ExponentTuple::unblocked(&[q, p])?)?.value;
    Ok(MinkowskiPair { value_pq, value_qp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{littlewood2, random_sign_form, triple221};
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    /// Direct nested sum for unblocked bilinear forms, written out by hand.
    fn nested2(f: &MultilinearForm, q1: f64, q2: f64) -> f64 {
        let d = f.dims();
        let mut outer = 0.0;
        for i in 0..d[0] {
            let mut inner = 0.0;
            for j in 0..d[1] {
                inner += f.get(&[i, j]).abs().powf(q2);
            }
            outer += inner.powf(q1 / q2);
        }
        outer.powf(1.0 / q1)
    }

    #[test]
    fn littlewood_values() {
        let a = littlewood2();
        let v = mixed_norm(&a, &"1,2".parse().unwrap()).unwrap();
        assert!(close(v.value, 2.0 * SQRT2));
        assert!(!v.ragged);
        assert!(close(v.value, nested2(&a, 1.0, 2.0)));

        let diag = mixed_norm(&a, &"2:2".parse().unwrap()).unwrap();
        assert!(close(diag.value, SQRT2));
    }

    #[test]
    fn triple_value() {
        let u = triple221();
        let v = mixed_norm(&u, &"2,2,1".parse().unwrap()).unwrap();
        // direct nested sum over the explicit coefficients
        let mut outer = 0.0;
        for i in 0..4 {
            let mut mid = 0.0;
            for j in 0..4 {
                let inner: f64 = (0..2).map(|k| u.get(&[i, j, k]).abs()).sum();
                mid += inner * inner;
            }
            outer += mid;
        }
        assert!(close(outer.sqrt(), 4.0 * SQRT2));
        assert!(close(v.value, 4.0 * SQRT2));
    }

    #[test]
    fn single_coefficient() {
        let f = MultilinearForm::new(vec![1, 1, 1], vec![-2.5]).unwrap();
        for s in ["1,1,1", "2,1.5,7", "3:1.2", "1:2|2:1"] {
            assert!(close(mixed_norm(&f, &s.parse().unwrap()).unwrap().value, 2.5));
        }
    }

    #[test]
    fn ragged_blocks_flagged() {
        let f = triple221();
        let v = mixed_norm(&f, &"1:2|2:1".parse().unwrap()).unwrap();
        assert!(v.ragged);
        // block 2 covers dims (4, 2): j ranges over 2 values
        let mut outer = 0.0;
        for i in 0..4 {
            let inner: f64 = (0..2).map(|j| f.get(&[i, j, j]).abs()).sum();
            outer += inner * inner;
        }
        assert!(close(v.value, outer.sqrt()));
    }

    #[test]
    fn degree_mismatch() {
        assert!(matches!(
            mixed_norm(&littlewood2(), &"1,2,2".parse().unwrap()),
            Err(Error::DegreeMismatch { form: 2, exponents: 3 })
        ));
    }

    #[test]
    fn parsing() {
        let t: ExponentTuple = "1, 4/3 ,2".parse().unwrap();
        assert_eq!(t.exponents(), vec![1.0, 4.0 / 3.0, 2.0]);
        let b: ExponentTuple = "2:1.5|1:2".parse().unwrap();
        assert_eq!(b.degree(), 3);
        assert_eq!(b.len(), 2);
        assert_eq!(b.to_string(), "2:1.5|1:2");
        assert_eq!("1,2".parse::<ExponentTuple>().unwrap().to_string(), "1,2");
        for bad in ["", "1,x", "1:2|3", "0:2", "1,0.5", "1/0"] {
            assert!(bad.parse::<ExponentTuple>().is_err(), "{bad}");
        }
        match "1,abc".parse::<ExponentTuple>() {
            Err(Error::ExponentParse { token, .. }) => assert_eq!(token, "abc"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bh_tuples() {
        assert_eq!(bh_exponents(1).unwrap().exponents(), vec![1.0]);
        assert_eq!(bh_exponents(2).unwrap().exponents(), vec![4.0 / 3.0; 2]);
        assert_eq!(bh_exponents(3).unwrap().exponents(), vec![1.5; 3]);
        assert!(bh_exponents(0).is_err());
    }

    #[test]
    fn admissibility() {
        assert!(admissible(&"1,2,2".parse().unwrap()).unwrap());
        assert!(!admissible(&"1,1,2".parse().unwrap()).unwrap());
        assert!(!admissible(&"1,1".parse().unwrap()).unwrap());
        assert!(admissible(&"2,2".parse().unwrap()).unwrap());
        for m in 1..=50 {
            let t = bh_exponents(m).unwrap();
            let sum: f64 = t.exponents().iter().map(|q| 1.0 / q).sum();
            assert!((sum - (m as f64 + 1.0) / 2.0).abs() < 1e-12);
            assert!(admissible(&t).unwrap(), "m = {m}");
        }
        assert!(admissible(&"1,3".parse().unwrap()).is_err());
    }

    #[test]
    fn minkowski_examples() {
        let a = minkowski_compare(&littlewood2(), 1.0, 2.0).unwrap();
        assert!(close(a.value_pq, 2.0 * SQRT2) && close(a.value_qp, 2.0 * SQRT2));

        let f = MultilinearForm::new(vec![2, 2], vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        let r = minkowski_compare(&f, 1.0, 2.0).unwrap();
        // rows (1,0),(1,1): ℓ1 over rows of ℓ2 → 1 + √2;
        // columns (1,1),(0,1): ℓ2 over columns of ℓ1 → √(4 + 1)
        assert!(close(r.value_pq, 1.0 + SQRT2));
        assert!(close(r.value_qp, 5f64.sqrt()));
        assert!(r.value_qp <= r.value_pq);

        let eq = minkowski_compare(&f, 1.5, 1.5).unwrap();
        assert!(close(eq.value_pq, eq.value_qp));
        assert!(minkowski_compare(&f, 2.0, 1.0).is_err());
        assert!(minkowski_compare(&triple221(), 1.0, 2.0).is_err());
    }

    fn exponent() -> impl Strategy<Value = f64> {
        prop_oneof![Just(1.0), Just(4.0 / 3.0), Just(1.5), Just(2.0), 1.0f64..6.0]
    }

    proptest! {
        #[test]
        fn monotone_in_each_exponent(
            seed in any::<u64>(),
            qs in prop::collection::vec(exponent(), 3),
            j in 0usize..3,
            bump in 0.0f64..3.0,
        ) {
            let f = random_sign_form(&[3, 2, 3], seed).unwrap();
            let base = ExponentTuple::unblocked(&qs).unwrap();
            let raised = base.with_exponent(j, qs[j] + bump).unwrap();
            let lo = mixed_norm(&f, &base).unwrap().value;
            let hi = mixed_norm(&f, &raised).unwrap().value;
            prop_assert!(hi <= lo * (1.0 + 1e-12));
        }

        #[test]
        fn homogeneous(seed in any::<u64>(), c in -5.0f64..5.0, qs in prop::collection::vec(exponent(), 2)) {
            let f = random_sign_form(&[3, 3], seed).unwrap();
            let e = ExponentTuple::unblocked(&qs).unwrap();
            let a = mixed_norm(&f.scale(c), &e).unwrap().value;
            let b = c.abs() * mixed_norm(&f, &e).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }

        #[test]
        fn equal_exponents_give_flat_norm(seed in any::<u64>(), q in exponent()) {
            let f = random_sign_form(&[2, 3, 2], seed).unwrap().scale(0.7);
            let nested = mixed_norm(&f, &ExponentTuple::unblocked(&[q; 3]).unwrap()).unwrap().value;
            let flat = lp_norm(f.coeffs(), q);
            prop_assert!((nested - flat).abs() <= 1e-12 * flat);
        }

        #[test]
        fn minkowski_ordering(seed in any::<u64>(), a in 1usize..5, b in 1usize..5, p in 1.0f64..3.0, dq in 0.0f64..3.0) {
            let f = random_sign_form(&[a, b], seed).unwrap();
            let r = minkowski_compare(&f, p, p + dq).unwrap();
            prop_assert!(r.value_qp <= r.value_pq * (1.0 + 1e-12));
        }

        #[test]
        fn unblocked_bilinear_matches_direct(seed in any::<u64>(), q1 in exponent(), q2 in exponent()) {
            let f = random_sign_form(&[3, 4], seed).unwrap();
            let v = mixed_norm(&f, &ExponentTuple::unblocked(&[q1, q2]).unwrap()).unwrap().value;
            let d = nested2(&f, q1, q2);
            prop_assert!((v - d).abs() <= 1e-12 * d);
        }
    }
}
