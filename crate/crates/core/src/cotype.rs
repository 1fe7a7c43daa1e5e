//! Cotype-2 ratios of finite vector families in `ℓ_r`.
//!
//! The Rademacher average `(∫₀¹ ‖Σ r_k(t) x_k‖^s dt)^{1/s}` of `n` vectors is
//! the uniform average over the `2^n` sign patterns, computed here by exact
//! enumeration.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{gamma, p0};
use crate::error::{Error, Result};
use crate::forms::{sup_norm, MultilinearForm, DEFAULT_SUP_BUDGET};
use crate::mixed_norms::{mixed_norm, ExponentTuple};
use crate::numeric::{compensated_sum, lp_norm};

/// Largest family size accepted for exact sign enumeration.
pub const MAX_VECTORS: usize = 24;

/// `r` within this distance above `p0` still counts as the sharp regime.
pub const SHARP_TOL: f64 = 1e-9;

fn check_family(vectors: &[Vec<f64>], r: f64, s: f64) -> Result<usize> {
    if vectors.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if vectors.len() > MAX_VECTORS {
        return Err(Error::TooManyVectors {
            n: vectors.len(),
            max: MAX_VECTORS,
        });
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            range: "[1, ∞)",
        });
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::OutOfDomain {
            what: "s",
            value: s,
            range: "(0, ∞)",
        });
    }
    let d = vectors[0].len();
    if d == 0 {
        return Err(Error::RaggedFamily {
            index: 1,
            expected: 1,
            got: 0,
        });
    }
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::RaggedFamily {
                index: k + 1,
                expected: d,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutOfDomain {
                what: "vector coordinate",
                value: f64::NAN,
                range: "finite reals",
            });
        }
    }
    Ok(d)
}

/// `((1/2^n) Σ_ε ‖Σ ε_k x_k‖_r^s)^{1/s}` over all sign patterns.
pub fn rademacher_average(vectors: &[Vec<f64>], r: f64, s: f64) -> Result<f64> {
    let d = check_family(vectors, r, s)?;
    let n = vectors.len();
    // ε and −ε give the same norm: pin ε₁ = +1 and walk the remaining
    // signs in Gray-code order, flipping one vector per step.
    let mut sum: Vec<f64> = (0..d)
        .map(|i| compensated_sum(vectors.iter().map(|v| v[i])))
        .collect();
    let mut signs = vec![1.0_f64; n];
    let patterns = 1u64 << (n - 1);
    let mut terms = Vec::with_capacity(patterns as usize);
    terms.push(lp_norm(&sum, r).powf(s));
    for step in 1..patterns {
        let k = step.trailing_zeros() as usize + 1;
        signs[k] = -signs[k];
        let delta = 2.0 * signs[k];
        for (acc, x) in sum.iter_mut().zip(&vectors[k]) {
            *acc += delta * x;
        }
        terms.push(lp_norm(&sum, r).powf(s));
    }
    Ok((compensated_sum(terms) / patterns as f64).powf(1.0 / s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CotypeInstance {
    pub r: f64,
    pub s: f64,
    pub vectors: Vec<Vec<f64>>,
    /// `(Σ ‖x_k‖_r²)^{1/2}`
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl CotypeInstance {
    pub fn new(vectors: Vec<Vec<f64>>, r: f64, s: f64) -> Result<Self> {
        let rhs = rademacher_average(&vectors, r, s)?;
        if rhs == 0.0 {
            return Err(Error::ZeroFamily);
        }
        let lhs = compensated_sum(vectors.iter().map(|v| lp_norm(v, r).powi(2))).sqrt();
        Ok(Self {
            r,
            s,
            vectors,
            lhs,
            rhs,
            ratio: lhs / rhs,
        })
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        Self::new(file.vectors, file.r, file.s)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_file(file)
    }
}

/// `{ "r": v, "s": v, "vectors": [[...], ...] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub r: f64,
    pub s: f64,
    pub vectors: Vec<Vec<f64>>,
}

/// The smallest constant for which the cotype-2 inequality holds on this family.
pub fn cotype_ratio(vectors: &[Vec<f64>], r: f64, s: f64) -> Result<f64> {
    Ok(CotypeInstance::new(vectors.to_vec(), r, s)?.ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CotypeBounds {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
    pub sharp: bool,
}

/// Known bounds on the cotype-2 constant `C_{2,r}(ℓ_r)` for `1 ≤ r ≤ 2`.
///
/// The lower bound `2^{1/r − 1/2}` holds for every `r` (and every average
/// exponent `s`); it is the exact value up to `p0`. Above `p0` the upper
/// bound is `(1/√2)(Γ((r+1)/2)/√π)^{−1/r}`.
pub fn cotype_bounds(r: f64) -> Result<CotypeBounds> {
    if !(1.0..=2.0).contains(&r) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            range: "[1, 2]",
        });
    }
    let lower = 2f64.powf(1.0 / r - 0.5);
    let sharp = r <= p0() + SHARP_TOL;
    let upper = if sharp {
        lower
    } else {
        (gamma((r + 1.0) / 2.0) / PI.sqrt()).powf(-1.0 / r) / SQRT_2
    };
    Ok(CotypeBounds {
        r,
        lower,
        upper,
        sharp,
    })
}

/// `(Σ_{j1} (Σ_{j2} |A(e_j1, e_j2)|^r)^{2/r})^{1/2} / ‖A‖`, a lower bound for
/// `C_{2,r}(ℓ_r)` witnessed by the bilinear form `A`.
pub fn bilinear_cotype_certificate(form: &MultilinearForm, r: f64) -> Result<f64> {
    if form.degree() != 2 {
        return Err(Error::DegreeMismatch {
            form: form.degree(),
            exponents: 2,
        });
    }
    if !(1.0..=2.0).contains(&r) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            range: "[1, 2]",
        });
    }
    if form.is_zero() {
        return Err(Error::ZeroForm);
    }
    let mixed = mixed_norm(form, &ExponentTuple::unblocked(&[2.0, r])?)?.value;
    let sup = sup_norm(form, DEFAULT_SUP_BUDGET)?.value;
    Ok(mixed / sup)
}

/// The pair `(1, 1), (1, −1)` in `ℓ_r` with `s = r`.
pub fn extremal_instance(r: f64) -> Result<CotypeInstance> {
    CotypeInstance::new(vec![vec![1.0, 1.0], vec![1.0, -1.0]], r, r)
}
