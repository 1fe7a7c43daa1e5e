//! Closed-form and recursive constants of the mixed Littlewood and
//! Bohnenblust–Hille inequalities for real scalars.

mod gamma;

pub use gamma::gamma;

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixed_norms::ExponentTuple;

/// Tolerance used for the cached branch point [`p0`].
pub const P0_TOL: f64 = 1e-10;

/// Weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

// Γ((p+1)/2) − √π/2 is strictly decreasing on this bracket; the map turns
// around at the minimum of Γ (p ≈ 1.9233) and vanishes again at p = 2.
const P0_BRACKET: (f64, f64) = (1.5, 1.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KhinchinRegime {
    /// `2^(1/2 − 1/p)`
    Flat,
    /// `√2 · (Γ((p+1)/2)/√π)^(1/p)`
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KhinchinValue {
    pub p: f64,
    pub value: f64,
    pub regime: KhinchinRegime,
}

fn p0_residual(p: f64) -> f64 {
    gamma((p + 1.0) / 2.0) - PI.sqrt() / 2.0
}

/// Bisection for the root of `Γ((p+1)/2) = √π/2` below 2.
///
/// Stops once both the residual and the bracket width are within `tol`.
pub fn solve_p0(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::OutOfDomain {
            what: "tol",
            value: tol,
            range: "(0, ∞)",
        });
    }
    let (mut lo, mut hi) = P0_BRACKET;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let r = p0_residual(mid);
        if r.abs() <= tol && hi - lo <= tol {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    Ok(mid)
}

/// Cached `p0 ≈ 1.84742`.
pub fn p0() -> f64 {
    static P0: OnceLock<f64> = OnceLock::new();
    *P0.get_or_init(|| solve_p0(P0_TOL).expect("positive tolerance"))
}

pub fn khinchin_flat(p: f64) -> f64 {
    2f64.powf(0.5 - 1.0 / p)
}

pub fn khinchin_gamma(p: f64) -> f64 {
    SQRT_2 * (gamma((p + 1.0) / 2.0) / PI.sqrt()).powf(1.0 / p)
}

/// Sharp constant `A_p` of the real Khinchin inequality for `0 < p ≤ 2`.
pub fn khinchin_a(p: f64) -> Result<KhinchinValue> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::OutOfDomain {
            what: "p",
            value: p,
            range: "(0, 2]",
        });
    }
    let (value, regime) = if p <= p0() {
        (khinchin_flat(p), KhinchinRegime::Flat)
    } else {
        (khinchin_gamma(p), KhinchinRegime::Gamma)
    };
    Ok(KhinchinValue { p, value, regime })
}

/// `(√2)^(m−1)`, the constant of the mixed `(ℓ1, ℓ2)` inequalities.
pub fn sqrt2_baseline(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::OutOfDomain {
            what: "m",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    Ok(SQRT_2.powi(m as i32 - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationResult {
    pub exponents: ExponentTuple,
    pub constant_bound: f64,
    pub weights: Vec<f64>,
}

/// Coordinatewise interpolation of multiple exponents:
/// `1/q_j = Σ θ_i / q_j^(i)` with bound `Π C_i^θ_i`.
pub fn interpolate(
    tuples: &[ExponentTuple],
    weights: &[f64],
    constants: &[f64],
) -> Result<InterpolationResult> {
    let first = tuples
        .first()
        .ok_or_else(|| Error::Interpolation("no exponent tuples".into()))?;
    let m = first.degree();
    for (i, t) in tuples.iter().enumerate() {
        if !t.is_unblocked() {
            return Err(Error::Interpolation(format!("tuple {} is blocked", i + 1)));
        }
        if t.degree() != m {
            return Err(Error::Interpolation(format!(
                "tuple {} has degree {}, expected {}",
                i + 1,
                t.degree(),
                m
            )));
        }
    }
    if weights.len() != tuples.len() || constants.len() != tuples.len() {
        return Err(Error::Interpolation(format!(
            "{} tuples need as many weights and constants (got {} and {})",
            tuples.len(),
            weights.len(),
            constants.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Interpolation(format!("weight {w} is negative")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::Interpolation(format!("weights sum to {total}, not 1")));
    }
    if let Some(c) = constants.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::Interpolation(format!("constant {c} is not positive")));
    }

    let exponents: Vec<f64> = (0..m)
        .map(|j| {
            let inv: f64 = tuples
                .iter()
                .zip(weights)
                .map(|(t, w)| w / t.blocks()[j].exponent)
                .sum();
            1.0 / inv
        })
        .collect();
    let log_bound: f64 = constants.iter().zip(weights).map(|(c, w)| w * c.ln()).sum();
    Ok(InterpolationResult {
        exponents: ExponentTuple::unblocked(&exponents)?,
        constant_bound: log_bound.exp(),
        weights: weights.to_vec(),
    })
}

/// Upper bound for the real Bohnenblust–Hille constants from the recursion
/// `C_1 = 1`, `C_m = A_{(2m−2)/m}^{-1} C_{m−1}`.
pub fn bh_upper_bound(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::OutOfDomain {
            what: "m",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    (2..=m).try_fold(1.0, |c, k| Ok(c * equivalence_gap(k)?))
}

/// `A_{(2m−2)/m}^{-1}`: the ratio between the upper and lower ends of the
/// sandwich `C_{m−1} ≤ C_{2,(2m−2)/m,…} ≤ A^{-1} C_{m−1}`. Tends to 1.
pub fn equivalence_gap(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::OutOfDomain {
            what: "m",
            value: m as f64,
            range: "[2, ∞)",
        });
    }
    let p = (2.0 * m as f64 - 2.0) / m as f64;
    Ok(1.0 / khinchin_a(p)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p0_root() {
        let p = solve_p0(1e-6).unwrap();
        assert_abs_diff_eq!(p, 1.84742, epsilon = 1e-5);
        assert!(p0_residual(p).abs() <= 1e-6);
        assert!(p0_residual(p0()).abs() <= P0_TOL);
        assert!(solve_p0(0.0).is_err());
        assert!(solve_p0(-1.0).is_err());
    }

    #[test]
    fn bracket_is_monotone() {
        let (lo, hi) = P0_BRACKET;
        assert!(p0_residual(lo) > 0.0 && p0_residual(hi) < 0.0);
        let mut prev = p0_residual(lo);
        for i in 1..=400 {
            let r = p0_residual(lo + (hi - lo) * i as f64 / 400.0);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn khinchin_examples() {
        let a2 = khinchin_a(2.0).unwrap();
        assert_abs_diff_eq!(a2.value, 1.0, epsilon = 1e-13);
        assert_eq!(a2.regime, KhinchinRegime::Gamma);
        assert_abs_diff_eq!(khinchin_flat(2.0), 1.0);

        let a1 = khinchin_a(1.0).unwrap();
        assert_eq!(a1.regime, KhinchinRegime::Flat);
        assert_abs_diff_eq!(a1.value, 0.5f64.sqrt(), epsilon = 1e-15);
        // E|a1 r1 + a2 r2| over the four sign patterns at a = (1,1)/√2
        let a = 0.5f64.sqrt();
        let avg = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|(s, t)| (s * a + t * a).abs())
            .sum::<f64>()
            / 4.0;
        assert_abs_diff_eq!(avg, a1.value, epsilon = 1e-15);

        assert_abs_diff_eq!(khinchin_a(4.0 / 3.0).unwrap().value, 2f64.powf(-0.25), epsilon = 1e-15);
        assert!(khinchin_a(0.0).is_err());
        assert!(khinchin_a(2.5).is_err());
        assert!(khinchin_a(f64::NAN).is_err());
    }

    #[test]
    fn branches_meet_at_p0() {
        let p = p0();
        assert!((khinchin_flat(p) - khinchin_gamma(p)).abs() <= 1e-9);
        let below = khinchin_a(p - 1e-6).unwrap();
        let above = khinchin_a(p + 1e-6).unwrap();
        assert_eq!(below.regime, KhinchinRegime::Flat);
        assert_eq!(above.regime, KhinchinRegime::Gamma);
        assert!((below.value - above.value).abs() < 1e-5);
    }

    #[test]
    fn khinchin_is_the_smaller_branch() {
        // the sharp constant is the minimum of the two expressions
        for i in 1..=200 {
            let p = 0.01 * i as f64;
            let v = khinchin_a(p).unwrap().value;
            let m = khinchin_flat(p).min(khinchin_gamma(p));
            assert!((v - m).abs() <= 1e-12, "p = {p}");
            assert!(v > 0.0 && v <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn baseline() {
        assert_eq!(sqrt2_baseline(1).unwrap(), 1.0);
        assert_abs_diff_eq!(sqrt2_baseline(2).unwrap(), SQRT_2);
        assert_abs_diff_eq!(sqrt2_baseline(3).unwrap(), 2.0, epsilon = 1e-15);
        assert!(sqrt2_baseline(0).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let t: Vec<ExponentTuple> = ["1,2,2", "2,1,2", "2,2,1"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let r = interpolate(&t, &[1.0 / 3.0; 3], &[2.0, 2.0, SQRT_2]).unwrap();
        for q in r.exponents.exponents() {
            assert_abs_diff_eq!(q, 1.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.constant_bound, 2f64.powf(5.0 / 6.0), epsilon = 1e-12);

        let b: Vec<ExponentTuple> = ["1,2", "2,1"].iter().map(|s| s.parse().unwrap()).collect();
        let r = interpolate(&b, &[0.5, 0.5], &[SQRT_2, SQRT_2]).unwrap();
        for q in r.exponents.exponents() {
            assert_abs_diff_eq!(q, 4.0 / 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.constant_bound, SQRT_2, epsilon = 1e-12);

        let one = interpolate(&t[..1], &[1.0], &[3.5]).unwrap();
        assert_eq!(one.exponents, t[0]);
        assert_abs_diff_eq!(one.constant_bound, 3.5, epsilon = 1e-14);
    }

    #[test]
    fn interpolation_errors() {
        let t: Vec<ExponentTuple> = ["1,2", "2,1,2"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(interpolate(&t, &[0.5, 0.5], &[1.0, 1.0]).is_err());
        let t: Vec<ExponentTuple> = ["1,2", "2,1"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(interpolate(&t, &[0.5, 0.6], &[1.0, 1.0]).is_err());
        assert!(interpolate(&t, &[1.5, -0.5], &[1.0, 1.0]).is_err());
        assert!(interpolate(&t, &[0.5, 0.5], &[1.0, 0.0]).is_err());
        assert!(interpolate(&t, &[0.5, 0.5], &[1.0]).is_err());
        assert!(interpolate(&[], &[], &[]).is_err());
        let blocked = vec!["2:1".parse::<ExponentTuple>().unwrap()];
        assert!(interpolate(&blocked, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn interpolation_stays_between_inputs() {
        let t: Vec<ExponentTuple> = ["1,2,1.2", "2,1.1,1.9", "1.4,1.6,1"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let r = interpolate(&t, &[0.2, 0.5, 0.3], &[1.0, 2.0, 3.0]).unwrap();
        for (j, q) in r.exponents.exponents().into_iter().enumerate() {
            let col: Vec<f64> = t.iter().map(|x| x.exponents()[j]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(0.0, f64::max);
            assert!(lo <= q && q <= hi);
        }
        assert_abs_diff_eq!(
            r.constant_bound,
            2f64.powf(0.5) * 3f64.powf(0.3),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bh_recursion() {
        assert_eq!(bh_upper_bound(1).unwrap(), 1.0);
        assert_abs_diff_eq!(bh_upper_bound(2).unwrap(), SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(bh_upper_bound(3).unwrap(), 2f64.powf(0.75), epsilon = 1e-12);
        assert!(bh_upper_bound(3).unwrap() < 2f64.powf(5.0 / 6.0));
        let mut prev = 0.0;
        for m in 1..=50 {
            let c = bh_upper_bound(m).unwrap();
            assert!(c >= prev);
            assert!(c <= sqrt2_baseline(m).unwrap() * (1.0 + 1e-12));
            prev = c;
        }
        assert!(bh_upper_bound(0).is_err());
    }

    #[test]
    fn gap_trend() {
        assert_abs_diff_eq!(equivalence_gap(2).unwrap(), SQRT_2, epsilon = 1e-12);
        let g100 = equivalence_gap(100).unwrap();
        assert!(g100 > 1.0 && g100 < 1.01);
        let mut prev = f64::INFINITY;
        for m in 3..=2000 {
            let g = equivalence_gap(m).unwrap();
            assert!(g < prev && g > 1.0, "m = {m}");
            prev = g;
        }
        assert!(equivalence_gap(1).is_err());
    }
}
