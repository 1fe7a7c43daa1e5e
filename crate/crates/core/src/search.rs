//! Ratio certificates and searches for forms with large mixed-to-sup ratios.
//!
//! Any single form `T` with `mixed_norm(T) / ‖T‖ = ρ` shows that the optimal
//! constant of the corresponding mixed inequality is at least `ρ`, provided
//! `‖T‖` was computed exactly. Every search here uses exact sup norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{random_sign_form, sup_exact, sup_norm, MultilinearForm, DEFAULT_SUP_BUDGET};
use crate::mixed_norms::{mixed_norm, ExponentTuple};

/// Largest `Σ dims` for which searches compute exact sup norms.
pub const MAX_SEARCH_BITS: usize = 22;

const RESTART_DENSITIES: [f64; 4] = [0.75, 0.5, 0.35, 1.0];

/// Relative margin a candidate must clear to count as an improvement.
const IMPROVEMENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCertificate {
    pub form_label: String,
    pub dims: Vec<usize>,
    pub exponents: ExponentTuple,
    pub mixed: f64,
    pub sup: f64,
    pub ratio: f64,
    pub sup_exact: bool,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

pub fn certify(form: &MultilinearForm, exps: &ExponentTuple) -> Result<RatioCertificate> {
    let mixed = mixed_norm(form, exps)?.value;
    if form.is_zero() {
        return Err(Error::ZeroForm);
    }
    let sup = sup_norm(form, DEFAULT_SUP_BUDGET)?;
    Ok(RatioCertificate {
        form_label: form.label().unwrap_or("unnamed").to_owned(),
        dims: form.dims().to_vec(),
        exponents: exps.clone(),
        mixed,
        sup: sup.value,
        ratio: mixed / sup.value,
        sup_exact: sup.exact,
        seed: None,
        budget: None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    /// Number of candidate forms scored.
    pub budget: u64,
    pub seed: u64,
    /// Spend the last quarter of the budget on a coordinatewise line search
    /// over real coefficients of the best sign form.
    pub refine: bool,
}

/// Seed of the `k`-th restart; restart 0 uses `seed` itself.
pub fn restart_seed(seed: u64, k: u64) -> u64 {
    if k == 0 {
        return seed;
    }
    // splitmix64 finalizer over (seed, k)
    let mut z = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Scorer<'a> {
    exps: &'a ExponentTuple,
    spent: u64,
    budget: u64,
}

impl Scorer<'_> {
    fn exhausted(&self) -> bool {
        self.spent >= self.budget
    }

    /// Ratio of a nonzero form, or `None` for the zero form.
    fn score(&mut self, form: &MultilinearForm) -> Option<f64> {
        if form.is_zero() {
            return None;
        }
        self.spent += 1;
        let mixed = mixed_norm(form, self.exps).expect("degree checked").value;
        Some(mixed / sup_exact(form))
    }
}

fn improves(candidate: f64, current: f64) -> bool {
    candidate > current * (1.0 + IMPROVEMENT)
}

/// First-improvement hill climbing over entries in `{−1, 0, +1}`, scanning
/// entries in row-major order. Returns the local optimum and its ratio.
fn climb(mut form: MultilinearForm, mut ratio: f64, scorer: &mut Scorer) -> (MultilinearForm, f64) {
    let len = form.coeffs().len();
    loop {
        let mut improved = false;
        for flat in 0..len {
            let current = form.coeffs()[flat];
            for alt in [-1.0, 0.0, 1.0] {
                if alt == current {
                    continue;
                }
                if scorer.exhausted() {
                    return (form, ratio);
                }
                form.coeffs_mut()[flat] = alt;
                match scorer.score(&form) {
                    Some(r) if improves(r, ratio) => {
                        ratio = r;
                        improved = true;
                        break;
                    }
                    _ => form.coeffs_mut()[flat] = current,
                }
            }
        }
        if !improved {
            return (form, ratio);
        }
    }
}

/// Coordinatewise pattern search on real coefficients with halving steps.
fn refine(mut form: MultilinearForm, mut ratio: f64, scorer: &mut Scorer) -> (MultilinearForm, f64) {
    let len = form.coeffs().len();
    for step in [0.5, 0.25, 0.125, 0.0625, 0.03125] {
        loop {
            let mut improved = false;
            for flat in 0..len {
                let current = form.coeffs()[flat];
                for delta in [step, -step] {
                    if scorer.exhausted() {
                        return (form, ratio);
                    }
                    form.coeffs_mut()[flat] = current + delta;
                    match scorer.score(&form) {
                        Some(r) if improves(r, ratio) => {
                            ratio = r;
                            improved = true;
                            break;
                        }
                        _ => form.coeffs_mut()[flat] = current,
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    (form, ratio)
}

pub fn optimize_ratio(
    dims: &[usize],
    exps: &ExponentTuple,
    budget: u64,
    seed: u64,
) -> Result<RatioCertificate> {
    optimize_ratio_with(
        dims,
        exps,
        &OptimizeOptions {
            budget,
            seed,
            refine: false,
        },
    )
}

/// Hill climbing with random restarts over coefficient tensors of shape
/// `dims`, maximizing `mixed_norm / sup_norm`. Deterministic for fixed
/// inputs; ties keep the earliest restart.
pub fn optimize_ratio_with(
    dims: &[usize],
    exps: &ExponentTuple,
    opts: &OptimizeOptions,
) -> Result<RatioCertificate> {
    if opts.budget == 0 {
        return Err(Error::InvalidBudget(0));
    }
    check_affordable(dims)?;
    if exps.degree() != dims.len() {
        return Err(Error::DegreeMismatch {
            form: dims.len(),
            exponents: exps.degree(),
        });
    }

    let climb_budget = if opts.refine {
        (opts.budget - opts.budget / 4).max(1)
    } else {
        opts.budget
    };
    let mut scorer = Scorer {
        exps,
        spent: 0,
        budget: climb_budget,
    };

    let mut best: Option<(MultilinearForm, f64)> = None;
    let mut k = 0u64;
    while !scorer.exhausted() {
        let start = restart_form(dims, opts.seed, k)?;
        let start_ratio = scorer.score(&start).expect("sign forms are nonzero");
        let (form, ratio) = climb(start, start_ratio, &mut scorer);
        if best.as_ref().is_none_or(|(_, b)| ratio > *b) {
            best = Some((form, ratio));
        }
        k += 1;
    }
    let (mut form, mut ratio) = best.expect("at least one restart");

    if opts.refine {
        scorer.budget = opts.budget;
        (form, ratio) = refine(form, ratio, &mut scorer);
    }
    debug_assert!(ratio > 0.0);

    let form = form.with_label(format!("search(seed={}, restarts={k})", opts.seed));
    let mut cert = certify(&form, exps)?;
    debug_assert!(cert.sup_exact);
    cert.seed = Some(opts.seed);
    cert.budget = Some(opts.budget);
    Ok(cert)
}

/// Restart 0 is the sign form of `seed`; later restarts draw ternary forms
/// whose density cycles through [`RESTART_DENSITIES`].
fn restart_form(dims: &[usize], seed: u64, k: u64) -> Result<MultilinearForm> {
    let seed = restart_seed(seed, k);
    if k == 0 {
        return random_sign_form(dims, seed);
    }
    let density = RESTART_DENSITIES[(k as usize - 1) % RESTART_DENSITIES.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let form = MultilinearForm::from_fn(dims.to_vec(), |_| {
            if rng.gen::<f64>() < density {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        })?;
        if !form.is_zero() {
            return Ok(form);
        }
    }
}

fn check_affordable(dims: &[usize]) -> Result<()> {
    let bits: usize = dims.iter().sum();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidForm(format!("invalid dims {dims:?}")));
    }
    if bits > MAX_SEARCH_BITS {
        return Err(Error::Unaffordable {
            dims: dims.to_vec(),
            bits,
            max_bits: MAX_SEARCH_BITS,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub best_ratio: f64,
    pub certificate: RatioCertificate,
}

/// Best ratios found on square shapes `(n, …, n)` for each `n`, using
/// `trials` independent searches configured by `opts` (trial `t` uses the
/// seed `restart_seed(opts.seed, t)`).
///
/// For exponent tuples violating `Σ 1/q_j ≤ (k+1)/2` no uniform constant
/// exists and the best ratios grow with `n`; for admissible ones they stay
/// bounded.
pub fn growth_witness(
    exps: &ExponentTuple,
    n_list: &[usize],
    trials: u64,
    opts: &OptimizeOptions,
) -> Result<Vec<GrowthRow>> {
    let m = exps.degree();
    // validate every size before doing any work
    for &n in n_list {
        check_affordable(&vec![n; m])?;
    }
    n_list
        .iter()
        .map(|&n| {
            let dims = vec![n; m];
            let mut best: Option<RatioCertificate> = None;
            for t in 0..trials.max(1) {
                let trial = OptimizeOptions {
                    seed: restart_seed(opts.seed, t),
                    ..*opts
                };
                let cert = optimize_ratio_with(&dims, exps, &trial)?;
                if best.as_ref().is_none_or(|b| cert.ratio > b.ratio) {
                    best = Some(cert);
                }
            }
            let certificate = best.expect("at least one trial");
            Ok(GrowthRow {
                n,
                best_ratio: certificate.ratio,
                certificate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub m: usize,
    /// `(2m − 2)/m`
    pub exponent: f64,
    /// Mixed norm of the lifted form with exponents `(2, p, …, p)`.
    pub lifted_mixed: f64,
    /// Flat `ℓ_p` norm of the original `(m−1)`-linear form.
    pub base_mixed: f64,
    pub lifted_sup: f64,
    pub base_sup: f64,
    pub relative_error: f64,
    pub identity_holds: bool,
}

/// Checks the lifting identity behind `C_{m−1} ≤ C_{2,p,…,p}` with
/// `p = (2m−2)/m`: lifting `T` to `T(x²,…,xᵐ)·x¹₁` keeps its sup norm and
/// turns its `ℓ_p` norm into the `(2, p, …, p)` mixed norm of the lift.
pub fn equivalence_demo(form: &MultilinearForm, m: usize) -> Result<EquivalenceReport> {
    if m < 2 || form.degree() != m - 1 {
        return Err(Error::DegreeMismatch {
            form: form.degree(),
            exponents: m.saturating_sub(1),
        });
    }
    let p = (2.0 * m as f64 - 2.0) / m as f64;
    let lifted = form.lift();

    let mut lifted_exps = vec![2.0];
    lifted_exps.extend(std::iter::repeat_n(p, m - 1));
    let lifted_mixed = mixed_norm(&lifted, &ExponentTuple::unblocked(&lifted_exps)?)?.value;
    let base_mixed = mixed_norm(form, &ExponentTuple::unblocked(&vec![p; m - 1])?)?.value;
    let lifted_sup = sup_norm(&lifted, DEFAULT_SUP_BUDGET)?.value;
    let base_sup = sup_norm(form, DEFAULT_SUP_BUDGET)?.value;

    let rel = |a: f64, b: f64| {
        let scale = a.abs().max(b.abs());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).abs() / scale
        }
    };
    let relative_error = rel(lifted_mixed, base_mixed).max(rel(lifted_sup, base_sup));
    Ok(EquivalenceReport {
        m,
        exponent: p,
        lifted_mixed,
        base_mixed,
        lifted_sup,
        base_sup,
        relative_error,
        identity_holds: relative_error <= 1e-12,
    })
}
