//! Sup norm over the product of closed unit balls of `c0`.
//!
//! For real scalars a multilinear form attains its sup norm at sign vertices
//! `{−1, +1}^dims[i]` in every slot, so the exact value is a maximum over
//! finitely many vertices. Two reductions keep the enumeration small without
//! changing the result: flipping a whole slot only changes the sign of the
//! value (the first sign of every enumerated slot is pinned to `+1`), and the
//! maximum over the last slot's vertices of `|⟨g, ε⟩|` is `‖g‖₁`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::MultilinearForm;
use crate::error::{Error, Result};

/// Exact enumeration is used up to this many logical vertex evaluations.
pub const DEFAULT_SUP_BUDGET: u64 = 1 << 22;

const DEFAULT_RESTARTS: usize = 32;
const DEFAULT_SEED: u64 = 0x5eed_0fc0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNormResult {
    pub value: f64,
    /// True iff every sign vertex was covered.
    pub exact: bool,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SupNormOptions {
    pub budget: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SUP_BUDGET,
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
        }
    }
}

pub fn sup_norm(form: &MultilinearForm, budget: u64) -> Result<SupNormResult> {
    sup_norm_with(
        form,
        &SupNormOptions {
            budget,
            ..Default::default()
        },
    )
}

pub fn sup_norm_with(form: &MultilinearForm, opts: &SupNormOptions) -> Result<SupNormResult> {
    if opts.budget == 0 {
        return Err(Error::InvalidBudget(0));
    }
    match vertex_count(form.dims()) {
        Some(n) if n <= opts.budget => Ok(SupNormResult {
            value: exact_sup(form),
            exact: true,
            evaluations: n,
        }),
        _ => Ok(alternating_ascent(form, opts)),
    }
}

/// `Π 2^dims[i]`, or `None` if it does not fit in a `u64`.
pub(crate) fn vertex_count(dims: &[usize]) -> Option<u64> {
    let bits: usize = dims.iter().sum();
    if bits < 64 {
        Some(1u64 << bits)
    } else {
        None
    }
}

pub(crate) fn exact_sup(form: &MultilinearForm) -> f64 {
    let dims = form.dims();
    let mut scratch: Vec<Vec<f64>> = Vec::with_capacity(dims.len());
    let mut len = form.coeffs().len();
    for &d in &dims[..dims.len() - 1] {
        len /= d;
        scratch.push(vec![0.0; len]);
    }
    enumerate(form.coeffs(), dims, &mut scratch)
}

fn enumerate(coeffs: &[f64], dims: &[usize], scratch: &mut [Vec<f64>]) -> f64 {
    if dims.len() == 1 {
        return coeffs.iter().map(|c| c.abs()).sum();
    }
    let d = dims[0];
    let (buf, rest) = scratch.split_first_mut().expect("one buffer per enumerated slot");
    let stride = buf.len();
    let mut best = 0.0_f64;
    for mask in 0u64..(1u64 << (d - 1)) {
        buf.copy_from_slice(&coeffs[..stride]);
        for j in 1..d {
            let row = &coeffs[j * stride..(j + 1) * stride];
            if mask >> (j - 1) & 1 == 1 {
                buf.iter_mut().zip(row).for_each(|(b, c)| *b -= c);
            } else {
                buf.iter_mut().zip(row).for_each(|(b, c)| *b += c);
            }
        }
        let v = enumerate(buf, &dims[1..], rest);
        if v > best {
            best = v;
        }
    }
    best
}

/// Coordinate ascent over one slot at a time: with the other slots fixed the
/// best signs are the signs of the contracted functional (ties keep the
/// current sign). Cycles until a full pass flips nothing.
fn alternating_ascent(form: &MultilinearForm, opts: &SupNormOptions) -> SupNormResult {
    let dims = form.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut evaluations = 0u64;
    let mut best = 0.0_f64;

    for _ in 0..opts.restarts.max(1) {
        if evaluations >= opts.budget {
            break;
        }
        let mut signs: Vec<Vec<f64>> = dims
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let mut value = 0.0_f64;
        'ascent: loop {
            let mut flipped = false;
            for slot in 0..dims.len() {
                if evaluations >= opts.budget {
                    break 'ascent;
                }
                let g = form.contract_except(&signs, slot);
                evaluations += 1;
                for (s, &gj) in signs[slot].iter_mut().zip(&g) {
                    if gj * *s < 0.0 {
                        *s = -*s;
                        flipped = true;
                    }
                }
                value = g.iter().map(|x| x.abs()).sum();
            }
            if !flipped {
                break;
            }
        }
        best = best.max(value);
    }

    SupNormResult {
        value: best,
        exact: false,
        evaluations,
    }
}
