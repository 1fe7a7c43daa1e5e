use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MultilinearForm;
use crate::error::{Error, Result};

pub const CATALOG_NAMES: [&str; 2] = ["littlewood2", "triple221"];

const LITTLEWOOD: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];

/// `A(x, y) = x1y1 + x1y2 + x2y1 − x2y2`.
pub fn littlewood2() -> MultilinearForm {
    MultilinearForm::new(vec![2, 2], LITTLEWOOD.concat())
        .expect("static shape")
        .with_label("littlewood2")
}

/// The 3-linear form
/// `(z1 + z2)·A(x1..2, y1..2) + (z1 − z2)·A(x3..4, y3..4)`
/// built from two disjoint copies of [`littlewood2`].
pub fn triple221() -> MultilinearForm {
    MultilinearForm::from_fn(vec![4, 4, 2], |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let (bi, bj) = (i / 2, j / 2);
        if bi != bj {
            return 0.0;
        }
        let a = LITTLEWOOD[i % 2][j % 2];
        match (bi, k) {
            (1, 1) => -a,
            _ => a,
        }
    })
    .expect("static shape")
    .with_label("triple221")
}

/// Deterministic form with independent ±1 coefficients.
pub fn random_sign_form(dims: &[usize], seed: u64) -> Result<MultilinearForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let form = MultilinearForm::from_fn(dims.to_vec(), |_| {
        if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    })?;
    Ok(form.with_label(format!("random-sign(seed={seed})")))
}

pub fn by_name(name: &str) -> Result<MultilinearForm> {
    match name {
        "littlewood2" => Ok(littlewood2()),
        "triple221" => Ok(triple221()),
        other => Err(Error::InvalidForm(format!(
            "unknown catalog form `{other}` (known: {})",
            CATALOG_NAMES.join(", ")
        ))),
    }
}
