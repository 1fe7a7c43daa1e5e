//! Finitely supported real multilinear forms on `c0 × ⋯ × c0`.
//!
//! A form of degree `m` is stored as a dense row-major coefficient tensor of
//! shape `dims`; the coefficient at `(j1, …, jm)` is `U(e_j1, …, e_jm)`.
//! Indices are 0-based in the API and 1-based in the file format.

mod catalog;
mod io;
mod sup;

pub use catalog::{by_name, littlewood2, random_sign_form, triple221, CATALOG_NAMES};
pub use io::{Entry, FormFile};
pub use sup::{sup_norm, sup_norm_with, SupNormOptions, SupNormResult, DEFAULT_SUP_BUDGET};
pub(crate) use sup::exact_sup as sup_exact;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearForm {
    dims: Vec<usize>,
    coeffs: Vec<f64>,
    label: Option<String>,
}

impl MultilinearForm {
    pub fn new(dims: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidForm("degree must be at least 1".into()));
        }
        if let Some(slot) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidForm(format!("slot {} has zero support", slot + 1)));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidForm("coefficient tensor too large".into()))?;
        if coeffs.len() != len {
            return Err(Error::InvalidForm(format!(
                "dims {:?} need {} coefficients, got {}",
                dims,
                len,
                coeffs.len()
            )));
        }
        if let Some(pos) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidForm(format!(
                "coefficient #{} is not finite",
                pos + 1
            )));
        }
        Ok(Self {
            dims,
            coeffs,
            label: None,
        })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![0.0; len])
    }

    /// Builds a form from a function of the (0-based) multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut form = Self::zeros(dims)?;
        let mut index = vec![0usize; form.degree()];
        for flat in 0..form.coeffs.len() {
            form.coeffs[flat] = f(&index);
            form.advance(&mut index);
        }
        if form.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidForm("generated coefficient is not finite".into()));
        }
        Ok(form)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn degree(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0.0).count()
    }

    /// Row-major offset of a 0-based multi-index, or `None` when out of range.
    pub fn offset(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.dims.len() {
            return None;
        }
        let mut flat = 0usize;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d {
                return None;
            }
            flat = flat * d + i;
        }
        Some(flat)
    }

    /// Coefficient at a 0-based multi-index.
    ///
    /// Panics if the index is out of range.
    pub fn get(&self, index: &[usize]) -> f64 {
        let flat = self
            .offset(index)
            .unwrap_or_else(|| panic!("index {:?} out of range for dims {:?}", index, self.dims));
        self.coeffs[flat]
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidForm("coefficient is not finite".into()));
        }
        let flat = self.offset(index).ok_or_else(|| {
            Error::InvalidForm(format!("index {:?} out of range for dims {:?}", index, self.dims))
        })?;
        self.coeffs[flat] = value;
        Ok(())
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Advances a row-major odometer; wraps to all zeros after the last index.
    pub(crate) fn advance(&self, index: &mut [usize]) {
        for slot in (0..index.len()).rev() {
            index[slot] += 1;
            if index[slot] < self.dims[slot] {
                return;
            }
            index[slot] = 0;
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            coeffs: self.coeffs.iter().map(|&v| c * v).collect(),
            label: self.label.clone(),
        }
    }

    /// New form whose slot `i` is slot `perm[i]` of `self`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        let m = self.degree();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidForm(format!(
                "{:?} is not a permutation of {} slots",
                perm, m
            )));
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut source = vec![0usize; m];
        let out = Self::from_fn(dims, |index| {
            for (i, &p) in perm.iter().enumerate() {
                source[p] = index[i];
            }
            self.get(&source)
        })?;
        Ok(Self {
            label: self.label.clone(),
            ..out
        })
    }

    /// Swaps the two slots of a bilinear form.
    pub fn transpose(&self) -> Result<Self> {
        if self.degree() != 2 {
            return Err(Error::InvalidForm(format!(
                "transpose needs a bilinear form, got degree {}",
                self.degree()
            )));
        }
        self.permute_slots(&[1, 0])
    }

    /// `U(x¹, …, xᵐ)`; every point must have exactly the support size of its slot.
    pub fn evaluate(&self, points: &[&[f64]]) -> Result<f64> {
        if points.len() != self.degree() {
            return Err(Error::DegreeMismatch {
                form: self.degree(),
                exponents: points.len(),
            });
        }
        for (slot, (p, &d)) in points.iter().zip(&self.dims).enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    slot: slot + 1,
                    expected: d,
                    got: p.len(),
                });
            }
        }
        // contract the trailing slot repeatedly
        let mut current = self.coeffs.clone();
        for (p, &d) in points.iter().zip(&self.dims).rev() {
            current = current
                .chunks_exact(d)
                .map(|row| row.iter().zip(p.iter()).map(|(c, x)| c * x).sum())
                .collect();
        }
        Ok(current[0])
    }

    /// Contracts every slot except `slot` against `points`, returning the
    /// coefficient vector of the remaining linear functional.
    pub(crate) fn contract_except(&self, points: &[Vec<f64>], slot: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[slot]];
        let mut index = vec![0usize; self.degree()];
        for &c in &self.coeffs {
            if c != 0.0 {
                let mut w = c;
                for (l, &i) in index.iter().enumerate() {
                    if l != slot {
                        w *= points[l][i];
                    }
                }
                out[index[slot]] += w;
            }
            self.advance(&mut index);
        }
        out
    }

    /// The `(m+1)`-linear form `T(x⁰, x¹, …, xᵐ) = self(x¹, …, xᵐ) · x⁰₁`.
    pub fn lift(&self) -> Self {
        let mut dims = Vec::with_capacity(self.degree() + 1);
        dims.push(1);
        dims.extend_from_slice(&self.dims);
        // a leading axis of length 1 leaves the row-major layout unchanged
        Self {
            dims,
            coeffs: self.coeffs.clone(),
            label: self.label.as_ref().map(|l| format!("lift({l})")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(MultilinearForm::new(vec![], vec![]).is_err());
        assert!(MultilinearForm::new(vec![2, 0], vec![]).is_err());
        assert!(MultilinearForm::new(vec![2, 2], vec![1.0; 3]).is_err());
        assert!(MultilinearForm::new(vec![1], vec![f64::NAN]).is_err());
    }

    #[test]
    fn evaluate_littlewood() {
        let a = littlewood2();
        let v = a.evaluate(&[&[1.0, 1.0], &[1.0, -1.0]]).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn evaluate_triple_against_term_sum() {
        let u = triple221();
        let x = [1.0, 1.0, 0.0, 0.0];
        let y = [1.0, 1.0, 0.0, 0.0];
        let z = [1.0, 1.0];
        // term-by-term expansion of the defining polynomial
        let direct = (z[0] + z[1]) * (x[0] * y[0] + x[0] * y[1] + x[1] * y[0] - x[1] * y[1])
            + (z[0] - z[1]) * (x[2] * y[2] + x[2] * y[3] + x[3] * y[2] - x[3] * y[3]);
        assert_eq!(direct, 4.0);
        assert_eq!(u.evaluate(&[&x, &y, &z]).unwrap(), direct);
    }

    #[test]
    fn zero_vector_gives_zero() {
        let u = triple221();
        let v = u
            .evaluate(&[&[1.0, -2.0, 3.0, 0.5], &[0.0; 4], &[1.0, 1.0]])
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn evaluate_names_bad_slot() {
        let u = triple221();
        let err = u
            .evaluate(&[&[1.0; 4], &[1.0; 3], &[1.0; 2]])
            .unwrap_err();
        match err {
            Error::DimensionMismatch { slot, expected, got } => {
                assert_eq!((slot, expected, got), (2, 4, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn permute_moves_coefficients() {
        let u = triple221();
        let p = u.permute_slots(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[2, 4, 4]);
        for k in 0..2 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(p.get(&[k, i, j]), u.get(&[i, j, k]));
                }
            }
        }
        assert!(u.permute_slots(&[0, 0, 1]).is_err());
    }

    #[test]
    fn lift_prepends_unit_slot() {
        let single = MultilinearForm::new(vec![1], vec![1.0]).unwrap();
        let lifted = single.lift();
        assert_eq!(lifted.dims(), &[1, 1]);
        assert_eq!(lifted.coeffs(), &[1.0]);

        let a = littlewood2().lift();
        assert_eq!(a.dims(), &[1, 2, 2]);
        let base = littlewood2();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(a.get(&[0, i, j]), base.get(&[i, j]));
            }
        }
    }

    #[test]
    fn contract_except_matches_evaluate() {
        let u = triple221();
        let pts = vec![vec![1.0, -1.0, 0.5, 2.0], vec![0.3, 1.0, -1.0, 1.0], vec![1.0, -0.25]];
        for slot in 0..3 {
            let g = u.contract_except(&pts, slot);
            let direct: f64 = g.iter().zip(&pts[slot]).map(|(a, b)| a * b).sum();
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            assert!((direct - u.evaluate(&refs).unwrap()).abs() < 1e-12);
        }
    }
}
