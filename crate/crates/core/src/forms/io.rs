//! JSON form files with sparse, 1-based entries.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MultilinearForm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub index: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFile {
    pub degree: usize,
    pub dims: Vec<usize>,
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FormFile {
    pub fn into_form(self) -> Result<MultilinearForm> {
        if self.degree != self.dims.len() {
            return Err(Error::InvalidForm(format!(
                "degree {} does not match {} dims",
                self.degree,
                self.dims.len()
            )));
        }
        let mut form = MultilinearForm::zeros(self.dims)?;
        let mut seen = HashSet::new();
        for entry in &self.entries {
            if entry.index.len() != form.degree() {
                return Err(Error::InvalidForm(format!(
                    "entry {:?} has {} indices, expected {}",
                    entry.index,
                    entry.index.len(),
                    form.degree()
                )));
            }
            if entry.index.contains(&0) {
                return Err(Error::InvalidForm(format!(
                    "entry {:?}: indices are 1-based",
                    entry.index
                )));
            }
            let zero_based: Vec<usize> = entry.index.iter().map(|i| i - 1).collect();
            let flat = form.offset(&zero_based).ok_or_else(|| {
                Error::InvalidForm(format!(
                    "entry {:?} out of range for dims {:?}",
                    entry.index,
                    form.dims()
                ))
            })?;
            if !seen.insert(flat) {
                return Err(Error::InvalidForm(format!(
                    "duplicate entry {:?}",
                    entry.index
                )));
            }
            if !entry.value.is_finite() {
                return Err(Error::InvalidForm(format!(
                    "entry {:?} is not finite",
                    entry.index
                )));
            }
            form.coeffs_mut()[flat] = entry.value;
        }
        Ok(match self.label {
            Some(label) => form.with_label(label),
            None => form,
        })
    }
}

impl From<&MultilinearForm> for FormFile {
    fn from(form: &MultilinearForm) -> Self {
        let mut entries = Vec::new();
        let mut index = vec![0usize; form.degree()];
        for &c in form.coeffs() {
            if c != 0.0 {
                entries.push(Entry {
                    index: index.iter().map(|i| i + 1).collect(),
                    value: c,
                });
            }
            form.advance(&mut index);
        }
        FormFile {
            degree: form.degree(),
            dims: form.dims().to_vec(),
            entries,
            label: form.label().map(str::to_owned),
        }
    }
}

impl MultilinearForm {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<FormFile>(text)?.into_form()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FormFile::from(self)).expect("form file serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{random_sign_form, triple221};
    use proptest::prelude::*;

    #[test]
    fn sparse_file_densifies() {
        let text = r#"{ "degree": 2, "dims": [2, 3],
            "entries": [ { "index": [1, 1], "value": 2.5 }, { "index": [2, 3], "value": -1 } ],
            "label": "demo" }"#;
        let f = MultilinearForm::from_json(text).unwrap();
        assert_eq!(f.dims(), &[2, 3]);
        assert_eq!(f.coeffs(), &[2.5, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(f.label(), Some("demo"));
    }

    #[test]
    fn rejects_malformed_files() {
        let dup = r#"{ "degree": 1, "dims": [2], "entries": [
            { "index": [1], "value": 1 }, { "index": [1], "value": 2 } ] }"#;
        assert!(matches!(MultilinearForm::from_json(dup), Err(Error::InvalidForm(m)) if m.contains("duplicate")));
        let zero_idx = r#"{ "degree": 1, "dims": [2], "entries": [ { "index": [0], "value": 1 } ] }"#;
        assert!(MultilinearForm::from_json(zero_idx).is_err());
        let oob = r#"{ "degree": 1, "dims": [2], "entries": [ { "index": [3], "value": 1 } ] }"#;
        assert!(MultilinearForm::from_json(oob).is_err());
        let deg = r#"{ "degree": 2, "dims": [2], "entries": [] }"#;
        assert!(MultilinearForm::from_json(deg).is_err());
        assert!(matches!(MultilinearForm::from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn catalog_round_trip() {
        let u = triple221();
        let back = MultilinearForm::from_json(&u.to_json()).unwrap();
        assert_eq!(back, u);
        assert_eq!(FormFile::from(&u).entries.len(), 16);
    }

    proptest! {
        #[test]
        fn random_forms_round_trip(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
            let f = random_sign_form(&[a, b], seed).unwrap().scale(0.37);
            prop_assert_eq!(MultilinearForm::from_json(&f.to_json()).unwrap(), f);
        }
    }
}
