//! JSON literals for matrices, clocks, states, groups and representations,
//! and their conversion into library objects.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use syncsub::grouprep::{
    builtin_group, BuiltinGroup, CharacterTable, FiniteGroup, Irrep, Representation,
};
use syncsub::opcore::{CMatrix, Hermitian, Unitary};
use syncsub::{ClockObservable, Tolerances};

use crate::error::{HarnessError, Result};

/// A square complex matrix in one of three spellings:
///
/// - `{"dim": n, "entries": [[re, im], ...]}` (row-major, `n²` pairs);
/// - `{"rows": [[...], ...]}` (real rows);
/// - `{"diag": [...]}` (real diagonal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixLit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
}

fn finite(field: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(HarnessError::validation(field, "non-finite number"))
    }
}

impl MatrixLit {
    pub fn diag(values: &[f64]) -> Self {
        Self {
            dim: None,
            entries: None,
            rows: None,
            diag: Some(values.to_vec()),
        }
    }

    pub fn rows(rows: &[&[f64]]) -> Self {
        Self {
            dim: None,
            entries: None,
            rows: Some(rows.iter().map(|r| r.to_vec()).collect()),
            diag: None,
        }
    }

    pub fn to_matrix(&self, field: &str) -> Result<CMatrix> {
        let forms = [
            self.entries.is_some(),
            self.rows.is_some(),
            self.diag.is_some(),
        ];
        if forms.iter().filter(|&&b| b).count() != 1 {
            return Err(HarnessError::validation(
                field,
                "matrix needs exactly one of 'entries', 'rows' or 'diag'",
            ));
        }
        if self.dim.is_some() && self.entries.is_none() {
            return Err(HarnessError::validation(
                format!("{field}.dim"),
                "'dim' only accompanies 'entries'",
            ));
        }
        let m = if let Some(entries) = &self.entries {
            let n = self
                .dim
                .ok_or_else(|| HarnessError::validation(format!("{field}.dim"), "missing field"))?;
            if n == 0 {
                return Err(HarnessError::validation(
                    format!("{field}.dim"),
                    "dimension must be positive",
                ));
            }
            if entries.len() != n * n {
                return Err(HarnessError::validation(
                    format!("{field}.entries"),
                    format!(
                        "expected {} entries for dim {n}, got {}",
                        n * n,
                        entries.len()
                    ),
                ));
            }
            finite(
                &format!("{field}.entries"),
                entries.iter().flatten().copied(),
            )?;
            let data = entries
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            CMatrix::from_row_major(n, n, data)
                .map_err(|e| HarnessError::from_core(&format!("{field}.entries"), e))?
        } else if let Some(rows) = &self.rows {
            let n = rows.len();
            if n == 0 {
                return Err(HarnessError::validation(
                    format!("{field}.rows"),
                    "matrix is empty",
                ));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != n) {
                return Err(HarnessError::validation(
                    format!("{field}.rows[{i}]"),
                    format!("expected {n} columns, got {}", rows[i].len()),
                ));
            }
            finite(&format!("{field}.rows"), rows.iter().flatten().copied())?;
            CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0))
        } else {
            let d = self.diag.as_ref().expect("checked above");
            if d.is_empty() {
                return Err(HarnessError::validation(
                    format!("{field}.diag"),
                    "matrix is empty",
                ));
            }
            finite(&format!("{field}.diag"), d.iter().copied())?;
            CMatrix::from_diag(d)
        };
        Ok(m)
    }

    pub fn to_hermitian(&self, field: &str, tol: &Tolerances) -> Result<Hermitian> {
        Hermitian::with_tolerances(self.to_matrix(field)?, tol)
            .map_err(|e| HarnessError::from_core(field, e))
    }
}

/// `{"labels": [...], "basis": matrix}`; the basis defaults to the
/// standard one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockLit {
    pub labels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<MatrixLit>,
}

impl ClockLit {
    pub fn to_clock(&self, field: &str, tol: &Tolerances) -> Result<ClockObservable> {
        if self.labels.is_empty() {
            return Err(HarnessError::validation(
                format!("{field}.labels"),
                "no labels",
            ));
        }
        finite(&format!("{field}.labels"), self.labels.iter().copied())?;
        let basis = match &self.basis {
            None => Unitary::identity(self.labels.len()),
            Some(b) => {
                let f = format!("{field}.basis");
                let m = b.to_matrix(&f)?;
                Unitary::with_tolerances(m, tol).map_err(|e| HarnessError::from_core(&f, e))?
            }
        };
        ClockObservable::with_options(self.labels.clone(), basis, tol)
            .map_err(|e| HarnessError::from_core(field, e))
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberLit {
    Real(f64),
    Complex([f64; 2]),
}

impl NumberLit {
    pub fn value(self) -> Complex64 {
        match self {
            Self::Real(x) => Complex64::new(x, 0.0),
            Self::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A built-in group name (`"S3"`, `"Z2xZ2"`, ...) or an explicit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupLit {
    Named(String),
    Table(GroupTableLit),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTableLit {
    /// Element names; default `g0, g1, ...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub mult_table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepLit {
    pub name: String,
    pub dim: usize,
    /// One value per conjugacy class, in class order.
    pub characters: Vec<NumberLit>,
}

/// Group, its character table and a display name.
pub struct GroupData {
    pub name: String,
    pub group: FiniteGroup,
    pub chars: CharacterTable,
}

pub fn build_group(lit: &GroupLit, characters: Option<&[IrrepLit]>) -> Result<GroupData> {
    let (name, group, builtin_chars) = match lit {
        GroupLit::Named(name) => {
            let which =
                BuiltinGroup::parse(name).map_err(|e| HarnessError::from_core("group", e))?;
            let (g, chars) =
                builtin_group::<f64>(which).map_err(|e| HarnessError::from_core("group", e))?;
            (which.name(), g, Some(chars))
        }
        GroupLit::Table(t) => {
            let labels = t
                .labels
                .clone()
                .unwrap_or_else(|| (0..t.mult_table.len()).map(|i| format!("g{i}")).collect());
            let g = FiniteGroup::from_table(labels, t.mult_table.clone(), t.classes.clone())
                .map_err(|e| HarnessError::from_core("group", e))?;
            (format!("order-{} table", g.order()), g, None)
        }
    };
    let chars = match (characters, builtin_chars) {
        (Some(lits), _) => {
            let irreps = lits
                .iter()
                .map(|l| Irrep {
                    name: l.name.clone(),
                    dim: l.dim,
                    characters: l.characters.iter().map(|c| c.value()).collect(),
                })
                .collect();
            CharacterTable::new(&group, irreps)
                .map_err(|e| HarnessError::from_core("characters", e))?
        }
        (None, Some(c)) => c,
        (None, None) => {
            return Err(HarnessError::validation(
                "characters",
                "a character table is required for groups given by table",
            ))
        }
    };
    Ok(GroupData { name, group, chars })
}

/// A representation given by generator images, by one matrix per element,
/// or as the regular representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepLit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<BTreeMap<String, MatrixLit>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<MatrixLit>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regular: Option<bool>,
}

impl RepLit {
    pub fn to_rep(&self, field: &str, group: &FiniteGroup) -> Result<Representation> {
        let forms = [
            self.generators.is_some(),
            self.elements.is_some(),
            self.regular == Some(true),
        ];
        if forms.iter().filter(|&&b| b).count() != 1 {
            return Err(HarnessError::validation(
                field,
                "representation needs exactly one of 'generators', 'elements' or 'regular': true",
            ));
        }
        if let Some(gens) = &self.generators {
            let mut images = Vec::with_capacity(gens.len());
            for (label, m) in gens {
                let f = format!("{field}.generators.{label}");
                let g = group.index_of(label).ok_or_else(|| {
                    HarnessError::validation(&f, "no group element has this label")
                })?;
                images.push((g, m.to_matrix(&f)?));
            }
            Representation::from_generators(group.clone(), &images)
                .map_err(|e| HarnessError::from_core(field, e))
        } else if let Some(elements) = &self.elements {
            let matrices = elements
                .iter()
                .enumerate()
                .map(|(i, m)| m.to_matrix(&format!("{field}.elements[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Representation::new(group.clone(), matrices)
                .map_err(|e| HarnessError::from_core(field, e))
        } else {
            Ok(Representation::regular(group.clone()))
        }
    }
}
