//! JSON description of an equivariant chain complex.
//!
//! ```json
//! {
//!   "group": {"free_abelian": 1},
//!   "cells": [1, 1],
//!   "boundaries": [[[[{"coefficient": 1, "element": [1]}, {"coefficient": -1, "element": [0]}]]]]
//! }
//! ```
//!
//! `boundaries[k][row][col]` is the term list of the entry of `d_{k+1}`. A
//! term names its group element by an exponent vector (`element`), a word in
//! signed 1-based generator indices (`word`) or, in matrix groups, by its
//! entries (`matrix`). Matrix groups are given as
//! `{"matrix": {"generators": [[[1, 2], [0, 1]], ...]}}`.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_ring::{EquivariantChainComplex, GroupRingElement, GroupRingMatrix};
use crate::groups::{Group, GroupElement, MatrixElement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDescriptor {
    FreeAbelian(usize),
    Matrix { generators: Vec<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub group: GroupDescriptor,
    pub cells: Vec<usize>,
    pub boundaries: Vec<Vec<Vec<Vec<Term>>>>,
}

impl GroupDescriptor {
    pub fn to_group(&self) -> Result<Group> {
        match self {
            GroupDescriptor::FreeAbelian(n) => Group::free_abelian(*n),
            GroupDescriptor::Matrix { generators } => {
                Group::integral_matrix(generators.iter().map(|g| MatrixElement::from_rows(g)).collect::<Result<_>>()?)
            }
        }
    }
}

impl Term {
    fn to_element(&self, group: &Group) -> Result<GroupElement> {
        let g = match (&self.element, &self.word, &self.matrix) {
            (Some(v), None, None) => match group {
                Group::FreeAbelian { rank } if v.len() == *rank => GroupElement::Abelian(v.clone()),
                Group::FreeAbelian { rank } => {
                    return Err(Error::Invalid(format!("exponent vector {v:?} has length {}, expected {rank}", v.len())))
                }
                _ => return Err(Error::Invalid("exponent vectors need a free abelian group; use `word` or `matrix`".into())),
            },
            (None, Some(w), None) => group.element_from_word(w)?,
            (None, None, Some(m)) => GroupElement::Matrix(MatrixElement::from_rows(m)?),
            _ => return Err(Error::Invalid("a term needs exactly one of `element`, `word`, `matrix`".into())),
        };
        if !group.owns(&g) {
            return Err(Error::Invalid(format!("{g} is not an element of the group")));
        }
        Ok(g)
    }

    fn from_element(g: &GroupElement, c: &BigInt) -> Result<Term> {
        let coefficient = c.to_i64().ok_or(Error::Overflow)?;
        Ok(match g {
            GroupElement::Abelian(v) => Term { coefficient, element: Some(v.clone()), word: None, matrix: None },
            GroupElement::Matrix(m) => {
                let rows = (0..m.dim())
                    .map(|r| (0..m.dim()).map(|c| m.entry(r, c).to_i64().ok_or(Error::Overflow)).collect())
                    .collect::<Result<_>>()?;
                Term { coefficient, element: None, word: None, matrix: Some(rows) }
            }
        })
    }
}

impl ComplexDocument {
    pub fn from_json(text: &str) -> Result<ComplexDocument> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed complex document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialise")
    }

    /// Builds the complex, rejecting shape errors and `d d != 0` with its
    /// location.
    pub fn to_complex(&self) -> Result<EquivariantChainComplex> {
        let group = self.group.to_group()?;
        if self.boundaries.len() + 1 != self.cells.len() {
            return Err(Error::Invalid(format!(
                "{} cell counts need {} boundary matrices, got {}",
                self.cells.len(),
                self.cells.len().saturating_sub(1),
                self.boundaries.len()
            )));
        }
        let mut mats = Vec::with_capacity(self.boundaries.len());
        for (k, rows) in self.boundaries.iter().enumerate() {
            let (r, c) = (self.cells[k], self.cells[k + 1]);
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(Error::Invalid(format!("d_{} must be {r}x{c}", k + 1)));
            }
            let mut entries = Vec::with_capacity(r * c);
            for row in rows {
                for terms in row {
                    let items = terms
                        .iter()
                        .map(|t| Ok((t.to_element(&group)?, BigInt::from(t.coefficient))))
                        .collect::<Result<Vec<_>>>()?;
                    entries.push(GroupRingElement::from_terms(items));
                }
            }
            mats.push(GroupRingMatrix::from_entries(&group, r, c, entries)?);
        }
        EquivariantChainComplex::new(group, self.cells.clone(), mats)
    }

    pub fn from_complex(cx: &EquivariantChainComplex) -> Result<ComplexDocument> {
        let group = match cx.group() {
            Group::FreeAbelian { rank } => GroupDescriptor::FreeAbelian(*rank),
            Group::IntegralMatrix { generators, .. } => GroupDescriptor::Matrix {
                generators: generators
                    .iter()
                    .map(|m| {
                        (0..m.dim())
                            .map(|r| (0..m.dim()).map(|c| m.entry(r, c).to_i64().ok_or(Error::Overflow)).collect())
                            .collect()
                    })
                    .collect::<Result<_>>()?,
            },
        };
        let boundaries = cx
            .boundaries()
            .iter()
            .map(|d| {
                (0..d.rows())
                    .map(|r| {
                        (0..d.cols())
                            .map(|c| d.get(r, c).terms().map(|(g, k)| Term::from_element(g, k)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(ComplexDocument { group, cells: cx.cells().to_vec(), boundaries })
    }
}

pub fn load_complex(path: &Path) -> Result<EquivariantChainComplex> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    ComplexDocument::from_json(&text)?.to_complex()
}
