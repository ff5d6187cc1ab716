//! Finite sequence prefixes and their on-disk JSON form.
//!
//! Terms are indexed from 1. Scalar sequences have dimension 1; vector-valued
//! sequences store every term with the same fixed dimension.

use std::borrow::Cow;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fib_core;

#[derive(Debug, Clone, PartialEq)]
pub struct RealSequence {
    values: Vec<f64>,
    dim: usize,
    provenance: String,
}

impl RealSequence {
    /// Builds a scalar sequence. Every value must be finite.
    pub fn scalar(values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        Self::from_flat(values, 1, provenance)
    }

    /// Builds a vector-valued sequence from per-term rows of equal length.
    pub fn vector(rows: Vec<Vec<f64>>, provenance: impl Into<String>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(domain("sequence terms must have dimension >= 1"));
        }
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(domain(format!(
                    "term {} has dimension {}, expected {}",
                    i + 1,
                    row.len(),
                    dim
                )));
            }
            flat.extend(row);
        }
        Self::from_flat(flat, dim, provenance)
    }

    /// Builds a sequence from a row-major buffer of `len * dim` values.
    pub fn from_flat(values: Vec<f64>, dim: usize, provenance: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(domain("sequence terms must have dimension >= 1"));
        }
        if values.is_empty() {
            return Err(domain("sequence must be nonempty"));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(domain("flat buffer length is not a multiple of the dimension"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!(
                "term {} is not finite ({})",
                pos / dim + 1,
                values[pos]
            )));
        }
        Ok(Self {
            values,
            dim,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Term `k` (1-indexed).
    ///
    /// Panics if `k` is zero or past the end.
    pub fn term(&self, k: usize) -> &[f64] {
        assert!(k >= 1 && k <= self.len(), "term index {k} out of range");
        &self.values[(k - 1) * self.dim..k * self.dim]
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Scalar view; `None` for vector-valued sequences.
    pub fn as_scalars(&self) -> Option<&[f64]> {
        (self.dim == 1).then_some(self.values.as_slice())
    }

    /// First `n` terms.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(domain(format!(
                "cannot truncate a length-{} sequence to {n}",
                self.len()
            )));
        }
        Ok(Self {
            values: self.values[..n * self.dim].to_vec(),
            dim: self.dim,
            provenance: self.provenance.clone(),
        })
    }
}

/// Which side of the F̂ transform a sequence was supplied on.
///
/// Sequences whose F̂-image is known in closed form (spike families, for
/// instance) have preimages that grow like the golden ratio squared per term,
/// which overflows `f64` within a few hundred terms. Supplying the image
/// directly keeps such sequences analysable at any length; the terms are
/// still uniquely determined because F̂ is invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Values are the sequence terms `x_k`.
    #[default]
    Terms,
    /// Values are the transformed terms `(F̂x)_k`.
    Image,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Terms => "terms",
            Domain::Image => "image",
        }
    }
}

/// A sequence handed to an analysis, tagged with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub values: RealSequence,
    pub domain: Domain,
}

impl Subject {
    pub fn terms(values: RealSequence) -> Self {
        Self {
            values,
            domain: Domain::Terms,
        }
    }

    pub fn image(values: RealSequence) -> Self {
        Self {
            values,
            domain: Domain::Image,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    /// The sequence a test should examine: `F̂x` when `apply_fhat` is set,
    /// otherwise `x` itself.
    pub fn under_test(&self, apply_fhat: bool) -> Result<Cow<'_, RealSequence>> {
        match (self.domain, apply_fhat) {
            (Domain::Terms, true) => Ok(Cow::Owned(fib_core::fhat_apply(&self.values)?)),
            (Domain::Terms, false) | (Domain::Image, true) => Ok(Cow::Borrowed(&self.values)),
            (Domain::Image, false) => {
                let x = fib_core::fhat_invert(&self.values, fib_core::Arithmetic::Float)?;
                Ok(Cow::Owned(x))
            }
        }
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        Ok(Self {
            values: self.values.truncated(n)?,
            domain: self.domain,
        })
    }
}

/// JSON sequence file: `{"name": .., "dim": .., "values": [..]}`.
///
/// Scalar sequences may list plain numbers; vector sequences list arrays.
/// The optional `domain` field (`"terms"` or `"image"`) defaults to terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub name: String,
    pub dim: usize,
    pub values: Vec<FileTerm>,
    #[serde(default, skip_serializing_if = "is_terms")]
    pub domain: Domain,
}

fn is_terms(d: &Domain) -> bool {
    *d == Domain::Terms
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FileTerm {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl SequenceFile {
    pub fn from_subject(name: &str, subject: &Subject) -> Self {
        let seq = &subject.values;
        let values = if seq.dim() == 1 {
            seq.as_flat().iter().map(|&v| FileTerm::Scalar(v)).collect()
        } else {
            seq.terms().map(|t| FileTerm::Vector(t.to_vec())).collect()
        };
        Self {
            name: name.to_string(),
            dim: seq.dim(),
            values,
            domain: subject.domain,
        }
    }

    pub fn into_subject(self, provenance: impl Into<String>) -> Result<Subject> {
        if self.dim == 0 {
            return Err(Error::SequenceFile("dim must be >= 1".into()));
        }
        let mut flat = Vec::with_capacity(self.values.len() * self.dim);
        for (i, term) in self.values.into_iter().enumerate() {
            match term {
                FileTerm::Scalar(v) if self.dim == 1 => flat.push(v),
                FileTerm::Vector(v) if v.len() == self.dim => flat.extend(v),
                _ => {
                    return Err(Error::SequenceFile(format!(
                        "value {} does not match dim {}",
                        i + 1,
                        self.dim
                    )))
                }
            }
        }
        let values = RealSequence::from_flat(flat, self.dim, provenance)
            .map_err(|e| Error::SequenceFile(e.to_string()))?;
        Ok(Subject {
            values,
            domain: self.domain,
        })
    }

    pub fn read(path: &Path) -> Result<Subject> {
        let text = std::fs::read_to_string(path)?;
        let file: SequenceFile = serde_json::from_str(&text)?;
        file.into_subject(path.display().to_string())
    }
}
