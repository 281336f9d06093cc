//! Point containers shared by every stage of the pipeline.
//!
//! Points are stored row-major in one flat buffer; a point is borrowed as a
//! `&[f64]` of length `dim`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoresetError, Result};

/// A weighted point set with stable integer identifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    ids: Vec<u64>,
}

impl Dataset {
    pub fn new(dim: usize, coords: Vec<f64>, weights: Vec<f64>, ids: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if coords.len() % dim != 0 {
            return Err(invalid(format!(
                "coordinate buffer of length {} is not a multiple of dim={dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if weights.len() != n || ids.len() != n {
            return Err(invalid(format!(
                "length mismatch: {n} points, {} weights, {} ids",
                weights.len(),
                ids.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate in point {}", i / dim)));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid(format!("weight of point {i} is negative or non-finite")));
        }
        Ok(Self { dim, coords, weights, ids })
    }

    /// Unit weights, ids `0..n`.
    pub fn unweighted(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let n = if dim == 0 { 0 } else { coords.len() / dim };
        Self::new(dim, coords, vec![1.0; n], (0..n as u64).collect())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| invalid("no rows"))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(CoresetError::DimensionMismatch { expected: dim, got: r.len() });
            }
            coords.extend_from_slice(r);
        }
        Self::unweighted(dim, coords)
    }

    pub fn from_weighted_rows(rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let dim = rows.first().map(|r| r.0.len()).ok_or_else(|| invalid("no rows"))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (r, _) in rows {
            if r.len() != dim {
                return Err(CoresetError::DimensionMismatch { expected: dim, got: r.len() });
            }
            coords.extend_from_slice(r);
        }
        let weights = rows.iter().map(|r| r.1).collect();
        Self::new(dim, coords, weights, (0..rows.len() as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, row: usize) -> &[f64] {
        &self.coords[row * self.dim..(row + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn weight(&self, row: usize) -> f64 {
        self.weights[row]
    }

    pub fn id(&self, row: usize) -> u64 {
        self.ids[row]
    }

    pub fn total_weight(&self) -> f64 {
        crate::cost::pairwise_sum(&self.weights)
    }

    /// True when every weight is exactly one.
    pub fn is_unit_weighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Rows `rows` (in that order), keeping ids and weights.
    pub fn select(&self, rows: &[usize]) -> Dataset {
        let mut coords = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            coords.extend_from_slice(self.point(r));
        }
        Dataset {
            dim: self.dim,
            coords,
            weights: rows.iter().map(|&r| self.weights[r]).collect(),
            ids: rows.iter().map(|&r| self.ids[r]).collect(),
        }
    }

    /// Same points and ids with new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.dim, self.coords.clone(), weights, self.ids.clone())
    }

    /// Concatenates two datasets of equal dimension. Ids are kept as-is.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.dim != other.dim {
            return Err(CoresetError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        let mut ids = self.ids.clone();
        ids.extend_from_slice(&other.ids);
        Dataset::new(self.dim, coords, weights, ids)
    }

    /// Per-dimension `(min, max)` over all points.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (b, &c) in bounds.iter_mut().zip(p) {
                b.0 = b.0.min(c);
                b.1 = b.1.max(c);
            }
        }
        bounds
    }
}

/// An ordered list of centers. Repeated centers are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSet {
    dim: usize,
    coords: Vec<f64>,
}

impl CenterSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || coords.len() % dim != 0 {
            return Err(invalid("center set must be nonempty with a whole number of centers"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite center coordinate"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| invalid("no centers"))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(CoresetError::DimensionMismatch { expected: dim, got: r.len() });
            }
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    /// Centers located at the given rows of `data`.
    pub fn from_dataset_rows(data: &Dataset, rows: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * data.dim());
        for &r in rows {
            coords.extend_from_slice(data.point(r));
        }
        Self::new(data.dim(), coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn center_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }
}
