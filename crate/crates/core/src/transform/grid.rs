use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::hypercross::CrossIndexSet;

/// Grids whose stored entries fill more than this fraction of the enclosing
/// rectangle are kept dense.
const DENSE_FILL_RATIO: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Dense(Array2<f64>),
    Sparse(BTreeMap<(usize, usize), f64>),
}

/// Fourier–Chebyshev coefficients `a_{k,j}` for `0 ≤ k ≤ max_k`, `0 ≤ j ≤ max_j`.
///
/// Absent indices are exact zeros. Every stored value is finite. Equality
/// compares bounds and nonzero entries, not the storage layout.
#[derive(Clone, Debug)]
pub struct CoeffGrid {
    max_k: usize,
    max_j: usize,
    storage: Storage,
}

impl PartialEq for CoeffGrid {
    fn eq(&self, other: &Self) -> bool {
        self.max_k == other.max_k && self.max_j == other.max_j && self.iter().eq(other.iter())
    }
}

impl CoeffGrid {
    /// The zero grid with the given degree bounds.
    pub fn zeros(max_k: usize, max_j: usize) -> Self {
        CoeffGrid {
            max_k,
            max_j,
            storage: Storage::Sparse(BTreeMap::new()),
        }
    }

    /// Build a grid from `(k, j, value)` triples. Duplicate indices are rejected.
    pub fn from_entries<I>(max_k: usize, max_j: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (k, j, v) in entries {
            check_entry(max_k, max_j, k, j, v)?;
            if map.insert((k, j), v).is_some() {
                return Err(Error::invalid(format!("duplicate coefficient index ({k}, {j})")));
            }
        }
        Ok(Self::with_storage(max_k, max_j, Storage::Sparse(map)))
    }

    /// Build a grid from a dense `(max_k+1) × (max_j+1)` array.
    pub fn from_dense(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("dense coefficient array must be non-empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite coefficient {v}")));
        }
        Ok(Self::with_storage(rows - 1, cols - 1, Storage::Dense(values)))
    }

    fn with_storage(max_k: usize, max_j: usize, storage: Storage) -> Self {
        let mut grid = CoeffGrid { max_k, max_j, storage };
        grid.rebalance();
        grid
    }

    fn rebalance(&mut self) {
        let area = ((self.max_k + 1) * (self.max_j + 1)) as f64;
        let fill = self.nnz() as f64 / area;
        match &self.storage {
            Storage::Sparse(map) if fill > DENSE_FILL_RATIO => {
                let mut dense = Array2::zeros((self.max_k + 1, self.max_j + 1));
                for (&(k, j), &v) in map {
                    dense[[k, j]] = v;
                }
                self.storage = Storage::Dense(dense);
            }
            Storage::Dense(dense) if fill <= DENSE_FILL_RATIO => {
                let map = dense
                    .indexed_iter()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(idx, &v)| (idx, v))
                    .collect();
                self.storage = Storage::Sparse(map);
            }
            _ => {}
        }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn max_j(&self) -> usize {
        self.max_j
    }

    /// Whether the grid currently uses dense storage.
    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// `a_{k,j}`; zero outside the stored set (including outside the bounds).
    pub fn get(&self, k: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.get((k, j)).copied().unwrap_or(0.0),
            Storage::Sparse(m) => m.get(&(k, j)).copied().unwrap_or(0.0),
        }
    }

    /// Number of nonzero coefficients.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|v| **v != 0.0).count(),
            Storage::Sparse(m) => m.values().filter(|v| **v != 0.0).count(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// Nonzero entries in ascending `(k, j)` order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (usize, usize, f64)> + '_> {
        match &self.storage {
            Storage::Dense(d) => Box::new(
                d.indexed_iter()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|((k, j), &v)| (k, j, v)),
            ),
            Storage::Sparse(m) => Box::new(
                m.iter()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(&(k, j), &v)| (k, j, v)),
            ),
        }
    }

    /// Dense `(max_k+1) × (max_j+1)` copy.
    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(m) => {
                let mut dense = Array2::zeros((self.max_k + 1, self.max_j + 1));
                for (&(k, j), &v) in m {
                    dense[[k, j]] = v;
                }
                dense
            }
        }
    }

    /// `α · self`.
    pub fn scaled(&self, alpha: f64) -> Self {
        self.combine(alpha, &CoeffGrid::zeros(0, 0), 0.0)
    }

    /// `α · self + β · other`, with degree bounds enclosing both operands.
    pub fn combine(&self, alpha: f64, other: &CoeffGrid, beta: f64) -> Self {
        let max_k = self.max_k.max(other.max_k);
        let max_j = self.max_j.max(other.max_j);
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (k, j, v) in self.iter() {
            *map.entry((k, j)).or_insert(0.0) += alpha * v;
        }
        for (k, j, v) in other.iter() {
            *map.entry((k, j)).or_insert(0.0) += beta * v;
        }
        map.retain(|_, v| *v != 0.0);
        Self::with_storage(max_k, max_j, Storage::Sparse(map))
    }

    /// `self - other`.
    pub fn sub(&self, other: &CoeffGrid) -> Self {
        self.combine(1.0, other, -1.0)
    }

    /// `self + other`.
    pub fn add(&self, other: &CoeffGrid) -> Self {
        self.combine(1.0, other, 1.0)
    }

    /// Restriction to the index set; bounds become the enclosing box of the set.
    pub fn restrict(&self, set: &CrossIndexSet) -> Self {
        let map = set
            .iter()
            .filter_map(|(k, j)| {
                let v = self.get(k, j);
                (v != 0.0).then_some(((k, j), v))
            })
            .collect();
        Self::with_storage(set.n(), set.j_bound(), Storage::Sparse(map))
    }

    /// A copy whose degree bounds are at least `(max_k, max_j)`.
    pub fn widened(&self, max_k: usize, max_j: usize) -> Self {
        let mut out = self.clone();
        if max_k > self.max_k || max_j > self.max_j {
            let map = self.iter().map(|(k, j, v)| ((k, j), v)).collect();
            out = Self::with_storage(self.max_k.max(max_k), self.max_j.max(max_j), Storage::Sparse(map));
        }
        out
    }
}

fn check_entry(max_k: usize, max_j: usize, k: usize, j: usize, v: f64) -> Result<()> {
    if k > max_k || j > max_j {
        return Err(Error::invalid(format!(
            "index ({k}, {j}) outside degree bounds ({max_k}, {max_j})"
        )));
    }
    if !v.is_finite() {
        return Err(Error::invalid(format!("non-finite coefficient at ({k}, {j})")));
    }
    Ok(())
}
