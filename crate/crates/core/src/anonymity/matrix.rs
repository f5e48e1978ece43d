use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{distance_indexed, IndexedDistribution};

/// Symmetric pairwise distances with a zero diagonal, stored as the strict
/// upper triangle in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<K> {
    keys: Vec<K>,
    upper: Vec<f64>,
}

fn tri_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl<K: Ord + Clone + Send + Sync> DistanceMatrix<K> {
    /// Evaluate `f(i, j)` for every `i < j`, rows in parallel.
    pub fn from_fn<F>(keys: Vec<K>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let n = keys.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| f(i, j)).collect())
            .collect();
        let upper: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_upper(keys, upper)
    }

    pub fn from_distributions(keys: Vec<K>, dists: &[IndexedDistribution]) -> Result<Self> {
        if keys.len() != dists.len() {
            return Err(Error::InvalidArgument("keys and distributions differ in length".into()));
        }
        Self::from_fn(keys, |i, j| distance_indexed(&dists[i], &dists[j]))
    }

    /// Build from a condensed upper triangle. Entries must lie in `[0, 1]`.
    pub fn from_upper(keys: Vec<K>, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != tri_len(keys.len()) {
            return Err(Error::InvalidArgument(format!(
                "expected {} upper-triangle entries for {} keys, got {}",
                tri_len(keys.len()),
                keys.len(),
                upper.len()
            )));
        }
        if let Some(v) = upper.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("distance {v} outside [0, 1]")));
        }
        let mut sorted = keys.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate keys".into()));
        }
        Ok(DistanceMatrix { keys, upper })
    }

    /// Build from a full square matrix, checking symmetry and the diagonal.
    pub fn from_dense(keys: Vec<K>, dense: &[Vec<f64>]) -> Result<Self> {
        let n = keys.len();
        if dense.len() != n || dense.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix shape does not match keys".into()));
        }
        let mut upper = Vec::with_capacity(tri_len(n));
        for i in 0..n {
            if dense[i][i] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                if dense[i][j] != dense[j][i] {
                    return Err(Error::InvalidArgument(format!("asymmetric at ({i}, {j})")));
                }
                upper.push(dense[i][j]);
            }
        }
        Self::from_upper(keys, upper)
    }

    pub fn position(&self, key: &K) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }
}

impl<K> DistanceMatrix<K> {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    /// Strict upper triangle, row-major.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.upper[self.index(i, j)],
            Greater => self.upper[self.index(j, i)],
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let n = self.keys.len();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Distances from row `i` to every key, including 0 for itself.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|j| self.get(i, j)).collect()
    }
}

/// Rectangular distances between two key sets (e.g. two communities).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMatrix<R, C> {
    rows: Vec<R>,
    cols: Vec<C>,
    data: Vec<f64>,
}

impl<R: Send + Sync, C: Send + Sync> CrossMatrix<R, C> {
    pub fn from_fn<F>(rows: Vec<R>, cols: Vec<C>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let nc = cols.len();
        let data: Vec<f64> = (0..rows.len())
            .into_par_iter()
            .map(|i| (0..nc).map(|j| f(i, j)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        Self::from_data(rows, cols, data)
    }

    pub fn from_distributions(
        rows: Vec<R>,
        row_dists: &[IndexedDistribution],
        cols: Vec<C>,
        col_dists: &[IndexedDistribution],
    ) -> Result<Self> {
        if rows.len() != row_dists.len() || cols.len() != col_dists.len() {
            return Err(Error::InvalidArgument("keys and distributions differ in length".into()));
        }
        Self::from_fn(rows, cols, |i, j| distance_indexed(&row_dists[i], &col_dists[j]))
    }

    pub fn from_data(rows: Vec<R>, cols: Vec<C>, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows.len() * cols.len() {
            return Err(Error::InvalidArgument("data length does not match shape".into()));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("distance {v} outside [0, 1]")));
        }
        Ok(CrossMatrix { rows, cols, data })
    }
}

impl<R, C> CrossMatrix<R, C> {
    pub fn rows(&self) -> &[R] {
        &self.rows
    }

    pub fn cols(&self) -> &[C] {
        &self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nc = self.cols.len();
        &self.data[i * nc..(i + 1) * nc]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows.len()).map(|i| self.get(i, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_indexing() {
        let keys: Vec<u32> = (0..5).collect();
        let m = DistanceMatrix::from_fn(keys, |i, j| (i * 10 + j) as f64 / 100.0).unwrap();
        for i in 0..5 {
            assert_eq!(m.get(i, i), 0.0);
            for j in i + 1..5 {
                let want = (i * 10 + j) as f64 / 100.0;
                assert_eq!(m.get(i, j), want);
                assert_eq!(m.get(j, i), want);
            }
        }
    }

    #[test]
    fn dense_validation() {
        let keys = vec!["a", "b"];
        assert!(DistanceMatrix::from_dense(keys.clone(), &[vec![0.0, 0.5], vec![0.5, 0.0]]).is_ok());
        assert!(DistanceMatrix::from_dense(keys.clone(), &[vec![0.0, 0.5], vec![0.4, 0.0]]).is_err());
        assert!(DistanceMatrix::from_dense(keys.clone(), &[vec![0.1, 0.5], vec![0.5, 0.0]]).is_err());
        assert!(DistanceMatrix::from_dense(keys, &[vec![0.0, 1.5], vec![1.5, 0.0]]).is_err());
        assert!(DistanceMatrix::from_upper(vec!["a", "a"], vec![0.0]).is_err());
    }

    #[test]
    fn cross_layout() {
        let m = CrossMatrix::from_fn(vec![0, 1], vec!['x', 'y', 'z'], |i, j| (i + j) as f64 / 10.0).unwrap();
        assert_eq!(m.row(1), &[0.1, 0.2, 0.3]);
        assert_eq!(m.column(2), vec![0.2, 0.3]);
    }
}
