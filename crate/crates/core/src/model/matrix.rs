use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense square matrix of `f64`, stored row-major.
///
/// Serialised as an array of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self::filled(n, 0.0)
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Matrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, &x)| ((k / n, k % n), x))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Sum of `self[i][j] * other[i][j]`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Net outflow of node `i`: `sum_j (x_ij - x_ji)`.
    pub fn net_outflow(&self, i: usize) -> f64 {
        (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self[(i, j)] - self[(j, i)])
            .sum()
    }

    /// Removes flow circulating around 2-cycles, leaving at most one of
    /// `x_ij`, `x_ji` positive. Net outflows are unchanged.
    pub fn cancel_two_cycles(&mut self) {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let m = self[(i, j)].min(self[(j, i)]);
                if m > 0.0 {
                    self[(i, j)] -= m;
                    self[(j, i)] -= m;
                }
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.rows())
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).ok_or_else(|| serde::de::Error::custom("matrix is not square"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_outflow_and_two_cycles() {
        let mut m = Matrix::from_rows(vec![
            vec![0.0, 0.5, 0.0],
            vec![0.2, 0.0, 0.1],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let before: Vec<f64> = (0..3).map(|i| m.net_outflow(i)).collect();
        m.cancel_two_cycles();
        assert_eq!(m[(1, 0)], 0.0);
        assert!((m[(0, 1)] - 0.3).abs() < 1e-15);
        for i in 0..3 {
            assert!((m.net_outflow(i) - before[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0]]).is_none());
        let m: Result<Matrix, _> = serde_json::from_str("[[1.0],[2.0]]");
        assert!(m.is_err());
    }

    #[test]
    fn empty_matrix_rows() {
        assert_eq!(Matrix::zeros(0).rows().count(), 0);
    }
}
