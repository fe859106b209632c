//! Dense tensors over [`Scalar`] in an orthonormal frame.
//!
//! Components are stored row-major. Indices are 0-based in the API and
//! 1-based in the JSON interchange format.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;
pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("dimension {0} outside {MIN_DIM}..={MAX_DIM}")]
    Dim(usize),
    #[error("rank {0} exceeds {MAX_RANK}")]
    Rank(usize),
    #[error("shape mismatch: dim {0} rank {1} vs dim {2} rank {3}")]
    Shape(usize, usize, usize, usize),
    #[error("expected {expected} components, got {got}")]
    Length { expected: usize, got: usize },
    #[error("index {idx:?} out of range for dim {dim}")]
    Index { idx: Vec<usize>, dim: usize },
    #[error("duplicate entry at index {0:?}")]
    Duplicate(Vec<usize>),
    #[error("index {idx:?} has length {len}, expected rank {rank}")]
    IndexLength { idx: Vec<usize>, len: usize, rank: usize },
    #[error("{0}")]
    Json(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    dim: usize,
    rank: usize,
    data: Vec<Scalar>,
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tensor(dim={}, rank={}, nonzero=[", self.dim, self.rank)?;
        let mut first = true;
        for (idx, v) in self.nonzero() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let one: Vec<usize> = idx.iter().map(|i| i + 1).collect();
            write!(f, "{one:?}={v}")?;
        }
        write!(f, "])")
    }
}

fn check_dim(dim: usize) -> Result<(), TensorError> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(TensorError::Dim(dim))
    }
}

impl Tensor {
    /// Zero tensor. Ranks above [`MAX_RANK`] are allowed only internally.
    pub fn zeros(dim: usize, rank: usize) -> Tensor {
        Tensor {
            dim,
            rank,
            data: vec![Scalar::ZERO; dim.pow(rank as u32)],
        }
    }

    pub fn try_zeros(dim: usize, rank: usize) -> Result<Tensor, TensorError> {
        check_dim(dim)?;
        if rank > MAX_RANK {
            return Err(TensorError::Rank(rank));
        }
        Ok(Tensor::zeros(dim, rank))
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<Scalar>) -> Result<Tensor, TensorError> {
        check_dim(dim)?;
        if rank > MAX_RANK {
            return Err(TensorError::Rank(rank));
        }
        let expected = dim.pow(rank as u32);
        if data.len() != expected {
            return Err(TensorError::Length {
                expected,
                got: data.len(),
            });
        }
        Ok(Tensor { dim, rank, data })
    }

    pub fn scalar(dim: usize, v: Scalar) -> Tensor {
        Tensor {
            dim,
            rank: 0,
            data: vec![v],
        }
    }

    /// The identity metric `g_ij`.
    pub fn metric(dim: usize) -> Tensor {
        let mut t = Tensor::zeros(dim, 2);
        for i in 0..dim {
            t.set(&[i, i], Scalar::ONE);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Scalar> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unravel(&self, mut off: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank];
        for slot in idx.iter_mut().rev() {
            *slot = off % self.dim;
            off /= self.dim;
        }
        idx
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Value of a rank-0 tensor.
    pub fn value(&self) -> &Scalar {
        assert_eq!(self.rank, 0, "value() on rank {} tensor", self.rank);
        &self.data[0]
    }

    /// Nonzero components in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(o, v)| (self.unravel(o), v))
    }

    fn same_shape(&self, other: &Tensor) -> Result<(), TensorError> {
        if self.dim != other.dim || self.rank != other.rank {
            Err(TensorError::Shape(self.dim, self.rank, other.dim, other.rank))
        } else {
            Ok(())
        }
    }

    /// Exact componentwise equality; shape mismatch is an error.
    pub fn equals(&self, other: &Tensor) -> Result<bool, TensorError> {
        self.same_shape(other)?;
        Ok(self.data == other.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn try_add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Tensor, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Tensor {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data,
        }
    }

    /// Panicking `+`; shapes must match.
    pub fn add(&self, other: &Tensor) -> Tensor {
        self.try_add(other).expect("tensor add")
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.try_sub(other).expect("tensor sub")
    }

    pub fn scale(&self, s: &Scalar) -> Tensor {
        let data = self.data.iter().map(|v| v * s).collect();
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data,
        }
    }

    pub fn neg(&self) -> Tensor {
        let data = self.data.iter().map(|v| -v).collect();
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data,
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: &Scalar, other: &Tensor) {
        self.same_shape(other).expect("tensor axpy");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_mul(s, b);
        }
    }

    /// `out[i_0..] = self[i_{perm[0]}..]`, i.e. output slot `k` reads input slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank);
        let mut out = Tensor::zeros(self.dim, self.rank);
        let mut src = vec![0; self.rank];
        for (o, v) in out.data.iter_mut().enumerate() {
            let mut off = o;
            for k in (0..self.rank).rev() {
                src[perm[k]] = off % self.dim;
                off /= self.dim;
            }
            *v = self.get(&src).clone();
        }
        out
    }

    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::Shape(self.dim, self.rank, other.dim, other.rank));
        }
        let rank = self.rank + other.rank;
        if rank > MAX_RANK {
            return Err(TensorError::Rank(rank));
        }
        let mut data = Vec::with_capacity(self.len() * other.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(Tensor {
            dim: self.dim,
            rank,
            data,
        })
    }

    /// First index tuple (row-major) where `self` and its transpose differ.
    pub fn asymmetry_witness(&self) -> Option<(usize, usize)> {
        assert_eq!(self.rank, 2);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self.get(&[i, j]) != self.get(&[j, i]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry_witness().is_none()
    }

    /// Sum of diagonal of a rank-2 tensor.
    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rank, 2);
        (0..self.dim).map(|i| self.get(&[i, i])).sum()
    }

    /// Component of largest absolute value (first in row-major order on ties),
    /// or `None` for the zero tensor.
    pub fn max_abs(&self) -> Option<(Vec<usize>, Scalar)> {
        let mut best: Option<(usize, Scalar)> = None;
        for (o, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            if best.as_ref().is_none_or(|(_, b)| a > *b) {
                best = Some((o, a));
            }
        }
        best.map(|(o, _)| (self.unravel(o), self.data[o].clone()))
    }

    /// Rows of a rank-2 tensor.
    pub fn to_matrix(&self) -> Vec<Vec<Scalar>> {
        assert_eq!(self.rank, 2);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(&[i, j]).clone()).collect())
            .collect()
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            dim: self.dim,
            rank: self.rank,
            entries: self
                .nonzero()
                .map(|(idx, v)| Entry {
                    idx: idx.iter().map(|i| i + 1).collect(),
                    val: v.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &TensorJson) -> Result<Tensor, TensorError> {
        let mut t = Tensor::try_zeros(j.dim, j.rank)?;
        let mut seen = HashSet::new();
        for e in &j.entries {
            let idx = e.zero_based(j.dim, j.rank)?;
            if !seen.insert(idx.clone()) {
                return Err(TensorError::Duplicate(e.idx.clone()));
            }
            t.set(&idx, e.val.clone());
        }
        Ok(t)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("tensor json")
    }

    pub fn from_json_str(s: &str) -> Result<Tensor, TensorError> {
        let j: TensorJson = serde_json::from_str(s).map_err(|e| TensorError::Json(e.to_string()))?;
        Tensor::from_json(&j)
    }
}

/// One `{ "idx": [...], "val": "..." }` entry with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub idx: Vec<usize>,
    pub val: Scalar,
}

impl Entry {
    /// Validates and converts to 0-based indices.
    pub fn zero_based(&self, dim: usize, rank: usize) -> Result<Vec<usize>, TensorError> {
        if self.idx.len() != rank {
            return Err(TensorError::IndexLength {
                idx: self.idx.clone(),
                len: self.idx.len(),
                rank,
            });
        }
        if self.idx.iter().any(|&i| i == 0 || i > dim) {
            return Err(TensorError::Index {
                idx: self.idx.clone(),
                dim,
            });
        }
        Ok(self.idx.iter().map(|i| i - 1).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub dim: usize,
    pub rank: usize,
    pub entries: Vec<Entry>,
}

/// Odometer over `dim^rank` index tuples in row-major order.
pub(crate) fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let g = Tensor::metric(2);
        let gg = g.tensor_product(&g).unwrap();
        assert_eq!(gg.rank(), 4);
        assert_eq!(gg.get(&[0, 0, 1, 1]), &Scalar::ONE);
        let z = Tensor::zeros(2, 2);
        assert!(g.tensor_product(&z).unwrap().is_zero());
        let two = Tensor::scalar(2, Scalar::int(2));
        assert_eq!(two.tensor_product(&g).unwrap(), g.scale(&Scalar::int(2)));
        assert!(g.tensor_product(&Tensor::metric(3)).is_err());
    }

    #[test]
    fn equality_examples() {
        let g = Tensor::metric(3);
        assert!(Tensor::zeros(3, 2).is_zero());
        assert!(g.equals(&g).unwrap());
        assert!(!g.equals(&g.scale(&Scalar::int(2))).unwrap());
        assert!(g.equals(&Tensor::metric(4)).is_err());
        assert!(g.equals(&Tensor::zeros(3, 3)).is_err());
    }

    #[test]
    fn permute_moves_slots() {
        let mut t = Tensor::zeros(3, 3);
        t.set(&[0, 1, 2], Scalar::ONE);
        let p = t.permute(&[2, 0, 1]);
        assert_eq!(p.get(&[2, 0, 1]), &Scalar::ONE);
        assert_eq!(p.nonzero().count(), 1);
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let mut t = Tensor::zeros(3, 2);
        t.set(&[0, 2], "1/2+1*sqrt(3)".parse().unwrap());
        let s = t.to_json_string();
        assert!(s.contains("\"idx\""));
        assert_eq!(Tensor::from_json_str(&s).unwrap(), t);
        let dup = r#"{"dim":3,"rank":2,"entries":[{"idx":[1,1],"val":"1"},{"idx":[1,1],"val":"2"}]}"#;
        assert_eq!(Tensor::from_json_str(dup), Err(TensorError::Duplicate(vec![1, 1])));
        let oob = r#"{"dim":3,"rank":2,"entries":[{"idx":[4,1],"val":"1"}]}"#;
        assert!(matches!(Tensor::from_json_str(oob), Err(TensorError::Index { .. })));
        let bad = r#"{"dim":3,"rank":2,"entries":[{"idx":[1,1],"val":"x"}]}"#;
        assert!(matches!(Tensor::from_json_str(bad), Err(TensorError::Json(_))));
    }

    #[test]
    fn max_abs_uses_exact_order() {
        let mut t = Tensor::zeros(2, 1);
        t.set(&[0], "-2".parse().unwrap());
        t.set(&[1], "0+1*sqrt(3)".parse().unwrap());
        assert_eq!(t.max_abs().unwrap().0, vec![0]);
        assert!(Tensor::zeros(2, 1).max_abs().is_none());
    }
}
