//! Points in the flow's state space and the integer-label conditions that
//! select a target distribution.

use crate::error::{FlowError, Result};
use crate::scalar::Scalar;

/// A point in the flow's state space: a flattened toy image or a 2D point.
///
/// Every state in one experiment shares a single dimension, and all entries
/// must stay finite at API boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVec<T> {
    values: Vec<T>,
}

impl<T: Scalar> StateVec<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![T::zero(); dim],
        }
    }

    pub fn from_f64(values: &[f64]) -> Self {
        Self {
            values: values.iter().map(|&v| T::lit(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Boundary check: error (with the offending index) on NaN/Inf entries.
    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(index) => Err(FlowError::NonFinite { context, index }),
        }
    }

    pub fn ensure_dim(&self, expected: usize, context: &'static str) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(FlowError::DimensionMismatch {
                context,
                expected,
                actual: self.dim(),
            })
        }
    }

    /// `self + scale * other`, in place. Panics on dimension mismatch; the
    /// public operations validate dimensions before doing arithmetic.
    pub fn add_scaled(&mut self, scale: T, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "add_scaled dimension mismatch");
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += scale * *b;
        }
    }

    pub fn scaled(&self, scale: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * scale).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "plus dimension mismatch");
        Self {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "minus dimension mismatch");
        Self {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `(1 - w) * self + w * other`.
    pub fn lerp(&self, other: &Self, w: T) -> Self {
        assert_eq!(self.dim(), other.dim(), "lerp dimension mismatch");
        let one = T::one();
        Self {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| (one - w) * a + w * b)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim(), "dot dimension mismatch");
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.minus(other).norm()
    }
}

impl<T: Scalar> std::ops::Index<usize> for StateVec<T> {
    type Output = T;
    fn index(&self, idx: usize) -> &T {
        &self.values[idx]
    }
}

/// Number of embedding entries a default condition carries.
pub const CONDITION_EMBED_DIM: usize = 8;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Deterministic embedding for an integer condition label.
pub fn condition_embedding<T: Scalar>(id: u32, dim: usize) -> Vec<T> {
    (0..dim)
        .map(|k| T::lit((f64::from(id + 1) * (k as f64 + 1.0) * GOLDEN_ANGLE).sin()))
        .collect()
}

/// An integer condition label with its derived embedding.
///
/// Id 0 is the reserved null condition used for unconditional evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition<T> {
    id: u32,
    embedding: Vec<T>,
}

impl<T: Scalar> Condition<T> {
    pub const NULL_ID: u32 = 0;

    pub fn new(id: u32) -> Self {
        Self::with_dim(id, CONDITION_EMBED_DIM)
    }

    pub fn with_dim(id: u32, dim: usize) -> Self {
        Self {
            id,
            embedding: condition_embedding(id, dim),
        }
    }

    pub fn null() -> Self {
        Self::new(Self::NULL_ID)
    }

    /// Null condition with the same embedding width as `self`.
    pub fn null_like(&self) -> Self {
        Self::with_dim(Self::NULL_ID, self.embedding.len())
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn is_null(&self) -> bool {
        self.id == Self::NULL_ID
    }

    pub fn embedding(&self) -> &[T] {
        &self.embedding
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_check_reports_index() {
        let v = StateVec::new(vec![1.0, f64::NAN, 3.0]);
        match v.ensure_finite("test") {
            Err(FlowError::NonFinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn dim_check() {
        let v = StateVec::<f64>::zeros(3);
        assert!(v.ensure_dim(3, "test").is_ok());
        assert!(v.ensure_dim(2, "test").is_err());
    }

    #[test]
    fn lerp_endpoints() {
        let a = StateVec::new(vec![1.0, 0.0]);
        let b = StateVec::new(vec![0.0, 1.0]);
        assert_eq!(a.lerp(&b, 0.0), a);
        assert_eq!(a.lerp(&b, 1.0), b);
        assert_eq!(a.lerp(&b, 0.5).values(), &[0.5, 0.5]);
    }

    #[test]
    fn condition_embedding_is_pure_and_distinct() {
        let a = Condition::<f64>::new(3);
        let b = Condition::<f64>::new(3);
        assert_eq!(a, b);
        let c = Condition::<f64>::new(4);
        assert_ne!(a.embedding(), c.embedding());
        assert_eq!(a.embedding().len(), CONDITION_EMBED_DIM);
    }

    #[test]
    fn null_condition_is_id_zero() {
        let n = Condition::<f64>::null();
        assert!(n.is_null());
        assert_eq!(n.id(), 0);
    }
}
