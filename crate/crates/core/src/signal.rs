//! Real-valued vertex functions and the maps that move them between graphs.

use crate::error::{Error, Result};
use crate::graph::{GraphMap, LocalIsomorphism, ProductIndexing};

/// A graph signal, stored as one finite value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn impulse(n: usize, v: usize) -> Self {
        let mut s = Self::zeros(n);
        s.values[v] = 1.0;
        s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn expect_len(&self, n: usize) -> Result<()> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                actual: self.values.len(),
            })
        }
    }

    pub fn dot(&self, other: &Signal) -> Result<f64> {
        other.expect_len(self.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Signal {
        Signal {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        other.expect_len(self.len())?;
        Ok(Signal {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        Ok(self
            .sub(other)?
            .values
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs())))
    }
}

/// `(π*x)(v) = x(π(v))`.
pub fn pullback(map: &GraphMap, x: &Signal) -> Result<Signal> {
    x.expect_len(map.target().vertex_count())?;
    Ok(Signal {
        values: map.vertex_map().iter().map(|&w| x.values[w]).collect(),
    })
}

/// `x ∘ φ⁻¹` on the image of `φ`, zero elsewhere.
pub fn pushforward(map: &LocalIsomorphism, x: &Signal) -> Result<Signal> {
    x.expect_len(map.source().vertex_count())?;
    let mut out = vec![0.0; map.target().vertex_count()];
    for (v, &w) in map.image().iter().enumerate() {
        out[w] = x.values[v];
    }
    Ok(Signal { values: out })
}

/// Pullback along a local isomorphism: the adjoint of [`pushforward`].
pub fn restrict(map: &LocalIsomorphism, y: &Signal) -> Result<Signal> {
    pullback(map.map(), y)
}

pub fn pointwise_mul(x: &Signal, y: &Signal) -> Result<Signal> {
    y.expect_len(x.len())?;
    Ok(Signal {
        values: x.values.iter().zip(&y.values).map(|(a, b)| a * b).collect(),
    })
}

pub fn pointwise_sqrt(x: &Signal) -> Result<Signal> {
    if let Some((vertex, &value)) = x.values.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeSqrt { vertex, value });
    }
    Ok(Signal {
        values: x.values.iter().map(|v| v.sqrt()).collect(),
    })
}

/// `(a ⊗ b)(i, j) = a(i) b(j)` laid out by `indexing`.
pub fn tensor_product(indexing: &ProductIndexing, a: &Signal, b: &Signal) -> Result<Signal> {
    a.expect_len(indexing.base_count())?;
    b.expect_len(indexing.fiber_count())?;
    let mut values = vec![0.0; indexing.len()];
    for (i, &ai) in a.values.iter().enumerate() {
        for (j, &bj) in b.values.iter().enumerate() {
            values[indexing.index(i, j)] = ai * bj;
        }
    }
    Ok(Signal { values })
}
