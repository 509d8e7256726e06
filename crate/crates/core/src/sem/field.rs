use crate::error::{Error, Result};
use crate::sem::geometry::ElementGeometry;

/// Nodal values of a scalar on every element.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite field value at node {i}")));
        }
        Ok(ScalarField { values })
    }

    pub fn zeros(geo: &ElementGeometry) -> Self {
        ScalarField { values: vec![0.0; geo.num_nodes()] }
    }

    pub fn from_fn(geo: &ElementGeometry, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..geo.num_nodes()).map(f).collect())
    }
}

/// Vector expressed by its two moving-frame components.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVectorField {
    pub v1: ScalarField,
    pub v2: ScalarField,
}

impl FrameVectorField {
    pub fn zeros(geo: &ElementGeometry) -> Self {
        FrameVectorField { v1: ScalarField::zeros(geo), v2: ScalarField::zeros(geo) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(ScalarField::new(vec![1.0, f64::NAN]).is_err());
        assert!(ScalarField::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(ScalarField::new(vec![1.0, 2.0]).is_ok());
    }
}
