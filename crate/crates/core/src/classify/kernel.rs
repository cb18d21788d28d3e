use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::math;

/// `exp(-γ‖x−y‖²)` on dense slices.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig("gamma must be positive".into()));
    }
    Ok(libm::exp(-gamma * math::sq_dist(x, y)))
}

/// RBF kernel over [`FeatureVector`]s using precomputed squared norms,
/// `‖x−y‖² = ‖x‖² + ‖y‖² − 2x·y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfKernel {
    pub gamma: f64,
}

impl RbfKernel {
    #[inline]
    pub fn eval(&self, x: &FeatureVector, x_sq: f64, y: &FeatureVector, y_sq: f64) -> f64 {
        let d = (x_sq + y_sq - 2.0 * x.dot(y)).max(0.0);
        libm::exp(-self.gamma * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        assert_eq!(rbf_kernel(&[0.3, -1.0], &[0.3, -1.0], 2.0).unwrap(), 1.0);
        let k = rbf_kernel(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        assert!((k - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!(rbf_kernel(&[0.0], &[1.0, 0.0], 1.0).is_err());
        assert!(rbf_kernel(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn norm_form_matches_direct_form() {
        let x = FeatureVector::Dense(vec![0.2, -1.5, 3.0]);
        let y = FeatureVector::Dense(vec![1.0, 0.5, 2.0]);
        let k = RbfKernel { gamma: 0.3 };
        let a = k.eval(&x, x.squared_norm(), &y, y.squared_norm());
        let b = rbf_kernel(&x.to_dense(), &y.to_dense(), 0.3).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(k.eval(&x, x.squared_norm(), &x, x.squared_norm()), 1.0);
    }

    proptest! {
        #[test]
        fn symmetric(x in prop::collection::vec(-5.0f64..5.0, 4), y in prop::collection::vec(-5.0f64..5.0, 4), g in 0.01f64..3.0) {
            prop_assert_eq!(rbf_kernel(&x, &y, g).unwrap(), rbf_kernel(&y, &x, g).unwrap());
        }
    }
}
