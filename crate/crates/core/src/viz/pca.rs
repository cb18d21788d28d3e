use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

const TOLERANCE: f64 = 1e-10;
const MAX_ITER: usize = 10_000;

/// Principal components from the sample covariance (n − 1 denominator),
/// extracted with deflated power iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows of length D. The largest-magnitude entry of each
    /// row is positive.
    pub components: Vec<Vec<f64>>,
    /// Descending, non-negative.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R], k: usize) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::EmptyInput("PCA needs at least two rows"));
        }
        let d = rows[0].as_ref().len();
        if k == 0 || d < k {
            return Err(Error::InvalidConfig("PCA needs 1 <= k <= D".into()));
        }
        for r in rows {
            if r.as_ref().len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: r.as_ref().len(),
                });
            }
        }

        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r.as_ref()) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let mut cov = vec![0.0; d * d];
        for r in rows {
            let c: Vec<f64> = r.as_ref().iter().zip(&mean).map(|(x, m)| x - m).collect();
            for i in 0..d {
                for j in i..d {
                    cov[i * d + j] += c[i] * c[j];
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                let v = cov[i * d + j] / (n - 1) as f64;
                cov[i * d + j] = v;
                cov[j * d + i] = v;
            }
        }
        if !math::all_finite(&cov) {
            return Err(Error::NonFinite("covariance"));
        }
        let scale = (0..d).map(|i| cov[i * d + i]).sum::<f64>().max(f64::MIN_POSITIVE);

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut components: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut variance = Vec::with_capacity(k);
        for _ in 0..k {
            let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            orthonormalize(&mut v, &components);
            for _ in 0..MAX_ITER {
                let mut w = mat_vec(&cov, &v, d);
                orthonormalize_raw(&mut w, &components);
                let len = math::norm(&w);
                if len <= 1e-14 * scale {
                    // remaining spectrum is numerically zero; any orthogonal
                    // direction is an eigenvector
                    break;
                }
                w.iter_mut().for_each(|x| *x /= len);
                let delta = libm::sqrt(math::sq_dist(&w, &v));
                v = w;
                if delta < TOLERANCE {
                    break;
                }
            }
            let lambda = math::dot(&v, &mat_vec(&cov, &v, d)).max(0.0);
            // deflate
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] -= lambda * v[i] * v[j];
                }
            }
            fix_sign(&mut v);
            components.push(v);
            variance.push(lambda);
        }
        // power iteration can leave near-equal eigenvalues out of order
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| variance[b].partial_cmp(&variance[a]).unwrap());
        Ok(Self {
            mean,
            components: order.iter().map(|&i| components[i].clone()).collect(),
            explained_variance: order.iter().map(|&i| variance[i]).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let c: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        Ok(self.components.iter().map(|p| math::dot(p, &c)).collect())
    }

    pub fn inverse_transform(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.mean.clone();
        for (p, &s) in self.components.iter().zip(y) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += s * pi;
            }
        }
        x
    }
}

fn mat_vec(m: &[f64], v: &[f64], d: usize) -> Vec<f64> {
    (0..d).map(|i| math::dot(&m[i * d..(i + 1) * d], v)).collect()
}

fn orthonormalize_raw(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let p = math::dot(v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= p * y;
        }
    }
}

fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) {
    orthonormalize_raw(v, basis);
    let len = math::norm(v);
    v.iter_mut().for_each(|x| *x /= len);
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn line_recovers_direction() {
        let rows: Vec<Vec<f64>> = (-2..=2).map(|t| vec![t as f64, 2.0 * t as f64]).collect();
        let m = PcaModel::fit(&rows, 2).unwrap();
        let s5 = libm::sqrt(5.0);
        assert!((m.components[0][0] - 1.0 / s5).abs() < 1e-10);
        assert!((m.components[0][1] - 2.0 / s5).abs() < 1e-10);
        // var(t) = 2.5 with n−1, times |(1,2)|² = 5
        assert!((m.explained_variance[0] - 12.5).abs() < 1e-9);
        assert!(m.explained_variance[1] < 1e-10);
        assert!(math::dot(&m.components[0], &m.components[1]).abs() < 1e-8);
        for r in &rows {
            let back = m.inverse_transform(&m.transform(r).unwrap());
            assert!(math::sq_dist(&back, r) < 1e-16);
        }
    }

    #[test]
    fn isotropic_cross_has_equal_variances() {
        let rows = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let m = PcaModel::fit(&rows, 2).unwrap();
        assert!((m.explained_variance[0] - m.explained_variance[1]).abs() < 1e-10);
        assert!((m.explained_variance[0] - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_input_rejected() {
        assert!(PcaModel::fit(&[[1.0, 2.0]], 2).is_err());
        assert!(PcaModel::fit(&[[1.0], [2.0]], 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn orthonormal_and_ordered(rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 5), 3..30)) {
            let m = PcaModel::fit(&rows, 3).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((math::dot(&m.components[i], &m.components[j]) - want).abs() < 1e-8);
                }
            }
            prop_assert!(m.explained_variance[0] >= m.explained_variance[1]);
            prop_assert!(m.explained_variance[1] >= m.explained_variance[2]);
            prop_assert!(m.explained_variance[2] >= 0.0);
        }
    }
}
