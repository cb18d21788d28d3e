//! One-vs-rest RBF support vector classifier.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::kernel::RbfKernel;
use super::prediction::{Prediction, PredictionSource};
use super::smo::{self, KernelCache, SmoConfig, DEFAULT_CACHE_BYTES};
use crate::data::Stance;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub tol: f64,
    pub cache_bytes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: 1.0,
            tol: 1e-3,
            cache_bytes: DEFAULT_CACHE_BYTES,
        }
    }
}

impl SvmParams {
    pub fn new(c: f64, gamma: f64) -> Self {
        Self {
            c,
            gamma,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig("C must be positive".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One class against the rest. `coef[k]` is `α·y` of support vector
/// `support[k]` (an index into the model's vector pool).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMachine {
    pub class: Stance,
    pub support: Vec<usize>,
    pub coef: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub kkt_gap: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub version: u32,
    pub params: SvmParams,
    /// Classes seen in training, in canonical order.
    pub classes: Vec<Stance>,
    pub dim: usize,
    /// Union of all machines' support vectors.
    pub vectors: Vec<FeatureVector>,
    /// Training-row index of each pooled vector.
    pub vector_rows: Vec<usize>,
    pub machines: Vec<BinaryMachine>,
}

impl SvmModel {
    /// Trains one machine per class (a single machine for two classes, the
    /// second class scoring its negation).
    pub fn fit(x: &[FeatureVector], y: &[Stance], params: SvmParams) -> Result<Self> {
        params.validate()?;
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.len(),
            });
        }
        let mut classes: Vec<Stance> = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::SingleClass(classes.len()));
        }
        let dim = x[0].dim();
        for v in x {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("feature vector"));
            }
        }

        let n = x.len();
        let max_iter = (10 * n * classes.len()).max(100 * n).max(100_000);
        let cfg = SmoConfig {
            c: params.c,
            tol: params.tol,
            max_iter,
        };
        let mut cache = KernelCache::new(x, params.gamma, params.cache_bytes);
        let trained: &[Stance] = if classes.len() == 2 { &classes[..1] } else { &classes };

        let mut pool: BTreeMap<usize, usize> = BTreeMap::new();
        let mut raw = Vec::with_capacity(trained.len());
        for &class in trained {
            let labels: Vec<f64> = y.iter().map(|&s| if s == class { 1.0 } else { -1.0 }).collect();
            let sol = smo::solve(&mut cache, &labels, &cfg);
            let sv: Vec<(usize, f64)> = sol
                .alpha
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0.0)
                .map(|(i, &a)| (i, a * labels[i]))
                .collect();
            for &(i, _) in &sv {
                pool.entry(i).or_insert(0);
            }
            raw.push((class, sv, sol));
        }
        for (slot, v) in pool.values_mut().enumerate() {
            *v = slot;
        }
        let vector_rows: Vec<usize> = pool.keys().copied().collect();
        let vectors = vector_rows.iter().map(|&i| x[i].clone()).collect();
        let machines = raw
            .into_iter()
            .map(|(class, sv, sol)| BinaryMachine {
                class,
                support: sv.iter().map(|(i, _)| pool[i]).collect(),
                coef: sv.iter().map(|(_, c)| *c).collect(),
                rho: sol.rho,
                iterations: sol.iterations,
                kkt_gap: sol.kkt_gap,
                converged: sol.converged,
            })
            .collect();
        Ok(Self {
            version: crate::MODEL_FORMAT_VERSION,
            params,
            classes,
            dim,
            vectors,
            vector_rows,
            machines,
        })
    }

    /// Decision values per class.
    pub fn decision(&self, x: &FeatureVector) -> Result<[Option<f64>; 3]> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let kernel = RbfKernel {
            gamma: self.params.gamma,
        };
        let x_sq = x.squared_norm();
        let k: Vec<f64> = self
            .vectors
            .iter()
            .map(|v| kernel.eval(v, v.squared_norm(), x, x_sq))
            .collect();
        let mut scores = [None; 3];
        for m in &self.machines {
            let f: f64 = m.support.iter().zip(&m.coef).map(|(&s, &c)| c * k[s]).sum::<f64>() - m.rho;
            scores[m.class.index()] = Some(f);
        }
        if self.classes.len() == 2 {
            let first = scores[self.classes[0].index()].unwrap();
            scores[self.classes[1].index()] = Some(-first);
        }
        Ok(scores)
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction> {
        self.predict_as(x, PredictionSource::Textual)
    }

    pub fn predict_as(&self, x: &FeatureVector, source: PredictionSource) -> Result<Prediction> {
        let scores = self.decision(x)?;
        Ok(Prediction::from_scores(scores, source).expect("model has at least two classes"))
    }

    pub fn predict_batch(&self, xs: &[FeatureVector], source: PredictionSource) -> Result<Vec<Prediction>> {
        xs.iter().map(|x| self.predict_as(x, source)).collect()
    }

    /// Dual variable of training row `row` in `machine`, zero if not a support vector.
    pub fn alpha(&self, machine: usize, row: usize) -> f64 {
        let m = &self.machines[machine];
        match self.vector_rows.binary_search(&row) {
            Ok(slot) => m
                .support
                .iter()
                .position(|&s| s == slot)
                .map_or(0.0, |k| m.coef[k].abs()),
            Err(_) => 0.0,
        }
    }

    pub fn support_vector_count(&self) -> usize {
        self.vectors.len()
    }

    /// Fraction of rows whose predicted label matches `y`.
    pub fn accuracy(&self, x: &[FeatureVector], y: &[Stance]) -> Result<f64> {
        let mut hit = 0usize;
        for (v, &label) in x.iter().zip(y) {
            if self.predict(v)?.label == label {
                hit += 1;
            }
        }
        Ok(hit as f64 / x.len().max(1) as f64)
    }

    pub fn max_kkt_gap(&self) -> f64 {
        self.machines.iter().map(|m| m.kkt_gap).fold(0.0, f64::max)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(v: &[(f64, f64)]) -> Vec<FeatureVector> {
        v.iter().map(|&(a, b)| FeatureVector::Dense(vec![a, b])).collect()
    }

    fn blobs(seed: u64) -> (Vec<FeatureVector>, Vec<Stance>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (center, label) in [(2.0, Stance::Favor), (-2.0, Stance::Against)] {
            for _ in 0..20 {
                let r = rng.gen_range(0.0..0.5);
                let t = rng.gen_range(0.0..core::f64::consts::TAU);
                x.push(FeatureVector::Dense(vec![
                    center + r * libm::cos(t),
                    center + r * libm::sin(t),
                ]));
                y.push(label);
            }
        }
        (x, y)
    }

    #[test]
    fn separable_blobs_fit_perfectly() {
        let (x, y) = blobs(5);
        let m = SvmModel::fit(&x, &y, SvmParams::new(1.0, 0.5)).unwrap();
        assert_eq!(m.accuracy(&x, &y).unwrap(), 1.0);
        assert!(m.max_kkt_gap() < 1e-3);
        for (k, row) in m.vector_rows.iter().enumerate() {
            let p = m.predict(&m.vectors[k]).unwrap();
            assert_eq!(p.label, y[*row]);
        }
    }

    #[test]
    fn xor_is_learned() {
        let x = dense(&[(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)]);
        let y = [Stance::Favor, Stance::Favor, Stance::Against, Stance::Against];
        let m = SvmModel::fit(&x, &y, SvmParams::new(10.0, 1.0)).unwrap();
        assert_eq!(m.accuracy(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn three_classes_and_bounds() {
        let x = dense(&[(0.0, 0.0), (0.1, 0.0), (5.0, 5.0), (5.1, 5.0), (-5.0, 5.0), (-5.0, 5.1)]);
        let y = [Stance::None, Stance::None, Stance::Favor, Stance::Favor, Stance::Against, Stance::Against];
        let m = SvmModel::fit(&x, &y, SvmParams::new(2.0, 0.5)).unwrap();
        assert_eq!(m.machines.len(), 3);
        assert_eq!(m.classes, [Stance::Against, Stance::Favor, Stance::None]);
        assert_eq!(m.accuracy(&x, &y).unwrap(), 1.0);
        for (mi, _) in m.machines.iter().enumerate() {
            for row in 0..x.len() {
                let a = m.alpha(mi, row);
                assert!((0.0..=2.0).contains(&a));
            }
        }
    }

    #[test]
    fn symmetric_tie_goes_to_first_class() {
        let x = dense(&[(-1.0, 0.0), (1.0, 0.0)]);
        let y = [Stance::Against, Stance::Favor];
        let m = SvmModel::fit(&x, &y, SvmParams::new(10.0, 1.0)).unwrap();
        let p = m.predict(&FeatureVector::Dense(vec![0.0, 0.0])).unwrap();
        assert_eq!(p.scores[0], p.scores[1]);
        assert_eq!(p.label, Stance::Against);
    }

    #[test]
    fn duplicated_rows_keep_predictions() {
        let (x, y) = blobs(8);
        let m1 = SvmModel::fit(&x, &y, SvmParams::new(1.0, 0.5)).unwrap();
        let x2: Vec<_> = x.iter().chain(x.iter()).cloned().collect();
        let y2: Vec<_> = y.iter().chain(y.iter()).copied().collect();
        let m2 = SvmModel::fit(&x2, &y2, SvmParams::new(1.0, 0.5)).unwrap();
        for v in &x {
            assert_eq!(m1.predict(v).unwrap().label, m2.predict(v).unwrap().label);
        }
    }

    #[test]
    fn class_order_of_input_is_irrelevant() {
        let (x, y) = blobs(9);
        let m1 = SvmModel::fit(&x, &y, SvmParams::new(1.0, 0.5)).unwrap();
        let relabeled: Vec<Stance> = y
            .iter()
            .map(|s| if *s == Stance::Favor { Stance::None } else { *s })
            .collect();
        let m2 = SvmModel::fit(&x, &relabeled, SvmParams::new(1.0, 0.5)).unwrap();
        assert_eq!(m1.classes[0], Stance::Against);
        assert_eq!(m2.classes[0], Stance::Against);
        let probe = FeatureVector::Dense(vec![0.3, -0.1]);
        let l1 = m1.predict(&probe).unwrap().label;
        let l2 = m2.predict(&probe).unwrap().label;
        assert_eq!(l1 == Stance::Against, l2 == Stance::Against);
    }

    #[test]
    fn error_paths() {
        let x = dense(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(matches!(
            SvmModel::fit(&x, &[Stance::Favor, Stance::Favor], SvmParams::default()),
            Err(Error::SingleClass(1))
        ));
        let bad = vec![FeatureVector::Dense(vec![0.0, f64::NAN]), FeatureVector::Dense(vec![1.0, 1.0])];
        assert!(SvmModel::fit(&bad, &[Stance::Favor, Stance::Against], SvmParams::default()).is_err());
        let m = SvmModel::fit(&x, &[Stance::Favor, Stance::Against], SvmParams::default()).unwrap();
        assert!(m.predict(&FeatureVector::Dense(vec![0.0])).is_err());
    }
}
