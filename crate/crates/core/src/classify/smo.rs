//! Binary C-SVC dual solver: SMO with second-order working-pair selection.
//!
//! Solves `min ½αᵀQα − eᵀα` s.t. `yᵀα = 0`, `0 ≤ α ≤ C`, with
//! `Q_ij = y_i y_j K(x_i, x_j)`. The update and clipping rules follow the
//! LIBSVM solver without shrinking.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::kernel::RbfKernel;
use crate::features::FeatureVector;

/// Default byte budget for cached kernel rows.
pub const DEFAULT_CACHE_BYTES: usize = 64 << 20;

const TAU: f64 = 1e-12;

/// Kernel rows computed on demand, kept in an LRU bounded by a byte budget.
///
/// The cache holds `K`, not `Q`, so a single cache serves every one-vs-rest
/// machine over the same rows.
#[derive(Debug)]
pub struct KernelCache<'a> {
    x: &'a [FeatureVector],
    sq: Vec<f64>,
    kernel: RbfKernel,
    rows: Vec<Option<Vec<f64>>>,
    lru: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    pub fn new(x: &'a [FeatureVector], gamma: f64, cache_bytes: usize) -> Self {
        let n = x.len();
        let row_bytes = (n * core::mem::size_of::<f64>()).max(1);
        let capacity = (cache_bytes / row_bytes).clamp(2, n.max(2));
        Self {
            sq: x.iter().map(FeatureVector::squared_norm).collect(),
            x,
            kernel: RbfKernel { gamma },
            rows: vec![None; n],
            lru: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn capacity_rows(&self) -> usize {
        self.capacity
    }

    pub fn eval(&self, i: usize, j: usize) -> f64 {
        self.kernel.eval(&self.x[i], self.sq[i], &self.x[j], self.sq[j])
    }

    fn touch(&mut self, i: usize, pinned: Option<usize>) {
        if self.rows[i].is_some() {
            if let Some(pos) = self.lru.iter().position(|&r| r == i) {
                self.lru.remove(pos);
            }
            self.lru.push_back(i);
            return;
        }
        while self.lru.len() >= self.capacity {
            let pos = self.lru.iter().position(|&r| Some(r) != pinned).expect("capacity >= 2");
            let victim = self.lru.remove(pos).unwrap();
            self.rows[victim] = None;
        }
        let row = (0..self.x.len()).map(|j| self.eval(i, j)).collect();
        self.rows[i] = Some(row);
        self.lru.push_back(i);
    }

    pub fn row(&mut self, i: usize) -> &[f64] {
        self.touch(i, None);
        self.rows[i].as_deref().unwrap()
    }

    pub fn pair(&mut self, i: usize, j: usize) -> (&[f64], &[f64]) {
        self.touch(i, None);
        self.touch(j, Some(i));
        (self.rows[i].as_deref().unwrap(), self.rows[j].as_deref().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    pub c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function is `Σ α_i y_i K(x_i, x) − rho`.
    pub rho: f64,
    pub iterations: usize,
    /// Maximal violating-pair gap `m(α) − M(α)` at exit.
    pub kkt_gap: f64,
    pub converged: bool,
}

struct Working<'s> {
    y: &'s [f64],
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl Working<'_> {
    fn upper(&self, t: usize) -> bool {
        self.alpha[t] >= self.c
    }

    fn lower(&self, t: usize) -> bool {
        self.alpha[t] <= 0.0
    }

    /// `(Gmax, index)` over the "up" set.
    fn select_i(&self) -> (f64, Option<usize>) {
        let mut gmax = f64::NEG_INFINITY;
        let mut idx = None;
        for t in 0..self.alpha.len() {
            let v = if self.y[t] > 0.0 {
                (!self.upper(t)).then(|| -self.grad[t])
            } else {
                (!self.lower(t)).then_some(self.grad[t])
            };
            if let Some(v) = v {
                if v >= gmax {
                    gmax = v;
                    idx = Some(t);
                }
            }
        }
        (gmax, idx)
    }

    /// Second-order choice of `j` given `i`, plus `Gmax2` over the "low" set.
    fn select_j(&self, gmax: f64, i: usize, k_i: &[f64], k_diag: impl Fn(usize) -> f64) -> (f64, Option<usize>) {
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best = None;
        let mut obj_min = f64::INFINITY;
        let kii = k_diag(i);
        for j in 0..self.alpha.len() {
            let grad_diff = if self.y[j] > 0.0 {
                if self.lower(j) {
                    continue;
                }
                gmax2 = gmax2.max(self.grad[j]);
                gmax + self.grad[j]
            } else {
                if self.upper(j) {
                    continue;
                }
                gmax2 = gmax2.max(-self.grad[j]);
                gmax - self.grad[j]
            };
            if grad_diff > 0.0 {
                let quad = kii + k_diag(j) - 2.0 * k_i[j];
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    best = Some(j);
                }
            }
        }
        (gmax2, best)
    }

    fn gap(&self) -> f64 {
        let (gmax, _) = self.select_i();
        let mut gmax2 = f64::NEG_INFINITY;
        for j in 0..self.alpha.len() {
            if self.y[j] > 0.0 {
                if !self.lower(j) {
                    gmax2 = gmax2.max(self.grad[j]);
                }
            } else if !self.upper(j) {
                gmax2 = gmax2.max(-self.grad[j]);
            }
        }
        (gmax + gmax2).max(0.0)
    }

    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut n_free, mut sum_free) = (0usize, 0.0);
        for i in 0..self.alpha.len() {
            let yg = self.y[i] * self.grad[i];
            let pos = self.y[i] > 0.0;
            if self.upper(i) {
                if pos {
                    lb = lb.max(yg);
                } else {
                    ub = ub.min(yg);
                }
            } else if self.lower(i) {
                if pos {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

/// Runs SMO on labels `y ∈ {−1, +1}` over the rows behind `cache`.
pub fn solve(cache: &mut KernelCache<'_>, y: &[f64], cfg: &SmoConfig) -> SmoSolution {
    let n = y.len();
    debug_assert_eq!(n, cache.len());
    let diag: Vec<f64> = (0..n).map(|i| cache.eval(i, i)).collect();
    let mut w = Working {
        y,
        c: cfg.c,
        alpha: vec![0.0; n],
        grad: vec![-1.0; n],
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let (gmax, i) = w.select_i();
        let Some(i) = i else {
            converged = true;
            break;
        };
        let (gmax2, j) = {
            let k_i = cache.row(i);
            w.select_j(gmax, i, k_i, |t| diag[t])
        };
        let Some(j) = j.filter(|_| gmax + gmax2 >= cfg.tol) else {
            converged = true;
            break;
        };
        iterations += 1;

        let (k_i, k_j) = cache.pair(i, j);
        let (yi, yj) = (y[i], y[j]);
        let q_ij = yi * yj * k_i[j];
        let c = cfg.c;
        let (old_ai, old_aj) = (w.alpha[i], w.alpha[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);
        if yi != yj {
            let quad = diag[i] + diag[j] + 2.0 * q_ij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-w.grad[i] - w.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = diag[i] + diag[j] - 2.0 * q_ij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (w.grad[i] - w.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        w.alpha[i] = ai;
        w.alpha[j] = aj;
        let (dai, daj) = (ai - old_ai, aj - old_aj);
        for k in 0..n {
            w.grad[k] += y[k] * (yi * k_i[k] * dai + yj * k_j[k] * daj);
        }
    }
    let kkt_gap = w.gap();
    let rho = w.rho();
    SmoSolution {
        converged: converged || kkt_gap < cfg.tol,
        alpha: w.alpha,
        rho,
        iterations,
        kkt_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<FeatureVector> {
        v.iter().map(|&(a, b)| FeatureVector::Dense(vec![a, b])).collect()
    }

    #[test]
    fn two_point_problem_is_symmetric() {
        let x = pts(&[(-1.0, 0.0), (1.0, 0.0)]);
        let mut cache = KernelCache::new(&x, 1.0, DEFAULT_CACHE_BYTES);
        let sol = solve(&mut cache, &[1.0, -1.0], &SmoConfig { c: 10.0, tol: 1e-3, max_iter: 1000 });
        assert!(sol.converged);
        assert_eq!(sol.alpha[0], sol.alpha[1]);
        assert_eq!(sol.rho, 0.0);
        // hard-margin optimum: α = 2 / (K11 + K22 − 2K12)
        let k12 = libm::exp(-4.0);
        assert!((sol.alpha[0] - 2.0 / (2.0 - 2.0 * k12)).abs() < 1e-9);
    }

    #[test]
    fn tiny_cache_gives_same_solution() {
        let x = pts(&[(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (0.5, 0.2), (0.2, 0.9)]);
        let y = [1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        let cfg = SmoConfig { c: 5.0, tol: 1e-6, max_iter: 10_000 };
        let mut big = KernelCache::new(&x, 1.5, DEFAULT_CACHE_BYTES);
        let mut small = KernelCache::new(&x, 1.5, 0);
        assert_eq!(small.capacity_rows(), 2);
        let a = solve(&mut big, &y, &cfg);
        let b = solve(&mut small, &y, &cfg);
        assert_eq!(a, b);
        assert!(a.alpha.iter().all(|&v| (0.0..=5.0).contains(&v)));
        let balance: f64 = a.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() < 1e-12);
    }
}
