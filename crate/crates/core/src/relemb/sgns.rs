use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{self, neg_log_sigmoid, sigmoid};

/// Input (`w`) and output (`w_out`) weight matrices, row-major `users × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainerState {
    w: Vec<f64>,
    w_out: Vec<f64>,
    dim: usize,
    users: usize,
    step: u64,
}

impl TrainerState {
    /// Input rows uniform in `[-0.5/D, 0.5/D]`, output rows zero.
    pub fn init<R: Rng>(users: usize, dim: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be at least 1".into()));
        }
        let half = 0.5 / dim as f64;
        let w = (0..users * dim).map(|_| rng.gen_range(-half..=half)).collect();
        Ok(Self {
            w,
            w_out: vec![0.0; users * dim],
            dim,
            users,
            step: 0,
        })
    }

    pub fn from_matrices(w: Vec<f64>, w_out: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || w.len() % dim != 0 {
            return Err(Error::InvalidConfig("matrix length is not a multiple of dim".into()));
        }
        if w.len() != w_out.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                got: w_out.len(),
            });
        }
        if !math::all_finite(&w) || !math::all_finite(&w_out) {
            return Err(Error::NonFinite("initial trainer state"));
        }
        Ok(Self {
            users: w.len() / dim,
            w,
            w_out,
            dim,
            step: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.w[user * self.dim..(user + 1) * self.dim]
    }

    pub fn out_row(&self, user: usize) -> &[f64] {
        &self.w_out[user * self.dim..(user + 1) * self.dim]
    }

    pub fn input_matrix(&self) -> &[f64] {
        &self.w
    }

    pub fn output_matrix(&self) -> &[f64] {
        &self.w_out
    }

    pub fn into_input_matrix(self) -> Vec<f64> {
        self.w
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.users {
            return Err(Error::DimensionMismatch {
                expected: self.users,
                got: i + 1,
            });
        }
        Ok(())
    }
}

/// Loss of one pair and the logistic coefficients of its output rows.
///
/// `outputs[0]` is the true target, the rest are negatives. On return
/// `coeffs[j]` holds `∂loss/∂(src·outputs[j])`, i.e. `σ(x)−1` for the target
/// and `σ(x)` for a negative, so that `∂loss/∂src = Σ coeffs[j]·outputs[j]`
/// and `∂loss/∂outputs[j] = coeffs[j]·src`.
pub fn pair_coefficients(src: &[f64], outputs: &[&[f64]], coeffs: &mut [f64]) -> Result<f64> {
    debug_assert_eq!(outputs.len(), coeffs.len());
    let mut loss = 0.0;
    for (j, (out, c)) in outputs.iter().zip(coeffs.iter_mut()).enumerate() {
        let x = math::dot(src, out);
        if !x.is_finite() {
            return Err(Error::NonFinite("pair score"));
        }
        if j == 0 {
            loss += neg_log_sigmoid(x);
            *c = sigmoid(x) - 1.0;
        } else {
            loss += neg_log_sigmoid(-x);
            *c = sigmoid(x);
        }
    }
    Ok(loss)
}

/// Analytic gradient of one pair loss, for inspection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub loss: f64,
    pub source: Vec<f64>,
    /// `(row, gradient)` for the target followed by each negative, in order.
    pub outputs: Vec<(usize, Vec<f64>)>,
}

pub fn pair_gradient(
    state: &TrainerState,
    source: usize,
    target: usize,
    negatives: &[usize],
) -> Result<PairGradient> {
    state.check_index(source)?;
    let rows: Vec<usize> = core::iter::once(target).chain(negatives.iter().copied()).collect();
    for &r in &rows {
        state.check_index(r)?;
    }
    let src = state.row(source);
    let outs: Vec<&[f64]> = rows.iter().map(|&r| state.out_row(r)).collect();
    let mut coeffs = vec![0.0; rows.len()];
    let loss = pair_coefficients(src, &outs, &mut coeffs)?;
    let mut grad_src = vec![0.0; state.dim];
    for (out, &c) in outs.iter().zip(&coeffs) {
        for (g, o) in grad_src.iter_mut().zip(out.iter()) {
            *g += c * o;
        }
    }
    let outputs = rows
        .iter()
        .zip(&coeffs)
        .map(|(&r, &c)| (r, src.iter().map(|s| c * s).collect()))
        .collect();
    Ok(PairGradient {
        loss,
        source: grad_src,
        outputs,
    })
}

/// One SGD step on the pair loss. Returns the loss before the update.
///
/// Only the source row of `w` and the target/negative rows of `w_out` change.
/// Repeated negatives accumulate their gradients.
pub fn sgns_step(
    state: &mut TrainerState,
    source: usize,
    target: usize,
    negatives: &[usize],
    lr: f64,
) -> Result<f64> {
    let mut scratch = Scratch::default();
    step_with(state, source, target, negatives, lr, &mut scratch)
}

#[derive(Debug, Default)]
pub(crate) struct Scratch {
    rows: Vec<usize>,
    coeffs: Vec<f64>,
    grad: Vec<f64>,
}

pub(crate) fn step_with(
    state: &mut TrainerState,
    source: usize,
    target: usize,
    negatives: &[usize],
    lr: f64,
    scratch: &mut Scratch,
) -> Result<f64> {
    if !(lr > 0.0) {
        return Err(Error::InvalidConfig("learning rate must be positive".into()));
    }
    state.check_index(source)?;
    scratch.rows.clear();
    scratch.rows.push(target);
    scratch.rows.extend_from_slice(negatives);
    for &r in &scratch.rows {
        state.check_index(r)?;
    }
    let dim = state.dim;
    scratch.coeffs.clear();
    scratch.coeffs.resize(scratch.rows.len(), 0.0);
    let loss = {
        let src = state.row(source);
        let outs: Vec<&[f64]> = scratch.rows.iter().map(|&r| state.out_row(r)).collect();
        pair_coefficients(src, &outs, &mut scratch.coeffs)?
    };

    scratch.grad.clear();
    scratch.grad.resize(dim, 0.0);
    for (&r, &c) in scratch.rows.iter().zip(&scratch.coeffs) {
        let out = &state.w_out[r * dim..(r + 1) * dim];
        for (g, o) in scratch.grad.iter_mut().zip(out) {
            *g += c * o;
        }
    }
    let (w, w_out) = (&mut state.w, &mut state.w_out);
    let src = &mut w[source * dim..(source + 1) * dim];
    for (&r, &c) in scratch.rows.iter().zip(&scratch.coeffs) {
        let out = &mut w_out[r * dim..(r + 1) * dim];
        for (o, s) in out.iter_mut().zip(src.iter()) {
            *o -= lr * c * s;
        }
        if !math::all_finite(out) {
            return Err(Error::NonFinite("output row update"));
        }
    }
    for (s, g) in src.iter_mut().zip(&scratch.grad) {
        *s -= lr * g;
    }
    if !math::all_finite(src) {
        return Err(Error::NonFinite("input row update"));
    }
    state.step += 1;
    Ok(loss)
}
