//! Lock-free multi-threaded embedding training.
//!
//! Threads share the weight matrices and update them without locks
//! ("hogwild"). Each weight is an `f64` stored in an `AtomicU64`, so reads
//! and writes are never torn, but concurrent updates to the same row may
//! overwrite each other. Results therefore depend on thread scheduling;
//! use `threads = 1` for reproducible output.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relstance_core::data::InteractionSet;
use relstance_core::relemb::{
    pair_coefficients, train_with_progress, EpochStats, TrainerState, TrainingPlan,
};
use relstance_core::{Error, RelationalEmbedding, Result, TrainConfig};

struct Shared {
    w: Vec<AtomicU64>,
    w_out: Vec<AtomicU64>,
    dim: usize,
}

impl Shared {
    fn load(cells: &[AtomicU64], row: usize, dim: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&cells[row * dim..(row + 1) * dim]) {
            *o = f64::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn add(cells: &[AtomicU64], row: usize, dim: usize, scale: f64, v: &[f64]) -> Result<()> {
        for (c, x) in cells[row * dim..(row + 1) * dim].iter().zip(v) {
            let next = f64::from_bits(c.load(Ordering::Relaxed)) + scale * x;
            if !next.is_finite() {
                return Err(Error::NonFinite("parallel update"));
            }
            c.store(next.to_bits(), Ordering::Relaxed);
        }
        Ok(())
    }
}

fn to_cells(v: &[f64]) -> Vec<AtomicU64> {
    v.iter().map(|x| AtomicU64::new(x.to_bits())).collect()
}

#[derive(Default)]
struct ChunkStats {
    loss: f64,
    trained: usize,
    dropped: usize,
}

fn run_chunk(
    plan: &TrainingPlan,
    shared: &Shared,
    order: &[usize],
    first_step: u64,
    mut rng: ChaCha8Rng,
) -> Result<ChunkStats> {
    let dim = shared.dim;
    let mut stats = ChunkStats::default();
    let mut negatives = Vec::with_capacity(plan.config.negatives_k);
    let mut rows = Vec::new();
    let mut src = vec![0.0; dim];
    let mut outs: Vec<Vec<f64>> = Vec::new();
    let mut coeffs = Vec::new();
    let mut grad = vec![0.0; dim];
    for (k, &idx) in order.iter().enumerate() {
        let lr = plan.lr_at(first_step + k as u64);
        let keep = plan.keep[idx];
        if keep < 1.0 && rng.gen::<f64>() >= keep {
            stats.dropped += 1;
            continue;
        }
        let (s, t) = plan.pairs[idx];
        plan.draw_negatives(t, &mut rng, &mut negatives);
        rows.clear();
        rows.push(t);
        rows.extend_from_slice(&negatives);

        Shared::load(&shared.w, s, dim, &mut src);
        outs.resize_with(rows.len(), || vec![0.0; dim]);
        for (o, &r) in outs.iter_mut().zip(&rows) {
            Shared::load(&shared.w_out, r, dim, o);
        }
        coeffs.clear();
        coeffs.resize(rows.len(), 0.0);
        let views: Vec<&[f64]> = outs[..rows.len()].iter().map(Vec::as_slice).collect();
        stats.loss += pair_coefficients(&src, &views, &mut coeffs)?;

        grad.iter_mut().for_each(|g| *g = 0.0);
        for (o, &c) in views.iter().zip(&coeffs) {
            for (g, x) in grad.iter_mut().zip(o.iter()) {
                *g += c * x;
            }
        }
        for (&r, &c) in rows.iter().zip(&coeffs) {
            Shared::add(&shared.w_out, r, dim, -lr * c, &src)?;
        }
        Shared::add(&shared.w, s, dim, -lr, &grad)?;
        stats.trained += 1;
    }
    Ok(stats)
}

/// Trains with `config.threads` workers. One thread falls back to the
/// sequential, bit-reproducible trainer.
pub fn train_parallel<F: FnMut(&EpochStats)>(
    corpus: &InteractionSet,
    config: &TrainConfig,
    mut progress: F,
) -> Result<RelationalEmbedding> {
    if config.threads <= 1 {
        return train_with_progress(corpus, config, progress);
    }
    let plan = TrainingPlan::new(corpus, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = TrainerState::init(plan.vocab.len(), config.dim, &mut rng)?;
    let shared = Shared {
        w: to_cells(init.input_matrix()),
        w_out: to_cells(init.output_matrix()),
        dim: config.dim,
    };
    let n = plan.pairs.len();
    let threads = config.threads.min(n.max(1));
    let chunk = n.div_ceil(threads);
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let base = (epoch * n) as u64;
        let results: Vec<Result<ChunkStats>> = std::thread::scope(|scope| {
            let handles: Vec<_> = order
                .chunks(chunk)
                .enumerate()
                .map(|(t, part)| {
                    let mut worker_rng = ChaCha8Rng::seed_from_u64(config.seed);
                    worker_rng.set_stream((epoch * threads + t + 1) as u64);
                    let (plan, shared) = (&plan, &shared);
                    let first = base + (t * chunk) as u64;
                    scope.spawn(move || run_chunk(plan, shared, part, first, worker_rng))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training thread panicked"))
                .collect()
        });
        let mut total = ChunkStats::default();
        for r in results {
            let r = r?;
            total.loss += r.loss;
            total.trained += r.trained;
            total.dropped += r.dropped;
        }
        progress(&EpochStats {
            epoch: epoch + 1,
            mean_loss: if total.trained == 0 {
                f64::NAN
            } else {
                total.loss / total.trained as f64
            },
            lr: plan.lr_at(base + n as u64),
            trained: total.trained,
            dropped: total.dropped,
        });
    }

    let values = shared
        .w
        .iter()
        .map(|c| f64::from_bits(c.load(Ordering::Relaxed)))
        .collect();
    RelationalEmbedding::new(plan.vocab.users().to_vec(), values, config.dim)
}
