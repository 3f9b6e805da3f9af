use num_traits::Float;
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingModel, TrainConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Learning rate never drops below `initial_lr * MIN_LR_FRACTION`.
const MIN_LR_FRACTION: f32 = 1e-4;

/// Per-epoch telemetry recorded during training.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    /// Mean negative-sampling loss per (center, context) pair.
    pub epoch_mean_loss: Vec<f64>,
    pub pairs_per_epoch: Vec<u64>,
}

fn softplus<T: Float>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

fn sigmoid<T: Float>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Loss contribution of one target and its derivative with respect to the
/// score `u · v`. Positive targets contribute `-log σ(s)`, negatives
/// `-log σ(-s)`.
pub fn target_term<T: Float>(score: T, positive: bool) -> (T, T) {
    if positive {
        (softplus(-score), sigmoid(score) - T::one())
    } else {
        (softplus(score), sigmoid(score))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairGradients<T> {
    pub loss: T,
    pub center: Vec<T>,
    pub context: Vec<T>,
    pub negatives: Vec<Vec<T>>,
}

/// Loss and gradients of the negative-sampling objective for one
/// (center, context) pair with the given negative samples.
pub fn pair_loss_and_gradients<T: Float>(
    center: &[T],
    context: &[T],
    negatives: &[&[T]],
) -> PairGradients<T> {
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
    let scale = |g: T, v: &[T]| v.iter().map(|&x| g * x).collect::<Vec<T>>();

    let mut grad_center = vec![T::zero(); center.len()];
    let mut accumulate = |g: T, u: &[T]| {
        for (c, &x) in grad_center.iter_mut().zip(u) {
            *c = *c + g * x;
        }
    };

    let (mut loss, g) = target_term(dot(center, context), true);
    accumulate(g, context);
    let grad_context = scale(g, center);

    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for &neg in negatives {
        let (l, g) = target_term(dot(center, neg), false);
        loss = loss + l;
        accumulate(g, neg);
        grad_negatives.push(scale(g, center));
    }

    PairGradients {
        loss,
        center: grad_center,
        context: grad_context,
        negatives: grad_negatives,
    }
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0f32; 8];
    let (ac, ar) = a.split_at(a.len() - a.len() % 8);
    let (bc, br) = b.split_at(ac.len());
    for (x, y) in ac.chunks_exact(8).zip(bc.chunks_exact(8)) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    let mut sum = acc.iter().sum::<f32>();
    for (x, y) in ar.iter().zip(br) {
        sum += x * y;
    }
    sum
}

#[inline]
fn axpy(alpha: f32, x: &[f32], y: &mut [f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn train_skipgram(corpus: &Corpus, config: &TrainConfig) -> Result<EmbeddingModel> {
    train_skipgram_logged(corpus, config).map(|(model, _)| model)
}

/// Train and also return per-epoch loss telemetry.
pub fn train_skipgram_logged(
    corpus: &Corpus,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, TrainLog)> {
    config.validate()?;
    let vocab = &corpus.vocab;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let dim = config.dim;
    let rows = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..rows * dim)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    let mut output = vec![0f32; rows * dim];

    let counts: Vec<f64> = (0..rows as u32).map(|id| vocab.total_count(id) as f64).collect();
    let total_tokens: f64 = counts.iter().sum();
    let noise = WeightedIndex::new(counts.iter().map(|c| c.powf(0.75)))
        .map_err(|e| Error::Invariant(format!("noise distribution: {e}")))?;
    let keep_prob: Vec<f64> = counts
        .iter()
        .map(|&c| {
            let t = config.subsample_threshold;
            if t <= 0.0 {
                1.0
            } else {
                let f = c / total_tokens;
                ((f / t).sqrt() + 1.0) * t / f
            }
        })
        .collect();

    let scheduled = (config.epochs as f64 * total_tokens).max(1.0);
    let mut processed = 0f64;
    let mut log = TrainLog::default();
    let mut kept: Vec<u32> = Vec::new();
    let mut targets: Vec<(usize, bool)> = Vec::with_capacity(config.negatives + 1);
    let mut neu = vec![0f32; dim];
    let mut order: Vec<usize> = (0..corpus.documents.len()).collect();

    for epoch in 0..config.epochs {
        let mut loss_sum = 0f64;
        let mut pairs = 0u64;
        // Documents are visited in a fresh seeded order every epoch.
        order.shuffle(&mut rng);
        for &d in &order {
            let doc = &corpus.documents[d];
            kept.clear();
            for &id in &doc.word_ids {
                let p = keep_prob[id as usize];
                if p >= 1.0 || rng.gen::<f64>() < p {
                    kept.push(id);
                }
            }
            let skipped = doc.word_ids.len() - kept.len();
            for (i, &center) in kept.iter().enumerate() {
                let progress = (processed / scheduled) as f32;
                let lr = config.initial_lr * (1.0 - progress).max(MIN_LR_FRACTION);
                processed += 1.0;

                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(kept.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let ctx = kept[j] as usize;
                    targets.clear();
                    targets.push((ctx, true));
                    for _ in 0..config.negatives {
                        let neg = noise.sample(&mut rng);
                        if neg != ctx {
                            targets.push((neg, false));
                        }
                    }

                    let c = center as usize * dim;
                    let v = &mut input[c..c + dim];
                    neu.iter_mut().for_each(|x| *x = 0.0);
                    for &(t, positive) in &targets {
                        let u = &mut output[t * dim..(t + 1) * dim];
                        let (loss, g) = target_term(dot(v, u), positive);
                        loss_sum += loss as f64;
                        axpy(g, u, &mut neu);
                        axpy(-lr * g, v, u);
                    }
                    axpy(-lr, &neu, v);
                    pairs += 1;
                }
            }
            processed += skipped as f64;
        }
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { epoch });
        }
        log.epoch_mean_loss
            .push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
        log.pairs_per_epoch.push(pairs);
    }

    let model = EmbeddingModel {
        dim,
        rows,
        vocab_hash: {
            let mut h = [0u8; 32];
            hex::decode_to_slice(vocab.hash(), &mut h).expect("sha256 hex");
            h
        },
        input,
        output,
    };
    Ok((model, log))
}
