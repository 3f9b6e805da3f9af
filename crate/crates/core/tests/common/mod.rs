//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

pub mod checks;

use hyperstop::corpus::{Class, Corpus, RawDocument};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Negative-sampling loss written directly from its definition.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let log_sigmoid = |x: f64| -> f64 { -(1.0 + (-x).exp()).ln() };
    let mut loss = -log_sigmoid(dot(center, context));
    for n in negatives {
        loss -= log_sigmoid(-dot(center, n));
    }
    loss
}

/// Central difference of `f` along every coordinate of `x`.
pub fn numeric_gradient(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += h;
            minus[i] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    (0..k)
        .map(|_| {
            // Box-Muller
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            scale * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order with matching unit
/// eigenvectors.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|r| v[r][i]).collect())
        .collect();
    (values, vectors)
}

/// Document-occurrence table for `word` counted straight from raw token
/// lists: (class-A with, class-A without, class-B with, class-B without).
pub fn brute_table(docs: &[(Class, Vec<String>)], word: &str) -> [u64; 4] {
    let mut t = [0u64; 4];
    for (class, tokens) in docs {
        let has = tokens.iter().any(|t| t == word);
        let idx = match (class, has) {
            (Class::A, true) => 0,
            (Class::A, false) => 1,
            (Class::B, true) => 2,
            (Class::B, false) => 3,
        };
        t[idx] += 1;
    }
    t
}

/// Pearson χ² as the sum of (observed - expected)² / expected over the four
/// cells; zero when any row or column total vanishes.
pub fn chi2_oracle(t: [u64; 4]) -> f64 {
    let obs = [[t[0] as f64, t[2] as f64], [t[1] as f64, t[3] as f64]];
    let n: f64 = obs.iter().flatten().sum();
    let rows = [obs[0][0] + obs[0][1], obs[1][0] + obs[1][1]];
    let cols = [obs[0][0] + obs[1][0], obs[0][1] + obs[1][1]];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return 0.0;
    }
    let mut chi2 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let e = rows[r] * cols[c] / n;
            chi2 += (obs[r][c] - e).powi(2) / e;
        }
    }
    chi2
}

fn entropy(counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / n;
            -p * p.log2()
        })
        .sum()
}

/// Mutual information in bits as H(U) + H(C) - H(U, C).
pub fn mi_oracle(t: [u64; 4]) -> f64 {
    let f = t.map(|x| x as f64);
    let h_u = entropy(&[f[0] + f[2], f[1] + f[3]]);
    let h_c = entropy(&[f[0] + f[1], f[2] + f[3]]);
    let h_uc = entropy(&f);
    h_u + h_c - h_uc
}

/// Tokens of each corpus document, tagged with its class.
pub fn class_tokens(corpus: &Corpus) -> Vec<(Class, Vec<String>)> {
    corpus
        .documents
        .iter()
        .map(|d| (d.class, d.tokens.clone()))
        .collect()
}

/// Random documents over a small alphabet of words, two labels.
pub fn random_documents(rng: &mut ChaCha8Rng, n_docs: usize, n_words: usize) -> Vec<RawDocument> {
    (0..n_docs)
        .map(|i| {
            let len = rng.gen_range(0..12);
            let text: Vec<String> = (0..len)
                .map(|_| format!("t{}", rng.gen_range(0..n_words)))
                .collect();
            let label = if i % 2 == 0 { "neg" } else { "pos" };
            RawDocument::new(format!("d{i}"), text.join(" "), label)
        })
        .collect()
}
