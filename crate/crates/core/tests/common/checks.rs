//! Panicking checks shared by the focused test files and the acceptance run.

use hyperstop::classify::{stratified_folds, Classifier, FeatureMatrix, NaiveBayes, Predictor};
use hyperstop::corpus::{build_corpus, tokenize, Class, RawDocument, Vocabulary};
use hyperstop::embedding::pair_loss_and_gradients;
use hyperstop::geometry::{analyze, build_hyperplane, rank_by_distance, Hyperplane, VectorTable, WordVectors};
use hyperstop::ranking::RankedWordList;
use hyperstop::selectors::{chi2_score, mi_score, ContingencyTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{brute_table, chi2_oracle, gaussian_vec, mi_oracle, numeric_gradient, rel_err, sgns_loss};

/// A random two-class vocabulary with one vector per word.
pub struct Instance {
    pub vocab: Vocabulary,
    pub table: VectorTable,
    pub rows: Vec<Vec<f64>>,
}

pub fn instance(seed: u64, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..40);
    let mut a_words = Vec::new();
    let mut b_words = Vec::new();
    for i in 0..n {
        let w = format!("w{i:03}");
        match rng.gen_range(0..3) {
            0 => a_words.push(w),
            1 => b_words.push(w),
            _ => {
                a_words.push(w.clone());
                b_words.push(w);
            }
        }
    }
    if a_words.is_empty() {
        a_words.push("w000".into());
    }
    if b_words.is_empty() {
        b_words.push(format!("w{:03}", n - 1));
    }
    let corpus = build_corpus(
        &[
            RawDocument::new("a", a_words.join(" "), "x"),
            RawDocument::new("b", b_words.join(" "), "y"),
        ],
        1,
    )
    .unwrap();
    let shift = rng.gen_range(-3.0..3.0);
    let rows: Vec<Vec<f64>> = (0..corpus.vocab.len())
        .map(|_| gaussian_vec(&mut rng, k, 1.0).into_iter().map(|x| x + shift).collect())
        .collect();
    Instance {
        table: VectorTable::from_rows(&rows).unwrap(),
        vocab: corpus.vocab,
        rows,
    }
}

pub fn distances(table: &VectorTable, plane: &Hyperplane) -> Vec<f64> {
    (0..table.len() as u32)
        .map(|id| plane.distance(table.vector(id)).unwrap())
        .collect()
}

pub fn ranked_words(list: &RankedWordList) -> Vec<String> {
    list.entries.iter().map(|e| e.word.clone()).collect()
}

/// Plane through the midpoint, equidistant centroids, translation
/// invariance, scale equivariance, label-swap invariance and homogeneity of
/// the plane equation.
pub fn hyperplane_invariants(seed: u64, k: usize) {
    let inst = instance(seed, k);
    let analysis = analyze(&inst.table, &inst.vocab).unwrap();
    let plane = &analysis.plane;
    let scale = plane.w_norm.max(1.0);

    assert!(plane.signed_distance(&plane.x0).unwrap().abs() <= 1e-9 * scale);

    let da = plane.distance(&analysis.centroid_a.vector).unwrap();
    let db = plane.distance(&analysis.centroid_b.vector).unwrap();
    assert!((da - db).abs() <= 1e-9 * scale, "seed {seed}: {da} vs {db}");
    assert!((da - plane.w_norm / 2.0).abs() <= 1e-9 * scale);

    let base = distances(&inst.table, plane);

    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let t = gaussian_vec(&mut rng, k, 5.0);
    let moved = inst.table.map(|c, x| x + t[c]);
    let moved_plane = analyze(&moved, &inst.vocab).unwrap().plane;
    for (x, y) in base.iter().zip(distances(&moved, &moved_plane)) {
        assert!((x - y).abs() <= 1e-9, "seed {seed}: translation {x} vs {y}");
    }

    let s = rng.gen_range(0.1..10.0);
    let scaled = inst.table.map(|_, x| s * x);
    let scaled_analysis = analyze(&scaled, &inst.vocab).unwrap();
    for (x, y) in base.iter().zip(distances(&scaled, &scaled_analysis.plane)) {
        assert!((s * x - y).abs() <= 1e-9 * (1.0 + y.abs()), "seed {seed}: scale");
    }
    assert_eq!(ranked_words(&scaled_analysis.ranking), ranked_words(&analysis.ranking));

    let swapped = build_hyperplane(&analysis.centroid_b, &analysis.centroid_a).unwrap();
    assert_eq!(distances(&inst.table, &swapped), base);
    let swapped_ranking = rank_by_distance(&inst.table, &swapped, &inst.vocab).unwrap();
    assert_eq!(ranked_words(&swapped_ranking), ranked_words(&analysis.ranking));

    let c = rng.gen_range(0.01..100.0);
    let homogeneous = Hyperplane {
        w: plane.w.iter().map(|x| c * x).collect(),
        b: c * plane.b,
        x0: plane.x0.clone(),
        w_norm: c * plane.w_norm,
    };
    for (x, y) in base.iter().zip(distances(&inst.table, &homogeneous)) {
        assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
    }
}

/// Analytic negative-sampling gradients against central differences
/// (h = 1e-5, relative tolerance 1e-4) on `instances` random micro-cases.
pub fn sgns_gradient_check(seed: u64, instances: usize) {
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let k = rng.gen_range(1..=8);
        let n_neg = rng.gen_range(1..=5);
        let center = gaussian_vec(&mut rng, k, 0.7);
        let context = gaussian_vec(&mut rng, k, 0.7);
        let negatives: Vec<Vec<f64>> = (0..n_neg).map(|_| gaussian_vec(&mut rng, k, 0.7)).collect();
        let neg_refs: Vec<&[f64]> = negatives.iter().map(Vec::as_slice).collect();
        let analytic = pair_loss_and_gradients(&center, &context, &neg_refs);

        assert!(rel_err(analytic.loss, sgns_loss(&center, &context, &negatives), 1e-12) < 1e-12);

        let check = |name: &str, numeric: Vec<f64>, exact: &[f64]| {
            for (i, (n, a)) in numeric.iter().zip(exact).enumerate() {
                assert!(rel_err(*n, *a, 1e-6) < TOL, "{name}[{i}]: numeric {n} analytic {a}");
            }
        };
        check(
            "center",
            numeric_gradient(&center, H, |c| sgns_loss(c, &context, &negatives)),
            &analytic.center,
        );
        check(
            "context",
            numeric_gradient(&context, H, |u| sgns_loss(&center, u, &negatives)),
            &analytic.context,
        );
        for j in 0..n_neg {
            let numeric = numeric_gradient(&negatives[j], H, |u| {
                let mut negs = negatives.clone();
                negs[j] = u.to_vec();
                sgns_loss(&center, &context, &negs)
            });
            check("negative", numeric, &analytic.negatives[j]);
        }
    }
}

/// Four documents over three words, with every smoothed probability worked
/// out by hand.
pub fn naive_bayes_four_doc_oracle() {
    let data = FeatureMatrix::from_rows(
        vec![
            vec![(0, 2), (1, 1)],
            vec![(0, 1), (2, 1)],
            vec![(1, 2), (2, 1)],
            vec![(2, 3)],
        ],
        vec![Class::A, Class::A, Class::B, Class::B],
        3,
    )
    .unwrap();
    let model = NaiveBayes.fit(&data, &[0, 1, 2, 3]).unwrap();
    // class A counts 3,1,1 of 5 tokens; class B counts 0,2,4 of 6; +1 smoothing over 3 words
    let pa = [4.0 / 8.0, 2.0 / 8.0, 2.0 / 8.0];
    let pb = [1.0 / 9.0, 3.0 / 9.0, 5.0 / 9.0];
    for c in 0..3 {
        assert!((model.log_prob[0][c] - f64::ln(pa[c])).abs() < 1e-9);
        assert!((model.log_prob[1][c] - f64::ln(pb[c])).abs() < 1e-9);
    }
    assert!((model.log_prior[0] - 0.5f64.ln()).abs() < 1e-9);
    assert!((model.log_prior[1] - 0.5f64.ln()).abs() < 1e-9);

    let query = [(0, 1), (1, 1), (2, 2)];
    // (1/2 · 1/4 · 1/16) / (1/9 · 1/3 · 25/81) = 2187 / 3200
    let expected = (2187.0f64 / 3200.0).ln();
    assert!((model.log_odds(&query) - expected).abs() < 1e-9);
    assert_eq!(model.predict(&query), Class::B);
    assert_eq!(model.predict(&[(0, 3)]), Class::A);
}

/// Ten stratified folds over random label vectors: disjoint, exhaustive, and
/// per-class counts within one document of each other.
pub fn fold_partition_check(seed: u64, trials: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let n = rng.gen_range(20..300);
        let labels: Vec<Class> = (0..n).map(|_| if rng.gen_bool(0.3) { Class::A } else { Class::B }).collect();
        let folds = stratified_folds(&labels, 10, rng.gen()).unwrap();
        assert_eq!(folds.len(), 10);
        let mut seen = vec![0; n];
        for fold in &folds {
            fold.iter().for_each(|&i| seen[i] += 1);
        }
        assert!(seen.iter().all(|&c| c == 1));
        for class in Class::BOTH {
            let per_fold: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
        }
    }
}

/// Counts from `for_word` and both selector scores against tables counted
/// straight from the raw text. Returns how many words hit a zero score
/// through exact independence and through a degenerate marginal.
pub fn selector_oracle(raw: &[RawDocument]) -> (usize, usize) {
    let corpus = build_corpus(raw, 1).unwrap();
    let docs: Vec<(Class, Vec<String>)> = raw
        .iter()
        .map(|d| {
            let class = if d.label == corpus.labels[0] { Class::A } else { Class::B };
            (class, tokenize(&d.text))
        })
        .collect();
    let (mut independent, mut degenerate) = (0, 0);
    for (id, word) in corpus.vocab.words().iter().enumerate() {
        let t = ContingencyTable::for_word(&corpus.vocab, id as u32);
        let brute = brute_table(&docs, word);
        assert_eq!([t.n11, t.n10, t.n01, t.n00], brute, "{word}");

        let (chi2, expected) = (chi2_score(&t), chi2_oracle(brute));
        if expected == 0.0 {
            assert_eq!(chi2, 0.0, "{word}");
        } else {
            assert!(rel_err(chi2, expected, 0.0) <= 1e-9, "{word}: {chi2} vs {expected}");
        }
        let (mi, expected) = (mi_score(&t), mi_oracle(brute));
        assert!((mi - expected).abs() <= 1e-9, "{word}: {mi} vs {expected}");

        let [a1, a0, b1, b0] = brute;
        if a1 + b1 == 0 || a0 + b0 == 0 {
            degenerate += 1;
            assert_eq!(chi2, 0.0);
            assert_eq!(mi, 0.0);
        } else if a1 * b0 == a0 * b1 {
            independent += 1;
            assert_eq!(chi2, 0.0);
            assert_eq!(mi, 0.0);
        }
    }
    (independent, degenerate)
}
