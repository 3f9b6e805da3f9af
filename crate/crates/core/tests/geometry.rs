mod common;

use common::checks::{hyperplane_invariants, instance};
use common::{gaussian_vec, jacobi_eigen};
use hyperstop::corpus::Class;
use hyperstop::geometry::{
    analyze, build_hyperplane, compute_centroid, project_2d, rank_by_distance, VectorTable,
    WordVectors,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn hyperplane_invariants_on_seeded_instances() {
    for seed in 0..100u64 {
        hyperplane_invariants(seed, [2, 10, 100][seed as usize % 3]);
    }
}

#[test]
fn centroid_matches_naive_summation() {
    for seed in 0..20u64 {
        let inst = instance(seed, 10);
        for class in Class::BOTH {
            let ids = inst.vocab.class_words(class);
            let got = compute_centroid(&inst.table, class, &ids).unwrap();
            let mut expected = vec![0.0; 10];
            for &id in &ids {
                for d in 0..10 {
                    expected[d] += inst.rows[id as usize][d];
                }
            }
            for d in 0..10 {
                expected[d] /= ids.len() as f64;
                assert!((got.vector[d] - expected[d]).abs() <= 1e-6);
            }
            assert_eq!(got.contributing_words, ids.len());
        }
    }
}

#[test]
fn ranking_is_ascending_with_lexicographic_ties() {
    let inst = instance(3, 4);
    let analysis = analyze(&inst.table, &inst.vocab).unwrap();
    let e = &analysis.ranking.entries;
    assert_eq!(e.len(), inst.vocab.len());
    for pair in e.windows(2) {
        assert!(pair[0].score < pair[1].score || (pair[0].score == pair[1].score && pair[0].word < pair[1].word));
    }

    // every vector on one of two mirrored points gives only two distinct distances
    let rows: Vec<Vec<f64>> = (0..inst.vocab.len()).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0]).collect();
    let table = VectorTable::from_rows(&rows).unwrap();
    let plane = build_hyperplane(
        &compute_centroid(&table, Class::A, &[0]).unwrap(),
        &compute_centroid(&table, Class::B, &[1]).unwrap(),
    )
    .unwrap();
    let ranking = rank_by_distance(&table, &plane, &inst.vocab).unwrap();
    let words: Vec<&str> = ranking.entries.iter().map(|e| e.word.as_str()).collect();
    let mut sorted = words.clone();
    sorted.sort_unstable();
    assert_eq!(words, sorted);
}

fn sample_covariance(points: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = points.len() as f64;
    let k = points[0].len();
    let mean: Vec<f64> = (0..k).map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n).collect();
    let cov = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| points.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect();
    (mean, cov)
}

#[test]
fn projection_agrees_with_jacobi_eigensolver() {
    for seed in 0..10u64 {
        let k = [3, 6, 12][seed as usize % 3];
        let inst = instance(seed + 50, k);
        let analysis = analyze(&inst.table, &inst.vocab).unwrap();
        let words: Vec<&str> = inst.vocab.words().iter().map(String::as_str).collect();
        let proj = project_2d(&inst.table, &inst.vocab, &analysis.plane, &words).unwrap();

        let (mean, cov) = sample_covariance(&inst.rows);
        let (values, vectors) = jacobi_eigen(&cov);
        for d in 0..k {
            assert!((proj.mean[d] - mean[d]).abs() < 1e-9);
        }
        for c in 0..2 {
            assert!((proj.variances[c] - values[c]).abs() < 1e-8 * (1.0 + values[c]));
            if values[c] - values[c + 1] > 1e-6 {
                let cos: f64 = proj.components[c].iter().zip(&vectors[c]).map(|(a, b)| a * b).sum();
                assert!((cos.abs() - 1.0).abs() < 1e-8, "seed {seed} pc{c}: |cos| {cos}");
            }
        }
        for (point, id) in proj.points.iter().zip(0u32..) {
            assert_eq!(point.word, inst.vocab.word(id));
            assert_eq!(point.distance, analysis.plane.distance(inst.table.vector(id)).unwrap());
        }
    }
}

#[test]
fn rank_two_data_is_reconstructed_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let k = 7;
    let inst = instance(8, k);
    let u1 = gaussian_vec(&mut rng, k, 1.0);
    let u2 = gaussian_vec(&mut rng, k, 1.0);
    let origin = gaussian_vec(&mut rng, k, 1.0);
    let rows: Vec<Vec<f64>> = (0..inst.vocab.len())
        .map(|_| {
            let (a, b) = (rng.gen_range(-5.0..5.0), rng.gen_range(-1.0..1.0));
            (0..k).map(|d| origin[d] + a * u1[d] + b * u2[d]).collect()
        })
        .collect();
    let table = VectorTable::from_rows(&rows).unwrap();
    let analysis = analyze(&table, &inst.vocab).unwrap();
    let words: Vec<&str> = inst.vocab.words().iter().map(String::as_str).collect();
    let proj = project_2d(&table, &inst.vocab, &analysis.plane, &words).unwrap();
    for (point, row) in proj.points.iter().zip(&rows) {
        for d in 0..k {
            let rebuilt = proj.mean[d]
                + point.coords[0] * proj.components[0][d]
                + point.coords[1] * proj.components[1][d];
            assert!((rebuilt - row[d]).abs() < 1e-9, "{rebuilt} vs {}", row[d]);
        }
    }
}

proptest! {
    #[test]
    fn distances_are_non_negative_and_zero_on_plane(
        a in prop::collection::vec(-10.0f64..10.0, 3),
        b in prop::collection::vec(-10.0f64..10.0, 3),
        x in prop::collection::vec(-10.0f64..10.0, 3),
    ) {
        let table = VectorTable::from_rows(&[a.clone(), b.clone()]).unwrap();
        let ca = compute_centroid(&table, Class::A, &[0]).unwrap();
        let cb = compute_centroid(&table, Class::B, &[1]).unwrap();
        prop_assume!(a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>() > 1e-6);
        let plane = build_hyperplane(&ca, &cb).unwrap();
        prop_assert!(plane.distance(&x).unwrap() >= 0.0);
        let signed = plane.signed_distance(&x).unwrap();
        let onto: Vec<f64> = x.iter().zip(&plane.w).map(|(xi, wi)| xi - signed * wi / plane.w_norm).collect();
        prop_assert!(plane.distance(&onto).unwrap() < 1e-9);
    }
}
