//! Class centroids, the separating hyperplane and distance ranking.
//!
//! The hyperplane is orthogonal to the segment joining the two class
//! centroids and passes through its midpoint:
//!
//! ```text
//! w  = center_a - center_b
//! x0 = (center_a + center_b) / 2
//! b  = -w · x0
//! d(x) = |w · x + b| / ‖w‖
//! ```
//!
//! Words closest to the plane are equally typical of both classes; they are
//! the domain-specific stop word candidates and are eliminated first.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::corpus::{Class, Vocabulary};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::ranking::{Method, RankedWordList};

/// Centroids closer than this are treated as coincident.
pub const MIN_NORMAL_NORM: f64 = 1e-12;

/// Read access to a table of word vectors indexed by vocabulary id.
pub trait WordVectors {
    type Elem: Copy + Into<f64>;

    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn vector(&self, id: u32) -> &[Self::Elem];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl WordVectors for EmbeddingModel {
    type Elem = f32;

    fn dim(&self) -> usize {
        EmbeddingModel::dim(self)
    }

    fn len(&self) -> usize {
        self.rows()
    }

    fn vector(&self, id: u32) -> &[f32] {
        EmbeddingModel::vector(self, id)
    }
}

/// Row-major `f64` vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorTable {
    dim: usize,
    data: Vec<f64>,
}

impl VectorTable {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(dim * rows.len());
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Apply `f` to every component, e.g. to translate or scale the table.
    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .enumerate()
                .map(|(i, &x)| f(i % self.dim, x))
                .collect(),
        }
    }
}

impl WordVectors for VectorTable {
    type Elem = f64;

    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    fn vector(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.data[start..start + self.dim]
    }
}

fn dot<T: Copy + Into<f64>>(a: &[f64], b: &[T]) -> f64 {
    let mut acc = [0f64; 4];
    let (ac, bc) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ac
        .remainder()
        .iter()
        .zip(bc.remainder())
        .map(|(&x, &y)| x * y.into())
        .sum();
    for (x, y) in ac.zip(bc) {
        for i in 0..4 {
            acc[i] += x[i] * y[i].into();
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassCentroid {
    pub class: Class,
    pub vector: Vec<f64>,
    /// Number of unique words averaged.
    pub contributing_words: usize,
}

/// Mean of the vectors of `word_ids`, which should be the unique words of
/// `class`.
pub fn compute_centroid<V: WordVectors>(
    vectors: &V,
    class: Class,
    word_ids: &[u32],
) -> Result<ClassCentroid> {
    if word_ids.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut sum = vec![0f64; vectors.dim()];
    for &id in word_ids {
        for (s, &x) in sum.iter_mut().zip(vectors.vector(id)) {
            *s += x.into();
        }
    }
    let m = word_ids.len() as f64;
    sum.iter_mut().for_each(|s| *s /= m);
    Ok(ClassCentroid {
        class,
        vector: sum,
        contributing_words: word_ids.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
    pub x0: Vec<f64>,
    pub w_norm: f64,
}

pub fn build_hyperplane(center_a: &ClassCentroid, center_b: &ClassCentroid) -> Result<Hyperplane> {
    let (a, b) = (&center_a.vector, &center_b.vector);
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let w_norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(w_norm > MIN_NORMAL_NORM) {
        return Err(Error::DegenerateHyperplane);
    }
    let x0: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect();
    let offset = -dot(&w, &x0);
    Ok(Hyperplane {
        w,
        b: offset,
        x0,
        w_norm,
    })
}

impl Hyperplane {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// `(w · x + b) / ‖w‖`; positive on the class-A side.
    pub fn signed_distance<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: x.len(),
            });
        }
        Ok((dot(&self.w, x) + self.b) / self.w_norm)
    }

    pub fn distance<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<f64> {
        self.signed_distance(x).map(f64::abs)
    }
}

/// Every vocabulary word in ascending distance from `plane`.
pub fn rank_by_distance<V: WordVectors>(
    vectors: &V,
    plane: &Hyperplane,
    vocab: &Vocabulary,
) -> Result<RankedWordList> {
    if vectors.len() != vocab.len() {
        return Err(Error::DimensionMismatch {
            expected: vocab.len(),
            found: vectors.len(),
        });
    }
    let distances = (0..vocab.len() as u32)
        .map(|id| plane.distance(vectors.vector(id)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RankedWordList::ascending(
        Method::Hyperplane,
        vocab,
        &distances,
    ))
}

/// Centroids, plane and ranking for one embedding of a two-class corpus.
#[derive(Clone, Debug)]
pub struct HyperplaneAnalysis {
    pub centroid_a: ClassCentroid,
    pub centroid_b: ClassCentroid,
    pub plane: Hyperplane,
    pub ranking: RankedWordList,
}

pub fn analyze<V: WordVectors>(vectors: &V, vocab: &Vocabulary) -> Result<HyperplaneAnalysis> {
    let centroid_a = compute_centroid(vectors, Class::A, &vocab.class_words(Class::A))?;
    let centroid_b = compute_centroid(vectors, Class::B, &vocab.class_words(Class::B))?;
    let plane = build_hyperplane(&centroid_a, &centroid_b)?;
    let ranking = rank_by_distance(vectors, &plane, vocab)?;
    Ok(HyperplaneAnalysis {
        centroid_a,
        centroid_b,
        plane,
        ranking,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedWord {
    pub word: String,
    pub coords: [f64; 2],
    pub distance: f64,
}

/// Principal-component projection fitted on a set of word vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub mean: Vec<f64>,
    /// Unit eigenvectors of the covariance, largest eigenvalue first.
    pub components: [Vec<f64>; 2],
    /// Variance captured by each component.
    pub variances: [f64; 2],
    pub points: Vec<ProjectedWord>,
}

impl Projection {
    pub fn project<T: Copy + Into<f64>>(&self, x: &[T]) -> [f64; 2] {
        let centered: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .map(|(&v, m)| v.into() - m)
            .collect();
        [
            dot(&self.components[0], &centered),
            dot(&self.components[1], &centered),
        ]
    }
}

/// Fit a two-component PCA on the vectors of `words` and project them.
pub fn project_2d<V: WordVectors>(
    vectors: &V,
    vocab: &Vocabulary,
    plane: &Hyperplane,
    words: &[&str],
) -> Result<Projection> {
    if words.len() < 2 {
        return Err(Error::TooFewWords {
            needed: 2,
            found: words.len(),
        });
    }
    let ids = words
        .iter()
        .map(|w| vocab.id(w).ok_or_else(|| Error::UnknownWord((*w).to_owned())))
        .collect::<Result<Vec<u32>>>()?;
    let dim = vectors.dim();
    let n = ids.len();
    let mut mean = vec![0f64; dim];
    for &id in &ids {
        for (m, &x) in mean.iter_mut().zip(vectors.vector(id)) {
            *m += x.into();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, dim, |r, c| vectors.vector(ids[r])[c].into() - mean[c]);
    let cov = centered.transpose() * &centered / (n - 1) as f64;
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let component = |rank: usize| -> (Vec<f64>, f64) {
        let Some(&col) = order.get(rank) else {
            return (vec![0.0; dim], 0.0);
        };
        let mut v: Vec<f64> = eigen.eigenvectors.column(col).iter().copied().collect();
        // fix the sign so the largest-magnitude entry is positive
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (v, eigen.eigenvalues[col].max(0.0))
    };
    let (pc1, var1) = component(0);
    let (pc2, var2) = component(1);

    let mut projection = Projection {
        mean,
        components: [pc1, pc2],
        variances: [var1, var2],
        points: Vec::with_capacity(n),
    };
    for (&id, word) in ids.iter().zip(words) {
        let x = vectors.vector(id);
        projection.points.push(ProjectedWord {
            word: (*word).to_owned(),
            coords: projection.project(x),
            distance: plane.distance(x)?,
        });
    }
    Ok(projection)
}
