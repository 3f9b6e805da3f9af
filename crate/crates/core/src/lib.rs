//! Domain-specific stop word detection for two-class corpora.
//!
//! Words are embedded with skip-gram, each class is summarised by the
//! centroid of its unique words, and every word is ranked by its distance to
//! the hyperplane that bisects the two centroids. Words nearest the plane are
//! shared evenly by both classes and are removed first. The [`selectors`]
//! module provides χ², mutual information and random baselines with the same
//! ranking contract, and [`experiment`] evaluates eliminations with Naive
//! Bayes and logistic regression under stratified cross-validation.

pub mod classify;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod ranking;
pub mod selectors;
pub mod synth;

pub use error::{Error, Result};
