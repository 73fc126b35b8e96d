//! Test-only reference evaluators that do not touch the eigensolver.
//!
//! Shared between unit tests and the integration suites (`#[path]` include), so it
//! only depends on nalgebra and num-complex.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `exp(-i t A)` by scaling and squaring of a truncated Taylor series.
pub fn series_propagator(a: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>() * t.abs();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x: DMatrix<Complex64> = a.map(|v| Complex64::new(0.0, -t * scale * v));
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &x / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Column `start` of [`series_propagator`].
pub fn series_evolve(a: &DMatrix<f64>, start: usize, t: f64) -> Vec<Complex64> {
    series_propagator(a, t).column(start).iter().copied().collect()
}

pub fn probabilities(amps: &[Complex64]) -> Vec<f64> {
    amps.iter().map(|z| z.norm_sqr()).collect()
}
