//! Forward evolution of the continuous-time quantum walk from a vertex basis state,
//! with instantaneous and time-averaged vertex distributions.
//!
//! Evolution is spectral: `psi(t) = Σ_k exp(-i t λ_k) (v_k · e_start) v_k`. The
//! average distribution uses the distinct-eigenvalue projectors,
//! `p̄_j = Σ_λ |(Π_λ)[j, start]|²`, so it depends on the grouping tolerance of the
//! underlying [`SpectralDecomposition`].

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::spectral::{SpectralDecomposition, DEFAULT_GROUPING_TOLERANCE};

/// Entries above `-NEGATIVE_CLAMP` but below zero are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-14;
/// Allowed deviation of a distribution's total mass from one.
pub const SUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WalkState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distribution(&self) -> Distribution {
        Distribution {
            probs: self.amplitudes.iter().map(|z| z.norm_sqr()).collect(),
        }
    }
}

/// Non-negative reals over the vertices summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates entries (clamping values in `[-1e-14, 0)` to zero) and total mass
    /// within [`SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, SUM_TOLERANCE)
    }

    pub fn with_tolerance(mut probs: Vec<f64>, sum_tolerance: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        for (j, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEGATIVE_CLAMP {
                return Err(Error::InvalidDistribution(format!("entry {j} is {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > sum_tolerance {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1 within {sum_tolerance:e}"
            )));
        }
        Ok(Self { probs })
    }

    /// Validates within `sum_tolerance`, then rescales so the entries sum to one.
    pub fn normalized(probs: Vec<f64>, sum_tolerance: f64) -> Result<Self> {
        let d = Self::with_tolerance(probs, sum_tolerance)?;
        let sum: f64 = d.probs.iter().sum();
        Ok(Self {
            probs: d.probs.into_iter().map(|p| p / sum).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(n: usize, v: usize) -> Result<Self> {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let mut probs = vec![0.0; n];
        probs[v] = 1.0;
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `max_j |p_j − q_j|`; infinite when lengths differ.
    pub fn sup_distance(&self, other: &Distribution) -> f64 {
        sup_distance(&self.probs, &other.probs)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.probs[j]
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Time-averaged distribution together with the spectral data it was keyed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageDistribution {
    pub distribution: Distribution,
    pub spectral_type: usize,
    pub grouping_tolerance: f64,
}

/// Walk on a fixed graph; holds the spectral decomposition so repeated queries
/// are `O(n²)` each.
#[derive(Debug, Clone)]
pub struct QuantumWalk {
    decomposition: SpectralDecomposition,
}

impl QuantumWalk {
    pub fn new(g: &WeightedGraph) -> Self {
        Self::with_tolerance(g, DEFAULT_GROUPING_TOLERANCE)
    }

    pub fn with_tolerance(g: &WeightedGraph, grouping_tolerance: f64) -> Self {
        Self {
            decomposition: SpectralDecomposition::of_graph_with_tolerance(g, grouping_tolerance),
        }
    }

    pub fn from_decomposition(decomposition: SpectralDecomposition) -> Self {
        Self { decomposition }
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn n(&self) -> usize {
        self.decomposition.n()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
        }
        Ok(())
    }

    // No bounds check; callers validate `start`.
    pub(crate) fn amplitudes(&self, start: usize, t: f64) -> Vec<Complex64> {
        let v = self.decomposition.eigenvectors();
        let n = self.n();
        let coeff: Vec<Complex64> = self
            .decomposition
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(k, &l)| Complex64::from_polar(v[(start, k)], -l * t))
            .collect();
        (0..n)
            .map(|j| (0..n).map(|k| coeff[k] * v[(j, k)]).sum())
            .collect()
    }

    pub(crate) fn probabilities(&self, start: usize, t: f64) -> Vec<f64> {
        self.amplitudes(start, t).iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn evolve(&self, start: usize, t: f64) -> Result<WalkState> {
        self.check_vertex(start)?;
        Ok(WalkState {
            amplitudes: self.amplitudes(start, t),
            time: t,
        })
    }

    pub fn distribution_at(&self, start: usize, t: f64) -> Result<Distribution> {
        Ok(self.evolve(start, t)?.distribution())
    }

    /// Applies `exp(-i dt A)` to an arbitrary state.
    pub fn propagate(&self, state: &WalkState, dt: f64) -> Result<WalkState> {
        if state.amplitudes.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "state has {} amplitudes, graph has {} vertices",
                state.amplitudes.len(),
                self.n()
            )));
        }
        let u = self.propagator(dt);
        let out = (0..self.n())
            .map(|j| (0..self.n()).map(|k| u[(j, k)] * state.amplitudes[k]).sum())
            .collect();
        Ok(WalkState {
            amplitudes: out,
            time: state.time + dt,
        })
    }

    /// Dense `exp(-i t A)` assembled from the decomposition.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.decomposition.eigenvectors();
        let n = self.n();
        let phases: Vec<Complex64> = self
            .decomposition
            .eigenvalues()
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t))
            .collect();
        DMatrix::from_fn(n, n, |j, k| {
            (0..n).map(|m| phases[m] * (v[(j, m)] * v[(k, m)])).sum()
        })
    }

    pub fn average_distribution(&self, start: usize) -> Result<AverageDistribution> {
        self.check_vertex(start)?;
        let columns = self.decomposition.projector_columns(start);
        let mut probs = vec![0.0; self.n()];
        for col in &columns {
            for (p, x) in probs.iter_mut().zip(col) {
                *p += x * x;
            }
        }
        Ok(AverageDistribution {
            distribution: Distribution { probs },
            spectral_type: self.decomposition.spectral_type(),
            grouping_tolerance: self.decomposition.grouping_tolerance(),
        })
    }

    /// Trapezoidal estimate of `(1/T) ∫₀ᵀ p(t) dt` over `steps` equal intervals.
    ///
    /// The state is advanced by repeated application of the one-step propagator,
    /// so the estimate never uses the eigenvalue grouping.
    pub fn numerical_time_average(&self, start: usize, horizon: f64, steps: usize) -> Result<Distribution> {
        self.check_vertex(start)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 steps, got {steps}")));
        }
        let n = self.n();
        let u = self.propagator(horizon / steps as f64);
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        psi[start] = Complex64::new(1.0, 0.0);
        let mut next = psi.clone();
        let mut acc = vec![0.0; n];
        for step in 0..=steps {
            let w = if step == 0 || step == steps { 0.5 } else { 1.0 };
            for (a, z) in acc.iter_mut().zip(&psi) {
                *a += w * z.norm_sqr();
            }
            if step < steps {
                for (j, out) in next.iter_mut().enumerate() {
                    *out = (0..n).map(|k| u[(j, k)] * psi[k]).sum();
                }
                std::mem::swap(&mut psi, &mut next);
            }
        }
        let total: f64 = acc.iter().sum();
        Ok(Distribution {
            probs: acc.into_iter().map(|a| a / total).collect(),
        })
    }

    /// Distributions at `t = 0, step, 2·step, … ≤ t_max`.
    pub fn trajectory(&self, start: usize, t_max: f64, step: f64) -> Result<Vec<(f64, Distribution)>> {
        self.check_vertex(start)?;
        if !(t_max.is_finite() && t_max > 0.0) || !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max and step must be positive, got {t_max} and {step}"
            )));
        }
        let count = (t_max / step * (1.0 + 1e-12)).floor() as usize + 1;
        Ok((0..count)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 * step;
                (t, Distribution { probs: self.probabilities(start, t) })
            })
            .collect())
    }
}

pub fn evolve(g: &WeightedGraph, start: usize, t: f64) -> Result<WalkState> {
    QuantumWalk::new(g).evolve(start, t)
}

pub fn instantaneous_distribution(state: &WalkState) -> Distribution {
    state.distribution()
}

pub fn average_distribution(g: &WeightedGraph, start: usize) -> Result<AverageDistribution> {
    QuantumWalk::new(g).average_distribution(start)
}

pub fn numerical_time_average(g: &WeightedGraph, start: usize, horizon: f64, steps: usize) -> Result<Distribution> {
    QuantumWalk::new(g).numerical_time_average(start, horizon, steps)
}

pub fn trajectory(g: &WeightedGraph, start: usize, t_max: f64, step: f64) -> Result<Vec<(f64, Distribution)>> {
    QuantumWalk::new(g).trajectory(start, t_max, step)
}

/// Formats a float with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `t,p_0,...,p_{n-1}` rows with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(rows: &[(f64, Distribution)], n: usize, mut out: W) -> Result<()> {
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..n).map(|j| format!("p_{j}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (t, d) in rows {
        let line: Vec<String> = std::iter::once(*t)
            .chain(d.probs().iter().copied())
            .map(format_sig17)
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
