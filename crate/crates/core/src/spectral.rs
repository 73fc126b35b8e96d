//! Symmetric eigendecomposition of adjacency matrices, grouping of numerically
//! equal eigenvalues, and the spectral projectors onto each distinct eigenvalue.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Two eigenvalues are considered equal when they differ by at most
/// `DEFAULT_GROUPING_TOLERANCE * max(1, spectral radius)`.
pub const DEFAULT_GROUPING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    // columns are orthonormal eigenvectors, same order as `eigenvalues`
    eigenvectors: DMatrix<f64>,
    groups: Vec<Range<usize>>,
    grouping_tolerance: f64,
    spectral_radius: f64,
}

impl SpectralDecomposition {
    pub fn of_graph(g: &WeightedGraph) -> Self {
        Self::of_matrix(g.adjacency_matrix(), DEFAULT_GROUPING_TOLERANCE)
    }

    pub fn of_graph_with_tolerance(g: &WeightedGraph, grouping_tolerance: f64) -> Self {
        Self::of_matrix(g.adjacency_matrix(), grouping_tolerance)
    }

    /// Decomposes a real symmetric matrix. Only the lower triangle is read.
    pub fn of_matrix(a: DMatrix<f64>, grouping_tolerance: f64) -> Self {
        assert!(a.is_square(), "matrix must be square");
        let n = a.nrows();
        let eig = SymmetricEigen::new(a);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }

        let spectral_radius = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let threshold = grouping_tolerance * spectral_radius.max(1.0);
        let groups = group_sorted(&eigenvalues, threshold);
        for g in &groups {
            if g.len() > 1 {
                orthonormalize_columns(&mut eigenvectors, g.clone());
            }
        }

        Self {
            eigenvalues,
            eigenvectors,
            groups,
            grouping_tolerance,
            spectral_radius,
        }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// Index ranges (into [`eigenvalues`](Self::eigenvalues)) of the distinct-eigenvalue classes.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn grouping_tolerance(&self) -> f64 {
        self.grouping_tolerance
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Number of distinct eigenvalues, `τ(G)`.
    pub fn spectral_type(&self) -> usize {
        self.groups.len()
    }

    /// Largest eigenvalue multiplicity, `μ(G)`.
    pub fn max_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.len()).max().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len()).collect()
    }

    /// Representative value of each distinct eigenvalue (mean over its group).
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        self.groups
            .iter()
            .map(|g| self.eigenvalues[g.clone()].iter().sum::<f64>() / g.len() as f64)
            .collect()
    }

    /// Orthogonal projector onto the eigenspace of group `index`.
    pub fn projector(&self, index: usize) -> Result<DMatrix<f64>> {
        let range = self.groups.get(index).cloned().ok_or(Error::GroupOutOfRange {
            index,
            groups: self.groups.len(),
        })?;
        let v = self.eigenvectors.columns(range.start, range.len());
        Ok(&v * v.transpose())
    }

    /// `(Π_λ)[j, s]` for every group and every `j`: row `g` holds column `s` of the
    /// projector for group `g`.
    pub(crate) fn projector_columns(&self, s: usize) -> Vec<Vec<f64>> {
        let n = self.n();
        self.groups
            .iter()
            .map(|range| {
                (0..n)
                    .map(|j| {
                        range
                            .clone()
                            .map(|k| self.eigenvectors[(j, k)] * self.eigenvectors[(s, k)])
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// `max_k ‖A v_k − λ_k v_k‖₂`.
    pub fn max_residual(&self, a: &DMatrix<f64>) -> f64 {
        (0..self.n())
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (a * v - v * self.eigenvalues[k]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `‖VᵀV − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.eigenvectors.transpose() * &self.eigenvectors;
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_k λ_k v_k v_kᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        v * d * v.transpose()
    }
}

/// Free-function form of [`SpectralDecomposition::of_graph`].
pub fn decompose(g: &WeightedGraph) -> SpectralDecomposition {
    SpectralDecomposition::of_graph(g)
}

pub fn spectral_type(d: &SpectralDecomposition) -> usize {
    d.spectral_type()
}

pub fn projector(d: &SpectralDecomposition, group: usize) -> Result<DMatrix<f64>> {
    d.projector(group)
}

// Single-linkage grouping of a sorted sequence: a new group starts whenever the
// gap to the previous value exceeds the threshold.
fn group_sorted(values: &[f64], threshold: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > threshold {
            if i > start {
                groups.push(start..i);
            }
            start = i;
        }
    }
    groups
}

// Two passes of modified Gram-Schmidt over a block of columns.
fn orthonormalize_columns(m: &mut DMatrix<f64>, cols: Range<usize>) {
    for _ in 0..2 {
        for c in cols.clone() {
            for prev in cols.start..c {
                let dot = m.column(prev).dot(&m.column(c));
                let p = m.column(prev).into_owned();
                m.column_mut(c).axpy(-dot, &p, 1.0);
            }
            let norm = m.column(c).norm();
            m.column_mut(c).scale_mut(1.0 / norm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn p3_weighted_eigenvalues() {
        let alpha = 1.7;
        let g = Family::Path(3).build().unwrap().set_weight(1, 2, alpha).unwrap();
        let d = decompose(&g);
        let delta = (1.0f64 + alpha * alpha).sqrt();
        let expected = [-delta, 0.0, delta];
        for (l, e) in d.eigenvalues().iter().zip(expected) {
            assert!((l - e).abs() < 1e-12, "{l} vs {e}");
        }
        assert_eq!(d.spectral_type(), 3);
    }

    #[test]
    fn weighted_claw_spectrum() {
        let ws = [0.3, 1.1, 0.8, 2.0, 0.5];
        let mut g = Family::Claw(ws.len()).build().unwrap();
        for (i, &w) in ws.iter().enumerate() {
            g.insert_weight(0, i + 1, w).unwrap();
        }
        let d = decompose(&g);
        let delta = ws.iter().map(|w| w * w).sum::<f64>().sqrt();
        assert_eq!(d.spectral_type(), 3);
        assert_eq!(d.multiplicities(), vec![1, ws.len() - 1, 1]);
        let distinct = d.distinct_eigenvalues();
        assert!((distinct[0] + delta).abs() < 1e-12);
        assert!(distinct[1].abs() < 1e-12);
        assert!((distinct[2] - delta).abs() < 1e-12);
    }

    #[test]
    fn c5_spectrum() {
        let d = decompose(&Family::Cycle(5).build().unwrap());
        let s5 = 5f64.sqrt();
        let lm = (-1.0 - s5) / 2.0;
        let lp = (-1.0 + s5) / 2.0;
        let expected = [lm, lm, lp, lp, 2.0];
        for (l, e) in d.eigenvalues().iter().zip(expected) {
            assert!((l - e).abs() < 1e-12);
        }
        assert_eq!(d.multiplicities(), vec![2, 2, 1]);
        assert_eq!(d.max_multiplicity(), 2);
    }

    #[test]
    fn complete_graph_type_two() {
        // brute-force check of eigenvalues n-1 and -1
        let d = decompose(&Family::Complete(5).build().unwrap());
        assert_eq!(d.spectral_type(), 2);
        assert_eq!(d.multiplicities(), vec![4, 1]);
        let distinct = d.distinct_eigenvalues();
        assert!((distinct[0] + 1.0).abs() < 1e-12 && (distinct[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hypercube_q3_type_four() {
        let d = decompose(&Family::Hypercube(3).build().unwrap());
        assert_eq!(d.spectral_type(), 4);
        assert_eq!(d.multiplicities(), vec![1, 3, 3, 1]);
        let distinct = d.distinct_eigenvalues();
        for (l, e) in distinct.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((l - e).abs() < 1e-12);
        }
    }

    #[test]
    fn single_vertex_projector() {
        let d = decompose(&WeightedGraph::new(1).unwrap());
        assert_eq!(d.spectral_type(), 1);
        assert_eq!(d.projector(0).unwrap(), DMatrix::from_element(1, 1, 1.0));
        assert!(matches!(d.projector(1), Err(Error::GroupOutOfRange { .. })));
    }

    #[test]
    fn k2_projectors_complete() {
        let d = decompose(&Family::Complete(2).build().unwrap());
        let sum = d.projector(0).unwrap() + d.projector(1).unwrap();
        assert!((sum - DMatrix::identity(2, 2)).abs().max() < 1e-15);
    }

    #[test]
    fn p3_zero_projector() {
        // oracle: outer product of v0 = (-1, 0, 1)/sqrt(2)
        let d = decompose(&Family::Path(3).build().unwrap());
        let v0 = DVector::from_vec(vec![-1.0, 0.0, 1.0]) / 2f64.sqrt();
        let oracle = &v0 * v0.transpose();
        let p = d.projector(1).unwrap();
        assert!((p - oracle).abs().max() < 1e-12);
    }

    #[test]
    fn grouping_tolerance_is_configurable() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1e-6, 1.0]));
        assert_eq!(SpectralDecomposition::of_matrix(a.clone(), 1e-8).spectral_type(), 3);
        assert_eq!(SpectralDecomposition::of_matrix(a, 1e-5).spectral_type(), 2);
    }

    #[test]
    fn product_spectrum_is_pairwise_sums() {
        let g = Family::Path(3).build().unwrap().set_weight(0, 1, 0.4).unwrap();
        let h = Family::Cycle(4).build().unwrap().set_weight(2, 3, 1.9).unwrap();
        let mu = decompose(&g);
        let nu = decompose(&h);
        let prod = decompose(&g.cartesian_product(&h));
        let sums = sorted(
            mu.eigenvalues()
                .iter()
                .flat_map(|a| nu.eigenvalues().iter().map(move |b| a + b))
                .collect(),
        );
        for (a, b) in prod.eigenvalues().iter().zip(&sums) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.0..5.0f64], n * n)
                    .prop_map(move |v| {
                        let mut m = DMatrix::from_vec(n, n, v);
                        for j in 0..n {
                            m[(j, j)] = 0.0;
                            for k in 0..j {
                                m[(k, j)] = m[(j, k)];
                            }
                        }
                        m
                    })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn decomposition_invariants(a in arb_matrix(64)) {
                let d = SpectralDecomposition::of_matrix(a.clone(), DEFAULT_GROUPING_TOLERANCE);
                let scale = d.spectral_radius().max(1.0);
                prop_assert!(d.max_residual(&a) <= 1e-9 * scale);
                prop_assert!(d.orthonormality_error() <= 1e-10);
                prop_assert!((d.reconstruct() - &a).abs().max() <= 1e-9 * scale);
                let trace: f64 = d.eigenvalues().iter().sum();
                prop_assert!(trace.abs() <= 1e-9 * scale);
                // groups partition 0..n and respect the threshold
                let threshold = DEFAULT_GROUPING_TOLERANCE * scale;
                let mut next = 0;
                for (i, g) in d.groups().iter().enumerate() {
                    prop_assert_eq!(g.start, next);
                    next = g.end;
                    if i > 0 {
                        prop_assert!(d.eigenvalues()[g.start] - d.eigenvalues()[g.start - 1] > threshold);
                    }
                }
                prop_assert_eq!(next, a.nrows());
            }

            #[test]
            fn projectors_resolve_identity(a in arb_matrix(16)) {
                let d = SpectralDecomposition::of_matrix(a.clone(), DEFAULT_GROUPING_TOLERANCE);
                let n = a.nrows();
                let mut sum = DMatrix::zeros(n, n);
                for g in 0..d.spectral_type() {
                    let p = d.projector(g).unwrap();
                    prop_assert!((&p * &p - &p).abs().max() <= 1e-10);
                    prop_assert!((&p - p.transpose()).abs().max() <= 1e-15);
                    sum += p;
                }
                prop_assert!((sum - DMatrix::identity(n, n)).abs().max() <= 1e-10);
            }
        }
    }
}
