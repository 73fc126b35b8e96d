//! Closed-form inverse mixing solvers.
//!
//! Given a target distribution, each solver returns non-negative edge weights and a
//! time `t` at which the walk from the chosen start vertex has exactly that
//! instantaneous distribution. Everything reduces to the weighted three-vertex path
//! `LEFT - MIDDLE - RIGHT` with weights `(1, α)`:
//!
//! * start at LEFT: `p_left = (1 − 2Γ)²`, `p_middle = 4Γ(1 − ΓΔ²)`,
//!   `p_right = α²(2Γ)²` with `Δ = √(1 + α²)` and `Γ = sin²(Δt/2)/Δ²`;
//! * start at MIDDLE: `p_middle = cos²(Δt)` and the outer vertices share
//!   `sin²(Δt)` in proportion to their squared weights.
//!
//! Claws and complete multipartite graphs collapse onto that path: the start vertex
//! is LEFT, a weighted superposition over the opposite side is MIDDLE and a weighted
//! superposition over the rest of the start's side is RIGHT. Every vertex amplitude
//! stays proportional to its coefficient in its cell vector, so the per-vertex
//! targets are written into the weights and the path problem fixes the time.
//!
//! Every solver self-verifies by simulating the returned graph; a residual above
//! [`RESIDUAL_LIMIT`] is reported as [`Error::ResidualExceeded`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{multipartite_cells, Family, WeightedGraph};
use crate::spectral::{SpectralDecomposition, DEFAULT_GROUPING_TOLERANCE};
use crate::walk::{Distribution, QuantumWalk, WalkState};

/// Largest accepted sup-norm gap between achieved and target distributions.
pub const RESIDUAL_LIMIT: f64 = 1e-9;
/// Largest invariance residual for which a collapse counts as exact.
pub const COLLAPSE_LIMIT: f64 = 1e-9;
const ORTHONORMAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum P3Start {
    Left,
    Middle,
    Right,
}

impl P3Start {
    pub fn vertex(self) -> usize {
        match self {
            P3Start::Left => 0,
            P3Start::Middle => 1,
            P3Start::Right => 2,
        }
    }
}

/// Weights, time and verification data returned by every solver.
#[derive(Debug, Clone)]
pub struct MixingSolution {
    pub family: Family,
    pub graph: WeightedGraph,
    /// Every edge of the unweighted family member with its solved weight,
    /// including edges that were set to zero.
    pub edges: Vec<(usize, usize, f64)>,
    pub start: usize,
    pub t: f64,
    pub target: Distribution,
    pub achieved: Distribution,
    pub residual: f64,
    /// Orthonormal vectors spanning the collapsed path (LEFT, MIDDLE, RIGHT);
    /// the first is always the start vertex. Empty cells are omitted.
    pub cells: Vec<Vec<f64>>,
}

impl MixingSolution {
    fn verified(
        family: Family,
        graph: WeightedGraph,
        start: usize,
        t: f64,
        target: &Distribution,
        cells: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let template = family.build()?;
        let edges = template.edges().map(|(j, k, _)| (j, k, graph.weight(j, k))).collect();
        let achieved = QuantumWalk::new(&graph).distribution_at(start, t)?;
        let residual = achieved.sup_distance(target);
        if !(residual <= RESIDUAL_LIMIT) {
            return Err(Error::ResidualExceeded {
                residual,
                limit: RESIDUAL_LIMIT,
            });
        }
        Ok(Self {
            family,
            graph,
            edges,
            start,
            t,
            target: target.clone(),
            achieved,
            residual,
            cells,
        })
    }

    /// Same walk with every weight multiplied by `factor` and time divided by it.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        let graph = self.graph.scaled(factor)?;
        Self::verified(
            self.family.clone(),
            graph,
            self.start,
            self.t / factor,
            &self.target,
            self.cells.clone(),
        )
    }

    /// Rescales so the largest weight is one (no-op for an edgeless solution).
    pub fn with_unit_max_weight(&self) -> Result<Self> {
        let max = self.graph.edges().map(|(_, _, w)| w).fold(0.0, f64::max);
        if max > 0.0 {
            self.rescaled(1.0 / max)
        } else {
            Ok(self.clone())
        }
    }

    pub fn collapsed(&self) -> Result<CollapsedSystem> {
        collapse(&self.graph, &self.cells)
    }

    pub fn to_report(&self) -> SolutionReport {
        SolutionReport {
            family: self.family.name().to_string(),
            n: self.graph.n(),
            start: self.start,
            t: self.t,
            residual: self.residual,
            edges: self.edges.clone(),
            target: self.target.clone(),
            achieved: self.achieved.clone(),
            cell_vectors: self.cells.clone(),
        }
    }
}

/// Serialized form of a [`MixingSolution`]. Carries `n` and `edges` in the graph
/// file layout, so it can be loaded back as a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub family: String,
    pub n: usize,
    pub start: usize,
    pub t: f64,
    pub residual: f64,
    pub edges: Vec<(usize, usize, f64)>,
    pub target: Distribution,
    pub achieved: Distribution,
    /// Orthonormal LEFT, MIDDLE, RIGHT vectors of the collapsed path.
    pub cell_vectors: Vec<Vec<f64>>,
}

fn check_len(target: &Distribution, n: usize, what: &str) -> Result<()> {
    if target.len() != n {
        return Err(Error::InvalidDistribution(format!(
            "{what} needs {n} target entries, got {}",
            target.len()
        )));
    }
    Ok(())
}

fn basis(n: usize, v: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[v] = 1.0;
    e
}

/// Start-at-LEFT solution on the path with weights `(1, α)`: returns `(α, t)` with
/// `p_left = p_l`, `p_right = p_r` and `p_middle = 1 − p_l − p_r`.
///
/// Uses the branch `1 − 2Γ = +√p_l`, which makes `ΓΔ² = (1−√p_l)/2 + p_r/(2(1−√p_l))`
/// lie in `[0, 1]` for every valid triple.
pub(crate) fn path_from_end(p_l: f64, p_r: f64) -> (f64, f64) {
    let s = p_l.max(0.0).sqrt().min(1.0);
    let gap = 1.0 - s;
    if gap <= f64::EPSILON {
        return (1.0, 0.0);
    }
    let alpha = p_r.max(0.0).sqrt() / gap;
    let delta = (1.0 + alpha * alpha).sqrt();
    let gamma_delta_sq = (gap / 2.0 + p_r.max(0.0) / (2.0 * gap)).clamp(0.0, 1.0);
    let t = 2.0 / delta * gamma_delta_sq.sqrt().asin();
    (alpha, t)
}

/// Start-at-MIDDLE solution: weights `(√p_l, √p_r)` and the time with
/// `cos²(Δt) = p_middle`.
pub(crate) fn path_from_middle(p_l: f64, p_r: f64) -> (f64, f64, f64) {
    let (a, b) = (p_l.max(0.0).sqrt(), p_r.max(0.0).sqrt());
    let delta = (a * a + b * b).sqrt();
    if delta == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    (a, b, delta.min(1.0).asin() / delta)
}

/// Weighted `P3` (vertices `0 - 1 - 2`).
pub fn solve_p3(target: &Distribution, start: P3Start) -> Result<MixingSolution> {
    check_len(target, 3, "P3")?;
    let p = target.probs();
    let mut g = WeightedGraph::new(3)?;
    let t = match start {
        P3Start::Left | P3Start::Right => {
            let (near, far, first, second) = if start == P3Start::Left {
                (p[0], p[2], (0, 1), (1, 2))
            } else {
                (p[2], p[0], (1, 2), (0, 1))
            };
            let (alpha, t) = path_from_end(near, far);
            g.insert_weight(first.0, first.1, 1.0)?;
            g.insert_weight(second.0, second.1, alpha)?;
            t
        }
        P3Start::Middle => {
            let (a, b, t) = path_from_middle(p[0], p[2]);
            g.insert_weight(0, 1, a)?;
            g.insert_weight(1, 2, b)?;
            t
        }
    };
    let v = start.vertex();
    let mut cells = vec![basis(3, v)];
    cells.extend((0..3).filter(|&u| u != v).map(|u| basis(3, u)));
    MixingSolution::verified(Family::Path(3), g, v, t, target, cells)
}

/// Weighted claw `K_{1,n}` with center `0` and leaves `1..=n`; `target[v]` is the
/// target mass of vertex `v`.
pub fn solve_claw(target: &Distribution, start: usize) -> Result<MixingSolution> {
    let n_total = target.len();
    if n_total < 2 {
        return Err(Error::InvalidDistribution("a claw needs at least 2 vertices".into()));
    }
    if start >= n_total {
        return Err(Error::VertexOutOfRange { vertex: start, n: n_total });
    }
    let leaves = n_total - 1;
    let p = target.probs();
    let mut g = WeightedGraph::new(n_total)?;

    if start == 0 {
        let delta = p[1..].iter().sum::<f64>().sqrt();
        for k in 1..=leaves {
            g.insert_weight(0, k, p[k].sqrt())?;
        }
        let mut cells = vec![basis(n_total, 0)];
        let t = if delta > 0.0 {
            let mut right = vec![0.0; n_total];
            for k in 1..=leaves {
                right[k] = p[k].sqrt() / delta;
            }
            cells.push(right);
            delta.min(1.0).asin() / delta
        } else {
            0.0
        };
        return MixingSolution::verified(Family::Claw(leaves), g, 0, t, target, cells);
    }

    // start at a leaf: LEFT = start, MIDDLE = center, RIGHT = the other leaves
    let rest: Vec<usize> = (1..=leaves).filter(|&k| k != start).collect();
    let rest_mass: f64 = rest.iter().map(|&k| p[k]).sum();
    let (alpha, t) = path_from_end(p[start], rest_mass);
    g.insert_weight(start, 0, 1.0)?;
    let mut cells = vec![basis(n_total, start), basis(n_total, 0)];
    if rest_mass > 0.0 {
        let mut right = vec![0.0; n_total];
        for &k in &rest {
            right[k] = (p[k] / rest_mass).sqrt();
            g.insert_weight(0, k, alpha * right[k])?;
        }
        cells.push(right);
    }
    MixingSolution::verified(Family::Claw(leaves), g, start, t, target, cells)
}

/// Weighted complete bipartite `K_{m,n}` with part `A = 0..m` and `B = m..m+n`.
/// The start may lie in either part.
pub fn solve_bipartite(m: usize, n: usize, target: &Distribution, start: usize) -> Result<MixingSolution> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "K_{{m,n}} needs m, n >= 1, got m={m}, n={n}"
        )));
    }
    solve_complete_multipartite(vec![m, n], target, start)
}

/// Weighted complete `k`-partite graph, cells laid out consecutively in `parts`
/// order.
///
/// All edges among the cells other than the start's are set to zero, leaving the
/// complete bipartite graph between the start's cell and the union of the rest.
pub fn solve_multipartite(parts: &[usize], target: &Distribution, start: usize) -> Result<MixingSolution> {
    if parts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 parts, got {}",
            parts.len()
        )));
    }
    if parts.contains(&0) {
        return Err(Error::InvalidParameter("part sizes must be >= 1".into()));
    }
    solve_complete_multipartite(parts.to_vec(), target, start)
}

fn solve_complete_multipartite(parts: Vec<usize>, target: &Distribution, start: usize) -> Result<MixingSolution> {
    let n_total: usize = parts.iter().sum();
    check_len(target, n_total, "complete multipartite graph")?;
    if start >= n_total {
        return Err(Error::VertexOutOfRange { vertex: start, n: n_total });
    }
    let cells = multipartite_cells(&parts);
    let own = cells.iter().find(|c| c.contains(&start)).expect("cells cover all vertices");
    let same_side: Vec<usize> = own.iter().copied().filter(|&v| v != start).collect();
    let other_side: Vec<usize> = (0..n_total).filter(|v| !own.contains(v)).collect();

    let p = target.probs();
    let middle_mass: f64 = other_side.iter().map(|&v| p[v]).sum();
    let right_mass: f64 = same_side.iter().map(|&v| p[v]).sum();
    let (alpha, path_t) = path_from_end(p[start], right_mass);

    // MIDDLE cell over the other side; when it must end up empty any unit vector
    // works, since only its amplitude (zero at the mixing time) is constrained.
    let mut middle = vec![0.0; n_total];
    let scale = if middle_mass > 0.0 {
        for &v in &other_side {
            middle[v] = (p[v] / middle_mass).sqrt();
        }
        middle_mass.sqrt()
    } else {
        let u = 1.0 / (other_side.len() as f64).sqrt();
        for &v in &other_side {
            middle[v] = u;
        }
        1.0
    };
    let mut right = vec![0.0; n_total];
    if right_mass > 0.0 {
        for &v in &same_side {
            right[v] = (p[v] / right_mass).sqrt();
        }
    }

    let mut g = WeightedGraph::new(n_total)?;
    for &b in &other_side {
        g.insert_weight(start, b, scale * middle[b])?;
        for &c in &same_side {
            g.insert_weight(b, c, scale * alpha * middle[b] * right[c])?;
        }
    }

    let mut cell_vectors = vec![basis(n_total, start), middle];
    if right_mass > 0.0 {
        cell_vectors.push(right);
    }
    MixingSolution::verified(
        Family::CompleteMultipartite(parts),
        g,
        start,
        path_t / scale,
        target,
        cell_vectors,
    )
}

/// Reduction of a walk onto the span of a few orthonormal cell vectors.
#[derive(Debug, Clone)]
pub struct CollapsedSystem {
    cells: Vec<Vec<f64>>,
    reduced: DMatrix<f64>,
    invariance_residual: f64,
}

impl CollapsedSystem {
    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// `ℍ[c, c'] = u_cᵀ A u_c'`.
    pub fn reduced_hamiltonian(&self) -> &DMatrix<f64> {
        &self.reduced
    }

    /// `max_c ‖A u_c − Σ_c' ℍ[c', c] u_c'‖`.
    pub fn invariance_residual(&self) -> f64 {
        self.invariance_residual
    }

    pub fn is_exact(&self) -> bool {
        self.invariance_residual <= COLLAPSE_LIMIT
    }

    /// `⟨u_c | ψ⟩` for every cell.
    pub fn project(&self, state: &WalkState) -> Vec<Complex64> {
        self.cells
            .iter()
            .map(|u| u.iter().zip(&state.amplitudes).map(|(c, z)| z * *c).sum())
            .collect()
    }

    /// Amplitudes of the reduced walk started in cell `start_cell`.
    pub fn evolve_reduced(&self, start_cell: usize, t: f64) -> Result<Vec<Complex64>> {
        let d = SpectralDecomposition::of_matrix(self.reduced.clone(), DEFAULT_GROUPING_TOLERANCE);
        Ok(QuantumWalk::from_decomposition(d).evolve(start_cell, t)?.amplitudes)
    }
}

pub fn collapse(g: &WeightedGraph, cells: &[Vec<f64>]) -> Result<CollapsedSystem> {
    let n = g.n();
    if cells.is_empty() {
        return Err(Error::InvalidParameter("at least one cell vector is required".into()));
    }
    if let Some(bad) = cells.iter().find(|c| c.len() != n) {
        return Err(Error::InvalidParameter(format!(
            "cell vector has length {}, graph has {n} vertices",
            bad.len()
        )));
    }
    let u = DMatrix::from_fn(n, cells.len(), |v, c| cells[c][v]);
    let gram = u.transpose() * &u;
    let deviation = (gram - DMatrix::identity(cells.len(), cells.len())).abs().max();
    if !(deviation <= ORTHONORMAL_LIMIT) {
        return Err(Error::NotOrthonormal(deviation));
    }
    let a = g.adjacency_matrix();
    let au = &a * &u;
    let reduced = u.transpose() * &au;
    let invariance_residual = (0..cells.len())
        .map(|c| (au.column(c) - &u * reduced.column(c)).norm())
        .fold(0.0, f64::max);
    Ok(CollapsedSystem {
        cells: cells.to_vec(),
        reduced,
        invariance_residual,
    })
}
