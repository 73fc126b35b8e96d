//! Uniform-mixing scans, closed-form mixing-time sets, Cartesian-product closure
//! and average-mixing bounds.
//!
//! Non-attainment is certified numerically only: a scan reports that the distance to
//! the target stays above the tolerance over a finite window, which is evidence, not
//! proof.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::walk::{sup_distance, Distribution, QuantumWalk};

pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_STEP: f64 = 1e-3;
/// Golden-section refinement stops once the bracket is this narrow.
pub const REFINE_WIDTH: f64 = 1e-10;
/// Default distance below which a scanned time counts as a mixing time.
pub const DEFAULT_MIXING_TOLERANCE: f64 = 1e-8;
/// Absolute tolerance when intersecting mixing-time sets.
pub const TIME_MATCH_TOLERANCE: f64 = 1e-9;
/// Slack allowed on the start-vertex average bound.
pub const BOUND_SLACK: f64 = 1e-9;
// grid minima refined regardless of their coarse distance
const REFINE_BEST: usize = 64;
// products are verified at no more than this many common times
const MAX_PRODUCT_CHECKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingKind {
    Instantaneous,
    Average,
}

/// `first + k·period` for `k = 0, 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub first: f64,
    pub period: f64,
}

impl Progression {
    fn terms_until(&self, t_max: f64) -> impl Iterator<Item = f64> + '_ {
        (0..)
            .map(move |k| self.first + k as f64 * self.period)
            .take_while(move |&t| t <= t_max + TIME_MATCH_TOLERANCE)
    }

    fn contains(&self, t: f64, tol: f64) -> bool {
        if t < self.first - tol {
            return false;
        }
        let k = ((t - self.first) / self.period).round();
        (t - (self.first + k * self.period)).abs() <= tol
    }
}

/// A set of mixing times: a union of arithmetic progressions plus isolated points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MixingTimes {
    pub progressions: Vec<Progression>,
    pub points: Vec<f64>,
}

impl MixingTimes {
    pub fn is_empty(&self) -> bool {
        self.progressions.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        self.progressions.iter().any(|p| p.contains(t, tol))
            || self.points.iter().any(|&s| (s - t).abs() <= tol)
    }

    /// Sorted members in `[0, t_max]`, with near-duplicates merged.
    pub fn members_until(&self, t_max: f64) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .progressions
            .iter()
            .flat_map(|p| p.terms_until(t_max).collect::<Vec<_>>())
            .chain(self.points.iter().copied().filter(|&t| t <= t_max + TIME_MATCH_TOLERANCE))
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= TIME_MATCH_TOLERANCE);
        all
    }

    /// Members of `self` within `t_max` that also lie in `other` (within `tol`).
    pub fn intersect(&self, other: &MixingTimes, t_max: f64, tol: f64) -> Vec<f64> {
        self.members_until(t_max)
            .into_iter()
            .filter(|&t| other.contains(t, tol))
            .collect()
    }

    pub fn first(&self) -> Option<f64> {
        self.progressions
            .iter()
            .map(|p| p.first)
            .chain(self.points.iter().copied())
            .min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub t_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub kind: MixingKind,
    pub start: usize,
    pub target: Distribution,
    /// Time of the smallest distance found.
    pub best_time: Option<f64>,
    /// `max_j |p_j(best_time) − target_j|`.
    pub best_distance: Option<f64>,
    /// Earliest time at which the distance was within `tolerance`.
    pub first_mixing_time: Option<f64>,
    pub scan_window: Option<ScanWindow>,
    pub tolerance: f64,
    pub feasible: bool,
    pub mixing_times: MixingTimes,
    pub note: String,
}

impl MixingReport {
    /// Report for a closed-form mixing-time set, checked by simulating at its
    /// first member.
    pub fn from_times(g: &WeightedGraph, start: usize, times: MixingTimes, tolerance: f64, note: &str) -> Result<Self> {
        let first = times
            .first()
            .ok_or_else(|| Error::InvalidParameter("mixing-time set is empty".into()))?;
        let walk = QuantumWalk::new(g);
        let target = Distribution::uniform(g.n());
        let distance = walk.distribution_at(start, first)?.sup_distance(&target);
        let feasible = distance <= tolerance;
        Ok(Self {
            kind: MixingKind::Instantaneous,
            start,
            target,
            best_time: Some(first),
            best_distance: Some(distance),
            first_mixing_time: feasible.then_some(first),
            scan_window: None,
            tolerance,
            feasible,
            mixing_times: times,
            note: note.to_string(),
        })
    }
}

struct DistanceProbe<'a> {
    walk: &'a QuantumWalk,
    start: usize,
    target: &'a [f64],
}

impl DistanceProbe<'_> {
    fn at(&self, t: f64) -> f64 {
        sup_distance(&self.walk.probabilities(self.start, t), self.target)
    }

    // Golden-section search on [lo, hi]; returns (t, distance).
    fn refine(&self, mut lo: f64, mut hi: f64) -> (f64, f64) {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (self.at(x1), self.at(x2));
        while hi - lo > REFINE_WIDTH {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = self.at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = self.at(x2);
            }
        }
        if f1 <= f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    }
}

/// Scans `t ∈ [0, t_max]` on a grid of spacing `step` for the sup-norm distance to
/// the uniform distribution, refining grid minima by golden-section search.
pub fn uniform_mixing_scan(g: &WeightedGraph, start: usize, t_max: f64, step: f64, tolerance: f64) -> Result<MixingReport> {
    let target = Distribution::uniform(g.n());
    scan_distance(g, start, &target, t_max, step, tolerance)
}

/// [`uniform_mixing_scan`] for an arbitrary target distribution.
pub fn scan_distance(
    g: &WeightedGraph,
    start: usize,
    target: &Distribution,
    t_max: f64,
    step: f64,
    tolerance: f64,
) -> Result<MixingReport> {
    for (name, v) in [("t_max", t_max), ("step", step), ("tolerance", tolerance)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if start >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: start, n: g.n() });
    }
    if target.len() != g.n() {
        return Err(Error::InvalidDistribution(format!(
            "target has {} entries, graph has {} vertices",
            target.len(),
            g.n()
        )));
    }

    let walk = QuantumWalk::new(g);
    let probe = DistanceProbe {
        walk: &walk,
        start,
        target: target.probs(),
    };
    let count = (t_max / step * (1.0 + 1e-12)).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).into_par_iter().map(|i| probe.at(i as f64 * step)).collect();

    let mut minima: Vec<usize> = (0..count)
        .filter(|&i| (i == 0 || grid[i] <= grid[i - 1]) && (i + 1 == count || grid[i] <= grid[i + 1]))
        .collect();
    // any time within `tolerance` lies within one step of a grid point whose
    // distance is at most tolerance + step * (largest rate of change of p)
    let rate = 2.0 * walk.decomposition().spectral_radius();
    let near = tolerance + rate * step;
    minima.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let selected: Vec<usize> = minima
        .iter()
        .enumerate()
        .filter(|&(rank, &i)| rank < REFINE_BEST || grid[i] <= near)
        .map(|(_, &i)| i)
        .collect();

    let mut refined: Vec<(f64, f64)> = selected
        .par_iter()
        .map(|&i| {
            let lo = if i == 0 { 0.0 } else { (i - 1) as f64 * step };
            let hi = ((i + 1) as f64 * step).min(t_max);
            let (t, d) = probe.refine(lo, hi.max(lo));
            let grid_t = i as f64 * step;
            if d <= grid[i] {
                (t, d)
            } else {
                (grid_t, grid[i])
            }
        })
        .collect();
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (best_time, best_distance) = refined
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid has at least one point");
    let mut points: Vec<f64> = refined.iter().filter(|r| r.1 <= tolerance).map(|r| r.0).collect();
    points.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * step);
    let feasible = best_distance <= tolerance;
    let note = if feasible {
        format!("distance within {tolerance:e} found by scan")
    } else {
        format!(
            "distance stayed above {tolerance:e} on [0, {t_max}] (grid step {step:e}, refined); numerical evidence, not a proof"
        )
    };
    Ok(MixingReport {
        kind: MixingKind::Instantaneous,
        start,
        target: target.clone(),
        best_time: Some(best_time),
        best_distance: Some(best_distance),
        first_mixing_time: points.first().copied(),
        scan_window: Some(ScanWindow { t_max, step }),
        tolerance,
        feasible,
        mixing_times: MixingTimes {
            progressions: Vec::new(),
            points,
        },
        note,
    })
}

/// Uniform-mixing condition `(4/n)·sin²(t·n/(2(n−1))) = 1` for `K_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompleteGraphCondition {
    pub n: usize,
    /// Required value `n/4` of the squared sine.
    pub required_sin_sq: f64,
    pub feasible: bool,
    /// Scale `1/(n−1)` applied to the adjacency matrix in the condition.
    pub hamiltonian_scale: f64,
    pub times: MixingTimes,
}

/// Solves the `K_n` uniform-mixing condition.
///
/// The condition is stated for the walk driven by `A/(n−1)`; for `n ≤ 4` every
/// returned time is also a uniform-mixing time of the walk driven by `A` itself.
pub fn complete_graph_uniform_condition(n: usize) -> Result<CompleteGraphCondition> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let required = n as f64 / 4.0;
    let feasible = required <= 1.0;
    let mut times = MixingTimes::default();
    if feasible {
        // sin²θ = n/4 with θ = t·n/(2(n−1))
        let c = 2.0 * (n - 1) as f64 / n as f64;
        let theta = required.sqrt().asin();
        times.progressions.push(Progression {
            first: theta * c,
            period: PI * c,
        });
        if (PI - 2.0 * theta).abs() > 1e-12 {
            times.progressions.push(Progression {
                first: (PI - theta) * c,
                period: PI * c,
            });
        }
    }
    Ok(CompleteGraphCondition {
        n,
        required_sin_sq: required,
        feasible,
        hamiltonian_scale: 1.0 / (n - 1) as f64,
        times,
    })
}

/// Uniform-mixing times of the unweighted `Q_d`, `d ≥ 1`: `π/4 + kπ/2` (each
/// `K_2` factor is uniform when `cos²t = 1/2`).
pub fn hypercube_mixing_times(dim: u32) -> Result<MixingTimes> {
    if dim == 0 {
        return Err(Error::InvalidParameter("hypercube dimension must be >= 1".into()));
    }
    Ok(MixingTimes {
        progressions: vec![Progression {
            first: FRAC_PI_4,
            period: FRAC_PI_2,
        }],
        points: Vec::new(),
    })
}

/// Uniform-mixing times of the unweighted claw `K_{1,n}` from its center:
/// `cos²(√n·t) = 1/(n+1)`.
pub fn claw_center_mixing_times(leaves: usize) -> Result<MixingTimes> {
    if leaves == 0 {
        return Err(Error::InvalidParameter("a claw needs at least one leaf".into()));
    }
    let root = (leaves as f64).sqrt();
    let a = (1.0 / ((leaves + 1) as f64).sqrt()).acos();
    let period = PI / root;
    let mut progressions = vec![Progression { first: a / root, period }];
    if (PI - 2.0 * a).abs() > 1e-12 {
        progressions.push(Progression {
            first: (PI - a) / root,
            period,
        });
    }
    Ok(MixingTimes {
        progressions,
        points: Vec::new(),
    })
}

/// Checks uniform mixing of `g ⊕ h` at the common mixing times of the factors.
///
/// The product walk from `(g_start, h_start)` factorizes, so every common
/// uniform-mixing time of the factors is one of the product. Each candidate is
/// confirmed by direct simulation on the product graph. An empty intersection is
/// reported as not established, never as a disproof.
pub fn product_uniform_mixing(
    g: &WeightedGraph,
    g_report: &MixingReport,
    h: &WeightedGraph,
    h_report: &MixingReport,
    t_max: f64,
    tolerance: f64,
) -> Result<MixingReport> {
    if g_report.start >= g.n() || h_report.start >= h.n() {
        return Err(Error::InvalidParameter("factor report start vertex out of range".into()));
    }
    let product = g.cartesian_product(h);
    let start = g_report.start * h.n() + h_report.start;
    let target = Distribution::uniform(product.n());
    let common = g_report
        .mixing_times
        .intersect(&h_report.mixing_times, t_max, TIME_MATCH_TOLERANCE);

    if common.is_empty() {
        return Ok(MixingReport {
            kind: MixingKind::Instantaneous,
            start,
            target,
            best_time: None,
            best_distance: None,
            first_mixing_time: None,
            scan_window: None,
            tolerance,
            feasible: false,
            mixing_times: MixingTimes::default(),
            note: format!("no common mixing time of the factors in [0, {t_max}]; uniform mixing not established"),
        });
    }

    let walk = QuantumWalk::new(&product);
    let checked: Vec<(f64, f64)> = common
        .iter()
        .take(MAX_PRODUCT_CHECKS)
        .map(|&t| Ok((t, walk.distribution_at(start, t)?.sup_distance(&target))))
        .collect::<Result<_>>()?;
    let (best_time, best_distance) = checked
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one common time");
    let verified: Vec<f64> = checked.iter().filter(|c| c.1 <= tolerance).map(|c| c.0).collect();
    let feasible = !verified.is_empty();
    Ok(MixingReport {
        kind: MixingKind::Instantaneous,
        start,
        target,
        best_time: Some(best_time),
        best_distance: Some(best_distance),
        first_mixing_time: verified.first().copied(),
        scan_window: None,
        tolerance,
        feasible,
        mixing_times: MixingTimes {
            progressions: Vec::new(),
            points: verified,
        },
        note: format!(
            "{} common factor mixing time(s) in [0, {t_max}], {} checked by simulation on the product",
            common.len(),
            checked.len()
        ),
    })
}

/// Start-vertex average probabilities against the `1/τ(G)` lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageBound {
    pub n: usize,
    pub spectral_type: usize,
    pub lower_bound: f64,
    /// Average probability of returning to `v` for the walk started at `v`.
    pub start_probabilities: Vec<f64>,
    pub min_start_probability: f64,
    pub max_start_probability: f64,
    pub bound_holds: bool,
    /// Constant `c` in the almost-uniform criterion `p̄_j ≤ c/n`.
    pub almost_uniform_constant: f64,
    /// True when `1/τ > c/n`, so no start vertex can be average almost-uniform.
    pub almost_uniform_excluded: bool,
    pub grouping_tolerance: f64,
}

pub fn average_mixing_bound(g: &WeightedGraph, almost_uniform_constant: f64) -> Result<AverageBound> {
    average_mixing_bound_with(&QuantumWalk::new(g), almost_uniform_constant)
}

pub fn average_mixing_bound_with(walk: &QuantumWalk, almost_uniform_constant: f64) -> Result<AverageBound> {
    if !(almost_uniform_constant.is_finite() && almost_uniform_constant > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "almost-uniform constant must be positive, got {almost_uniform_constant}"
        )));
    }
    let n = walk.n();
    let tau = walk.decomposition().spectral_type();
    let lower_bound = 1.0 / tau as f64;
    let start_probabilities = (0..n)
        .map(|v| Ok(walk.average_distribution(v)?.distribution[v]))
        .collect::<Result<Vec<f64>>>()?;
    let min = start_probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    let max = start_probabilities.iter().copied().fold(0.0, f64::max);
    Ok(AverageBound {
        n,
        spectral_type: tau,
        lower_bound,
        start_probabilities,
        min_start_probability: min,
        max_start_probability: max,
        bound_holds: min >= lower_bound - BOUND_SLACK,
        almost_uniform_constant,
        almost_uniform_excluded: lower_bound > almost_uniform_constant / n as f64,
        grouping_tolerance: walk.decomposition().grouping_tolerance(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AverageReachability {
    /// The target gives the start vertex less mass than the walk keeps there on average.
    Unreachable,
    /// Not excluded by the start-vertex bound; reachability is not decided.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageVerdict {
    pub verdict: AverageReachability,
    pub start: usize,
    pub target_start_mass: f64,
    pub spectral_type: usize,
    pub lower_bound: f64,
    pub average_start_probability: f64,
    /// Target start mass is below `1/n`, which no choice of weights can reach.
    pub unreachable_for_all_weights: bool,
}

/// Decides whether `target` is excluded as an average distribution of the walk
/// from `start`. Only negative verdicts are ever issued.
pub fn average_universal_verdict(g: &WeightedGraph, start: usize, target: &Distribution, tolerance: f64) -> Result<AverageVerdict> {
    if target.len() != g.n() {
        return Err(Error::InvalidDistribution(format!(
            "target has {} entries, graph has {} vertices",
            target.len(),
            g.n()
        )));
    }
    let walk = QuantumWalk::new(g);
    let avg = walk.average_distribution(start)?;
    let lower_bound = 1.0 / avg.spectral_type as f64;
    let mass = target[start];
    let verdict = if mass < lower_bound - tolerance {
        AverageReachability::Unreachable
    } else {
        AverageReachability::Undetermined
    };
    Ok(AverageVerdict {
        verdict,
        start,
        target_start_mass: mass,
        spectral_type: avg.spectral_type,
        lower_bound,
        average_start_probability: avg.distribution[start],
        unreachable_for_all_weights: mass < 1.0 / g.n() as f64 - tolerance,
    })
}
