#[path = "../src/oracle.rs"]
mod oracle;

use ctqw_core::analysis::{self, MixingReport};
use ctqw_core::graph::GraphFile;
use ctqw_core::solvers::{self, SolutionReport};
use ctqw_core::{Distribution, Family, QuantumWalk};

#[test]
fn solution_report_loads_as_graph() {
    let target = Distribution::new(vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
    let sol = solvers::solve_bipartite(2, 3, &target, 1).unwrap();
    let text = serde_json::to_string(&sol.to_report()).unwrap();
    let back: SolutionReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, sol.to_report());

    let g = GraphFile::from_json(&text).unwrap().to_graph().unwrap();
    assert_eq!(g, sol.graph);
    let p = oracle::probabilities(&oracle::series_evolve(&g.adjacency_matrix(), back.start, back.t));
    let err = p.iter().zip(target.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9);
}

#[test]
fn graph_file_on_disk() {
    let dir = std::env::temp_dir().join(format!("ctqw-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c6.json");
    let file = Family::Cycle(6).build().unwrap().to_file();
    std::fs::write(&path, file.to_json().unwrap()).unwrap();
    let g = GraphFile::load(&path).unwrap().to_graph().unwrap();
    assert_eq!(g, Family::Cycle(6).build().unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn spectral_walk_matches_series_oracle() {
    let g = Family::Circulant { n: 7, connections: vec![1, -1, 2, -2] }.build().unwrap();
    let walk = QuantumWalk::new(&g);
    for t in [0.3, 1.7, 12.5] {
        let spectral = walk.evolve(2, t).unwrap();
        let series = oracle::series_evolve(&g.adjacency_matrix(), 2, t);
        let err = spectral
            .amplitudes
            .iter()
            .zip(&series)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "t = {t}: {err}");
    }
}

#[test]
fn mixing_report_round_trip() {
    let g = Family::Hypercube(2).build().unwrap();
    let report = MixingReport::from_times(&g, 0, analysis::hypercube_mixing_times(2).unwrap(), 1e-10, "Q2").unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: MixingReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn k4_normalized_times_inside_unnormalized_set() {
    let g = Family::Complete(4).build().unwrap();
    let scan = analysis::uniform_mixing_scan(&g, 0, 12.0, 1e-3, 1e-8).unwrap();
    let closed = analysis::complete_graph_uniform_condition(4).unwrap();
    for t in closed.times.members_until(12.0) {
        assert!(scan.mixing_times.contains(t, 1e-6), "{t} missing from scan");
    }
}
