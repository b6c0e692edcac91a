use std::path::PathBuf;

use serde::Deserialize;
use selfsim::experiment::parse_config;
use selfsim::measure::{parry_compare, symbolic_intrinsic_exponent};
use selfsim::symbolic::{SymbolicSystem, TransitionMatrix};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

#[derive(Deserialize)]
struct Mass {
    word: Vec<u8>,
    a: String,
    b: String,
    value: f64,
}

#[derive(Deserialize)]
struct ParryFixture {
    matrix: Vec<Vec<u8>>,
    max_len: usize,
    masses: Vec<Mass>,
}

fn rational(s: &str) -> f64 {
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

fn load() -> ParryFixture {
    serde_json::from_str(&fixture("golden_mean_parry.json")).unwrap()
}

#[test]
fn exact_masses_agree_with_float_column() {
    for m in load().masses {
        let v = rational(&m.a) + rational(&m.b) * 5f64.sqrt();
        assert!((v - m.value).abs() < 1e-15, "{:?}", m.word);
    }
}

#[test]
fn parry_measure_matches_fixture() {
    let f = load();
    let m = TransitionMatrix::new(f.matrix).unwrap();
    let parry = selfsim::symbolic::ParryMeasure::new(&m).unwrap();
    for row in &f.masses {
        assert!((parry.word_mass(&row.word) - row.value).abs() < 1e-12, "{:?}", row.word);
    }
}

#[test]
fn intrinsic_box_masses_match_fixture() {
    let f = load();
    let g = SymbolicSystem::golden_mean(2.0).unwrap();
    let d = symbolic_intrinsic_exponent(&g).unwrap();
    for k in 1..=f.max_len {
        let cmp = parry_compare(&g, k, d, 12).unwrap();
        let expected: Vec<&Mass> = f.masses.iter().filter(|m| m.word.len() == k).collect();
        assert_eq!(cmp.rows.len(), expected.len());
        for row in &cmp.rows {
            let e = expected.iter().find(|m| m.word == row.word).unwrap();
            assert!((row.box_mass - e.value).abs() < 1e-9, "{:?}: {} vs {}", row.word, row.box_mass, e.value);
        }
    }
}

#[test]
fn matrix_files_parse() {
    let g = TransitionMatrix::from_text(&fixture("golden_mean.txt")).unwrap();
    assert_eq!(g, TransitionMatrix::golden_mean());
    let r = TransitionMatrix::from_json(&fixture("repeller_attractor.json")).unwrap();
    assert_eq!(r, TransitionMatrix::repeller_attractor());
    assert!(!r.is_primitive());
}

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        parse_config(&text).unwrap();
        seen += 1;
    }
    assert!(seen >= 3);
}

/// Eigen-data of the toral automorphisms and the Perron root of the shifts,
/// recomputed with an independent symmetric eigensolver.
#[test]
fn eigen_data_matches_independent_solver() {
    use nalgebra::{Matrix2, SymmetricEigen};
    use selfsim::torus::ToralSystem;

    for m in [[[2i64, 1], [1, 1]], [[3, 1], [1, 0]], [[5, 2], [2, 1]]] {
        let t = ToralSystem::new(m, None).unwrap();
        let e = SymmetricEigen::new(Matrix2::new(m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64));
        let (i_s, i_u) = if e.eigenvalues[0].abs() < e.eigenvalues[1].abs() { (0, 1) } else { (1, 0) };
        assert!((t.stable_eigenvalue() - e.eigenvalues[i_s]).abs() < 1e-12);
        assert!((t.unstable_eigenvalue() - e.eigenvalues[i_u]).abs() < 1e-12);
        for (v, i) in [(t.stable_vector(), i_s), (t.unstable_vector(), i_u)] {
            let w = e.eigenvectors.column(i);
            let cross = v[0] * w[1] - v[1] * w[0];
            assert!(cross.abs() < 1e-12 * v[0].hypot(v[1]), "{m:?}");
        }
    }
    let g = SymbolicSystem::golden_mean(2.0).unwrap();
    let e = SymmetricEigen::new(Matrix2::new(1.0, 1.0, 1.0, 0.0));
    let rho: f64 = g.matrix().spectral_radius().unwrap();
    let top: f64 = e.eigenvalues.max();
    assert!((rho - top).abs() < 1e-12);
}
