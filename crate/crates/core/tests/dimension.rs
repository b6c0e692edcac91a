use num_bigint::BigUint;

use selfsim::dimension::*;
use selfsim::symbolic::{BiSequence, SymbolicSystem};
use selfsim::torus::{ToralSystem, TorusPoint};

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

#[test]
fn exact_cov_examples() {
    let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
    for n in 1..10 {
        let c = s.exact_cov(2f64.powi(-n)).unwrap();
        assert_eq!(c, BigUint::from(2u32).pow(2 * n as u32 + 3));
    }
    assert_eq!(s.exact_cov(2.0).unwrap(), BigUint::from(2u32));
    let g = SymbolicSystem::golden_mean(2.0).unwrap();
    assert_eq!(g.exact_cov(0.5).unwrap(), BigUint::from(13u32));
}

#[test]
fn grid_cover_within_packing_factor() {
    let cat = ToralSystem::cat_map();
    let grid = GridSample::with_side(&cat, 317);
    assert!(grid.len() >= 100_000);
    let b = cov_eps_sample(&cat, &grid, 0.1).unwrap();
    assert!(b.packing_lower <= b.greedy_upper);
    // index-order greedy with tilted square balls lands near 4.4 here
    assert!((b.greedy_upper as f64) <= 5.0 * b.packing_lower as f64, "{b:?}");
    assert!(matches!(cov_eps_sample(&cat, &grid, 0.005), Err(selfsim::Error::SampleTooSparse { .. })));
}

#[test]
fn capacity_times_log_lambda_is_invariant() {
    let ent = 2.0 * 2f64.ln();
    let scales = symbolic_scales;
    for lambda in [2.0, 3.0, 4.0] {
        let s = SymbolicSystem::full_shift(2, lambda).unwrap();
        let (_, fit) = capacity_symbolic(&s, &Subset::Whole, &scales(lambda)).unwrap();
        let product = fit.slope * lambda.ln();
        assert!((product / ent - 1.0).abs() < 0.02, "λ = {lambda}: {product}");
    }
    for lambda in [2.0, 3.0] {
        let g = SymbolicSystem::golden_mean(lambda).unwrap();
        let (_, fit) = capacity_symbolic(&g, &Subset::Whole, &scales(lambda)).unwrap();
        assert!((fit.slope * lambda.ln() / (2.0 * phi().ln()) - 1.0).abs() < 0.02, "λ = {lambda}: {}", fit.slope);
    }
    let s = SymbolicSystem::full_shift(2, 4.0).unwrap();
    let (_, fit) = capacity_symbolic(&s, &Subset::Whole, &default_symbolic_scales()).unwrap();
    assert!((fit.slope - 1.0).abs() < 0.02);
}

#[test]
fn one_sided_entropies_agree() {
    for s in [SymbolicSystem::full_shift(2, 2.0).unwrap(), SymbolicSystem::golden_mean(2.0).unwrap()] {
        let r = entropy_symbolic(&s, &Subset::Whole, 12).unwrap();
        assert_eq!(r.forward, r.backward);
        assert!((r.two_sided - 2.0 * r.forward).abs() / r.two_sided < 0.01);
    }
    let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
    let r = entropy_symbolic(&s, &Subset::Whole, 8).unwrap();
    assert!((r.two_sided - 2.0 * 2f64.ln()).abs() < 1e-12 && (r.forward - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn golden_mean_local_unstable_entropy_is_homogeneous() {
    let g = SymbolicSystem::golden_mean(2.0).unwrap();
    for b in [0, 1] {
        let x = BiSequence::constant_with(0, &[(1, b)]);
        let h = local_unstable_entropy_symbolic(&g, &x, 16).unwrap();
        assert!((h / phi().ln() - 1.0).abs() < 0.01, "x(1) = {b}: {h}");
    }
    let full = SymbolicSystem::full_shift(2, 2.0).unwrap();
    let h = local_unstable_entropy_symbolic(&full, &BiSequence::constant(1), 10).unwrap();
    assert!((h - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn homogeneity_spread_shrinks_with_horizon() {
    let g = SymbolicSystem::golden_mean(2.0).unwrap();
    let xs: Vec<BiSequence> = (0..6).map(|k| BiSequence::constant_with(0, &[(1, k % 2), (3, (k / 2) % 2)])).collect();
    let short = unstable_homogeneity_symbolic(&g, &xs, 6).unwrap();
    let long = unstable_homogeneity_symbolic(&g, &xs, 16).unwrap();
    assert!(long.spread <= short.spread);
    assert!(long.spread < 0.01);
}

#[test]
fn cat_map_local_unstable_entropy() {
    let cat = ToralSystem::cat_map();
    let h = local_unstable_entropy_toral(&cat, &TorusPoint::new(0.2, 0.6), 8).unwrap();
    assert!((h / cat.lambda().ln() - 1.0).abs() < 0.1);
}

#[test]
fn toral_cov_identity_brackets_overlap() {
    let cat = ToralSystem::cat_map();
    for row in cov_identity_toral(&cat, [0, 1]).unwrap() {
        assert!(row.overlap, "{row:?}");
    }
}

#[test]
fn ideal_factor_of_cat_map() {
    let cat = ToralSystem::cat_map();
    let ent = 2.0 * cat.lambda().ln();
    assert!((ideal_factor(ent, 2).unwrap() - 2.618034).abs() < 1e-6);
    assert!(dimension_bound(ent, 2, cat.lambda(), 1e-12).unwrap().holds);
}
