use approx::assert_relative_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selfsim::dynamics::*;
use selfsim::symbolic::{BiSequence, SymDist, SymbolicSystem};
use selfsim::torus::{EuclideanToral, SuCoords, ToralSystem, TorusPoint};

fn full_shift() -> SymbolicSystem {
    SymbolicSystem::full_shift(2, 2.0).unwrap()
}

#[test]
fn dynamical_metric_examples() {
    let s = full_shift();
    let x = BiSequence::constant(0);
    let y = BiSequence::constant_with(0, &[(3, 1)]);
    assert_eq!(s.distance(&x, &y).value(2.0), 0.25);
    assert_eq!(dyn_metric(&s, &x, &y, DynMode::two_sided(3)), SymDist::CAP);
    assert_eq!(dyn_metric(&s, &x, &y, DynMode::two_sided(3)).value(2.0), 2.0);
    // the disagreement sits in the future, so backward iterates never see it grow
    assert_eq!(dyn_metric(&s, &x, &y, DynMode::backward(3)), s.distance(&x, &y));
}

#[test]
fn symbolic_verify_example() {
    let s = full_shift();
    let pairs = vec![(BiSequence::constant(0), BiSequence::constant_with(0, &[(2, 1)]))];
    let r = verify_self_similar(&s, &pairs, 0.0);
    assert!(r.passed);
    assert_eq!(r.deviations, vec![0.0]);
}

#[test]
fn verify_lists_rejections() {
    let s = full_shift();
    let far = (BiSequence::constant(0), BiSequence::constant(1));
    let same = (BiSequence::constant(0), BiSequence::constant(0));
    let r = verify_self_similar(&s, &[far, same], 0.0);
    assert!(!r.passed);
    assert_eq!(r.checked, 0);
    assert_eq!(r.rejected.len(), 2);
    assert_eq!(r.rejected[0].reason, RejectReason::AboveExpansiveConstant);
    assert_eq!(r.rejected[1].reason, RejectReason::Coincident);
}

#[test]
fn doubling_refinement_is_the_base_below_a_quarter() {
    let base = CircleDoubling;
    let refined = refine_forward_metric(base, 2.0, 1e-9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(f64, f64)> = (0..1000)
        .map(|_| {
            let x: f64 = rand::Rng::random(&mut rng);
            let d: f64 = rand::Rng::random_range(&mut rng, 1e-6..0.25);
            (x, (x + d).rem_euclid(1.0))
        })
        .collect();
    for (x, y) in &pairs {
        assert_relative_eq!(refined.distance(x, y), base.distance(x, y), max_relative = 1e-12);
    }
    assert!(verify_forward_self_similar(&refined, &pairs, 1e-9).passed);
}

#[test]
fn clamped_shift_refinement() {
    let clamped = ClampedMetric::new(full_shift(), 0.3, 0.125).unwrap();
    let refined = refine_metric(clamped.clone(), 2.0, 1e-6).unwrap();
    assert_eq!(refined.window(), truncation_window(0.3, 2.0, 1e-6));
    let pairs = full_shift().sample_pairs(1000, 14, 11);
    let close: Vec<_> = pairs.iter().filter(|(x, y)| refined.distance(x, y) <= 0.125).cloned().collect();
    assert!(close.len() > 500);
    let r = verify_self_similar(&refined, &close, 1e-6);
    assert!(r.passed, "max deviation {}", r.max_deviation);
    let h = holder_check(&clamped, &refined, &pairs, 2.0).unwrap();
    assert_eq!(h.alpha, 1.0);
    assert!(h.violations.is_empty());
}

#[test]
fn refined_flat_cat_metric() {
    let cat = ToralSystem::cat_map();
    let refined = refine_metric(EuclideanToral::new(cat.clone(), 0.05), 1.6, 1e-6).unwrap();
    let pairs = cat.sample_pairs(0.002, 2000, 4).unwrap();
    let close: Vec<_> = pairs.iter().filter(|(x, y)| refined.distance(x, y) <= 0.05).cloned().collect();
    assert!(!close.is_empty());
    let r = verify_self_similar(&refined, &close, 1e-6);
    assert!(r.passed, "max deviation {} over {}", r.max_deviation, r.checked);
    let batches: Vec<_> = (0..4)
        .map(|k| {
            let s = 0.02 / 2f64.powi(k);
            (s, cat.sample_pairs(s, 400, k as u64).unwrap())
        })
        .collect();
    let curve = triangle_curve(&refined, &batches).unwrap();
    assert!(curve.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation), "{curve:?}");
}

#[test]
fn symbolic_contraction_examples() {
    let s = full_shift();
    let x = BiSequence::constant(0);
    let stable = BiSequence::constant_with(0, &[(-5, 1)]);
    let r = stable_contraction_check(&s, &x, &stable, LocalBranch::Stable, 3).unwrap();
    assert_eq!(r.ratios, vec![1.0, 1.0, 1.0]);
    assert_eq!(r.max_deviation, 0.0);
    let unstable = BiSequence::constant_with(0, &[(5, 1)]);
    let r = stable_contraction_check(&s, &x, &unstable, LocalBranch::Unstable, 3).unwrap();
    assert_eq!(r.ratios, vec![1.0, 1.0, 1.0]);
    // the wrong branch separates the pair
    assert!(stable_contraction_check(&s, &x, &unstable, LocalBranch::Stable, 8).is_err());
}

#[test]
fn symbolic_contraction_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for s in [full_shift(), SymbolicSystem::golden_mean(2.0).unwrap()] {
        for _ in 0..1000 {
            let level = rand::Rng::random_range(&mut rng, 1..10u32);
            let (x, y) = s.random_stable_pair(level, &mut rng);
            if x == y {
                continue;
            }
            // within the horizon the pair stays inside W^s_ξ
            let r = stable_contraction_check(&s, &x, &y, LocalBranch::Stable, level + 6).unwrap();
            assert_eq!(r.max_deviation, 0.0);
            let (x, y) = s.random_unstable_pair(level, &mut rng);
            if x == y {
                continue;
            }
            let r = stable_contraction_check(&s, &x, &y, LocalBranch::Unstable, level + 6).unwrap();
            assert_eq!(r.max_deviation, 0.0);
        }
    }
}

#[test]
fn toral_contraction() {
    let cat = ToralSystem::cat_map();
    let [a, b] = cat.stable_vector();
    let norm = (a * a + b * b).sqrt();
    let x = TorusPoint::new(0.3, 0.7);
    let y = x.offset([1e-4 * a / norm, 1e-4 * b / norm]);
    let r = stable_contraction_check(&cat, &x, &y, LocalBranch::Stable, 5).unwrap();
    assert!(r.max_deviation < 1e-9, "{r:?}");
    let [a, b] = cat.unstable_vector();
    let y = x.offset([1e-4 * a, 1e-4 * b]);
    let r = forward_expansion_check(&cat, &x, &y, false).unwrap();
    assert!(r.max_deviation < 1e-9);
}

#[test]
fn triangle_splice_example() {
    let s = full_shift();
    let x = BiSequence::constant_with(0, &[(3, 1)]);
    let y = BiSequence::constant_with(0, &[(-3, 1)]);
    assert_eq!(s.bracket(&x, &y).unwrap(), BiSequence::constant_with(0, &[(3, 1), (-3, 1)]));
    // the triangle vertex W^u(x) ∩ W^s(y) keeps the past of x and the future of y
    assert_eq!(s.bracket(&y, &x).unwrap(), BiSequence::constant(0));
    let t = triangle_ratio(&s, &x, &y).unwrap();
    assert_eq!((t.a, t.b, t.c0), (0.25, 0.25, 0.25));
    assert_eq!(t.ratio, Some(1.0));
    assert_eq!(t.deviation, Some(0.0));
}

#[test]
fn toral_triangles_at_small_scale() {
    let cat = ToralSystem::cat_map();
    for (x, y) in cat.sample_pairs(1e-3, 2000, 8).unwrap() {
        let t = triangle_ratio(&cat, &x, &y).unwrap();
        assert!(t.deviation.unwrap() < 1e-9);
    }
}

#[test]
fn symbolic_holonomy_example() {
    let s = full_shift();
    // p, q share the past and differ at index 6; r differs from p only at index -8
    let p = BiSequence::constant(0);
    let q = BiSequence::constant_with(0, &[(6, 1)]);
    let r = BiSequence::constant_with(0, &[(-8, 1)]);
    let (pp, pq) = (holonomy_project(&s, &p, &r).unwrap(), holonomy_project(&s, &q, &r).unwrap());
    assert_eq!(pp, r);
    let h = holonomy_deviation(&s, &p, &q, &pp, &pq).unwrap();
    assert_eq!(h.observed, 0.0);
    assert!(h.within_bound);
}

#[test]
fn toral_holonomy_bound() {
    let cat = ToralSystem::cat_map();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let xi = cat.xi();
    for _ in 0..500 {
        let p = cat.random_point(&mut rng);
        let q = p.offset(cat.from_su(SuCoords { s: 0.0, u: xi * 2f64.powi(-10) }));
        let r = p.offset(cat.from_su(SuCoords { s: xi / 10.0, u: xi / 20.0 }));
        let (pp, pq) = (holonomy_project(&cat, &p, &r).unwrap(), holonomy_project(&cat, &q, &r).unwrap());
        let h = holonomy_deviation(&cat, &p, &q, &pp, &pq).unwrap();
        let m = (10.0 * 2f64.ln() / cat.lambda().ln()).floor() as i32;
        assert!((h.m - m).abs() <= 1, "m = {}", h.m);
        assert!(h.within_bound && h.observed < 1e-9);
    }
}
