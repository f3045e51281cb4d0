use proptest::prelude::*;

use qmac::channels::NoiseParameter;
use qmac::cmac::{self, ClassicalMac};
use qmac::regions::{self, convex_hull, minkowski_sum, RatePoint, RateRegion2D, SamplingConfig};
use qmac::sampling::stream;
use qmac::search::SearchConfig;

fn point() -> impl Strategy<Value = RatePoint> {
    (0.0..4.0f64, 0.0..4.0f64).prop_map(|(a, b)| [a, b])
}

fn region() -> impl Strategy<Value = RateRegion2D> {
    prop::collection::vec(point(), 1..9).prop_map(|pts| convex_hull(&pts).unwrap())
}

/// Hull of all pairwise vertex sums.
fn brute_sum(p: &RateRegion2D, q: &RateRegion2D) -> RateRegion2D {
    let pts: Vec<RatePoint> =
        p.vertices().iter().flat_map(|a| q.vertices().iter().map(move |b| [a[0] + b[0], a[1] + b[1]])).collect();
    convex_hull(&pts).unwrap()
}

proptest! {
    #[test]
    fn minkowski_matches_pairwise_hull(p in region(), q in region()) {
        let fast = minkowski_sum(&p, &q);
        prop_assert!(regions::hausdorff_distance(&fast, &brute_sum(&p, &q)) < 1e-9);
    }

    #[test]
    fn minkowski_commutes_and_associates(p in region(), q in region(), r in region()) {
        prop_assert!(regions::hausdorff_distance(&minkowski_sum(&p, &q), &minkowski_sum(&q, &p)) < 1e-9);
        let left = minkowski_sum(&minkowski_sum(&p, &q), &r);
        let right = minkowski_sum(&p, &minkowski_sum(&q, &r));
        prop_assert!(regions::hausdorff_distance(&left, &right) < 1e-9);
    }

    #[test]
    fn minkowski_area_is_superadditive(p in region(), q in region()) {
        prop_assert!(minkowski_sum(&p, &q).area() + 1e-9 >= p.area() + q.area());
    }

    #[test]
    fn hull_is_canonical(pts in prop::collection::vec(point(), 1..12)) {
        let h = convex_hull(&pts).unwrap();
        prop_assert_eq!(&convex_hull(h.vertices()).unwrap(), &h);
        for p in &pts {
            prop_assert!(regions::contains(&h, *p));
        }
        let v = h.vertices();
        for w in v.iter().skip(1) {
            prop_assert!((v[0][0], v[0][1]) < (w[0], w[1]));
        }
        prop_assert!(h.area() >= 0.0);
    }

    #[test]
    fn blahut_arimoto_ignores_input_order(seed in 0u64..1000, n in 2usize..5, m in 2usize..5) {
        let mut rng = stream(seed, 0);
        let ch = cmac::random_mac(&[n], m, &mut rng);
        let mut rows = ch.rows().to_vec();
        rows.reverse();
        rows.rotate_left(1);
        let permuted = ClassicalMac::new(vec![n], m, rows).unwrap();
        let a = cmac::blahut_arimoto(&ch).unwrap();
        let b = cmac::blahut_arimoto(&permuted).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }
}

#[test]
fn gamma_bound_is_monotone() {
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=40 {
        let b = cmac::gamma_rb_bound(NoiseParameter::new(k as f64 / 40.0).unwrap());
        assert!(b >= prev - 1e-9, "bound decreased at step {k}");
        prev = b;
    }
}

#[test]
fn gamma_bound_dominates_single_copy_rate() {
    let cfg = SearchConfig { restarts: 4, seed: 3, iterations: 60 };
    for p in [0.0, 0.2, 0.5, 0.8, 1.0] {
        let p = NoiseParameter::new(p).unwrap();
        let single = cmac::gamma_single_copy_rb(p, &cfg).unwrap();
        assert!(single.value <= 1.0 + 1e-6, "single-copy rate {} at p={}", single.value, p.value());
        assert!(cmac::gamma_rb_bound(p) >= single.value);
    }
}

#[test]
fn achievable_region_grows_with_samples() {
    let ch = qmac::channels::phi_p(0.4).unwrap();
    let small = regions::achievable_region(&ch, &SamplingConfig { samples: 4, seed: 5, max_states: 4 }).unwrap();
    let large = regions::achievable_region(&ch, &SamplingConfig { samples: 12, seed: 5, max_states: 4 }).unwrap();
    assert!(regions::subset(&small, &large));
}

#[test]
fn classical_demo_scales_with_identical_factors() {
    let cfg = cmac::RegionSampling { samples: 20, seed: 1 };
    let xor = cmac::xor_gate();
    let demo = cmac::region_additivity_demo(&xor, &xor, &cfg).unwrap();
    let twice = regions::KnownRegion::Phi1.region().scaled(2.0);
    assert!(regions::hausdorff_distance(&demo.sum_region, &twice) < 1e-9);
    assert!(demo.product_in_sum && demo.sum_in_product);
    let id = cmac::bsc_pair([0.0, 0.0]).unwrap();
    let demo = cmac::region_additivity_demo(&id, &id, &cfg).unwrap();
    let square = regions::KnownRegion::PsiId.region().scaled(2.0);
    assert!(regions::hausdorff_distance(&demo.product_region, &square) < 1e-9);
}
