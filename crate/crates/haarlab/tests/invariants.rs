//! Cross-module invariant sweeps on seeded scenario suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use haarlab::catalog_check::{catalog_check_with, random_cell_union, sample_box};
use haarlab::chart::BoxN;
use haarlab::conv::{convolution_tolerance, convolve_indicator, convolve_indicator_right, energy};
use haarlab::cover::{ruzsa_cover, verify_cover, Direction};
use haarlab::grid::GridSet;
use haarlab::group::{by_name, catalog, Side};
use haarlab::product::{inverse_set, product_bracket, SetMode};
use haarlab::stabilizer::approximate_stabilizer;

#[test]
fn catalog_invariants_hundred_boxes() {
    for g in catalog() {
        let rep = catalog_check_with(g, 100, 0xFEED);
        assert!(rep.passed(), "{}: {:?}", g.name, rep.violations);
    }
}

#[test]
fn refinement_monotone_and_convergent() {
    // outer product measures never increase under refinement, inner never
    // decrease, and the bracket width decays at least linearly in h
    let suites: &[(&str, [f64; 2], [f64; 2])] = &[
        ("axb", [0.0, 0.0], [1.0, 1.0]),
        ("axb", [0.25, 0.5], [1.25, 1.75]),
    ];
    for &(name, lo, hi) in suites {
        let g = by_name(name).unwrap();
        let mut prev_outer = f64::INFINITY;
        let mut prev_inner = 0.0f64;
        let mut prev_width = f64::INFINITY;
        for res in [16usize, 32, 64] {
            let h = vec![1.0 / res as f64; 2];
            let a = GridSet::from_box(g, &h, &BoxN::from_bounds(&lo, &hi));
            let br = product_bracket(&a, &a).unwrap();
            let outer = br.outer.measure(Side::Left).upper;
            let inner = br.inner.measure(Side::Left).lower;
            assert!(outer <= prev_outer + 1e-12, "outer grew under refinement");
            assert!(inner >= prev_inner - 1e-12, "inner shrank under refinement");
            let width = outer - inner;
            assert!(
                width <= 0.75 * prev_width,
                "bracket width not decaying: {width} vs {prev_width}"
            );
            prev_outer = outer;
            prev_inner = inner;
            prev_width = width;
        }
    }
    // exact case: interval sums on the line have zero width at every level
    let g = by_name("R").unwrap();
    for res in [16usize, 32, 64] {
        let a = GridSet::from_box(g, &[1.0 / res as f64], &BoxN::from_bounds(&[0.0], &[1.0]));
        let br = product_bracket(&a, &a).unwrap();
        assert!(br.measure(Side::Left).width() < 1e-12);
    }
}

#[test]
fn convolution_paths_agree_fifty_pairs_per_group() {
    for name in ["R", "R^2", "RxT", "axb", "heis3"] {
        let g = by_name(name).unwrap();
        let res = if g.chart_dim() >= 3 { 12 } else { 24 };
        let h = vec![1.0 / res as f64; g.chart_dim()];
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        for pair in 0..50 {
            let a = random_cell_union(&g, &mut rng, &h, 12, 1);
            let b = random_cell_union(&g, &mut rng, &h, 10, 1);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let tol = convolution_tolerance(&a, &b);
            // sample a few evaluation points from the product support
            let support = haarlab::product::product_set(&a, &b, SetMode::Outer).unwrap();
            for (i, cell) in support.iter_cells().enumerate() {
                if i % 97 != 0 {
                    continue;
                }
                let x = support.cell_center(&cell);
                let l = convolve_indicator(&a, &b, &x);
                let r = convolve_indicator_right(&a, &b, &x);
                assert!(
                    (l - r).abs() <= tol,
                    "{name} pair {pair}: paths {l} vs {r}, tol {tol}"
                );
            }
        }
    }
}

#[test]
fn energy_symmetry_relation_on_axb() {
    let g = by_name("axb").unwrap();
    let h = vec![1.0 / 16.0; 2];
    let mut rng = ChaCha8Rng::seed_from_u64(0xE4E);
    for trial in 0..10 {
        let a = random_cell_union(&g, &mut rng, &h, 15, 1);
        if a.is_empty() {
            continue;
        }
        let a_inv = inverse_set(&a, SetMode::Outer).unwrap();
        let e_fwd = energy(&a, &a_inv).unwrap();
        let e_rev = energy(&a_inv, &a).unwrap();
        let max_delta = a
            .iter_cells()
            .map(|c| g.modular(&a.cell_center(&c)))
            .fold(0.0f64, f64::max);
        let tol = 4.0 * convolution_tolerance(&a, &a) * a.measure(Side::Left).upper + 1e-9;
        assert!(
            e_rev >= e_fwd / max_delta - tol,
            "trial {trial}: E(A⁻¹,A) = {e_rev} < {} − {tol}",
            e_fwd / max_delta
        );
        // Cauchy–Schwarz floor
        let aa_inv = haarlab::product::product_set(&a, &a_inv, SetMode::Outer).unwrap();
        let floor = a.measure(Side::Right).lower.powi(2) * a.measure(Side::Left).lower.powi(2)
            / aa_inv.measure(Side::Right).upper;
        assert!(e_fwd >= floor - tol, "trial {trial}: CS floor {floor} vs {e_fwd}");
    }
}

#[test]
fn greedy_covers_sound_across_groups() {
    for name in ["R", "R^2", "RxT", "T"] {
        let g = by_name(name).unwrap();
        let h = vec![1.0 / 16.0; g.chart_dim()];
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0E);
        for trial in 0..6 {
            let a = random_cell_union(&g, &mut rng, &h, 10, 1);
            let b = random_cell_union(&g, &mut rng, &h, 14, 1);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            for dir in [Direction::Left, Direction::Right] {
                let cert = ruzsa_cover(&a, &b, dir).unwrap();
                assert!(cert.verified, "{name} trial {trial} {dir:?} containment");
                assert!(
                    (cert.cardinality() as f64) <= cert.k_claimed.floor() + 0.5,
                    "{name}: |Ω| = {} exceeds ⌊{}⌋",
                    cert.cardinality(),
                    cert.k_claimed
                );
                assert!(verify_cover(&a, &b, &cert).unwrap());
            }
        }
    }
}

#[test]
fn almost_domination_random_perturbations_all_within() {
    // random fiber perturbations of an interval preimage: the ladder
    // witnesses meet both displayed bounds in every scenario at this
    // resolution
    use haarlab::quotient::{almost_domination_check, notch_fiber, preimage_box, QuotientMap};
    let g = by_name("RxT").unwrap();
    let q = QuotientMap::new(g).unwrap();
    let h = vec![1.0 / 64.0; 2];
    let base = preimage_box(&q, &h, &[0.0], &[1.0]);
    let b = preimage_box(&q, &h, &[0.0], &[1.5]);
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0AA);
    let mut within = 0usize;
    let total = 20usize;
    for _ in 0..total {
        let mut a = base.clone();
        for _ in 0..rng.random_range(1..4usize) {
            let at: f64 = rng.random_range(0.05..0.95);
            let depth = rng.random_range(1..4u32) as f64 / 64.0;
            a = notch_fiber(&q, &a, &[at], depth).unwrap();
        }
        let rep = almost_domination_check(&q, &a, &b).unwrap();
        if rep.symdiff_within && rep.base_within {
            within += 1;
        }
    }
    assert_eq!(within, total, "expected 100% of witnesses within bounds, got {within}/{total}");
}

#[test]
fn stabilizer_monotone_and_symmetric_on_boxes() {
    for name in ["R", "axb"] {
        let g = by_name(name).unwrap();
        let h = vec![1.0 / 24.0; g.chart_dim()];
        let mut lo = vec![0.0; g.chart_dim()];
        let mut hi = vec![1.0; g.chart_dim()];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = sample_box(&g, &mut rng, 0.5, 0.8);
        for ax in 0..g.chart_dim() {
            lo[ax] = b.axis(ax).lo;
            hi[ax] = b.axis(ax).hi;
        }
        let a = GridSet::from_box(g, &h, &BoxN::from_bounds(&lo, &hi));
        let nu = a.measure(Side::Right).lower;
        let mut prev: Option<GridSet> = None;
        for frac in [0.3, 0.5, 0.7, 0.9] {
            let s = approximate_stabilizer(&a, frac * nu).unwrap();
            assert!(s.set.contains_point(&g.identity()));
            assert!(haarlab::tao::symmetric_within_layer(&s.set).unwrap(), "{name} @ {frac}");
            if let Some(p) = &prev {
                assert!(p.is_subset_of(&s.set).unwrap(), "{name}: not monotone at {frac}");
            }
            prev = Some(s.set);
        }
    }
}
