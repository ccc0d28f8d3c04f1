//! Catalog self-checks: algebraic laws, modular-function identities on
//! translated boxes, and the structural metadata inequalities, each verified
//! on a deterministic seeded sample with the violating witness reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{BoxN, Pt};
use crate::grid::GridSet;
use crate::group::{GroupModel, Side};
use crate::product::{self, SetMode};

#[derive(Clone, Debug)]
pub struct InvariantViolation {
    pub invariant: &'static str,
    pub witness: String,
}

#[derive(Clone, Debug)]
pub struct CatalogReport {
    pub group: &'static str,
    /// [ndim − hdim, ndim] brackets the group's Brunn–Minkowski coefficient.
    pub bm_bracket: (u32, u32),
    pub violations: Vec<InvariantViolation>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn sample_point(g: &GroupModel, rng: &mut ChaCha8Rng, radius: f64) -> Pt {
    let mut p = Pt::zero(g.chart_dim());
    for a in 0..g.chart_dim() {
        let v = if g.is_circle_axis(a) {
            rng.random_range(0.0..1.0)
        } else {
            rng.random_range(-radius..radius)
        };
        p.set(a, v);
    }
    p
}

pub fn sample_box(g: &GroupModel, rng: &mut ChaCha8Rng, radius: f64, max_width: f64) -> BoxN {
    let mut lo = vec![0.0; g.chart_dim()];
    let mut hi = vec![0.0; g.chart_dim()];
    for a in 0..g.chart_dim() {
        if g.is_circle_axis(a) {
            let s: f64 = rng.random_range(0.0..1.0);
            let w: f64 = rng.random_range(0.1..0.5f64);
            lo[a] = s;
            hi[a] = s + w;
        } else {
            let s: f64 = rng.random_range(-radius..radius * 0.5);
            let w: f64 = rng.random_range(0.15..max_width);
            lo[a] = s;
            hi[a] = s + w;
        }
    }
    BoxN::from_bounds(&lo, &hi)
}

pub fn catalog_check(g: &GroupModel) -> CatalogReport {
    catalog_check_with(g, 12, 0xC0FFEE)
}

pub fn catalog_check_with(g: &GroupModel, boxes: usize, seed: u64) -> CatalogReport {
    let mut violations = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = g.identity();

    for _ in 0..100 {
        let x = sample_point(g, &mut rng, 2.0);
        if g.chart_distance(&g.law(&e, &x), &x) > 1e-9
            || g.chart_distance(&g.law(&x, &e), &x) > 1e-9
        {
            violations.push(InvariantViolation {
                invariant: crate::report::checks::IDENTITY_LAW,
                witness: format!("{:?}", x.coords()),
            });
            break;
        }
        if g.chart_distance(&g.law(&x, &g.inv(&x)), &e) > 1e-9 {
            violations.push(InvariantViolation {
                invariant: crate::report::checks::INVERSE_LAW,
                witness: format!("{:?}", x.coords()),
            });
            break;
        }
    }

    for _ in 0..200 {
        let x = sample_point(g, &mut rng, 2.0);
        let y = sample_point(g, &mut rng, 2.0);
        let z = sample_point(g, &mut rng, 2.0);
        let l = g.law(&g.law(&x, &y), &z);
        let r = g.law(&x, &g.law(&y, &z));
        if g.chart_distance(&l, &r) > 1e-9 {
            violations.push(InvariantViolation {
                invariant: crate::report::checks::COMPOSE_ASSOCIATIVITY,
                witness: format!("{:?} {:?} {:?}", x.coords(), y.coords(), z.coords()),
            });
            break;
        }
    }

    for _ in 0..100 {
        let x = sample_point(g, &mut rng, 2.0);
        let d = g.modular(&x);
        if g.unimodular != ((d - 1.0).abs() < 1e-12) {
            violations.push(InvariantViolation {
                invariant: crate::report::checks::UNIMODULAR_FLAG,
                witness: format!("Δ{:?} = {d}", x.coords()),
            });
            break;
        }
    }

    if g.ndim < 3 * g.hdim {
        violations.push(InvariantViolation {
            invariant: crate::report::checks::NDIM_3HDIM,
            witness: format!("ndim {} < 3·hdim {}", g.ndim, g.hdim),
        });
    }

    // measure identities on seeded boxes
    let res = if g.chart_dim() >= 3 { 12usize } else { 32 };
    let h = vec![1.0 / res as f64; g.chart_dim()];
    for _ in 0..boxes {
        let bx = sample_box(g, &mut rng, 1.2, 0.7);
        let x = sample_point(g, &mut rng, 1.0);
        let set = GridSet::from_box(*g, &h, &bx);
        let mu = set.measure(Side::Left);

        // μ(Xx) = Δ(x)·μ(X)
        match product::right_translate_bracket(&set, &x) {
            Ok(tr) => {
                let m = tr.measure(Side::Left);
                let want_lo = g.modular(&x) * mu.lower;
                let want_hi = g.modular(&x) * mu.upper;
                if m.lower > want_hi + 1e-9 || want_lo > m.upper + 1e-9 {
                    violations.push(InvariantViolation {
                        invariant: crate::report::checks::MODULAR_TRANSLATION_SCALING,
                        witness: format!(
                            "x = {:?}: μ(Xx) ∈ [{:.6}, {:.6}] vs Δ·μ(X) ∈ [{want_lo:.6}, {want_hi:.6}]",
                            x.coords(),
                            m.lower,
                            m.upper
                        ),
                    });
                }
            }
            Err(e) => violations.push(InvariantViolation {
                invariant: crate::report::checks::MODULAR_TRANSLATION_SCALING,
                witness: format!("translate failed: {e}"),
            }),
        }

        // ν(X) = μ(X⁻¹)
        match product::inverse_bracket(&set) {
            Ok(inv) => {
                let nu = set.measure(Side::Right);
                let mu_inv = inv.measure(Side::Left);
                if nu.lower > mu_inv.upper + 1e-9 || mu_inv.lower > nu.upper + 1e-9 {
                    violations.push(InvariantViolation {
                        invariant: crate::report::checks::RIGHT_EQUALS_LEFT_OF_INVERSE,
                        witness: format!(
                            "ν(X) ∈ [{:.6}, {:.6}] vs μ(X⁻¹) ∈ [{:.6}, {:.6}]",
                            nu.lower, nu.upper, mu_inv.lower, mu_inv.upper
                        ),
                    });
                }
            }
            Err(e) => violations.push(InvariantViolation {
                invariant: crate::report::checks::RIGHT_EQUALS_LEFT_OF_INVERSE,
                witness: format!("inverse failed: {e}"),
            }),
        }
        // ν(xX) = Δ(x)⁻¹·ν(X)
        if let Ok(tr) = product::left_translate_bracket(&x, &set) {
            let n = tr.measure(Side::Right);
            let nu = set.measure(Side::Right);
            let want_lo = nu.lower / g.modular(&x);
            let want_hi = nu.upper / g.modular(&x);
            if n.lower > want_hi + 1e-9 || want_lo > n.upper + 1e-9 {
                violations.push(InvariantViolation {
                    invariant: crate::report::checks::MODULAR_TRANSLATION_SCALING,
                    witness: format!("left: x = {:?}", x.coords()),
                });
            }
        }
    }

    CatalogReport {
        group: g.name,
        bm_bracket: (g.ndim - g.hdim.min(g.ndim), g.ndim),
        violations,
    }
}

/// Run `product_set(…, Inner) ⊆ product_set(…, Outer)` and bracket checks on
/// seeded random unions: the shared soundness sweep for scenario suites.
pub fn product_soundness_sweep(
    g: &GroupModel,
    pairs: usize,
    cells: usize,
    res: usize,
    seed: u64,
) -> Result<(), InvariantViolation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = vec![1.0 / res as f64; g.chart_dim()];
    for _ in 0..pairs {
        let a = random_cell_union(g, &mut rng, &h, cells, 1);
        let b = random_cell_union(g, &mut rng, &h, cells, 1);
        let br = match product::product_bracket(&a, &b) {
            Ok(x) => x,
            Err(e) => {
                return Err(InvariantViolation {
                    invariant: crate::report::checks::PRODUCT_BRACKET_NESTING,
                    witness: format!("product failed: {e}"),
                })
            }
        };
        if !br.inner.is_subset_of(&br.outer).unwrap_or(false) {
            return Err(InvariantViolation {
                invariant: crate::report::checks::PRODUCT_BRACKET_NESTING,
                witness: format!("group {}", g.name),
            });
        }
    }
    Ok(())
}

/// Seeded random cell union with a smoothing dilation, localized to a window.
pub fn random_cell_union(
    g: &GroupModel,
    rng: &mut ChaCha8Rng,
    h: &[f64],
    cells: usize,
    radius: usize,
) -> GridSet {
    let dim = g.chart_dim();
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for a in 0..dim {
        if g.is_circle_axis(a) {
            lo[a] = 0.0;
            hi[a] = 1.0;
        } else {
            lo[a] = -1.0;
            hi[a] = 1.0;
        }
    }
    let spec = crate::grid::GridSpec::window_for_box(g, h, &BoxN::from_bounds(&lo, &hi));
    let mut s = GridSet::empty(*g, spec);
    for _ in 0..cells {
        let mut idx = [0i64; 3];
        for a in 0..dim {
            let ax = spec.axis(a);
            idx[a] = ax.lo + rng.random_range(0..ax.n as i64);
        }
        s.insert_cell(&idx);
    }
    if radius > 0 {
        s.dilate(radius)
    } else {
        s
    }
}

/// Translate both sets by seeded random elements; used by metric-axiom suites.
pub fn random_translate(
    g: &GroupModel,
    rng: &mut ChaCha8Rng,
    a: &GridSet,
) -> crate::error::Result<GridSet> {
    let t = sample_point(g, rng, 0.5);
    product::left_translate(&t, a, SetMode::Outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{by_name, catalog, GroupKind};

    #[test]
    fn all_catalog_entries_pass() {
        for g in catalog() {
            let rep = catalog_check_with(g, 6, 7);
            assert!(rep.passed(), "{}: {:?}", g.name, rep.violations);
        }
    }

    #[test]
    fn bm_brackets_match_metadata() {
        let rep = catalog_check(&by_name("R^2").unwrap());
        assert_eq!(rep.bm_bracket, (2, 2));
        let rep = catalog_check(&by_name("axb").unwrap());
        assert_eq!(rep.bm_bracket, (2, 2));
        let rep = catalog_check(&by_name("T").unwrap());
        assert_eq!(rep.bm_bracket, (0, 0));
    }

    #[test]
    fn corrupted_metadata_fails() {
        let bad = GroupModel {
            name: "corrupt",
            kind: GroupKind::Euclid { d: 2 },
            ndim: 2,
            hdim: 1,
            unimodular: true,
        };
        let rep = catalog_check_with(&bad, 2, 7);
        assert!(!rep.passed());
        assert!(rep
            .violations
            .iter()
            .any(|v| v.invariant == crate::report::checks::NDIM_3HDIM));
    }

    #[test]
    fn soundness_sweep_small() {
        for name in ["R", "RxT", "axb"] {
            let g = by_name(name).unwrap();
            product_soundness_sweep(&g, 5, 20, 16, 3).unwrap();
        }
    }
}
