//! Approximate measure stabilizers: Stab^ε(A) = {g : ν(A ∖ Ag) < ε}.
//!
//! Membership is certified with the inner approximation of the translate Ag,
//! which upper-bounds ν(A ∖ Ag); the computed stabilizer is therefore a subset
//! of the true one. Cells whose membership bracket straddles ε are counted
//! separately so downstream mass bounds can carry an honest tolerance.

use crate::error::{Error, Result};
use crate::grid::GridSet;
use crate::group::Side;
use crate::product::{self, SetMode};

#[derive(Clone, Debug)]
pub struct StabilizerResult {
    /// Certified member cells (the identity cell always included).
    pub set: GridSet,
    pub epsilon: f64,
    /// ν-mass of candidate cells whose membership bracket straddles ε; the
    /// true stabilizer may exceed the certified one by at most this much
    /// plus a cell layer.
    pub borderline_mass: f64,
}

/// Compute Stab^ε(A) on the grid. Refuses ε ≥ ν(A) on noncompact groups,
/// where the true stabilizer would not be precompact.
pub fn approximate_stabilizer(a: &GridSet, epsilon: f64) -> Result<StabilizerResult> {
    if epsilon <= 0.0 {
        return Err(Error::HypothesisNotMet {
            check: "approximate_stabilizer",
            detail: format!("epsilon must be positive, got {epsilon}"),
        });
    }
    let nu_a = a.measure(Side::Right);
    if nu_a.lower <= 0.0 {
        return Err(Error::ZeroMeasure("approximate_stabilizer"));
    }
    let noncompact = a.group().total_measure().is_none();
    if noncompact && epsilon >= nu_a.lower {
        return Err(Error::EpsilonTooLarge { eps: epsilon, measure: nu_a.lower });
    }

    // candidates live in A⁻¹A: outside it, Ag is disjoint from A
    let a_inv = product::inverse_set(a, SetMode::Outer)?;
    let candidates = product::product_set(&a_inv, a, SetMode::Outer)?;
    let mut set = GridSet::empty(*a.group(), *candidates.spec());
    let mut borderline_mass = 0.0;
    let cell_nu = candidates.spec().cell_volume();
    let ctx = product::TranslateLossCtx::new(a);
    for cell in candidates.iter_cells() {
        let g = candidates.cell_center(&cell);
        let (loss_lo, loss_up) = ctx.loss(&g, epsilon);
        if loss_up < epsilon {
            set.insert_cell(&cell);
        } else if loss_lo < epsilon {
            // membership bracket straddles ε
            let (_, dhi) = a.group().density_range(Side::Right, &candidates.cell_box(&cell));
            borderline_mass += dhi * cell_nu;
        }
    }
    // Certification noise need not be symmetric under g ↦ g⁻¹ even though the
    // true loss is; prune to the largest subset whose cell inverses land back
    // in the set within a one-cell layer, so the certificate invariant
    // S = S⁻¹ holds. Removed cells sit in the borderline band.
    let g = *a.group();
    let dim = g.chart_dim();
    for _ in 0..16 {
        let mut removed = Vec::new();
        for cell in set.iter_cells() {
            let q = g.reduce(&g.inv(&set.cell_center(&cell)));
            let mut idx = [0i64; 3];
            for ax in 0..dim {
                let axis = set.spec().axis(ax);
                let mut i = (q.get(ax) / axis.h).floor() as i64;
                if axis.circle {
                    i = i.rem_euclid(axis.n as i64);
                }
                idx[ax] = i;
            }
            if !crate::tao::chebyshev_hit(&set, &idx, dim) {
                removed.push(cell);
            }
        }
        if removed.is_empty() {
            break;
        }
        for cell in removed {
            let (_, dhi) = g.density_range(Side::Right, &set.cell_box(&cell));
            borderline_mass += dhi * cell_nu;
            remove_cell(&mut set, &cell);
        }
    }

    // A ∖ A·id = ∅, so the identity belongs for every positive ε.
    let id = a.group().identity();
    if let Some(idx) = set.locate(&id) {
        set.insert_cell(&idx);
    }
    Ok(StabilizerResult { set, epsilon, borderline_mass })
}

fn remove_cell(set: &mut GridSet, cell: &[i64; 3]) {
    // difference with a single-cell set keeps the window unchanged
    let mut one = GridSet::empty(*set.group(), *set.spec());
    one.insert_cell(cell);
    *set = set.difference(&one).expect("same window");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{BoxN, Pt};
    use crate::group::by_name;

    fn interval(res: usize, lo: f64, hi: f64) -> GridSet {
        let g = by_name("R").unwrap();
        GridSet::from_box(g, &[1.0 / res as f64], &BoxN::from_bounds(&[lo], &[hi]))
    }

    #[test]
    fn unit_interval_half_epsilon() {
        // λ([0,1] ∖ [g,1+g]) = min(|g|, 1): S(1/2) = (−1/2, 1/2)
        let a = interval(64, 0.0, 1.0);
        let s = approximate_stabilizer(&a, 0.5).unwrap();
        let id = by_name("R").unwrap().identity();
        assert!(s.set.contains_point(&id));
        assert!(s.set.contains_point(&Pt::new(&[0.4])));
        assert!(s.set.contains_point(&Pt::new(&[-0.4])));
        assert!(!s.set.contains_point(&Pt::new(&[0.6])));
        assert!(!s.set.contains_point(&Pt::new(&[-0.6])));
        let m = s.set.measure(Side::Right);
        assert!((m.mid() - 1.0).abs() < 0.1, "ν(S) = {}", m.mid());
    }

    #[test]
    fn monotone_in_epsilon() {
        let a = interval(32, 0.0, 1.0);
        let s1 = approximate_stabilizer(&a, 0.25).unwrap();
        let s2 = approximate_stabilizer(&a, 0.75).unwrap();
        assert!(s1.set.is_subset_of(&s2.set).unwrap());
    }

    #[test]
    fn symmetric_membership() {
        let a = interval(32, 0.0, 1.0);
        let s = approximate_stabilizer(&a, 0.5).unwrap();
        let g = by_name("R").unwrap();
        for cell in s.set.iter_cells() {
            let p = s.set.cell_center(&cell);
            let q = g.inv(&p);
            // inverse lands in S up to one cell layer
            let hit = s.set.contains_point(&q)
                || s.set.contains_point(&Pt::new(&[q.get(0) + 1.0 / 32.0]))
                || s.set.contains_point(&Pt::new(&[q.get(0) - 1.0 / 32.0]));
            assert!(hit, "inverse of {:?} not in S", p.coords());
        }
    }

    #[test]
    fn refuses_large_epsilon_on_noncompact() {
        let a = interval(32, 0.0, 1.0);
        assert!(matches!(
            approximate_stabilizer(&a, 1.5),
            Err(Error::EpsilonTooLarge { .. })
        ));
        // compact group: large ε is fine, S is the whole torus
        let g = by_name("T").unwrap();
        let t = GridSet::from_box(g, &[1.0 / 16.0], &BoxN::from_bounds(&[0.0], &[0.5]));
        let s = approximate_stabilizer(&t, 0.75).unwrap();
        assert!(!s.set.is_empty());
    }

    #[test]
    fn axb_stabilizer_contains_identity() {
        let g = by_name("axb").unwrap();
        let a = GridSet::from_box(
            g,
            &[1.0 / 16.0, 1.0 / 16.0],
            &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]),
        );
        let nu = a.measure(Side::Right).lower;
        let s = approximate_stabilizer(&a, 0.5 * nu).unwrap();
        assert!(s.set.contains_point(&g.identity()));
        assert!(!s.set.is_empty());
    }
}
