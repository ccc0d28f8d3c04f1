//! Inverse structure recovery: interval hulls on the line, the two-case
//! inverse-Kemperman pipeline on cylinder groups with base ℝ, and interval
//! progression certificate verification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSet;
use crate::group::{GroupKind, Side};
use crate::product::{self, SetMode};
use crate::quotient::{almost_domination_check, fiber_profile, QuotientMap};
use crate::report::Vb;

/// Interval-sum structure recovery on ℝ: when
/// λ(A+B) < λ(A) + λ(B) + min{λ(A), λ(B)}, the convex hulls I ⊇ A, J ⊇ B
/// satisfy λ(I) ≤ λ(A+B) − λ(B) and λ(J) ≤ λ(A+B) − λ(A).
#[derive(Clone, Debug)]
pub struct FreimanRecovery {
    pub i: (f64, f64),
    pub j: (f64, f64),
    pub lam_a: f64,
    pub lam_b: f64,
    pub lam_ab: Vb,
    pub hull_i_ok: bool,
    pub hull_j_ok: bool,
}

fn require_line(s: &GridSet, what: &'static str) -> Result<()> {
    match s.group().kind {
        GroupKind::Euclid { d: 1 } => Ok(()),
        _ => Err(Error::HypothesisNotMet {
            check: what,
            detail: format!("requires sets on R, got {}", s.group().name),
        }),
    }
}

/// Margin of the 3k−4 hypothesis: positive when it holds with room, computed
/// at the conservative bracket sides.
pub fn freiman_hypothesis_margin(a: &GridSet, b: &GridSet) -> Result<f64> {
    require_line(a, "freiman_3k4")?;
    let ab = product::product_bracket(a, b)?;
    let la = a.measure(Side::Left);
    let lb = b.measure(Side::Left);
    Ok(la.lower + lb.lower + la.lower.min(lb.lower) - ab.measure(Side::Left).upper)
}

pub fn freiman_3k4(a: &GridSet, b: &GridSet) -> Result<FreimanRecovery> {
    require_line(a, "freiman_3k4")?;
    let margin = freiman_hypothesis_margin(a, b)?;
    if margin <= 0.0 {
        return Err(Error::HypothesisNotMet {
            check: "freiman_3k4",
            detail: format!("interval-sum hypothesis fails by {:.6}", -margin),
        });
    }
    let ab = product::product_bracket(a, b)?;
    let la = a.measure(Side::Left);
    let lb = b.measure(Side::Left);
    let lab = ab.measure(Side::Left);
    let hull = |s: &GridSet| -> (f64, f64) {
        let bb = s.bounding_box().expect("nonempty");
        (bb.axis(0).lo, bb.axis(0).hi)
    };
    let i = hull(a);
    let j = hull(b);
    let tol = lab.width() + la.width() + lb.width() + 1e-9;
    Ok(FreimanRecovery {
        i,
        j,
        lam_a: la.mid(),
        lam_b: lb.mid(),
        lam_ab: Vb::new(lab.lower, lab.upper),
        hull_i_ok: (i.1 - i.0) <= lab.upper - lb.lower + tol,
        hull_j_ok: (j.1 - j.0) <= lab.upper - la.lower + tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryCase {
    Exact,
    Near,
    OutsideRange,
}

/// Result of the inverse-Kemperman pipeline on a cylinder group over ℝ.
#[derive(Clone, Debug)]
pub struct IntervalRecovery {
    pub case: RecoveryCase,
    /// Recovered intervals in the base line (χ-coordinates).
    pub i: (f64, f64),
    pub j: (f64, f64),
    pub discrepancy: Vb,
    /// μ(χ⁻¹(I)) − μ(A) and the analogue for B.
    pub excess_i: f64,
    pub excess_j: f64,
    pub contained_a: bool,
    pub contained_b: bool,
    /// Case-appropriate excess bound: ≤ tol for exact, < 100𝔡 for near.
    pub excess_within: bool,
}

/// Two-case recovery: with the root-Kemperman hypothesis
/// (ν(A)/ν(AB))^½ + (μ(B)/μ(AB))^½ > 1 on a cylinder group with base ℝ,
/// discrepancy zero forces exact interval preimages, and small positive
/// discrepancy (below min measure / 20) forces interval preimages up to
/// 100𝔡 excess.
pub fn inverse_kemperman(q: &QuotientMap, a: &GridSet, b: &GridSet) -> Result<IntervalRecovery> {
    if q.base_dim() != 1 {
        return Err(Error::HypothesisNotMet {
            check: "inverse_kemperman",
            detail: format!("requires base R, got base of dimension {}", q.base_dim()),
        });
    }
    let ab = product::product_bracket(a, b)?;
    let nu_a = a.measure(Side::Right);
    let mu_b = b.measure(Side::Left);
    let nu_ab = ab.measure(Side::Right);
    let mu_ab = ab.measure(Side::Left);
    if nu_a.lower <= 0.0 || mu_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("inverse_kemperman"));
    }
    let lhs = (nu_a.lower / nu_ab.upper).sqrt() + (mu_b.lower / mu_ab.upper).sqrt();
    if lhs <= 1.0 {
        return Err(Error::HypothesisNotMet {
            check: "inverse_kemperman",
            detail: format!("root-sum hypothesis fails: {lhs:.6} <= 1"),
        });
    }

    let disc = crate::metrics::discrepancy(a, b)?;
    let mu_a = a.measure(Side::Left);
    let exact_tol = 1e-9 + disc.width();
    let guard = 0.05 * mu_a.lower.min(mu_b.lower);

    let fa = fiber_profile(q, a)?;
    let fb = fiber_profile(q, b)?;
    let hull1 = |s: &GridSet| -> (f64, f64) {
        let bb = s.bounding_box().expect("nonempty");
        (bb.axis(0).lo, bb.axis(0).hi)
    };

    if disc.hi <= exact_tol {
        // exact case: supports are the recovered intervals
        let base_a = fa.support();
        let base_b = fb.support();
        let fr = freiman_3k4(&base_a, &base_b)?;
        let i = fr.i;
        let j = fr.j;
        let excess_i = (i.1 - i.0) - mu_a.mid();
        let excess_j = (j.1 - j.0) - mu_b.mid();
        let layer = 2.0 * fa.spec().axis(0).h;
        let contained_a = fa.cylinder_symdiff(&interval_cells(&base_a, i)) <= layer + 1e-9;
        let contained_b = fb.cylinder_symdiff(&interval_cells(&base_b, j)) <= layer + 1e-9;
        return Ok(IntervalRecovery {
            case: RecoveryCase::Exact,
            i,
            j,
            discrepancy: disc,
            excess_i,
            excess_j,
            contained_a,
            contained_b,
            excess_within: excess_i <= layer + exact_tol && excess_j <= layer + exact_tol,
        });
    }
    if disc.hi < guard {
        // near case: threshold witnesses plus endpoint extension to cover χ(A)
        let wit = almost_domination_check(q, a, b)?;
        let fr = freiman_3k4(&wit.base_a, &wit.base_b)?;
        let mut i = fr.i;
        let mut j = fr.j;
        let (slo, shi) = hull1(&fa.support());
        i = (i.0.min(slo), i.1.max(shi));
        let (slo, shi) = hull1(&fb.support());
        j = (j.0.min(slo), j.1.max(shi));
        let excess_i = (i.1 - i.0) - mu_a.mid();
        let excess_j = (j.1 - j.0) - mu_b.mid();
        let d_ref = disc.lo.max(0.0) + disc.width();
        return Ok(IntervalRecovery {
            case: RecoveryCase::Near,
            i,
            j,
            discrepancy: disc,
            excess_i,
            excess_j,
            contained_a: true,
            contained_b: true,
            excess_within: excess_i < 100.0 * d_ref && excess_j < 100.0 * d_ref,
        });
    }
    Ok(IntervalRecovery {
        case: RecoveryCase::OutsideRange,
        i: (f64::NAN, f64::NAN),
        j: (f64::NAN, f64::NAN),
        discrepancy: disc,
        excess_i: f64::NAN,
        excess_j: f64::NAN,
        contained_a: false,
        contained_b: false,
        excess_within: false,
    })
}

/// Grid set of the base cells inside the closed interval.
fn interval_cells(template: &GridSet, iv: (f64, f64)) -> GridSet {
    let mut s = GridSet::empty(*template.group(), *template.spec());
    s.stamp_box_outer(&crate::chart::BoxN::from_bounds(&[iv.0], &[iv.1]));
    s
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgressionStep {
    pub step: f64,
    pub count: u64,
}

/// Certificate that χ(A) is covered by I + P for a generalized arithmetic
/// progression P given by generators and lengths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgressionCertificate {
    pub i: (f64, f64),
    pub steps: Vec<ProgressionStep>,
    pub claimed_cover: bool,
}

/// Expand I + P into a merged union of closed intervals.
fn expand_progression(cert: &ProgressionCertificate) -> Result<Vec<(f64, f64)>> {
    if cert.i.1 < cert.i.0 {
        return Err(Error::MalformedCertificate("empty base interval".into()));
    }
    let mut total: u64 = 1;
    for s in &cert.steps {
        if s.count == 0 {
            return Err(Error::MalformedCertificate("zero-length generator".into()));
        }
        total = total.saturating_mul(s.count);
        if total > 1_000_000 {
            return Err(Error::MalformedCertificate("progression too large to expand".into()));
        }
    }
    let mut offsets = vec![0.0f64];
    for s in &cert.steps {
        let mut next = Vec::with_capacity(offsets.len() * s.count as usize);
        for k in 0..s.count {
            for &o in &offsets {
                next.push(o + k as f64 * s.step);
            }
        }
        offsets = next;
    }
    let mut intervals: Vec<(f64, f64)> =
        offsets.iter().map(|&o| (cert.i.0 + o, cert.i.1 + o)).collect();
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for iv in intervals {
        match merged.last_mut() {
            Some(last) if iv.0 <= last.1 + 1e-12 => last.1 = last.1.max(iv.1),
            _ => merged.push(iv),
        }
    }
    Ok(merged)
}

/// True iff every base column of χ(A) lies inside the expanded I + P.
pub fn verify_progression_cover(
    a: &GridSet,
    cert: &ProgressionCertificate,
    q: &QuotientMap,
) -> Result<bool> {
    if q.base_dim() != 1 {
        return Err(Error::HypothesisNotMet {
            check: "verify_progression_cover",
            detail: "requires base R".into(),
        });
    }
    let merged = expand_progression(cert)?;
    let support = fiber_profile(q, a)?.support();
    for cell in support.iter_cells() {
        let b = support.cell_box(&cell);
        let (lo, hi) = (b.axis(0).lo, b.axis(0).hi);
        let covered = merged.iter().any(|&(a0, a1)| a0 <= lo + 1e-12 && hi <= a1 + 1e-12);
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inverse set helper used by scenario code: AB⁻¹ outer on the base line.
pub fn base_difference_set(a: &GridSet, b: &GridSet) -> Result<GridSet> {
    let b_inv = product::inverse_set(b, SetMode::Outer)?;
    product::product_set(a, &b_inv, SetMode::Outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxN;
    use crate::group::by_name;
    use crate::quotient::{notch_fiber, preimage_box};

    // independent oracle: Minkowski sum of interval unions on the line
    fn oracle_sum_length(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        let mut sums: Vec<(f64, f64)> = Vec::new();
        for &(a0, a1) in a {
            for &(b0, b1) in b {
                sums.push((a0 + b0, a1 + b1));
            }
        }
        sums.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut len = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for iv in sums {
            match cur {
                Some((lo, hi)) if iv.0 <= hi => cur = Some((lo, hi.max(iv.1))),
                Some((lo, hi)) => {
                    len += hi - lo;
                    cur = Some(iv);
                    let _ = lo;
                }
                None => cur = Some(iv),
            }
        }
        if let Some((lo, hi)) = cur {
            len += hi - lo;
        }
        len
    }

    fn union_set(res: usize, parts: &[(f64, f64)]) -> GridSet {
        let g = by_name("R").unwrap();
        let boxes: Vec<BoxN> =
            parts.iter().map(|&(lo, hi)| BoxN::from_bounds(&[lo], &[hi])).collect();
        GridSet::from_boxes(g, &[1.0 / res as f64], &boxes)
    }

    #[test]
    fn freiman_unit_intervals() {
        let a = union_set(64, &[(0.0, 1.0)]);
        let fr = freiman_3k4(&a, &a).unwrap();
        assert_eq!(fr.i, (0.0, 1.0));
        assert!(fr.hull_i_ok && fr.hull_j_ok);
    }

    #[test]
    fn freiman_two_part_union() {
        // A = [0,1] ∪ [1.25,1.5], B = [0,1]: oracle gives λ(A+B) = 2.5 and the
        // hull inequality is tight: λ(I) = 1.5 = λ(A+B) − λ(B)
        let parts_a = [(0.0, 1.0), (1.25, 1.5)];
        let parts_b = [(0.0, 1.0)];
        assert!((oracle_sum_length(&parts_a, &parts_b) - 2.5).abs() < 1e-12);
        let a = union_set(64, &parts_a);
        let b = union_set(64, &parts_b);
        let fr = freiman_3k4(&a, &b).unwrap();
        assert_eq!(fr.i, (0.0, 1.5));
        assert!((fr.lam_ab.mid() - 2.5).abs() < 1e-9);
        assert!(fr.hull_i_ok && fr.hull_j_ok);
    }

    #[test]
    fn freiman_refuses_spread_union() {
        // A = B = [0,1] ∪ [5,6]: λ(A+B) = 6 = λ+λ+min, not strictly below
        let parts = [(0.0, 1.0), (5.0, 6.0)];
        assert!((oracle_sum_length(&parts, &parts) - 6.0).abs() < 1e-12);
        let a = union_set(32, &parts);
        let err = freiman_3k4(&a, &a).unwrap_err();
        assert!(matches!(err, Error::HypothesisNotMet { .. }));
        assert!(freiman_hypothesis_margin(&a, &a).unwrap() <= 0.0);
    }

    fn rxt() -> (QuotientMap, Vec<f64>) {
        let g = by_name("RxT").unwrap();
        (QuotientMap::new(g).unwrap(), vec![1.0 / 64.0, 1.0 / 64.0])
    }

    #[test]
    fn inverse_kemperman_exact_case() {
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let b = preimage_box(&q, &h, &[0.0], &[2.0]);
        let rec = inverse_kemperman(&q, &a, &b).unwrap();
        assert_eq!(rec.case, RecoveryCase::Exact);
        assert!(rec.excess_i.abs() < 1e-9 && rec.excess_j.abs() < 1e-9);
        assert!(rec.contained_a && rec.contained_b && rec.excess_within);
        assert_eq!(rec.i, (0.0, 1.0));
        assert_eq!(rec.j, (0.0, 2.0));
    }

    #[test]
    fn inverse_kemperman_notched_case() {
        let (q, h) = rxt();
        let a0 = preimage_box(&q, &h, &[0.0], &[1.0]);
        let b = preimage_box(&q, &h, &[0.0], &[2.0]);
        // fiber notch of depth 1/64 over one base column
        let a = notch_fiber(&q, &a0, &[0.5], 1.0 / 64.0).unwrap();
        let rec = inverse_kemperman(&q, &a, &b).unwrap();
        assert_eq!(rec.case, RecoveryCase::Near, "𝔡 = {:?}", rec.discrepancy);
        assert!(rec.discrepancy.mid() > 0.0);
        assert!(rec.excess_within, "excess {} vs 100·𝔡 = {}", rec.excess_i, 100.0 * rec.discrepancy.mid());
        assert!(rec.contained_a && rec.contained_b);
    }

    #[test]
    fn inverse_kemperman_guard() {
        let (q, h) = rxt();
        // preimage of [0,1] ∪ [1.25,1.375]: the gap inflates 𝔡 = 0.25 above
        // min{μ}/20 ≈ 0.056 while the root-sum hypothesis still holds
        let g = q.total;
        let a = GridSet::from_boxes(
            g,
            &h,
            &[
                BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]),
                BoxN::from_bounds(&[1.25, 0.0], &[1.375, 1.0]),
            ],
        );
        let b = preimage_box(&q, &h, &[0.0], &[1.0]);
        let rec = inverse_kemperman(&q, &a, &b).unwrap();
        assert_eq!(rec.case, RecoveryCase::OutsideRange, "𝔡 = {:?}", rec.discrepancy);

        // a single-column fiber notch keeps 𝔡 = 1/64 « guard: still in range
        let a0 = preimage_box(&q, &h, &[0.0], &[1.0]);
        let an = notch_fiber(&q, &a0, &[0.5], 1.0).unwrap();
        let rec = inverse_kemperman(&q, &an, &b).unwrap();
        assert_eq!(rec.case, RecoveryCase::Near);
    }

    #[test]
    fn progression_cover_examples() {
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let cert = ProgressionCertificate { i: (0.0, 1.0), steps: vec![], claimed_cover: true };
        assert!(verify_progression_cover(&a, &cert, &q).unwrap());

        // A spread over {0, 10, 20} + [0,1] fibers
        let g = q.total;
        let spread = GridSet::from_boxes(
            g,
            &h,
            &[
                BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]),
                BoxN::from_bounds(&[10.0, 0.0], &[11.0, 1.0]),
                BoxN::from_bounds(&[20.0, 0.0], &[21.0, 1.0]),
            ],
        );
        let good = ProgressionCertificate {
            i: (0.0, 1.0),
            steps: vec![ProgressionStep { step: 10.0, count: 3 }],
            claimed_cover: true,
        };
        assert!(verify_progression_cover(&spread, &good, &q).unwrap());
        let bad = ProgressionCertificate {
            i: (0.0, 1.0),
            steps: vec![ProgressionStep { step: 7.0, count: 3 }],
            claimed_cover: true,
        };
        assert!(!verify_progression_cover(&spread, &bad, &q).unwrap());
        let malformed = ProgressionCertificate {
            i: (0.0, 1.0),
            steps: vec![ProgressionStep { step: 7.0, count: 0 }],
            claimed_cover: true,
        };
        assert!(verify_progression_cover(&spread, &malformed, &q).is_err());
    }
}
