//! The affine-group program: fiber functions over ker Δ, the Hölder moment
//! chain, the strict expansion gap, and conjugation scaling of the kernel.
//!
//! In the (u, b) chart the kernel H = ker Δ is the b-axis with Lebesgue fiber
//! measure, and for a compact set A the slice functions over the u-line are
//!
//!   r_A(u) = λ(A_u),   ℓ_A(u) = e⁻ᵘ·λ(A_u) = Δ(u)·r_A(u),
//!
//! with ν(A) = ∫ r_A du and μ(A) = ∫ ℓ_A du. (A direct chart computation
//! fixes the Δ-power in these identities; conjugation by g scales fiber sets
//! by Δ(g).) The strict-gap statement says a positive-measure set on this
//! group can never reach the two-exponent product-set equality, and the gap
//! is monotone in how far the set spreads across the u-axis.

use crate::chart::Pt;
use crate::error::{Error, Result};
use crate::grid::GridSet;
use crate::group::{GroupKind, Side};
use crate::product;
use crate::report::Vb;

/// Slice profiles of an affine-group set over the u-axis.
#[derive(Clone, Debug)]
pub struct LeftRightFibers {
    pub col_lo: i64,
    /// u cell width.
    pub h_u: f64,
    /// b cell width.
    pub h_b: f64,
    /// r_A per u-column (exact for grid sets).
    pub r_vals: Vec<f64>,
    /// ℓ_A per u-column, evaluated at column centers.
    pub l_vals: Vec<f64>,
}

fn require_affine(a: &GridSet, what: &'static str) -> Result<()> {
    match a.group().kind {
        GroupKind::AffineLine => Ok(()),
        _ => Err(Error::HypothesisNotMet {
            check: what,
            detail: format!("requires the affine group, got {}", a.group().name),
        }),
    }
}

pub fn left_right_fibers(a: &GridSet) -> Result<LeftRightFibers> {
    require_affine(a, "left_right_fibers")?;
    let ax_u = *a.spec().axis(0);
    let ax_b = *a.spec().axis(1);
    let mut r_vals = vec![0.0; ax_u.n];
    for cell in a.iter_cells() {
        r_vals[(cell[0] - ax_u.lo) as usize] += ax_b.h;
    }
    let l_vals = r_vals
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let uc = (ax_u.lo + i as i64) as f64 * ax_u.h + 0.5 * ax_u.h;
            (-uc).exp() * r
        })
        .collect();
    Ok(LeftRightFibers { col_lo: ax_u.lo, h_u: ax_u.h, h_b: ax_b.h, r_vals, l_vals })
}

impl LeftRightFibers {
    fn column_bounds(&self, i: usize) -> (f64, f64) {
        let u0 = (self.col_lo + i as i64) as f64 * self.h_u;
        (u0, u0 + self.h_u)
    }

    /// ∫ e^(−k·u) du over column i.
    fn exp_integral(&self, i: usize, k: i32) -> f64 {
        let (u0, u1) = self.column_bounds(i);
        if k == 0 {
            u1 - u0
        } else {
            let kf = k as f64;
            ((-kf * u0).exp() - (-kf * u1).exp()) / kf
        }
    }

    /// ∫ r_A du = ν(A), exactly for grid sets.
    pub fn integral_r(&self) -> f64 {
        self.r_vals.iter().sum::<f64>() * self.h_u
    }

    /// ∫ Δᵏ·ℓ_A du = Σ r·∫e^(−(k+1)u), exact per column.
    pub fn moment(&self, k: i32) -> f64 {
        self.r_vals
            .iter()
            .enumerate()
            .map(|(i, &r)| r * self.exp_integral(i, k + 1))
            .sum()
    }

    /// ∫ ℓ_A du = μ(A).
    pub fn integral_l(&self) -> f64 {
        self.moment(0)
    }
}

/// Moment chain and product-set lower bounds for A ⊆ ax+b.
#[derive(Clone, Debug)]
pub struct HoelderReport {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m_inv: f64,
    /// M₁·M₀ ≤ M₂·M₋₁ margin (nonnegative when the chain holds).
    pub chain_margin: f64,
    pub chain_ok: bool,
    /// 2∫ r + Δ(2u)⁻¹ℓ du ≤ ν(A²).
    pub nu_bound: f64,
    pub nu_sq: Vb,
    pub nu_ok: bool,
    /// 2∫ Δ(2u)·r + ℓ du ≤ μ(A²).
    pub mu_bound: f64,
    pub mu_sq: Vb,
    pub mu_ok: bool,
    /// Extremes of Δ over the set (recorded, no check attached).
    pub delta_min: f64,
    pub delta_max: f64,
}

pub fn hoelder_chain_check(a: &GridSet) -> Result<HoelderReport> {
    require_affine(a, "hoelder_chain_check")?;
    if a.is_empty() {
        return Err(Error::ZeroMeasure("hoelder_chain_check"));
    }
    let f = left_right_fibers(a)?;
    let m0 = f.moment(0);
    let m1 = f.moment(1);
    let m2 = f.moment(2);
    let m_inv = f.moment(-1);
    let chain_margin = m2 * m_inv - m1 * m0;
    // 1 + e^u = (r + Δ(2u)⁻¹ℓ)/r weights, integrated exactly per column
    let nu_bound: f64 = 2.0
        * f.r_vals
            .iter()
            .enumerate()
            .map(|(i, &r)| r * (f.exp_integral(i, 0) + f.exp_integral(i, -1)))
            .sum::<f64>();
    let mu_bound: f64 = 2.0
        * f.r_vals
            .iter()
            .enumerate()
            .map(|(i, &r)| r * (f.exp_integral(i, 2) + f.exp_integral(i, 1)))
            .sum::<f64>();
    let sq = product::product_bracket(a, a)?;
    let nu_sq = sq.measure(Side::Right);
    let mu_sq = sq.measure(Side::Left);
    let bb = a.bounding_box().expect("nonempty");
    let report = HoelderReport {
        m0,
        m1,
        m2,
        m_inv,
        chain_margin,
        chain_ok: chain_margin >= -1e-9 * (m2 * m_inv).abs().max(1.0),
        nu_bound,
        nu_sq: Vb::new(nu_sq.lower, nu_sq.upper),
        nu_ok: nu_sq.upper >= nu_bound - 1e-9,
        mu_bound,
        mu_sq: Vb::new(mu_sq.lower, mu_sq.upper),
        mu_ok: mu_sq.upper >= mu_bound - 1e-9,
        delta_min: (-bb.axis(0).hi).exp(),
        delta_max: (-bb.axis(0).lo).exp(),
    };
    Ok(report)
}

/// Gap 1 − [(ν(A)/ν(A²))^½ + (μ(A)/μ(A²))^½] with conservative bracket sides.
#[derive(Clone, Copy, Debug)]
pub struct StrictGapReport {
    /// Certified lower end of the gap.
    pub gap_lo: f64,
    /// Optimistic upper end.
    pub gap_hi: f64,
    /// Total bracket-induced uncertainty.
    pub uncertainty: f64,
    /// Weak inequality gap ≥ 0 cannot be violated beyond fp noise.
    pub weak_ok: bool,
    /// Strictness is resolved: the gap exceeds its uncertainty.
    pub resolved: bool,
}

pub fn strict_gap(a: &GridSet) -> Result<StrictGapReport> {
    require_affine(a, "strict_gap")?;
    let nu_a = a.measure(Side::Right);
    let mu_a = a.measure(Side::Left);
    if nu_a.lower <= 0.0 || mu_a.lower <= 0.0 {
        return Err(Error::ZeroMeasure("strict_gap"));
    }
    let sq = product::product_bracket(a, a)?;
    let nu_sq = sq.measure(Side::Right);
    let mu_sq = sq.measure(Side::Left);
    if nu_sq.lower <= 0.0 || mu_sq.lower <= 0.0 {
        return Err(Error::ZeroMeasure("strict_gap"));
    }
    let gap_lo = 1.0 - ((nu_a.upper / nu_sq.lower).sqrt() + (mu_a.upper / mu_sq.lower).sqrt());
    let gap_hi = 1.0 - ((nu_a.lower / nu_sq.upper).sqrt() + (mu_a.lower / mu_sq.upper).sqrt());
    Ok(StrictGapReport {
        gap_lo,
        gap_hi,
        uncertainty: gap_hi - gap_lo,
        weak_ok: gap_hi >= -1e-12,
        resolved: gap_lo > 0.0,
    })
}

/// Conjugation scaling of a kernel-fiber set: μ_H(g⁻¹Xg) = Δ(g)·μ_H(X).
///
/// X is a one-dimensional set on the fiber coordinate; the conjugated set is
/// computed through the group law and its measure compared to the Δ(g) ratio.
#[derive(Clone, Copy, Debug)]
pub struct ConjugationReport {
    pub measured: f64,
    pub expected: f64,
    pub ok: bool,
}

pub fn conjugation_modulus_check(x_fiber: &GridSet, g: &Pt) -> Result<ConjugationReport> {
    if !matches!(x_fiber.group().kind, GroupKind::Euclid { d: 1 }) {
        return Err(Error::NotInFiber);
    }
    let axb = crate::group::by_name("axb")?;
    let gi = axb.inv(g);
    let mut conjugated = 0.0;
    let mut original = 0.0;
    for cell in x_fiber.iter_cells() {
        let b = x_fiber.cell_box(&cell);
        let (t0, t1) = (b.axis(0).lo, b.axis(0).hi);
        let image = |t: f64| {
            let p = axb.law(&axb.law(&gi, &Pt::new(&[0.0, t])), g);
            debug_assert!(p.get(0).abs() < 1e-9, "conjugate leaves the fiber");
            p.get(1)
        };
        conjugated += (image(t1) - image(t0)).abs();
        original += t1 - t0;
    }
    if original <= 0.0 {
        return Err(Error::ZeroMeasure("conjugation_modulus_check"));
    }
    let measured = conjugated / original;
    let expected = axb.modular(g);
    Ok(ConjugationReport {
        measured,
        expected,
        ok: (measured - expected).abs() <= 1e-9 * expected.max(1.0),
    })
}

/// Kemperman on the conjugated fiber: λ(Δ(g₁g₂)·X₁ ⊕ X₂) ≥ Δ(g₁g₂)λ(X₁) + λ(X₂).
#[derive(Clone, Copy, Debug)]
pub struct FiberKempermanReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub ok: bool,
}

pub fn fiber_kemperman_check(
    x1: &GridSet,
    x2: &GridSet,
    g1: &Pt,
    g2: &Pt,
) -> Result<FiberKempermanReport> {
    if !matches!(x1.group().kind, GroupKind::Euclid { d: 1 })
        || !matches!(x2.group().kind, GroupKind::Euclid { d: 1 })
    {
        return Err(Error::NotInFiber);
    }
    if x1.is_empty() || x2.is_empty() {
        return Err(Error::ZeroMeasure("fiber_kemperman_check"));
    }
    let axb = crate::group::by_name("axb")?;
    let g = axb.law(g1, g2);
    let scale = axb.modular(&g);
    // exact interval arithmetic for the scaled sumset
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for c1 in x1.iter_cells() {
        let b1 = x1.cell_box(&c1);
        let (s0, s1) = (scale * b1.axis(0).lo, scale * b1.axis(0).hi);
        for c2 in x2.iter_cells() {
            let b2 = x2.cell_box(&c2);
            intervals.push((s0 + b2.axis(0).lo, s1 + b2.axis(0).hi));
        }
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut lhs = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for iv in intervals {
        match cur {
            Some((lo, hi)) if iv.0 <= hi + 1e-15 => cur = Some((lo, hi.max(iv.1))),
            Some((lo, hi)) => {
                lhs += hi - lo;
                cur = Some(iv);
            }
            None => cur = Some(iv),
        }
    }
    if let Some((lo, hi)) = cur {
        lhs += hi - lo;
    }
    let lam1: f64 = x1.measure(Side::Left).mid();
    let lam2: f64 = x2.measure(Side::Left).mid();
    let rhs = scale * lam1 + lam2;
    let margin = lhs - rhs;
    Ok(FiberKempermanReport { lhs, rhs, margin, ok: margin >= -1e-9 * rhs.max(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxN;
    use crate::group::by_name;

    fn axb_box(res: usize, lo: &[f64; 2], hi: &[f64; 2]) -> GridSet {
        let g = by_name("axb").unwrap();
        GridSet::from_box(g, &[1.0 / res as f64; 2], &BoxN::from_bounds(lo, hi))
    }

    fn fiber_set(res: usize, lo: f64, hi: f64) -> GridSet {
        let g = by_name("R").unwrap();
        GridSet::from_box(g, &[1.0 / res as f64], &BoxN::from_bounds(&[lo], &[hi]))
    }

    #[test]
    fn fiber_profiles_of_unit_box() {
        let a = axb_box(64, &[0.0, 0.0], &[1.0, 1.0]);
        let f = left_right_fibers(&a).unwrap();
        // r ≡ 1 on [0,1]
        for (i, &r) in f.r_vals.iter().enumerate() {
            assert!((r - 1.0).abs() < 1e-12, "column {i}: r = {r}");
        }
        // ∫ r = ν(A) = 1 and ∫ ℓ = μ(A) = 1 − e⁻¹, exactly
        assert!((f.integral_r() - 1.0).abs() < 1e-12);
        let mu = 1.0 - (-1.0f64).exp();
        assert!((f.integral_l() - mu).abs() < 1e-12);
        // ℓ = Δ·r at column centers
        for (i, (&l, &r)) in f.l_vals.iter().zip(&f.r_vals).enumerate() {
            let uc = (i as f64 + 0.5) / 64.0;
            assert!((l - (-uc).exp() * r).abs() < 1e-12);
        }
        // the exact fiber integrals sit inside the measure brackets
        let m = a.measure(Side::Left);
        assert!(m.lower - 1e-12 <= f.integral_l() && f.integral_l() <= m.upper + 1e-12);
    }

    #[test]
    fn hoelder_chain_on_boxes() {
        let a = axb_box(64, &[0.0, 0.0], &[1.0, 1.0]);
        let rep = hoelder_chain_check(&a).unwrap();
        assert!(rep.chain_ok, "chain margin {}", rep.chain_margin);
        assert!(rep.chain_margin > 1e-4, "unit box should have a real margin");
        assert!(rep.nu_ok && rep.mu_ok);
        // closed forms: ν-bound 2e, μ-bound 3 − e⁻² − 2e⁻¹
        let e = std::f64::consts::E;
        assert!((rep.nu_bound - 2.0 * e).abs() < 1e-9, "nu bound {}", rep.nu_bound);
        let mu_expect = (1.0 - (-2.0f64).exp()) + 2.0 * (1.0 - (-1.0f64).exp());
        assert!((rep.mu_bound - mu_expect).abs() < 1e-9, "mu bound {}", rep.mu_bound);
        // recorded Δ extremes
        assert!((rep.delta_max - 1.0).abs() < 1e-12);
        assert!((rep.delta_min - (-1.0f64).exp()).abs() < 1e-12);

        // a thin u-slab is nearly Δ-constant: tiny relative chain margin
        let slab = axb_box(256, &[0.0, 0.0], &[0.01, 1.0]);
        let rep = hoelder_chain_check(&slab).unwrap();
        assert!(rep.chain_ok);
        let rel = rep.chain_margin / (rep.m2 * rep.m_inv);
        assert!(rel < 1e-3, "slab relative margin {rel}");

        // two u-separated boxes of the same measure have a larger margin
        let g = by_name("axb").unwrap();
        let two = GridSet::from_boxes(
            g,
            &[1.0 / 64.0; 2],
            &[
                BoxN::from_bounds(&[0.0, 0.0], &[0.5, 1.0]),
                BoxN::from_bounds(&[1.5, 0.0], &[2.0, 1.0]),
            ],
        );
        let rep_two = hoelder_chain_check(&two).unwrap();
        let one = axb_box(64, &[0.0, 0.0], &[1.0, 1.0]);
        let rep_one = hoelder_chain_check(&one).unwrap();
        let rel_two = rep_two.chain_margin / (rep_two.m2 * rep_two.m_inv);
        let rel_one = rep_one.chain_margin / (rep_one.m2 * rep_one.m_inv);
        assert!(rel_two > rel_one, "separation should grow the margin");
    }

    #[test]
    fn strict_gap_unit_box_and_slab() {
        // closed forms for the unit box: ν(A²) = 1+2e, μ(A²) = 3−e⁻¹−e⁻²,
        // gap ≈ 0.1026
        let a = axb_box(64, &[0.0, 0.0], &[1.0, 1.0]);
        let rep = strict_gap(&a).unwrap();
        assert!(rep.weak_ok);
        let truth = 1.0
            - ((1.0 / (1.0 + 2.0 * std::f64::consts::E)).sqrt()
                + ((1.0 - (-1.0f64).exp()) / (3.0 - (-1.0f64).exp() - (-2.0f64).exp())).sqrt());
        assert!(rep.gap_lo <= truth && truth <= rep.gap_hi, "gap bracket misses truth {truth}");
        // resolves at 256 cells/axis
        let a = axb_box(256, &[0.0, 0.0], &[1.0, 1.0]);
        let rep = strict_gap(&a).unwrap();
        assert!(rep.resolved, "gap [{}, {}]", rep.gap_lo, rep.gap_hi);

        // thin slab: gap tends to 0 with the slab width
        let slab = axb_box(256, &[0.0, 0.0], &[0.01, 1.0]);
        let rep = strict_gap(&slab).unwrap();
        assert!(rep.weak_ok);
        assert!(rep.gap_hi < 0.02, "slab gap should be near 0, got {}", rep.gap_hi);
    }

    #[test]
    fn conjugation_scaling() {
        let x = fiber_set(64, 0.0, 1.0);
        let e = std::f64::consts::E;
        // g = identity: exact equality
        let rep = conjugation_modulus_check(&x, &Pt::new(&[0.0, 0.0])).unwrap();
        assert!(rep.ok && (rep.measured - 1.0).abs() < 1e-12);
        // g = (1, 0): the chart computation gives scaling Δ(g) = e⁻¹
        let rep = conjugation_modulus_check(&x, &Pt::new(&[1.0, 0.0])).unwrap();
        assert!(rep.ok);
        assert!((rep.measured - 1.0 / e).abs() < 1e-12, "measured {}", rep.measured);
        // g = (−1, 0): factor e
        let rep = conjugation_modulus_check(&x, &Pt::new(&[-1.0, 0.0])).unwrap();
        assert!(rep.ok);
        assert!((rep.measured - e).abs() < 1e-12);
        // the b-component of g does not matter
        let rep = conjugation_modulus_check(&x, &Pt::new(&[1.0, 7.5])).unwrap();
        assert!(rep.ok);
        // refused off the fiber
        let bad = axb_box(16, &[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(conjugation_modulus_check(&bad, &Pt::new(&[0.0, 0.0])), Err(Error::NotInFiber)));
    }

    #[test]
    fn fiber_kemperman_holds() {
        let x1 = fiber_set(64, 0.0, 1.0);
        let x2 = fiber_set(64, 0.0, 0.5);
        for (g1, g2) in [
            (Pt::new(&[0.0, 0.0]), Pt::new(&[0.0, 0.0])),
            (Pt::new(&[0.5, 0.2]), Pt::new(&[-0.25, 1.0])),
            (Pt::new(&[1.0, 0.0]), Pt::new(&[1.0, 3.0])),
        ] {
            let rep = fiber_kemperman_check(&x1, &x2, &g1, &g2).unwrap();
            assert!(rep.ok, "margin {}", rep.margin);
            // intervals meet the bound with equality
            assert!(rep.margin.abs() < 1e-9, "interval case is tight, got {}", rep.margin);
        }
        // a union with a gap has strictly positive margin against intervals
        let g = by_name("R").unwrap();
        let split = GridSet::from_boxes(
            g,
            &[1.0 / 64.0],
            &[BoxN::from_bounds(&[0.0], &[0.25]), BoxN::from_bounds(&[2.0], &[2.25])],
        );
        let rep =
            fiber_kemperman_check(&split, &x2, &Pt::new(&[0.5, 0.0]), &Pt::new(&[0.0, 0.0]))
                .unwrap();
        assert!(rep.ok && rep.margin > 0.1, "split margin {}", rep.margin);
    }
}
