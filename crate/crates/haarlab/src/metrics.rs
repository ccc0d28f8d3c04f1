//! Scalar functionals of set pairs: Brunn–Minkowski coefficient, Ruzsa
//! distance for possibly nonunimodular groups, discrepancy, the Kemperman
//! margin, and the dimension-bound calculator.
//!
//! All logarithms here are base 2. Bracketed measures enter each functional on
//! the side that keeps the reported claim conservative.

use crate::error::{Error, Result};
use crate::grid::{GridSet, MeasureEstimate};
use crate::group::Side;
use crate::product::{self, SetBracket};
use crate::report::Vb;
use crate::roots::bisect_increasing;

/// Result of solving x^(1/r) + y^(1/r) = 1.
#[derive(Clone, Copy, Debug)]
pub struct BmResult {
    pub r: f64,
    /// No positive root (some ratio reached 1); `r` is the infimum 0.
    pub degenerate: bool,
    /// |x^(1/r) + y^(1/r) − 1| at the returned root.
    pub residual: f64,
}

/// Brunn–Minkowski coefficient from exact ratios x = ν(A)/ν(AB),
/// y = μ(B)/μ(AB), via monotone bisection to absolute tolerance 1e−10.
pub fn bm_from_ratios(x: f64, y: f64) -> BmResult {
    assert!(x > 0.0 && y > 0.0, "ratios must be positive");
    if x >= 1.0 || y >= 1.0 {
        return BmResult { r: 0.0, degenerate: true, residual: f64::NAN };
    }
    let f = |r: f64| x.powf(1.0 / r) + y.powf(1.0 / r) - 1.0;
    // x^(1/r) + y^(1/r) is increasing in r, from −1 at 0⁺ toward 1 at ∞
    let mut hi = 1.0;
    while f(hi) < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let r = bisect_increasing(f, 1e-12, hi, 1e-10);
    BmResult { r, degenerate: false, residual: f(r).abs() }
}

/// Brunn–Minkowski coefficient of a pair with bracket endpoints.
#[derive(Clone, Copy, Debug)]
pub struct BmReport {
    /// From midpoint measures.
    pub point: BmResult,
    /// Certified lower end (small ratios: outer product, lower numerators).
    pub lo: f64,
    /// Certified upper end; infinite when the inner product is degenerate.
    pub hi: f64,
}

pub fn bm_coefficient(a: &GridSet, b: &GridSet) -> Result<BmReport> {
    let ab = product::product_bracket(a, b)?;
    let nu_a = a.measure(Side::Right);
    let mu_b = b.measure(Side::Left);
    if nu_a.lower <= 0.0 || mu_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("bm_coefficient"));
    }
    let nu_ab = ab.measure(Side::Right);
    let mu_ab = ab.measure(Side::Left);
    if nu_ab.upper <= 0.0 || mu_ab.upper <= 0.0 {
        return Err(Error::ZeroMeasure("bm_coefficient"));
    }
    let clamp = |v: f64| v.min(1.0);
    let point = bm_from_ratios(
        clamp(nu_a.mid() / nu_ab.mid()),
        clamp(mu_b.mid() / mu_ab.mid()),
    );
    let lo = bm_from_ratios(
        clamp(nu_a.lower / nu_ab.upper),
        clamp(mu_b.lower / mu_ab.upper),
    );
    let hi = if nu_ab.lower > 0.0 && mu_ab.lower > 0.0 {
        let x = nu_a.upper / nu_ab.lower;
        let y = mu_b.upper / mu_ab.lower;
        if x >= 1.0 || y >= 1.0 {
            f64::INFINITY
        } else {
            bm_from_ratios(x, y).r
        }
    } else {
        f64::INFINITY
    };
    Ok(BmReport { point, lo: lo.r, hi })
}

/// Ruzsa distance bracket, in bits.
#[derive(Clone, Copy, Debug)]
pub struct RuzsaDistance {
    pub lo: f64,
    pub hi: f64,
}

impl RuzsaDistance {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn positive(m: &MeasureEstimate, what: &'static str) -> Result<()> {
    if m.upper <= 0.0 {
        return Err(Error::ZeroMeasure(what));
    }
    Ok(())
}

/// d(A,B) = log₂ [ν(AB⁻¹)·μ(AB⁻¹) / (ν(A)·μ(B⁻¹))].
pub fn ruzsa_distance(a: &GridSet, b: &GridSet) -> Result<RuzsaDistance> {
    let b_inv = product::inverse_bracket(b)?;
    let prod = SetBracket {
        outer: product::product_set(a, &b_inv.outer, product::SetMode::Outer)?,
        inner: product::product_set(a, &b_inv.inner, product::SetMode::Inner)?,
    };
    distance_from_parts(
        &prod.measure(Side::Right),
        &prod.measure(Side::Left),
        &a.measure(Side::Right),
        &b_inv.measure(Side::Left),
    )
}

/// d(A,B⁻¹) computed without rasterizing the inverse twice:
/// (B⁻¹)⁻¹ = B, so the distance reads off the product AB directly.
pub fn ruzsa_distance_to_inverse(a: &GridSet, b: &GridSet) -> Result<RuzsaDistance> {
    let prod = product::product_bracket(a, b)?;
    distance_from_parts(
        &prod.measure(Side::Right),
        &prod.measure(Side::Left),
        &a.measure(Side::Right),
        &b.measure(Side::Left),
    )
}

fn distance_from_parts(
    nu_p: &MeasureEstimate,
    mu_p: &MeasureEstimate,
    nu_a: &MeasureEstimate,
    mu_b: &MeasureEstimate,
) -> Result<RuzsaDistance> {
    if nu_a.lower <= 0.0 || mu_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("ruzsa_distance"));
    }
    positive(nu_p, "ruzsa_distance")?;
    positive(mu_p, "ruzsa_distance")?;
    let hi = ((nu_p.upper * mu_p.upper) / (nu_a.lower * mu_b.lower)).log2();
    let lo = if nu_p.lower > 0.0 && mu_p.lower > 0.0 {
        ((nu_p.lower * mu_p.lower) / (nu_a.upper * mu_b.upper)).log2()
    } else {
        f64::NEG_INFINITY
    };
    Ok(RuzsaDistance { lo, hi })
}

/// Discrepancy 𝔡(A,B) = μ(AB) − μ(A) − μ(B), unimodular groups only.
pub fn discrepancy(a: &GridSet, b: &GridSet) -> Result<Vb> {
    if !a.group().unimodular {
        return Err(Error::NonUnimodular("discrepancy", a.group().name));
    }
    let ab = product::product_bracket(a, b)?;
    let m_ab = ab.measure(Side::Left);
    let m_a = a.measure(Side::Left);
    let m_b = b.measure(Side::Left);
    Ok(Vb::new(
        m_ab.lower - m_a.upper - m_b.upper,
        m_ab.upper - m_a.lower - m_b.lower,
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct KempermanReport {
    /// Conservative margin: lower μ(AB) minus the min-sum bound at upper sides.
    pub margin: f64,
    /// Optimistic end of the margin bracket.
    pub margin_hi: f64,
    /// Bracket-width tolerance for this instance.
    pub tol: f64,
    pub pass: bool,
    /// Whether min{μ(A)+μ(B), μ(G)} resolved to the total-measure branch.
    pub group_branch: bool,
}

/// μ(AB) ≥ min{μ(A)+μ(B), μ(G)} − tol on connected unimodular groups.
pub fn kemperman_check(a: &GridSet, b: &GridSet) -> Result<KempermanReport> {
    if !a.group().unimodular {
        return Err(Error::NonUnimodular("kemperman_check", a.group().name));
    }
    let ab = product::product_bracket(a, b)?;
    let m_ab = ab.measure(Side::Left);
    let m_a = a.measure(Side::Left);
    let m_b = b.measure(Side::Left);
    if m_a.lower <= 0.0 || m_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("kemperman_check"));
    }
    let total = a.group().total_measure().unwrap_or(f64::INFINITY);
    let bound_hi = (m_a.upper + m_b.upper).min(total);
    let bound_lo = (m_a.lower + m_b.lower).min(total);
    let margin = m_ab.lower - bound_hi;
    let margin_hi = m_ab.upper - bound_lo;
    let tol = m_ab.width() + m_a.width() + m_b.width() + 1e-12;
    Ok(KempermanReport {
        margin,
        margin_hi,
        tol,
        pass: margin >= -tol,
        group_branch: total <= m_a.upper + m_b.upper,
    })
}

/// ⌊log₂K⌋(⌊log₂K⌋+1)/2 for K > 1.
pub fn dimension_bound(k: f64) -> Result<u64> {
    if !(k > 1.0) {
        return Err(Error::HypothesisNotMet {
            check: "dimension_bound",
            detail: format!("requires K > 1, got {k}"),
        });
    }
    let m = k.log2().floor() as u64;
    Ok(m * (m + 1) / 2)
}

/// ⌊log₂K / 2⌋(1 + ⌊log₂K / 2⌋)/2 for K > 1: the quotient dimension bound in
/// the asymmetric (two-set) route.
pub fn dimension_bound_half(k: f64) -> Result<u64> {
    if !(k > 1.0) {
        return Err(Error::HypothesisNotMet {
            check: "dimension_bound_half",
            detail: format!("requires K > 1, got {k}"),
        });
    }
    let m = (k.log2() / 2.0).floor() as u64;
    Ok(m * (m + 1) / 2)
}

/// Full per-pair expansion report.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub mu_a: MeasureEstimate,
    pub nu_a: MeasureEstimate,
    pub mu_b: MeasureEstimate,
    pub mu_ab: MeasureEstimate,
    pub nu_ab: MeasureEstimate,
    pub bm: Option<BmReport>,
    pub ruzsa: RuzsaDistance,
    pub discrepancy: Option<Vb>,
    pub kemperman: Option<KempermanReport>,
    /// Symmetric expansion ratio μ(A²)/μ(A) when A = B.
    pub k_hat: Option<Vb>,
}

pub fn expansion_report(a: &GridSet, b: &GridSet) -> Result<ExpansionReport> {
    let ab = product::product_bracket(a, b)?;
    let mu_a = a.measure(Side::Left);
    let nu_a = a.measure(Side::Right);
    let mu_b = b.measure(Side::Left);
    let mu_ab = ab.measure(Side::Left);
    let nu_ab = ab.measure(Side::Right);
    if mu_a.lower <= 0.0 || mu_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("expansion_report"));
    }
    let bm = bm_coefficient(a, b).ok();
    let ruzsa = ruzsa_distance(a, b)?;
    let unimod = a.group().unimodular;
    let discrepancy = if unimod { Some(discrepancy(a, b)?) } else { None };
    let kemperman = if unimod { Some(kemperman_check(a, b)?) } else { None };
    let k_hat = if a.same_cells(b)? {
        Some(Vb::new(mu_ab.lower / mu_a.upper, mu_ab.upper / mu_a.lower))
    } else {
        None
    };
    Ok(ExpansionReport { mu_a, nu_a, mu_b, mu_ab, nu_ab, bm, ruzsa, discrepancy, kemperman, k_hat })
}

/// Report for the asymmetric small-expansion route: a measured K̂ from the
/// Ruzsa distance, the implied group-level Brunn–Minkowski bound, and the
/// dimension bounds for the Lie quotient.
#[derive(Clone, Debug)]
pub struct AsymExpansionReport {
    /// d(A, B⁻¹) bracket.
    pub d_inv: RuzsaDistance,
    /// K̂ = 2^d at the conservative end.
    pub k_hat: f64,
    /// log₂(K̂)/2: bound on BM(A,B), hence on the group coefficient.
    pub bm_group_bound: f64,
    pub bm_pair: Option<BmReport>,
    /// Per-instance verification BM(A,B) ≤ log₂(K̂)/2 (up to brackets).
    pub bm_within_bound: bool,
    /// ⌊log₂K̂/2⌋(1+⌊log₂K̂/2⌋)/2.
    pub dim_bound_half: u64,
    /// ⌊log₂K̂⌋(⌊log₂K̂⌋+1)/2 — the symmetric-route bound for comparison.
    pub dim_bound_full: u64,
    /// Projected-set expansion bounds reported under both displayed constants.
    pub pushforward_bound_cubed: f64,
    pub pushforward_bound_sixth: f64,
    /// Symmetric expansion ratio and its floor when A = B on a noncompact
    /// unimodular group: the product-set lower bound forces ratio ≥ 2.
    pub k_sym: Option<Vb>,
    pub k_sym_floor_met: Option<bool>,
}

pub fn asym_expansion_report(a: &GridSet, b: &GridSet) -> Result<AsymExpansionReport> {
    let d_inv = ruzsa_distance_to_inverse(a, b)?;
    let k_hat = d_inv.hi.exp2().max(1.0 + 1e-9);
    let bm_group_bound = d_inv.hi / 2.0;
    let bm_pair = bm_coefficient(a, b).ok();
    let bm_within_bound = match &bm_pair {
        Some(r) => r.lo <= bm_group_bound + 1e-9,
        None => true,
    };
    let k_sym = if a.same_cells(b)? {
        let ab = product::product_bracket(a, b)?;
        let m_ab = ab.measure(Side::Left);
        let m_a = a.measure(Side::Left);
        if m_a.lower > 0.0 {
            Some(Vb::new(m_ab.lower / m_a.upper, m_ab.upper / m_a.lower))
        } else {
            None
        }
    } else {
        None
    };
    let k_sym_floor_met = k_sym.map(|k| {
        let noncompact = a.group().total_measure().is_none();
        !noncompact || !a.group().unimodular || k.hi >= 2.0 - 1e-9
    });
    Ok(AsymExpansionReport {
        d_inv,
        k_hat,
        bm_group_bound,
        bm_pair,
        bm_within_bound,
        dim_bound_half: dimension_bound_half(k_hat)?,
        dim_bound_full: dimension_bound(k_hat)?,
        pushforward_bound_cubed: 32.0 * k_hat.powi(3),
        pushforward_bound_sixth: 32.0 * k_hat.powi(6),
        k_sym,
        k_sym_floor_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxN;
    use crate::group::by_name;

    fn box_set(name: &str, res: usize, lo: &[f64], hi: &[f64]) -> GridSet {
        let g = by_name(name).unwrap();
        let h = vec![1.0 / res as f64; g.chart_dim()];
        GridSet::from_box(g, &h, &BoxN::from_bounds(lo, hi))
    }

    #[test]
    fn bm_ratio_examples() {
        // x = y = 1/2 ⇒ r = 1 ; x = y = 1/4 ⇒ r = 2
        let r = bm_from_ratios(0.5, 0.5);
        assert!((r.r - 1.0).abs() < 1e-9 && r.residual < 1e-9);
        let r = bm_from_ratios(0.25, 0.25);
        assert!((r.r - 2.0).abs() < 1e-9);
        // x = 1/2, y = 1/4: t + t² = 1 at t = (√5−1)/2, r = ln(1/2)/ln t
        let t = (5.0f64.sqrt() - 1.0) / 2.0;
        let expect = 0.5f64.ln() / t.ln();
        let r = bm_from_ratios(0.5, 0.25);
        assert!((r.r - expect).abs() < 1e-9, "r = {}, expect {expect}", r.r);
        assert!((expect - 1.4404).abs() < 1e-4);
        // degenerate when a ratio reaches 1
        let r = bm_from_ratios(1.0, 0.5);
        assert!(r.degenerate && r.r == 0.0);
    }

    #[test]
    fn bm_unit_cubes_match_dimension() {
        // exact analytic measures: unit cube in ℝᵈ has ratios 2⁻ᵈ
        for d in 1..=3u32 {
            let x = 0.5f64.powi(d as i32);
            let r = bm_from_ratios(x, x);
            assert!((r.r - d as f64).abs() < 1e-6, "dim {d}: r = {}", r.r);
        }
    }

    #[test]
    fn bm_on_grid_intervals() {
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let rep = bm_coefficient(&a, &a).unwrap();
        assert!((rep.point.r - 1.0).abs() < 1e-6);
        assert!(rep.lo <= 1.0 + 1e-9 && 1.0 <= rep.hi + 1e-9);
    }

    #[test]
    fn ruzsa_distance_examples() {
        // full torus: d(T,T) = 0
        let t = box_set("T", 32, &[0.0], &[1.0]);
        let d = ruzsa_distance(&t, &t).unwrap();
        assert!(d.lo <= 1e-9 && d.hi >= -1e-9 && d.hi < 1e-9, "d(T,T) = [{}, {}]", d.lo, d.hi);
        // unit interval on ℝ: AB⁻¹ = [−1,1], d = log₂4 = 2 exactly
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let d = ruzsa_distance(&a, &a).unwrap();
        assert!((d.lo - 2.0).abs() < 1e-9 && (d.hi - 2.0).abs() < 1e-9, "[{}, {}]", d.lo, d.hi);
        // nonnegativity on an axb box (bracket upper end must be ≥ 0), and
        // the coarse value agrees with the 4×-refined evaluation
        let b = box_set("axb", 32, &[0.0, 0.0], &[1.0, 1.0]);
        let d = ruzsa_distance(&b, &b).unwrap();
        assert!(d.hi >= 0.0);
        let fine = box_set("axb", 128, &[0.0, 0.0], &[1.0, 1.0]);
        let df = ruzsa_distance(&fine, &fine).unwrap();
        assert!(
            df.lo <= d.hi + 1e-9 && d.lo <= df.hi + 1e-9,
            "coarse [{}, {}] vs 4× refined [{}, {}]",
            d.lo,
            d.hi,
            df.lo,
            df.hi
        );
        assert!(df.width() < d.width(), "refinement must tighten the bracket");
    }

    #[test]
    fn discrepancy_examples() {
        // intervals: exact equality, 𝔡 = 0
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let b = box_set("R", 64, &[0.0], &[2.0]);
        let d = discrepancy(&a, &b).unwrap();
        assert!(d.lo.abs() < 1e-9 && d.hi.abs() < 1e-9);
        // A = B = [0,1] ∪ [2,3]: A+B = [0,6] has measure 6, 𝔡 = 2
        let g = by_name("R").unwrap();
        let u = GridSet::from_boxes(
            g,
            &[1.0 / 64.0],
            &[BoxN::from_bounds(&[0.0], &[1.0]), BoxN::from_bounds(&[2.0], &[3.0])],
        );
        let d = discrepancy(&u, &u).unwrap();
        assert!((d.mid() - 2.0).abs() < 1e-9, "mid {}", d.mid());
        // full torus: 𝔡 = 1 − 2 = −1
        let t = box_set("T", 32, &[0.0], &[1.0]);
        let d = discrepancy(&t, &t).unwrap();
        assert!((d.mid() + 1.0).abs() < 1e-9);
        // refused on nonunimodular input
        let x = box_set("axb", 16, &[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(discrepancy(&x, &x), Err(Error::NonUnimodular(..))));
    }

    #[test]
    fn kemperman_margins() {
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let rep = kemperman_check(&a, &a).unwrap();
        assert!(rep.pass);
        assert!(rep.margin.abs() <= rep.tol, "margin {} tol {}", rep.margin, rep.tol);
        let t = box_set("T", 32, &[0.0], &[1.0]);
        let rep = kemperman_check(&t, &t).unwrap();
        assert!(rep.pass && rep.group_branch);
        assert!(rep.margin.abs() < 1e-9);
    }

    #[test]
    fn dimension_bound_examples() {
        assert_eq!(dimension_bound(4.0).unwrap(), 3);
        assert_eq!(dimension_bound(2.0).unwrap(), 1);
        assert_eq!(dimension_bound(32.0).unwrap(), 15);
        assert_eq!(dimension_bound(1.5).unwrap(), 0);
        assert!(dimension_bound(1.0).is_err());
        assert_eq!(dimension_bound_half(32.0).unwrap(), 3);
    }

    #[test]
    fn asym_report_on_interval() {
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let rep = asym_expansion_report(&a, &a).unwrap();
        // d(A, A⁻¹) reads off A·A = [0,2]: log₂(2·2/1) = 2, K̂ = 4
        assert!((rep.d_inv.hi - 2.0).abs() < 1e-9, "d = {:?}", rep.d_inv);
        assert!((rep.k_hat - 4.0).abs() < 1e-6);
        assert!(rep.bm_within_bound);
        assert_eq!(rep.dim_bound_full, 3);
        let k = rep.k_sym.unwrap();
        assert!((k.mid() - 2.0).abs() < 1e-9);
        assert_eq!(rep.k_sym_floor_met, Some(true));
    }
}
