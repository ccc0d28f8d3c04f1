//! Fiber-length functions over compact-kernel quotients and the domination
//! checks that ride on them.
//!
//! Quotients are available exactly for the cylinder groups ℝᵈ×Tᵏ → ℝᵈ: the
//! torus factor is a compact normal subgroup with unit fiber measure, so the
//! fiber length f_A(x) = μ_T(x⁻¹A ∩ T) of a grid set is the exact filled
//! fraction of each fiber column, and ∫ f_A dμ_base = μ(A) holds cellwise.

use crate::chart::{BoxN, MAX_DIM};
use crate::error::{Error, Result};
use crate::grid::{Axis, GridSet, GridSpec};
use crate::group::{by_name, GroupKind, GroupModel, Side};
use crate::product::{self, SetMode};
use crate::report::Vb;

/// Projection ℝᵈ×Tᵏ → ℝᵈ dropping the compact axes.
#[derive(Clone, Copy, Debug)]
pub struct QuotientMap {
    pub total: GroupModel,
    pub base: GroupModel,
    base_dim: usize,
}

impl QuotientMap {
    pub fn new(total: GroupModel) -> Result<QuotientMap> {
        match total.kind {
            GroupKind::Cylinder { d, .. } if d >= 1 && d <= 3 => {
                let base_name = match d {
                    1 => "R",
                    2 => "R^2",
                    _ => "R^3",
                };
                Ok(QuotientMap { total, base: by_name(base_name)?, base_dim: d })
            }
            _ => Err(Error::NoQuotient(total.name)),
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }
}

/// Sampled fiber-length function over a base window.
#[derive(Clone, Debug)]
pub struct FiberProfile {
    base_group: GroupModel,
    spec: GridSpec,
    values: Vec<f64>,
}

impl FiberProfile {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Smallest positive sample (0 when the profile vanishes).
    pub fn min_positive(&self) -> f64 {
        self.values.iter().copied().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min).min(f64::INFINITY)
    }

    /// ∫ profile dμ_base (density 1 on the base).
    pub fn integral(&self) -> f64 {
        let vol = self.spec.cell_volume();
        self.values.iter().sum::<f64>() * vol
    }

    /// Base cells with profile ≥ t (t ≤ 0 gives the support closure).
    pub fn superlevel(&self, t: f64) -> GridSet {
        let mut out = GridSet::empty(self.base_group, self.spec);
        let threshold = if t <= 0.0 { f64::MIN_POSITIVE } else { t };
        for (i, &v) in self.values.iter().enumerate() {
            if v >= threshold {
                let g = self.unravel(i);
                out.insert_cell(&g);
            }
        }
        out
    }

    pub fn support(&self) -> GridSet {
        self.superlevel(0.0)
    }

    fn unravel(&self, idx: usize) -> [i64; MAX_DIM] {
        let dim = self.spec.dim();
        let mut rem = idx;
        let mut g = [0i64; MAX_DIM];
        for a in (0..dim).rev() {
            g[a] = self.spec.axis(a).lo + (rem % self.spec.axis(a).n) as i64;
            rem /= self.spec.axis(a).n;
        }
        g
    }

    pub fn value_at(&self, cell: &[i64; MAX_DIM]) -> f64 {
        let dim = self.spec.dim();
        let mut idx = 0usize;
        for a in 0..dim {
            let off = cell[a] - self.spec.axis(a).lo;
            if off < 0 || off >= self.spec.axis(a).n as i64 {
                return 0.0;
            }
            idx = idx * self.spec.axis(a).n + off as usize;
        }
        self.values[idx]
    }

    /// μ(A △ π⁻¹(S)) computed from the profile: a base cell in S misses
    /// (1 − f) of its fiber, a cell outside S contributes f.
    pub fn cylinder_symdiff(&self, s: &GridSet) -> f64 {
        let vol = self.spec.cell_volume();
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let g = self.unravel(i);
            if s.contains_cell(&g) {
                acc += (1.0 - v) * vol;
            } else {
                acc += v * vol;
            }
        }
        // cells of s outside the profile window are whole missing fibers
        for c in s.iter_cells() {
            let inside = {
                let dim = self.spec.dim();
                (0..dim).all(|a| {
                    let off = c[a] - self.spec.axis(a).lo;
                    off >= 0 && off < self.spec.axis(a).n as i64
                })
            };
            if !inside {
                acc += vol;
            }
        }
        acc
    }

    /// Serialize: base header plus per-cell values.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("haarlab-profile v1\n");
        s.push_str(&format!("base {}\n", self.base_group.name));
        s.push_str(&format!("dim {}\n", self.spec.dim()));
        for a in 0..self.spec.dim() {
            let ax = self.spec.axis(a);
            s.push_str(&format!("axis {a} h {} lo {} n {}\n", ax.h, ax.lo, ax.n));
        }
        s.push_str("values");
        for v in &self.values {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
        s
    }
}

/// Exact fiber profile of a grid set under the quotient map.
pub fn fiber_profile(q: &QuotientMap, a: &GridSet) -> Result<FiberProfile> {
    if a.group().name != q.total.name {
        return Err(Error::GroupMismatch(a.group().name, q.total.name));
    }
    let d = q.base_dim;
    let total_dim = q.total.chart_dim();
    let mut axes = Vec::with_capacity(d);
    for a_idx in 0..d {
        let ax = a.spec().axis(a_idx);
        axes.push(Axis { h: ax.h, lo: ax.lo, n: ax.n, circle: false });
    }
    let spec = GridSpec::new(&axes);
    let fiber_cells: usize = (d..total_dim).map(|ax| a.spec().axis(ax).n).product();
    let mut values = vec![0.0; spec.total_cells()];
    for cell in a.iter_cells() {
        let mut idx = 0usize;
        for ax in 0..d {
            let off = (cell[ax] - spec.axis(ax).lo) as usize;
            idx = idx * spec.axis(ax).n + off;
        }
        values[idx] += 1.0 / fiber_cells as f64;
    }
    for v in &mut values {
        *v = v.min(1.0);
    }
    Ok(FiberProfile { base_group: q.base, spec, values })
}

/// Base projection of a set: the support of its fiber profile.
pub fn project(q: &QuotientMap, a: &GridSet) -> Result<GridSet> {
    Ok(fiber_profile(q, a)?.support())
}

/// Layer-cake quadrature ∫ μ_base(L⁺(t)) dt on a midpoint ladder.
#[derive(Clone, Copy, Debug)]
pub struct LayerCakeReport {
    pub quadrature: f64,
    pub integral: f64,
    pub mu_total: Vb,
    pub tol: f64,
    pub pass: bool,
}

pub fn layer_cake_check(q: &QuotientMap, a: &GridSet, levels: usize) -> Result<LayerCakeReport> {
    let f = fiber_profile(q, a)?;
    let alpha = f.max();
    let vol = f.spec.cell_volume();
    let mut quad = 0.0;
    if alpha > 0.0 {
        let dt = alpha / levels as f64;
        for i in 0..levels {
            let t = (i as f64 + 0.5) * dt;
            quad += f.superlevel(t).count() as f64 * vol * dt;
        }
    }
    let m = a.measure(Side::Left);
    let support_mass = f.support().count() as f64 * vol;
    let tol = support_mass * alpha / levels as f64 + 1e-12;
    let integral = f.integral();
    let pass = (quad - m.mid()).abs() <= tol + m.width() && (integral - m.mid()).abs() <= 1e-9 + m.width();
    Ok(LayerCakeReport { quadrature: quad, integral, mu_total: Vb::new(m.lower, m.upper), tol, pass })
}

/// Superlevel product inclusion over a t-ladder:
/// L⁺_{f_A}(t₁) · L⁺_{f_B}(t₂) ⊆ L⁺_{f_AB}(max{t₁,t₂}) cellwise, with the
/// left side from the inner base product and the right side from the outer
/// product's profile (both conservative for the inclusion).
pub fn superlevel_inclusion_check(
    q: &QuotientMap,
    a: &GridSet,
    b: &GridSet,
    ladder: usize,
) -> Result<bool> {
    let fa = fiber_profile(q, a)?;
    let fb = fiber_profile(q, b)?;
    let ab = product::product_set(a, b, SetMode::Outer)?;
    let fab = fiber_profile(q, &ab)?;
    let (aa, ab_max) = (fa.max(), fb.max());
    for i in 1..=ladder {
        for j in 1..=ladder {
            let t1 = aa * i as f64 / ladder as f64;
            let t2 = ab_max * j as f64 / ladder as f64;
            let la = fa.superlevel(t1);
            let lb = fb.superlevel(t2);
            if la.is_empty() || lb.is_empty() {
                continue;
            }
            let prod = product::product_set(&la, &lb, SetMode::Inner)?;
            let target = fab.superlevel(t1.max(t2));
            if !prod.is_subset_of(&target)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Verdict of the equality-case quotient domination check.
#[derive(Clone, Debug)]
pub struct DominationVerdict {
    pub hypothesis_met: bool,
    /// Gap interval μ(AB)^{1/n} − μ(A)^{1/n} − μ(B)^{1/n}.
    pub gap: Vb,
    pub full_fiber_a: bool,
    pub full_fiber_b: bool,
    pub base_equality: bool,
    pub base_a: GridSet,
    pub base_b: GridSet,
}

/// Exact-equality quotient domination: when μ(AB)^{1/n} = μ(A)^{1/n} + μ(B)^{1/n},
/// both sets are full-fiber preimages and the equality descends to the base.
pub fn equality_domination_check(
    q: &QuotientMap,
    a: &GridSet,
    b: &GridSet,
    n: u32,
) -> Result<DominationVerdict> {
    if !q.total.unimodular {
        return Err(Error::NonUnimodular("equality_domination_check", q.total.name));
    }
    if n != q.total.ndim {
        return Err(Error::HypothesisNotMet {
            check: "equality_domination_check",
            detail: format!("n = {n} must equal ndim = {} (catalog brackets are tight)", q.total.ndim),
        });
    }
    let ab = product::product_bracket(a, b)?;
    let m_ab = ab.measure(Side::Left);
    let m_a = a.measure(Side::Left);
    let m_b = b.measure(Side::Left);
    if m_a.lower <= 0.0 || m_b.lower <= 0.0 {
        return Err(Error::ZeroMeasure("equality_domination_check"));
    }
    let e = 1.0 / n as f64;
    let gap = Vb::new(
        m_ab.lower.powf(e) - m_a.upper.powf(e) - m_b.upper.powf(e),
        m_ab.upper.powf(e) - m_a.lower.powf(e) - m_b.lower.powf(e),
    );
    let tol = 1e-9 + gap.width();
    let hypothesis_met = gap.lo <= tol && gap.hi >= -tol;

    let fa = fiber_profile(q, a)?;
    let fb = fiber_profile(q, b)?;
    let full = |f: &FiberProfile| {
        f.superlevel(0.0).count() == f.superlevel(1.0 - 1e-9).count()
    };
    let full_fiber_a = full(&fa);
    let full_fiber_b = full(&fb);
    let base_a = fa.support();
    let base_b = fb.support();
    let base_equality = if hypothesis_met {
        let pb = product::product_bracket(&base_a, &base_b)?;
        let mb = pb.measure(Side::Left);
        let la = base_a.measure(Side::Left);
        let lb = base_b.measure(Side::Left);
        let g_lo = mb.lower.powf(e) - la.upper.powf(e) - lb.upper.powf(e);
        let g_hi = mb.upper.powf(e) - la.lower.powf(e) - lb.lower.powf(e);
        g_lo <= 1e-9 + (g_hi - g_lo) && g_hi >= -1e-9 - (g_hi - g_lo)
    } else {
        false
    };
    Ok(DominationVerdict {
        hypothesis_met,
        gap,
        full_fiber_a: hypothesis_met && full_fiber_a,
        full_fiber_b: hypothesis_met && full_fiber_b,
        base_equality,
        base_a,
        base_b,
    })
}

/// Result of the threshold-ladder search for near-minimal expansion.
#[derive(Clone, Debug)]
pub struct AlmostDominationReport {
    pub discrepancy: Vb,
    pub t_a: f64,
    pub t_b: f64,
    pub symdiff_a: f64,
    pub symdiff_b: f64,
    pub base_discrepancy: Vb,
    /// μ(A△π⁻¹A′) ≤ 3𝔡 and μ(B△π⁻¹B′) ≤ 3𝔡.
    pub symdiff_within: bool,
    /// 𝔡_base(A′,B′) ≤ 7𝔡.
    pub base_within: bool,
    pub base_a: GridSet,
    pub base_b: GridSet,
}

/// Search superlevel thresholds minimizing the cylinder symmetric difference
/// and verify the almost-domination conclusions on the witnesses found.
pub fn almost_domination_check(
    q: &QuotientMap,
    a: &GridSet,
    b: &GridSet,
) -> Result<AlmostDominationReport> {
    if !q.total.unimodular {
        return Err(Error::NonUnimodular("almost_domination_check", q.total.name));
    }
    let disc = crate::metrics::discrepancy(a, b)?;
    let m_a = a.measure(Side::Left);
    let m_b = b.measure(Side::Left);
    if disc.hi >= m_a.lower.min(m_b.lower) {
        return Err(Error::HypothesisNotMet {
            check: "almost_domination_check",
            detail: format!(
                "discrepancy {:.6} not below min measure {:.6}",
                disc.hi,
                m_a.lower.min(m_b.lower)
            ),
        });
    }
    let fa = fiber_profile(q, a)?;
    let fb = fiber_profile(q, b)?;
    let pick = |f: &FiberProfile| -> (f64, f64, GridSet) {
        let alpha = f.max();
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..=64 {
            let t = alpha * i as f64 / 64.0;
            let s = f.superlevel(t);
            let sd = f.cylinder_symdiff(&s);
            if sd < best.0 {
                best = (sd, t);
            }
        }
        let set = f.superlevel(best.1);
        (best.1, best.0, set)
    };
    let (t_a, symdiff_a, base_a) = pick(&fa);
    let (t_b, symdiff_b, base_b) = pick(&fb);
    let base_disc = crate::metrics::discrepancy(&base_a, &base_b)?;
    let d_ref = disc.lo.max(0.0);
    let tol = disc.width() + 1e-9;
    let symdiff_within = symdiff_a <= 3.0 * d_ref + 3.0 * tol && symdiff_b <= 3.0 * d_ref + 3.0 * tol;
    let base_within = base_disc.hi <= 7.0 * d_ref + 7.0 * tol;
    Ok(AlmostDominationReport {
        discrepancy: disc,
        t_a,
        t_b,
        symdiff_a,
        symdiff_b,
        base_discrepancy: base_disc,
        symdiff_within,
        base_within,
        base_a,
        base_b,
    })
}

/// Pushforward expansion: measured K with μ(A²) ≤ Kμ(A), the α/2K profile
/// split, its two intermediate inequalities, and the final 32K⁶ bound.
#[derive(Clone, Debug)]
pub struct PushforwardReport {
    pub k: f64,
    pub alpha: f64,
    pub mu_pa: f64,
    pub mu_pa1: f64,
    pub mu_pa2: f64,
    /// μ(πA₂) ≤ 2(K−1)μ(πA₁).
    pub split_ok: bool,
    /// μ(πA₁·πA₁) ≤ K(2K−1)μ(πA₁).
    pub split_product_ok: bool,
    /// μ(π(A²)) ≤ 32K⁶μ(πA).
    pub final_ok: bool,
}

pub fn pushforward_expansion_check(q: &QuotientMap, a: &GridSet) -> Result<PushforwardReport> {
    if !q.total.unimodular {
        return Err(Error::NonUnimodular("pushforward_expansion_check", q.total.name));
    }
    let sq = product::product_bracket(a, a)?;
    let m_a = a.measure(Side::Left);
    if m_a.lower <= 0.0 {
        return Err(Error::ZeroMeasure("pushforward_expansion_check"));
    }
    let k = (sq.measure(Side::Left).upper / m_a.lower).max(1.0 + 1e-9);
    let f = fiber_profile(q, a)?;
    let alpha = f.max();
    let threshold = alpha / (2.0 * k);
    let pa = f.support();
    let pa1 = f.superlevel(threshold);
    let pa2 = pa.difference(&pa1)?;
    let vol = f.spec().cell_volume();
    let mu_pa = pa.count() as f64 * vol;
    let mu_pa1 = pa1.count() as f64 * vol;
    let mu_pa2 = pa2.count() as f64 * vol;
    let split_ok = mu_pa2 <= 2.0 * (k - 1.0) * mu_pa1 + 1e-9;
    let p11 = product::product_set(&pa1, &pa1, SetMode::Outer)?;
    let split_product_ok =
        p11.measure(Side::Left).upper <= k * (2.0 * k - 1.0) * mu_pa1 + 1e-9;
    let proj_sq = project(q, &sq.outer)?;
    let final_ok =
        proj_sq.measure(Side::Left).upper <= 32.0 * k.powi(6) * mu_pa + 1e-9;
    Ok(PushforwardReport { k, alpha, mu_pa, mu_pa1, mu_pa2, split_ok, split_product_ok, final_ok })
}

/// Cylinder constructors: the preimage of a base box, optionally with a notch
/// removed from the fiber over one base cell.
pub fn preimage_box(q: &QuotientMap, h: &[f64], base_lo: &[f64], base_hi: &[f64]) -> GridSet {
    let d = q.base_dim;
    let total_dim = q.total.chart_dim();
    assert_eq!(base_lo.len(), d);
    let mut lo = vec![0.0; total_dim];
    let mut hi = vec![1.0; total_dim];
    lo[..d].copy_from_slice(base_lo);
    hi[..d].copy_from_slice(base_hi);
    GridSet::from_box(q.total, h, &BoxN::from_bounds(&lo, &hi))
}

/// Remove a fiber notch of the given depth (fraction of the fiber) over the
/// base cell containing `at`: the resulting profile dips to 1 − depth there.
pub fn notch_fiber(q: &QuotientMap, set: &GridSet, at: &[f64], depth: f64) -> Result<GridSet> {
    let d = q.base_dim;
    let total_dim = q.total.chart_dim();
    let mut lo = vec![0.0; total_dim];
    let mut hi = vec![0.0; total_dim];
    for i in 0..d {
        let h = set.spec().axis(i).h;
        let idx = (at[i] / h).floor();
        lo[i] = idx * h;
        hi[i] = (idx + 1.0) * h;
    }
    // carve the notch out of the leading torus axis
    for i in d..total_dim {
        lo[i] = 0.0;
        hi[i] = if i == d { depth } else { 1.0 };
    }
    let notch = GridSet::from_box(q.total, &cell_widths(set), &BoxN::from_bounds(&lo, &hi));
    set.difference(&notch)
}

fn cell_widths(s: &GridSet) -> Vec<f64> {
    (0..s.spec().dim()).map(|a| s.spec().axis(a).h).collect()
}

/// All superlevel sets are nested: t₁ ≤ t₂ ⇒ L⁺(t₂) ⊆ L⁺(t₁).
pub fn superlevel_monotone(f: &FiberProfile, ladder: usize) -> bool {
    let alpha = f.max();
    let mut prev: Option<GridSet> = None;
    for i in (1..=ladder).rev() {
        let t = alpha * i as f64 / ladder as f64;
        let s = f.superlevel(t);
        if let Some(p) = &prev {
            if !p.is_subset_of(&s).unwrap_or(false) {
                return false;
            }
        }
        prev = Some(s);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::by_name;

    fn rxt() -> (QuotientMap, Vec<f64>) {
        let g = by_name("RxT").unwrap();
        (QuotientMap::new(g).unwrap(), vec![1.0 / 64.0, 1.0 / 64.0])
    }

    #[test]
    fn quotient_only_for_cylinders() {
        assert!(QuotientMap::new(by_name("RxT").unwrap()).is_ok());
        assert!(QuotientMap::new(by_name("R^2xT").unwrap()).is_ok());
        assert!(QuotientMap::new(by_name("axb").unwrap()).is_err());
        assert!(QuotientMap::new(by_name("R2xT").unwrap()).is_err());
        assert!(QuotientMap::new(by_name("T").unwrap()).is_err());
    }

    #[test]
    fn full_fiber_profile_is_indicator() {
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let f = fiber_profile(&q, &a).unwrap();
        assert!((f.max() - 1.0).abs() < 1e-12);
        assert!((f.integral() - 1.0).abs() < 1e-12);
        assert_eq!(f.support().count(), 64);
        assert_eq!(f.superlevel(0.5).count(), 64);
    }

    #[test]
    fn half_fiber_profile() {
        let (q, h) = rxt();
        let g = q.total;
        let a = GridSet::from_box(g, &h, &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 0.5]));
        let f = fiber_profile(&q, &a).unwrap();
        assert!((f.max() - 0.5).abs() < 1e-12);
        assert!((f.integral() - 0.5).abs() < 1e-12);
        assert_eq!(f.superlevel(0.75).count(), 0);
    }

    #[test]
    fn layer_cake_on_random_cylinder_set() {
        use rand::{Rng, SeedableRng};
        let (q, h) = rxt();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let window = GridSpec::window_for_box(
            &q.total,
            &h,
            &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]),
        );
        let mut s = GridSet::empty(q.total, window);
        for _ in 0..400 {
            s.insert_cell(&[rng.random_range(0i64..64), rng.random_range(0i64..64), 0]);
        }
        let rep = layer_cake_check(&q, &s, 256).unwrap();
        assert!(rep.pass, "layer cake: {rep:?}");
        let f = fiber_profile(&q, &s).unwrap();
        assert!(superlevel_monotone(&f, 16));
    }

    #[test]
    fn equality_domination_accepts_and_rejects() {
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let b = preimage_box(&q, &h, &[0.0], &[2.0]);
        let v = equality_domination_check(&q, &a, &b, 1).unwrap();
        assert!(v.hypothesis_met && v.full_fiber_a && v.full_fiber_b && v.base_equality);
        assert_eq!(v.base_a.count(), 64);
        assert_eq!(v.base_b.count(), 128);

        // half-fiber A: μ(AB) strictly exceeds μ(A)+μ(B)
        let half = GridSet::from_box(q.total, &h, &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 0.5]));
        let v = equality_domination_check(&q, &half, &b, 1).unwrap();
        assert!(!v.hypothesis_met, "gap = {:?}", v.gap);

        assert!(equality_domination_check(&q, &a, &b, 2).is_err());
    }

    #[test]
    fn superlevel_inclusion_on_mixed_fibers() {
        let (q, h) = rxt();
        let g = q.total;
        let a = GridSet::from_box(g, &h, &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 0.75]));
        let b = preimage_box(&q, &h, &[0.0], &[0.5]);
        assert!(superlevel_inclusion_check(&q, &a, &b, 16).unwrap());
    }

    #[test]
    fn almost_domination_full_fiber_and_notch() {
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let b = preimage_box(&q, &h, &[0.0], &[1.0]);
        let rep = almost_domination_check(&q, &a, &b).unwrap();
        assert!(rep.symdiff_a.abs() < 1e-12 && rep.symdiff_b.abs() < 1e-12);
        assert!(rep.symdiff_within && rep.base_within);

        // δ-notch: 𝔡 = δ·h_base, witnesses stay within 3𝔡
        let an = notch_fiber(&q, &a, &[0.5], 0.25).unwrap();
        let rep = almost_domination_check(&q, &an, &b).unwrap();
        assert!(rep.discrepancy.mid() > 0.0);
        assert!(rep.symdiff_within, "notch symdiff: {rep:?}");
        assert!(rep.base_within);
    }

    #[test]
    fn cylinder_preimage_matches_interval_expansion() {
        // K̂ of π⁻¹(I) in RxT equals K̂ of I in R: fibers are invisible to the
        // Ruzsa distance of full-fiber sets
        let (q, h) = rxt();
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let rep_cyl = crate::metrics::asym_expansion_report(&a, &a).unwrap();
        let r = crate::group::by_name("R").unwrap();
        let i = GridSet::from_box(r, &[1.0 / 64.0], &BoxN::from_bounds(&[0.0], &[1.0]));
        let rep_line = crate::metrics::asym_expansion_report(&i, &i).unwrap();
        assert!(
            (rep_cyl.k_hat - rep_line.k_hat).abs() < 1e-6,
            "K̂ cylinder {} vs line {}",
            rep_cyl.k_hat,
            rep_line.k_hat
        );
    }

    #[test]
    fn pushforward_split_cases() {
        let (q, h) = rxt();
        // full fiber: K ≈ 2, πA² = [0,2]: slack is enormous
        let a = preimage_box(&q, &h, &[0.0], &[1.0]);
        let rep = pushforward_expansion_check(&q, &a).unwrap();
        assert!(rep.split_ok && rep.split_product_ok && rep.final_ok);
        assert!((rep.alpha - 1.0).abs() < 1e-12);
        // half fiber: α = 0.5, the split is still dominated by πA₁
        let half = GridSet::from_box(q.total, &h, &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 0.5]));
        let rep = pushforward_expansion_check(&q, &half).unwrap();
        assert!((rep.alpha - 0.5).abs() < 1e-12);
        assert!(rep.split_ok && rep.split_product_ok && rep.final_ok, "{rep:?}");
    }
}
