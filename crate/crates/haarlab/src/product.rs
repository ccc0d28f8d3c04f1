//! Product sets, inverse sets, and translates with two-sided set brackets.
//!
//! Outer mode returns a superset of the true image restricted to grid cells;
//! inner mode returns a certified subset. Soundness comes from interval
//! enclosures of the group law: outer stamps cells meeting an enclosure of
//! each run-pair image, inner stamps cells inside boxes proven to lie in the
//! image (via the affine structure of left translations, or via a preimage
//! test where no affine certificate exists).

use crate::chart::{BoxN, Iv, Pt};
use crate::error::{Error, Result};
use crate::grid::{GridSet, GridSpec, MeasureEstimate};
use crate::group::{GroupKind, GroupModel, Side};

#[derive(Clone, Copy, Debug)]
pub enum SetMode {
    Outer,
    Inner,
}

#[derive(Clone, Copy, Debug)]
pub struct ProductCfg {
    /// Maximum output extent per noncompact axis, as a multiple of the larger
    /// input extent. Exceeding it raises [`Error::GridOverflow`].
    pub max_extent_factor: f64,
}

impl Default for ProductCfg {
    fn default() -> Self {
        ProductCfg { max_extent_factor: 16.0 }
    }
}

/// Outer and inner approximations of the same set.
#[derive(Clone, Debug)]
pub struct SetBracket {
    pub outer: GridSet,
    pub inner: GridSet,
}

impl SetBracket {
    /// Measure bracket: lower side from the inner set, upper from the outer.
    pub fn measure(&self, side: Side) -> MeasureEstimate {
        let lo = self.inner.measure(side);
        let hi = self.outer.measure(side);
        MeasureEstimate {
            lower: lo.lower,
            upper: hi.upper,
            side,
            resolution: hi.resolution,
        }
    }
}

fn check_pair(a: &GridSet, b: &GridSet) -> Result<()> {
    if a.group().name != b.group().name {
        return Err(Error::GroupMismatch(a.group().name, b.group().name));
    }
    if let Some(ax) = a.spec().same_family(b.spec()) {
        return Err(Error::GridMismatch(ax));
    }
    Ok(())
}

fn cell_widths(s: &GridSet) -> Vec<f64> {
    (0..s.spec().dim()).map(|a| s.spec().axis(a).h).collect()
}

/// Window for an image box, with the overflow cap applied per noncompact axis.
fn image_window(
    group: &GroupModel,
    h: &[f64],
    img: &BoxN,
    input_extents: &[f64],
    cfg: &ProductCfg,
) -> Result<GridSpec> {
    for a in 0..group.chart_dim() {
        if group.is_circle_axis(a) {
            continue;
        }
        let extent = img.axis(a).width();
        let cap = cfg.max_extent_factor * input_extents[a].max(h[a]);
        if extent > cap * (1.0 + 1e-12) {
            return Err(Error::GridOverflow { axis: a, extent, cap });
        }
    }
    Ok(GridSpec::window_for_box(group, h, img))
}

/// Inner certificate for a run-pair image: a box contained in
/// `law(run_a × run_b)`.
///
/// On the non-run axes the output keeps the full interval sum; the fiber
/// range is intersected over all admissible left-factor points, so every
/// point of the returned box is attained by some pair. The intersection
/// costs O(cell width) of fiber extent and vanishes under refinement.
fn run_pair_inner(g: &GroupModel, ra: &BoxN, rb: &BoxN) -> Option<BoxN> {
    match g.kind {
        GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => {
            // translation: the image is exactly the interval sum
            Some(g.law_box(ra, rb))
        }
        GroupKind::AffineLine => {
            // b-range valid for every u in the left cell:
            // ⋂_u (eᵘ·[b′] + [b])
            let u = ra.axis(0);
            let bp = rb.axis(1);
            let lo_scale = if bp.lo >= 0.0 { u.hi.exp() } else { u.lo.exp() };
            let hi_scale = if bp.hi >= 0.0 { u.lo.exp() } else { u.hi.exp() };
            let b_out = Iv {
                lo: lo_scale * bp.lo + ra.axis(1).lo,
                hi: hi_scale * bp.hi + ra.axis(1).hi,
            };
            if b_out.lo > b_out.hi {
                return None;
            }
            Some(BoxN::new(&[u.add(rb.axis(0)), b_out]))
        }
        GroupKind::Heisenberg => {
            // z-range valid for every (x, y′) in the contributing cells
            let shear = ra.axis(0).mul(rb.axis(1));
            let z = ra.axis(2).add(rb.axis(2));
            let z_in = Iv { lo: z.lo + shear.hi, hi: z.hi + shear.lo };
            if z_in.lo > z_in.hi {
                return None;
            }
            Some(BoxN::new(&[
                ra.axis(0).add(rb.axis(0)),
                ra.axis(1).add(rb.axis(1)),
                z_in,
            ]))
        }
        GroupKind::EuclidRotTorus => None,
    }
}

/// Product set `AB` with the requested approximation mode.
pub fn product_set(a: &GridSet, b: &GridSet, mode: SetMode) -> Result<GridSet> {
    product_set_cfg(a, b, mode, &ProductCfg::default())
}

pub fn product_bracket(a: &GridSet, b: &GridSet) -> Result<SetBracket> {
    Ok(SetBracket {
        outer: product_set(a, b, SetMode::Outer)?,
        inner: product_set(a, b, SetMode::Inner)?,
    })
}

pub fn product_set_cfg(
    a: &GridSet,
    b: &GridSet,
    mode: SetMode,
    cfg: &ProductCfg,
) -> Result<GridSet> {
    check_pair(a, b)?;
    let g = *a.group();
    let h = cell_widths(a);
    let (bba, bbb) = match (a.bounding_box(), b.bounding_box()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(GridSet::empty(g, *a.spec())),
    };
    let img = g.law_box(&bba, &bbb);
    let extents: Vec<f64> =
        (0..g.chart_dim()).map(|ax| bba.axis(ax).width().max(bbb.axis(ax).width())).collect();
    let spec = image_window(&g, &h, &img, &extents, cfg)?;
    let mut out = GridSet::empty(g, spec);

    let axis = g.run_axis();
    let runs_a = a.runs_along(axis);
    let runs_b = b.runs_along(axis);
    let boxes_a: Vec<BoxN> = runs_a.iter().map(|r| a.run_box(r)).collect();
    let boxes_b: Vec<BoxN> = runs_b.iter().map(|r| b.run_box(r)).collect();

    match mode {
        SetMode::Outer => {
            for ra in &boxes_a {
                for rb in &boxes_b {
                    out.stamp_box_outer(&g.law_box(ra, rb));
                }
            }
        }
        SetMode::Inner => {
            if matches!(g.kind, GroupKind::EuclidRotTorus) {
                inner_by_preimage(&mut out, a, b, cfg)?;
            } else {
                for ra in &boxes_a {
                    for rb in &boxes_b {
                        if let Some(ib) = run_pair_inner(&g, ra, rb) {
                            out.stamp_box_inner(&ib);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Certify output cells by checking that a whole preimage box lies in `b`:
/// `c ⊆ g·B` whenever the enclosure of `g⁻¹·c` is covered by cells of `B`.
fn inner_by_preimage(out: &mut GridSet, a: &GridSet, b: &GridSet, cfg: &ProductCfg) -> Result<()> {
    let g = *a.group();
    let outer = product_set_cfg(a, b, SetMode::Outer, cfg)?;
    let inverses: Vec<BoxN> = a
        .iter_cells()
        .map(|c| BoxN::from_point(&g.inv(&a.cell_center(&c))))
        .collect();
    for cell in outer.iter_cells() {
        let cb = outer.cell_box(&cell);
        for invp in &inverses {
            let pre = g.law_box(invp, &cb);
            if box_covered_by(b, &pre) {
                out.insert_cell(&cell);
                break;
            }
        }
    }
    Ok(())
}

/// All cells with positive-measure overlap with the box belong to the set
/// (hence the union of set cells covers the closed box).
pub(crate) fn box_covered_by(s: &GridSet, b: &BoxN) -> bool {
    let dim = s.group().chart_dim();
    let mut idx = [0i64; 3];
    cover_rec(s, b, 0, dim, &mut idx)
}

fn cover_rec(s: &GridSet, b: &BoxN, axis: usize, dim: usize, idx: &mut [i64; 3]) -> bool {
    if axis == dim {
        return s.contains_cell(idx);
    }
    let h = s.spec().axis(axis).h;
    let eps = 1e-9;
    let lo = (b.axis(axis).lo / h + eps).floor() as i64;
    let hi = ((b.axis(axis).hi / h - eps).ceil() as i64).max(lo + 1);
    for i in lo..hi {
        idx[axis] = i;
        if !cover_rec(s, b, axis + 1, dim, idx) {
            return false;
        }
    }
    true
}

/// Inverse set `A⁻¹`.
pub fn inverse_set(a: &GridSet, mode: SetMode) -> Result<GridSet> {
    inverse_set_cfg(a, mode, &ProductCfg::default())
}

pub fn inverse_bracket(a: &GridSet) -> Result<SetBracket> {
    Ok(SetBracket {
        outer: inverse_set(a, SetMode::Outer)?,
        inner: inverse_set(a, SetMode::Inner)?,
    })
}

pub fn inverse_set_cfg(a: &GridSet, mode: SetMode, cfg: &ProductCfg) -> Result<GridSet> {
    let g = *a.group();
    let h = cell_widths(a);
    let bba = match a.bounding_box() {
        Some(x) => x,
        None => return Ok(GridSet::empty(g, *a.spec())),
    };
    let img = g.inv_box(&bba);
    let extents: Vec<f64> = (0..g.chart_dim()).map(|ax| bba.axis(ax).width()).collect();
    let spec = image_window(&g, &h, &img, &extents, cfg)?;
    let mut out = GridSet::empty(g, spec);
    match mode {
        SetMode::Outer => {
            for r in &a.runs_along(g.run_axis()) {
                out.stamp_box_outer(&g.inv_box(&a.run_box(r)));
            }
        }
        SetMode::Inner => {
            // c ⊆ A⁻¹ iff c⁻¹ ⊆ A; candidates come from the outer image.
            let outer = inverse_set_cfg(a, SetMode::Outer, cfg)?;
            for cell in outer.iter_cells() {
                let pre = g.inv_box(&outer.cell_box(&cell));
                if box_covered_by(a, &pre) {
                    out.insert_cell(&cell);
                }
            }
        }
    }
    Ok(out)
}

/// Left translate `g·A`.
pub fn left_translate(t: &Pt, a: &GridSet, mode: SetMode) -> Result<GridSet> {
    let g = *a.group();
    let h = cell_widths(a);
    let bba = match a.bounding_box() {
        Some(x) => x,
        None => return Ok(GridSet::empty(g, *a.spec())),
    };
    let img = g.law_box(&BoxN::from_point(t), &bba);
    let extents: Vec<f64> = (0..g.chart_dim()).map(|ax| bba.axis(ax).width()).collect();
    let cfg = ProductCfg::default();
    let spec = image_window(&g, &h, &img, &extents, &cfg)?;
    let mut out = GridSet::empty(g, spec);
    let runs = a.runs_along(g.run_axis());
    match mode {
        SetMode::Outer => {
            for r in &runs {
                let (ob, _) = g.left_translate_box(t, &a.run_box(r));
                out.stamp_box_outer(&ob);
            }
        }
        SetMode::Inner => {
            let mut any_affine = false;
            for r in &runs {
                if let (_, Some(ib)) = g.left_translate_box(t, &a.run_box(r)) {
                    any_affine = true;
                    out.stamp_box_inner(&ib);
                }
            }
            if !any_affine {
                // rotation case: certify cells via the preimage test
                let outer = left_translate(t, a, SetMode::Outer)?;
                let ti = BoxN::from_point(&g.inv(t));
                for cell in outer.iter_cells() {
                    let pre = g.law_box(&ti, &outer.cell_box(&cell));
                    if box_covered_by(a, &pre) {
                        out.insert_cell(&cell);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Right translate `A·g`.
pub fn right_translate(a: &GridSet, t: &Pt, mode: SetMode) -> Result<GridSet> {
    let g = *a.group();
    let h = cell_widths(a);
    let bba = match a.bounding_box() {
        Some(x) => x,
        None => return Ok(GridSet::empty(g, *a.spec())),
    };
    let img = g.law_box(&bba, &BoxN::from_point(t));
    let extents: Vec<f64> = (0..g.chart_dim()).map(|ax| bba.axis(ax).width()).collect();
    let cfg = ProductCfg::default();
    let spec = image_window(&g, &h, &img, &extents, &cfg)?;
    let mut out = GridSet::empty(g, spec);
    let tb = BoxN::from_point(t);
    match mode {
        SetMode::Outer => {
            for r in &a.runs_along(g.run_axis()) {
                out.stamp_box_outer(&g.law_box(&a.run_box(r), &tb));
            }
        }
        SetMode::Inner => {
            // c ⊆ A·g iff c·g⁻¹ ⊆ A
            let outer = right_translate(a, t, SetMode::Outer)?;
            let ti = BoxN::from_point(&g.inv(t));
            for cell in outer.iter_cells() {
                let pre = g.law_box(&outer.cell_box(&cell), &ti);
                if box_covered_by(a, &pre) {
                    out.insert_cell(&cell);
                }
            }
        }
    }
    Ok(out)
}

/// Bracket of the right-translation loss ν(A ∖ Ag) in one pass.
///
/// For each cell c of A the enclosure of c·g⁻¹ decides membership: covered by
/// A certifies c ⊆ Ag, disjoint from A certifies c ∩ Ag = ∅, anything else is
/// borderline and counted only in the upper bound.
pub fn right_translate_loss(a: &GridSet, g: &Pt) -> (f64, f64) {
    TranslateLossCtx::new(a).loss(g, f64::INFINITY)
}

/// Precomputed structure for scanning many right translates of one set.
///
/// The fiber coordinate enters every catalog law additively, so within a run
/// the preimage enclosures of consecutive cells share one constant fiber
/// offset; membership reduces to interval walks against per-column coverage
/// lists instead of per-cell box tests.
pub struct TranslateLossCtx<'a> {
    a: &'a GridSet,
    runs: Vec<BoxN>,
    cols: crate::grid::ColumnIntervals,
    fiber: usize,
    fiber_circle: bool,
    vol: f64,
    nu_lo: f64,
    bb: Option<BoxN>,
}

impl<'a> TranslateLossCtx<'a> {
    pub fn new(a: &'a GridSet) -> Self {
        let gm = a.group();
        let fiber = gm.run_axis();
        let runs = a.runs_along(fiber).iter().map(|r| a.run_box(r)).collect();
        TranslateLossCtx {
            a,
            runs,
            cols: a.column_intervals(fiber),
            fiber,
            fiber_circle: gm.is_circle_axis(fiber),
            vol: a.spec().cell_volume(),
            nu_lo: a.measure(crate::group::Side::Right).lower,
            bb: a.bounding_box(),
        }
    }

    /// Bracket of ν(A ∖ Ag); once the certified loss reaches `reject_at` the
    /// scan stops, which is all a threshold test needs. A bounding-box overlap
    /// bound skips far translates entirely (catalog right densities are 1, so
    /// ν of a region is at most its volume).
    pub fn loss(&self, g: &Pt, reject_at: f64) -> (f64, f64) {
        let gm = self.a.group();
        let gi = BoxN::from_point(&gm.inv(g));
        if reject_at.is_finite() {
            if let Some(bb) = &self.bb {
                let tr = gm.law_box(bb, &BoxN::from_point(g));
                let mut overlap = 1.0;
                for ax in 0..gm.chart_dim() {
                    let w = if gm.is_circle_axis(ax) {
                        bb.axis(ax).width().min(1.0)
                    } else {
                        let lo = bb.axis(ax).lo.max(tr.axis(ax).lo);
                        let hi = bb.axis(ax).hi.min(tr.axis(ax).hi);
                        (hi - lo).max(0.0)
                    };
                    overlap *= w;
                }
                if self.nu_lo - overlap >= reject_at {
                    return (reject_at, reject_at);
                }
            }
        }
        if self.fiber_circle {
            return self.loss_cellwise(&gi, reject_at);
        }
        let dim = gm.chart_dim();
        let h_f = self.a.spec().axis(self.fiber).h;
        let mut lo = 0.0f64;
        let mut up = 0.0f64;
        let mut keys: Vec<[i64; 3]> = Vec::with_capacity(9);
        for run in &self.runs {
            let enc = gm.law_box(run, &gi);
            let s0 = enc.axis(self.fiber).lo; // cell i preimage = [s0 + i·h, s1 + (i+1)·h]
            let s1 = enc.axis(self.fiber).hi - run.axis(self.fiber).width();
            let n = (run.axis(self.fiber).width() / h_f).round() as i64;

            keys.clear();
            keys.push([0i64; 3]);
            for ax in 0..dim {
                if ax == self.fiber {
                    continue;
                }
                let h = self.a.spec().axis(ax).h;
                let lo_i = (enc.axis(ax).lo / h + 1e-9).floor() as i64;
                let hi_i = ((enc.axis(ax).hi / h - 1e-9).ceil() as i64).max(lo_i + 1);
                let m = keys.len();
                for ki in 0..m {
                    for (j, i) in (lo_i..hi_i).enumerate() {
                        let idx = if gm.is_circle_axis(ax) {
                            i.rem_euclid(self.a.spec().axis(ax).n as i64)
                        } else {
                            i
                        };
                        if j == 0 {
                            keys[ki][ax] = idx;
                        } else {
                            let mut kk = keys[ki];
                            kk[ax] = idx;
                            keys.push(kk);
                        }
                    }
                }
            }

            // per-column covered and overlap segments in run-cell indices
            let mut covered: Option<Segs> = None;
            let mut overlap_any = Segs::empty();
            for key in &keys {
                let mut cov = Segs::empty();
                let mut ov = Segs::empty();
                if let Some(list) = self.cols.get(key) {
                    let ie = 1e-9;
                    for &(a, b) in list {
                        // fully inside [a, b]
                        let i_min = ((a - s0) / h_f - ie).ceil() as i64;
                        let i_max = ((b - s1) / h_f + ie).floor() as i64 - 1;
                        cov.push_clamped(i_min, i_max + 1, n);
                        // positive-measure overlap with [a, b]
                        let o_min = ((a - s1) / h_f - 1.0 + ie).floor() as i64 + 1;
                        let o_max = ((b - s0) / h_f - ie).ceil() as i64 - 1;
                        ov.push_clamped(o_min, o_max + 1, n);
                    }
                }
                covered = Some(match covered {
                    Some(c) => c.intersect(&cov),
                    None => cov,
                });
                overlap_any = overlap_any.union(&ov);
            }
            let covered_count = covered.map(|c| c.count()).unwrap_or(0);
            let overlap_count = overlap_any.count();
            up += (n - covered_count) as f64 * self.vol;
            lo += (n - overlap_count) as f64 * self.vol;
            if lo >= reject_at {
                return (lo, up.max(lo));
            }
        }
        (lo, up)
    }

    fn loss_cellwise(&self, gi: &BoxN, reject_at: f64) -> (f64, f64) {
        let gm = self.a.group();
        let mut lo = 0.0f64;
        let mut up = 0.0f64;
        for cell in self.a.iter_cells() {
            let pre = gm.law_box(&self.a.cell_box(&cell), gi);
            if box_covered_by(self.a, &pre) {
                continue;
            }
            up += self.vol;
            if box_disjoint_from(self.a, &pre) {
                lo += self.vol;
                if lo >= reject_at {
                    return (lo, up.max(lo));
                }
            }
        }
        (lo, up)
    }
}

/// Sorted, disjoint integer segments [lo, hi).
#[derive(Clone, Debug)]
struct Segs(Vec<(i64, i64)>);

impl Segs {
    fn empty() -> Segs {
        Segs(Vec::new())
    }

    /// Append a clamped segment; inputs arrive with nondecreasing starts.
    fn push_clamped(&mut self, lo: i64, hi: i64, n: i64) {
        let lo = lo.max(0);
        let hi = hi.min(n);
        if lo >= hi {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if lo <= last.1 {
                last.1 = last.1.max(hi);
                return;
            }
        }
        self.0.push((lo, hi));
    }

    fn count(&self) -> i64 {
        self.0.iter().map(|(a, b)| b - a).sum()
    }

    fn intersect(&self, o: &Segs) -> Segs {
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.0.len() && j < o.0.len() {
            let (a0, a1) = self.0[i];
            let (b0, b1) = o.0[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 <= b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Segs(out)
    }

    fn union(&self, o: &Segs) -> Segs {
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.0.len() || j < o.0.len() {
            let next = if j >= o.0.len() || (i < self.0.len() && self.0[i].0 <= o.0[j].0) {
                let v = self.0[i];
                i += 1;
                v
            } else {
                let v = o.0[j];
                j += 1;
                v
            };
            match merged.last_mut() {
                Some(last) if next.0 <= last.1 => last.1 = last.1.max(next.1),
                _ => merged.push(next),
            }
        }
        Segs(merged)
    }
}

/// No cell with positive-measure overlap with the box belongs to the set.
pub(crate) fn box_disjoint_from(s: &GridSet, b: &BoxN) -> bool {
    let dim = s.group().chart_dim();
    let mut idx = [0i64; 3];
    disjoint_rec(s, b, 0, dim, &mut idx)
}

fn disjoint_rec(s: &GridSet, b: &BoxN, axis: usize, dim: usize, idx: &mut [i64; 3]) -> bool {
    if axis == dim {
        return !s.contains_cell(idx);
    }
    let h = s.spec().axis(axis).h;
    let eps = 1e-9;
    let lo = (b.axis(axis).lo / h + eps).floor() as i64;
    let hi = ((b.axis(axis).hi / h - eps).ceil() as i64).max(lo + 1);
    for i in lo..hi {
        idx[axis] = i;
        if !disjoint_rec(s, b, axis + 1, dim, idx) {
            return false;
        }
    }
    true
}

pub fn left_translate_bracket(t: &Pt, a: &GridSet) -> Result<SetBracket> {
    Ok(SetBracket {
        outer: left_translate(t, a, SetMode::Outer)?,
        inner: left_translate(t, a, SetMode::Inner)?,
    })
}

pub fn right_translate_bracket(a: &GridSet, t: &Pt) -> Result<SetBracket> {
    Ok(SetBracket {
        outer: right_translate(a, t, SetMode::Outer)?,
        inner: right_translate(a, t, SetMode::Inner)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::by_name;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_set(name: &str, res: usize, lo: &[f64], hi: &[f64]) -> GridSet {
        let g = by_name(name).unwrap();
        let h = vec![1.0 / res as f64; g.chart_dim()];
        GridSet::from_box(g, &h, &BoxN::from_bounds(lo, hi))
    }

    #[test]
    fn interval_sum_exact_on_r() {
        let a = box_set("R", 64, &[0.0], &[1.0]);
        let b = product_bracket(&a, &a).unwrap();
        // [0,1]+[0,1] = [0,2]; translation sums land on the lattice exactly
        let m = b.measure(Side::Left);
        assert!((m.lower - 2.0).abs() < 1e-12, "lower {}", m.lower);
        assert!((m.upper - 2.0).abs() < 1e-12, "upper {}", m.upper);
        assert!(b.inner.same_cells(&b.outer).unwrap());
    }

    #[test]
    fn torus_absorbs() {
        let g = by_name("T").unwrap();
        let full = GridSet::from_box(g, &[1.0 / 16.0], &BoxN::from_bounds(&[0.0], &[1.0]));
        let small = GridSet::from_box(g, &[1.0 / 16.0], &BoxN::from_bounds(&[0.25], &[0.375]));
        let p = product_bracket(&full, &small).unwrap();
        assert_eq!(p.outer.count(), 16);
        assert_eq!(p.inner.count(), 16);
        let m = p.measure(Side::Left);
        assert!((m.lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axb_unit_box_square_brackets_truth() {
        // closed forms for A = [0,1]² in the (u,b) chart:
        //   ν(A²) = 1 + 2e, μ(A²) = 3 − e⁻¹ − e⁻²
        let truth_nu = 1.0 + 2.0 * std::f64::consts::E;
        let truth_mu = 3.0 - (-1.0f64).exp() - (-2.0f64).exp();
        let mut prev_width = f64::INFINITY;
        for res in [32usize, 64, 128] {
            let a = box_set("axb", res, &[0.0, 0.0], &[1.0, 1.0]);
            let sq = product_bracket(&a, &a).unwrap();
            let nu = sq.measure(Side::Right);
            let mu = sq.measure(Side::Left);
            assert!(
                nu.lower <= truth_nu && truth_nu <= nu.upper,
                "nu bracket [{}, {}] misses {truth_nu} at res {res}",
                nu.lower,
                nu.upper,
            );
            assert!(
                mu.lower <= truth_mu && truth_mu <= mu.upper,
                "mu bracket [{}, {}] misses {truth_mu} at res {res}",
                mu.lower,
                mu.upper,
            );
            assert!(nu.width() < 0.75 * prev_width, "bracket width not shrinking");
            prev_width = nu.width();
        }
    }

    #[test]
    fn inner_subset_outer_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for name in ["R", "RxT", "axb", "heis3", "R2xT"] {
            let g = by_name(name).unwrap();
            let dim = g.chart_dim();
            let h = vec![1.0 / 16.0; dim];
            for _ in 0..6 {
                let window = GridSpec::window_for_box(
                    &g,
                    &h,
                    &BoxN::from_bounds(&vec![-1.0; dim], &vec![1.0; dim]),
                );
                let mut s1 = GridSet::empty(g, window);
                let mut s2 = s1.clone();
                for _ in 0..25 {
                    let mut i1 = [0i64; 3];
                    let mut i2 = [0i64; 3];
                    for a in 0..dim {
                        let (lo, hi) =
                            if g.is_circle_axis(a) { (0i64, 16i64) } else { (-16i64, 16i64) };
                        i1[a] = rng.random_range(lo..hi);
                        i2[a] = rng.random_range(lo..hi);
                    }
                    s1.insert_cell(&i1);
                    s2.insert_cell(&i2);
                }
                let br = product_bracket(&s1, &s2).unwrap();
                assert!(
                    br.inner.is_subset_of(&br.outer).unwrap(),
                    "inner ⊄ outer on {name}"
                );
                let ib = inverse_bracket(&s1).unwrap();
                assert!(ib.inner.is_subset_of(&ib.outer).unwrap());
                // ν(X) = μ(X⁻¹)
                let nu = s1.measure(Side::Right);
                let mu_inv = ib.measure(Side::Left);
                assert!(
                    nu.lower <= mu_inv.upper + 1e-9 && mu_inv.lower <= nu.upper + 1e-9,
                    "nu = mu∘inv bracket mismatch on {name}"
                );
            }
        }
    }

    #[test]
    fn inverse_on_r_is_negation() {
        let a = box_set("R", 32, &[0.0], &[1.0]);
        let inv = inverse_bracket(&a).unwrap();
        let expect = box_set("R", 32, &[-1.0], &[0.0]);
        assert!(inv.outer.same_cells(&expect).unwrap());
        assert!(inv.inner.same_cells(&expect).unwrap());
        // a symmetric set maps to itself
        let s = box_set("R", 32, &[-1.0], &[1.0]);
        let inv = inverse_bracket(&s).unwrap();
        assert!(inv.outer.same_cells(&s).unwrap());
        assert!(inv.inner.same_cells(&s).unwrap());
    }

    #[test]
    fn translate_scaling_on_axb() {
        // μ(X·x) = Δ(x)·μ(X)
        let g = by_name("axb").unwrap();
        let x = Pt::new(&[1.0, 0.25]);
        let a = box_set("axb", 64, &[0.0, 0.0], &[1.0, 1.0]);
        let mu_a = a.measure(Side::Left);
        let tr = right_translate_bracket(&a, &x).unwrap();
        let mu_t = tr.measure(Side::Left);
        let delta = g.modular(&x);
        let want_lo = delta * mu_a.lower;
        let want_hi = delta * mu_a.upper;
        assert!(
            mu_t.lower <= want_hi + 1e-6 && want_lo <= mu_t.upper + 1e-6,
            "translate scaling bracket mismatch: [{}, {}] vs [{want_lo}, {want_hi}]",
            mu_t.lower,
            mu_t.upper,
        );
        assert!(mu_t.width() < 0.2, "translate bracket too loose: {}", mu_t.width());
        // ν(x·X) = Δ(x)⁻¹·ν(X)
        let nu_a = a.measure(Side::Right);
        let lt = left_translate_bracket(&x, &a).unwrap();
        let nu_t = lt.measure(Side::Right);
        let want = nu_a.mid() / delta;
        assert!(
            nu_t.lower - 1e-6 <= want && want <= nu_t.upper + 1e-6,
            "left translate scaling mismatch: [{}, {}] vs {want}",
            nu_t.lower,
            nu_t.upper,
        );
    }

    #[test]
    fn overflow_fails_loudly() {
        // eᵘ stretches the fiber: a u-long thin box squares to a fiber extent
        // far beyond 16× the input extent
        let a = box_set("axb", 16, &[0.0, 0.0], &[3.0, 0.0625]);
        let err = product_set(&a, &a, SetMode::Outer).unwrap_err();
        assert!(matches!(err, Error::GridOverflow { axis: 1, .. }), "got {err:?}");
    }

    #[test]
    fn rotation_group_products_sound() {
        // quarter turn: R(1/4)·(v1,v2) = (−v2, v1)
        let g = by_name("R2xT").unwrap();
        let h = vec![1.0 / 8.0; 3];
        // A concentrated at θ = 1/4, v near the origin; B at v = (1, 0)
        let a = GridSet::from_box(
            g,
            &h,
            &BoxN::from_bounds(&[0.0, 0.0, 0.25], &[0.125, 0.125, 0.375]),
        );
        let b = GridSet::from_box(
            g,
            &h,
            &BoxN::from_bounds(&[1.0, 0.0, 0.0], &[1.125, 0.125, 0.125]),
        );
        let p = product_bracket(&a, &b).unwrap();
        assert!(!p.outer.is_empty());
        assert!(p.inner.is_subset_of(&p.outer).unwrap());
        // sampled true products land in the outer set
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pa = Pt::new(&[
                rng.random_range(0.0..0.125),
                rng.random_range(0.0..0.125),
                rng.random_range(0.25..0.375),
            ]);
            let pb = Pt::new(&[
                rng.random_range(1.0..1.125),
                rng.random_range(0.0..0.125),
                rng.random_range(0.0..0.125),
            ]);
            let z = g.law(&pa, &pb);
            assert!(p.outer.contains_point(&z), "outer misses true product point");
        }
    }
}
