//! Finite-resolution indicator sets over chart-aligned grids.
//!
//! A [`GridSet`] is a union of closed grid cells, the computational stand-in
//! for a compact set. Cells live on a global lattice: axis `a` with cell width
//! `h` has cell `i` covering `[i·h, (i+1)·h]`, so sets built at the same
//! resolution are always aligned. Circle axes cover the full period `[0,1)`
//! and index arithmetic wraps modulo the cell count.

use crate::chart::{BoxN, Iv, Pt, MAX_DIM};
use crate::error::{Error, Result};
use crate::group::{GroupModel, Side};

/// Relative guard against floating-point ties in cell-range arithmetic.
const TIE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    /// Cell width.
    pub h: f64,
    /// First cell index of the window.
    pub lo: i64,
    /// Number of cells in the window.
    pub n: usize,
    /// Circle axis: the window is the full period and indices wrap mod `n`.
    pub circle: bool,
}

impl Axis {
    fn hi(&self) -> i64 {
        self.lo + self.n as i64
    }
}

/// Grid window: per-axis cell ranges on the global lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    axes: [Axis; MAX_DIM],
    dim: usize,
}

impl GridSpec {
    pub fn new(axes: &[Axis]) -> Self {
        assert!(!axes.is_empty() && axes.len() <= MAX_DIM);
        let mut arr = [Axis { h: 1.0, lo: 0, n: 1, circle: false }; MAX_DIM];
        arr[..axes.len()].copy_from_slice(axes);
        GridSpec { axes: arr, dim: axes.len() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axis(&self, a: usize) -> &Axis {
        debug_assert!(a < self.dim);
        &self.axes[a]
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.axes[a].h).product()
    }

    pub fn total_cells(&self) -> usize {
        (0..self.dim).map(|a| self.axes[a].n).product()
    }

    /// Largest cell width over the axes.
    pub fn resolution(&self) -> f64 {
        (0..self.dim).map(|a| self.axes[a].h).fold(0.0, f64::max)
    }

    /// Same lattice family: equal cell widths and circle flags per axis.
    pub fn same_family(&self, o: &GridSpec) -> Option<usize> {
        if self.dim != o.dim {
            return Some(usize::MAX);
        }
        (0..self.dim).find(|&a| {
            let (x, y) = (self.axes[a], o.axes[a]);
            (x.h - y.h).abs() > 1e-12 * x.h.max(y.h) || x.circle != y.circle
        })
    }

    fn linear(&self, local: &[usize; MAX_DIM]) -> usize {
        let mut idx = 0usize;
        for a in 0..self.dim {
            idx = idx * self.axes[a].n + local[a];
        }
        idx
    }

    /// Hull window of two specs from the same family.
    fn hull(&self, o: &GridSpec) -> GridSpec {
        let mut axes = self.axes;
        for a in 0..self.dim {
            if !axes[a].circle {
                let lo = self.axes[a].lo.min(o.axes[a].lo);
                let hi = self.axes[a].hi().max(o.axes[a].hi());
                axes[a].lo = lo;
                axes[a].n = (hi - lo) as usize;
            }
        }
        GridSpec { axes, dim: self.dim }
    }

    /// Window covering the box (cells with positive-measure overlap), on the
    /// lattice with the given cell widths.
    pub fn window_for_box(group: &GroupModel, h: &[f64], b: &BoxN) -> GridSpec {
        let dim = b.dim();
        let mut axes = [Axis { h: 1.0, lo: 0, n: 1, circle: false }; MAX_DIM];
        for a in 0..dim {
            if group.is_circle_axis(a) {
                let n = (1.0 / h[a]).round() as usize;
                axes[a] = Axis { h: h[a], lo: 0, n, circle: true };
            } else {
                let (lo, hi) = outer_range(b.axis(a), h[a]);
                axes[a] = Axis { h: h[a], lo, n: (hi - lo).max(1) as usize, circle: false };
            }
        }
        GridSpec { axes, dim }
    }
}

/// Cell range [lo, hi) of cells with positive-measure overlap with `iv`.
fn outer_range(iv: Iv, h: f64) -> (i64, i64) {
    let eps = TIE_EPS;
    let lo = (iv.lo / h + eps).floor() as i64;
    let hi = ((iv.hi / h - eps).ceil() as i64).max(lo + 1);
    (lo, hi)
}

/// Cell range [lo, hi) of cells fully contained in `iv`; may be empty.
fn inner_range(iv: Iv, h: f64) -> (i64, i64) {
    let eps = TIE_EPS;
    let lo = (iv.lo / h - eps).ceil() as i64;
    let hi = (iv.hi / h + eps).floor() as i64;
    (lo, hi.max(lo))
}

/// A maximal run of set cells along one axis.
#[derive(Clone, Copy, Debug)]
pub struct Run {
    /// Global indices on the non-run axes (entry at `axis` is the start).
    pub fixed: [i64; MAX_DIM],
    pub axis: usize,
    pub len: usize,
}

/// A finite union of closed grid cells on one group's chart.
#[derive(Clone, Debug)]
pub struct GridSet {
    group: GroupModel,
    spec: GridSpec,
    bits: Vec<u64>,
}

/// Two-sided bracket of a Haar measure.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct MeasureEstimate {
    pub lower: f64,
    pub upper: f64,
    pub side: Side,
    pub resolution: f64,
}

impl MeasureEstimate {
    pub fn zero(side: Side, resolution: f64) -> Self {
        MeasureEstimate { lower: 0.0, upper: 0.0, side, resolution }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl GridSet {
    pub fn empty(group: GroupModel, spec: GridSpec) -> Self {
        assert_eq!(spec.dim(), group.chart_dim());
        let words = spec.total_cells().div_ceil(64);
        GridSet { group, spec, bits: vec![0; words] }
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Cells with positive-measure overlap with the box.
    pub fn from_box(group: GroupModel, h: &[f64], b: &BoxN) -> Self {
        let spec = GridSpec::window_for_box(&group, h, b);
        let mut s = GridSet::empty(group, spec);
        s.stamp_box_outer(b);
        s
    }

    pub fn from_boxes(group: GroupModel, h: &[f64], boxes: &[BoxN]) -> Self {
        assert!(!boxes.is_empty());
        let mut hull = boxes[0];
        for b in &boxes[1..] {
            hull = hull.hull(b);
        }
        let spec = GridSpec::window_for_box(&group, h, &hull);
        let mut s = GridSet::empty(group, spec);
        for b in boxes {
            s.stamp_box_outer(b);
        }
        s
    }

    fn local(&self, global: &[i64; MAX_DIM]) -> Option<[usize; MAX_DIM]> {
        let mut loc = [0usize; MAX_DIM];
        for a in 0..self.spec.dim {
            let ax = self.spec.axes[a];
            let g = if ax.circle { global[a].rem_euclid(ax.n as i64) } else { global[a] };
            if g < ax.lo || g >= ax.hi() {
                return None;
            }
            loc[a] = (g - ax.lo) as usize;
        }
        Some(loc)
    }

    pub fn contains_cell(&self, global: &[i64; MAX_DIM]) -> bool {
        match self.local(global) {
            Some(loc) => {
                let idx = self.spec.linear(&loc);
                self.bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            None => false,
        }
    }

    pub fn insert_cell(&mut self, global: &[i64; MAX_DIM]) -> bool {
        match self.local(global) {
            Some(loc) => {
                let idx = self.spec.linear(&loc);
                self.bits[idx / 64] |= 1 << (idx % 64);
                true
            }
            None => false,
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Global cell containing the point, if inside the window.
    pub fn locate(&self, p: &Pt) -> Option<[i64; MAX_DIM]> {
        let q = self.group.reduce(p);
        let mut idx = [0i64; MAX_DIM];
        for a in 0..self.spec.dim {
            let ax = self.spec.axes[a];
            let i = (q.get(a) / ax.h).floor() as i64;
            let i = if ax.circle { i.rem_euclid(ax.n as i64) } else { i };
            if i < ax.lo || i >= ax.hi() {
                return None;
            }
            idx[a] = i;
        }
        Some(idx)
    }

    pub fn contains_point(&self, p: &Pt) -> bool {
        match self.locate(p) {
            Some(idx) => self.contains_cell(&idx),
            None => false,
        }
    }

    pub fn cell_box(&self, global: &[i64; MAX_DIM]) -> BoxN {
        let mut ivs = [Iv::point(0.0); MAX_DIM];
        for a in 0..self.spec.dim {
            let h = self.spec.axes[a].h;
            ivs[a] = Iv::new(global[a] as f64 * h, (global[a] + 1) as f64 * h);
        }
        BoxN::new(&ivs[..self.spec.dim])
    }

    pub fn cell_center(&self, global: &[i64; MAX_DIM]) -> Pt {
        let mut p = Pt::zero(self.spec.dim);
        for a in 0..self.spec.dim {
            p.set(a, (global[a] as f64 + 0.5) * self.spec.axes[a].h);
        }
        p
    }

    /// Iterate set cells in lexicographic global-index order.
    pub fn iter_cells(&self) -> impl Iterator<Item = [i64; MAX_DIM]> + '_ {
        let dim = self.spec.dim;
        let spec = self.spec;
        (0..spec.total_cells()).filter_map(move |idx| {
            if self.bits[idx / 64] >> (idx % 64) & 1 == 0 {
                return None;
            }
            let mut rem = idx;
            let mut g = [0i64; MAX_DIM];
            for a in (0..dim).rev() {
                g[a] = spec.axes[a].lo + (rem % spec.axes[a].n) as i64;
                rem /= spec.axes[a].n;
            }
            Some(g)
        })
    }

    /// Bounding box of the set cells (None when empty).
    pub fn bounding_box(&self) -> Option<BoxN> {
        let mut lo = [i64::MAX; MAX_DIM];
        let mut hi = [i64::MIN; MAX_DIM];
        let mut any = false;
        for g in self.iter_cells() {
            any = true;
            for a in 0..self.spec.dim {
                lo[a] = lo[a].min(g[a]);
                hi[a] = hi[a].max(g[a]);
            }
        }
        if !any {
            return None;
        }
        let mut ivs = [Iv::point(0.0); MAX_DIM];
        for a in 0..self.spec.dim {
            let h = self.spec.axes[a].h;
            ivs[a] = Iv::new(lo[a] as f64 * h, (hi[a] + 1) as f64 * h);
        }
        Some(BoxN::new(&ivs[..self.spec.dim]))
    }

    /// Stamp all cells with positive-measure overlap with the (closed) box.
    /// The union of stamped closed cells covers the box.
    pub fn stamp_box_outer(&mut self, b: &BoxN) {
        self.stamp_ranges(b, outer_range);
    }

    /// Stamp all cells fully contained in the (closed) box.
    pub fn stamp_box_inner(&mut self, b: &BoxN) {
        self.stamp_ranges(b, inner_range);
    }

    fn stamp_ranges(&mut self, b: &BoxN, range_of: fn(Iv, f64) -> (i64, i64)) {
        let dim = self.spec.dim;
        // Per-axis candidate segments (split circle ranges at the seam).
        let mut segs: [Vec<(i64, i64)>; MAX_DIM] = Default::default();
        for a in 0..dim {
            let ax = self.spec.axes[a];
            let (mut lo, mut hi) = range_of(b.axis(a), ax.h);
            if ax.circle {
                let n = ax.n as i64;
                if hi - lo >= n {
                    segs[a].push((0, n));
                } else {
                    let lo_m = lo.rem_euclid(n);
                    hi = lo_m + (hi - lo);
                    lo = lo_m;
                    if hi <= n {
                        segs[a].push((lo, hi));
                    } else {
                        segs[a].push((lo, n));
                        segs[a].push((0, hi - n));
                    }
                }
            } else {
                let lo = lo.max(ax.lo);
                let hi = hi.min(ax.hi());
                if lo < hi {
                    segs[a].push((lo, hi));
                }
            }
            if segs[a].is_empty() {
                return;
            }
        }
        self.stamp_segments(&segs, 0, &mut [0i64; MAX_DIM]);
    }

    fn stamp_segments(
        &mut self,
        segs: &[Vec<(i64, i64)>; MAX_DIM],
        axis: usize,
        fixed: &mut [i64; MAX_DIM],
    ) {
        let dim = self.spec.dim;
        if axis + 1 == dim {
            for &(lo, hi) in &segs[axis] {
                fixed[axis] = lo;
                let loc = self.local(fixed).expect("stamp range outside window");
                let start = self.spec.linear(&loc);
                let len = (hi - lo) as usize;
                fill_bits(&mut self.bits, start, len);
            }
            return;
        }
        let my_segs = segs[axis].clone();
        for (lo, hi) in my_segs {
            for i in lo..hi {
                fixed[axis] = i;
                self.stamp_segments(segs, axis + 1, fixed);
            }
        }
    }

    /// Re-embed into a window from the same family that contains this one.
    pub fn align_to(&self, spec: &GridSpec) -> GridSet {
        debug_assert!(self.spec.same_family(spec).is_none());
        let mut out = GridSet::empty(self.group, *spec);
        for g in self.iter_cells() {
            let ok = out.insert_cell(&g);
            debug_assert!(ok, "align_to target window does not cover the set");
        }
        out
    }

    fn binary_op(&self, o: &GridSet, f: fn(u64, u64) -> u64) -> Result<GridSet> {
        if self.group.name != o.group.name {
            return Err(Error::GroupMismatch(self.group.name, o.group.name));
        }
        if let Some(a) = self.spec.same_family(&o.spec) {
            return Err(Error::GridMismatch(a));
        }
        let hull = self.spec.hull(&o.spec);
        let a = self.align_to(&hull);
        let b = o.align_to(&hull);
        let bits = a.bits.iter().zip(&b.bits).map(|(&x, &y)| f(x, y)).collect();
        Ok(GridSet { group: self.group, spec: hull, bits })
    }

    pub fn union(&self, o: &GridSet) -> Result<GridSet> {
        self.binary_op(o, |x, y| x | y)
    }

    pub fn intersect(&self, o: &GridSet) -> Result<GridSet> {
        self.binary_op(o, |x, y| x & y)
    }

    pub fn difference(&self, o: &GridSet) -> Result<GridSet> {
        self.binary_op(o, |x, y| x & !y)
    }

    pub fn is_subset_of(&self, o: &GridSet) -> Result<bool> {
        Ok(self.difference(o)?.is_empty())
    }

    pub fn same_cells(&self, o: &GridSet) -> Result<bool> {
        Ok(self.difference(o)?.is_empty() && o.difference(self)?.is_empty())
    }

    /// In-place union with a set on the same window.
    pub fn or_assign_aligned(&mut self, o: &GridSet) {
        debug_assert_eq!(self.spec, o.spec);
        for (w, v) in self.bits.iter_mut().zip(&o.bits) {
            *w |= v;
        }
    }

    pub fn intersects(&self, o: &GridSet) -> Result<bool> {
        Ok(!self.intersect(o)?.is_empty())
    }

    /// Midpoint-rule Haar measure with a density-oscillation bracket.
    ///
    /// Both bounds are exact sums of per-row density ranges times cell volume;
    /// catalog densities are constant along the last axis, so row ranges equal
    /// cell ranges.
    pub fn measure(&self, side: Side) -> MeasureEstimate {
        let dim = self.spec.dim;
        let vol = self.spec.cell_volume();
        let res = self.spec.resolution();
        if self.is_empty() {
            return MeasureEstimate::zero(side, res);
        }
        let last_n = self.spec.axes[dim - 1].n;
        let rows: usize = self.spec.total_cells() / last_n;
        let mut lower = 0.0;
        let mut upper = 0.0;
        for r in 0..rows {
            let count = self.count_row(r, last_n);
            if count == 0 {
                continue;
            }
            // reconstruct the row's leading indices
            let mut rem = r;
            let mut g = [0i64; MAX_DIM];
            for a in (0..dim - 1).rev() {
                g[a] = self.spec.axes[a].lo + (rem % self.spec.axes[a].n) as i64;
                rem /= self.spec.axes[a].n;
            }
            g[dim - 1] = self.spec.axes[dim - 1].lo;
            let mut row_box = self.cell_box(&g);
            let ax = self.spec.axes[dim - 1];
            row_box.set_axis(dim - 1, Iv::new(ax.lo as f64 * ax.h, ax.hi() as f64 * ax.h));
            let (dlo, dhi) = self.group.density_range(side, &row_box);
            lower += dlo * vol * count as f64;
            upper += dhi * vol * count as f64;
        }
        MeasureEstimate { lower, upper, side, resolution: res }
    }

    fn count_row(&self, row: usize, last_n: usize) -> usize {
        let start = row * last_n;
        let end = start + last_n;
        let mut count = 0usize;
        let mut i = start;
        while i < end {
            let w = i / 64;
            let bit = i % 64;
            let take = (64 - bit).min(end - i);
            let mask = if take == 64 { !0u64 } else { ((1u64 << take) - 1) << bit };
            count += (self.bits[w] & mask).count_ones() as usize;
            i += take;
        }
        count
    }

    /// Decompose into maximal runs along the given axis, lexicographic order.
    pub fn runs_along(&self, axis: usize) -> Vec<Run> {
        let dim = self.spec.dim;
        debug_assert!(axis < dim);
        let mut runs = Vec::new();
        let mut outer_axes: Vec<usize> = (0..dim).filter(|&a| a != axis).collect();
        outer_axes.sort_unstable();
        // iterate the outer index space
        let outer_total: usize = outer_axes.iter().map(|&a| self.spec.axes[a].n).product();
        let n_run = self.spec.axes[axis].n;
        for o in 0..outer_total {
            let mut rem = o;
            let mut g = [0i64; MAX_DIM];
            for &a in outer_axes.iter().rev() {
                g[a] = self.spec.axes[a].lo + (rem % self.spec.axes[a].n) as i64;
                rem /= self.spec.axes[a].n;
            }
            let mut current: Option<(i64, usize)> = None;
            for i in 0..n_run {
                g[axis] = self.spec.axes[axis].lo + i as i64;
                if self.contains_cell(&g) {
                    match current {
                        Some((_, ref mut len)) => *len += 1,
                        None => current = Some((g[axis], 1)),
                    }
                } else if let Some((start, len)) = current.take() {
                    let mut fixed = g;
                    fixed[axis] = start;
                    runs.push(Run { fixed, axis, len });
                }
            }
            if let Some((start, len)) = current {
                let mut fixed = g;
                fixed[axis] = start;
                runs.push(Run { fixed, axis, len });
            }
        }
        runs
    }

    /// Box of a run (closed hull of its cells).
    pub fn run_box(&self, run: &Run) -> BoxN {
        let mut b = self.cell_box(&run.fixed);
        let h = self.spec.axes[run.axis].h;
        let lo = run.fixed[run.axis] as f64 * h;
        b.set_axis(run.axis, Iv::new(lo, lo + run.len as f64 * h));
        b
    }

    /// Per-column sorted fiber intervals (chart units) keyed by the global
    /// indices of the non-fiber axes.
    pub fn column_intervals(&self, fiber_axis: usize) -> ColumnIntervals {
        let h = self.spec.axes[fiber_axis].h;
        let mut map: std::collections::BTreeMap<[i64; MAX_DIM], Vec<(f64, f64)>> =
            std::collections::BTreeMap::new();
        for run in self.runs_along(fiber_axis) {
            let mut key = run.fixed;
            key[fiber_axis] = 0;
            let lo = run.fixed[fiber_axis] as f64 * h;
            map.entry(key).or_default().push((lo, lo + run.len as f64 * h));
        }
        for list in map.values_mut() {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        ColumnIntervals { fiber_axis, map }
    }

    /// Number of set cells with at least one missing face-neighbor.
    pub fn boundary_cell_count(&self) -> usize {
        let dim = self.spec.dim;
        self.iter_cells()
            .filter(|g| {
                (0..dim).any(|a| {
                    let mut p = *g;
                    p[a] += 1;
                    let mut m = *g;
                    m[a] -= 1;
                    !self.contains_cell(&p) || !self.contains_cell(&m)
                })
            })
            .count()
    }

    /// Dilate by `r` cells in Chebyshev distance.
    pub fn dilate(&self, r: usize) -> GridSet {
        if r == 0 {
            return self.clone();
        }
        let mut axes = self.spec.axes;
        for a in 0..self.spec.dim {
            if !axes[a].circle {
                axes[a].lo -= r as i64;
                axes[a].n += 2 * r;
            }
        }
        let spec = GridSpec { axes, dim: self.spec.dim };
        let mut out = GridSet::empty(self.group, spec);
        let ri = r as i64;
        for g in self.iter_cells() {
            let mut off = [0i64; MAX_DIM];
            stamp_neighborhood(&mut out, &g, &mut off, 0, self.spec.dim, ri);
        }
        out
    }
}

/// Sorted fiber-interval lists per column of the non-fiber axes.
pub struct ColumnIntervals {
    pub fiber_axis: usize,
    map: std::collections::BTreeMap<[i64; MAX_DIM], Vec<(f64, f64)>>,
}

impl ColumnIntervals {
    pub fn get(&self, key: &[i64; MAX_DIM]) -> Option<&[(f64, f64)]> {
        let mut k = *key;
        k[self.fiber_axis] = 0;
        self.map.get(&k).map(|v| v.as_slice())
    }

}

fn stamp_neighborhood(
    out: &mut GridSet,
    g: &[i64; MAX_DIM],
    off: &mut [i64; MAX_DIM],
    axis: usize,
    dim: usize,
    r: i64,
) {
    if axis == dim {
        let mut q = *g;
        for a in 0..dim {
            q[a] += off[a];
        }
        out.insert_cell(&q);
        return;
    }
    for d in -r..=r {
        off[axis] = d;
        stamp_neighborhood(out, g, off, axis + 1, dim, r);
    }
}

fn fill_bits(bits: &mut [u64], start: usize, len: usize) {
    let end = start + len;
    let mut i = start;
    while i < end {
        let w = i / 64;
        let bit = i % 64;
        let take = (64 - bit).min(end - i);
        let mask = if take == 64 { !0u64 } else { ((1u64 << take) - 1) << bit };
        bits[w] |= mask;
        i += take;
    }
}

// ---------------------------------------------------------------------------
// serialization: textual run-length format
// ---------------------------------------------------------------------------

impl GridSet {
    /// Serialize to the textual run-length exchange format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("haarlab-gridset v1\n");
        s.push_str(&format!("group {}\n", self.group.name));
        s.push_str(&format!("dim {}\n", self.spec.dim));
        for a in 0..self.spec.dim {
            let ax = self.spec.axes[a];
            s.push_str(&format!(
                "axis {a} h {} lo {} n {} circle {}\n",
                ax.h,
                ax.lo,
                ax.n,
                u8::from(ax.circle)
            ));
        }
        let runs = self.runs_along(self.spec.dim - 1);
        s.push_str(&format!("runs {}\n", runs.len()));
        for r in &runs {
            s.push_str("run");
            for a in 0..self.spec.dim {
                s.push_str(&format!(" {}", r.fixed[a]));
            }
            s.push_str(&format!(" {}\n", r.len));
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<GridSet> {
        let mut lines = text.lines();
        let parse = |msg: &str| Error::Parse(msg.to_string());
        let header = lines.next().ok_or_else(|| parse("empty gridset file"))?;
        if header.trim() != "haarlab-gridset v1" {
            return Err(parse("bad gridset header"));
        }
        let group_line = lines.next().ok_or_else(|| parse("missing group line"))?;
        let name = group_line
            .strip_prefix("group ")
            .ok_or_else(|| parse("missing group line"))?
            .trim();
        let group = crate::group::by_name(name)?;
        let dim_line = lines.next().ok_or_else(|| parse("missing dim line"))?;
        let dim: usize = dim_line
            .strip_prefix("dim ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| parse("bad dim line"))?;
        if dim != group.chart_dim() {
            return Err(parse("dim does not match group chart"));
        }
        let mut axes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let l = lines.next().ok_or_else(|| parse("missing axis line"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 10 || toks[0] != "axis" {
                return Err(parse("bad axis line"));
            }
            let h: f64 = toks[3].parse().map_err(|_| parse("bad axis h"))?;
            let lo: i64 = toks[5].parse().map_err(|_| parse("bad axis lo"))?;
            let n: usize = toks[7].parse().map_err(|_| parse("bad axis n"))?;
            let circle = toks[9] == "1";
            axes.push(Axis { h, lo, n, circle });
        }
        let runs_line = lines.next().ok_or_else(|| parse("missing runs line"))?;
        let nruns: usize = runs_line
            .strip_prefix("runs ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| parse("bad runs line"))?;
        let mut set = GridSet::empty(group, GridSpec::new(&axes));
        for _ in 0..nruns {
            let l = lines.next().ok_or_else(|| parse("missing run line"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != dim + 2 || toks[0] != "run" {
                return Err(parse("bad run line"));
            }
            let mut fixed = [0i64; MAX_DIM];
            for a in 0..dim {
                fixed[a] = toks[1 + a].parse().map_err(|_| parse("bad run index"))?;
            }
            let len: usize = toks[dim + 1].parse().map_err(|_| parse("bad run length"))?;
            for i in 0..len {
                let mut g = fixed;
                g[dim - 1] = fixed[dim - 1] + i as i64;
                if !set.insert_cell(&g) {
                    return Err(parse("run outside declared window"));
                }
            }
        }
        match lines.next() {
            Some(l) if l.trim() == "end" => Ok(set),
            _ => Err(parse("missing end marker")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::by_name;
    use proptest::prelude::*;

    fn unit_h(g: &GroupModel, res: usize) -> Vec<f64> {
        vec![1.0 / res as f64; g.chart_dim()]
    }

    #[test]
    fn unit_interval_measure_exact() {
        let g = by_name("R").unwrap();
        let b = BoxN::from_bounds(&[0.0], &[1.0]);
        for res in [16usize, 64, 256] {
            let s = GridSet::from_box(g, &unit_h(&g, res), &b);
            assert_eq!(s.count(), res);
            let m = s.measure(Side::Left);
            assert!((m.lower - 1.0).abs() < 1e-12);
            assert!((m.upper - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn axb_box_measure_brackets() {
        let g = by_name("axb").unwrap();
        let b = BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]);
        let truth = 1.0 - (-1.0f64).exp();
        let s = GridSet::from_box(g, &unit_h(&g, 64), &b);
        let m = s.measure(Side::Left);
        assert!(m.lower <= truth && truth <= m.upper, "bracket misses {truth}");
        assert!(m.width() < 0.02);
        let mr = s.measure(Side::Right);
        assert!((mr.lower - 1.0).abs() < 1e-12 && (mr.upper - 1.0).abs() < 1e-12);
        // refinement shrinks the bracket
        let s2 = GridSet::from_box(g, &unit_h(&g, 128), &b);
        assert!(s2.measure(Side::Left).width() < 0.6 * m.width());
    }

    #[test]
    fn torus_window_and_wrap() {
        let g = by_name("T").unwrap();
        let b = BoxN::from_bounds(&[0.75], &[1.25]); // wraps around the seam
        let s = GridSet::from_box(g, &[1.0 / 16.0], &b);
        assert_eq!(s.count(), 8);
        assert!(s.contains_point(&Pt::new(&[0.8])));
        assert!(s.contains_point(&Pt::new(&[0.1])));
        assert!(!s.contains_point(&Pt::new(&[0.5])));
        let m = s.measure(Side::Left);
        assert!((m.lower - 0.5).abs() < 1e-12);
    }

    #[test]
    fn set_ops_on_shifted_windows() {
        let g = by_name("R").unwrap();
        let a = GridSet::from_box(g, &[0.25], &BoxN::from_bounds(&[0.0], &[1.0]));
        let b = GridSet::from_box(g, &[0.25], &BoxN::from_bounds(&[2.0], &[3.0]));
        let u = a.union(&b).unwrap();
        assert_eq!(u.count(), 8);
        assert!(a.intersect(&b).unwrap().is_empty());
        assert!(a.is_subset_of(&u).unwrap());
        assert!(!u.is_subset_of(&a).unwrap());
        let d = u.difference(&a).unwrap();
        assert!(d.same_cells(&b).unwrap());
    }

    #[test]
    fn runs_and_serialization_roundtrip() {
        let g = by_name("axb").unwrap();
        let s = GridSet::from_boxes(
            g,
            &[0.125, 0.125],
            &[
                BoxN::from_bounds(&[0.0, 0.0], &[1.0, 0.5]),
                BoxN::from_bounds(&[0.5, 0.75], &[0.75, 1.0]),
            ],
        );
        let runs = s.runs_along(1);
        let total: usize = runs.iter().map(|r| r.len).sum();
        assert_eq!(total, s.count());
        let text = s.to_text();
        let back = GridSet::from_text(&text).unwrap();
        assert!(back.same_cells(&s).unwrap());
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn inner_outer_ranges() {
        // box [0.3, 0.9] at h = 0.25: outer cells 1,2,3 ; inner cells 2
        let (lo, hi) = outer_range(Iv::new(0.3, 0.9), 0.25);
        assert_eq!((lo, hi), (1, 4));
        let (lo, hi) = inner_range(Iv::new(0.3, 0.9), 0.25);
        assert_eq!((lo, hi), (2, 3));
        // aligned bounds stay exact
        let (lo, hi) = outer_range(Iv::new(0.5, 1.0), 0.25);
        assert_eq!((lo, hi), (2, 4));
        let (lo, hi) = inner_range(Iv::new(0.5, 1.0), 0.25);
        assert_eq!((lo, hi), (2, 4));
    }

    proptest! {
        #[test]
        fn stamp_outer_covers_box(lo0 in -2.0f64..2.0, w0 in 0.01f64..1.5,
                                  lo1 in -2.0f64..2.0, w1 in 0.01f64..1.5,
                                  sx in 0.0f64..1.0, sy in 0.0f64..1.0) {
            let g = by_name("R^2").unwrap();
            let b = BoxN::from_bounds(&[lo0, lo1], &[lo0 + w0, lo1 + w1]);
            let s = GridSet::from_box(g, &[1.0/32.0, 1.0/32.0], &b);
            // interior points of the box are covered by stamped cells
            let p = Pt::new(&[lo0 + sx * w0, lo1 + sy * w1]);
            prop_assert!(s.contains_point(&p));
        }

        #[test]
        fn roundtrip_random_sets(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let g = by_name("RxT").unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let spec = GridSpec::new(&[
                Axis { h: 1.0/16.0, lo: -8, n: 24, circle: false },
                Axis { h: 1.0/16.0, lo: 0, n: 16, circle: true },
            ]);
            let mut s = GridSet::empty(g, spec);
            for _ in 0..30 {
                let i = rng.random_range(-8i64..16);
                let j = rng.random_range(0i64..16);
                s.insert_cell(&[i, j, 0]);
            }
            let back = GridSet::from_text(&s.to_text()).unwrap();
            prop_assert!(back.same_cells(&s).unwrap());
        }
    }
}
