//! Chart-level primitives: points, intervals, and boxes in global coordinates.
//!
//! Every group in the catalog lives in a single global chart of dimension ≤ 3.
//! Set enclosures are computed with directed interval arithmetic: an [`Iv`]
//! soundly brackets the range of the arithmetic it was built from, so any box
//! assembled from intervals encloses the true image of the operation.

/// Maximum chart dimension over the whole catalog.
pub const MAX_DIM: usize = 3;

/// A chart point with inline storage. Unused trailing coordinates are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pt {
    c: [f64; MAX_DIM],
    dim: usize,
}

impl Pt {
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() <= MAX_DIM, "chart dimension above {MAX_DIM}");
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Pt { c, dim: coords.len() }
    }

    pub fn zero(dim: usize) -> Self {
        Pt { c: [0.0; MAX_DIM], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn get(&self, axis: usize) -> f64 {
        debug_assert!(axis < self.dim);
        self.c[axis]
    }

    pub fn set(&mut self, axis: usize, v: f64) {
        debug_assert!(axis < self.dim);
        self.c[axis] = v;
    }
}

/// Closed interval `[lo, hi]`. Degenerate (`lo == hi`) intervals are points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Iv { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn add(self, o: Iv) -> Iv {
        Iv { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }

    pub fn sub(self, o: Iv) -> Iv {
        Iv { lo: self.lo - o.hi, hi: self.hi - o.lo }
    }

    pub fn neg(self) -> Iv {
        Iv { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Iv) -> Iv {
        let cands = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = cands[0];
        let mut hi = cands[0];
        for &v in &cands[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Iv { lo, hi }
    }

    pub fn scale(self, k: f64) -> Iv {
        if k >= 0.0 {
            Iv { lo: self.lo * k, hi: self.hi * k }
        } else {
            Iv { lo: self.hi * k, hi: self.lo * k }
        }
    }

    /// Range of `exp` over the interval (exp is increasing).
    pub fn exp(self) -> Iv {
        Iv { lo: self.lo.exp(), hi: self.hi.exp() }
    }

    pub fn hull(self, o: Iv) -> Iv {
        Iv { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, o: &Iv) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Range of `cos(2π t)` for `t` in the interval.
    ///
    /// Critical points of cos(2πt) sit at integer multiples of 1/2; the range
    /// is the hull of the endpoint values together with ±1 wherever a critical
    /// point falls inside.
    pub fn cos_turn(self) -> Iv {
        if self.width() >= 1.0 {
            return Iv { lo: -1.0, hi: 1.0 };
        }
        let (a, b) = (self.lo, self.hi);
        let va = cos_turn_f(a);
        let vb = cos_turn_f(b);
        let mut lo = va.min(vb);
        let mut hi = va.max(vb);
        // cos(2πt) attains +1 at integers, −1 at half-integers.
        if contains_multiple(a, b, 0.0, 1.0) {
            hi = 1.0;
        }
        if contains_multiple(a, b, 0.5, 1.0) {
            lo = -1.0;
        }
        Iv { lo, hi }
    }

    /// Range of `sin(2π t)` for `t` in the interval.
    pub fn sin_turn(self) -> Iv {
        if self.width() >= 1.0 {
            return Iv { lo: -1.0, hi: 1.0 };
        }
        let (a, b) = (self.lo, self.hi);
        let va = sin_turn_f(a);
        let vb = sin_turn_f(b);
        let mut lo = va.min(vb);
        let mut hi = va.max(vb);
        // sin(2πt) attains +1 at 1/4 + k, −1 at 3/4 + k.
        if contains_multiple(a, b, 0.25, 1.0) {
            hi = 1.0;
        }
        if contains_multiple(a, b, 0.75, 1.0) {
            lo = -1.0;
        }
        Iv { lo, hi }
    }
}

pub fn cos_turn_f(t: f64) -> f64 {
    (2.0 * std::f64::consts::PI * t).cos()
}

pub fn sin_turn_f(t: f64) -> f64 {
    (2.0 * std::f64::consts::PI * t).sin()
}

fn contains_multiple(a: f64, b: f64, offset: f64, period: f64) -> bool {
    // Is there k with a <= offset + k*period <= b?
    let k = ((a - offset) / period).ceil();
    offset + k * period <= b
}

/// Axis-aligned box in the chart; per-axis closed intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxN {
    iv: [Iv; MAX_DIM],
    dim: usize,
}

impl BoxN {
    pub fn new(ivs: &[Iv]) -> Self {
        assert!(ivs.len() <= MAX_DIM);
        let mut iv = [Iv::point(0.0); MAX_DIM];
        iv[..ivs.len()].copy_from_slice(ivs);
        BoxN { iv, dim: ivs.len() }
    }

    pub fn from_point(p: &Pt) -> Self {
        let mut iv = [Iv::point(0.0); MAX_DIM];
        for a in 0..p.dim() {
            iv[a] = Iv::point(p.get(a));
        }
        BoxN { iv, dim: p.dim() }
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Self {
        assert_eq!(lo.len(), hi.len());
        let ivs: Vec<Iv> = lo.iter().zip(hi).map(|(&a, &b)| Iv::new(a, b)).collect();
        BoxN::new(&ivs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axis(&self, a: usize) -> Iv {
        debug_assert!(a < self.dim);
        self.iv[a]
    }

    pub fn set_axis(&mut self, a: usize, iv: Iv) {
        debug_assert!(a < self.dim);
        self.iv[a] = iv;
    }

    pub fn center(&self) -> Pt {
        let mut p = Pt::zero(self.dim);
        for a in 0..self.dim {
            p.set(a, self.iv[a].mid());
        }
        p
    }

    pub fn contains(&self, p: &Pt) -> bool {
        (0..self.dim).all(|a| self.iv[a].contains(p.get(a)))
    }

    pub fn hull(&self, o: &BoxN) -> BoxN {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = *self;
        for a in 0..self.dim {
            out.iv[a] = self.iv[a].hull(o.iv[a]);
        }
        out
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.iv[a].width()).product()
    }

    /// Largest per-axis width.
    pub fn max_width(&self) -> f64 {
        (0..self.dim).map(|a| self.iv[a].width()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_mul_signs() {
        let a = Iv::new(-2.0, 3.0);
        let b = Iv::new(-1.0, 4.0);
        let p = a.mul(b);
        assert_eq!(p.lo, -8.0);
        assert_eq!(p.hi, 12.0);
    }

    #[test]
    fn cos_turn_quarter() {
        let r = Iv::new(0.0, 0.25).cos_turn();
        assert!((r.lo - 0.0).abs() < 1e-12);
        assert!((r.hi - 1.0).abs() < 1e-12);
        // interval straddling the minimum at t = 1/2
        let r = Iv::new(0.4, 0.6).cos_turn();
        assert_eq!(r.lo, -1.0);
    }

    proptest! {
        #[test]
        fn iv_mul_sound(a in -5.0f64..5.0, b in -5.0f64..5.0,
                        c in -5.0f64..5.0, d in -5.0f64..5.0,
                        s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let x = Iv::new(a.min(b), a.max(b));
            let y = Iv::new(c.min(d), c.max(d));
            let px = x.lo + s * x.width();
            let py = y.lo + t * y.width();
            let r = x.mul(y);
            prop_assert!(r.lo - 1e-12 <= px * py && px * py <= r.hi + 1e-12);
        }

        #[test]
        fn trig_turn_sound(a in -2.0f64..2.0, w in 0.0f64..1.5, s in 0.0f64..1.0) {
            let iv = Iv::new(a, a + w);
            let t = a + s * w;
            let c = iv.cos_turn();
            prop_assert!(c.lo - 1e-12 <= cos_turn_f(t) && cos_turn_f(t) <= c.hi + 1e-12);
            let sn = iv.sin_turn();
            prop_assert!(sn.lo - 1e-12 <= sin_turn_f(t) && sin_turn_f(t) <= sn.hi + 1e-12);
        }
    }
}
