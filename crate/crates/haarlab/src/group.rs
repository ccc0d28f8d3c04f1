//! The group catalog: concrete locally compact groups in global charts.
//!
//! Each entry fixes a chart, the group law, the inverse, left/right Haar
//! densities against chart Lebesgue measure, and the modular function Δ,
//! together with structural metadata (noncompact Lie dimension `ndim`, helix
//! dimension `hdim`, unimodularity).
//!
//! Chart conventions:
//! - `axb` is the affine group of the line in coordinates (u, b) with u = log a,
//!   law (u,b)·(u′,b′) = (u+u′, eᵘb′+b). Left density e⁻ᵘ, right density 1,
//!   Δ(u,b) = e⁻ᵘ, so ν is chart Lebesgue measure and ν = μ∘inv.
//! - `heis3` is the Heisenberg group in the polynomial chart
//!   (x,y,z)·(x′,y′,z′) = (x+x′, y+y′, z+z′+x·y′); both densities 1.
//! - `R2xT` is the semidirect product ℝ²⋊T, chart (v₁,v₂,θ) with θ ∈ [0,1),
//!   law (v,θ)·(v′,θ′) = (v + R(2πθ)v′, θ+θ′); both densities 1.
//! - Circle axes have period 1 and unit total measure.

use crate::chart::{cos_turn_f, sin_turn_f, BoxN, Iv, Pt};
use crate::error::{Error, Result};

/// Which Haar measure a quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// ℝᵈ under addition, d ≤ 3.
    Euclid { d: usize },
    /// Tᵏ = (ℝ/ℤ)ᵏ, k ≤ 2.
    Torus { k: usize },
    /// ℝᵈ × Tᵏ; the first `d` axes are lines, the last `k` axes circles.
    Cylinder { d: usize, k: usize },
    /// Affine group of the line in the (u, b) chart.
    AffineLine,
    /// 3-dimensional Heisenberg group.
    Heisenberg,
    /// ℝ² ⋊ T with T acting by rotation.
    EuclidRotTorus,
}

/// A concrete group model: chart, law, densities, and catalog metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupModel {
    pub name: &'static str,
    pub kind: GroupKind,
    pub ndim: u32,
    pub hdim: u32,
    pub unimodular: bool,
}

/// A chart point with circle axes reduced to [0,1).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub(crate) p: Pt,
}

impl GroupElement {
    pub fn coords(&self) -> &[f64] {
        self.p.coords()
    }
}

fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl GroupModel {
    pub const fn chart_dim(&self) -> usize {
        match self.kind {
            GroupKind::Euclid { d } => d,
            GroupKind::Torus { k } => k,
            GroupKind::Cylinder { d, k } => d + k,
            GroupKind::AffineLine => 2,
            GroupKind::Heisenberg | GroupKind::EuclidRotTorus => 3,
        }
    }

    /// True on axes that are circle-valued with period 1.
    pub fn is_circle_axis(&self, axis: usize) -> bool {
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::AffineLine | GroupKind::Heisenberg => false,
            GroupKind::Torus { .. } => true,
            GroupKind::Cylinder { d, .. } => axis >= d,
            GroupKind::EuclidRotTorus => axis == 2,
        }
    }

    pub fn compact_axes(&self) -> Vec<usize> {
        (0..self.chart_dim()).filter(|&a| self.is_circle_axis(a)).collect()
    }

    /// Total Haar measure when the group is compact.
    pub fn total_measure(&self) -> Option<f64> {
        match self.kind {
            GroupKind::Torus { .. } => Some(1.0),
            _ => None,
        }
    }

    pub fn identity(&self) -> Pt {
        Pt::zero(self.chart_dim())
    }

    pub fn element(&self, coords: &[f64]) -> GroupElement {
        assert_eq!(coords.len(), self.chart_dim(), "wrong chart dimension for {}", self.name);
        GroupElement { p: self.reduce(&Pt::new(coords)) }
    }

    /// Reduce circle axes modulo 1.
    pub fn reduce(&self, p: &Pt) -> Pt {
        let mut q = *p;
        for a in 0..self.chart_dim() {
            if self.is_circle_axis(a) {
                q.set(a, wrap_unit(p.get(a)));
            }
        }
        q
    }

    /// Group law on raw chart points (circle axes not reduced).
    pub fn law(&self, x: &Pt, y: &Pt) -> Pt {
        match self.kind {
            GroupKind::Euclid { d } => {
                let mut out = Pt::zero(d);
                for a in 0..d {
                    out.set(a, x.get(a) + y.get(a));
                }
                out
            }
            GroupKind::Torus { k } => {
                let mut out = Pt::zero(k);
                for a in 0..k {
                    out.set(a, x.get(a) + y.get(a));
                }
                out
            }
            GroupKind::Cylinder { d, k } => {
                let mut out = Pt::zero(d + k);
                for a in 0..d + k {
                    out.set(a, x.get(a) + y.get(a));
                }
                out
            }
            GroupKind::AffineLine => {
                let (u, b) = (x.get(0), x.get(1));
                let (u2, b2) = (y.get(0), y.get(1));
                Pt::new(&[u + u2, u.exp() * b2 + b])
            }
            GroupKind::Heisenberg => Pt::new(&[
                x.get(0) + y.get(0),
                x.get(1) + y.get(1),
                x.get(2) + y.get(2) + x.get(0) * y.get(1),
            ]),
            GroupKind::EuclidRotTorus => {
                let (c, s) = (cos_turn_f(x.get(2)), sin_turn_f(x.get(2)));
                Pt::new(&[
                    x.get(0) + c * y.get(0) - s * y.get(1),
                    x.get(1) + s * y.get(0) + c * y.get(1),
                    x.get(2) + y.get(2),
                ])
            }
        }
    }

    pub fn inv(&self, x: &Pt) -> Pt {
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => {
                let mut out = Pt::zero(self.chart_dim());
                for a in 0..self.chart_dim() {
                    out.set(a, -x.get(a));
                }
                out
            }
            GroupKind::AffineLine => {
                let (u, b) = (x.get(0), x.get(1));
                Pt::new(&[-u, -(-u).exp() * b])
            }
            GroupKind::Heisenberg => Pt::new(&[
                -x.get(0),
                -x.get(1),
                -x.get(2) + x.get(0) * x.get(1),
            ]),
            GroupKind::EuclidRotTorus => {
                let (c, s) = (cos_turn_f(-x.get(2)), sin_turn_f(-x.get(2)));
                Pt::new(&[
                    -(c * x.get(0) - s * x.get(1)),
                    -(s * x.get(0) + c * x.get(1)),
                    -x.get(2),
                ])
            }
        }
    }

    /// Public composition: reduces circle axes.
    pub fn compose(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement { p: self.reduce(&self.law(&x.p, &y.p)) }
    }

    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        GroupElement { p: self.reduce(&self.inv(&x.p)) }
    }

    /// Modular function Δ: μ(Xg) = Δ(g)·μ(X), ν(gX) = Δ(g)⁻¹·ν(X).
    pub fn modular(&self, x: &Pt) -> f64 {
        match self.kind {
            GroupKind::AffineLine => (-x.get(0)).exp(),
            _ => 1.0,
        }
    }

    pub fn modular_value(&self, x: &GroupElement) -> f64 {
        self.modular(&x.p)
    }

    /// Density of the chosen Haar measure against chart Lebesgue measure.
    pub fn density(&self, side: Side, x: &Pt) -> f64 {
        match (self.kind, side) {
            (GroupKind::AffineLine, Side::Left) => (-x.get(0)).exp(),
            _ => 1.0,
        }
    }

    /// Range of the density over a box (densities are monotone per axis).
    pub fn density_range(&self, side: Side, cell: &BoxN) -> (f64, f64) {
        match (self.kind, side) {
            (GroupKind::AffineLine, Side::Left) => {
                let u = cell.axis(0);
                ((-u.hi).exp(), (-u.lo).exp())
            }
            _ => (1.0, 1.0),
        }
    }

    /// Interval enclosure of the law over a pair of boxes.
    pub fn law_box(&self, x: &BoxN, y: &BoxN) -> BoxN {
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => {
                let mut out = *x;
                for a in 0..self.chart_dim() {
                    out.set_axis(a, x.axis(a).add(y.axis(a)));
                }
                out
            }
            GroupKind::AffineLine => {
                let u = x.axis(0);
                let b = x.axis(1);
                BoxN::new(&[u.add(y.axis(0)), u.exp().mul(y.axis(1)).add(b)])
            }
            GroupKind::Heisenberg => BoxN::new(&[
                x.axis(0).add(y.axis(0)),
                x.axis(1).add(y.axis(1)),
                x.axis(2).add(y.axis(2)).add(x.axis(0).mul(y.axis(1))),
            ]),
            GroupKind::EuclidRotTorus => {
                let c = x.axis(2).cos_turn();
                let s = x.axis(2).sin_turn();
                BoxN::new(&[
                    x.axis(0).add(c.mul(y.axis(0))).add(s.mul(y.axis(1)).neg()),
                    x.axis(1).add(s.mul(y.axis(0))).add(c.mul(y.axis(1))),
                    x.axis(2).add(y.axis(2)),
                ])
            }
        }
    }

    /// Interval enclosure of the inverse over a box.
    pub fn inv_box(&self, x: &BoxN) -> BoxN {
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => {
                let mut out = *x;
                for a in 0..self.chart_dim() {
                    out.set_axis(a, x.axis(a).neg());
                }
                out
            }
            GroupKind::AffineLine => {
                let u = x.axis(0);
                BoxN::new(&[u.neg(), u.neg().exp().mul(x.axis(1)).neg()])
            }
            GroupKind::Heisenberg => BoxN::new(&[
                x.axis(0).neg(),
                x.axis(1).neg(),
                x.axis(2).neg().add(x.axis(0).mul(x.axis(1))),
            ]),
            GroupKind::EuclidRotTorus => {
                let th = x.axis(2).neg();
                let c = th.cos_turn();
                let s = th.sin_turn();
                BoxN::new(&[
                    c.mul(x.axis(0)).add(s.mul(x.axis(1)).neg()).neg(),
                    s.mul(x.axis(0)).add(c.mul(x.axis(1))).neg(),
                    th,
                ])
            }
        }
    }

    /// Bound on the local distortion of the law over a chart box: a Lipschitz
    /// constant for both arguments when they range over `b`.
    pub fn lipschitz_modulus(&self, b: &BoxN) -> f64 {
        let sup = |iv: Iv| iv.lo.abs().max(iv.hi.abs());
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => 1.0,
            GroupKind::AffineLine => {
                let eu = b.axis(0).hi.exp();
                eu * (1.0 + sup(b.axis(1))) + 1.0
            }
            GroupKind::Heisenberg => 1.0 + sup(b.axis(0)).max(sup(b.axis(1))),
            GroupKind::EuclidRotTorus => {
                1.0 + std::f64::consts::TAU * sup(b.axis(0)).max(sup(b.axis(1)))
            }
        }
    }

    /// Axis along which grid sets are decomposed into runs. The law is affine
    /// in this coordinate on both sides, which keeps run-pair enclosures
    /// tight; cylinders run along a line axis so run intervals never wrap.
    pub fn run_axis(&self) -> usize {
        match self.kind {
            GroupKind::AffineLine | GroupKind::EuclidRotTorus => 1,
            GroupKind::Heisenberg => 2,
            GroupKind::Cylinder { .. } => 0,
            _ => self.chart_dim() - 1,
        }
    }

    /// Exact image of a box under left translation by the point `g`, when the
    /// image is itself an axis-aligned box (all catalog left translations are
    /// affine in the chart; only the rotation in ℝ²⋊T breaks axis alignment).
    ///
    /// Returns `(outer, inner)`: `outer` always encloses the image; `inner`,
    /// when present, is contained in the image.
    pub fn left_translate_box(&self, g: &Pt, b: &BoxN) -> (BoxN, Option<BoxN>) {
        match self.kind {
            GroupKind::Euclid { .. } | GroupKind::Torus { .. } | GroupKind::Cylinder { .. } => {
                let mut out = *b;
                for a in 0..self.chart_dim() {
                    out.set_axis(a, b.axis(a).add(Iv::point(g.get(a))));
                }
                (out, Some(out))
            }
            GroupKind::AffineLine => {
                let out = BoxN::new(&[
                    b.axis(0).add(Iv::point(g.get(0))),
                    b.axis(1).scale(g.get(0).exp()).add(Iv::point(g.get(1))),
                ]);
                (out, Some(out))
            }
            GroupKind::Heisenberg => {
                let x = g.get(0);
                let shear = Iv::point(x).mul(b.axis(1));
                let z = b.axis(2).add(Iv::point(g.get(2)));
                let outer = BoxN::new(&[
                    b.axis(0).add(Iv::point(g.get(0))),
                    b.axis(1).add(Iv::point(g.get(1))),
                    z.add(shear),
                ]);
                // The sheared prism contains the box whose z-range is shrunk
                // by the shear spread across the y-extent of `b`.
                let inner_z = Iv { lo: z.lo + shear.hi, hi: z.hi + shear.lo };
                let inner = if inner_z.lo <= inner_z.hi {
                    let mut ib = outer;
                    ib.set_axis(2, inner_z);
                    Some(ib)
                } else {
                    None
                };
                (outer, inner)
            }
            GroupKind::EuclidRotTorus => {
                (self.law_box(&BoxN::from_point(g), b), None)
            }
        }
    }

    /// Chart distance that respects circle axes.
    pub fn chart_distance(&self, x: &Pt, y: &Pt) -> f64 {
        let xr = self.reduce(x);
        let yr = self.reduce(y);
        let mut d = 0.0f64;
        for a in 0..self.chart_dim() {
            let diff = (xr.get(a) - yr.get(a)).abs();
            let diff = if self.is_circle_axis(a) { diff.min(1.0 - diff) } else { diff };
            d = d.max(diff);
        }
        d
    }
}

const CATALOG: &[GroupModel] = &[
    GroupModel { name: "R", kind: GroupKind::Euclid { d: 1 }, ndim: 1, hdim: 0, unimodular: true },
    GroupModel { name: "R^2", kind: GroupKind::Euclid { d: 2 }, ndim: 2, hdim: 0, unimodular: true },
    GroupModel { name: "R^3", kind: GroupKind::Euclid { d: 3 }, ndim: 3, hdim: 0, unimodular: true },
    GroupModel { name: "T", kind: GroupKind::Torus { k: 1 }, ndim: 0, hdim: 0, unimodular: true },
    GroupModel { name: "T^2", kind: GroupKind::Torus { k: 2 }, ndim: 0, hdim: 0, unimodular: true },
    GroupModel { name: "RxT", kind: GroupKind::Cylinder { d: 1, k: 1 }, ndim: 1, hdim: 0, unimodular: true },
    GroupModel { name: "RxT^2", kind: GroupKind::Cylinder { d: 1, k: 2 }, ndim: 1, hdim: 0, unimodular: true },
    GroupModel { name: "R^2xT", kind: GroupKind::Cylinder { d: 2, k: 1 }, ndim: 2, hdim: 0, unimodular: true },
    GroupModel { name: "axb", kind: GroupKind::AffineLine, ndim: 2, hdim: 0, unimodular: false },
    GroupModel { name: "heis3", kind: GroupKind::Heisenberg, ndim: 3, hdim: 0, unimodular: true },
    GroupModel { name: "R2xT", kind: GroupKind::EuclidRotTorus, ndim: 2, hdim: 0, unimodular: true },
];

/// The full group catalog.
pub fn catalog() -> &'static [GroupModel] {
    CATALOG
}

/// Look up a catalog entry by its scenario-file name.
pub fn by_name(name: &str) -> Result<GroupModel> {
    CATALOG
        .iter()
        .find(|g| g.name == name)
        .copied()
        .ok_or_else(|| Error::UnknownGroup(name.to_string()))
}
