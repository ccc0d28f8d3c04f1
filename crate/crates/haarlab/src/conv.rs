//! Indicator convolutions and multiplicative energy.
//!
//! Convolution of indicators admits two integral forms,
//!
//!   (𝟙_A * 𝟙_B)(x) = ∫ 𝟙_A(y) 𝟙_B(y⁻¹x) dμ(y) = ∫ 𝟙_A(xy⁻¹) 𝟙_B(y) dν(y),
//!
//! and the identity between them is sensitive to the modular function, which
//! makes the pair a useful nonunimodular regression. Both are evaluated by the
//! midpoint rule over the cells of the set being integrated.

use crate::chart::Pt;
use crate::error::Result;
use crate::grid::GridSet;
use crate::group::Side;
use crate::product::{self, SetMode};

/// Left form: quadrature of 𝟙_A(y)·𝟙_B(y⁻¹x) against μ over the cells of A.
pub fn convolve_indicator(a: &GridSet, b: &GridSet, x: &Pt) -> f64 {
    let g = a.group();
    let vol = a.spec().cell_volume();
    let mut acc = 0.0;
    for cell in a.iter_cells() {
        let y = a.cell_center(&cell);
        let z = g.law(&g.inv(&y), x);
        if b.contains_point(&z) {
            acc += g.density(Side::Left, &y) * vol;
        }
    }
    acc
}

/// Right form: quadrature of 𝟙_A(xy⁻¹)·𝟙_B(y) against ν over the cells of B.
pub fn convolve_indicator_right(a: &GridSet, b: &GridSet, x: &Pt) -> f64 {
    let g = a.group();
    let vol = b.spec().cell_volume();
    let mut acc = 0.0;
    for cell in b.iter_cells() {
        let y = b.cell_center(&cell);
        let z = g.law(x, &g.inv(&y));
        if a.contains_point(&z) {
            acc += g.density(Side::Right, &y) * vol;
        }
    }
    acc
}

/// Quadrature tolerance for path agreement: both forms miss at most the mass
/// of the boundary layer of the translated sets.
pub fn convolution_tolerance(a: &GridSet, b: &GridSet) -> f64 {
    let vol = a.spec().cell_volume();
    let bc = (a.boundary_cell_count() + b.boundary_cell_count()) as f64;
    let dmax = density_sup(a).max(density_sup(b));
    (bc + 2.0) * vol * dmax
}

fn density_sup(s: &GridSet) -> f64 {
    match s.bounding_box() {
        Some(bb) => {
            let (_, lh) = s.group().density_range(Side::Left, &bb);
            let (_, rh) = s.group().density_range(Side::Right, &bb);
            lh.max(rh)
        }
        None => 1.0,
    }
}

/// Right multiplicative energy E(A,B) = ∫ (𝟙_A * 𝟙_B)² dν, integrated over an
/// outer enclosure of the convolution support AB.
pub fn energy(a: &GridSet, b: &GridSet) -> Result<f64> {
    let g = a.group();
    let support = product::product_set(a, b, SetMode::Outer)?;
    let vol = support.spec().cell_volume();
    let mut acc = 0.0;
    for cell in support.iter_cells() {
        let x = support.cell_center(&cell);
        let v = convolve_indicator(a, b, &x);
        if v > 0.0 {
            acc += v * v * g.density(Side::Right, &x) * vol;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxN;
    use crate::group::by_name;

    fn unit_interval(res: usize) -> GridSet {
        let g = by_name("R").unwrap();
        GridSet::from_box(g, &[1.0 / res as f64], &BoxN::from_bounds(&[0.0], &[1.0]))
    }

    #[test]
    fn triangle_values_on_r() {
        let a = unit_interval(64);
        // full overlap at x = 1
        let v = convolve_indicator(&a, &a, &Pt::new(&[1.0]));
        assert!((v - 1.0).abs() < 0.05, "conv(1) = {v}");
        let v = convolve_indicator(&a, &a, &Pt::new(&[0.5]));
        assert!((v - 0.5).abs() < 0.05, "conv(0.5) = {v}");
        let w = convolve_indicator_right(&a, &a, &Pt::new(&[0.5]));
        assert!((v - w).abs() < convolution_tolerance(&a, &a));
    }

    #[test]
    fn energy_of_unit_interval_is_two_thirds() {
        // E = ∫₀² tri(x)² dx = 2/3
        let a = unit_interval(64);
        let e = energy(&a, &a).unwrap();
        assert!((e - 2.0 / 3.0).abs() < 0.02, "E = {e}");
    }

    #[test]
    fn energy_positive_for_far_apart_sets() {
        let g = by_name("R").unwrap();
        let a = GridSet::from_box(g, &[1.0 / 32.0], &BoxN::from_bounds(&[0.0], &[0.5]));
        let b = GridSet::from_box(g, &[1.0 / 32.0], &BoxN::from_bounds(&[7.0], &[7.5]));
        let e = energy(&a, &b).unwrap();
        assert!(e > 0.0, "nonempty sets must have positive energy");
    }

    #[test]
    fn convolution_paths_agree_on_axb() {
        let g = by_name("axb").unwrap();
        let a = GridSet::from_box(
            g,
            &[1.0 / 32.0, 1.0 / 32.0],
            &BoxN::from_bounds(&[0.0, 0.0], &[1.0, 1.0]),
        );
        for x in [
            Pt::new(&[0.0, 0.0]),
            Pt::new(&[0.5, 0.5]),
            Pt::new(&[1.0, 1.5]),
            Pt::new(&[-0.25, 0.75]),
        ] {
            let l = convolve_indicator(&a, &a, &x);
            let r = convolve_indicator_right(&a, &a, &x);
            let tol = convolution_tolerance(&a, &a);
            assert!((l - r).abs() <= tol, "paths differ at {:?}: {l} vs {r} (tol {tol})", x.coords());
        }
    }
}
