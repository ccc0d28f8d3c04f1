//! Approximate-group extraction: normalize, stabilize, square, cover.
//!
//! The pipeline converts a small Ruzsa distance into an approximate group
//! commensurable with both sets: after translating so the identity lies in
//! both sets and the modular function is at most 1 on the first, it takes the
//! approximate stabilizer S at ε = (2K−1)ν(A)/2K, squares it into H = S², and
//! produces covering certificates for A and B by translates of H. Measured
//! cardinalities are reported next to the 64K¹² and 33K¹² ceilings they must
//! stay under.

use crate::chart::Pt;
use crate::conv::{convolution_tolerance, convolve_indicator};
use crate::error::{Error, Result};
use crate::grid::GridSet;
use crate::group::Side;
use crate::metrics::ruzsa_distance_to_inverse;
use crate::product::{self, SetMode};
use crate::stabilizer::{approximate_stabilizer, StabilizerResult};
use crate::cover::{greedy_translate_cover, CoveringCertificate, Direction};

#[derive(Clone, Debug)]
pub struct ApproxGroupCertificate {
    pub h: GridSet,
    /// Parameter ceiling claimed for H (the 64K¹² bound).
    pub k_param: f64,
    /// Translate witnesses covering H² by copies of H.
    pub omega: Vec<Vec<f64>>,
    pub symmetric: bool,
    pub contains_identity: bool,
    /// Measured covering number of H² by translates of H.
    pub k_meas: usize,
}

#[derive(Clone, Debug)]
pub struct NormalizationReport {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    /// max Δ over the translated first set; 1 within chart tolerance.
    pub max_modular_after: f64,
    pub identity_in_a: bool,
    pub identity_in_b: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct MassFloorReport {
    /// Certified ν-mass of the computed stabilizer.
    pub nu_s: f64,
    /// μ(A)/2K.
    pub bound: f64,
    /// Borderline stabilizer mass plus measure-bracket slack.
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct TaoPipeline {
    pub normalization: NormalizationReport,
    pub k_from_distance: f64,
    pub k_from_ratio: f64,
    /// K actually used: hypotheses are validated against measured values.
    pub k_used: f64,
    pub stabilizer: StabilizerResult,
    pub approx_group: ApproxGroupCertificate,
    pub cover_a: CoveringCertificate,
    pub cover_b: CoveringCertificate,
    /// 64·K¹² and 33·K¹².
    pub bound_group: f64,
    pub bound_cover: f64,
    pub s_mass: MassFloorReport,
    pub within_bounds: bool,
}

fn max_modular_cell(a: &GridSet) -> (Pt, f64) {
    let g = a.group();
    let mut best: Option<(Pt, f64)> = None;
    for cell in a.iter_cells() {
        let p = a.cell_center(&cell);
        let d = g.modular(&p);
        match &best {
            Some((_, bd)) if *bd >= d => {}
            _ => best = Some((p, d)),
        }
    }
    best.expect("nonempty set")
}

/// Is the set equal to its inverse up to one cell layer? Checked at sampled
/// cell centers: the inverse of each center must land in the set or a face
/// neighbor of it.
pub fn symmetric_within_layer(s: &GridSet) -> Result<bool> {
    let g = s.group();
    let dim = g.chart_dim();
    for cell in s.iter_cells() {
        let q = g.reduce(&g.inv(&s.cell_center(&cell)));
        let mut idx = [0i64; 3];
        for a in 0..dim {
            let ax = s.spec().axis(a);
            let mut i = (q.get(a) / ax.h).floor() as i64;
            if ax.circle {
                i = i.rem_euclid(ax.n as i64);
            }
            idx[a] = i;
        }
        if !chebyshev_hit(s, &idx, dim) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does the set contain the cell or any Chebyshev-1 neighbor of it?
pub(crate) fn chebyshev_hit(s: &GridSet, idx: &[i64; 3], dim: usize) -> bool {
    let offs: &[i64] = &[0, -1, 1];
    for &dx in offs {
        for &dy in offs[..if dim >= 2 { 3 } else { 1 }].iter() {
            for &dz in offs[..if dim >= 3 { 3 } else { 1 }].iter() {
                let n = [idx[0] + dx, idx[1] + dy, idx[2] + dz];
                if s.contains_cell(&n) {
                    return true;
                }
            }
        }
    }
    false
}

/// Full extraction pipeline for a pair of positive-measure sets.
pub fn tao_pipeline(a: &GridSet, b: &GridSet) -> Result<TaoPipeline> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::ZeroMeasure("tao_pipeline"));
    }
    let g = *a.group();

    // normalization: translate A by g₁⁻¹ where Δ(g₁) is maximal over A, and
    // B by g₂⁻¹; afterwards id ∈ A ∩ B and max Δ on A is 1
    let (g1, _) = max_modular_cell(a);
    let g2 = {
        let first = b.iter_cells().next().expect("nonempty set");
        b.cell_center(&first)
    };
    let a_n = product::left_translate(&g.inv(&g1), a, SetMode::Outer)?;
    let b_n = product::right_translate(b, &g.inv(&g2), SetMode::Outer)?;
    let (_, max_mod_after) = {
        let (p, d) = max_modular_cell(&a_n);
        (p, d)
    };
    let normalization = NormalizationReport {
        g1: g1.coords().to_vec(),
        g2: g2.coords().to_vec(),
        max_modular_after: max_mod_after,
        identity_in_a: a_n.contains_point(&g.identity()),
        identity_in_b: b_n.contains_point(&g.identity()),
    };

    // K comes from measured quantities: the Ruzsa distance to B⁻¹ and the
    // ratio ν(AA⁻¹)/μ(A) that the stabilizer bounds actually require
    let d = ruzsa_distance_to_inverse(&a_n, &b_n)?;
    let k_from_distance = d.hi.exp2();
    let a_inv = product::inverse_set(&a_n, SetMode::Outer)?;
    let aa_inv = product::product_set(&a_n, &a_inv, SetMode::Outer)?;
    let mu_a = a_n.measure(Side::Left);
    let nu_a = a_n.measure(Side::Right);
    if mu_a.lower <= 0.0 {
        return Err(Error::ZeroMeasure("tao_pipeline"));
    }
    let k_from_ratio = aa_inv.measure(Side::Right).upper / mu_a.lower;
    let k_used = k_from_distance.max(k_from_ratio).max(1.0 + 1e-9);

    // stabilizer at the proof's ε = (2K−1)ν(A)/2K
    let eps = (2.0 * k_used - 1.0) * nu_a.lower / (2.0 * k_used);
    let stab = approximate_stabilizer(&a_n, eps)?;
    if stab.set.is_empty() {
        return Err(Error::ZeroMeasure("tao_pipeline stabilizer"));
    }

    // H = S², certified as an approximate group by greedy-covering H²
    let h = product::product_set(&stab.set, &stab.set, SetMode::Outer)?;
    let h2 = product::product_set(&h, &h, SetMode::Outer)?;
    let cover_h2 = greedy_translate_cover(&h2, &h, Direction::Left)?;
    let bound_group = 64.0 * k_used.powi(12);
    let bound_cover = 33.0 * k_used.powi(12);
    let approx_group = ApproxGroupCertificate {
        symmetric: symmetric_within_layer(&h)?,
        contains_identity: h.contains_point(&g.identity()),
        k_meas: cover_h2.cardinality(),
        omega: cover_h2.omega.clone(),
        k_param: bound_group,
        h,
    };

    // covering certificates: A by left translates of H, B by right translates
    let cover_a = greedy_translate_cover(&a_n, &approx_group.h, Direction::Left)?;
    let cover_b = greedy_translate_cover(&b_n, &approx_group.h, Direction::Right)?;

    // ν(S) ≥ μ(A)/2K − tol
    let nu_s = stab.set.measure(Side::Right);
    let bound = mu_a.lower / (2.0 * k_used);
    let tol = stab.borderline_mass + nu_s.width() + mu_a.width();
    let s_mass = MassFloorReport {
        nu_s: nu_s.lower,
        bound,
        tol,
        pass: nu_s.lower + tol >= bound,
    };

    let within_bounds = (approx_group.k_meas as f64) <= bound_group
        && (cover_a.cardinality() as f64) <= bound_cover
        && (cover_b.cardinality() as f64) <= bound_cover
        && s_mass.pass;

    Ok(TaoPipeline {
        normalization,
        k_from_distance,
        k_from_ratio,
        k_used,
        stabilizer: stab,
        approx_group,
        cover_a,
        cover_b,
        bound_group,
        bound_cover,
        s_mass,
        within_bounds,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Prop45Row {
    pub n: u32,
    /// ν upper bound of the outer chain A Sⁿ A⁻¹.
    pub lhs: f64,
    /// 2ⁿ K^(2n+1) μ(A) at the upper measure side.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct Prop45Report {
    pub k: f64,
    pub rows: Vec<Prop45Row>,
    pub all_pass: bool,
}

/// Growth of conjugated stabilizer powers: ν(A Sⁿ A⁻¹) ≤ 2ⁿK^(2n+1)μ(A)
/// for n = 1..n_max, with A normalized so max Δ on A is 1.
pub fn prop45_check(a: &GridSet, n_max: u32) -> Result<Prop45Report> {
    if a.is_empty() {
        return Err(Error::ZeroMeasure("prop45_check"));
    }
    if n_max == 0 || n_max > 5 {
        return Err(Error::HypothesisNotMet {
            check: "prop45_check",
            detail: format!("n_max must be in 1..=5, got {n_max}"),
        });
    }
    let g = *a.group();
    let (g1, _) = max_modular_cell(a);
    let a_n = product::left_translate(&g.inv(&g1), a, SetMode::Outer)?;
    let a_inv = product::inverse_set(&a_n, SetMode::Outer)?;
    let aa_inv = product::product_set(&a_n, &a_inv, SetMode::Outer)?;
    let mu_a = a_n.measure(Side::Left);
    let k = (aa_inv.measure(Side::Right).upper / mu_a.lower).max(1.0 + 1e-9);
    let eps = (2.0 * k - 1.0) * a_n.measure(Side::Right).lower / (2.0 * k);
    let stab = approximate_stabilizer(&a_n, eps)?;

    let mut rows = Vec::new();
    let mut power = a_n.clone();
    for n in 1..=n_max {
        power = product::product_set(&power, &stab.set, SetMode::Outer)?;
        let chain = product::product_set(&power, &a_inv, SetMode::Outer)?;
        let lhs = chain.measure(Side::Right).upper;
        let rhs = 2f64.powi(n as i32) * k.powi(2 * n as i32 + 1) * mu_a.upper;
        rows.push(Prop45Row { n, lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-9) });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(Prop45Report { k, rows, all_pass })
}

#[derive(Clone, Copy, Debug)]
pub struct EnergyFloorReport {
    pub value: f64,
    pub bound: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Energy mass on the stabilizer: ∫_S (𝟙_{A⁻¹} * 𝟙_A)² dν ≥ ν(A)²μ(A)/2K − tol.
pub fn stabilizer_energy_floor(
    a: &GridSet,
    stab: &StabilizerResult,
    k: f64,
) -> Result<EnergyFloorReport> {
    let g = a.group();
    let a_inv = product::inverse_set(a, SetMode::Inner)?;
    let vol = stab.set.spec().cell_volume();
    let mut value = 0.0;
    for cell in stab.set.iter_cells() {
        let x = stab.set.cell_center(&cell);
        let c = convolve_indicator(&a_inv, a, &x);
        value += c * c * g.density(Side::Right, &x) * vol;
    }
    let nu_a = a.measure(Side::Right);
    let mu_a = a.measure(Side::Left);
    let bound = nu_a.lower * nu_a.lower * mu_a.lower / (2.0 * k);
    let conv_tol = convolution_tolerance(a, a);
    let tol = stab.borderline_mass * mu_a.upper * mu_a.upper
        + stab.set.measure(Side::Right).upper * 2.0 * mu_a.upper * conv_tol;
    Ok(EnergyFloorReport { value, bound, tol, pass: value + tol >= bound })
}
