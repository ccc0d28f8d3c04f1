//! Structured check records shared by every analysis.
//!
//! Each asserted inequality becomes one [`Record`] naming the fact it checks
//! (a stable check id), the bracket sides used, the computed tolerance, and a
//! status. The CLI turns records into CSV rows; the human summary counts them.

use serde::{Deserialize, Serialize};

/// A bracketed scalar value.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Vb {
    pub lo: f64,
    pub hi: f64,
}

impl Vb {
    pub fn new(lo: f64, hi: f64) -> Self {
        Vb { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Vb { lo: x, hi: x }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The inequality could not be separated from zero at this resolution.
    Unresolved,
    /// A hypothesis guard rejected the instance before the check ran.
    Refused,
    /// Measured value reported without an assertion.
    Info,
}

/// One structured record per asserted or reported quantity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Record {
    pub scenario: String,
    pub group: String,
    pub analysis: String,
    /// Stable identifier of the fact being checked.
    pub check: String,
    pub status: Status,
    /// Headline value (conservative side where applicable).
    pub value: f64,
    /// Bound compared against (NaN when not applicable).
    pub bound: f64,
    /// value − bound with signs arranged so negative means violation.
    pub margin: f64,
    /// Computed tolerance for this instance.
    pub tol: f64,
    /// Bracket of the headline value.
    pub lo: f64,
    pub hi: f64,
    pub note: String,
}

impl Record {
    pub fn new(analysis: &str, check: &str) -> Self {
        Record {
            scenario: String::new(),
            group: String::new(),
            analysis: analysis.to_string(),
            check: check.to_string(),
            status: Status::Info,
            value: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
            tol: 0.0,
            lo: f64::NAN,
            hi: f64::NAN,
            note: String::new(),
        }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = v;
        self
    }

    pub fn with_bracket(mut self, vb: Vb) -> Self {
        self.lo = vb.lo;
        self.hi = vb.hi;
        self
    }

    pub fn with_bound(mut self, b: f64) -> Self {
        self.bound = b;
        self
    }

    pub fn with_tol(mut self, t: f64) -> Self {
        self.tol = t;
        self
    }

    pub fn with_margin(mut self, m: f64) -> Self {
        self.margin = m;
        self
    }

    pub fn with_note(mut self, n: &str) -> Self {
        self.note = n.to_string();
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    /// Pass/fail from a margin that must be ≥ −tol.
    pub fn judge_margin(mut self) -> Self {
        self.status = if self.margin >= -self.tol { Status::Pass } else { Status::Fail };
        self
    }
}

/// Deterministic float formatting used by all emitters.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.12e}")
    }
}

/// Stable check identifiers.
pub mod checks {
    pub const COMPOSE_ASSOCIATIVITY: &str = "group.compose-associativity";
    pub const MODULAR_TRANSLATION_SCALING: &str = "group.modular-translation-scaling";
    pub const RIGHT_EQUALS_LEFT_OF_INVERSE: &str = "group.nu-equals-mu-of-inverse";
    pub const NDIM_3HDIM: &str = "group.ndim-at-least-3hdim";
    pub const UNIMODULAR_FLAG: &str = "group.unimodular-iff-trivial-modular";
    pub const IDENTITY_LAW: &str = "group.identity-law";
    pub const INVERSE_LAW: &str = "group.inverse-law";
    pub const BM_GROUP_BRACKET: &str = "group.bm-bracket";

    pub const PRODUCT_BRACKET_NESTING: &str = "grid.product-inner-subset-outer";
    pub const PRODUCT_REFINEMENT: &str = "grid.product-bracket-refinement";
    pub const CONVOLUTION_PATHS: &str = "grid.convolution-path-agreement";
    pub const ENERGY_SYMMETRY: &str = "grid.energy-symmetry-relation";
    pub const ENERGY_CS_FLOOR: &str = "grid.energy-cauchy-schwarz-floor";

    pub const BM_RESIDUAL: &str = "metrics.bm-bisection-residual";
    pub const BM_UNIT_CUBES: &str = "metrics.bm-unit-cubes";
    pub const RUZSA_NONNEGATIVE: &str = "metrics.ruzsa-nonnegative";
    pub const RUZSA_SYMMETRY: &str = "metrics.ruzsa-symmetry";
    pub const RUZSA_TRANSLATION: &str = "metrics.ruzsa-translation-invariance";
    pub const RUZSA_TRIANGLE: &str = "metrics.ruzsa-triangle";
    pub const KEMPERMAN_FLOOR: &str = "metrics.kemperman-min-sum-floor";
    pub const DIMENSION_BOUND: &str = "metrics.dimension-bound";
    pub const BM_LE_HALF_LOGK: &str = "metrics.bm-pair-le-half-logk";
    pub const KEMPERMAN_K_FLOOR: &str = "metrics.symmetric-expansion-at-least-2";

    pub const COVER_CONTAINMENT: &str = "cover.translate-containment";
    pub const COVER_CARDINALITY: &str = "cover.cardinality-le-ratio";
    pub const STABILIZER_SYMMETRY: &str = "stabilizer.symmetric";
    pub const STABILIZER_MONOTONE: &str = "stabilizer.monotone-in-epsilon";
    pub const STABILIZER_MASS: &str = "stabilizer.mass-floor";
    pub const GROWTH_BOUND: &str = "stabilizer.conjugated-power-growth";
    pub const APPROX_GROUP_SYMMETRY: &str = "approx.h-symmetric";
    pub const APPROX_GROUP_SQUARE_COVER: &str = "approx.h-square-covered";
    pub const APPROX_COVER_A: &str = "approx.a-covered-by-left-translates";
    pub const APPROX_COVER_B: &str = "approx.b-covered-by-right-translates";
    pub const APPROX_BOUNDS: &str = "approx.parameter-within-paper-bound";
    pub const PIPELINE_NORMALIZATION: &str = "approx.normalization-max-modular-one";
    pub const ENERGY_STAB_FLOOR: &str = "approx.stabilizer-energy-floor";

    pub const FIBER_INTEGRAL: &str = "quotient.fiber-profile-integral";
    pub const SUPERLEVEL_MONOTONE: &str = "quotient.superlevel-monotone";
    pub const SUPERLEVEL_PRODUCT: &str = "quotient.superlevel-product-inclusion";
    pub const LAYER_CAKE: &str = "quotient.layer-cake-identity";
    pub const SUP_IDENTITY: &str = "quotient.superlevel-sup-identity";
    pub const EQUALITY_DOMINATION: &str = "quotient.equality-domination";
    pub const ALMOST_DOMINATION: &str = "quotient.almost-domination";
    pub const PUSHFORWARD_SPLIT_A2: &str = "quotient.pushforward-split-minor-part";
    pub const PUSHFORWARD_SPLIT_PROD: &str = "quotient.pushforward-split-product";
    pub const PUSHFORWARD_FINAL: &str = "quotient.pushforward-final-bound";

    pub const FREIMAN_HYPOTHESIS: &str = "recovery.interval-sum-hypothesis";
    pub const FREIMAN_EXCESS_I: &str = "recovery.hull-excess-left";
    pub const FREIMAN_EXCESS_J: &str = "recovery.hull-excess-right";
    pub const INVERSE_KEMPERMAN_CASE: &str = "recovery.inverse-kemperman-case";
    pub const INVERSE_KEMPERMAN_EXCESS: &str = "recovery.inverse-kemperman-excess";
    pub const PROGRESSION_COVER: &str = "recovery.progression-cover";

    pub const FIBER_DELTA_RELATION: &str = "affine.fiber-delta-relation";
    pub const HOELDER_MOMENTS: &str = "affine.hoelder-moment-chain";
    pub const PRODUCT_LOWER_NU: &str = "affine.square-lower-bound-nu";
    pub const PRODUCT_LOWER_MU: &str = "affine.square-lower-bound-mu";
    pub const STRICT_GAP_WEAK: &str = "affine.gap-nonnegative";
    pub const STRICT_GAP_STRONG: &str = "affine.gap-strictly-positive";
    pub const CONJUGATION_MODULUS: &str = "affine.conjugation-modulus";
    pub const FIBER_KEMPERMAN: &str = "affine.fiber-kemperman";
}
