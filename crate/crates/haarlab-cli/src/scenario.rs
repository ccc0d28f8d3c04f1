//! Scenario files: a TOML schema naming a catalog group, a resolution, seeded
//! set constructors, and the analyses to run over them.

use serde::Deserialize;

use haarlab::chart::BoxN;
use haarlab::error::{Error, Result};
use haarlab::grid::GridSet;
use haarlab::group::{by_name, GroupModel};
use haarlab::quotient::{notch_fiber, preimage_box, QuotientMap};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub group: String,
    /// Cells per unit length on every axis.
    pub resolution: usize,
    pub seed: u64,
    #[serde(default)]
    pub sets: Vec<SetSpec>,
    #[serde(default)]
    pub analyses: Vec<AnalysisSpec>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SetSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: SetKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    /// Axis-aligned box.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Union of boxes.
    Union { boxes: Vec<BoxSpec> },
    /// Seeded random cell union with a smoothing radius.
    Random {
        cells: usize,
        #[serde(default)]
        radius: usize,
    },
    /// Full-fiber preimage of a base box (cylinder groups).
    Preimage {
        base_lo: Vec<f64>,
        base_hi: Vec<f64>,
        /// Optional fiber notch: base position and depth fraction.
        #[serde(default)]
        notch_at: Option<Vec<f64>>,
        #[serde(default)]
        notch_depth: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct AnalysisSpec {
    #[serde(flatten)]
    pub kind: AnalysisKind,
    /// Expected outcome; "refused" marks hypothesis-guard scenarios.
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    #[default]
    Pass,
    Refused,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "analysis", rename_all = "snake_case")]
pub enum AnalysisKind {
    CatalogCheck,
    Measure { a: String },
    ProductBracket { a: String, b: String },
    Ruzsa { a: String, b: String },
    RuzsaAxioms { a: String, b: String, c: String },
    Bm { a: String, b: String },
    Kemperman { a: String, b: String },
    Discrepancy { a: String, b: String },
    Expansion { a: String, b: String },
    AsymExpansion { a: String, b: String },
    DimensionBound { k: f64 },
    Cover { a: String, b: String, direction: String },
    Stabilizer { a: String, epsilon_frac: f64 },
    TaoPipeline { a: String, b: String },
    Prop45 { a: String, n_max: u32 },
    ConvAgreement { a: String, b: String },
    EnergyRelation { a: String },
    FiberIntegral { a: String },
    SuperlevelInclusion { a: String, b: String },
    EqualityDomination { a: String, b: String, n: u32 },
    AlmostDomination { a: String, b: String },
    Pushforward { a: String },
    Freiman { a: String, b: String },
    InverseKemperman { a: String, b: String },
    ProgressionCover { a: String, i: Vec<f64>, steps: Vec<StepSpec> },
    Fibers { a: String },
    Hoelder { a: String },
    StrictGap { a: String },
    Conjugation { x: Vec<f64>, g: Vec<f64> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub step: f64,
    pub count: u64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let sc: Scenario =
            toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        if sc.resolution == 0 {
            return Err(Error::Parse("resolution must be positive".into()));
        }
        // resolutions and set names validated up front
        let mut seen = std::collections::BTreeSet::new();
        for s in &sc.sets {
            if !seen.insert(s.name.clone()) {
                return Err(Error::Parse(format!("duplicate set name {}", s.name)));
            }
        }
        by_name(&sc.group)?;
        Ok(sc)
    }

    pub fn group_model(&self) -> Result<GroupModel> {
        by_name(&self.group)
    }

    pub fn cell_widths(&self, g: &GroupModel) -> Vec<f64> {
        vec![1.0 / self.resolution as f64; g.chart_dim()]
    }

    /// Build every set at the scenario resolution, deterministically from the
    /// seed: set i draws from ChaCha8(seed · 2⁳² + i).
    pub fn build_sets(&self, g: &GroupModel) -> Result<Vec<(String, GridSet)>> {
        self.build_sets_at(g, self.resolution)
    }

    pub fn build_sets_at(&self, g: &GroupModel, resolution: usize) -> Result<Vec<(String, GridSet)>> {
        use rand::SeedableRng;
        let h = vec![1.0 / resolution as f64; g.chart_dim()];
        let mut out = Vec::with_capacity(self.sets.len());
        for (i, spec) in self.sets.iter().enumerate() {
            let set = match &spec.kind {
                SetKind::Box { lo, hi } => {
                    check_dims(g, lo)?;
                    check_dims(g, hi)?;
                    GridSet::from_box(*g, &h, &BoxN::from_bounds(lo, hi))
                }
                SetKind::Union { boxes } => {
                    let bs: Result<Vec<BoxN>> = boxes
                        .iter()
                        .map(|b| {
                            check_dims(g, &b.lo)?;
                            Ok(BoxN::from_bounds(&b.lo, &b.hi))
                        })
                        .collect();
                    GridSet::from_boxes(*g, &h, &bs?)
                }
                SetKind::Random { cells, radius } => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                        self.seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(i as u64),
                    );
                    haarlab::catalog_check::random_cell_union(g, &mut rng, &h, *cells, *radius)
                }
                SetKind::Preimage { base_lo, base_hi, notch_at, notch_depth } => {
                    let q = QuotientMap::new(*g)?;
                    let base = preimage_box(&q, &h, base_lo, base_hi);
                    match (notch_at, notch_depth) {
                        (Some(at), Some(depth)) => notch_fiber(&q, &base, at, *depth)?,
                        _ => base,
                    }
                }
            };
            out.push((spec.name.clone(), set));
        }
        Ok(out)
    }
}

fn check_dims(g: &GroupModel, v: &[f64]) -> Result<()> {
    if v.len() != g.chart_dim() {
        return Err(Error::Parse(format!(
            "coordinate arity {} does not match chart dimension {} of {}",
            v.len(),
            g.chart_dim(),
            g.name
        )));
    }
    Ok(())
}

pub fn lookup<'s>(sets: &'s [(String, GridSet)], name: &str) -> Result<&'s GridSet> {
    sets.iter()
        .find(|(n, _)| n == name)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::Parse(format!("unknown set name {name}")))
}
