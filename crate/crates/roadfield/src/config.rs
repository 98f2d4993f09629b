//! JSON run configuration: strict parsing with JSON-pointer error locations,
//! defaulting, and resolution into the typed parameter objects the library
//! consumes.

use crate::dynamics::EvolveOpts;
use crate::eigen::{GridSpec, SolveOpts, SweepFamily};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::model::{ModelParams, ReactionKind, ReactionSpec};
use serde::{Deserialize, Serialize};

/// Top-level run configuration, as found in the JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub reaction: ReactionConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

/// Transport and exchange coefficients. `D` diffuses along the road, `d` in
/// the field; `nu` and `mu` are the jump rates field->road and road->field;
/// `c` is the shared drift and `ell` the period of the medium.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "D")]
    pub d_road: f64,
    #[serde(rename = "d")]
    pub d_field: f64,
    pub nu: f64,
    pub mu: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default = "one")]
    pub ell: f64,
}

/// Reaction description. `kind` selects the family; which other fields are
/// required depends on it:
///
/// * `"logistic-periodic"`: `a0`, `a1` (and optionally `alpha`, `M`);
/// * `"homogeneous"`: `a0` (and optionally `alpha`, `M`);
/// * `"custom"`: `a_samples`, `f_table`, `v_max`, `M` (and optionally
///   `alpha`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_table: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
}

/// Discretization and solver controls. Everything has a sensible default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_h")]
    pub hx: f64,
    #[serde(default = "default_h")]
    pub hy: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_maxiter")]
    pub maxiter: usize,
    /// Half-widths for truncation sweeps; defaults to `[2, 4, 8, 16] * ell`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<f64>>,
    /// Amplitude ladder; defaults to `[0.1, 1, 10, 100]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default = "default_tmax")]
    pub t_max: f64,
    #[serde(default = "default_delta_sign")]
    pub delta_sign: f64,
    /// Domain family for `eigen`/`sweep`: one of `coupled`,
    /// `dirichlet-rect`, `neumann-rect`, `cell`, `strip`, `half-strip`,
    /// `roadless-half-strip` (sweeps accept only the first three).
    #[serde(default = "default_family")]
    pub family: String,
    /// Half-width for single-domain eigenproblems; defaults to the largest
    /// sweep size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Height for single-domain eigenproblems; defaults to `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    /// Half-width for the ordering audit; defaults to `4 * ell`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_r: Option<f64>,
    /// Height of the dynamics half-strip; defaults to `8 * ell`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dyn_height: Option<f64>,
    /// Periods across the dynamics/periodic domains.
    #[serde(default = "default_periods")]
    pub periods: usize,
    #[serde(default = "default_steady_rel")]
    pub steady_rel: f64,
    #[serde(default = "default_decay_rel")]
    pub decay_rel: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty numerics must deserialize")
    }
}

/// Artifact controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    /// Write eigenvector / final-state CSV snapshots.
    #[serde(default = "default_true")]
    pub write_vectors: bool,
    /// Record a trajectory sample every this many steps.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Let `classify` run the nonlinear dynamics cross-check.
    #[serde(default = "default_true")]
    pub dynamics: bool,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty outputs must deserialize")
    }
}

fn one() -> f64 {
    1.0
}
fn default_h() -> f64 {
    0.125
}
fn default_dt() -> f64 {
    0.01
}
fn default_tol() -> f64 {
    1e-10
}
fn default_maxiter() -> usize {
    10_000
}
fn default_tmax() -> f64 {
    1000.0
}
fn default_delta_sign() -> f64 {
    1e-3
}
fn default_family() -> String {
    "coupled".into()
}
fn default_periods() -> usize {
    1
}
fn default_steady_rel() -> f64 {
    1e-8
}
fn default_decay_rel() -> f64 {
    1e-6
}
fn default_true() -> bool {
    true
}
fn default_record_every() -> usize {
    100
}

/// Which domain a single-eigenproblem run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainChoice {
    Coupled,
    DirichletRect,
    NeumannRect,
    Cell,
    Strip,
    HalfStrip,
    RoadlessHalfStrip,
}

impl DomainChoice {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "coupled" => DomainChoice::Coupled,
            "dirichlet-rect" => DomainChoice::DirichletRect,
            "neumann-rect" => DomainChoice::NeumannRect,
            "cell" => DomainChoice::Cell,
            "strip" => DomainChoice::Strip,
            "half-strip" => DomainChoice::HalfStrip,
            "roadless-half-strip" => DomainChoice::RoadlessHalfStrip,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainChoice::Coupled => "coupled",
            DomainChoice::DirichletRect => "dirichlet-rect",
            DomainChoice::NeumannRect => "neumann-rect",
            DomainChoice::Cell => "cell",
            DomainChoice::Strip => "strip",
            DomainChoice::HalfStrip => "half-strip",
            DomainChoice::RoadlessHalfStrip => "roadless-half-strip",
        }
    }

    pub fn sweep_family(self) -> Option<SweepFamily> {
        Some(match self {
            DomainChoice::Coupled => SweepFamily::Coupled,
            DomainChoice::DirichletRect => SweepFamily::DirichletRect,
            DomainChoice::NeumannRect => SweepFamily::NeumannRect,
            _ => return None,
        })
    }
}

/// Everything a subcommand needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ModelParams,
    pub reaction: ReactionSpec,
    pub grid: GridSpec,
    pub solve: SolveOpts,
    pub evolve: EvolveOpts,
    pub sizes: Vec<f64>,
    pub alphas: Vec<f64>,
    pub delta_sign: f64,
    pub family: DomainChoice,
    pub r: f64,
    pub height: f64,
    pub audit_r: f64,
    pub dyn_height: f64,
    pub periods: usize,
    pub write_vectors: bool,
    pub run_dynamics: bool,
}

/// Parses a strict JSON run configuration, reporting the offending location
/// as a JSON pointer like `/model/d` on failure.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize::<_, RunConfig>(de) {
        Ok(cfg) => Ok(cfg),
        Err(err) => {
            let raw = err.path().to_string();
            let pointer = if raw == "." {
                "/".to_string()
            } else {
                format!("/{}", raw.replace('.', "/").replace('[', "/").replace(']', ""))
            };
            Err(Error::config(pointer, err.inner().to_string()))
        }
    }
}

/// Canonical SHA-256 of a parsed configuration (round-tripped through the
/// struct, so formatting and key order in the source file do not matter).
pub fn config_sha256(cfg: &RunConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_vec(cfg).expect("config serialization cannot fail");
    let digest = Sha256::digest(&canonical);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn require(field: Option<f64>, pointer: &str, kind: &str) -> Result<f64> {
    field.ok_or_else(|| Error::config(pointer, format!("required for kind \"{kind}\"")))
}

fn forbid<T>(field: &Option<T>, pointer: &str, kind: &str) -> Result<()> {
    if field.is_some() {
        return Err(Error::config(pointer, format!("not allowed for kind \"{kind}\"")));
    }
    Ok(())
}

impl RunConfig {
    /// Validates the configuration and materializes the typed objects.
    pub fn resolve(&self) -> Result<Resolved> {
        let m = &self.model;
        let params = ModelParams::new(m.d_road, m.d_field, m.nu, m.mu, m.c, m.ell)
            .map_err(|e| Error::config("/model", e.to_string()))?;

        let r = &self.reaction;
        let alpha = r.alpha.unwrap_or(1.0);
        let reaction = match r.kind.as_str() {
            kind @ "logistic-periodic" => {
                let a0 = require(r.a0, "/reaction/a0", kind)?;
                let a1 = require(r.a1, "/reaction/a1", kind)?;
                forbid(&r.a_samples, "/reaction/a_samples", kind)?;
                forbid(&r.f_table, "/reaction/f_table", kind)?;
                forbid(&r.v_max, "/reaction/v_max", kind)?;
                let sat = r.saturation.unwrap_or((a0 + a1.abs()).max(0.5));
                ReactionSpec::logistic(a0, a1, alpha, sat, m.ell)
            }
            kind @ "homogeneous" => {
                let a0 = require(r.a0, "/reaction/a0", kind)?;
                forbid(&r.a1, "/reaction/a1", kind)?;
                forbid(&r.a_samples, "/reaction/a_samples", kind)?;
                forbid(&r.f_table, "/reaction/f_table", kind)?;
                forbid(&r.v_max, "/reaction/v_max", kind)?;
                let sat = r.saturation.unwrap_or(a0.max(0.5));
                ReactionSpec::homogeneous(a0, alpha, sat, m.ell)
            }
            kind @ "custom" => {
                forbid(&r.a0, "/reaction/a0", kind)?;
                forbid(&r.a1, "/reaction/a1", kind)?;
                let a_samples = r
                    .a_samples
                    .clone()
                    .ok_or_else(|| Error::config("/reaction/a_samples", "required for kind \"custom\""))?;
                let f_table = r
                    .f_table
                    .clone()
                    .ok_or_else(|| Error::config("/reaction/f_table", "required for kind \"custom\""))?;
                let v_max = require(r.v_max, "/reaction/v_max", kind)?;
                let sat = r
                    .saturation
                    .ok_or_else(|| Error::config("/reaction/M", "required for kind \"custom\""))?;
                let spec = ReactionSpec {
                    kind: ReactionKind::Custom { a_samples, f_table, v_max },
                    alpha,
                    saturation: sat,
                    ell: m.ell,
                };
                spec.validate_params().map(|()| spec)
            }
            other => {
                return Err(Error::config(
                    "/reaction/kind",
                    format!(
                        "unknown kind \"{other}\" (expected \"logistic-periodic\", \
                         \"homogeneous\", or \"custom\")"
                    ),
                ));
            }
        }
        .map_err(|e| match e {
            Error::Config { .. } => e,
            other => Error::config("/reaction", other.to_string()),
        })?;

        let n = &self.numerics;
        for (value, pointer) in [
            (n.hx, "/numerics/hx"),
            (n.hy, "/numerics/hy"),
            (n.dt, "/numerics/dt"),
            (n.tol, "/numerics/tol"),
            (n.t_max, "/numerics/t_max"),
            (n.delta_sign, "/numerics/delta_sign"),
            (n.steady_rel, "/numerics/steady_rel"),
            (n.decay_rel, "/numerics/decay_rel"),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(pointer, format!("must be positive and finite, got {value}")));
            }
        }
        if n.maxiter == 0 {
            return Err(Error::config("/numerics/maxiter", "must be at least 1"));
        }
        if n.periods == 0 {
            return Err(Error::config("/numerics/periods", "must be at least 1"));
        }

        let sizes = match &n.sizes {
            Some(s) => s.clone(),
            None => vec![2.0 * m.ell, 4.0 * m.ell, 8.0 * m.ell, 16.0 * m.ell],
        };
        if sizes.is_empty() {
            return Err(Error::config("/numerics/sizes", "must not be empty"));
        }
        if sizes.iter().any(|&s| !(s.is_finite() && s > 0.0)) || sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "/numerics/sizes",
                "must be strictly increasing positive half-widths",
            ));
        }
        let alphas = n.alphas.clone().unwrap_or_else(|| vec![0.1, 1.0, 10.0, 100.0]);
        if alphas.is_empty()
            || alphas.iter().any(|&a| !(a.is_finite() && a > 0.0))
            || alphas.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::config(
                "/numerics/alphas",
                "must be strictly increasing positive amplitudes",
            ));
        }

        let family = DomainChoice::parse(&n.family).ok_or_else(|| {
            Error::config("/numerics/family", format!("unknown domain family \"{}\"", n.family))
        })?;

        let r_single = n.r.unwrap_or(*sizes.last().expect("sizes checked nonempty"));
        if !(r_single.is_finite() && r_single > 0.0) {
            return Err(Error::config("/numerics/r", "must be positive and finite"));
        }
        let height = n.height.unwrap_or(r_single);
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::config("/numerics/height", "must be positive and finite"));
        }
        let audit_r = n.audit_r.unwrap_or(4.0 * m.ell);
        if !(audit_r.is_finite() && audit_r > 0.0) {
            return Err(Error::config("/numerics/audit_r", "must be positive and finite"));
        }
        let dyn_height = n.dyn_height.unwrap_or(8.0 * m.ell);
        if !(dyn_height.is_finite() && dyn_height > 0.0) {
            return Err(Error::config("/numerics/dyn_height", "must be positive and finite"));
        }

        let o = &self.outputs;
        if o.record_every == 0 {
            return Err(Error::config("/outputs/record_every", "must be at least 1"));
        }

        Ok(Resolved {
            params,
            reaction,
            grid: GridSpec { hx: n.hx, hy: n.hy },
            solve: SolveOpts { tol: n.tol, maxiter: n.maxiter, ..SolveOpts::default() },
            evolve: EvolveOpts {
                dt: n.dt,
                t_max: n.t_max,
                steady_rel: n.steady_rel,
                decay_rel: n.decay_rel,
                record_every: o.record_every,
            },
            sizes,
            alphas,
            delta_sign: n.delta_sign,
            family,
            r: r_single,
            height,
            audit_r,
            dyn_height,
            periods: n.periods,
            write_vectors: o.write_vectors,
            run_dynamics: o.dynamics,
        })
    }
}

impl Resolved {
    /// Builds the single-domain geometry selected by `family`/`r`/`height`.
    pub fn single_geometry(&self) -> Result<Geometry> {
        let GridSpec { hx, hy } = self.grid;
        let ell = self.params.ell;
        match self.family {
            DomainChoice::Coupled => Geometry::truncated_road_field(self.r, self.height, hx, hy),
            DomainChoice::DirichletRect => Geometry::dirichlet_rect(self.r, self.height, hx, hy),
            DomainChoice::NeumannRect => Geometry::neumann_rect(self.r, self.height, hx, hy),
            DomainChoice::Cell => Geometry::periodic_cell(ell, hx),
            DomainChoice::Strip => Geometry::periodic_strip(self.r, ell, self.periods, hx, hy),
            DomainChoice::HalfStrip => {
                Geometry::periodic_half_strip(self.height, ell, self.periods, hx, hy)
            }
            DomainChoice::RoadlessHalfStrip => {
                Geometry::roadless_half_strip(self.height, ell, self.periods, hx, hy)
            }
        }
    }
}
