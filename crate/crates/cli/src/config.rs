use serde::{Deserialize, Serialize};
use surflab::graph::Boundary;
use surflab::potential::{MixtureSpec, PotentialSpec};
use surflab::stats::MaxNormalization;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid value for `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn err(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError { field: field.into(), reason: reason.into() }
}

/// Re-labels a core parameter error under the config section it came from.
fn from_core(section: &str, e: surflab::Error) -> ConfigError {
    match e {
        surflab::Error::InvalidParameter { name, reason } => err(format!("{section}.{name}"), reason),
        other => err(section, other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Decompose,
    Sample,
    ResistanceProfile,
    Percolate,
    VerifyInequalities,
    Tails,
    MaxScaling,
    VarianceGrowth,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Decompose,
        ExperimentKind::Sample,
        ExperimentKind::ResistanceProfile,
        ExperimentKind::Percolate,
        ExperimentKind::VerifyInequalities,
        ExperimentKind::Tails,
        ExperimentKind::MaxScaling,
        ExperimentKind::VarianceGrowth,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Decompose => "decompose",
            ExperimentKind::Sample => "sample",
            ExperimentKind::ResistanceProfile => "resistance-profile",
            ExperimentKind::Percolate => "percolate",
            ExperimentKind::VerifyInequalities => "verify-inequalities",
            ExperimentKind::Tails => "tails",
            ExperimentKind::MaxScaling => "max-scaling",
            ExperimentKind::VarianceGrowth => "variance-growth",
        }
    }
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

fn wired() -> Boundary {
    Boundary::Wired
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub d: usize,
    /// Box radii; a single entry for experiments on one box.
    pub ls: Vec<usize>,
    #[serde(default = "wired")]
    pub boundary: Boundary,
    #[serde(default = "one")]
    pub j: usize,
}

pub const MAX_SITES: f64 = 5e6;

impl ModelSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=8).contains(&self.d) {
            return Err(err("model.d", format!("{} outside 1..=8", self.d)));
        }
        if self.ls.is_empty() {
            return Err(err("model.ls", "at least one box radius required"));
        }
        for &l in &self.ls {
            if (2.0 * l as f64 + 1.0).powi(self.d as i32) > MAX_SITES {
                return Err(err("model.ls", format!("box of radius {l} in d = {} is too large", self.d)));
            }
        }
        if !(1..=4).contains(&self.j) {
            return Err(err("model.j", format!("{} outside 1..=4", self.j)));
        }
        match &self.boundary {
            Boundary::Wired => {}
            _ if self.j >= 2 => return Err(err("model.boundary", "iterated Laplacians need a wired boundary")),
            Boundary::Torus => {
                if self.ls.contains(&0) {
                    return Err(err("model.ls", "torus needs radius ≥ 1"));
                }
            }
            Boundary::FreePinned { v0 } => {
                if let Some(v) = v0 {
                    if v.len() != self.d {
                        return Err(err("model.boundary.v0", format!("expected {} coordinates", self.d)));
                    }
                    let lmin = *self.ls.iter().min().expect("nonempty") as i64;
                    if v.iter().any(|c| c.abs() > lmin) {
                        return Err(err("model.boundary.v0", "outside the smallest box"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    MixtureExact,
    Splice,
    Metropolis,
}

fn default_burn_in() -> usize {
    1000
}
fn default_thin() -> usize {
    10
}
fn default_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub algorithm: Algorithm,
    pub sweeps: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default = "one")]
    pub replicas: usize,
    /// Random-walk scale, Metropolis only.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<Vec<i64>>,
}

impl SamplerSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.thin == 0 || self.thin > 1_000_000 {
            return Err(err("sampler.thin", "must lie in 1..=1e6"));
        }
        if self.sweeps < self.thin || self.sweeps > 100_000_000 {
            return Err(err("sampler.sweeps", "must lie in thin..=1e8"));
        }
        if self.burn_in > 100_000_000 {
            return Err(err("sampler.burn_in", "must be at most 1e8"));
        }
        if !(1..=1024).contains(&self.replicas) {
            return Err(err("sampler.replicas", "must lie in 1..=1024"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(err("sampler.step", format!("{} must be a finite positive number", self.step)));
        }
        Ok(())
    }
}

fn default_lo() -> f64 {
    1e-3
}
fn default_hi() -> f64 {
    1e3
}
fn default_points() -> usize {
    200
}
fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { lo: default_lo(), hi: default_hi(), points: default_points(), tolerance: default_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub seeds: usize,
    #[serde(default)]
    pub iterative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationSpec {
    pub p: Vec<f64>,
    pub samples: usize,
}

fn default_det_n() -> usize {
    4
}
fn default_det_trials() -> usize {
    10_000
}
fn default_sets() -> usize {
    100
}
fn default_fkg() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalitySpec {
    #[serde(default = "default_det_n")]
    pub det_n: usize,
    #[serde(default = "default_det_trials")]
    pub det_trials: usize,
    #[serde(default = "default_sets")]
    pub random_sets: usize,
    #[serde(default = "default_fkg")]
    pub fkg_trials: usize,
}

impl Default for InequalitySpec {
    fn default() -> Self {
        InequalitySpec {
            det_n: default_det_n(),
            det_trials: default_det_trials(),
            random_sets: default_sets(),
            fkg_trials: default_fkg(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailFit {
    #[default]
    Auto,
    Power,
    Stretched,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    #[serde(default)]
    pub fit: TailFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxScalingSpec {
    pub normalization: MaxNormalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMethod {
    /// Gaussian free field with unit resistances, solved exactly.
    #[default]
    Exact,
    /// Probe variance of sampler chains.
    Chain,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceSpec {
    #[serde(default)]
    pub method: VarianceMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percolation: Option<PercolationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<InequalitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tails: Option<TailSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_scaling: Option<MaxScalingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<VarianceSpec>,
}

fn need<'a, T>(v: &'a Option<T>, field: &str, kind: ExperimentKind) -> Result<&'a T, ConfigError> {
    v.as_ref().ok_or_else(|| err(field, format!("required by `{}` experiments", kind.name())))
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| err(parse_field(&e), e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The config with run-only settings cleared; equal canonical forms give equal results.
    pub fn canonical(&self) -> String {
        ExperimentConfig { threads: 1, output: None, ..self.clone() }.to_toml()
    }

    pub fn model(&self) -> Result<&ModelSpec, ConfigError> {
        need(&self.model, "model", self.kind)
    }

    pub fn sampler(&self) -> Result<&SamplerSpec, ConfigError> {
        need(&self.sampler, "sampler", self.kind)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=256).contains(&self.threads) {
            return Err(err("threads", format!("{} outside 1..=256", self.threads)));
        }
        if let Some(m) = &self.model {
            m.validate()?;
        }
        if let Some(p) = &self.potential {
            p.validate().map_err(|e| from_core("potential", e))?;
        }
        if let Some(m) = &self.mixture {
            m.build().map_err(|e| from_core("mixture", e))?;
        }
        if let Some(s) = &self.sampler {
            s.validate()?;
        }
        let k = self.kind;
        if matches!(k, ExperimentKind::MaxScaling | ExperimentKind::VarianceGrowth | ExperimentKind::ResistanceProfile)
            && self.model()?.ls.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(err("model.ls", "radii must be strictly increasing"));
        }
        match k {
            ExperimentKind::Decompose => {
                need(&self.potential, "potential", k)?;
                need(&self.mixture, "mixture", k)?;
                let g = self.grid.clone().unwrap_or_default();
                if !(g.lo > 0.0 && g.lo.is_finite()) {
                    return Err(err("grid.lo", "must be a finite positive number"));
                }
                if !(g.hi > g.lo && g.hi.is_finite()) {
                    return Err(err("grid.hi", "must be finite and exceed grid.lo"));
                }
                if !(2..=100_000).contains(&g.points) {
                    return Err(err("grid.points", "must lie in 2..=1e5"));
                }
                if !(g.tolerance > 0.0 && g.tolerance.is_finite()) {
                    return Err(err("grid.tolerance", "must be a finite positive number"));
                }
            }
            ExperimentKind::Sample | ExperimentKind::Tails | ExperimentKind::MaxScaling => {
                self.model()?;
                self.validate_sampler()?;
                if k == ExperimentKind::MaxScaling {
                    let m = need(&self.max_scaling, "max_scaling", k)?;
                    if self.model()?.ls.len() < 3 {
                        return Err(err("model.ls", "max scaling needs at least 3 boxes"));
                    }
                    match m.normalization {
                        MaxNormalization::LogPower { beta } if !(beta > 0.0 && beta.is_finite()) => {
                            return Err(err("max_scaling.normalization.beta", "must be a finite positive number"))
                        }
                        MaxNormalization::VolumePower { d, alpha }
                            if !(d > 0.0 && d.is_finite() && alpha > 0.0 && alpha.is_finite()) =>
                        {
                            return Err(err("max_scaling.normalization", "d and alpha must be finite and positive"))
                        }
                        _ => {}
                    }
                }
            }
            ExperimentKind::ResistanceProfile => {
                let m = self.model()?;
                if m.j != 1 || m.boundary != Boundary::Wired {
                    return Err(err("model", "resistance profiles use wired boxes with j = 1"));
                }
                need(&self.mixture, "mixture", k)?;
                let p = need(&self.profile, "profile", k)?;
                if !(1..=10_000).contains(&p.seeds) {
                    return Err(err("profile.seeds", "must lie in 1..=1e4"));
                }
            }
            ExperimentKind::Percolate => {
                self.model()?;
                let p = need(&self.percolation, "percolation", k)?;
                if p.p.is_empty() {
                    return Err(err("percolation.p", "at least one probability required"));
                }
                if let Some(bad) = p.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return Err(err("percolation.p", format!("{bad} outside [0, 1]")));
                }
                if !(1..=100_000).contains(&p.samples) {
                    return Err(err("percolation.samples", "must lie in 1..=1e5"));
                }
            }
            ExperimentKind::VerifyInequalities => {
                let q = self.inequalities.clone().unwrap_or_default();
                if !(1..=4).contains(&q.det_n) {
                    return Err(err("inequalities.det_n", "must lie in 1..=4"));
                }
                if !(1..=10_000_000).contains(&q.det_trials) {
                    return Err(err("inequalities.det_trials", "must lie in 1..=1e7"));
                }
                if q.random_sets > 100_000 {
                    return Err(err("inequalities.random_sets", "must be at most 1e5"));
                }
                if !(1..=100_000).contains(&q.fkg_trials) {
                    return Err(err("inequalities.fkg_trials", "must lie in 1..=1e5"));
                }
            }
            ExperimentKind::VarianceGrowth => {
                let m = self.model()?;
                if m.ls.len() < 4 {
                    return Err(err("model.ls", "variance growth needs at least 4 boxes"));
                }
                if m.ls.iter().any(|&l| l < 2) {
                    return Err(err("model.ls", "radii must be at least 2"));
                }
                if self.variance.clone().unwrap_or_default().method == VarianceMethod::Chain {
                    self.validate_sampler()?;
                }
            }
        }
        Ok(())
    }

    fn validate_sampler(&self) -> Result<(), ConfigError> {
        let s = self.sampler()?;
        let k = self.kind;
        match s.algorithm {
            Algorithm::MixtureExact => {
                let m = need(&self.mixture, "mixture", k)?;
                if matches!(m, MixtureSpec::TiltedStable { .. }) {
                    return Err(err("mixture", "tilted-stable measures have no exact posterior sampler"));
                }
            }
            Algorithm::Splice => {
                need(&self.potential, "potential", k)?;
                let m = need(&self.mixture, "mixture", k)?;
                if matches!(m, MixtureSpec::TiltedStable { .. }) {
                    return Err(err("mixture", "tilted-stable measures have no exact posterior sampler"));
                }
            }
            Algorithm::Metropolis => {
                need(&self.potential, "potential", k)?;
            }
        }
        if let Some(p) = &s.probe {
            let m = self.model()?;
            let lmin = *m.ls.iter().min().expect("nonempty") as i64;
            if p.len() != m.d || p.iter().any(|c| c.abs() > lmin) {
                return Err(err("sampler.probe", "must be a site of every box"));
            }
        }
        Ok(())
    }
}

fn parse_field(e: &toml::de::Error) -> String {
    let msg = e.message();
    if let Some(rest) = msg.split("unknown field `").nth(1) {
        return rest.split('`').next().unwrap_or("config").to_string();
    }
    if let Some(rest) = msg.split("missing field `").nth(1) {
        return rest.split('`').next().unwrap_or("config").to_string();
    }
    "config".to_string()
}
