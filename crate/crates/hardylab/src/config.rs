//! TOML run configuration: domain description, exponent list, grid
//! levels, and per-command knobs. Flags parsed by the binary override
//! file values.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::barriers::BarrierKind;
use crate::geometry::{Domain, Halfspace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Distance,
    Certify,
    Caccioppoli,
    Estimate,
    ProbePunctured,
    Classical,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distance => "distance",
            Command::Certify => "certify",
            Command::Caccioppoli => "caccioppoli",
            Command::Estimate => "estimate",
            Command::ProbePunctured => "probe-punctured",
            Command::Classical => "classical",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Command::Distance),
            "certify" => Ok(Command::Certify),
            "caccioppoli" => Ok(Command::Caccioppoli),
            "estimate" => Ok(Command::Estimate),
            "probe-punctured" => Ok(Command::ProbePunctured),
            "classical" => Ok(Command::Classical),
            other => Err(Error::Config(format!(
                "unknown command `{other}`; expected one of distance, certify, caccioppoli, \
                 estimate, probe-punctured, classical"
            ))),
        }
    }
}

/// Domain table mirroring the geometry constructors.
#[derive(Debug, Clone, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub r_inner: Option<f64>,
    pub r_outer: Option<f64>,
    pub halfspaces: Option<Vec<HalfspaceConfig>>,
    pub vertices: Option<Vec<Vec<f64>>>,
    pub dimension: Option<usize>,
    pub exterior_sphere_radius: Option<f64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceConfig {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl DomainConfig {
    fn require<T: Copy>(&self, field: Option<T>, name: &str) -> Result<T> {
        field.ok_or_else(|| {
            Error::Config(format!("domain.{name} is required for domain.kind = \"{}\"", self.kind))
        })
    }

    pub fn build(&self) -> Result<Domain> {
        let center = |dim: usize| -> Vec<f64> {
            self.center.clone().unwrap_or_else(|| vec![0.0; dim])
        };
        let domain = match self.kind.as_str() {
            "interval" => {
                let a = self.require(self.a, "a")?;
                let b = self.require(self.b, "b")?;
                Domain::interval(a, b)?
            }
            "square" => Domain::unit_square(),
            "ball" => {
                let r = self.require(self.radius, "radius")?;
                Domain::ball(center(self.dimension.unwrap_or(2)), r)?
            }
            "punctured-ball" => {
                let r = self.require(self.radius, "radius")?;
                Domain::punctured_ball(center(self.dimension.unwrap_or(2)), r)?
            }
            "annulus" => {
                let ri = self.require(self.r_inner, "r_inner")?;
                let ro = self.require(self.r_outer, "r_outer")?;
                Domain::annulus(center(self.dimension.unwrap_or(2)), ri, ro)?
            }
            "polytope" => {
                let hs = self.halfspaces.as_ref().ok_or_else(|| {
                    Error::Config("domain.halfspaces is required for domain.kind = \"polytope\"".into())
                })?;
                let halfspaces = hs
                    .iter()
                    .map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset })
                    .collect();
                Domain::convex_polytope(halfspaces)?
            }
            "polygon" => {
                let vs = self.vertices.as_ref().ok_or_else(|| {
                    Error::Config("domain.vertices is required for domain.kind = \"polygon\"".into())
                })?;
                let vertices = vs
                    .iter()
                    .map(|v| {
                        if v.len() == 2 {
                            Ok([v[0], v[1]])
                        } else {
                            Err(Error::Config(format!(
                                "domain.vertices entries must have 2 coordinates, got {}",
                                v.len()
                            )))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Domain::polygon(vertices)?
            }
            other => {
                return Err(Error::Config(format!(
                    "domain.kind `{other}` is not one of interval, square, ball, punctured-ball, \
                     annulus, polytope, polygon"
                )))
            }
        };
        match self.exterior_sphere_radius {
            Some(r) => domain.with_exterior_sphere(r),
            None => Ok(domain),
        }
    }
}

fn default_p() -> Vec<f64> {
    vec![2.0]
}

fn default_h() -> Vec<f64> {
    vec![1.0 / 32.0]
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig { p: default_p() }
    }
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_h")]
    pub h: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: default_h() }
    }
}

#[derive(Debug, Clone, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    /// Defaulted from (p, n) when absent: distance on convex domains,
    /// distance-power for p > n, exterior-sphere for p < n with a radius.
    pub kind: Option<BarrierKind>,
    pub radius: Option<f64>,
}

fn default_max_iters() -> usize {
    crate::estimator::DEFAULT_MAX_ITERS
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { max_iters: default_max_iters() }
    }
}

fn default_bumps() -> usize {
    100
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaccioppoliConfig {
    #[serde(default = "default_bumps")]
    pub bumps: usize,
}

impl Default for CaccioppoliConfig {
    fn default() -> Self {
        CaccioppoliConfig { bumps: default_bumps() }
    }
}

fn default_sequences() -> usize {
    100
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    #[serde(default = "default_sequences")]
    pub sequences: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig { sequences: default_sequences() }
    }
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { levels: default_levels() }
    }
}

fn default_tol_scale() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

/// One batch run: which pipeline, on what domain, at which exponents and
/// resolutions, writing where.
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "crate::estimator::default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol_scale")]
    pub tol_scale: f64,
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub barrier: BarrierConfig,
    #[serde(default)]
    pub estimate: EstimateConfig,
    #[serde(default)]
    pub caccioppoli: CaccioppoliConfig,
    #[serde(default)]
    pub classical: ClassicalConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            out: default_out(),
            seed: crate::estimator::DEFAULT_SEED,
            tol_scale: default_tol_scale(),
            domain: None,
            params: ParamsConfig::default(),
            grid: GridConfig::default(),
            barrier: BarrierConfig::default(),
            estimate: EstimateConfig::default(),
            caccioppoli: CaccioppoliConfig::default(),
            classical: ClassicalConfig::default(),
            probe: ProbeConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)
            .map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.p.is_empty() {
            return Err(Error::Config("params.p must list at least one exponent".into()));
        }
        if self.grid.h.is_empty() {
            return Err(Error::Config("grid.h must list at least one spacing".into()));
        }
        if !(self.tol_scale > 0.0) {
            return Err(Error::Config(format!(
                "tol_scale must be positive, got {}",
                self.tol_scale
            )));
        }
        Ok(())
    }

    /// The configured domain, or a config error naming the missing table.
    pub fn build_domain(&self) -> Result<Domain> {
        match &self.domain {
            Some(d) => d.build(),
            None => Err(Error::Config(
                "a [domain] table with a `kind` key is required for this command".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_annulus_config() {
        let text = r#"
            command = "estimate"
            out = "reports"
            seed = 7
            tol_scale = 2.0

            [domain]
            kind = "annulus"
            center = [0.0, 0.0]
            r_inner = 0.25
            r_outer = 1.0

            [params]
            p = [4.0]

            [grid]
            h = [0.0625, 0.03125]

            [estimate]
            max_iters = 80
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.command, Some(Command::Estimate));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.params.p, vec![4.0]);
        assert_eq!(cfg.grid.h.len(), 2);
        assert_eq!(cfg.estimate.max_iters, 80);
        let domain = cfg.build_domain().unwrap();
        assert_eq!(domain.dimension, 2);
        assert!(!domain.is_convex());
    }

    #[test]
    fn missing_domain_kind_names_the_key() {
        let text = "command = \"certify\"\n[domain]\nr_inner = 0.25\n";
        let err = RunConfig::from_toml(text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("kind"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_context() {
        let text = "command = \"estimate\"\nbanana = 3\n";
        let err = RunConfig::from_toml(text).unwrap_err();
        assert!(format!("{err}").contains("banana"));
    }

    #[test]
    fn empty_p_list_is_rejected() {
        let text = "command = \"estimate\"\n[params]\np = []\n";
        assert!(RunConfig::from_toml(text).is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_toml("command = \"classical\"\n").unwrap();
        assert_eq!(cfg.seed, crate::estimator::DEFAULT_SEED);
        assert_eq!(cfg.tol_scale, 1.0);
        assert_eq!(cfg.classical.sequences, 100);
        assert_eq!(cfg.probe.levels, 3);
        assert!(cfg.build_domain().is_err());
    }

    #[test]
    fn polygon_and_interval_domains_build() {
        let text = r#"
            command = "distance"
            [domain]
            kind = "polygon"
            vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.build_domain().unwrap().dimension, 2);

        let text = r#"
            command = "distance"
            [domain]
            kind = "interval"
            a = 0.0
            b = 1.0
        "#;
        assert_eq!(RunConfig::from_toml(text).unwrap().build_domain().unwrap().dimension, 1);
    }

    #[test]
    fn command_parses_from_str() {
        assert_eq!("probe-punctured".parse::<Command>().unwrap(), Command::ProbePunctured);
        assert!("bogus".parse::<Command>().is_err());
    }
}
