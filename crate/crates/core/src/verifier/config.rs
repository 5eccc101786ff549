//! Declarative experiment configuration (TOML).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gauge::{assemble_gauge, FourierField, GaugeConfig, UnitaryGroup};
use crate::geometry::{build_torus, TorusGeometry};
use crate::linalg::{CMat, C64};
use crate::profile::{make_chi_delta, Deformation, Profile};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub geometry: GeometryBlock,
    pub gauge: GaugeBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub checks: ChecksBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub n: usize,
    pub lengths: Vec<f64>,
    /// Bulk Fourier cutoffs, one per direction (transverse last).
    pub cutoffs: Vec<usize>,
}

/// One Fourier coefficient of one tangential component; `value` lists
/// the matrix entries row-major as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub component: usize,
    pub mode: Vec<i64>,
    pub value: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Sharp,
    Smoothed { delta: f64, delta0: f64 },
    Cylinder { length: f64 },
}

impl ProfileSpec {
    pub fn build(&self, deformation: Option<Deformation>) -> Result<Profile> {
        let p = match *self {
            ProfileSpec::Sharp => Profile::sharp(),
            ProfileSpec::Smoothed { delta, delta0 } => make_chi_delta(delta, delta0)?,
            ProfileSpec::Cylinder { length } => Profile::cylinder(length)?,
        };
        match deformation {
            Some(d) => p.with_deformation(d),
            None => Ok(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeBlock {
    /// `N` of the structure group `U(N)`.
    #[serde(default = "default_group")]
    pub group: usize,
    /// Chern number of a twisted U(1) bundle.
    #[serde(default)]
    pub flux: i64,
    #[serde(default = "default_profile")]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub deformation: Option<Deformation>,
    #[serde(default)]
    pub a_minus: Vec<FourierTerm>,
    #[serde(default)]
    pub jump: Vec<FourierTerm>,
    /// Normal component `A_n`; only the axial gauge (empty) is accepted.
    #[serde(default)]
    pub normal: Vec<FourierTerm>,
}

fn default_group() -> usize {
    1
}

fn default_profile() -> ProfileSpec {
    ProfileSpec::Sharp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigensolverMode {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smoothing {
    pub delta: f64,
    pub delta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    /// Times of the heat-trace index.
    pub heat_times: Vec<f64>,
    /// Gauss-Legendre nodes along the wall family.
    pub family_samples: usize,
    /// Wall Fourier cutoffs of the family; defaults to the bulk ones.
    pub sigma_cutoffs: Option<Vec<usize>>,
    /// Profile used for the bulk operator when the configured one is sharp.
    pub smoothing: Smoothing,
    pub eigensolver: EigensolverMode,
    /// Eigenpairs computed by the iterative solver.
    pub lanczos_count: usize,
    /// Tolerance of the index ledger residual.
    pub tolerance: f64,
    /// Wall momentum cutoff of the sharp-wall transverse solver.
    pub theta_cutoff: usize,
    /// Smoothing parameters of the homotopy sweep.
    pub deltas: Vec<f64>,
    /// Length of the pasted cylinder for the cylinder identity.
    pub cylinder_length: f64,
    /// Family parameter (fraction of its length) of the eta derivative check.
    pub dertau_point: f64,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            heat_times: vec![0.1, 1.0, 10.0],
            family_samples: 64,
            sigma_cutoffs: None,
            smoothing: Smoothing {
                delta: 1.0,
                delta0: 0.5,
            },
            eigensolver: EigensolverMode::Dense,
            lanczos_count: 16,
            tolerance: 1e-6,
            theta_cutoff: 24,
            deltas: (1..=10).map(|i| i as f64 / 10.0).collect(),
            cylinder_length: 1.0,
            dertau_point: 0.37,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Ledger,
    Cylinder,
    Homotopy,
    Dertau,
    Flow,
    Ta,
    Structural,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Ledger,
        CheckKind::Cylinder,
        CheckKind::Homotopy,
        CheckKind::Dertau,
        CheckKind::Flow,
        CheckKind::Ta,
        CheckKind::Structural,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Ledger => "ledger",
            CheckKind::Cylinder => "cylinder",
            CheckKind::Homotopy => "homotopy",
            CheckKind::Dertau => "dertau",
            CheckKind::Flow => "flow",
            CheckKind::Ta => "ta",
            CheckKind::Structural => "structural",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown check `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksBlock {
    pub enabled: Vec<CheckKind>,
}

impl Default for ChecksBlock {
    fn default() -> Self {
        ChecksBlock {
            enabled: vec![CheckKind::Ledger],
        }
    }
}

fn fields(terms: &[FourierTerm], d: usize, rank: usize, what: &str) -> Result<Vec<FourierField>> {
    let mut out = vec![FourierField::zero(d, rank); d];
    for t in terms {
        if t.component >= d {
            return Err(Error::Config(format!("{what}: component {} out of range 0..{d}", t.component)));
        }
        if t.mode.len() != d {
            return Err(Error::Config(format!("{what}: mode {:?} must have {d} entries", t.mode)));
        }
        if t.value.len() != rank * rank {
            return Err(Error::Config(format!(
                "{what}: {} matrix entries given, U({rank}) needs {}",
                t.value.len(),
                rank * rank
            )));
        }
        let m = CMat::from_fn(rank, rank, |r, c| {
            let [re, im] = t.value[r * rank + c];
            C64::new(re, im)
        });
        out[t.component].insert(t.mode.clone(), m);
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.lengths.len() != g.n || g.cutoffs.len() != g.n {
            return Err(Error::Config(format!("geometry needs {} lengths and cutoffs", g.n)));
        }
        let r = &self.run;
        if !(r.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if r.heat_times.is_empty() || r.heat_times.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Config("heat times must be positive".into()));
        }
        if r.deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
            return Err(Error::Config("sweep deltas must lie in (0, 1]".into()));
        }
        if !(r.dertau_point > 0.0 && r.dertau_point < 1.0) {
            return Err(Error::Config("dertau_point must lie in (0, 1)".into()));
        }
        if let Some(c) = &r.sigma_cutoffs {
            if c.len() + 1 != g.n {
                return Err(Error::Config(format!("sigma_cutoffs needs {} entries", g.n - 1)));
            }
        }
        if let Some(d) = self.gauge.deformation {
            Deformation::new(d.delta, d.eps1, d.eps)?;
        }
        if self.gauge.normal.iter().any(|t| t.value.iter().any(|v| v[0] != 0.0 || v[1] != 0.0)) {
            return Err(Error::Config("a nonzero normal component A_n is not supported (axial gauge)".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<TorusGeometry> {
        build_torus(self.geometry.n, &self.geometry.lengths)
    }

    /// Gauge configuration with the configured profile.
    pub fn gauge_config(&self) -> Result<GaugeConfig> {
        let geom = self.geometry()?;
        let d = geom.dim() - 1;
        let rank = self.gauge.group;
        if rank == 0 {
            return Err(Error::Config("group U(0)".into()));
        }
        let a_minus = fields(&self.gauge.a_minus, d, rank, "a_minus")?;
        let jump = fields(&self.gauge.jump, d, rank, "jump")?;
        let profile = self.gauge.profile.build(self.gauge.deformation)?;
        assemble_gauge(&geom, UnitaryGroup(rank), a_minus, jump, profile, self.gauge.flux)
    }

    pub fn sigma_cutoffs(&self) -> Vec<usize> {
        self.run
            .sigma_cutoffs
            .clone()
            .unwrap_or_else(|| self.geometry.cutoffs[..self.geometry.n - 1].to_vec())
    }

    pub fn wants(&self, k: CheckKind) -> bool {
        self.checks.enabled.contains(&k)
    }

    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serialization");
        Sha256::digest(canon.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
