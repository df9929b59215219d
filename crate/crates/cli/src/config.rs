//! Run configuration: one JSON (or TOML) file per run.

use std::path::{Path, PathBuf};

use itlab_core::pencil::IntervalBasis;
use itlab_core::profile::ProfileKind;
use itlab_core::regions::{ParabolicRegion, DEFAULT_C, DEFAULT_DELTA};
use itlab_core::symbols::Rect;
use itlab_core::RefractiveProfile;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ITLAB_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "itlab-out";

/// Angular modes `start..end` (empty when `start >= end`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRange {
    pub start: u32,
    pub end: u32,
}

impl ModeRange {
    pub fn modes(&self) -> Vec<u32> {
        (self.start..self.end).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval {
        a: f64,
        b: f64,
        #[serde(default)]
        basis: IntervalBasis,
    },
    Disk {
        radius: f64,
        modes: ModeRange,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub n: usize,
    /// Refined size; `2n` when omitted.
    #[serde(default)]
    pub fine_n: Option<usize>,
}

impl MeshSpec {
    pub fn fine(&self) -> usize {
        self.fine_n.unwrap_or(2 * self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigSpec {
    /// Backward-error threshold for a stable eigenpair.
    pub tol: f64,
    /// Coarse/fine agreement required for a stable eigenvalue, relative to `1 + |λ|`.
    pub match_tol: f64,
    pub cluster_tol: f64,
}

impl Default for EigSpec {
    fn default() -> Self {
        EigSpec { tol: 1e-10, match_tol: 1e-6, cluster_tol: itlab_core::eig::DEFAULT_CLUSTER_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    /// `k`-plane search box; the domain default when omitted.
    pub search_box: Option<Rect>,
    pub maxdepth: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { search_box: None, maxdepth: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSpec {
    pub c: f64,
    pub delta: f64,
    /// Half-width of the certificate grid in `Re λ`.
    pub grid_span: f64,
    pub margin: f64,
    pub identity_samples: usize,
}

impl Default for RegionSpec {
    fn default() -> Self {
        RegionSpec { c: DEFAULT_C, delta: DEFAULT_DELTA, grid_span: 50.0, margin: 1.0, identity_samples: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolSpec {
    pub samples: usize,
}

impl Default for SymbolSpec {
    fn default() -> Self {
        SymbolSpec { samples: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParametrixSpec {
    pub delta: f64,
}

impl Default for ParametrixSpec {
    fn default() -> Self {
        ParametrixSpec { delta: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotSource {
    #[default]
    Solve,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotSpec {
    pub source: PlotSource,
    /// Plot `log10(1 + |λ|)·e^{i arg λ}` instead of `λ`.
    pub log_modulus: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec { source: PlotSource::Solve, log_modulus: false, width: 720, height: 540 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub profile: Option<ProfileKind>,
    #[serde(default)]
    pub mesh: Option<MeshSpec>,
    #[serde(default)]
    pub eig: EigSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub symbols: SymbolSpec,
    #[serde(default)]
    pub parametrix: ParametrixSpec,
    #[serde(default)]
    pub plot: PlotSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Record the wall-clock time in the provenance block.
    #[serde(default)]
    pub timestamp: bool,
}

fn default_seed() -> u64 {
    20100
}

/// A parsed configuration with the bytes it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sha256: String,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`; `.toml` files are parsed as TOML, everything else as JSON.
    pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
        let bytes = std::fs::read(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| input("config is not UTF-8"))?;
        let config = if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&text)?
        } else {
            Self::from_json(&text)?
        };
        Ok(LoadedConfig { config, sha256: crate::results::sha256_hex(&bytes) })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(input(format!("{name} must be positive, got {v}")))
            }
        };
        positive("eig.tol", self.eig.tol)?;
        positive("eig.match_tol", self.eig.match_tol)?;
        positive("eig.cluster_tol", self.eig.cluster_tol)?;
        if self.eig.tol > 1e-4 {
            return Err(input(format!("eig.tol must not exceed 1e-4, got {}", self.eig.tol)));
        }
        positive("region.grid_span", self.region.grid_span)?;
        if !(self.region.margin >= 0.0) {
            return Err(input("region.margin must be nonnegative"));
        }
        ParabolicRegion::new(self.region.c, self.region.delta).map_err(|e| input(format!("region: {e}")))?;
        if !(self.parametrix.delta > 0.0 && self.parametrix.delta < 0.5) {
            return Err(input("parametrix.delta must lie in (0, 1/2)"));
        }
        if self.symbols.samples == 0 {
            return Err(input("symbols.samples must be positive"));
        }
        if self.oracle.maxdepth == 0 {
            return Err(input("oracle.maxdepth must be positive"));
        }
        if self.plot.width < 64 || self.plot.height < 64 {
            return Err(input("plot size must be at least 64×64"));
        }
        if let Some(mesh) = &self.mesh {
            if mesh.n < 4 || mesh.fine() < 4 {
                return Err(input(format!("mesh sizes must be at least 4, got {} and {}", mesh.n, mesh.fine())));
            }
            if mesh.fine() <= mesh.n {
                return Err(input("mesh.fine_n must exceed mesh.n"));
            }
        }
        match &self.domain {
            Some(DomainSpec::Interval { a, b, .. }) if !(b > a) => {
                return Err(input(format!("interval [{a}, {b}] is empty")));
            }
            Some(DomainSpec::Disk { radius, .. }) if !(*radius > 0.0) => {
                return Err(input(format!("disk radius must be positive, got {radius}")));
            }
            _ => {}
        }
        if self.domain.is_some() && self.profile.is_some() {
            self.refractive_profile()?;
        }
        Ok(())
    }

    pub fn region(&self) -> ParabolicRegion {
        ParabolicRegion { c: self.region.c, delta: self.region.delta }
    }

    pub fn domain(&self) -> Result<&DomainSpec, CliError> {
        self.domain.as_ref().ok_or_else(|| input("config needs a `domain`"))
    }

    pub fn mesh(&self) -> Result<MeshSpec, CliError> {
        self.mesh.ok_or_else(|| input("config needs a `mesh`"))
    }

    /// The profile on the interval, or on the radial segment `[0, R]`.
    pub fn refractive_profile(&self) -> Result<RefractiveProfile, CliError> {
        let kind = self.profile.clone().ok_or_else(|| input("config needs a `profile`"))?;
        let (lo, hi) = match self.domain()? {
            DomainSpec::Interval { a, b, .. } => (*a, *b),
            DomainSpec::Disk { radius, .. } => (0.0, *radius),
        };
        RefractiveProfile::new(kind, lo, hi).map_err(|e| input(format!("profile: {e}")))
    }

    /// Output directory: the config value, then `$ITLAB_OUT_DIR`, then `itlab-out`.
    pub fn out_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        if let Some(d) = override_dir {
            return d.to_path_buf();
        }
        if let Some(d) = &self.output.dir {
            return d.clone();
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(FALLBACK_OUT_DIR),
        }
    }
}
