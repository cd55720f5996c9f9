use std::fmt;
use std::path::Path;

use anyhow::{bail, Context};
use clap::Args;
use rician_shadowed::channel::ScaledIdentityParams;
use serde::Deserialize;

/// Model parameters as flags; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// TOML file with any of: n, p, m, sigma2_sigma, sigma2_m, inv_sigma2_m
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Receive dimension (rows of the Gram matrix)
    #[arg(long)]
    pub n: Option<usize>,
    /// Transmit dimension
    #[arg(long)]
    pub p: Option<usize>,
    /// Shadowing severity, m > n − 1
    #[arg(long)]
    pub m: Option<f64>,
    /// Scattering power σ_Σ²
    #[arg(long = "sigma2-sigma")]
    pub sigma2_sigma: Option<f64>,
    /// Shadowing rate σ_M²
    #[arg(long = "sigma2-m", conflicts_with = "inv_sigma2_m")]
    pub sigma2_m: Option<f64>,
    /// Inverse shadowing rate σ_M⁻², the mean LOS power per unit m
    #[arg(long = "inv-sigma2-m")]
    pub inv_sigma2_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileParams {
    n: Option<usize>,
    p: Option<usize>,
    m: Option<f64>,
    sigma2_sigma: Option<f64>,
    sigma2_m: Option<f64>,
    inv_sigma2_m: Option<f64>,
}

/// σ_M as the user gave it, kept so the printed record round-trips exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Direct(f64),
    Inverse(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub n: usize,
    pub p: usize,
    pub m: f64,
    pub sigma2_sigma: f64,
    pub rate: Rate,
}

impl Resolved {
    pub fn params(&self) -> rician_shadowed::Result<ScaledIdentityParams> {
        match self.rate {
            Rate::Direct(v) => ScaledIdentityParams::new(self.n, self.p, self.m, self.sigma2_sigma, v),
            Rate::Inverse(v) => ScaledIdentityParams::with_inverse_rate(self.n, self.p, self.m, self.sigma2_sigma, v),
        }
    }
}

impl fmt::Display for Resolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "--n {} --p {} --m {} --sigma2-sigma {}", self.n, self.p, self.m, self.sigma2_sigma)?;
        match self.rate {
            Rate::Direct(v) => write!(f, " --sigma2-m {v}"),
            Rate::Inverse(v) => write!(f, " --inv-sigma2-m {v}"),
        }
    }
}

fn read_file(path: &Path) -> anyhow::Result<FileParams> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let parsed: FileParams = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    if parsed.sigma2_m.is_some() && parsed.inv_sigma2_m.is_some() {
        bail!("config {} sets both sigma2_m and inv_sigma2_m", path.display());
    }
    Ok(parsed)
}

impl ParamArgs {
    pub fn resolve(&self) -> anyhow::Result<Resolved> {
        let file = match &self.config {
            Some(path) => read_file(path)?,
            None => FileParams::default(),
        };
        let n = self.n.or(file.n).context("missing parameter n")?;
        let p = self.p.or(file.p).context("missing parameter p")?;
        let m = self.m.or(file.m).context("missing parameter m")?;
        let sigma2_sigma = self.sigma2_sigma.or(file.sigma2_sigma).context("missing parameter sigma2_sigma")?;
        let rate = match (self.sigma2_m, self.inv_sigma2_m, file.sigma2_m, file.inv_sigma2_m) {
            (Some(v), _, _, _) => Rate::Direct(v),
            (None, Some(v), _, _) => Rate::Inverse(v),
            (None, None, Some(v), _) => Rate::Direct(v),
            (None, None, None, Some(v)) => Rate::Inverse(v),
            (None, None, None, None) => bail!("missing parameter sigma2_m or inv_sigma2_m"),
        };
        Ok(Resolved { n, p, m, sigma2_sigma, rate })
    }
}
