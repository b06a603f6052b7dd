//! Scenario parameters as the user writes them (dBm, meters) and their
//! conversion to the SI-only library config.

use std::fs;
use std::path::Path;

use clap::Args;
use fdrelay::SystemConfig;

use crate::CliError;

/// Per-parameter overrides; every key may also appear in a config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Flat `key = value` file; flags take precedence over its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, alias = "p_s_dbm")]
    pub p_s_dbm: Option<f64>,
    #[arg(long, alias = "sigma2_r_dbm")]
    pub sigma2_r_dbm: Option<f64>,
    #[arg(long, alias = "sigma2_d_dbm")]
    pub sigma2_d_dbm: Option<f64>,
    /// Residual loop-interference strength.
    #[arg(long, alias = "li_dbm", allow_hyphen_values = true)]
    pub li_dbm: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, alias = "m_r")]
    pub m_r: Option<usize>,
    #[arg(long, alias = "m_t")]
    pub m_t: Option<usize>,
    #[arg(long, alias = "r_c")]
    pub r_c: Option<f64>,
}

/// User-facing scenario in log units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub p_s_dbm: f64,
    pub sigma2_r_dbm: f64,
    pub sigma2_d_dbm: f64,
    pub li_dbm: f64,
    pub d1: f64,
    pub d2: f64,
    pub tau: f64,
    pub eta: f64,
    pub m_r: usize,
    pub m_t: usize,
    pub r_c: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            p_s_dbm: 10.0,
            sigma2_r_dbm: -70.0,
            sigma2_d_dbm: -70.0,
            li_dbm: -50.0,
            d1: 20.0,
            d2: 10.0,
            tau: 3.0,
            eta: 0.5,
            m_r: 3,
            m_t: 3,
            r_c: 2.0,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

impl Scenario {
    pub fn load(ov: &Overrides) -> Result<Self, CliError> {
        let mut s = Scenario::default();
        if let Some(path) = &ov.config {
            s.apply_file(path)?;
        }
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = ov.$f { s.$f = v; })*};
        }
        take!(p_s_dbm, sigma2_r_dbm, sigma2_d_dbm, li_dbm, d1, d2, tau, eta, m_r, m_t, r_c);
        Ok(s)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| CliError::Usage(format!("{}:{}: {why}: `{raw}`", path.display(), n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim();
            let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
            let count = || value.parse::<usize>().map_err(|_| bad("not a positive integer"));
            match key.trim() {
                "p_s_dbm" => self.p_s_dbm = num()?,
                "sigma2_r_dbm" => self.sigma2_r_dbm = num()?,
                "sigma2_d_dbm" => self.sigma2_d_dbm = num()?,
                "li_dbm" => self.li_dbm = num()?,
                "d1" => self.d1 = num()?,
                "d2" => self.d2 = num()?,
                "tau" => self.tau = num()?,
                "eta" => self.eta = num()?,
                "m_r" => self.m_r = count()?,
                "m_t" => self.m_t = count()?,
                "r_c" => self.r_c = num()?,
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(())
    }

    /// LI strength is the received residual power relative to the relay
    /// noise floor, so `σ_RR² = 10^{(LI − σ_R²)/10}` in the unit-noise model.
    pub fn system(&self) -> Result<SystemConfig, CliError> {
        let cfg = SystemConfig {
            p_s: dbm_to_watts(self.p_s_dbm),
            sigma2_r: dbm_to_watts(self.sigma2_r_dbm),
            sigma2_d: dbm_to_watts(self.sigma2_d_dbm),
            sigma2_rr: 10f64.powf((self.li_dbm - self.sigma2_r_dbm) / 10.0),
            d1: self.d1,
            d2: self.d2,
            tau: self.tau,
            eta: self.eta,
            m_r: self.m_r,
            m_t: self.m_t,
            r_c: self.r_c,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_map_to_library_defaults() {
        assert_eq!(Scenario::default().system().unwrap(), SystemConfig::default());
    }

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("fdrelay-cfg-{}", std::process::id()));
        fs::write(&dir, "# scenario\nm_r = 2   # receive\nli_dbm=-60\n\n d1 = 15\n").unwrap();
        let ov = Overrides { config: Some(dir.clone()), d1: Some(12.0), ..Default::default() };
        let s = Scenario::load(&ov).unwrap();
        fs::remove_file(dir).unwrap();
        assert_eq!((s.m_r, s.li_dbm, s.d1), (2, -60.0, 12.0));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let dir = std::env::temp_dir().join(format!("fdrelay-bad-{}", std::process::id()));
        fs::write(&dir, "p_s = 10\n").unwrap();
        let err = Scenario::load(&Overrides { config: Some(dir.clone()), ..Default::default() });
        fs::remove_file(dir).unwrap();
        assert!(matches!(err, Err(CliError::Usage(_))));
    }
}
