//! Run configuration read from a TOML file. Every field is optional;
//! command-line flags override the file.
//!
//! ```toml
//! [params]
//! n = 4
//! m = 2
//! lambda = -5.0
//! k = -1.0
//!
//! [tolerances]
//! verify_tol = 1e-9
//! ode_tol = 1e-10
//!
//! [initial]
//! t0 = 1.0
//! u0 = 1.5430806348152437
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::catalog::Constants;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub shoot: ShootConfig,
    #[serde(default)]
    pub catalog: CatalogConfig,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub lambda: Option<f64>,
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub verify_tol: Option<f64>,
    pub ode_tol: Option<f64>,
    pub event_tol: Option<f64>,
    pub classify_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub t0: Option<f64>,
    pub u0: Option<f64>,
    pub du0: Option<f64>,
    pub f0: Option<f64>,
    pub df0: Option<f64>,
    pub ddf0: Option<f64>,
    pub t_span: Option<[f64; 2]>,
    pub cross_boundary: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootConfig {
    pub target: Option<String>,
    pub free: Option<String>,
    pub bracket: Option<[f64; 2]>,
    pub direction: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogConfig {
    pub family: Option<String>,
    #[serde(default)]
    pub constants: Constants,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c = RunConfig::parse(
            "input = \"a.csv\"\n[params]\nn = 4\nlambda = -5.0\n[catalog]\nfamily = \"flat-ray\"\nconstants = { c = 2.0 }\n",
        )
        .unwrap();
        assert_eq!(c.params.n, Some(4));
        assert_eq!(c.params.m, None);
        assert_eq!(c.catalog.constants.c, Some(2.0));
        assert_eq!(c.input.as_deref(), Some(Path::new("a.csv")));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(RunConfig::parse("[params]\nq = 1\n"), Err(Error::Parse(_))));
    }
}
