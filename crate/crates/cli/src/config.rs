//! Run configuration file. Values resolve as flags > file > defaults.
//!
//! ```toml
//! [experiment]        # any ExperimentConfig field
//! num_antennas = 100
//! snr_db = 20.0
//!
//! [run]
//! nodes = [15, 18, 21, 24]
//! instances = 20
//! methods = ["exact", "approximation", "clumped", "power"]
//! timeout = 600.0
//! workers = 4
//! ```

use std::fs;
use std::path::Path;

use dirgroup::{ExperimentConfig, Method};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: ExperimentConfig,
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub nodes: Option<Vec<usize>>,
    pub instances: Option<usize>,
    pub methods: Option<Vec<Method>>,
    /// Seconds per exact solve; 0 disables the limit.
    pub timeout: Option<f64>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_sections() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [experiment]
            num_groups = 4
            seed = 9
            [run]
            nodes = [6, 9]
            methods = ["exact", "power"]
            timeout = 1.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.experiment.num_groups, 4);
        assert_eq!(cfg.experiment.seed, 9);
        assert_eq!(cfg.experiment.num_antennas, 100);
        assert_eq!(cfg.run.nodes, Some(vec![6, 9]));
        assert_eq!(cfg.run.methods, Some(vec![Method::Exact, Method::Power]));
        assert_eq!(cfg.run.instances, None);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("[run]\nnodez = [1]").is_err());
        assert!(toml::from_str::<FileConfig>("[experiment]\nantennas = 4").is_err());
    }
}
