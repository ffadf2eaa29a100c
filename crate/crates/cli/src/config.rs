use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sqlsem_core::coverage::Criterion;
use sqlsem_core::JoinMode;
use sqlsem_gen::{Budget, GenConfig};
use sqlsem_harness::TargetSpec;

use crate::CliError;

pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetSpec {
    Queries(usize),
    Seconds(u64),
}

impl BudgetSpec {
    pub fn budget(self) -> Budget {
        match self {
            BudgetSpec::Queries(n) => Budget::Queries(n),
            BudgetSpec::Seconds(s) => Budget::Time(std::time::Duration::from_secs(s)),
        }
    }
}

/// Which part of the language to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Everything the reference engine supports.
    Full,
    /// Features conventional engines evaluate identically.
    Core,
}

/// Everything needed to re-run a campaign; written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub fixtures: PathBuf,
    pub targets: Vec<String>,
    pub criterion: String,
    pub budget: BudgetSpec,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub join_mode: String,
    pub round_floats: bool,
    pub profile: Profile,
    pub guided: bool,
    pub initial: usize,
}

impl CampaignConfig {
    pub fn criterion(&self) -> Result<Criterion, CliError> {
        self.criterion.parse().map_err(CliError::Usage)
    }

    pub fn join_mode(&self) -> Result<JoinMode, CliError> {
        self.join_mode.parse().map_err(CliError::Usage)
    }

    /// Targets to compare against; the reference engine itself when none
    /// are configured.
    pub fn target_specs(&self) -> Result<Vec<TargetSpec>, CliError> {
        if self.targets.is_empty() {
            let mut r = TargetSpec::reference();
            r.conn = self.join_mode.clone();
            return Ok(vec![r]);
        }
        self.targets.iter().map(|t| t.parse().map_err(CliError::Usage)).collect()
    }

    pub fn gen_config(&self) -> Result<GenConfig, CliError> {
        let mut g = match self.profile {
            Profile::Full => GenConfig::full(),
            Profile::Core => GenConfig::conformant_core(),
        };
        g.join_mode = self.join_mode()?;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }
}
