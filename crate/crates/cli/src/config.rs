//! Run configuration: a JSON file, validated into solver inputs.

use std::fmt;
use std::path::{Path, PathBuf};

use bdies_core::verification::ManufacturedCase;
use bdies_core::{
    BdiesError, Coefficient, CoefficientPreset, DomainSpec, ParametrixFamily, Resolution, SolveOptions, Vec2,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Solve one manufactured case and check it against the exact solution.
    Solve,
    /// Run the potential-theory identity checks.
    Validate,
    /// Convergence study over a list of resolutions.
    Study,
    /// Convergence study for both parametrix families side by side.
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Validate => "validate",
            Self::Study => "study",
            Self::Compare => "compare",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Disk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    /// `r(θ) = c₀ + Σ_k c_k cos(kθ)`
    Star {
        #[serde(default)]
        center: [f64; 2],
        cosine: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientConfig {
    Constant {
        value: f64,
    },
    /// `a = exp(d · x)`
    Exponential {
        direction: [f64; 2],
    },
    /// `a = 1 + x₁²`
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FamilyConfig {
    #[default]
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    pub n_boundary: usize,
    pub n_t: usize,
    pub n_s: usize,
}

/// The file as written. Echoed verbatim into results.json.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub domain: DomainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<CoefficientConfig>,
    #[serde(default)]
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<ResolutionConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub allow_large_domain: bool,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub spec: DomainSpec,
    pub case: Option<ManufacturedCase>,
    pub coeff: Coefficient,
    pub family: ParametrixFamily,
    pub resolutions: Vec<Resolution>,
    pub output_dir: PathBuf,
    pub allow_large_domain: bool,
    pub raw: RawConfig,
}

impl RunConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            family: self.family,
            allow_large_domain: self.allow_large_domain,
        }
    }

    /// Results of the `y` family are reported but never asserted.
    pub fn experimental(&self) -> bool {
        self.family == ParametrixFamily::AtY || self.command == Command::Compare
    }
}

pub const DEFAULT_OUTPUT_DIR: &str = "bdies2d-out";

pub fn load_config(path: &Path, command: Command) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text, command)
}

pub fn parse_config(text: &str, command: Command) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(raw, command)
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn validate(raw: RawConfig, command: Command) -> Result<RunConfig, CliError> {
    if let Some(c) = raw.command {
        if c != command {
            return Err(schema(format!(
                "config is for command `{c}` but `{command}` was requested"
            )));
        }
    }

    let spec = match &raw.domain {
        DomainConfig::Disk { center, radius } => DomainSpec::disk(Vec2::from(*center), *radius)?,
        DomainConfig::Star { center, cosine } => DomainSpec::star(Vec2::from(*center), cosine.clone())?,
    };
    let diameter = spec.diameter();
    if diameter >= 1.0 && !raw.allow_large_domain {
        return Err(CliError::Core(BdiesError::DiameterViolation { diameter }));
    }

    let case = raw.case.as_deref().map(ManufacturedCase::by_name).transpose()?;
    let coeff = match (&case, &raw.coefficient) {
        (Some(_), Some(_)) => return Err(schema("give either `case` or `coefficient`, not both")),
        (Some(case), None) => case.coeff.clone(),
        (None, Some(c)) => Coefficient::preset(match *c {
            CoefficientConfig::Constant { value } => CoefficientPreset::Constant(value),
            CoefficientConfig::Exponential { direction } => CoefficientPreset::Exponential(Vec2::from(direction)),
            CoefficientConfig::Quadratic => CoefficientPreset::Quadratic,
        })?,
        (None, None) => return Err(schema(format!("command `{command}` needs `case` or `coefficient`"))),
    };
    if command != Command::Validate && case.is_none() {
        return Err(schema(format!("command `{command}` needs a manufactured `case`")));
    }

    let to_res = |r: &ResolutionConfig| -> Result<Resolution, CliError> {
        let res = Resolution::new(r.n_boundary, r.n_t, r.n_s);
        res.validate()?;
        Ok(res)
    };
    let resolutions = match command {
        Command::Solve | Command::Validate => {
            if raw.resolutions.is_some() {
                return Err(schema(format!("command `{command}` takes a single `resolution`")));
            }
            let r = raw
                .resolution
                .as_ref()
                .ok_or_else(|| schema(format!("command `{command}` needs `resolution`")))?;
            vec![to_res(r)?]
        }
        Command::Study | Command::Compare => {
            if raw.resolution.is_some() {
                return Err(schema(format!("command `{command}` takes a `resolutions` list")));
            }
            let list = raw
                .resolutions
                .as_ref()
                .ok_or_else(|| schema(format!("command `{command}` needs `resolutions`")))?;
            if list.len() < 3 {
                return Err(schema(format!(
                    "command `{command}` needs at least 3 resolutions, got {}",
                    list.len()
                )));
            }
            list.iter().map(to_res).collect::<Result<_, _>>()?
        }
    };

    let family = match raw.family {
        FamilyConfig::X => ParametrixFamily::AtX,
        FamilyConfig::Y => ParametrixFamily::AtY,
    };
    Ok(RunConfig {
        command,
        spec,
        case,
        coeff,
        family,
        resolutions,
        output_dir: raw
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        allow_large_domain: raw.allow_large_domain,
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = r#"{
        "domain": {"shape": "disk", "radius": 0.4},
        "case": "exp_saddle",
        "family": "x",
        "resolution": {"n_boundary": 128, "n_t": 32, "n_s": 12}
    }"#;

    #[test]
    fn minimal_solve_config() {
        let cfg = parse_config(SOLVE, Command::Solve).unwrap();
        assert_eq!(cfg.resolutions, vec![Resolution::new(128, 32, 12)]);
        assert_eq!(cfg.family, ParametrixFamily::AtX);
        assert!(!cfg.experimental());
        assert_eq!(cfg.coeff.name(), cfg.case.unwrap().coeff.name());
    }

    #[test]
    fn large_disk_needs_the_flag() {
        let text = SOLVE.replace("0.4", "0.6");
        let err = parse_config(&text, Command::Solve).unwrap_err().to_string();
        assert!(err.contains("diam < 1"), "{err}");
        let text = text.replace("\"family\": \"x\",", "\"family\": \"x\", \"allow_large_domain\": true,");
        assert!(parse_config(&text, Command::Solve).unwrap().allow_large_domain);
    }

    #[test]
    fn family_y_is_experimental() {
        let cfg = parse_config(&SOLVE.replace("\"x\"", "\"y\""), Command::Solve).unwrap();
        assert_eq!(cfg.family, ParametrixFamily::AtY);
        assert!(cfg.experimental());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SOLVE.replace("\"case\"", "\"tolerance\": 1, \"case\"");
        assert!(matches!(parse_config(&text, Command::Solve), Err(CliError::Config(_))));
        let text = SOLVE.replace("\"radius\": 0.4", "\"radius\": 0.4, \"sides\": 3");
        assert!(matches!(parse_config(&text, Command::Solve), Err(CliError::Config(_))));
    }

    #[test]
    fn command_specific_fields() {
        assert!(parse_config(SOLVE, Command::Study).is_err());
        let validate = r#"{
            "domain": {"shape": "star", "cosine": [0.3, 0.0, 0.05]},
            "coefficient": {"preset": "exponential", "direction": [1, 1]},
            "resolution": {"n_boundary": 64, "n_t": 16, "n_s": 8}
        }"#;
        assert!(parse_config(validate, Command::Validate).is_ok());
        assert!(parse_config(validate, Command::Solve).is_err());
        let both = SOLVE.replace("\"case\"", "\"coefficient\": {\"preset\": \"quadratic\"}, \"case\"");
        assert!(parse_config(&both, Command::Solve).is_err());
        let mismatch = SOLVE.replace("\"case\"", "\"command\": \"validate\", \"case\"");
        assert!(parse_config(&mismatch, Command::Solve).is_err());
    }

    #[test]
    fn resolutions_are_checked() {
        let odd = SOLVE.replace("128", "127");
        assert!(matches!(parse_config(&odd, Command::Solve), Err(CliError::Core(_))));
        let study = SOLVE.replace(
            "\"resolution\": {\"n_boundary\": 128, \"n_t\": 32, \"n_s\": 12}",
            "\"resolutions\": [{\"n_boundary\": 64, \"n_t\": 16, \"n_s\": 8}]",
        );
        assert!(parse_config(&study, Command::Study).is_err());
    }
}
