use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use ghquad::{from_alpha_parameterization, preset, GHParams, GHParamsAlpha};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(ghquad::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(ghquad::Error::Convergence { .. }) => 4,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numeric(e) => e.code(),
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ghquad::Error> for CliError {
    fn from(e: ghquad::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// GH parameters, either a preset or explicit values in the alpha or gamma form.
#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Built-in parameter set: set1, set2, set3 or set4
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Tail parameter alpha = sqrt(beta^2 + gamma^2)
    #[arg(long, conflicts_with = "gamma")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
}

impl ParamArgs {
    fn has_explicit(&self) -> bool {
        self.mu.is_some()
            || self.alpha.is_some()
            || self.gamma.is_some()
            || self.beta.is_some()
            || self.delta.is_some()
            || self.p.is_some()
    }

    pub fn resolve(&self) -> CliResult<GHParams> {
        if let Some(name) = &self.set {
            if self.has_explicit() {
                return usage("--set cannot be combined with explicit parameters");
            }
            let Some(p) = preset(name) else {
                return usage(format!(
                    "unknown parameter set '{name}' (expected set1..set4)"
                ));
            };
            return Ok(p.gh_params()?);
        }
        let Some(delta) = self.delta else {
            return usage("either --set or --delta with --alpha or --gamma is required");
        };
        let (mu, beta, p) = (
            self.mu.unwrap_or(0.0),
            self.beta.unwrap_or(0.0),
            self.p.unwrap_or(-0.5),
        );
        match (self.alpha, self.gamma) {
            (Some(alpha), None) => Ok(from_alpha_parameterization(&GHParamsAlpha {
                mu,
                alpha,
                beta,
                delta,
                p,
            })?),
            (None, Some(gamma)) => Ok(GHParams::new(mu, beta, gamma, delta, p)?),
            _ => usage("exactly one of --alpha or --gamma is required"),
        }
    }
}

/// Evaluation points given on the command line and/or in a batch file.
pub fn gather_points(values: &[f64], input: Option<&Path>, flag: &str) -> CliResult<Vec<f64>> {
    let mut points = values.to_vec();
    if let Some(path) = input {
        points.extend(read_points(path)?);
    }
    if points.is_empty() {
        return usage(format!("no evaluation points: pass {flag} or --input FILE"));
    }
    Ok(points)
}

/// Reads one real per line; blank lines and lines starting with `#` are skipped.
pub fn read_points(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(x) => out.push(x),
            Err(_) => {
                return usage(format!(
                    "{}:{}: not a number: '{line}'",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    Ok(out)
}

#[derive(Args, Debug, Clone)]
pub struct BatchInput {
    /// File with one evaluation point per line
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit() -> ParamArgs {
        ParamArgs {
            set: None,
            mu: None,
            alpha: None,
            gamma: None,
            beta: None,
            delta: None,
            p: None,
        }
    }

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Numeric(ghquad::Error::Domain("x".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::Numeric(ghquad::Error::Divergence("x".into())).exit_code(),
            3
        );
        let conv = ghquad::Error::Convergence {
            message: "x".into(),
            partial: 0.0,
        };
        assert_eq!(CliError::Numeric(conv).exit_code(), 4);
    }

    #[test]
    fn alpha_and_gamma_forms_agree() {
        let a = ParamArgs {
            alpha: Some(5.0),
            beta: Some(3.0),
            delta: Some(0.5),
            ..explicit()
        }
        .resolve()
        .unwrap();
        let g = ParamArgs {
            gamma: Some(4.0),
            beta: Some(3.0),
            delta: Some(0.5),
            ..explicit()
        }
        .resolve()
        .unwrap();
        assert!((a.gamma - g.gamma).abs() < 1e-15);
        assert_eq!(a.p, -0.5);
        assert!(matches!(
            ParamArgs {
                delta: Some(1.0),
                ..explicit()
            }
            .resolve(),
            Err(CliError::Usage(_))
        ));
        let bad = ParamArgs {
            alpha: Some(1.0),
            beta: Some(2.0),
            delta: Some(1.0),
            ..explicit()
        }
        .resolve();
        assert!(matches!(bad, Err(CliError::Numeric(_))));
    }
}
