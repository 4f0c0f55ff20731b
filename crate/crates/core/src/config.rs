//! Run configuration: `key = value` text files (with `#` comments)
//! overridden by command-line flags carrying the same key names.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::mesh::BoundaryKind;
use crate::reference::{case_by_name, BenchmarkCase, CaseData, ReferenceKind};
use crate::residual::{Blending, SchemeOptions, Stabilization};
use crate::riemann::FluxChoice;
use crate::state::{GasModel, PrimitiveState};
use crate::stepper::{StepOptions, TimeScheme};

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Built-in case name, or "custom" with the inline fields below.
    pub case: String,
    pub custom_left: Option<PrimitiveState>,
    pub custom_right: Option<PrimitiveState>,
    pub custom_x0: Option<f64>,
    pub custom_domain: Option<(f64, f64)>,
    pub custom_gamma: Option<f64>,
    pub custom_boundary: Option<BoundaryKind>,

    pub n_cells: usize,
    /// Thermodynamic degree r; the velocity uses r + 1.
    pub thermo_degree: usize,
    /// Equal-degree pairing (velocity degree r instead of r + 1); only for
    /// the stability experiment.
    pub equal_degree: bool,
    pub flux: FluxChoice,
    pub stabilization: Stabilization,
    pub blending: Blending,
    pub correction: bool,
    pub time_scheme: TimeScheme,
    /// Overrides the case default when set.
    pub cfl: Option<f64>,
    /// Jump-penalty parameter θ_K.
    pub theta: f64,
    /// Overrides the case default when set.
    pub t_final: Option<f64>,
    /// Directory for profile/series/summary CSV files; nothing is written
    /// when unset.
    pub out_dir: Option<PathBuf>,
    /// Verify the element conservation identities after every step.
    pub audit: bool,

    /// Step-rejection budget (not a file key; set by drivers).
    pub max_halvings: usize,
    /// Norm-growth factor treated as blow-up (not a file key).
    pub growth_limit: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: "sod".into(),
            custom_left: None,
            custom_right: None,
            custom_x0: None,
            custom_domain: None,
            custom_gamma: None,
            custom_boundary: None,
            n_cells: 100,
            thermo_degree: 0,
            equal_degree: false,
            flux: FluxChoice::Hllc,
            stabilization: Stabilization::Jump,
            blending: Blending::None,
            correction: true,
            time_scheme: TimeScheme::Euler,
            cfl: None,
            theta: 0.1,
            t_final: None,
            out_dir: None,
            audit: false,
            max_halvings: 5,
            growth_limit: 1e3,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!(
            "key `{key}` expects on|off, got `{other}`"
        ))),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}` expects a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}` expects an integer, got `{value}`")))
}

fn parse_triple(key: &str, value: &str) -> Result<PrimitiveState> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "key `{key}` expects `rho,u,p`, got `{value}`"
        )));
    }
    Ok(PrimitiveState::new(
        parse_f64(key, parts[0])?,
        parse_f64(key, parts[1])?,
        parse_f64(key, parts[2])?,
    ))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!(
            "key `{key}` expects `a,b`, got `{value}`"
        )));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are
/// ignored.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Parse `--key value` or `--key=value` flag sequences into pairs; flag
/// names use `-` or `_` interchangeably.
pub fn parse_flags(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let stripped = arg.strip_prefix("--").ok_or_else(|| {
            Error::Config(format!("expected a --flag, got `{arg}`"))
        })?;
        let (key, value) = if let Some((k, v)) = stripped.split_once('=') {
            (k.to_string(), v.to_string())
        } else {
            let v = args.get(i + 1).ok_or_else(|| {
                Error::Config(format!("flag `--{stripped}` is missing its value"))
            })?;
            i += 1;
            (stripped.to_string(), v.clone())
        };
        pairs.push((key.replace('-', "_"), value));
        i += 1;
    }
    Ok(pairs)
}

impl RunConfig {
    /// Build from file pairs, then flag pairs (flags win). Unknown keys are
    /// rejected.
    pub fn from_pairs(
        file_pairs: &[(String, String)],
        flag_pairs: &[(String, String)],
    ) -> Result<Self> {
        let mut config = RunConfig::default();
        for (key, value) in file_pairs.iter().chain(flag_pairs) {
            config.apply(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Apply one key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "case" => self.case = value.to_string(),
            "left" => self.custom_left = Some(parse_triple(key, value)?),
            "right" => self.custom_right = Some(parse_triple(key, value)?),
            "x0" => self.custom_x0 = Some(parse_f64(key, value)?),
            "domain" => self.custom_domain = Some(parse_pair(key, value)?),
            "gamma" => self.custom_gamma = Some(parse_f64(key, value)?),
            "boundary" => self.custom_boundary = Some(BoundaryKind::parse(value)?),
            "n_cells" => self.n_cells = parse_usize(key, value)?,
            "r" => self.thermo_degree = parse_usize(key, value)?,
            "equal_degree" => self.equal_degree = parse_bool(key, value)?,
            "flux" => self.flux = FluxChoice::parse(value)?,
            "stabilization" => self.stabilization = Stabilization::parse(value)?,
            "blending" => self.blending = Blending::parse(value)?,
            "correction" => self.correction = parse_bool(key, value)?,
            "scheme" => self.time_scheme = TimeScheme::parse(value)?,
            "cfl" => self.cfl = Some(parse_f64(key, value)?),
            "theta" => self.theta = parse_f64(key, value)?,
            "t_final" => self.t_final = Some(parse_f64(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "audit" => self.audit = parse_bool(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown configuration key `{other}`")))
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.n_cells == 0 {
            return Err(Error::Config("n_cells must be at least 1".into()));
        }
        if self.thermo_degree > 1 {
            return Err(Error::Config(format!(
                "r must be 0 or 1, got {}",
                self.thermo_degree
            )));
        }
        if self.equal_degree && self.thermo_degree != 1 {
            return Err(Error::Config(
                "equal_degree requires r = 1 (the K1T1 pairing)".into(),
            ));
        }
        if let Some(cfl) = self.cfl {
            if !(cfl > 0.0) {
                return Err(Error::Config(format!("cfl must be positive, got {cfl}")));
            }
        }
        if self.theta < 0.0 {
            return Err(Error::Config(format!(
                "theta must be non-negative, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// The benchmark case this run solves.
    pub fn resolve_case(&self) -> Result<BenchmarkCase> {
        if self.case != "custom" {
            return case_by_name(&self.case);
        }
        let left = self
            .custom_left
            .ok_or_else(|| Error::Config("custom case needs `left = rho,u,p`".into()))?;
        let right = self
            .custom_right
            .ok_or_else(|| Error::Config("custom case needs `right = rho,u,p`".into()))?;
        let t_final = self
            .t_final
            .ok_or_else(|| Error::Config("custom case needs `t_final`".into()))?;
        Ok(BenchmarkCase {
            name: "custom".into(),
            data: CaseData::TwoState {
                left,
                right,
                x0: self.custom_x0.unwrap_or(0.5),
            },
            domain: self.custom_domain.unwrap_or((0.0, 1.0)),
            t_final,
            cfl: self.cfl.unwrap_or(0.4),
            gamma: self.custom_gamma.unwrap_or(1.4),
            boundary: self.custom_boundary.unwrap_or(BoundaryKind::Transmissive),
            reference: ReferenceKind::Riemann,
        })
    }

    pub fn kinematic_degree(&self) -> usize {
        if self.equal_degree {
            self.thermo_degree
        } else {
            self.thermo_degree + 1
        }
    }

    pub fn pairing_name(&self) -> String {
        format!("K{}T{}", self.kinematic_degree(), self.thermo_degree)
    }

    pub fn scheme_options(&self) -> SchemeOptions {
        SchemeOptions {
            flux: self.flux,
            stabilization: self.stabilization,
            blending: self.blending,
            jump_parameter: self.theta,
        }
    }

    pub fn step_options(&self, gas: GasModel) -> StepOptions {
        StepOptions {
            gas,
            scheme: self.scheme_options(),
            time_scheme: self.time_scheme,
            correction: self.correction,
            max_halvings: self.max_halvings,
        }
    }
}
