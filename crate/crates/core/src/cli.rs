//! Command-line front end.
//!
//! Every command expands its parameter axes into a cartesian product of
//! cells, evaluates the cells on a rayon pool and assembles the rows in
//! product order, so the artifact does not depend on the number of workers.
//! Output is rendered in memory and written only when every cell succeeded.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fockalg::DeformationFamily;
use crate::landau::{
    default_grid, density_maxima, energy, eps_minus, eps_plus, linspace, spinor_density,
    strain_to_params, AnisotropyParams, StrainDirection,
};
use crate::nlcs::{build_state, occupation_distribution, CoherentState, DEFAULT_TOL};
use crate::observables::{default_state_grid, density, mean_energy, uncertainty};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIRAC_NLCS_OUT";

pub const FIGURE_NAMES: [&str; 12] = [
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "fig8",
    "fig9",
    "fig10",
    "fig11",
    "fig12",
    "mean-energy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Levels,
    EigenDensity,
    Maxima,
    NlcsDensity,
    Uncertainty,
    Energy,
    Occupation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Levels => "levels",
            Command::EigenDensity => "eigen-density",
            Command::Maxima => "maxima",
            Command::NlcsDensity => "nlcs-density",
            Command::Uncertainty => "uncertainty",
            Command::Energy => "energy",
            Command::Occupation => "occupation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Uniaxial strain applied along one or more principal directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainBlock {
    pub directions: Vec<StrainDirection>,
    pub epsilon: f64,
    pub nu: f64,
    pub beta: f64,
}

/// Source of the velocity anisotropy: explicit ζ values or a strain block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anisotropy {
    Zeta(Vec<f64>),
    Strain(StrainBlock),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Fully resolved run configuration. Its JSON form is echoed into every
/// artifact and accepted back by `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub families: Vec<DeformationFamily>,
    pub alpha_abs: Vec<f64>,
    pub alpha_phase: Vec<f64>,
    pub delta: f64,
    pub anisotropy: Anisotropy,
    #[serde(rename = "B0")]
    pub b0: Vec<f64>,
    pub k: f64,
    pub n: Vec<usize>,
    pub grid: Option<GridSpec>,
    pub tol: f64,
    pub format: Format,
}

impl RunConfig {
    /// Defaults for a command: B₀ = 1/2, k = 1, δ = 0, ζ = 1, identity family.
    pub fn new(command: Command) -> Self {
        Self {
            command,
            families: vec![DeformationFamily::Identity],
            alpha_abs: vec![1.0],
            alpha_phase: vec![0.0],
            delta: 0.0,
            anisotropy: Anisotropy::Zeta(vec![1.0]),
            b0: vec![0.5],
            k: 1.0,
            n: vec![0],
            grid: None,
            tol: DEFAULT_TOL,
            format: Format::Csv,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| CliError::config(format!("config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        fn nonempty<T>(field: &str, v: &[T]) -> Result<(), CliError> {
            if v.is_empty() {
                return Err(CliError::config(format!("{field}: needs at least one value")));
            }
            Ok(())
        }
        fn all(field: &str, v: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<(), CliError> {
            nonempty(field, v)?;
            match v.iter().find(|&&x| !ok(x)) {
                Some(bad) => Err(CliError::config(format!("{field}: {bad} is not {what}"))),
                None => Ok(()),
            }
        }
        nonempty("family", &self.families)?;
        for f in &self.families {
            f.validate().map_err(|e| CliError::config(format!("family: {e}")))?;
        }
        all("alpha-abs", &self.alpha_abs, |x| x.is_finite() && x >= 0.0, "finite and >= 0")?;
        all("alpha-phase", &self.alpha_phase, f64::is_finite, "finite")?;
        all("B0", &self.b0, |x| x.is_finite() && x > 0.0, "finite and > 0")?;
        nonempty("n", &self.n)?;
        if !self.delta.is_finite() {
            return Err(CliError::config("delta: must be finite"));
        }
        if !self.k.is_finite() {
            return Err(CliError::config("k: must be finite"));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return Err(CliError::config(format!("tol: {} is outside (0, 1e-4]", self.tol)));
        }
        match &self.anisotropy {
            Anisotropy::Zeta(z) => all("zeta", z, |x| x.is_finite() && x > 0.0, "finite and > 0")?,
            Anisotropy::Strain(s) => {
                nonempty("strain-dir", &s.directions)?;
                for &b0 in &self.b0 {
                    for &d in &s.directions {
                        strain_to_params(d, s.epsilon, s.nu, s.beta, b0, self.k, self.delta)
                            .map_err(|e| CliError::config(format!("strain block: {e}")))?;
                    }
                }
            }
        }
        if let Some(g) = self.grid {
            if !(g.min.is_finite() && g.max.is_finite() && g.min < g.max) {
                return Err(CliError::config("grid: need finite min < max"));
            }
            if g.points < 2 {
                return Err(CliError::config("grid: need at least 2 points"));
            }
        }
        Ok(())
    }

    /// Every (anisotropy, B₀) combination, in axis order.
    pub fn params(&self) -> Result<Vec<AnisotropyParams>, CliError> {
        let mut out = Vec::new();
        match &self.anisotropy {
            Anisotropy::Zeta(zetas) => {
                for &z in zetas {
                    for &b0 in &self.b0 {
                        out.push(AnisotropyParams::from_zeta(z, b0, self.k, self.delta)?);
                    }
                }
            }
            Anisotropy::Strain(s) => {
                for &d in &s.directions {
                    for &b0 in &self.b0 {
                        out.push(strain_to_params(
                            d, s.epsilon, s.nu, s.beta, b0, self.k, self.delta,
                        )?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Io => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InvalidArgument { .. } => ErrorKind::Config,
            _ => ErrorKind::Numeric,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(usize),
    Real(f64),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Int(i) => i.to_string(),
            Value::Real(x) => format!("{x:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Text(s) => serde_json::Value::from(s.as_str()),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Real(x) => serde_json::Value::from(*x),
        }
    }
}

/// Rendered-to-be table with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub config: RunConfig,
    pub derived: Vec<AnisotropyParams>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

fn derived_json(p: &AnisotropyParams) -> serde_json::Value {
    serde_json::json!({
        "zeta": p.zeta(),
        "B0": p.b0(),
        "v_xx": p.v_xx(),
        "v_yy": p.v_yy(),
        "omega_B": p.omega_b(),
        "omega_zeta": p.omega_zeta(),
        "x0": p.x0(),
    })
}

impl Artifact {
    pub fn render(&self) -> String {
        match self.config.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# config: {}\n", self.config.to_json());
        for p in &self.derived {
            out.push_str(&format!("# derived: {}\n", derived_json(p)));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Value::json).collect()))
            .collect();
        let doc = serde_json::json!({
            "config": self.config,
            "derived": self.derived.iter().map(derived_json).collect::<Vec<_>>(),
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("artifact serializes");
        text.push('\n');
        text
    }
}

fn real(x: f64) -> Value {
    Value::Real(x)
}

/// One unit of parallel work.
#[derive(Debug, Clone)]
enum Cell {
    Params { params: AnisotropyParams, n: usize },
    State { family: DeformationFamily, alpha_abs: f64, phase: f64 },
    StateParams { family: DeformationFamily, alpha_abs: f64, phase: f64, params: AnisotropyParams },
}

fn columns(command: Command) -> Vec<&'static str> {
    match command {
        Command::Levels => vec!["zeta", "B0", "n", "eps_minus", "eps_plus", "energy"],
        Command::EigenDensity => vec!["zeta", "B0", "n", "x", "density"],
        Command::Maxima => vec!["zeta", "B0", "n", "x0", "x_minus", "x_plus", "separation"],
        Command::NlcsDensity => {
            vec!["family", "alpha_abs", "alpha_phase", "zeta", "B0", "x", "density"]
        }
        Command::Uncertainty => vec![
            "family",
            "alpha_abs",
            "alpha_phase",
            "delta",
            "mean_xi",
            "mean_p",
            "var_xi",
            "var_p",
            "sigma_xi",
            "sigma_p",
            "hur",
        ],
        Command::Energy => vec![
            "family",
            "alpha_abs",
            "alpha_phase",
            "zeta",
            "B0",
            "v_xx",
            "v_yy",
            "pristine",
            "aniso",
        ],
        Command::Occupation => {
            vec!["family", "alpha_abs", "alpha_phase", "n", "probability", "poisson"]
        }
    }
}

fn cells(config: &RunConfig, params: &[AnisotropyParams]) -> Vec<Cell> {
    let mut out = Vec::new();
    match config.command {
        Command::Levels | Command::EigenDensity | Command::Maxima => {
            let levels: Vec<usize> = if config.command == Command::Levels {
                (0..=*config.n.iter().max().expect("validated")).collect()
            } else {
                config.n.clone()
            };
            for p in params {
                for &n in &levels {
                    out.push(Cell::Params { params: *p, n });
                }
            }
        }
        Command::Uncertainty | Command::Occupation => {
            for f in &config.families {
                for &a in &config.alpha_abs {
                    for &phi in &config.alpha_phase {
                        out.push(Cell::State { family: f.clone(), alpha_abs: a, phase: phi });
                    }
                }
            }
        }
        Command::NlcsDensity | Command::Energy => {
            for f in &config.families {
                for &a in &config.alpha_abs {
                    for &phi in &config.alpha_phase {
                        for p in params {
                            out.push(Cell::StateParams {
                                family: f.clone(),
                                alpha_abs: a,
                                phase: phi,
                                params: *p,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn state_for(
    config: &RunConfig,
    family: &DeformationFamily,
    alpha_abs: f64,
    phase: f64,
) -> crate::Result<CoherentState> {
    build_state(family.clone(), Complex64::from_polar(alpha_abs, phase), config.delta, config.tol)
}

fn grid_for(config: &RunConfig, fallback: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
    match config.grid {
        Some(g) => linspace(g.min, g.max, g.points),
        None => fallback(),
    }
}

fn evaluate(config: &RunConfig, cell: &Cell) -> crate::Result<Vec<Vec<Value>>> {
    let mut rows = Vec::new();
    match (config.command, cell) {
        (Command::Levels, Cell::Params { params: p, n }) => {
            rows.push(vec![
                real(p.zeta()),
                real(p.b0()),
                Value::Int(*n),
                real(eps_minus(p, *n)),
                real(eps_plus(p, *n)),
                real(energy(p, *n)),
            ]);
        }
        (Command::EigenDensity, Cell::Params { params: p, n }) => {
            for x in grid_for(config, || default_grid(p, *n)) {
                let rho = spinor_density(p, *n, x)?;
                rows.push(vec![real(p.zeta()), real(p.b0()), Value::Int(*n), real(x), real(rho)]);
            }
        }
        (Command::Maxima, Cell::Params { params: p, n }) => {
            let (lo, hi) = density_maxima(p, *n)?;
            rows.push(vec![
                real(p.zeta()),
                real(p.b0()),
                Value::Int(*n),
                real(p.x0()),
                real(lo),
                real(hi),
                real(hi - lo),
            ]);
        }
        (Command::Uncertainty, Cell::State { family, alpha_abs, phase }) => {
            let state = state_for(config, family, *alpha_abs, *phase)?;
            let r = uncertainty(&state)?;
            rows.push(vec![
                Value::Text(family.name().into()),
                real(*alpha_abs),
                real(*phase),
                real(config.delta),
                real(r.mean_xi),
                real(r.mean_p),
                real(r.var_xi),
                real(r.var_p),
                real(r.var_xi.sqrt()),
                real(r.var_p.sqrt()),
                real(r.hur),
            ]);
        }
        (Command::Occupation, Cell::State { family, alpha_abs, phase }) => {
            let state = state_for(config, family, *alpha_abs, *phase)?;
            for o in occupation_distribution(&state) {
                rows.push(vec![
                    Value::Text(family.name().into()),
                    real(*alpha_abs),
                    real(*phase),
                    Value::Int(o.n),
                    real(o.probability),
                    real(o.poisson),
                ]);
            }
        }
        (Command::NlcsDensity, Cell::StateParams { family, alpha_abs, phase, params: p }) => {
            let state = state_for(config, family, *alpha_abs, *phase)?;
            let grid = grid_for(config, || default_state_grid(&state, p, 2001));
            let profile = density(&state, p, &grid)?;
            for (x, rho) in profile.x.iter().zip(&profile.density) {
                rows.push(vec![
                    Value::Text(family.name().into()),
                    real(*alpha_abs),
                    real(*phase),
                    real(p.zeta()),
                    real(p.b0()),
                    real(*x),
                    real(*rho),
                ]);
            }
        }
        (Command::Energy, Cell::StateParams { family, alpha_abs, phase, params: p }) => {
            let state = state_for(config, family, *alpha_abs, *phase)?;
            let (pristine, aniso) = mean_energy(&state, p);
            rows.push(vec![
                Value::Text(family.name().into()),
                real(*alpha_abs),
                real(*phase),
                real(p.zeta()),
                real(p.b0()),
                real(p.v_xx()),
                real(p.v_yy()),
                real(pristine),
                real(aniso),
            ]);
        }
        _ => unreachable!("cells are built per command"),
    }
    Ok(rows)
}

/// Evaluates a configuration on `jobs` workers (rayon's default when `None`).
pub fn run(config: &RunConfig, jobs: Option<usize>) -> Result<Artifact, CliError> {
    config.validate()?;
    let params = config.params()?;
    let work = cells(config, &params);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::config("jobs: must be >= 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::io(format!("cannot start worker pool: {e}")))?;
    let chunks: Vec<Vec<Vec<Value>>> = pool.install(|| {
        work.par_iter()
            .map(|c| evaluate(config, c))
            .collect::<crate::Result<Vec<_>>>()
    })?;
    Ok(Artifact {
        config: config.clone(),
        derived: params,
        columns: columns(config.command),
        rows: chunks.into_iter().flatten().collect(),
    })
}

/// Preset reproducing the data grid behind one of the published figures.
pub fn figure_recipe(name: &str) -> Result<RunConfig, CliError> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let density_family = |family: DeformationFamily| {
        let mut c = RunConfig::new(Command::NlcsDensity);
        c.families = vec![family];
        c
    };
    let phase_sweep = linspace(0.0, 2.0 * PI, 9);
    let zeta_sweep = linspace(0.5, 1.5, 11);
    let fixed_alpha = |family: DeformationFamily| {
        let mut c = density_family(family);
        c.alpha_abs = vec![6.0];
        c.alpha_phase = phase_sweep.clone();
        c.anisotropy = Anisotropy::Zeta(vec![0.5, 1.0, 1.5]);
        c.grid = Some(GridSpec { min: -30.0, max: 26.0, points: 561 });
        c
    };
    let vs_zeta = |family: DeformationFamily| {
        let mut c = density_family(family);
        c.alpha_abs = vec![1.0, 5.0];
        c.alpha_phase = vec![FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
        c.anisotropy = Anisotropy::Zeta(zeta_sweep.clone());
        c.grid = Some(GridSpec { min: -22.0, max: 18.0, points: 401 });
        c
    };
    let hur = |family: DeformationFamily| {
        let mut c = RunConfig::new(Command::Uncertainty);
        c.families = vec![family];
        c.alpha_abs = linspace(0.0, 8.0, 33);
        c.alpha_phase = linspace(0.0, FRAC_PI_2, 5);
        c
    };
    let all_families = vec![
        DeformationFamily::Identity,
        DeformationFamily::ShiftedOne,
        DeformationFamily::ShiftedTwo,
    ];
    let config = match name {
        "fig2" => {
            let mut c = RunConfig::new(Command::EigenDensity);
            c.anisotropy = Anisotropy::Zeta(zeta_sweep.clone());
            c.n = vec![0, 1, 3, 5];
            c.grid = Some(GridSpec { min: -10.0, max: 6.0, points: 401 });
            c
        }
        "fig3" => fixed_alpha(DeformationFamily::Identity),
        "fig4" => vs_zeta(DeformationFamily::Identity),
        "fig5" => hur(DeformationFamily::Identity),
        "fig6" => fixed_alpha(DeformationFamily::ShiftedOne),
        "fig7" => vs_zeta(DeformationFamily::ShiftedOne),
        "fig8" => hur(DeformationFamily::ShiftedOne),
        "fig9" => fixed_alpha(DeformationFamily::ShiftedTwo),
        "fig10" => vs_zeta(DeformationFamily::ShiftedTwo),
        "fig11" => hur(DeformationFamily::ShiftedTwo),
        "fig12" => {
            let mut c = RunConfig::new(Command::Occupation);
            c.families = all_families;
            c.alpha_abs = vec![1.0, 3.0, 5.0];
            c
        }
        "mean-energy" => {
            let mut c = RunConfig::new(Command::Energy);
            c.families = all_families;
            c.alpha_abs = linspace(0.0, 8.0, 33);
            c.b0 = vec![0.5, 2.0];
            c.anisotropy = Anisotropy::Strain(StrainBlock {
                directions: vec![StrainDirection::X, StrainDirection::Y],
                epsilon: 0.21,
                nu: 0.15,
                beta: 2.0,
            });
            c
        }
        other => {
            return Err(CliError::config(format!(
                "unknown figure `{other}`; available: {}",
                FIGURE_NAMES.join(", ")
            )))
        }
    };
    Ok(config)
}

/// Parses `v`, `a,b,c` or the inclusive range `min:max:count`.
pub fn parse_axis(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("`{text}`: expected min:max:count"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("`{text}`: bad min `{lo}`"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("`{text}`: bad max `{hi}`"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("`{text}`: bad count `{count}`"))?;
        if count == 0 {
            return Err(format!("`{text}`: count must be >= 1"));
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("`{text}`: need finite min <= max"));
        }
        return Ok(linspace(lo, hi, count));
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{text}`: bad number `{s}`"))
        })
        .collect()
}

/// Parses `n`, `a,b,c` or the inclusive integer range `a:b`.
pub fn parse_levels(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| format!("`{text}`: bad level `{a}`"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("`{text}`: bad level `{b}`"))?;
        if a > b {
            return Err(format!("`{text}`: empty level range"));
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("`{text}`: bad level `{s}`")))
        .collect()
}

pub fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [lo, hi, points] = parts[..] else {
        return Err(format!("`{text}`: expected min:max:points"));
    };
    let min = lo.trim().parse().map_err(|_| format!("`{text}`: bad min `{lo}`"))?;
    let max = hi.trim().parse().map_err(|_| format!("`{text}`: bad max `{hi}`"))?;
    let points = points
        .trim()
        .parse()
        .map_err(|_| format!("`{text}`: bad point count `{points}`"))?;
    Ok(GridSpec { min, max, points })
}

fn parse_family(text: &str) -> Result<Vec<DeformationFamily>, String> {
    text.split(',')
        .map(|s| match s.trim() {
            "identity" => Ok(DeformationFamily::Identity),
            "shifted1" => Ok(DeformationFamily::ShiftedOne),
            "shifted2" => Ok(DeformationFamily::ShiftedTwo),
            other => Err(format!("unknown family `{other}` (identity, shifted1, shifted2)")),
        })
        .collect()
}

fn parse_directions(text: &str) -> Result<Vec<StrainDirection>, String> {
    text.split(',')
        .map(|s| match s.trim() {
            "x" => Ok(StrainDirection::X),
            "y" => Ok(StrainDirection::Y),
            other => Err(format!("unknown strain direction `{other}` (x, y)")),
        })
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (default: stdout, or $DIRAC_NLCS_OUT/<name>.<ext>)
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

// Aliases keep clap from treating the list-valued flags as repeated flags.
type Values = Vec<f64>;
type LevelList = Vec<usize>;
type Families = Vec<DeformationFamily>;
type Directions = Vec<StrainDirection>;

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    /// identity, shifted1, shifted2 (comma list)
    #[arg(long, value_parser = parse_family)]
    family: Option<Families>,
    /// |α|: value, list or min:max:count
    #[arg(long = "alpha-abs", value_parser = parse_axis)]
    alpha_abs: Option<Values>,
    /// arg α in radians: value, list or min:max:count
    #[arg(long = "alpha-phase", value_parser = parse_axis)]
    alpha_phase: Option<Values>,
    #[arg(long)]
    delta: Option<f64>,
    /// Anisotropy ζ = v_xx/v_yy: value, list or min:max:count
    #[arg(long, value_parser = parse_axis)]
    zeta: Option<Values>,
    /// Uniaxial strain direction(s): x, y or x,y
    #[arg(long = "strain-dir", value_parser = parse_directions)]
    strain_dir: Option<Directions>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Poisson ratio (default 0.15)
    #[arg(long)]
    nu: Option<f64>,
    /// Strain coupling (default 2)
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "B0", alias = "b0", value_parser = parse_axis)]
    b0: Option<Values>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Level(s); for `levels` the highest level listed
    #[arg(long, value_parser = parse_levels)]
    n: Option<LevelList>,
    /// x grid as min:max:points
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
    #[arg(long)]
    tol: Option<f64>,
    /// Start from a JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

impl ComputeArgs {
    fn resolve(&self, command: Command) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
                let mut c = RunConfig::from_json(&text)?;
                c.command = command;
                c
            }
            None => RunConfig::new(command),
        };
        if let Some(v) = &self.family {
            c.families = v.clone();
        }
        if let Some(v) = &self.alpha_abs {
            c.alpha_abs = v.clone();
        }
        if let Some(v) = &self.alpha_phase {
            c.alpha_phase = v.clone();
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = &self.b0 {
            c.b0 = v.clone();
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = &self.n {
            c.n = v.clone();
        }
        if let Some(v) = self.grid {
            c.grid = Some(v);
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.out.format {
            c.format = v;
        }
        let strain_flags = self.epsilon.is_some() || self.nu.is_some() || self.beta.is_some();
        match (&self.zeta, &self.strain_dir) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "--zeta and --strain-dir are mutually exclusive: give either ζ or a strain block",
                ))
            }
            (Some(z), None) => {
                if strain_flags {
                    return Err(CliError::config(
                        "--epsilon/--nu/--beta belong to a strain block and conflict with --zeta",
                    ));
                }
                c.anisotropy = Anisotropy::Zeta(z.clone());
            }
            (None, Some(dirs)) => {
                let epsilon = self
                    .epsilon
                    .ok_or_else(|| CliError::config("--strain-dir needs --epsilon"))?;
                c.anisotropy = Anisotropy::Strain(StrainBlock {
                    directions: dirs.clone(),
                    epsilon,
                    nu: self.nu.unwrap_or(0.15),
                    beta: self.beta.unwrap_or(2.0),
                });
            }
            (None, None) => {
                if strain_flags {
                    return Err(CliError::config("--epsilon/--nu/--beta need --strain-dir"));
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Landau spectrum ε∓ and E_n for levels 0..=n
    Levels(ComputeArgs),
    /// ρ_n(x) of the pseudo-spinor eigenstates
    EigenDensity(ComputeArgs),
    /// Positions x± of the density maxima
    Maxima(ComputeArgs),
    /// ρ_α(x) of nonlinear coherent states
    NlcsDensity(ComputeArgs),
    /// Moments, variances and σ_ξσ_p
    Uncertainty(ComputeArgs),
    /// Mean energy, pristine and anisotropic
    Energy(ComputeArgs),
    /// Occupation distribution and Poisson reference
    Occupation(ComputeArgs),
    /// Any computation over range-valued axes
    Sweep {
        #[arg(value_enum)]
        target: Command,
        #[command(flatten)]
        args: ComputeArgs,
    },
    /// Figure preset (fig2..fig12, mean-energy)
    Figure {
        name: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Parser)]
#[command(name = "dirac-nlcs", version, about = "Landau levels and nonlinear coherent states in anisotropic Dirac materials")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

fn destination(out: &OutputArgs, stem: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = &out.output {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| Path::new(&d).join(format!("{stem}.{}", format.extension())))
}

/// Writes through a temporary sibling so a failed write leaves nothing behind.
fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })?;
    fs::rename(&tmp, path).map_err(fail)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (config, out, stem) = match cli.command {
        CliCommand::Levels(a) => (a.resolve(Command::Levels)?, a.out, "levels".to_string()),
        CliCommand::EigenDensity(a) => {
            (a.resolve(Command::EigenDensity)?, a.out, "eigen-density".to_string())
        }
        CliCommand::Maxima(a) => (a.resolve(Command::Maxima)?, a.out, "maxima".to_string()),
        CliCommand::NlcsDensity(a) => {
            (a.resolve(Command::NlcsDensity)?, a.out, "nlcs-density".to_string())
        }
        CliCommand::Uncertainty(a) => {
            (a.resolve(Command::Uncertainty)?, a.out, "uncertainty".to_string())
        }
        CliCommand::Energy(a) => (a.resolve(Command::Energy)?, a.out, "energy".to_string()),
        CliCommand::Occupation(a) => {
            (a.resolve(Command::Occupation)?, a.out, "occupation".to_string())
        }
        CliCommand::Sweep { target, args } => {
            (args.resolve(target)?, args.out, format!("sweep-{}", target.name()))
        }
        CliCommand::Figure { name, out } => {
            let mut c = figure_recipe(&name)?;
            if let Some(f) = out.format {
                c.format = f;
            }
            (c, out, name)
        }
    };
    let text = run(&config, out.jobs)?.render();
    match destination(&out, &stem, config.format) {
        Some(path) => write_atomic(&path, &text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(format!("stdout: {e}"))),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
