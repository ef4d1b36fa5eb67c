//! The `pdmdirac` command line: argument and config resolution, dispatch to
//! the library, and CSV/JSON/SVG emission.
//!
//! Every subcommand's parameters live in one struct that is both the clap
//! argument set and the serde/JSON-schema shape of the `--config` file. Flags
//! are resolved first, then keys from the config file replace them.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dirac_system::{decoupled_operator, linear_odd_extension, pt_symmetry_check, build_coupled_operator, PtInvolution};
use crate::discretization::{Boundary, Grid};
use crate::error::PdmError;
use crate::foldy_wouthuysen::commutator_checks;
use crate::harmonic::{analytic_energies, numeric_energies};
use crate::heun::{frobenius_at_one, inverse_map, map_to_heun, series_residual, transmission, Branch};
use crate::output::{csv_table, write_atomic};
use crate::potentials::{effective_potential_general, potential_csv, schrodingerizing_potential};
use crate::profiles::MassProfile;
use crate::{figures, svg};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PDMDIRAC_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pdmdirac", version, about = "Position-dependent-mass Dirac fermions with a complex potential")]
pub struct Cli {
    /// JSON file whose keys replace the corresponding flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKindArg {
    Linear,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum InvolutionArg {
    Identity,
    Sigma3,
}

impl From<InvolutionArg> for PtInvolution {
    fn from(v: InvolutionArg) -> Self {
        match v {
            InvolutionArg::Identity => PtInvolution::Identity,
            InvolutionArg::Sigma3 => PtInvolution::Sigma3,
        }
    }
}

/// Mass profile selection shared by several subcommands.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
pub struct ProfileArgs {
    /// Profile family (defaults depend on the subcommand).
    #[arg(long = "profile", visible_alias = "kind", value_enum)]
    pub profile: Option<ProfileKindArg>,
    /// Slope of the linear mass m = mu x.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Peak of the hyperbolic mass m0 sech(a x)^(1/2).
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    /// Inverse width of the hyperbolic mass.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Left end of the domain.
    #[arg(long, allow_hyphen_values = true)]
    pub xlo: Option<f64>,
    /// Right end of the domain.
    #[arg(long, allow_hyphen_values = true)]
    pub xhi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
pub struct OutputArgs {
    /// Output directory; falls back to $PDMDIRAC_OUT_DIR, then the working directory.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct ProfileCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// Number of sample nodes.
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct PotentialCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    /// Energy entering the general effective potential.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub energy: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct SpectrumCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// Interior grid nodes.
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    /// Number of levels.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct ScatterCmd {
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.2)]
    pub emin: f64,
    #[arg(long, default_value_t = 5.0)]
    pub emax: f64,
    /// Number of energies, endpoints included.
    #[arg(long, default_value_t = 25)]
    pub steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct HeunCmd {
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub energy: f64,
    /// Highest series coefficient.
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    /// Evaluation point ξ = cosh(a x).
    #[arg(long, default_value_t = 1.3)]
    pub xi: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct FwCheckCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 1601)]
    pub n: usize,
    /// Interval on which the identities are measured.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-2.0, 2.0])]
    pub window: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct PtCheckCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    /// Spinor involution; defaults to identity (hyperbolic) or sigma3 (linear).
    #[arg(long, value_enum)]
    pub involution: Option<InvolutionArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize, JsonSchema)]
#[schemars(deny_unknown_fields)]
pub struct FiguresCmd {
    /// Slopes for the linear-mass figures.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub mu_values: Vec<f64>,
    /// Peaks for the hyperbolic figures at fixed a.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.5])]
    pub m0_values: Vec<f64>,
    /// Widths for the hyperbolic figures at fixed m0.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub a_values: Vec<f64>,
    /// Fixed m0 when a varies, and for the free state.
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    /// Fixed a when m0 varies, and for the free state.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Slope for the eigenfunction figure.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Energy of the free state.
    #[arg(long, default_value_t = 2.0)]
    pub energy: f64,
    /// Samples per curve.
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// A fully resolved run: the subcommand and all of its parameters. This is
/// also the root type of the published config schema.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Mass, m' and m'' on a grid (CSV).
    Profile(ProfileCmd),
    /// Schrödingerizing potential and effective potential (CSV).
    Potential(PotentialCmd),
    /// Linear-mass spectrum, analytic against finite differences (CSV + SVG).
    Spectrum(SpectrumCmd),
    /// Transmission and reflection through the hyperbolic barrier (CSV).
    Scatter(ScatterCmd),
    /// Frobenius solutions of the Heun form about ξ = 1 (JSON).
    Heun(HeunCmd),
    /// Foldy–Wouthuysen commutator identities and mass-scale sweep (JSON).
    FwCheck(FwCheckCmd),
    /// PT symmetry of the assembled operator and spectrum statistics (JSON).
    PtCheck(PtCheckCmd),
    /// All figures as SVG plus their data as CSV.
    Figures(FiguresCmd),
}

impl RunConfig {
    fn output(&self) -> &OutputArgs {
        match self {
            RunConfig::Profile(c) => &c.output,
            RunConfig::Potential(c) => &c.output,
            RunConfig::Spectrum(c) => &c.output,
            RunConfig::Scatter(c) => &c.output,
            RunConfig::Heun(c) => &c.output,
            RunConfig::FwCheck(c) => &c.output,
            RunConfig::PtCheck(c) => &c.output,
            RunConfig::Figures(c) => &c.output,
        }
    }
}

/// JSON schema of the config file.
pub fn config_schema() -> Value {
    serde_json::to_value(schemars::schema_for!(RunConfig)).expect("schema serializes")
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameters.
    Config(String),
    /// A library failure; configuration-type errors still map to exit 2.
    Library(PdmError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Library(e) if e.is_configuration() => EXIT_CONFIG,
            CliError::Library(_) => EXIT_NUMERIC,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Library(PdmError::Io(_)) => "io",
            CliError::Library(e) if e.is_configuration() => "parameter",
            CliError::Library(_) => "numerical",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let mut err = json!({
            "code": self.exit_code(),
            "kind": self.kind(),
            "message": self.message(),
        });
        if let CliError::Library(PdmError::Singular { nodes }) = self {
            err["singular_nodes"] = json!(nodes);
        }
        json!({ "error": err })
    }
}

impl From<PdmError> for CliError {
    fn from(e: PdmError) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Applies the config file on top of the flag values and rejects keys that
/// do not belong to the subcommand.
pub fn resolve_config(flags: RunConfig, config: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = config else { return Ok(flags) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let file: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
    merge_config(flags, &file)
}

pub fn merge_config(flags: RunConfig, file: &Value) -> CliResult<RunConfig> {
    let Value::Object(file) = file else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    let to_map = |v: Value| match v {
        Value::Object(m) => m,
        _ => unreachable!("run configs serialize to objects"),
    };
    let mut merged = to_map(serde_json::to_value(&flags).map_err(PdmError::from)?);
    if let Some(sc) = file.get("subcommand") {
        if sc != &merged["subcommand"] {
            return Err(CliError::Config(format!(
                "config is for subcommand {sc} but {} was invoked",
                merged["subcommand"]
            )));
        }
    }
    for (k, v) in file {
        merged.insert(k.clone(), v.clone());
    }
    let typed: RunConfig = serde_json::from_value(Value::Object(merged.clone()))
        .map_err(|e| CliError::Config(format!("config rejected: {e}")))?;
    let known: Map<String, Value> = to_map(serde_json::to_value(&typed).map_err(PdmError::from)?);
    let mut unknown: Vec<&String> = merged.keys().filter(|k| !known.contains_key(*k)).collect();
    unknown.sort();
    if !unknown.is_empty() {
        return Err(CliError::Config(format!("unknown config key(s): {unknown:?}")));
    }
    Ok(typed)
}

/// Where outputs go: `--out-dir`, then the environment, then `.`.
pub fn output_dir(cfg: &RunConfig, env_out: Option<&Path>) -> PathBuf {
    cfg.output()
        .out_dir
        .clone()
        .or_else(|| env_out.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Result of one command: the text for stdout and the files written.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

struct Sink {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Sink {
    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.files.push(path);
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ProfileArgs {
    fn kind_or(&self, default: ProfileKindArg) -> ProfileKindArg {
        self.profile.unwrap_or(default)
    }

    /// Builds the profile; `half_width` is the default symmetric domain of
    /// the hyperbolic profile and `linear_hi` the default right end of the linear one.
    fn build(&self, default: ProfileKindArg, half_width: f64, linear_hi: f64) -> CliResult<MassProfile> {
        Ok(match self.kind_or(default) {
            ProfileKindArg::Linear => {
                if let Some(lo) = self.xlo.filter(|&lo| lo != 0.0) {
                    return Err(CliError::Config(format!("the linear profile starts at x = 0, got xlo = {lo}")));
                }
                MassProfile::linear(self.mu, self.xhi.unwrap_or(linear_hi))?
            }
            ProfileKindArg::Hyperbolic => MassProfile::hyperbolic_on(
                self.m0,
                self.a,
                self.xlo.unwrap_or(-half_width),
                self.xhi.unwrap_or(half_width),
            )?,
        })
    }
}

/// Grid avoiding the linear profile's m = 0 endpoint.
fn regular_grid(p: &MassProfile, n: usize) -> CliResult<Grid> {
    let (lo, hi) = p.domain();
    Ok(match p {
        MassProfile::Linear { .. } => Grid::interior(lo, hi, n)?,
        _ => Grid::new(lo, hi, n)?,
    })
}

fn with_config(mut body: Value, cfg: &RunConfig) -> CliResult<String> {
    body["config"] = serde_json::to_value(cfg).map_err(PdmError::from)?;
    let mut s = serde_json::to_string_pretty(&body).map_err(PdmError::from)?;
    s.push('\n');
    Ok(s)
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Runs one resolved configuration.
pub fn execute(cfg: &RunConfig, out_dir: &Path) -> CliResult<Emitted> {
    let mut sink = Sink { dir: out_dir.to_path_buf(), files: Vec::new() };
    let stdout = match cfg {
        RunConfig::Profile(c) => {
            let p = c.profile.build(ProfileKindArg::Hyperbolic, 20.0, 20.0)?;
            let (lo, hi) = p.domain();
            let grid = Grid::new(lo, hi, c.n)?;
            let rows = grid
                .nodes()
                .into_iter()
                .map(|x| Ok(vec![x, p.mass_at(x)?, p.dmass_at(x)?, p.d2mass_at(x)?]))
                .collect::<Result<Vec<_>, PdmError>>()?;
            let csv = csv_table(&["x[length]", "m[mass]", "dm[mass/length]", "d2m[mass/length^2]"], rows);
            sink.write("profile.csv", &csv)?;
            csv
        }
        RunConfig::Potential(c) => {
            let p = c.profile.build(ProfileKindArg::Hyperbolic, 20.0, 20.0)?;
            let grid = regular_grid(&p, c.n)?;
            let v = schrodingerizing_potential(&p, &grid)?;
            let veff = effective_potential_general(&p, &v, c.energy)?;
            let csv = potential_csv(&v, &veff)?;
            sink.write("potential.csv", &csv)?;
            csv
        }
        RunConfig::Spectrum(c) => run_spectrum(c, &mut sink)?,
        RunConfig::Scatter(c) => {
            positive("m0", c.m0)?;
            positive("a", c.a)?;
            if c.steps < 2 || !(c.emin > 0.0 && c.emax > c.emin) {
                return Err(CliError::Config("scatter needs 0 < emin < emax and steps >= 2".into()));
            }
            let mut rows = Vec::with_capacity(c.steps);
            for i in 0..c.steps {
                let e = c.emin + (c.emax - c.emin) * i as f64 / (c.steps - 1) as f64;
                let s = transmission(c.m0, c.a, e)?;
                rows.push(vec![e, s.transmission, s.reflection, s.transmission + s.reflection - 1.0]);
            }
            let csv = csv_table(&["E[energy]", "T[1]", "R[1]", "flux_defect[1]"], rows);
            sink.write("scatter.csv", &csv)?;
            csv
        }
        RunConfig::Heun(c) => {
            let params = map_to_heun(c.m0, c.a, c.energy)?;
            let mut branches = Vec::new();
            let mut series = Vec::new();
            for s in [0.0, 0.5] {
                let fs = frobenius_at_one(&params, s, c.order)?;
                let v = fs.eval(c.xi)?;
                let res = series_residual(&params, &fs, c.xi)?;
                branches.push(json!({
                    "exponent": s,
                    "coefficients": fs.coefficients.iter().map(|z| c_json(*z)).collect::<Vec<_>>(),
                    "value": c_json(v.value),
                    "derivative": c_json(v.first),
                    "residual": res.norm(),
                }));
                series.push(fs);
            }
            let w = series[0].wronskian_with(&series[1], c.xi)?;
            let body = json!({
                "parameters": params,
                "fuchsian_residual": params.fuchsian_residual(),
                "xi": c.xi,
                "x": inverse_map(c.xi, c.a, Branch::NonNegative)?,
                "order": c.order,
                "branches": branches,
                "wronskian": c_json(w),
                "wronskian_abs": w.norm(),
            });
            let text = with_config(body, cfg)?;
            sink.write("heun.json", &text)?;
            text
        }
        RunConfig::FwCheck(c) => {
            let [lo, hi] = <[f64; 2]>::try_from(c.window.as_slice())
                .map_err(|_| CliError::Config("window takes exactly two values".into()))?;
            let p = c.profile.build(ProfileKindArg::Hyperbolic, 8.0, 8.0)?;
            let grid = regular_grid(&p, c.n)?;
            let report = commutator_checks(&p, &grid, (lo, hi))?;
            let text = with_config(serde_json::to_value(&report).map_err(PdmError::from)?, cfg)?;
            sink.write("fw_check.json", &text)?;
            text
        }
        RunConfig::PtCheck(c) => run_pt_check(c, cfg, &mut sink)?,
        RunConfig::Figures(c) => {
            let figs = figures::build_figures(c)?;
            let mut names = Vec::new();
            for (stem, fig) in &figs {
                sink.write(&format!("{stem}.svg"), &svg::render_svg(fig)?)?;
                sink.write(&format!("{stem}.csv"), &svg::figure_csv(fig)?)?;
                names.push(format!("{stem}.svg"));
                names.push(format!("{stem}.csv"));
            }
            with_config(json!({ "files": names }), cfg)?
        }
    };
    Ok(Emitted { stdout, files: sink.files })
}

fn run_spectrum(c: &SpectrumCmd, sink: &mut Sink) -> CliResult<String> {
    if c.profile.kind_or(ProfileKindArg::Linear) != ProfileKindArg::Linear {
        return Err(CliError::Config("spectrum supports the linear profile only".into()));
    }
    if c.k == 0 {
        return Err(CliError::Config("k must be at least 1".into()));
    }
    let p = c.profile.build(ProfileKindArg::Linear, 20.0, 20.0)?;
    let (_, x_hi) = p.domain();
    let mu = c.profile.mu;
    let levels: Vec<usize> = (0..c.k).map(|j| 2 * j + 1).collect();
    let exact = analytic_energies(mu, &levels)?;
    let numeric = numeric_energies(mu, x_hi, c.n, c.k)?;
    let rows = levels
        .iter()
        .zip(exact.iter().zip(&numeric.energies))
        .map(|(&n, (&e, &f))| vec![n as f64, e, f, (e - f).abs()]);
    let csv = csv_table(&["n[1]", "E_analytic[energy]", "E_numeric[energy]", "abs_err[energy]"], rows);
    sink.write("spectrum.csv", &csv)?;
    let fig = figures::linear_modes(mu, &levels[..levels.len().min(4)], 401)?;
    sink.write("spectrum_modes.svg", &svg::render_svg(&fig)?)?;
    Ok(csv)
}

fn run_pt_check(c: &PtCheckCmd, cfg: &RunConfig, sink: &mut Sink) -> CliResult<String> {
    let kind = c.profile.kind_or(ProfileKindArg::Hyperbolic);
    let default_gamma = match kind {
        ProfileKindArg::Hyperbolic => InvolutionArg::Identity,
        ProfileKindArg::Linear => InvolutionArg::Sigma3,
    };
    let gamma: PtInvolution = c.involution.unwrap_or(default_gamma).into();
    let other = match gamma {
        PtInvolution::Identity => PtInvolution::Sigma3,
        PtInvolution::Sigma3 => PtInvolution::Identity,
    };
    let (h, decoupled) = match kind {
        ProfileKindArg::Hyperbolic => {
            let p = c.profile.build(kind, 20.0, 20.0)?;
            let (lo, hi) = p.domain();
            let grid = Grid::new(lo, hi, c.n)?;
            let v = schrodingerizing_potential(&p, &grid)?;
            let h = build_coupled_operator(&p, &v, &grid, Boundary::Dirichlet)?;
            let d = decoupled_operator(&p, &grid, Boundary::Dirichlet)?;
            (h, Some(pt_symmetry_check(&d, PtInvolution::Identity)?))
        }
        ProfileKindArg::Linear => {
            let x_hi = c.profile.xhi.unwrap_or(20.0);
            positive("xhi", x_hi)?;
            (linear_odd_extension(c.profile.mu, x_hi, c.n, Boundary::Dirichlet)?, None)
        }
    };
    let report = pt_symmetry_check(&h, gamma)?;
    let mut body = serde_json::to_value(&report).map_err(PdmError::from)?;
    body["real_fraction"] = json!(report.real_fraction());
    body["alternative_involution"] = json!({
        "involution": other,
        "delta": crate::dirac_system::pt_delta(&h, other)?,
    });
    body["decoupled"] = match decoupled {
        Some(d) => {
            let mut v = serde_json::to_value(&d).map_err(PdmError::from)?;
            v["real_fraction"] = json!(d.real_fraction());
            v
        }
        None => Value::Null,
    };
    let text = with_config(body, cfg)?;
    sink.write("pt_check.json", &text)?;
    Ok(text)
}

/// Full command-line entry point. Returns the process exit code; diagnostics
/// go to `stderr` as JSON.
pub fn run<I, T>(args: I, env_out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let err = CliError::Config(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.exit_code();
        }
    };
    let outcome = resolve_config(cli.command, cli.config.as_deref()).and_then(|cfg| {
        let dir = output_dir(&cfg, env_out);
        execute(&cfg, &dir)
    });
    match outcome {
        Ok(emitted) => {
            let _ = stdout.write_all(emitted.stdout.as_bytes());
            EXIT_OK
        }
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json());
            err.exit_code()
        }
    }
}
