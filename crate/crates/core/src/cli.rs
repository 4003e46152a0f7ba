//! Configuration files, scenario runs, sweeps and their output formats.
//!
//! Configuration is TOML:
//!
//! ```toml
//! [scenario]
//! kind = "entangled"        # entangled | mixture | product
//! alpha = 0.1               # real number or [re, im]
//! beta = "auto"             # "auto" (default) completes to +sqrt(1 - |alpha|^2)
//! gamma = 0.1
//! delta = "auto"
//!
//! [scenario.overlaps]       # either a and c ...
//! a = 0.9
//! c = 0.9
//! # ... or a Gaussian recoil model shared by both atoms:
//! # sigma_x = 1.0
//! # k_recoil = 0.5
//!
//! [output]
//! format = "table"          # table | csv | json-lines
//!
//! [tolerances]
//! product = 1e-8            # relative second singular value for product tests
//!
//! [[sweep.axes]]            # sweep files only
//! path = "alpha"            # alpha beta gamma delta overlaps.a overlaps.c
//! start = 0.05              # overlaps.sigma_x overlaps.k_recoil
//! stop = 0.3
//! count = 5
//! ```

use std::fmt;
use std::io::Write;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::absorption::{AbsorptionAmplitudes, InitialStateKind, Scenario};
use crate::entanglement::PRODUCT_TOLERANCE;
use crate::error::Error;
use crate::overlap::{gaussian_recoil_overlap, GaussianRecoilModel, RecoilOverlaps};
use crate::report::{evaluate, fmt_number, ScenarioReport};

/// Tolerance on `|α|² + |β|² = 1` when loading a configuration.
pub const CONFIG_NORM_TOLERANCE: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Numerical(e) => write!(f, "numerical guard: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Numerical guards map to exit code 3; every other library error is a
/// configuration problem.
fn classify(e: Error, line: Option<usize>) -> CliError {
    match e {
        Error::ZeroNorm(_) | Error::DegenerateSpectrum(_) | Error::NotNormalized(_) => CliError::Numerical(e),
        other => CliError::Config(ConfigError::at(line, other.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    #[serde(rename = "table")]
    Table,
    #[serde(rename = "csv")]
    Csv,
    #[serde(rename = "json-lines")]
    JsonLines,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" | "jsonl" => Ok(OutputFormat::JsonLines),
            other => Err(format!(
                "unknown output format {other:?} (table, csv, json-lines)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmplitudeSpec {
    Value(Complex64),
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OverlapSpec {
    Direct { a: f64, c: f64 },
    Gaussian { sigma_x: f64, k_recoil: f64 },
}

/// Source lines of the scenario fields, for error messages.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldLines {
    pub kind: Option<usize>,
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub gamma: Option<usize>,
    pub delta: Option<usize>,
    pub overlaps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub kind: InitialStateKind,
    pub alpha: Complex64,
    pub beta: AmplitudeSpec,
    pub gamma: Complex64,
    pub delta: AmplitudeSpec,
    pub overlaps: OverlapSpec,
    pub lines: FieldLines,
}

impl ScenarioSpec {
    /// Completes "auto" amplitudes, validates normalization and computes
    /// overlaps. Pairs within [`CONFIG_NORM_TOLERANCE`] of unit norm are
    /// rescaled to unit norm.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let (alpha, beta) = resolve_pair(
            self.alpha,
            self.beta,
            "|alpha|^2 + |beta|^2",
            self.lines.beta.or(self.lines.alpha),
        )?;
        let (gamma, delta) = resolve_pair(
            self.gamma,
            self.delta,
            "|gamma|^2 + |delta|^2",
            self.lines.delta.or(self.lines.gamma),
        )?;
        let amplitudes = AbsorptionAmplitudes::new(alpha, beta, gamma, delta)
            .map_err(|e| classify(e, self.lines.alpha))?;
        let overlaps = match self.overlaps {
            OverlapSpec::Direct { a, c } => RecoilOverlaps::from_overlaps(a, c),
            OverlapSpec::Gaussian { sigma_x, k_recoil } => GaussianRecoilModel::new(sigma_x, k_recoil)
                .and_then(|m| {
                    let s = gaussian_recoil_overlap(&m);
                    RecoilOverlaps::from_overlaps(s, s)
                }),
        }
        .map_err(|e| classify(e, self.lines.overlaps))?;
        Ok(Scenario {
            kind: self.kind,
            amplitudes,
            overlaps,
        })
    }

    fn set(&mut self, path: ParamPath, value: f64) {
        let re = Complex64::new(value, 0.0);
        match path {
            ParamPath::Alpha => self.alpha = re,
            ParamPath::Beta => self.beta = AmplitudeSpec::Value(re),
            ParamPath::Gamma => self.gamma = re,
            ParamPath::Delta => self.delta = AmplitudeSpec::Value(re),
            ParamPath::OverlapA | ParamPath::OverlapC => {
                if let OverlapSpec::Direct { a, c } = &mut self.overlaps {
                    if path == ParamPath::OverlapA {
                        *a = value;
                    } else {
                        *c = value;
                    }
                }
            }
            ParamPath::SigmaX | ParamPath::KRecoil => {
                if let OverlapSpec::Gaussian { sigma_x, k_recoil } = &mut self.overlaps {
                    if path == ParamPath::SigmaX {
                        *sigma_x = value;
                    } else {
                        *k_recoil = value;
                    }
                }
            }
        }
    }
}

fn resolve_pair(
    excite: Complex64,
    stay: AmplitudeSpec,
    relation: &str,
    line: Option<usize>,
) -> Result<(Complex64, Complex64), CliError> {
    let stay = match stay {
        AmplitudeSpec::Value(v) => v,
        AmplitudeSpec::Auto => {
            let rest = 1.0 - excite.norm_sqr();
            if rest < -CONFIG_NORM_TOLERANCE || !rest.is_finite() {
                return Err(ConfigError::at(
                    line,
                    format!(
                        "{relation} = 1 cannot hold: |excitation amplitude|^2 = {}",
                        excite.norm_sqr()
                    ),
                )
                .into());
            }
            Complex64::new(rest.max(0.0).sqrt(), 0.0)
        }
    };
    let norm = excite.norm_sqr() + stay.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > CONFIG_NORM_TOLERANCE {
        return Err(ConfigError::at(
            line,
            format!("normalization violated: {relation} = {norm}, expected 1 (tolerance {CONFIG_NORM_TOLERANCE:e})"),
        )
        .into());
    }
    let scale = 1.0 / norm.sqrt();
    Ok((excite * scale, stay * scale))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamPath {
    Alpha,
    Beta,
    Gamma,
    Delta,
    OverlapA,
    OverlapC,
    SigmaX,
    KRecoil,
}

impl ParamPath {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamPath::Alpha => "alpha",
            ParamPath::Beta => "beta",
            ParamPath::Gamma => "gamma",
            ParamPath::Delta => "delta",
            ParamPath::OverlapA => "overlaps.a",
            ParamPath::OverlapC => "overlaps.c",
            ParamPath::SigmaX => "overlaps.sigma_x",
            ParamPath::KRecoil => "overlaps.k_recoil",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.strip_prefix("scenario.").unwrap_or(s);
        Some(match s {
            "alpha" => ParamPath::Alpha,
            "beta" => ParamPath::Beta,
            "gamma" => ParamPath::Gamma,
            "delta" => ParamPath::Delta,
            "overlaps.a" => ParamPath::OverlapA,
            "overlaps.c" => ParamPath::OverlapC,
            "overlaps.sigma_x" => ParamPath::SigmaX,
            "overlaps.k_recoil" => ParamPath::KRecoil,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepAxis {
    pub path: ParamPath,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub output: OutputFormat,
    pub product_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axes: Vec<SweepAxis>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAmplitude {
    Real(f64),
    Complex([f64; 2]),
    Keyword(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverlaps {
    a: Option<f64>,
    c: Option<f64>,
    sigma_x: Option<f64>,
    k_recoil: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: Spanned<String>,
    alpha: Spanned<RawAmplitude>,
    beta: Option<Spanned<RawAmplitude>>,
    gamma: Spanned<RawAmplitude>,
    delta: Option<Spanned<RawAmplitude>>,
    overlaps: Spanned<RawOverlaps>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    product: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    path: String,
    start: f64,
    stop: f64,
    count: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axes: Vec<Spanned<RawAxis>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scenario: RawScenario,
    output: Option<RawOutput>,
    tolerances: Option<RawTolerances>,
    sweep: Option<Spanned<RawSweep>>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, span: Range<usize>) -> Option<usize> {
        let end = span.start.min(self.0.len());
        Some(self.0[..end].bytes().filter(|b| *b == b'\n').count() + 1)
    }
}

fn parse_toml(source: &str) -> Result<RawFile, ConfigError> {
    toml::from_str::<RawFile>(source).map_err(|e| {
        let lines = Lines(source);
        let line = e.span().and_then(|s| lines.of(s));
        ConfigError::at(line, e.message().trim().to_string())
    })
}

fn amplitude(raw: &Spanned<RawAmplitude>, name: &str, lines: &Lines) -> Result<AmplitudeSpec, ConfigError> {
    let line = lines.of(raw.span());
    match raw.get_ref() {
        RawAmplitude::Real(v) => Ok(AmplitudeSpec::Value(Complex64::new(*v, 0.0))),
        RawAmplitude::Complex([re, im]) => Ok(AmplitudeSpec::Value(Complex64::new(*re, *im))),
        RawAmplitude::Keyword(k) if k == "auto" => Ok(AmplitudeSpec::Auto),
        RawAmplitude::Keyword(k) => Err(ConfigError::at(
            line,
            format!("{name} must be a number, [re, im] or \"auto\", got {k:?}"),
        )),
    }
}

fn explicit(spec: AmplitudeSpec, name: &str, line: Option<usize>) -> Result<Complex64, ConfigError> {
    match spec {
        AmplitudeSpec::Value(v) => Ok(v),
        AmplitudeSpec::Auto => Err(ConfigError::at(line, format!("{name} cannot be \"auto\""))),
    }
}

fn build_run(raw: &RawFile, lines: &Lines) -> Result<RunConfig, ConfigError> {
    let s = &raw.scenario;
    let field_lines = FieldLines {
        kind: lines.of(s.kind.span()),
        alpha: lines.of(s.alpha.span()),
        beta: s.beta.as_ref().and_then(|b| lines.of(b.span())),
        gamma: lines.of(s.gamma.span()),
        delta: s.delta.as_ref().and_then(|d| lines.of(d.span())),
        overlaps: lines.of(s.overlaps.span()),
    };
    let kind = s
        .kind
        .get_ref()
        .parse::<InitialStateKind>()
        .map_err(|e| ConfigError::at(field_lines.kind, e.to_string()))?;
    let alpha = explicit(amplitude(&s.alpha, "alpha", lines)?, "alpha", field_lines.alpha)?;
    let gamma = explicit(amplitude(&s.gamma, "gamma", lines)?, "gamma", field_lines.gamma)?;
    let beta = match &s.beta {
        Some(b) => amplitude(b, "beta", lines)?,
        None => AmplitudeSpec::Auto,
    };
    let delta = match &s.delta {
        Some(d) => amplitude(d, "delta", lines)?,
        None => AmplitudeSpec::Auto,
    };
    let ov = s.overlaps.get_ref();
    let overlaps = match (ov.a, ov.c, ov.sigma_x, ov.k_recoil) {
        (Some(a), Some(c), None, None) => OverlapSpec::Direct { a, c },
        (None, None, Some(sigma_x), Some(k_recoil)) => OverlapSpec::Gaussian { sigma_x, k_recoil },
        _ => {
            return Err(ConfigError::at(
                field_lines.overlaps,
                "overlaps must give exactly one of {a, c} or {sigma_x, k_recoil}",
            ))
        }
    };

    let output = match raw.output.as_ref().and_then(|o| o.format.as_ref()) {
        Some(f) => f
            .get_ref()
            .parse()
            .map_err(|e: String| ConfigError::at(lines.of(f.span()), e))?,
        None => OutputFormat::Table,
    };
    let product_tolerance = match raw.tolerances.as_ref().and_then(|t| t.product.as_ref()) {
        Some(t) => {
            let v = *t.get_ref();
            validate_tolerance(v).map_err(|m| ConfigError::at(lines.of(t.span()), m))?
        }
        None => PRODUCT_TOLERANCE,
    };
    Ok(RunConfig {
        scenario: ScenarioSpec {
            kind,
            alpha,
            beta,
            gamma,
            delta,
            overlaps,
            lines: field_lines,
        },
        output,
        product_tolerance,
    })
}

pub fn validate_tolerance(v: f64) -> Result<f64, String> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("product tolerance must lie in (0, 1), got {v}"))
    }
}

/// Parses and validates a run configuration.
pub fn parse_run_config(source: &str) -> Result<RunConfig, CliError> {
    let raw = parse_toml(source)?;
    let lines = Lines(source);
    let config = build_run(&raw, &lines)?;
    config.scenario.resolve()?;
    Ok(config)
}

/// Parses a sweep configuration. Individual grid points are validated
/// when the sweep runs.
pub fn parse_sweep_config(source: &str) -> Result<SweepConfig, CliError> {
    let raw = parse_toml(source)?;
    let lines = Lines(source);
    let base = build_run(&raw, &lines)?;
    let sweep = raw
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::at(None, "sweep file needs a [sweep] table with axes"))?;
    if sweep.get_ref().axes.is_empty() {
        return Err(ConfigError::at(lines.of(sweep.span()), "sweep needs at least one axis").into());
    }
    let mut axes = Vec::new();
    for axis in &sweep.get_ref().axes {
        let line = lines.of(axis.span());
        let raw = axis.get_ref();
        let path = ParamPath::parse(&raw.path)
            .ok_or_else(|| ConfigError::at(line, format!("unknown sweep path {:?}", raw.path)))?;
        let incompatible = matches!(
            (path, base.scenario.overlaps),
            (
                ParamPath::OverlapA | ParamPath::OverlapC,
                OverlapSpec::Gaussian { .. }
            ) | (ParamPath::SigmaX | ParamPath::KRecoil, OverlapSpec::Direct { .. })
        );
        if incompatible {
            return Err(ConfigError::at(
                line,
                format!(
                    "sweep path {} does not match the overlap specification",
                    path.as_str()
                ),
            )
            .into());
        }
        if raw.count < 2 {
            return Err(ConfigError::at(
                line,
                format!("axis {} needs count >= 2, got {}", path.as_str(), raw.count),
            )
            .into());
        }
        if !(raw.start.is_finite() && raw.stop.is_finite()) {
            return Err(ConfigError::at(line, "axis bounds must be finite").into());
        }
        axes.push(SweepAxis {
            path,
            start: raw.start,
            stop: raw.stop,
            count: raw.count as usize,
        });
    }
    Ok(SweepConfig { base, axes })
}

/// Evaluates one run configuration.
pub fn run_scenario(config: &RunConfig) -> Result<ScenarioReport, CliError> {
    let scenario = config.scenario.resolve()?;
    evaluate(&scenario, config.product_tolerance).map_err(|e| classify(e, None))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub path: String,
    pub value: f64,
}

/// One grid point of a sweep: the swept coordinates and either a report
/// or an error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ScenarioReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

/// Evaluates every grid point in row-major order (first axis slowest).
pub fn run_sweep(config: &SweepConfig) -> Vec<SweepRecord> {
    let total: usize = config.axes.iter().map(|a| a.count).product();
    let mut records = Vec::with_capacity(total);
    let mut index = vec![0usize; config.axes.len()];
    for point in 0..total {
        let mut spec = config.base.scenario;
        let mut coordinates = Vec::with_capacity(config.axes.len());
        for (axis, i) in config.axes.iter().zip(&index) {
            let v = axis.value(*i);
            spec.set(axis.path, v);
            coordinates.push(Coordinate {
                path: axis.path.as_str().to_string(),
                value: v,
            });
        }
        let run = RunConfig {
            scenario: spec,
            ..config.base.clone()
        };
        let (report, error, exit_code) = match run_scenario(&run) {
            Ok(r) => (Some(r), None, EXIT_OK),
            Err(e) => (None, Some(e.to_string()), e.exit_code()),
        };
        records.push(SweepRecord {
            point,
            coordinates,
            report,
            error,
            exit_code,
        });
        for k in (0..index.len()).rev() {
            index[k] += 1;
            if index[k] < config.axes[k].count {
                break;
            }
            index[k] = 0;
        }
    }
    records
}

/// Fixed CSV columns following `point` and the swept coordinates.
pub fn csv_header(axes: &[SweepAxis]) -> Vec<String> {
    let mut header = vec!["point".to_string()];
    header.extend(axes.iter().map(|a| a.path.as_str().to_string()));
    header.extend(ScenarioReport::COLUMNS.iter().map(|c| c.to_string()));
    header.push("error".to_string());
    header
}

pub fn write_report<W: Write>(
    out: &mut W,
    report: &ScenarioReport,
    format: OutputFormat,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Table => write_report_table(out, report)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(ScenarioReport::COLUMNS)?;
            w.write_record(report.csv_fields())?;
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            serde_json::to_writer(&mut *out, report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn complex_str(re: f64, im: f64) -> String {
    if im == 0.0 {
        fmt_number(re)
    } else {
        format!(
            "{}{}{}i",
            fmt_number(re),
            if im < 0.0 { "-" } else { "+" },
            fmt_number(im.abs())
        )
    }
}

fn write_report_table<W: Write>(out: &mut W, r: &ScenarioReport) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_else(|| "n/a".into());
    let rows: Vec<(&str, String)> = vec![
        ("kind", r.kind.to_string()),
        ("alpha", complex_str(r.alpha_re, r.alpha_im)),
        ("beta", complex_str(r.beta_re, r.beta_im)),
        ("gamma", complex_str(r.gamma_re, r.gamma_im)),
        ("delta", complex_str(r.delta_re, r.delta_im)),
        (
            "overlaps (a, b)",
            format!("({}, {})", fmt_number(r.a), fmt_number(r.b)),
        ),
        (
            "overlaps (c, d)",
            format!("({}, {})", fmt_number(r.c), fmt_number(r.d)),
        ),
        ("p_double", format!("{:.6e}", r.p_double)),
        ("p_a_only", format!("{:.6e}", r.p_a_only)),
        ("p_b_only", format!("{:.6e}", r.p_b_only)),
        ("p_none", format!("{:.6e}", r.p_none)),
        (
            "p_double_indistinguishable",
            format!("{:.6e}", r.p_double_indistinguishable),
        ),
        ("entropy_initial [bits]", format!("{:.12}", r.entropy_initial)),
        ("entropy_final [bits]", format!("{:.12}", r.entropy_final)),
        ("entropy_final_lambda [bits]", opt(r.entropy_final_lambda)),
        ("k_value", opt(r.k_value)),
        (
            "lambda_verdict",
            r.lambda_verdict
                .map(|v| if v { "pass" } else { "fail" }.to_string())
                .unwrap_or_else(|| "n/a".into()),
        ),
        ("spatial_internal_product", r.spatial_internal_product.to_string()),
        ("classification", r.classification.to_string()),
        ("linear_regime_warning", r.linear_regime_warning.to_string()),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        writeln!(out, "{k:<width$}  {v}")?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(
    out: &mut W,
    axes: &[SweepAxis],
    records: &[SweepRecord],
    format: OutputFormat,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(csv_header(axes))?;
            for rec in records {
                let mut row = vec![rec.point.to_string()];
                row.extend(rec.coordinates.iter().map(|c| fmt_number(c.value)));
                match &rec.report {
                    Some(r) => row.extend(r.csv_fields()),
                    None => row.extend(std::iter::repeat_n(String::new(), ScenarioReport::COLUMNS.len())),
                }
                row.push(rec.error.clone().unwrap_or_default());
                w.write_record(row)?;
            }
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            for rec in records {
                serde_json::to_writer(&mut *out, rec).map_err(std::io::Error::from)?;
                writeln!(out)?;
            }
        }
        OutputFormat::Table => {
            let mut header: Vec<String> = vec!["point".into()];
            header.extend(axes.iter().map(|a| a.path.as_str().to_string()));
            header.extend(
                [
                    "p_double",
                    "p_double_indist",
                    "S_initial",
                    "S_final",
                    "k_value",
                    "classification",
                ]
                .iter()
                .map(|s| s.to_string()),
            );
            let mut rows = vec![header];
            for rec in records {
                let mut row = vec![rec.point.to_string()];
                row.extend(rec.coordinates.iter().map(|c| format!("{:.6}", c.value)));
                match (&rec.report, &rec.error) {
                    (Some(r), _) => row.extend([
                        format!("{:.6e}", r.p_double),
                        format!("{:.6e}", r.p_double_indistinguishable),
                        format!("{:.6}", r.entropy_initial),
                        format!("{:.6}", r.entropy_final),
                        r.k_value
                            .map(|k| format!("{k:.6}"))
                            .unwrap_or_else(|| "n/a".into()),
                        r.classification.to_string(),
                    ]),
                    (None, e) => row.push(format!("error: {}", e.clone().unwrap_or_default())),
                }
                rows.push(row);
            }
            let ncols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
            let widths: Vec<usize> = (0..ncols)
                .map(|c| {
                    rows.iter()
                        .filter_map(|r| r.get(c))
                        .map(|s| s.chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            for row in rows {
                let line: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(i, s)| format!("{s:<w$}", w = widths[i]))
                    .collect();
                writeln!(out, "{}", line.join("  ").trim_end())?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::Classification;

    const RUN: &str = r#"
[scenario]
kind = "entangled"
alpha = 0.1
beta = "auto"
gamma = 0.1
delta = "auto"

[scenario.overlaps]
a = 0.9
c = 0.9
"#;

    #[test]
    fn parses_and_runs_reference_config() {
        let cfg = parse_run_config(RUN).unwrap();
        assert_eq!(cfg.output, OutputFormat::Table);
        assert_eq!(cfg.product_tolerance, PRODUCT_TOLERANCE);
        let r = run_scenario(&cfg).unwrap();
        assert!((r.p_double_indistinguishable - 2.0e-4).abs() < 1e-16);
        assert_eq!(r.classification, Classification::NonProductHyperentangled);
    }

    #[test]
    fn normalization_violation_names_relation_and_line() {
        let src = RUN.replace("beta = \"auto\"", "beta = 0.9");
        let err = parse_run_config(&src).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        let msg = err.to_string();
        assert!(msg.contains("|alpha|^2 + |beta|^2"), "{msg}");
        assert!(msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn complex_amplitudes_and_gaussian_overlaps() {
        let src = r#"
[scenario]
kind = "product"
alpha = [0.0, 0.2]
gamma = 0.3
[scenario.overlaps]
sigma_x = 1.0
k_recoil = 1.0
[output]
format = "json-lines"
"#;
        let cfg = parse_run_config(src).unwrap();
        assert_eq!(cfg.output, OutputFormat::JsonLines);
        let sc = cfg.scenario.resolve().unwrap();
        assert_eq!(sc.amplitudes.alpha, Complex64::new(0.0, 0.2));
        assert!((sc.overlaps.a - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn overlap_specification_must_be_exclusive() {
        let src = RUN.replace("c = 0.9", "c = 0.9\nsigma_x = 1.0");
        let err = parse_run_config(&src).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        let src = RUN.replace("c = 0.9", "");
        assert!(parse_run_config(&src).is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let src = RUN.replace("gamma = 0.1", "gamma = = 0.1");
        let err = parse_run_config(&src).unwrap_err();
        assert!(err.to_string().contains("line 6"), "{err}");
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let src = RUN.replace("\"entangled\"", "\"bell\"");
        let err = parse_run_config(&src).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn sweep_axes_are_row_major() {
        let src = format!(
            "{RUN}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.1\nstop = 0.2\ncount = 2\n\n[[sweep.axes]]\npath = \"overlaps.a\"\nstart = 0.5\nstop = 1.0\ncount = 3\n"
        );
        let cfg = parse_sweep_config(&src).unwrap();
        let recs = run_sweep(&cfg);
        assert_eq!(recs.len(), 6);
        let coords: Vec<(f64, f64)> = recs
            .iter()
            .map(|r| (r.coordinates[0].value, r.coordinates[1].value))
            .collect();
        assert_eq!(
            coords,
            vec![
                (0.1, 0.5),
                (0.1, 0.75),
                (0.1, 1.0),
                (0.2, 0.5),
                (0.2, 0.75),
                (0.2, 1.0)
            ]
        );
    }

    #[test]
    fn sweep_rejects_short_axis_and_wrong_path() {
        let short = format!("{RUN}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.1\nstop = 0.2\ncount = 1\n");
        assert_eq!(parse_sweep_config(&short).unwrap_err().exit_code(), EXIT_CONFIG);
        let wrong = format!(
            "{RUN}\n[[sweep.axes]]\npath = \"overlaps.k_recoil\"\nstart = 0.1\nstop = 0.2\ncount = 3\n"
        );
        assert_eq!(parse_sweep_config(&wrong).unwrap_err().exit_code(), EXIT_CONFIG);
        let missing = RUN.to_string();
        assert_eq!(parse_sweep_config(&missing).unwrap_err().exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn failing_points_become_error_records() {
        let src = format!(
            "{}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.5\nstop = 1.5\ncount = 3\n",
            RUN
        );
        let recs = run_sweep(&parse_sweep_config(&src).unwrap());
        assert!(recs[0].report.is_some());
        assert!(recs[1].report.is_some());
        assert!(recs[2].error.as_deref().unwrap().contains("|alpha|^2"));
        assert_eq!(recs[2].exit_code, EXIT_CONFIG);
    }

    #[test]
    fn degenerate_spectrum_is_a_numerical_guard() {
        // α = 1, β = 0, γ = 0, δ = 1 makes αγ(ac+bd) + βδ vanish
        let src = RUN
            .replace("alpha = 0.1", "alpha = 1.0")
            .replace("gamma = 0.1", "gamma = 0.0");
        let err = run_scenario(&parse_run_config(&src).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_NUMERICAL);
    }
}
