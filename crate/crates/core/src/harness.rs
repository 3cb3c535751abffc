//! Run configuration, validation and the sweep drivers behind the CLI.
//!
//! Every output starts with `#`-prefixed header lines carrying the tool
//! version, command, seed and the full configuration as one JSON line, so a
//! result file can be parsed back into the [`RunConfig`] that produced it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::analysis::{design_gdof, empirical_gdof, gdof_theorem_f64, leakage_discrete_exact, leakage_upper_bound};
use crate::channel::{sample_gains, ChannelGains, Rx, StrengthConfig};
use crate::constellation::sum_entropy_bits;
use crate::decoder::{predicted_pe_bound, simulate_errors, GainSource, JointForm};
use crate::diophantine::{
    lemma1_bound, measure_b_grid, min_distance, outage_bound_raw, outage_fraction_mc, outage_threshold, LinearFormSpec,
    OutageReport, SCHEME_TAU,
};
use crate::error::Error;
use crate::ratio::{self, format_rational};
use crate::rng::{self, derive_seed, GAINS_STREAM};
use crate::scheme::{params_for, verify_power, worst_case_power_bound, Design, Regime, DEFAULT_GAMMA, GAMMA_MAX};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Joint-search candidate evaluations allowed per decode.
pub const SEARCH_COST_CAP: u64 = 10_000;

/// Draws tried when looking for sweep gains outside the outage set.
const MAX_GAIN_DRAWS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SweepGdof,
    SweepError,
    MeasureOutage,
    MinDistance,
    Leakage,
    VerifyPower,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::SweepGdof,
        Command::SweepError,
        Command::MeasureOutage,
        Command::MinDistance,
        Command::Leakage,
        Command::VerifyPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SweepGdof => "sweep-gdof",
            Command::SweepError => "sweep-error",
            Command::MeasureOutage => "measure-outage",
            Command::MinDistance => "min-distance",
            Command::Leakage => "leakage",
            Command::VerifyPower => "verify-power",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

fn default_epsilon() -> Rational64 {
    Rational64::new(1, 10)
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn default_delta() -> f64 {
    0.01
}
fn default_trials() -> u64 {
    10_000
}
fn default_samples() -> u64 {
    2000
}
fn default_grid() -> u64 {
    1000
}
fn default_timing() -> bool {
    true
}

/// Flat run configuration, read from a JSON object and/or CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(with = "ratio::serde_str_vec")]
    pub alpha: Vec<Rational64>,
    pub m: Vec<u32>,
    #[serde(with = "ratio::serde_str", default = "default_epsilon")]
    pub epsilon: Rational64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_grid")]
    pub grid: u64,
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Record per-point wall-clock time; when off the column is written as 0
    /// so files are byte-identical across runs.
    #[serde(default = "default_timing")]
    pub timing: bool,
}

impl RunConfig {
    /// A configuration with defaults for everything but the essentials.
    pub fn new(command: Command, alpha: Vec<Rational64>, m: Vec<u32>, seed: u64) -> Self {
        Self {
            command,
            alpha,
            m,
            epsilon: default_epsilon(),
            gamma: default_gamma(),
            delta: default_delta(),
            trials: default_trials(),
            samples: default_samples(),
            grid: default_grid(),
            seed,
            out: None,
            workers: None,
            timing: true,
        }
    }

    /// `(α, m)` pairs in output order.
    pub fn points(&self) -> Vec<(Rational64, u32)> {
        self.alpha.iter().flat_map(|&a| self.m.iter().map(move |&m| (a, m))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, naming the offending field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn error(field: &str, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, field: field.into(), message: message.into() }
    }

    fn warning(field: &str, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, field: field.into(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level} [{}]: {}", self.field, self.message)
    }
}

fn field_of(err: &Error) -> &'static str {
    match err {
        Error::UnrepresentableAlpha { .. } | Error::InvalidStrength(_) => "m",
        Error::NegativeLambda { .. } => "epsilon",
        Error::NoHelperRegime { .. } | Error::NotJointRegime { .. } => "alpha",
        Error::PowerViolation { .. } => "gamma",
        _ => "config",
    }
}

/// Checks representability of every `(α, m)` pair, `ε`-feasibility, the
/// joint-search cost cap and value ranges. Never fails; returns findings.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if config.alpha.is_empty() {
        out.push(Diagnostic::error("alpha", "alpha list is empty"));
    }
    if config.m.is_empty() {
        out.push(Diagnostic::error("m", "m list is empty"));
    }
    if !(config.gamma > 0.0 && config.gamma <= GAMMA_MAX) {
        out.push(Diagnostic::error("gamma", format!("gamma must lie in (0, 1/(8*sqrt(2))], got {}", config.gamma)));
    }
    if !ratio::is_positive(&config.epsilon) {
        out.push(Diagnostic::error("epsilon", "epsilon must be positive"));
    }
    if !(config.delta > 0.0 && config.delta <= 1.0) {
        out.push(Diagnostic::error("delta", format!("delta must lie in (0, 1], got {}", config.delta)));
    }
    if config.trials == 0 {
        out.push(Diagnostic::error("trials", "trials must be positive"));
    }
    let needs_samples = matches!(config.command, Command::MeasureOutage | Command::MinDistance);
    if needs_samples && config.samples < 100 {
        out.push(Diagnostic::error("samples", format!("samples must be at least 100, got {}", config.samples)));
    }
    if config.command == Command::VerifyPower && config.samples == 0 {
        out.push(Diagnostic::error("samples", "samples must be positive"));
    }
    if config.command == Command::MinDistance && config.grid < 100 {
        out.push(Diagnostic::error("grid", format!("grid must be at least 100, got {}", config.grid)));
    }
    if config.workers == Some(0) {
        out.push(Diagnostic::error("workers", "workers must be positive"));
    }
    if out.iter().any(Diagnostic::is_error) {
        return out;
    }

    for (alpha, m) in config.points() {
        let a = format_rational(&alpha);
        if let Err(e) = StrengthConfig::from_alpha(alpha, m) {
            out.push(Diagnostic::error(field_of(&e), format!("alpha = {a}, m = {m}: {e}")));
            continue;
        }
        if Regime::of(alpha) == Regime::NoHelper {
            if config.command == Command::SweepGdof {
                out.push(Diagnostic::warning("alpha", format!("alpha = {a} needs no helper; only d_theory is reported")));
            } else {
                out.push(Diagnostic::error("alpha", format!("alpha = {a}: {}", Error::NoHelperRegime { alpha: a.clone() })));
            }
            continue;
        }
        let design = match Design::build(alpha, m, config.epsilon, config.gamma) {
            Ok(d) => d,
            Err(e) => {
                out.push(Diagnostic::error(field_of(&e), format!("alpha = {a}, m = {m}: {e}")));
                continue;
            }
        };
        let joint = JointForm::of(&design).ok();
        let decodes = matches!(config.command, Command::SweepGdof | Command::SweepError);
        if let (true, Some(form)) = (decodes, joint) {
            if form.search_cost() > SEARCH_COST_CAP {
                out.push(Diagnostic::error(
                    "m",
                    format!(
                        "alpha = {a}, m = {m}: joint search needs {} evaluations per decode (cap {SEARCH_COST_CAP})",
                        form.search_cost()
                    ),
                ));
            }
        }
        if needs_samples {
            if joint.is_none() {
                out.push(Diagnostic::error(
                    "alpha",
                    format!("alpha = {a}: {}", Error::NotJointRegime { regime: design.regime().name().into() }),
                ));
            } else if config.command == Command::MeasureOutage
                && outage_bound_raw(config.delta, config.epsilon, &design.cfg) >= 1.0
            {
                out.push(Diagnostic::warning("delta", format!("alpha = {a}, m = {m}: analytic outage bound is vacuous (>= 1)")));
            }
        }
    }
    out
}

#[derive(Debug)]
pub enum HarnessError {
    Invalid(Vec<Diagnostic>),
    Scheme(Error),
    Io(std::io::Error),
    Config(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Invalid(diags) => {
                let lines: Vec<String> = diags.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect();
                write!(f, "invalid configuration:\n  {}", lines.join("\n  "))
            }
            HarnessError::Scheme(e) => write!(f, "{e}"),
            HarnessError::Io(e) => write!(f, "i/o error: {e}"),
            HarnessError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        HarnessError::Scheme(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Rendered result plus any non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub format: OutputFormat,
    pub body: String,
    pub warnings: Vec<Diagnostic>,
}

impl RunOutput {
    /// Lines that do not start with `#`.
    pub fn data_lines(&self) -> Vec<&str> {
        data_lines(&self.body)
    }
}

pub fn data_lines(body: &str) -> Vec<&str> {
    body.lines().filter(|l| !l.starts_with('#')).collect()
}

/// Validates and executes a configuration on a pool of `config.workers`
/// threads (rayon's default when unset).
pub fn run(config: &RunConfig) -> Result<RunOutput, HarnessError> {
    let diags = validate(config);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(HarnessError::Invalid(diags));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    let (format, body) = pool.install(|| execute(config))?;
    Ok(RunOutput { format, body, warnings: diags })
}

/// Runs the configuration and writes the result to `config.out` when set.
pub fn run_to_file(config: &RunConfig) -> Result<RunOutput, HarnessError> {
    let output = run(config)?;
    if let Some(path) = &config.out {
        std::fs::write(path, &output.body)?;
    }
    Ok(output)
}

fn execute(config: &RunConfig) -> Result<(OutputFormat, String), HarnessError> {
    match config.command {
        Command::SweepGdof => Ok((OutputFormat::Csv, sweep_gdof(config)?)),
        Command::SweepError => Ok((OutputFormat::Csv, sweep_error(config)?)),
        Command::MeasureOutage => Ok((OutputFormat::Json, measure_outage(config)?)),
        Command::MinDistance => Ok((OutputFormat::Csv, min_distance_sweep(config)?)),
        Command::Leakage => Ok((OutputFormat::Csv, leakage(config)?)),
        Command::VerifyPower => Ok((OutputFormat::Csv, power(config)?)),
    }
}

fn header(config: &RunConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    format!(
        "# cojam {VERSION}\n# command: {}\n# seed: {}\n# config: {json}\n",
        config.command, config.seed
    )
}

/// Recovers the configuration echoed in a result file's header.
pub fn parse_header(body: &str) -> Result<RunConfig, HarnessError> {
    let line = body
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| HarnessError::Config("no `# config:` header line".into()))?;
    serde_json::from_str(line).map_err(|e| HarnessError::Config(format!("bad header config: {e}")))
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(config: &RunConfig, columns: &[&str]) -> Self {
        let mut text = header(config);
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

struct Timer {
    start: Instant,
    enabled: bool,
}

impl Timer {
    fn start(enabled: bool) -> Self {
        Self { start: Instant::now(), enabled }
    }

    fn ms(&self) -> String {
        if self.enabled {
            self.start.elapsed().as_millis().to_string()
        } else {
            "0".into()
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Fixed gains shared by every `m` of a sweep at one `α`: the first draw on
/// the reserved gains stream for which, in the joint regimes, both receivers'
/// minimum distance clears the outage threshold at every `m`.
pub fn sweep_gains(seed: u64, designs: &[Design], delta: f64) -> Result<ChannelGains, HarnessError> {
    let mut r = rng::stream(seed, GAINS_STREAM);
    for _ in 0..MAX_GAIN_DRAWS {
        let g = sample_gains(&mut r);
        if designs.iter().all(|d| outside_outage(d, &g, delta)) {
            return Ok(g);
        }
    }
    Err(HarnessError::Config(format!("no gains outside the outage set in {MAX_GAIN_DRAWS} draws; increase m or lower delta")))
}

/// True unless the design decodes jointly and some receiver's minimum
/// distance is below the outage threshold.
pub fn outside_outage(design: &Design, gains: &ChannelGains, delta: f64) -> bool {
    let Ok(form) = JointForm::of(design) else { return true };
    let Ok(threshold) = outage_threshold(design.regime(), design.params.alpha, delta, &design.cfg) else {
        return true;
    };
    Rx::BOTH.iter().all(|&rx| {
        let g = gains.receiver(rx);
        min_distance(g.direct, g.cross, form.a0, form.a1, form.q0_max, form.q1_max) >= threshold
    })
}

fn designs_for(config: &RunConfig, alpha: Rational64) -> Result<Vec<Design>, HarnessError> {
    config.m.iter().map(|&m| Design::build(alpha, m, config.epsilon, config.gamma).map_err(HarnessError::from)).collect()
}

fn sweep_gdof(config: &RunConfig) -> Result<String, HarnessError> {
    let mut csv = Csv::new(
        config,
        &["alpha", "m", "P", "d_theory", "d_design", "d_empirical", "pe_user1", "pe_user2", "leak_bits", "n_trials", "wall_ms"],
    );
    let mut index = 0u64;
    for &alpha in &config.alpha {
        let a = format_rational(&alpha);
        if Regime::of(alpha) == Regime::NoHelper {
            for &m in &config.m {
                let cfg = StrengthConfig::from_alpha(alpha, m)?;
                csv.row(&[a.clone(), m.to_string(), num(cfg.p()), num(gdof_theorem_f64(alpha)), String::new(), String::new(), String::new(), String::new(), String::new(), "0".into(), "0".into()]);
                index += 1;
            }
            continue;
        }
        let designs = designs_for(config, alpha)?;
        let gains = sweep_gains(config.seed, &designs, config.delta)?;
        for design in &designs {
            let timer = Timer::start(config.timing);
            let point = empirical_gdof(design, GainSource::Fixed(gains), config.trials, derive_seed(config.seed, index))?;
            csv.row(&[
                a.clone(),
                design.cfg.m_direct.to_string(),
                num(design.cfg.p()),
                num(point.d_theory),
                num(point.d_design),
                num(point.d_empirical),
                num(point.pe_user1),
                num(point.pe_user2),
                num(point.leak_bits),
                point.n_trials.to_string(),
                timer.ms(),
            ]);
            index += 1;
        }
    }
    Ok(csv.text)
}

fn sweep_error(config: &RunConfig) -> Result<String, HarnessError> {
    let mut csv = Csv::new(
        config,
        &[
            "alpha", "m", "regime", "q_common", "q_private", "pe_user1", "pe_user2", "pe_own", "se_own", "pe_common",
            "pe_private", "pe_sum", "degenerate", "d_min", "pe_bound", "n_trials", "wall_ms",
        ],
    );
    let mut index = 0u64;
    for &alpha in &config.alpha {
        let designs = designs_for(config, alpha)?;
        let gains = sweep_gains(config.seed, &designs, config.delta)?;
        for design in &designs {
            let timer = Timer::start(config.timing);
            let c = simulate_errors(design, GainSource::Fixed(gains), config.trials, derive_seed(config.seed, index));
            let n2 = (2 * c.n_trials) as f64;
            let pe_own = c.pe_pooled();
            let (d_min, bound) = match JointForm::of(design) {
                Ok(form) => {
                    let d = Rx::BOTH
                        .iter()
                        .map(|&rx| {
                            let g = gains.receiver(rx);
                            min_distance(g.direct, g.cross, form.a0, form.a1, form.q0_max, form.q1_max)
                        })
                        .fold(f64::INFINITY, f64::min);
                    (num(d), num(predicted_pe_bound(d, config.delta, design)?))
                }
                Err(_) => (String::new(), String::new()),
            };
            csv.row(&[
                format_rational(&alpha),
                design.cfg.m_direct.to_string(),
                design.regime().to_string(),
                design.common.half_range().to_string(),
                design.private.map_or(String::new(), |p| p.half_range().to_string()),
                num(c.pe_own(Rx::One)),
                num(c.pe_own(Rx::Two)),
                num(pe_own),
                num((pe_own * (1.0 - pe_own) / n2).sqrt()),
                num((c.rx[0].common + c.rx[1].common) as f64 / n2),
                num((c.rx[0].private + c.rx[1].private) as f64 / n2),
                num(c.pe_sum()),
                (c.rx[0].degenerate + c.rx[1].degenerate).to_string(),
                d_min,
                bound,
                c.n_trials.to_string(),
                timer.ms(),
            ]);
            index += 1;
        }
    }
    Ok(csv.text)
}

#[derive(Serialize)]
struct OutageFile<'a> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    seed: u64,
    config: &'a RunConfig,
    reports: Vec<OutageReport>,
}

fn measure_outage(config: &RunConfig) -> Result<String, HarnessError> {
    let mut reports = Vec::new();
    for (index, (alpha, m)) in config.points().into_iter().enumerate() {
        let design = Design::build(alpha, m, config.epsilon, config.gamma)?;
        reports.push(outage_fraction_mc(&design, config.delta, config.samples, derive_seed(config.seed, index as u64))?);
    }
    let file = OutageFile { tool: "cojam", version: VERSION, command: config.command, seed: config.seed, config, reports };
    let json = serde_json::to_string_pretty(&file).expect("report serializes");
    Ok(format!("{}{json}\n", header(config)))
}

/// Reads the reports back out of a `measure-outage` result.
pub fn parse_outage_reports(body: &str) -> Result<Vec<serde_json::Value>, HarnessError> {
    let json: String = data_lines(body).join("\n");
    let v: serde_json::Value = serde_json::from_str(&json).map_err(|e| HarnessError::Config(format!("bad report: {e}")))?;
    Ok(v["reports"].as_array().cloned().unwrap_or_default())
}

fn min_distance_sweep(config: &RunConfig) -> Result<String, HarnessError> {
    let mut csv = Csv::new(
        config,
        &[
            "alpha", "m", "regime", "a0", "a1", "q0_max", "q1_max", "threshold", "n_samples", "fraction_below",
            "d_min_median", "b_measure_grid", "lemma1_bound", "grid", "wall_ms",
        ],
    );
    for (index, (alpha, m)) in config.points().into_iter().enumerate() {
        let timer = Timer::start(config.timing);
        let design = Design::build(alpha, m, config.epsilon, config.gamma)?;
        let form = JointForm::of(&design)?;
        let threshold = outage_threshold(design.regime(), alpha, config.delta, &design.cfg)?;
        let seed = derive_seed(config.seed, index as u64);
        let mut d: Vec<f64> = (0..config.samples)
            .map(|i| {
                let g = sample_gains(&mut rng::stream(seed, i)).receiver(Rx::One);
                min_distance(g.direct, g.cross, form.a0, form.a1, form.q0_max, form.q1_max)
            })
            .collect();
        let below = d.iter().filter(|&&v| v < threshold).count();
        d.sort_by(f64::total_cmp);
        let median = d[d.len() / 2];
        // Difference ranges of the search box: |Δq0| ≤ 2·Q0, |Δq1| ≤ 2·Q1.
        let spec = LinearFormSpec::new(form.a0, form.a1, 2 * form.q0_max, 2 * form.q1_max, threshold.min(1.0), SCHEME_TAU)?;
        csv.row(&[
            format_rational(&alpha),
            m.to_string(),
            design.regime().to_string(),
            form.a0.to_string(),
            form.a1.to_string(),
            form.q0_max.to_string(),
            form.q1_max.to_string(),
            num(threshold),
            config.samples.to_string(),
            num(below as f64 / config.samples as f64),
            num(median),
            num(measure_b_grid(&spec, config.grid as usize)),
            num(lemma1_bound(&spec)),
            config.grid.to_string(),
            timer.ms(),
        ]);
    }
    Ok(csv.text)
}

fn leakage(config: &RunConfig) -> Result<String, HarnessError> {
    let mut csv = Csv::new(config, &["alpha", "m", "regime", "q_common", "h_common", "h_sum", "leak_exact", "leak_bound"]);
    for (alpha, m) in config.points() {
        let design = Design::build(alpha, m, config.epsilon, config.gamma)?;
        csv.row(&[
            format_rational(&alpha),
            m.to_string(),
            design.regime().to_string(),
            design.common.half_range().to_string(),
            num(design.jamming.entropy_bits()),
            num(sum_entropy_bits(&design.common, &design.jamming)?),
            num(leakage_discrete_exact(&design)?),
            num(leakage_upper_bound(design.regime())),
        ]);
    }
    Ok(csv.text)
}

fn power(config: &RunConfig) -> Result<String, HarnessError> {
    let mut csv = Csv::new(
        config,
        &["alpha", "m", "regime", "e_x1_worst", "e_x2_worst", "e_x3_worst", "e_max_random", "bound_160g2_3", "d_design"],
    );
    let worst = ChannelGains::uniform(2.0)?;
    for (index, (alpha, m)) in config.points().into_iter().enumerate() {
        let params = params_for(alpha, config.epsilon, config.gamma)?;
        let design = Design::new(params, StrengthConfig::from_alpha(alpha, m)?)?;
        let [e1, e2, e3] = verify_power(&design, &worst)?;
        let seed = derive_seed(config.seed, index as u64);
        let mut e_max = 0.0f64;
        for i in 0..config.samples {
            let g = sample_gains(&mut rng::stream(seed, i));
            e_max = verify_power(&design, &g)?.into_iter().fold(e_max, f64::max);
        }
        csv.row(&[
            format_rational(&alpha),
            m.to_string(),
            design.regime().to_string(),
            num(e1),
            num(e2),
            num(e3),
            num(e_max),
            num(worst_case_power_bound(config.gamma)),
            format_rational(&design_gdof(&design.params)),
        ]);
    }
    Ok(csv.text)
}
